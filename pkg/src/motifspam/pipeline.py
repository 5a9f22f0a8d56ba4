"""Windowed end-to-end runs, filtered-vs-full benchmarking and CSV exports."""

from __future__ import annotations

import json
import logging
import os
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .canon import MotifId
from .ingest import IngestConfig, load_stopwords, normalize_all, read_comments, select_window
from .motif import DEFAULT_SIZES, MotifFilter, NetworkCensus, network_census
from .netgen import CommentNetwork, NetgenConfig, comment_network, write_graphml, write_network
from .profile import DEFAULT_EPSILON, ProfileMatrix, Spatialization, pca_2d, ratio_profile

logger = logging.getLogger(__name__)

CONFIG_KEYS = {
    "input", "out_dir", "window_start", "window_hours", "n_windows", "min_length",
    "stopwords", "latin_only", "jaccard_threshold", "shingle_window", "k", "sizes",
    "motifs", "prune", "epsilon", "plot_motifs", "roles", "graphml", "lenient",
}


@dataclass
class PipelineConfig:
    input: str
    out_dir: str = "out"
    window_start: int | None = None  # default: earliest timestamp in the input
    window_hours: float = 6
    n_windows: int | None = None  # default: enough windows to cover the input
    min_length: int = 25
    stopwords: str | None = None
    latin_only: bool = True
    jaccard_threshold: float = 0.6
    shingle_window: int = 3
    k: int = 2
    sizes: tuple[int, ...] = DEFAULT_SIZES
    motifs: str | None = None  # motif-subset file
    prune: bool = True
    epsilon: int = DEFAULT_EPSILON
    plot_motifs: tuple[str, str] | None = None
    roles: str | None = None  # ground-truth CSV from synth
    graphml: bool = False
    lenient: bool = False

    def __post_init__(self):
        self.sizes = tuple(self.sizes)
        if self.plot_motifs is not None:
            self.plot_motifs = tuple(self.plot_motifs)
        if self.window_hours <= 0:
            raise ValueError("window_hours must be positive")
        for name in ("input", "stopwords", "motifs", "roles"):
            path = getattr(self, name)
            if path is not None and not os.path.exists(path):
                raise FileNotFoundError(f"{name}: {path} does not exist")

    @classmethod
    def from_file(cls, path, **overrides) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        unknown = set(doc) - CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)

    @property
    def duration(self) -> int:
        return int(round(self.window_hours * 3600))

    def ingest_config(self) -> IngestConfig:
        return IngestConfig(self.min_length, load_stopwords(self.stopwords), self.latin_only)

    def netgen_config(self) -> NetgenConfig:
        return NetgenConfig(self.shingle_window, self.jaccard_threshold)

    def motif_filter(self) -> MotifFilter | None:
        return MotifFilter.read(self.motifs) if self.motifs else None


@dataclass
class WindowResult:
    index: int
    start: int
    network: CommentNetwork
    census: NetworkCensus
    profiles: ProfileMatrix
    nrp: np.ndarray
    spatialization: Spatialization | None
    timings: dict[str, float] = field(default_factory=dict)


def profile_network(net: CommentNetwork, k: int = 2, sizes=DEFAULT_SIZES,
                    motif_filter: MotifFilter | None = None, prune: bool = True,
                    epsilon: int = DEFAULT_EPSILON):
    """Census -> profile matrix -> normalized ratio profiles, with stage timings.

    Returns ``(census, matrix, nrp, timings)``; ``nrp`` is ``None`` when the
    network has no users.
    """
    t0 = time.perf_counter()
    census = network_census(net, k=k, sizes=sizes, motif_filter=motif_filter, prune=prune)
    t1 = time.perf_counter()
    allowed = None if motif_filter is None else motif_filter.allowed
    matrix = ProfileMatrix.from_census(census, allowed)
    nrp = ratio_profile(matrix, epsilon).nrp if matrix.egos else None
    t2 = time.perf_counter()
    return census, matrix, nrp, {"enumeration": t1 - t0, "postprocessing": t2 - t1}


def spatialize(nrp) -> Spatialization | None:
    if nrp is None or nrp.shape[0] < 2 or nrp.shape[1] < 2:
        return None
    return pca_2d(nrp)


def process_window(comments, cfg: PipelineConfig, index: int, start: int,
                   motif_filter: MotifFilter | None = None) -> WindowResult:
    t0 = time.perf_counter()
    clean = normalize_all(select_window(comments, start, cfg.duration), cfg.ingest_config())
    net = comment_network(clean, cfg.netgen_config())
    t1 = time.perf_counter()
    census, matrix, nrp, timings = profile_network(net, cfg.k, cfg.sizes, motif_filter,
                                                   cfg.prune, cfg.epsilon)
    t2 = time.perf_counter()
    spat = spatialize(nrp)
    t3 = time.perf_counter()
    timings.update(netgen=t1 - t0, pca=t3 - t2)
    return WindowResult(index, start, net, census, matrix,
                        nrp if nrp is not None else np.zeros((0, 0)), spat, timings)


def window_starts(comments, cfg: PipelineConfig) -> list[int]:
    if cfg.window_start is not None:
        first = cfg.window_start
    elif comments:
        first = min(c.timestamp for c in comments)
    else:
        first = 0
    if cfg.n_windows is not None:
        n = cfg.n_windows
    elif comments:
        last = max(c.timestamp for c in comments)
        n = max(0, (last - first) // cfg.duration + 1)
    else:
        n = 0
    return [first + i * cfg.duration for i in range(n)]


# --- exports -----------------------------------------------------------------------

def write_counts(census: NetworkCensus, path) -> None:
    from .canon import all_motifs
    motifs = all_motifs()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ego_id,motif_id,count\n")
        for ego, row in zip(census.egos, census.counts):
            for j in np.nonzero(row)[0]:
                fh.write(f"{ego},{motifs[j]},{row[j]}\n")


def write_profiles(matrix: ProfileMatrix, nrp, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ego_id,motif_id,nrp\n")
        for i, ego in enumerate(matrix.egos):
            for j, m in enumerate(matrix.motifs):
                fh.write(f"{ego},{m},{nrp[i, j]:.17g}\n")


def read_profiles(path) -> ProfileMatrix:
    """Long-format ``ego_id,motif_id,nrp`` back into an egos x motifs matrix."""
    cells: dict[tuple[str, MotifId], float] = {}
    egos: dict[str, None] = {}
    motifs: set[MotifId] = set()
    with open(path, encoding="utf-8") as fh:
        if fh.readline().strip() != "ego_id,motif_id,nrp":
            raise ValueError(f"{path}: expected header 'ego_id,motif_id,nrp'")
        for line in fh:
            if not line.strip():
                continue
            ego, mid, val = line.strip().split(",")
            m = MotifId.parse(mid)
            egos.setdefault(ego)
            motifs.add(m)
            cells[(ego, m)] = float(val)
    ego_list = list(egos)
    motif_list = sorted(motifs)
    values = np.array([[cells.get((e, m), 0.0) for m in motif_list] for e in ego_list])
    return ProfileMatrix(ego_list, motif_list, values.reshape(len(ego_list), len(motif_list)))


def export_spatialization(path, egos, coords, spam_label: dict, roles: dict | None = None,
                          columns=("pc1", "pc2")) -> None:
    """One row per ego; ``role`` column only when ground truth is available."""
    header = ["ego_id", *columns, "spam_label"] + (["role"] if roles is not None else [])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for ego, (x, y) in zip(egos, coords):
            row = [ego, f"{x:.17g}", f"{y:.17g}", str(int(spam_label.get(ego, False)))]
            if roles is not None:
                row.append(roles.get(ego, ""))
            fh.write(",".join(row) + "\n")


def two_motif_coords(matrix: ProfileMatrix, nrp, a: MotifId, b: MotifId,
                     motif_filter: MotifFilter | None = None) -> np.ndarray:
    """nrp columns of two motifs; an unobserved motif has an all-zero column."""
    cols = []
    for m in (a, b):
        if motif_filter is not None and m not in motif_filter:
            raise KeyError(f"motif {m} is excluded by the motif filter")
        if m in matrix.motifs:
            cols.append(nrp[:, matrix.motifs.index(m)])
        else:
            cols.append(np.zeros(len(matrix.egos)))
    return np.column_stack(cols) if matrix.egos else np.zeros((0, 2))


# --- run ---------------------------------------------------------------------------

@dataclass
class RunReport:
    windows: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def write_window_outputs(res: WindowResult, wdir: Path, cfg: PipelineConfig,
                         roles: dict | None) -> list[str]:
    wdir.mkdir(parents=True, exist_ok=True)
    files = []

    def out(name):
        files.append(name)
        return wdir / name

    write_network(res.network, out("network.txt"))
    if cfg.graphml:
        write_graphml(res.network, out("network.graphml"))
    write_counts(res.census, out("counts.csv"))
    write_profiles(res.profiles, res.nrp, out("profiles.csv"))
    coords = res.spatialization.coords if res.spatialization is not None else np.zeros((0, 2))
    egos = res.profiles.egos if res.spatialization is not None else []
    export_spatialization(out("spatialization.csv"), egos, coords,
                          res.network.spam_label, roles)
    if cfg.plot_motifs is not None:
        a, b = (MotifId.parse(m) for m in cfg.plot_motifs)
        try:
            pts = two_motif_coords(res.profiles, res.nrp, a, b, cfg.motif_filter())
            egos2 = res.profiles.egos
        except KeyError as exc:
            logger.warning("window %d: %s; two-motif plot left empty", res.index, exc)
            pts, egos2 = np.zeros((0, 2)), []
        export_spatialization(out("two_motif.csv"), egos2, pts, res.network.spam_label,
                              roles, columns=(f"nrp_{a}", f"nrp_{b}"))
    return files


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Process every window; a failing window is reported and skipped."""
    from .synth import read_roles

    comments = read_comments(cfg.input, lenient=cfg.lenient)
    roles = read_roles(cfg.roles) if cfg.roles else None
    motif_filter = cfg.motif_filter()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport()
    for i, start in enumerate(window_starts(comments, cfg)):
        entry = {"window": i, "start": start, "duration": cfg.duration}
        try:
            res = process_window(comments, cfg, i, start, motif_filter)
            if not res.network.users:
                logger.warning("window %d: no users left after pruning", i)
            if res.spatialization is None:
                logger.warning("window %d: too few egos or motifs for PCA", i)
            files = write_window_outputs(res, out_dir / f"window_{i:02d}", cfg, roles)
            entry.update(
                status="ok",
                network=res.network.stats(),
                motifs_observed=len(res.profiles.motifs),
                timings=res.timings,
                explained_variance=(res.spatialization.explained_variance.tolist()
                                    if res.spatialization is not None else None),
                files=[f"window_{i:02d}/{f}" for f in files],
            )
        except Exception as exc:  # isolate the window, keep going
            logger.error("window %d failed: %s", i, exc)
            entry.update(status="error", error=f"{type(exc).__name__}: {exc}")
        report.windows.append(entry)
    (out_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    return report


# --- benchmark -------------------------------------------------------------------

@dataclass
class BenchResult:
    full_times: list[float]
    filtered_times: list[float]
    n_motifs: int
    counts_equal: bool

    @property
    def full_mean(self) -> float:
        return statistics.fmean(self.full_times)

    @property
    def filtered_mean(self) -> float:
        return statistics.fmean(self.filtered_times)

    @property
    def speedup(self) -> float:
        return self.full_mean / self.filtered_mean

    def summary(self) -> dict:
        sd = lambda xs: statistics.stdev(xs) if len(xs) > 1 else 0.0  # noqa: E731
        return {
            "full_mean_s": self.full_mean,
            "full_sd_s": sd(self.full_times),
            "filtered_mean_s": self.filtered_mean,
            "filtered_sd_s": sd(self.filtered_times),
            "speedup": self.speedup,
            "n_motifs": self.n_motifs,
            "counts_equal": self.counts_equal,
        }


class CountMismatch(RuntimeError):
    pass


def benchmark_filtering(net: CommentNetwork, motif_filter: MotifFilter, repeats: int = 10,
                        k: int = 2, sizes=DEFAULT_SIZES, epsilon: int = DEFAULT_EPSILON,
                        prune: bool = True) -> BenchResult:
    """Time profile generation with and without the filter, runs interleaved.

    Raises ``CountMismatch`` if any filtered count differs from the full run.
    """
    if motif_filter.allowed is None:
        raise ValueError("benchmark needs a restricting motif filter")
    from .canon import all_motifs
    cols = [j for j, m in enumerate(all_motifs()) if m in motif_filter]
    full_t, filt_t = [], []
    for _ in range(repeats):
        t0 = time.perf_counter()
        full = profile_network(net, k, sizes, None, prune, epsilon)
        t1 = time.perf_counter()
        filt = profile_network(net, k, sizes, motif_filter, prune, epsilon)
        t2 = time.perf_counter()
        full_t.append(t1 - t0)
        filt_t.append(t2 - t1)
        if not np.array_equal(full[0].counts[:, cols], filt[0].counts[:, cols]):
            raise CountMismatch("filtered counts differ from the full census")
    return BenchResult(full_t, filt_t, len(motif_filter), True)
