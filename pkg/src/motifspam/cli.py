"""Command line entry point: ``motifspam <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

logger = logging.getLogger("motifspam")


class StageError(Exception):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")


def _ingest_args(p):
    p.add_argument("--input", required=True, help="comment JSON-lines file")
    p.add_argument("--window-start", type=int, default=None,
                   help="UTC seconds; default earliest timestamp")
    p.add_argument("--window-hours", type=float, default=6)
    p.add_argument("--min-length", type=int, default=25)
    p.add_argument("--stopwords", default=None, help="newline-delimited stopword file")
    p.add_argument("--lenient", action="store_true", help="skip malformed records")


def _netgen_args(p):
    p.add_argument("--jaccard-threshold", type=float, default=0.6)
    p.add_argument("--shingle-window", type=int, default=3)


def _motif_args(p):
    p.add_argument("--k", type=int, default=2, help="ego network radius in hops")
    p.add_argument("--sizes", default="3,4,5")
    p.add_argument("--motifs", default=None, help="motif-subset file (one id per line)")
    p.add_argument("--no-prune", action="store_true",
                   help="with --motifs, enumerate everything and discard at output")
    p.add_argument("--epsilon", type=int, default=4)


def _sizes(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(",") if s.strip())


def _clean_window(args):
    from .ingest import IngestConfig, load_stopwords, normalize_all, read_comments, select_window

    comments = read_comments(args.input, lenient=args.lenient)
    start = args.window_start
    if start is None:
        start = min((c.timestamp for c in comments), default=0)
    window = select_window(comments, start, int(round(args.window_hours * 3600)))
    cfg = IngestConfig(args.min_length, load_stopwords(args.stopwords))
    return normalize_all(window, cfg)


def cmd_ingest(args) -> None:
    clean = _clean_window(args)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for c in clean:
            out.write(json.dumps({
                "user_id": c.user_id, "video_id": c.video_id, "timestamp": c.timestamp,
                "tokens": list(c.tokens), "norm_text": c.norm_text, "spam_hint": c.spam_hint,
            }) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    logger.info("%d comments kept", len(clean))


def cmd_netgen(args) -> None:
    from .netgen import NetgenConfig, comment_network, write_graphml, write_network

    try:
        clean = _clean_window(args)
    except Exception as exc:
        raise StageError("ingest", exc) from exc
    net = comment_network(clean, NetgenConfig(args.shingle_window, args.jaccard_threshold))
    write_network(net, args.out)
    if args.graphml:
        write_graphml(net, args.graphml)
    print(json.dumps(net.stats()))


def cmd_profile(args) -> None:
    from .canon import MotifId
    from .motif import MotifFilter
    from .netgen import read_network
    from .pipeline import (export_spatialization, profile_network, spatialize,
                           two_motif_coords, write_counts, write_profiles)
    from .synth import read_roles

    net = read_network(args.network)
    flt = MotifFilter.read(args.motifs) if args.motifs else None
    census, matrix, nrp, timings = profile_network(net, args.k, _sizes(args.sizes), flt,
                                                   not args.no_prune, args.epsilon)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    roles = read_roles(args.roles) if args.roles else None
    write_counts(census, out / "counts.csv")
    if nrp is None:
        nrp = np.zeros((0, 0))
    write_profiles(matrix, nrp, out / "profiles.csv")
    spat = spatialize(nrp if nrp.size else None)
    if spat is None:
        logger.warning("too few egos or motifs for PCA; spatialization left empty")
    export_spatialization(out / "spatialization.csv",
                          matrix.egos if spat is not None else [],
                          spat.coords if spat is not None else np.zeros((0, 2)),
                          net.spam_label, roles)
    if args.plot_motifs:
        a, b = (MotifId.parse(m) for m in args.plot_motifs.split(","))
        export_spatialization(out / "two_motif.csv", matrix.egos,
                              two_motif_coords(matrix, nrp, a, b, flt), net.spam_label, roles,
                              columns=(f"nrp_{a}", f"nrp_{b}"))
    print(json.dumps({"egos": len(matrix.egos), "motifs": len(matrix.motifs), **timings}))


def _ratio(text: str) -> tuple[int, int]:
    reg, spam = text.split(":")
    return int(reg), int(spam)


def cmd_select(args) -> None:
    from .canon import MotifId
    from .netgen import read_network
    from .pipeline import read_profiles
    from .select import (build_sample, rank_motifs, read_ranking, select_campaign_motifs,
                         select_top, write_ranking)
    from .synth import REGULAR, read_roles

    if args.combine:
        rankings = [read_ranking(p) for p in args.combine]
        flt = select_campaign_motifs(rankings, args.top_k, distinct=not args.union)
        flt.write(args.motifs_out)
        print(json.dumps({"motifs": len(flt)}))
        return
    if not (args.profiles and args.roles and args.campaign):
        raise ValueError("--profiles, --roles and --campaign are required without --combine")
    matrix = read_profiles(args.profiles)
    roles = read_roles(args.roles)
    hinted = set()
    if args.network:
        net = read_network(args.network)
        hinted = {u for u, s in net.spam_label.items() if s}
    rows, labels = [], []
    for i, ego in enumerate(matrix.egos):
        role = roles.get(ego, REGULAR)
        if role == args.campaign:
            rows.append(i)
            labels.append(1)
        elif role == REGULAR and ego not in hinted:
            rows.append(i)
            labels.append(0)
    n_spam = args.n_spam if args.n_spam is not None else sum(labels)
    sample = build_sample([matrix.egos[i] for i in rows], matrix.motifs, matrix.values[rows],
                          labels, _ratio(args.ratio), n_spam, args.seed)
    ranked = rank_motifs(sample)
    write_ranking(ranked, args.out)
    if args.motifs_out:
        override = None
        if args.override:
            with open(args.override, encoding="utf-8") as fh:
                override = [MotifId.parse(line) for line in fh if line.strip()]
        select_top(ranked, args.top_k, override).write(args.motifs_out)
    print(json.dumps({"regular": sample.counts()[0], "spam": sample.counts()[1],
                      "top_gain": ranked.entries[0][1] if ranked.entries else None}))


def cmd_synth(args) -> None:
    from .synth import SynthSpec, emit_jsonl, generate, write_roles

    spec = SynthSpec.read(args.spec) if args.spec else SynthSpec()
    window = generate(spec, args.seed)
    with open(args.out, "wb") as fh:
        emit_jsonl(window, fh)
    roles_out = args.roles_out or str(Path(args.out).with_suffix("")) + ".roles.csv"
    write_roles(window.roles, roles_out)
    print(json.dumps({"comments": len(window.comments), "users": len(window.roles),
                      "roles": roles_out}))


def _pipeline_config(args):
    from .pipeline import PipelineConfig

    overrides = {
        "input": args.input, "out_dir": args.out_dir, "window_start": args.window_start,
        "window_hours": args.window_hours, "n_windows": args.n_windows,
        "min_length": args.min_length, "stopwords": args.stopwords,
        "jaccard_threshold": args.jaccard_threshold, "shingle_window": args.shingle_window,
        "k": args.k, "sizes": _sizes(args.sizes) if args.sizes else None,
        "motifs": args.motifs, "epsilon": args.epsilon, "roles": args.roles,
        "plot_motifs": args.plot_motifs.split(",") if args.plot_motifs else None,
    }
    if args.no_prune:
        overrides["prune"] = False
    if args.graphml:
        overrides["graphml"] = True
    if args.config:
        return PipelineConfig.from_file(args.config, **overrides)
    if not args.input:
        raise ValueError("--input or --config is required")
    return PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_run(args) -> None:
    from .pipeline import run_pipeline

    report = run_pipeline(_pipeline_config(args))
    failed = [w["window"] for w in report.windows if w["status"] != "ok"]
    print(json.dumps({"windows": len(report.windows), "failed": failed}))
    if failed:
        raise SystemExit(1)


def cmd_bench(args) -> None:
    from .ingest import read_comments
    from .pipeline import benchmark_filtering, process_window, window_starts
    from .motif import MotifFilter

    cfg = _pipeline_config(args)
    if not cfg.motifs:
        raise ValueError("bench needs --motifs")
    flt = MotifFilter.read(cfg.motifs)
    comments = read_comments(cfg.input, lenient=cfg.lenient)
    rows = []
    for i, start in enumerate(window_starts(comments, cfg)):
        net = process_window(comments, cfg, i, start, flt).network
        res = benchmark_filtering(net, flt, args.repeats, cfg.k, cfg.sizes, cfg.epsilon,
                                  cfg.prune)
        rows.append({"window": i, **net.stats(), **res.summary()})
        logger.info("window %d: speedup %.2f", i, res.speedup)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.json").write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    speedups = [r["speedup"] for r in rows]
    print(json.dumps({"windows": len(rows),
                      "mean_speedup": float(np.mean(speedups)) if speedups else None}))


def _run_args(p):
    p.add_argument("--config", default=None, help="JSON pipeline config")
    p.add_argument("--input", default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--window-start", type=int, default=None)
    p.add_argument("--window-hours", type=float, default=None)
    p.add_argument("--n-windows", type=int, default=None)
    p.add_argument("--min-length", type=int, default=None)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--jaccard-threshold", type=float, default=None)
    p.add_argument("--shingle-window", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--sizes", default=None)
    p.add_argument("--motifs", default=None)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--epsilon", type=int, default=None)
    p.add_argument("--roles", default=None, help="ground-truth user_id,role CSV")
    p.add_argument("--plot-motifs", default=None, help="two motif ids, comma separated")
    p.add_argument("--graphml", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motifspam",
                                     description="Egocentric motif profiling of comment networks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize one window of comments")
    _ingest_args(p)
    p.add_argument("--out", default=None, help="output JSON-lines (default stdout)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("netgen", help="build the comment network of one window")
    _ingest_args(p)
    _netgen_args(p)
    p.add_argument("--out", required=True, help="edge-list network file")
    p.add_argument("--graphml", default=None, help="also write GraphML here")
    p.set_defaults(func=cmd_netgen)

    p = sub.add_parser("profile", help="motif counts, ratio profiles and PCA for a network")
    p.add_argument("--network", required=True)
    _motif_args(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--roles", default=None)
    p.add_argument("--plot-motifs", default=None)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("select", help="rank motifs by information gain")
    p.add_argument("--profiles", default=None, help="profiles.csv from 'profile'")
    p.add_argument("--roles", default=None)
    p.add_argument("--campaign", default=None, help="role name of the spam class")
    p.add_argument("--network", default=None,
                   help="network file; hinted users outside the campaign are dropped")
    p.add_argument("--ratio", default="3:1", help="regular:spam")
    p.add_argument("--n-spam", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-k", type=int, default=7)
    p.add_argument("--override", default=None, help="hand-picked motif ids")
    p.add_argument("--out", default="ranking.csv")
    p.add_argument("--motifs-out", default=None)
    p.add_argument("--combine", nargs="+", default=None,
                   help="ranking CSVs to merge into one motif file")
    p.add_argument("--union", action="store_true",
                   help="with --combine, plain union of each top-k (overlaps collapse)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("synth", help="generate a synthetic comment log")
    p.add_argument("--spec", default=None, help="JSON spec file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--roles-out", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="full windowed pipeline")
    _run_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="filtered vs full profile timing")
    _run_args(p)
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: [{args.command}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
