import csv
import json

import numpy as np
import pytest

from motifspam.canon import all_motifs
from motifspam.ingest import RawComment
from motifspam.motif import MotifFilter
from motifspam.netgen import read_network
from motifspam.pipeline import (
    PipelineConfig,
    benchmark_filtering,
    process_window,
    read_profiles,
    run_pipeline,
    window_starts,
)
from motifspam.synth import (
    BackgroundSpec,
    CampaignSpec,
    Strategy,
    SynthSpec,
    emit_jsonl,
    generate,
    write_roles,
)

SPEC = SynthSpec(
    BackgroundSpec(n_videos=60, n_regular_users=120),
    [CampaignSpec("C1", Strategy.FEW_USERS_MANY_VIDEOS, 3, 10),
     CampaignSpec("C2", Strategy.MANY_USERS_FEW_VIDEOS, 8, 2)],
    windows=12,
)


@pytest.fixture(scope="module")
def synthetic_log(tmp_path_factory):
    d = tmp_path_factory.mktemp("log")
    win = generate(SPEC, seed=3)
    (d / "comments.jsonl").write_bytes(emit_jsonl(win))
    write_roles(win.roles, d / "roles.csv")
    return d


@pytest.fixture(scope="module")
def twelve_window_run(synthetic_log, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = PipelineConfig(input=str(synthetic_log / "comments.jsonl"), out_dir=str(out),
                         roles=str(synthetic_log / "roles.csv"), window_start=0, n_windows=12)
    return cfg, run_pipeline(cfg)


def test_twelve_windows_produce_spatializations(twelve_window_run):
    cfg, report = twelve_window_run
    assert len(report.windows) == 12
    assert all(w["status"] == "ok" for w in report.windows)
    for i in range(12):
        with open(f"{cfg.out_dir}/window_{i:02d}/spatialization.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert rows and set(rows[0]) == {"ego_id", "pc1", "pc2", "spam_label", "role"}
    doc = json.loads(open(f"{cfg.out_dir}/report.json").read())
    assert [w["window"] for w in doc["windows"]] == list(range(12))


def test_report_stats_match_network_files(twelve_window_run):
    cfg, report = twelve_window_run
    for w in report.windows:
        net = read_network(f"{cfg.out_dir}/window_{w['window']:02d}/network.txt")
        assert net.stats() == w["network"]


def test_profiles_file_roundtrip(twelve_window_run):
    cfg, _ = twelve_window_run
    m = read_profiles(f"{cfg.out_dir}/window_00/profiles.csv")
    assert m.values.shape == (len(m.egos), len(m.motifs))
    norms = np.linalg.norm(m.values, axis=1)
    assert np.all((np.abs(norms - 1) < 1e-9) | (norms == 0))


def test_rerun_is_byte_identical(synthetic_log, twelve_window_run, tmp_path):
    cfg, _ = twelve_window_run
    cfg2 = PipelineConfig(input=cfg.input, out_dir=str(tmp_path), roles=cfg.roles,
                          window_start=0, n_windows=12)
    run_pipeline(cfg2)
    for i in (0, 5, 11):
        for name in ("network.txt", "counts.csv", "profiles.csv", "spatialization.csv"):
            a = open(f"{cfg.out_dir}/window_{i:02d}/{name}", "rb").read()
            b = open(f"{tmp_path}/window_{i:02d}/{name}", "rb").read()
            assert a == b, (i, name)


def test_empty_window_is_reported_not_fatal(synthetic_log, tmp_path):
    # window 12 lies past the end of the log
    cfg = PipelineConfig(input=str(synthetic_log / "comments.jsonl"), out_dir=str(tmp_path),
                         window_start=11 * 21600, n_windows=2)
    report = run_pipeline(cfg)
    assert [w["status"] for w in report.windows] == ["ok", "ok"]
    assert report.windows[1]["network"]["users"] == 0
    with open(tmp_path / "window_01" / "spatialization.csv") as fh:
        assert len(fh.read().strip().splitlines()) == 1


def test_window_starts_default_covers_log(synthetic_log):
    comments = [RawComment(f"c{i}", "u", "v", t, "x" * 30, False)
                for i, t in enumerate((100, 200, 30000))]
    cfg = PipelineConfig(input=str(synthetic_log / "comments.jsonl"))
    assert window_starts(comments, cfg) == [100, 100 + 21600]
    cfg.n_windows = 1
    assert window_starts(comments, cfg) == [100]


def test_config_validation(tmp_path, synthetic_log):
    with pytest.raises(FileNotFoundError):
        PipelineConfig(input=str(tmp_path / "missing.jsonl"))
    with pytest.raises(ValueError):
        PipelineConfig(input=str(synthetic_log / "comments.jsonl"), window_hours=0)
    (tmp_path / "c.json").write_text(json.dumps({"input": "x", "bogus": 1}))
    with pytest.raises(ValueError):
        PipelineConfig.from_file(tmp_path / "c.json")


def _window0(synthetic_log):
    from motifspam.ingest import read_comments
    cfg = PipelineConfig(input=str(synthetic_log / "comments.jsonl"))
    return process_window(read_comments(cfg.input), cfg, 0, 0).network


def test_benchmark_counts_agree(synthetic_log):
    net = _window0(synthetic_log)
    flt = MotifFilter(frozenset(all_motifs()[:40:3]))
    for prune in (True, False):
        res = benchmark_filtering(net, flt, repeats=2, prune=prune)
        assert res.counts_equal and len(res.full_times) == 2
        assert res.summary()["n_motifs"] == len(flt)


def test_benchmark_requires_restricting_filter(synthetic_log):
    with pytest.raises(ValueError):
        benchmark_filtering(_window0(synthetic_log), MotifFilter(), repeats=1)


def test_two_motif_coords_unobserved_and_filtered():
    from motifspam.pipeline import two_motif_coords
    from motifspam.profile import ProfileMatrix
    motifs = list(all_motifs())
    m = ProfileMatrix(["a", "b"], motifs[:2], [[1.0, 0.0], [0.0, 2.0]])
    nrp = np.array([[0.6, 0.8], [-1.0, 0.0]])
    pts = two_motif_coords(m, nrp, motifs[1], motifs[5])
    np.testing.assert_array_equal(pts, [[0.8, 0.0], [0.0, 0.0]])
    with pytest.raises(KeyError):
        two_motif_coords(m, nrp, motifs[0], motifs[5], MotifFilter(frozenset(motifs[:2])))
