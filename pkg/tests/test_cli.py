import csv
import json

import pytest

from motifspam.canon import all_motifs
from motifspam.cli import main
from motifspam.motif import MotifFilter


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    spec = {
        "background": {"n_videos": 60, "n_regular_users": 150},
        "campaigns": [
            {"name": "C1", "strategy": "FewUsersManyVideos", "n_users": 4, "videos_per_user": 12},
            {"name": "C2", "strategy": "ManyUsersFewVideos", "n_users": 10, "videos_per_user": 2},
        ],
    }
    (d / "spec.json").write_text(json.dumps(spec))
    assert main(["synth", "--spec", str(d / "spec.json"), "--seed", "1",
                 "--out", str(d / "log.jsonl")]) == 0
    return d


def test_synth_writes_log_and_roles(workdir):
    assert (workdir / "log.roles.csv").exists()
    assert (workdir / "log.jsonl").read_text().count("\n") > 100


def test_ingest(workdir, capsys):
    assert main(["ingest", "--input", str(workdir / "log.jsonl"),
                 "--out", str(workdir / "clean.jsonl")]) == 0
    rows = [json.loads(line) for line in (workdir / "clean.jsonl").read_text().splitlines()]
    assert rows and all(len(r["norm_text"]) >= 25 for r in rows)


def test_netgen_profile_select_chain(workdir, capsys):
    d = workdir
    capsys.readouterr()
    assert main(["netgen", "--input", str(d / "log.jsonl"), "--out", str(d / "net.txt"),
                 "--graphml", str(d / "net.graphml")]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["users"] > 0 and (d / "net.graphml").exists()

    assert main(["profile", "--network", str(d / "net.txt"), "--out-dir", str(d / "prof"),
                 "--roles", str(d / "log.roles.csv")]) == 0
    with open(d / "prof" / "spatialization.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == stats["users"]
    assert {r["role"] for r in rows} >= {"regular", "C1"}

    for camp in ("C1", "C2"):
        assert main(["select", "--profiles", str(d / "prof" / "profiles.csv"),
                     "--roles", str(d / "log.roles.csv"), "--campaign", camp,
                     "--ratio", "3:1", "--seed", "0",
                     "--out", str(d / f"rank_{camp}.csv")]) == 0
    capsys.readouterr()
    assert main(["select", "--combine", str(d / "rank_C1.csv"), str(d / "rank_C2.csv"),
                 "--top-k", "3", "--motifs-out", str(d / "motifs.txt")]) == 0
    assert len(MotifFilter.read(d / "motifs.txt")) == 6
    capsys.readouterr()

    assert main(["profile", "--network", str(d / "net.txt"), "--out-dir", str(d / "prof2"),
                 "--motifs", str(d / "motifs.txt")]) == 0
    assert json.loads(capsys.readouterr().out)["motifs"] <= 6


def test_run_and_bench(workdir, capsys):
    d = workdir
    capsys.readouterr()
    cfg = {"input": str(d / "log.jsonl"), "out_dir": str(d / "run"), "window_start": 0,
           "n_windows": 1}
    (d / "cfg.json").write_text(json.dumps(cfg))
    assert main(["run", "--config", str(d / "cfg.json"), "--graphml"]) == 0
    assert json.loads(capsys.readouterr().out) == {"windows": 1, "failed": []}
    assert (d / "run" / "window_00" / "network.graphml").exists()

    MotifFilter(frozenset(all_motifs()[:30:2])).write(d / "bench_motifs.txt")
    assert main(["bench", "--config", str(d / "cfg.json"), "--motifs", str(d / "bench_motifs.txt"),
                 "--repeats", "2", "--out-dir", str(d / "bench")]) == 0
    rows = json.loads((d / "bench" / "bench.json").read_text())
    assert rows[0]["counts_equal"] is True


def test_errors_are_stage_tagged(tmp_path, capsys):
    assert main(["ingest", "--input", str(tmp_path / "nope.jsonl")]) == 2
    assert "[ingest]" in capsys.readouterr().err
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"comment_id": "c1"}\n')
    assert main(["netgen", "--input", str(bad), "--out", str(tmp_path / "n.txt")]) == 2
    err = capsys.readouterr().err
    assert "[ingest]" in err and "line 1" in err
    assert main(["run"]) == 2


def test_missing_subcommand_exits():
    with pytest.raises(SystemExit):
        main([])
