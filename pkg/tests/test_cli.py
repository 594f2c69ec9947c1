import csv
import math

import numpy as np
import pytest

from pmhd.cli import build_parser, cmd_bench, cmd_convergence, cmd_scale, main, make_mesh
from pmhd.config import parse_config
from pmhd.mesh import gather_global
from pmhd.snapshot import read_snapshot


def _cfg(text, tmp_path):
    (tmp_path / "c.cfg").write_text(text)
    return str(tmp_path / "c.cfg")


def _rows(path):
    return list(csv.DictReader(open(path)))


def test_run_writes_outputs(tmp_path, capsys):
    cfg = _cfg("nx1 = 8\nnx2 = 8\nnx3 = 8\ncycle_limit = 4\n", tmp_path)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert "cycles 4" in out and "cell-updates/s" in out
    for name in ("snapshot.pmhd", "errors.csv", "profile.csv"):
        assert (tmp_path / "o" / name).exists()
    rows = _rows(tmp_path / "o" / "errors.csv")
    assert rows[0]["resolution"] == "8" and rows[0]["cycles"] == "4"


def test_zero_cycles_snapshot_is_initial_state(tmp_path):
    cfg = _cfg("nx1 = 8\nnx2 = 4\nnx3 = 4\ncycle_limit = 0\n", tmp_path)
    assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
    snap = read_snapshot(tmp_path / "snapshot.pmhd")
    ref = gather_global(make_mesh(parse_config(open(cfg).read())))
    assert snap.time == 0.0
    for a, b in zip((snap.u, snap.b1f, snap.b2f, snap.b3f), ref):
        assert np.array_equal(a, b)


def test_run_is_deterministic(tmp_path):
    cfg = _cfg("nx1 = 8\nnx2 = 8\nnx3 = 8\ncycle_limit = 3\nwave_n2 = 1\n", tmp_path)
    for d in ("a", "b"):
        assert main(["run", "--config", cfg, "--out", str(tmp_path / d),
                     "--policy", "team", "--workers", "2"]) == 0
    assert (tmp_path / "a/snapshot.pmhd").read_bytes() == (tmp_path / "b/snapshot.pmhd").read_bytes()
    assert (tmp_path / "a/errors.csv").read_text() == (tmp_path / "b/errors.csv").read_text()


def test_bench_rows_self_consistent(tmp_path):
    cfg = parse_config("bench_sizes = 4, 8\nbench_cycles = 5\nwarmup = 1\n")
    cmd_bench(cfg, tmp_path)
    rows = _rows(tmp_path / "bench.csv")
    assert [r["size"] for r in rows] == ["4", "8"]
    for r in rows:
        n, c, wall = int(r["size"]), int(r["cycles"]), float(r["wall_s"])
        assert float(r["cell_updates_per_s"]) == n ** 3 * c / wall
        assert r["policy"] == "simd" and r["workers"] == "1"


def test_scale_weak(tmp_path):
    cfg = parse_config("scale_cells = 4\nscale_workers = 1, 2, 4\nbench_cycles = 5\nwarmup = 1\n")
    cmd_scale(cfg, tmp_path)
    rows = _rows(tmp_path / "scale.csv")
    assert [int(r["workers"]) for r in rows] == [1, 2, 4]
    assert float(rows[0]["efficiency"]) == 1.0
    assert rows[0]["baseline_bitwise"] == "true"
    for r in rows:
        w = int(r["workers"])
        assert int(r["cells"]) == w * 4 ** 3
        assert 0 < float(r["efficiency"]) <= 1.05


def test_scale_strong_cells_fixed(tmp_path):
    cfg = parse_config("nx1 = 8\nnx2 = 4\nnx3 = 4\nscale_mode = strong\nscale_workers = 1, 2\n"
                       "bench_cycles = 5\nwarmup = 0\n")
    rows = cmd_scale(cfg, tmp_path)
    assert {r[2] for r in rows} == {128}


def test_convergence_command(tmp_path):
    cfg = parse_config("conv_sizes = 4, 8\ncfl = 0.4\n")
    rows = cmd_convergence(cfg, tmp_path)
    got = _rows(tmp_path / "convergence.csv")
    assert len(got) == 2 and math.isnan(float(got[0]["order"]))
    e0, e1 = rows[0][2], rows[1][2]
    assert float(got[1]["order"]) == pytest.approx(math.log2(e0 / e1))


def test_roofline_from_platform_file(tmp_path, capsys):
    plat = tmp_path / "plat.csv"
    plat.write_text("id,t_peak_gflops,bw_dram_gbs\nbox,100,10\n")
    cfg = _cfg(f"nx1 = 4\nnx2 = 4\nnx3 = 4\nplatform_file = {plat}\nplatform_id = box\n"
               "bench_cycles = 5\nwarmup = 1\n", tmp_path)
    assert main(["roofline", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "portability.csv")))
    eps, cap, e = (float(x) for x in rows[1][2:5])
    assert e == eps / cap
    assert float(rows[-1][1]) == e
    assert (tmp_path / "roofline.svg").exists()


def test_roofline_missing_platform(tmp_path, capsys):
    plat = tmp_path / "plat.csv"
    plat.write_text("id,t_peak_gflops,bw_dram_gbs\nbox,100,10\n")
    cfg = _cfg(f"nx1 = 4\nnx2 = 4\nnx3 = 4\nplatform_file = {plat}\nplatform_id = other\n",
               tmp_path)
    assert main(["roofline", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "other" in capsys.readouterr().err


def test_report(tmp_path, capsys):
    cfg = _cfg("nx1 = 8\nnx2 = 8\nnx3 = 8\nbench_cycles = 3\nwarmup = 1\n", tmp_path)
    assert main(["report", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "0.7257" in out and "not asserted" in out
    rows = list(csv.reader(open(tmp_path / "portability_reference.csv")))
    assert rows[1][0] == "v100" and float(rows[1][4]) == pytest.approx(0.7257, abs=5e-4)


def test_exit_codes(tmp_path, capsys):
    bad = _cfg("nx1 = banana\n", tmp_path)
    assert main(["run", "--config", bad]) == 1
    assert "line 1" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 1
    indivisible = _cfg("nx1 = 12\nmb1 = 8\n", tmp_path)
    assert main(["run", "--config", indivisible, "--out", str(tmp_path)]) == 1
    blowup = _cfg("nx1 = 8\nnx2 = 4\nnx3 = 4\namplitude = 2.0\n", tmp_path)
    assert main(["run", "--config", blowup, "--out", str(tmp_path)]) == 2
    assert "solver error" in capsys.readouterr().err


def test_parser_commands():
    ap = build_parser()
    for c in ("run", "convergence", "bench", "scale", "roofline", "report"):
        assert ap.parse_args([c]).command == c
    with pytest.raises(SystemExit):
        ap.parse_args(["fly"])
