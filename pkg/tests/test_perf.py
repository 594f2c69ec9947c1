import csv
import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pmhd.perf import (EfficiencyAboveOne, KernelIntensitySet, MeasuredRun, PerfDomainError,
                       PerfInputError, PortabilityInput, RooflinePlatform, arch_efficiency,
                       pp_metric, roofline_cap, space_cap)
from pmhd.perf.platforms import (PlatformParseError, find_platform, format_platform_table,
                                 parse_platform_table, reference_measurements,
                                 reference_platforms)
from pmhd.perf.report import (ceiling_points, emit_roofline_report, portability_rows,
                              roofline_svg, roofline_rows, write_portability_report)

G = 1e9
effs = st.floats(min_value=1e-3, max_value=1.0, allow_nan=False)


def _plat(t=7000.0, bw=900.0):
    return RooflinePlatform("gpu", t * G, {"dram": bw * G})


def test_bandwidth_bound_cap():
    v100 = find_platform(reference_platforms(), "v100")
    assert space_cap(v100, 1.0, "dram") == pytest.approx(782 * G)


def test_compute_bound_cap():
    p = _plat()
    cap = roofline_cap(p, KernelIntensitySet("a", "b", {"dram": 1e9}))
    assert cap.p_max == p.t_peak and cap.binding == "compute"


def test_lowest_space_binds():
    p = RooflinePlatform("x", 1000 * G, {"dram": 100 * G, "l2": 400 * G})
    cap = roofline_cap(p, KernelIntensitySet("a", "b", {"dram": 2.0, "l2": 1.0}))
    assert cap.binding == "dram" and cap.p_max == pytest.approx(200 * G)
    assert cap.per_space["l2"] == pytest.approx(400 * G)


def test_published_efficiency_fixture():
    plat, ints, run = reference_measurements()[0]
    assert space_cap(plat, ints.intensity["dram"], "dram") == pytest.approx(1130 * G, rel=1e-12)
    assert arch_efficiency(run, plat, ints, "dram") == pytest.approx(0.7257, abs=5e-4)


def test_efficiency_at_cap_is_one():
    p = _plat()
    ints = KernelIntensitySet("a", "b", {"dram": 0.5})
    run = MeasuredRun("a", "b", "gpu", space_cap(p, 0.5, "dram"))
    assert arch_efficiency(run, p, ints, "dram") == 1.0


def test_efficiency_above_one_warns():
    p = _plat()
    ints = KernelIntensitySet("a", "b", {"dram": 0.5})
    with pytest.warns(EfficiencyAboveOne):
        e = arch_efficiency(MeasuredRun("a", "b", "gpu", 1000 * G), p, ints, "dram")
    assert e > 1


def test_efficiency_input_errors():
    p = _plat()
    with pytest.raises(PerfInputError):
        arch_efficiency(MeasuredRun("a", "b", "gpu", 1.0), p,
                        KernelIntensitySet("a", "b", {"l2": 1.0}), "dram")
    with pytest.raises(PerfInputError):
        space_cap(p, 1.0, "hbm")
    with pytest.raises(PerfInputError):
        RooflinePlatform("bad", 0.0, {"dram": 1.0})
    with pytest.raises(PerfInputError):
        RooflinePlatform("bad", 1.0, {"dram": 1.0, "DRAM": 2.0})
    with pytest.raises(PerfInputError):
        MeasuredRun("a", "b", "c", -1.0)


@given(st.floats(0.01, 100), st.floats(1.0001, 10))
def test_cap_monotone_in_intensity_and_bandwidth(i, f):
    p = _plat()
    q = RooflinePlatform("faster", p.t_peak, {"dram": p.bandwidth["dram"] * f})
    assert space_cap(p, i * f, "dram") >= space_cap(p, i, "dram")
    assert space_cap(q, i, "dram") >= space_cap(p, i, "dram")
    assert space_cap(p, i, "dram") <= p.t_peak


@given(st.floats(1e6, 1e12), st.floats(1.0001, 10))
def test_efficiency_linear_in_epsilon(eps, f):
    p = _plat()
    ints = KernelIntensitySet("a", "b", {"dram": 0.5})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EfficiencyAboveOne)
        e1 = arch_efficiency(MeasuredRun("a", "b", "gpu", eps), p, ints, "dram")
        e2 = arch_efficiency(MeasuredRun("a", "b", "gpu", eps * f), p, ints, "dram")
    assert e2 == pytest.approx(f * e1, rel=1e-12)


def test_pp_fixtures():
    assert pp_metric(PortabilityInput({"a": 0.725, "b": 0.5})) == pytest.approx(0.5918, abs=1e-4)
    assert pp_metric(PortabilityInput({"a": 0.9, "b": None, "c": 0.8})) == 0.0
    assert pp_metric(PortabilityInput({"a": 0.3, "b": 0.3, "c": 0.3})) == 0.3
    assert pp_metric(PortabilityInput({"only": 0.61})) == 0.61


def test_pp_domain_errors():
    with pytest.raises(PerfDomainError):
        pp_metric(PortabilityInput({"a": 0.0, "b": 0.5}))
    with pytest.raises(PerfInputError):
        PortabilityInput({})


@given(st.lists(effs, min_size=1, max_size=10), st.randoms())
def test_pp_permutation_invariant(vals, rnd):
    shuffled = vals[:]
    rnd.shuffle(shuffled)
    a = pp_metric(PortabilityInput({f"p{i}": v for i, v in enumerate(vals)}))
    b = pp_metric(PortabilityInput({f"p{i}": v for i, v in enumerate(shuffled)}))
    assert a == pytest.approx(b, rel=1e-14)


@given(st.lists(effs, min_size=1, max_size=10))
def test_pp_between_min_and_mean(vals):
    p = pp_metric(PortabilityInput({f"p{i}": v for i, v in enumerate(vals)}))
    assert min(vals) * (1 - 1e-14) <= p <= math.fsum(vals) / len(vals) * (1 + 1e-14)


@given(st.lists(effs, min_size=2, max_size=6), st.integers(0, 5), st.floats(1.001, 2.0))
def test_pp_monotone(vals, idx, f):
    idx %= len(vals)
    up = vals[:]
    up[idx] = min(1.0, up[idx] * f)
    a = pp_metric(PortabilityInput({f"p{i}": v for i, v in enumerate(vals)}))
    b = pp_metric(PortabilityInput({f"p{i}": v for i, v in enumerate(up)}))
    assert b >= a * (1 - 1e-14)


TABLE = """id,t_peak_gflops,bw_dram_gbs,bw_l2_gbs,provenance
# comment line
a,100,10,50,t_peak:vendor;dram:measured
b,200,20,,dram:published
"""


def test_parse_table():
    a, b = parse_platform_table(TABLE)
    assert a.t_peak == 100 * G and a.bandwidth == {"dram": 10 * G, "l2": 50 * G}
    assert a.provenance == {"t_peak": "vendor", "dram": "measured"}
    assert b.bandwidth == {"dram": 20 * G}


def test_table_round_trip():
    plats = reference_platforms()
    assert len(plats) == 10
    assert parse_platform_table(format_platform_table(plats)) == plats
    again = parse_platform_table(TABLE)
    assert parse_platform_table(format_platform_table(again)) == again


@pytest.mark.parametrize("text,row", [
    ("id,t_peak_gflops,bw_dram_gbs\na,100,10\nb,abc,10\n", 3),
    ("id,t_peak_gflops,bw_dram_gbs\na,-1,10\n", 2),
    ("id,t_peak_gflops,bw_dram_gbs\n,100,10\n", 2),
    ("id,t_peak_gflops,bw_dram_gbs\na,100,\n", 2),
    ("id,bw_dram_gbs\na,10\n", 1),
    ("id,t_peak_gflops\na,10\n", 1),
    ("id,t_peak_gflops,bw_dram_gbs,provenance\na,1,1,nocolon\n", 2),
])
def test_table_errors_name_row(text, row):
    with pytest.raises(PlatformParseError) as info:
        parse_platform_table(text)
    assert info.value.row == row


def test_empty_table():
    assert parse_platform_table("") == []
    assert parse_platform_table("# only a comment\n") == []


def test_missing_platform():
    with pytest.raises(PerfInputError):
        find_platform(reference_platforms(), "a64fx")


def test_ceiling_knee():
    p = _plat(7000, 875)
    pts = ceiling_points(p, "dram")
    assert pts[1] == (8.0, p.t_peak)
    assert pts[0][1] == pytest.approx(p.bandwidth["dram"] * pts[0][0])
    assert pts[2][1] == p.t_peak


def test_roofline_report_files(tmp_path):
    plat, ints, run = reference_measurements()[0]
    rows = emit_roofline_report(plat, ints, [run], tmp_path / "r.csv", tmp_path / "r.svg")
    got = list(csv.reader(open(tmp_path / "r.csv")))
    assert got[0] == ["series", "space", "intensity", "gflops"]
    assert len(got) == len(rows) + 1
    assert any(r[0].startswith("achieved") and float(r[3]) == pytest.approx(820) for r in got[1:])
    svg = (tmp_path / "r.svg").read_text()
    assert svg.startswith("<svg") and "<polyline" in svg and "<circle" in svg
    assert roofline_svg("empty", []).startswith("<svg")
    assert len(roofline_rows(plat)) == 3


def test_portability_report_self_consistent(tmp_path):
    plats = {p.id: p for p in reference_platforms()}
    entries = []
    for pid, e in [("v100", 0.7257), ("p100", 0.5), ("knl_7250", 0.25)]:
        plat = plats[pid]
        ints = KernelIntensitySet("mhd", "wave", {"dram": 1.0})
        entries.append((plat, ints, MeasuredRun("mhd", "wave", pid, e * plat.bandwidth["dram"])))
    pp = write_portability_report(tmp_path / "p.csv", entries)
    rows = list(csv.reader(open(tmp_path / "p.csv")))
    effs = []
    for r in rows[1:-1]:
        e = float(r[2]) / float(r[3])
        assert float(r[4]) == pytest.approx(e, rel=1e-15)
        effs.append(e)
    assert rows[-1][0] == "pp_metric_dram"
    assert float(rows[-1][1]) == pp == pytest.approx(3 / sum(1 / e for e in effs))
    rows, pp = portability_rows(entries + [(plats["k80"], None, None)], "dram")
    assert pp == 0.0 and rows[-1][-1] == "unsupported"


def test_host_roofline_end_to_end():
    from pmhd.perf.microbench import host_platform

    host = host_platform(nbytes=32 * 2 ** 20)
    assert host.t_peak > 0 and host.bandwidth["dram"] > 0
    ints = KernelIntensitySet("triad", "host", {"dram": 2 / 24})
    cap = space_cap(host, ints.intensity["dram"], "dram")
    run = MeasuredRun("triad", "host", "host", host.bandwidth["dram"] * 2 / 24)
    e = arch_efficiency(run, host, ints, "dram")
    assert 0 < e <= 1.2 and cap > 0
