import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from brc_rates.cli import ConfigError, dump_config, fmt, main, parse_config
from brc_rates.region_tools import convex_hull_2d, hull_contains

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SYMMETRIC_CF = {
    "strategy": "CF_CF", "params.P": 10, "params.P1": 5, "params.P2": 5,
    "params.d_z1": 0.4, "params.d_z2": 0.4, "params.d_z1y1": 0.6, "params.d_z2y2": 0.6,
}


def run(tmp_path, cfg, *args, name="cfg.json"):
    path = tmp_path / name
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg, indent=2))
    out, err = io.StringIO(), io.StringIO()
    code = main([args[0], "--config", str(path), *args[1:]], out, err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def floats(rows_, key):
    return [float(r[key]) for r in rows_]


# ---------------------------------------------------------------- formatting

def test_fmt_twelve_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(-0.0) == "0"
    assert fmt(10.0) == "10"
    assert fmt(True) == "true"


# ---------------------------------------------------------------- eval

def test_eval_symmetric_cfcf_equal_rates(tmp_path):
    code, out, _ = run(tmp_path, SYMMETRIC_CF, "eval", "--refine", "10")
    assert code == 0
    (row,) = rows(out)
    assert row["strategy"] == "CF_CF"
    assert row["R1"] == row["R2"]


def test_eval_header_and_unix_newlines(tmp_path):
    code, out, _ = run(tmp_path, SYMMETRIC_CF, "eval", "--grid", "11", "--refine", "1")
    assert code == 0 and "\r" not in out and out.endswith("\n")
    header = out.splitlines()[0].split(",")
    assert header[:2] == ["strategy", "P"]
    assert header[-3:] == ["R0", "R1", "R2"]
    assert {"alpha", "beta1", "beta2", "gamma", "lambda"} <= set(header)


def test_eval_compound_common_rate_is_min(tmp_path):
    cfg = json.loads((CONFIGS / "relay_sweep.json").read_text())
    for k in [k for k in cfg if k.startswith("sweep.")]:
        del cfg[k]
    cfg.update({"params.d_z1": 0.7, "params.d_z1y1": 0.3})
    code, out, _ = run(tmp_path, cfg, "eval")
    assert code == 0
    (row,) = rows(out)
    assert float(row["R0"]) == min(float(row["R_DF"]), float(row["R_CF"]))


def test_eval_writes_output_file(tmp_path):
    dest = tmp_path / "res.csv"
    code, out, _ = run(tmp_path, SYMMETRIC_CF, "eval", "--grid", "11", "--out", str(dest))
    assert code == 0 and out == ""
    assert rows(dest.read_text())[0]["strategy"] == "CF_CF"


def test_eval_fixed_coding_is_respected(tmp_path):
    cfg = {**SYMMETRIC_CF, "coding.alpha": 0.25}
    code, out, _ = run(tmp_path, cfg, "eval", "--grid", "11")
    assert code == 0 and float(rows(out)[0]["alpha"]) == 0.25


def test_eval_oblivious_reports_outer(tmp_path):
    code, out, _ = run(tmp_path, str((CONFIGS / "oblivious_degraded.json").read_text()), "eval", "--grid", "21")
    assert code == 0
    (row,) = rows(out)
    assert float(row["R1_outer"]) >= float(row["R1"]) - 1e-12


# ---------------------------------------------------------------- errors

def test_malformed_numeric_field_exit_2(tmp_path):
    text = json.dumps({**SYMMETRIC_CF, "params.P1": "five"}, indent=2)
    code, _, err = run(tmp_path, text, "eval")
    assert code == 2
    assert "params.P1" in err
    line = next(i for i, l in enumerate(text.splitlines(), 1) if "params.P1" in l)
    assert f"line {line}" in err


@pytest.mark.parametrize("patch, field", [
    ({"params.Q": 1}, "params.Q"),
    ({"strategy": "XX"}, "strategy"),
    ({"params.N1": -1}, "params.N1"),
    ({"coding.alpha": 1.5}, "coding.alpha"),
    ({"sweep.name": "zz", "sweep.start": 0, "sweep.stop": 1, "sweep.step": 0.1}, "sweep.name"),
    ({"sweep.name": "P", "sweep.start": 1, "sweep.stop": 2, "sweep.step": 0}, "sweep.step"),
    ({"sweep.name": "P", "sweep.start": 2, "sweep.stop": 1, "sweep.step": 0.1}, "sweep.stop"),
    ({"grid": 1}, "grid"),
    ({"oblivious.degraded": "yes"}, "oblivious.degraded"),
])
def test_config_errors_name_the_field(tmp_path, patch, field):
    code, _, err = run(tmp_path, {**SYMMETRIC_CF, **patch}, "eval")
    assert code == 2
    assert field in err


def test_missing_power_and_bad_json(tmp_path):
    cfg = dict(SYMMETRIC_CF)
    del cfg["params.P2"]
    code, _, err = run(tmp_path, cfg, "eval")
    assert code == 2 and "params.P2" in err
    code, _, err = run(tmp_path, "{\n  \"strategy\": \"CF_CF\",\n}", "eval")
    assert code == 2 and "line" in err


def test_parse_config_raises_config_error():
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


def test_infeasible_scenario_exit_3(tmp_path):
    # every rate overflows, so no coding point is usable
    code, _, err = run(tmp_path, {**SYMMETRIC_CF, "params.P": 1e308}, "eval", "--grid", "11")
    assert code == 3 and "infeasible" in err


def test_numeric_failure_exit_4(tmp_path):
    cfg = {"strategy": "COMPOSITE", "params.P": 10, "params.P1": 1e-320, "params.P2": 10,
           "composite.p_step": 0.5}
    code, _, err = run(tmp_path, cfg, "composite", "--grid", "11")
    assert code == 4 and "numeric" in err


def test_unsupported_subcommand_strategy(tmp_path):
    code, _, err = run(tmp_path, {**SYMMETRIC_CF, "strategy": "COMPOSITE"}, "eval")
    assert code == 2 and "strategy" in err


# ---------------------------------------------------------------- sweep

@pytest.fixture(scope="module")
def sweep_rows(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    code, out, _ = run(tmp, (CONFIGS / "relay_sweep.json").read_text(), "sweep")
    assert code == 0
    return rows(out)


def test_sweep_relay_position_columns(sweep_rows):
    assert len(sweep_rows) == 201
    d = floats(sweep_rows, "d_z1")
    assert d[0] == -1.0 and d[-1] == 1.0 and d == sorted(d)
    assert {"R_DF", "R_CF", "R0", "R_TS"} <= set(sweep_rows[0])


def test_sweep_cf_rate_is_constant(sweep_rows):
    assert len(set(r["R_CF"] for r in sweep_rows)) == 1


def test_sweep_common_rate_beats_time_sharing(sweep_rows):
    for r in sweep_rows:
        r0, df, cf, ts = (float(r[k]) for k in ("R0", "R_DF", "R_CF", "R_TS"))
        assert r0 == min(df, cf)
        assert r0 >= ts


def test_single_point_sweep_equals_eval(tmp_path):
    sweep_cfg = {**SYMMETRIC_CF, "sweep.name": "P", "sweep.start": 12.5, "sweep.stop": 12.5, "sweep.step": 1}
    eval_cfg = {**SYMMETRIC_CF, "params.P": 12.5}
    c1, a, _ = run(tmp_path, sweep_cfg, "sweep", "--grid", "21", name="a.json")
    c2, b, _ = run(tmp_path, eval_cfg, "eval", "--grid", "21", name="b.json")
    assert c1 == c2 == 0
    assert a == b


def test_single_point_relay_sweep_equals_eval(tmp_path):
    cfg = json.loads((CONFIGS / "relay_sweep.json").read_text())
    cfg.update({"sweep.start": 0.25, "sweep.stop": 0.25})
    ev = {k: v for k, v in cfg.items() if not k.startswith("sweep.")}
    ev.update({"params.d_z1": 0.25, "params.d_z1y1": 0.75})
    c1, a, _ = run(tmp_path, cfg, "sweep", name="a.json")
    c2, b, _ = run(tmp_path, ev, "eval", name="b.json")
    assert c1 == c2 == 0
    assert a == b


def test_sweep_requires_sweep_block(tmp_path):
    code, _, err = run(tmp_path, SYMMETRIC_CF, "sweep")
    assert code == 2 and "sweep" in err


def test_sweep_deterministic_across_thread_counts(tmp_path, monkeypatch):
    cfg = {**SYMMETRIC_CF, "sweep.name": "P", "sweep.start": 5, "sweep.stop": 8, "sweep.step": 0.5}
    outs = []
    for n in ("1", "4"):
        monkeypatch.setenv("BRC_RATES_THREADS", n)
        code, out, _ = run(tmp_path, cfg, "sweep", "--grid", "21")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert len(rows(outs[0])) == 7


def test_bad_thread_env_is_config_error(tmp_path, monkeypatch):
    monkeypatch.setenv("BRC_RATES_THREADS", "many")
    cfg = {**SYMMETRIC_CF, "sweep.name": "P", "sweep.start": 5, "sweep.stop": 6, "sweep.step": 0.5}
    code, _, err = run(tmp_path, cfg, "sweep", "--grid", "11")
    assert code == 2 and "BRC_RATES_THREADS" in err


# ---------------------------------------------------------------- region

def _hull_points(path):
    r = rows(Path(path).read_text())
    return [(float(x["R1"]), float(x["R2"])) for x in r]


def test_region_files_and_convexity(tmp_path):
    dest = tmp_path / "cf.csv"
    code, _, _ = run(tmp_path, SYMMETRIC_CF, "region", "--grid", "41", "--out", str(dest))
    assert code == 0
    hull = _hull_points(dest)
    points = _hull_points(tmp_path / "cf_points.csv")
    assert convex_hull_2d(hull) == [tuple(h) for h in hull]
    assert all(hull_contains(hull, p, tol=1e-11) for p in points)


def test_region_forced_alpha_is_axis_segment(tmp_path):
    dest = tmp_path / "seg.csv"
    code, _, _ = run(tmp_path, {**SYMMETRIC_CF, "coding.alpha": 1.0}, "region", "--grid", "41", "--out", str(dest))
    assert code == 0
    hull = _hull_points(dest)
    assert len(hull) == 2
    assert all(y == 0.0 for _, y in hull)
    assert max(x for x, _ in hull) > 0


def test_region_oblivious_degraded_inner_meets_outer(tmp_path):
    dest = tmp_path / "obl.csv"
    code, _, _ = run(tmp_path, (CONFIGS / "oblivious_degraded.json").read_text(), "region", "--out", str(dest))
    assert code == 0
    inner = _hull_points(dest)
    outer = _hull_points(tmp_path / "obl_outer.csv")
    assert len(inner) == len(outer)
    for a, b in zip(inner, outer):
        assert a == pytest.approx(b, abs=1e-9)


def test_region_to_stdout_has_sections(tmp_path):
    code, out, _ = run(tmp_path, SYMMETRIC_CF, "region", "--grid", "11")
    assert code == 0
    assert out.startswith("# hull\n") and "# _points\n" in out


# ---------------------------------------------------------------- composite

@pytest.fixture(scope="module")
def composite_rows(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("composite")
    code, out, _ = run(tmp, (CONFIGS / "composite.json").read_text(), "composite")
    assert code == 0
    return rows(out)


def test_composite_grid_and_columns(composite_rows):
    p = floats(composite_rows, "p")
    assert len(p) == 101 and p[0] == 0.0 and p[-1] == 1.0
    assert {"r_av_broadcast", "r_av_df", "r_av_cf"} <= set(composite_rows[0])


def test_composite_corner_rows(composite_rows):
    first, last = composite_rows[0], composite_rows[-1]
    # p = 0: only channel 2 occurs, p = 1: only channel 1
    assert first["r_av_cf"] == first["R_CF2"]
    assert float(first["R_CF2"]) >= float(first["R_CF1"])
    assert last["r_av_df"] == last["R_DF1"]
    for r in (first, last):
        assert float(r["r_av_broadcast"]) >= max(float(r["r_av_df"]), float(r["r_av_cf"])) - 1e-9


def test_composite_broadcast_beats_pure_points(composite_rows):
    for r in composite_rows:
        p = float(r["p"])
        lower = max(p * float(r["R1_star"]), (1 - p) * float(r["R2_star"]), float(r["R0_common"]))
        assert float(r["r_av_broadcast"]) >= lower - 1e-9


def test_composite_requires_block(tmp_path):
    code, _, err = run(tmp_path, {**SYMMETRIC_CF, "strategy": "COMPOSITE"}, "composite")
    assert code == 2 and "composite" in err


# ---------------------------------------------------------------- config round trip

@pytest.mark.parametrize("name", ["relay_sweep.json", "composite.json", "oblivious_degraded.json"])
def test_dump_config_round_trip(tmp_path, name):
    text = (CONFIGS / name).read_text()
    code, dumped, _ = run(tmp_path, text, "eval", "--dump-config")
    assert code == 0
    assert parse_config(dumped) == parse_config(text)
    assert dump_config(parse_config(dumped)) == dumped


def test_dump_config_gives_identical_csv(tmp_path):
    src = tmp_path / "orig.json"
    src.write_text(json.dumps({**SYMMETRIC_CF, "grid": 21}))
    out = io.StringIO()
    assert main(["eval", "--config", str(src), "--dump-config"], out, io.StringIO()) == 0
    dumped = tmp_path / "dumped.json"
    dumped.write_text(out.getvalue())
    a, b = io.StringIO(), io.StringIO()
    assert main(["eval", "--config", str(src)], a, io.StringIO()) == 0
    assert main(["eval", "--config", str(dumped)], b, io.StringIO()) == 0
    assert a.getvalue() == b.getvalue()


def test_flags_override_config(tmp_path):
    code, dumped, _ = run(tmp_path, {**SYMMETRIC_CF, "grid": 21}, "eval", "--grid", "33", "--refine", "0",
                          "--seed", "9", "--dump-config")
    flat = json.loads(dumped)
    assert (flat["grid"], flat["refine"], flat["seed"]) == (33, 0, 9)


def test_module_entry_point(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(SYMMETRIC_CF))
    res = subprocess.run([sys.executable, "-m", "brc_rates", "eval", "--config", str(path), "--grid", "11"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("strategy,")
