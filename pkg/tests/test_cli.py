import json
import subprocess
import sys

import pytest

from metrika.cli import DEFAULTS, main, run


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return write


def as_json(argv):
    code, report, text, _ = run(argv + ["--format", "json"])
    return code, (json.loads(text) if report is not None else None), text


def test_analyze_f_ab(files):
    fn = files("f_ab.json", {"kind": "catalog", "name": "f_ab", "params": {"a": "2", "b": "1"}})
    code, rep, _ = as_json(["analyze", fn])
    v = rep["results"]["verdicts"]
    assert code == 0
    assert v["metric-preserving"]["status"] == "Holds"
    assert v["metric-preserving"]["basis"] == {"kind": "SufficientLemma", "name": "amenable-concave"}
    assert v["metric-transform"]["status"] == "Fails"
    assert "counterexample" in v["metric-transform"]


def test_fixset_ceiling_meets_expectation(files):
    fn = files("ceiling.json", {"kind": "catalog", "name": "ceiling"})
    code, rep, _ = as_json(["fixset", fn, "--xmax", "5", "--expect", "0,1,2,3,4,5"])
    assert code == 0
    assert rep["results"]["fixset"]["points"] == ["0", "1", "2", "3", "4", "5"]
    code, _, _ = as_json(["fixset", fn, "--xmax", "5", "--expect", "0,1"])
    assert code == 1


def test_fixset_symbolic_points(files):
    fn = files("s.json", {"kind": "catalog", "name": "x_plus_abs_sin"})
    code, rep, _ = as_json(["fixset", fn, "--xmax", "10", "--expect", "0,pi,2*pi/1,3*pi/1"])
    assert code == 0 and rep["results"]["fixset"]["points"] == ["0", "pi", "2*pi/1", "3*pi/1"]


def test_fixset_shape_for_transform(files):
    fn = files("c.json", {"kind": "catalog", "name": "clamp", "params": {"a": "2"}})
    code, rep, _ = as_json(["fixset", fn, "--xmax", "5"])
    assert code == 0 and rep["results"]["shape"] == {"shape": "Interval", "a": "2"}


def test_bad_triangle_exits_one_with_witness(files):
    bad = files("bad.json", {"n": 3, "d": [["0", "1", "9"], ["1", "0", "4"], ["9", "4", "0"]]})
    code, rep, _ = as_json(["metric", "validate", bad])
    assert code == 1
    assert rep["results"]["validation"]["violation"] == "triangle"
    assert rep["results"]["validation"]["indices"] == [0, 1, 2]


def test_metric_transform_via_sqrt(files):
    eq = files("eq.json", {"n": 3, "d": [["0", "1", "1"], ["1", "0", "1"], ["1", "1", "0"]]})
    fn = files("sqrt.json", {"kind": "catalog", "name": "sqrt_ax"})
    code, rep, _ = as_json(["metric", "transform", eq, "--fn", fn])
    assert code == 0 and rep["results"]["validation"]["valid"]


def test_malformed_input_exits_two(files, tmp_path):
    assert run(["analyze", str(tmp_path / "missing.json")])[0] == 2
    assert run(["analyze", '{"kind": "catalog", "name": "nope"}'])[0] == 2
    assert run(["chainable", '{"n": 2, "d": [["0", "1"]]}', "--eps", "1"])[0] == 2
    assert run(["metric", "validate", "{not json"])[0] == 2
    assert run(["fixset", '{"kind": "catalog", "name": "half"}', "--step", "x"])[0] == 2


def test_unknown_subcommand_is_usage_error():
    assert run(["frobnicate"])[0] == 2


def test_chainable_and_nadler():
    line = {"n": 2, "d": [["0", "10"], ["10", "0"]]}
    code, rep, _ = as_json(["chainable", json.dumps(line), "--eps", "1"])
    assert code == 1 and rep["results"]["chain"]["cut"] == [[0], [1]]
    mm = {"space": {"dim": 1, "points": [[0], [1], [2]]}, "images": [[1], [1], [1]]}
    code, rep, _ = as_json(["nadler", json.dumps(mm), "--eps", "3/2", "--k", "1/2"])
    assert code == 0 and rep["results"]["report"]["witness"] == 1


def test_contraction_commands():
    pts = [[0], [1], [2], [4], [8], [16]]        # 1/16 units: {0,1/16,1/8,1/4,1/2,1}
    space = {"dim": 1, "points": [[f"{p[0]}/16"] for p in pts]}
    single = {"space": space, "map": [0, None, None, 1, 2, 3]}
    fn = '{"kind": "catalog", "name": "f_ab"}'
    code, rep, _ = as_json(["contraction", "single", fn, json.dumps(single), "--k", "9/10"])
    assert code == 0 and rep["results"]["report"]["derived_c"] == "29/40"
    multi = {"space": space, "images": [[0], None, None, [1], [2], [3]]}
    code, rep, _ = as_json(["contraction", "multi", fn, json.dumps(multi), "--k", "9/10"])
    assert code == 0 and rep["results"]["report"]["conclusion"] == "UniformLocalMultivaluedContraction"


def test_iterate_commands():
    code, rep, _ = as_json(["iterate", "cosine", "--x0", "0", "--tol", "1e-12"])
    assert code == 0 and abs(rep["results"]["trace"]["limit"] - 0.7390851332) < 1e-8
    swap = json.dumps({"kind": "swap_scale", "params": {"a": 2, "b": 0.3}})
    code, rep, _ = as_json(["iterate", swap, "--x0", "1,1", "--power", "2"])
    assert code == 0 and rep["results"]["result"]["g_fixed"]["status"] == "Holds"
    half = json.dumps({"kind": "affine", "params": {"matrix": [[0.5]], "offset": [1]}})
    code, rep, _ = as_json(["iterate", half, "--starts", "0", "10", "100"])
    assert code == 0 and abs(rep["results"]["limit"] - 2) < 1e-8


def test_catalog_list():
    code, rep, _ = as_json(["catalog", "list"])
    names = [row["name"] for row in rep["results"]["catalog"]]
    assert code == 0 and "x_plus_abs_sin" in names and "tight_fixset" in names


def test_require_flag_fails_when_property_fails():
    assert run(["analyze", '{"kind": "catalog", "name": "half"}', "--require", "tightly-bounded"])[0] == 1
    assert run(["analyze", '{"kind": "catalog", "name": "half"}', "--require", "concave"])[0] == 0


def test_json_report_round_trip(files):
    fn = files("f.json", {"kind": "catalog", "name": "kirk_h"})
    code, report, text, _ = run(["analyze", fn, "--format", "json"])
    parsed = json.loads(text)
    assert parsed == report.to_json()
    assert json.dumps(parsed, sort_keys=True, indent=2) == text
    assert parsed["schema"] == "metrika-report/1"


def test_reports_are_byte_identical(files):
    fn = files("f.json", {"kind": "catalog", "name": "floor_sqrt"})
    a = run(["fixset", fn, "--format", "json"])[2]
    b = run(["fixset", fn, "--format", "json"])[2]
    assert a == b


def test_digest_tracks_file_contents(files):
    fn = files("f.json", {"kind": "catalog", "name": "half"})
    before = json.loads(run(["derivative", fn, "--format", "json"])[2])["inputs_digest"]
    files("f.json", {"kind": "catalog", "name": "identity"})
    after = json.loads(run(["derivative", fn, "--format", "json"])[2])["inputs_digest"]
    assert before != after


def test_config_precedence(files):
    fn = '{"kind": "catalog", "name": "clamp", "params": {"a": "2"}}'
    cfg = files("cfg.json", {"xmax": "4", "format": "json"})
    code, report, text, _ = run(["fixset", fn, "--config", cfg])
    assert json.loads(text)["results"]["fixset"]["window"] == [0, "4"]
    code, report, text, _ = run(["fixset", fn, "--config", cfg, "--xmax", "3"])
    assert json.loads(text)["results"]["fixset"]["window"] == [0, "3"]
    code, report, text, _ = run(["fixset", fn])
    assert not text.startswith("{") and DEFAULTS["xmax"] == "12"
    bad = files("bad.json", {"colour": "blue"})
    assert run(["fixset", fn, "--config", bad])[0] == 2


def test_text_rendering_mentions_counterexample():
    code, report, text, _ = run(["analyze", '{"kind": "catalog", "name": "power", "params": {"p": "2"}}'])
    assert code == 1
    assert "metric-preserving: Fails (doubling-necessary)" in text
    assert "counterexample" in text


def test_output_file(tmp_path):
    out = tmp_path / "rep.json"
    assert main(["catalog", "list", "--format", "json", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["exit_code"] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "metrika", "catalog", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "ceiling" in proc.stdout
