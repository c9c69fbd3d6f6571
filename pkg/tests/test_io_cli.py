import json
import subprocess
import sys
from fractions import Fraction

import pytest

from arrfaces import cli
from arrfaces.errors import DegenerateInput, ParamRange, ParseError, PointOnLine
from arrfaces.geom import Line, Point
from arrfaces.io import (
    Instance,
    check_general_position,
    component_rng,
    concurrency_witness,
    format_instance,
    generate,
    incidence_witness,
    parse_instance,
)

TRIANGLE = "# triangle\nL 0 0\nL 1 0\nL -1 2\nP 1 1/2\n"


def test_parse_and_format_round_trip():
    inst = parse_instance(TRIANGLE + "S 0 5 3 7  # a segment\n")
    assert inst.lines == [Line(0, 0), Line(1, 0), Line(-1, 2)]
    assert inst.points == [Point(1, Fraction(1, 2))]
    assert len(inst.segments) == 1
    again = parse_instance(format_instance(inst))
    assert again == inst


@pytest.mark.parametrize("text", ["L 1\n", "Q 1 2\n", "P 1 x\n", "S 1 1 1 2\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError) as e:
        parse_instance("# ok\n" + text)
    assert "line 2" in str(e.value)


def test_general_position_filters():
    assert concurrency_witness([Line(0, 0), Line(1, 0), Line(-1, 0)]) == (0, 1, 2)
    assert concurrency_witness([Line(0, 0), Line(0, 0)]) == (0, 1)
    assert concurrency_witness([Line(0, 0), Line(1, 0), Line(-1, 1)]) is None
    big = [Line(Fraction(3, 10**9), 0), Line(Fraction(1, 7), 0), Line(5, 0)]
    assert concurrency_witness(big) == (0, 1, 2)
    assert incidence_witness([Line(1, 0)], [Point(0, 1), Point(2, 2)]) == (0, 1)
    with pytest.raises(PointOnLine):
        check_general_position([Line(1, 0)], [Point(3, 3)])
    with pytest.raises(DegenerateInput):
        check_general_position([Line(0, 0), Line(1, 0), Line(2, 0)])


def test_generate_examples(tmp_path):
    a = format_instance(generate("random-lines", 3, 0, 1))
    b = format_instance(generate("random-lines", 3, 0, 1))
    assert a == b
    with pytest.raises(DegenerateInput):
        generate("grid-lines", 4, 0, 0)
    with pytest.raises(ParamRange):
        generate("random-points", 0, 0, 0)
    inst = generate("clustered-points", 0, 50, 3)
    assert len(inst.points) == 50 and not inst.lines


def test_component_streams_are_independent():
    assert component_rng(1, "lines").random() == component_rng(1, "lines").random()
    assert component_rng(1, "lines").random() != component_rng(1, "points").random()
    # adding points does not move the lines
    assert generate("random-lines", 20, 0, 4).lines == generate("random-lines", 20, 30, 4).lines


def test_cli_generate_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
    assert cli.main(["generate", "--kind", "random-lines", "--n", "3", "--seed", "1", "--out", str(out1)]) == 0
    assert cli.main(["generate", "--kind", "random-lines", "--n", "3", "--seed", "1", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert cli.main(["generate", "--kind", "grid-lines", "--n", "4"]) == 3
    assert cli.main(["generate", "--kind", "random-points", "--m", "0"]) == 3


def test_cli_run_verify(tmp_path, capsys):
    inst = tmp_path / "tri.txt"
    inst.write_text(TRIANGLE)
    rep, faces_out = tmp_path / "r.json", tmp_path / "f.json"
    code = cli.main(["run", "--algo", "many-faces-fast", "--instance", str(inst), "--verify", "--report", str(rep), "--emit-faces", str(faces_out)])
    assert code == 0
    doc = json.loads(rep.read_text())
    assert doc["schema"] == "arrfaces.report/1" and doc["verdict"] == "PASS" and doc["faces"] == 1
    faces = json.loads(faces_out.read_text())
    assert faces[0]["bounded"] and sorted(faces[0]["vertices"]) == [["0", "0"], ["1", "1"], ["2", "0"]]


def test_cli_face_query_verify(tmp_path):
    lines = tmp_path / "lines.txt"
    queries = tmp_path / "q.txt"
    inst = generate("random-lines", 40, 100, 2)
    lines.write_text(format_instance(Instance(lines=inst.lines)))
    queries.write_text(format_instance(Instance(points=inst.points)))
    rep = tmp_path / "r.json"
    for algo in ("face-query", "face-query-tradeoff"):
        assert cli.main(["run", "--algo", algo, "--instance", str(lines), "--queries", str(queries), "--verify", "--report", str(rep)]) == 0
        doc = json.loads(rep.read_text())
        assert doc["verdict"] == "PASS" and doc["constants"]["verified"] == "100/100"


def test_main_and_naive_reports_agree():
    inst = generate("random-lines", 120, 120, 5)
    a, _ = cli.run_algorithm("many-faces-main", inst)
    b, _ = cli.run_algorithm("many-faces-naive", inst)
    assert a.faces == b.faces and a.total_complexity == b.total_complexity


def test_verify_failure_exits_2(tmp_path, monkeypatch, capsys):
    inst = tmp_path / "tri.txt"
    inst.write_text(TRIANGLE + "P 100 3\n")
    monkeypatch.setattr(cli, "many_faces_fast", lambda lines, pts, **kw: set())
    assert cli.main(["run", "--algo", "many-faces-fast", "--instance", str(inst), "--verify"]) == 2
    err = capsys.readouterr().err
    assert "missing" in err


def test_io_errors_exit_4(tmp_path):
    assert cli.main(["run", "--algo", "many-faces-naive", "--instance", str(tmp_path / "nope.txt")]) == 4


def test_bench(tmp_path):
    rep = tmp_path / "b.json"
    assert cli.main(["bench", "--algo", "many-faces-fast", "--sizes", "", "--report", str(rep)]) == 0
    assert json.loads(rep.read_text())["runs"] == []
    d1 = cli.bench("many-faces-fast", [16, 32, 64], seed=3)
    d2 = cli.bench("many-faces-fast", [16, 32, 64], seed=3)
    assert [r["faces"] for r in d1["runs"]] == [r["faces"] for r in d2["runs"]]
    assert d1["fits"]["wall_seconds"]["slope"] is not None
    q = cli.bench("face-query", [32, 64], queries=50)
    assert "median_canonical_size" in q["fits"]


def test_fit_slope_recovers_power_law():
    xs = [2**k for k in range(4, 10)]
    noise = [1.1, 0.9, 1.05, 0.97, 1.02, 0.95]
    fit = cli.fit_slope(xs, [3 * x**1.5 * e for x, e in zip(xs, noise)])
    assert abs(fit["slope"] - 1.5) < 0.05
    lo, hi = fit["ci95"]
    assert lo <= 1.5 <= hi


def test_console_script_runs(tmp_path):
    out = subprocess.run([sys.executable, "-m", "arrfaces.cli", "generate", "--kind", "random-lines", "--n", "2"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.count("\nL ") + out.stdout.startswith("L ") >= 1
