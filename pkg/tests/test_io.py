import json
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vlpsolve.benson import SolverConfig, solve
from vlpsolve.io import (DuplicateEntry, IndexOutOfRange, MissingEnd, MissingHeader, VlpSyntaxError,
                         cli_main, format_vlp, parse_vlp, write_results)
from vlpsolve.model import Sense, VlpProblem, validate
from vlpsolve.verify import SIMPLICIAL_3, random_vlp

from conftest import INF, simplex2_problem

SIMPLEX2 = """\
vlp 2 2 3
obj min
p 1 1 1
p 2 2 1
b 1 1 1
b 1 2 1
b 2 1 1
b 3 2 1
row 1 1 inf
row 2 0 inf
row 3 0 inf
cone default
end
"""


def same_problem(p, q):
    def eq(a, b):
        if a is None or b is None:
            return a is None and b is None
        return np.array_equal(np.asarray(a), np.asarray(b))
    return (eq(p.P, q.P) and eq(p.B, q.B) and eq(p.a, q.a) and eq(p.b, q.b) and eq(p.l, q.l)
            and eq(p.s, q.s) and eq(p.cone.Y, q.cone.Y) and eq(p.cone.Z, q.cone.Z)
            and p.sense == q.sense and eq(p.c, q.c))


def test_parse_simplex2():
    assert same_problem(parse_vlp(SIMPLEX2), simplex2_problem())


def test_comments_and_case():
    text = "# header follows\nvlp 1 1 1  # dims\nOBJ MAX\np 1 1 2\nrow 1 -INF 3\nend\n"
    p = parse_vlp(text)
    assert p.sense == Sense.MAX and p.a[0] == -INF and p.b[0] == 3


@pytest.mark.parametrize("text, error, line", [
    ("vlp 2 2 3\nobj min\n", MissingEnd, 2),
    ("obj min\nend\n", MissingHeader, 1),
    ("vlp 2 1 1\np 3 1 1.0\nend\n", IndexOutOfRange, 2),
    ("vlp 2 1 1\np 1 1 1\np 1 1 2\nend\n", DuplicateEntry, 3),
    ("vlp 2 1 1\nrow 1 0 1\nrow 1 0 2\nend\n", DuplicateEntry, 3),
    ("vlp 2 1 1\np 1 1 x\nend\n", VlpSyntaxError, 2),
    ("vlp 2 1 1\nb 1 1 1e30\nend\n", VlpSyntaxError, 2),
    ("vlp 2 1 1\np 1 1 inf\nend\n", VlpSyntaxError, 2),
    ("vlp 2 1 1\nfoo 1\nend\n", VlpSyntaxError, 2),
    ("vlp 2 1 1\ncone gen 2\ny 1 1 0\nend\n", VlpSyntaxError, 4),
    ("vlp 2 1 1\nend\np 1 1 1\n", VlpSyntaxError, 3),
    ("vlp 2 1 1\nvlp 2 1 1\nend\n", DuplicateEntry, 2),
])
def test_parse_errors(text, error, line):
    with pytest.raises(error) as info:
        parse_vlp(text)
    assert info.value.line == line


def test_cone_blocks():
    text = "vlp 2 1 0\np 1 1 1\ncone gen 2\ny 1 1 0\ny 2 1 1\nend\n"
    p = validate(parse_vlp(text))
    assert np.allclose(p.cone.Y, [[1, 1], [0, 1]])
    text = "vlp 2 1 0\ncone dual 2\nz 1 0 1\nz 2 1 -1\ndualpar 2 1\nend\n"
    p = validate(parse_vlp(text))
    assert np.allclose(p.c, [2, 1]) and p.cone.Z.shape == (2, 2)


def _random_problem(seed):
    rng = np.random.default_rng(seed)
    p = random_vlp(rng, cone=SIMPLICIAL_3 if rng.random() < 0.3 else None,
                   q=3 if rng.random() < 0.3 else None)
    if p.cone is SIMPLICIAL_3 and p.q != 3:
        p = random_vlp(rng)
    p = VlpProblem(p.P * rng.random(), p.B, p.a, p.b, p.l, p.s, p.cone,
                   Sense.MAX if rng.random() < 0.5 else Sense.MIN,
                   None if rng.random() < 0.5 else np.ones(p.q) + rng.random(p.q))
    return p


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    p = _random_problem(seed)
    again = parse_vlp(format_vlp(p))
    assert same_problem(p, again)
    assert format_vlp(again) == format_vlp(p)


def test_round_trip_validated(simplex2):
    assert same_problem(validate(parse_vlp(format_vlp(simplex2))), simplex2)


def _lines(path, tag):
    with open(path) as fh:
        return [ln for ln in fh.read().splitlines() if ln.split()[0] == tag]


def test_write_text_results(tmp_path, simplex2):
    sol = solve(simplex2)
    write_results(sol, tmp_path)
    img = tmp_path / "primal_img.txt"
    assert len(_lines(img, "v")) == 2 and len(_lines(img, "d")) == 0 and len(_lines(img, "k")) == 2
    v = [list(map(float, ln.split()[1:])) for ln in _lines(img, "v")]
    assert sorted(r[:2] for r in v) == [[0.0, 1.0], [1.0, 0.0]]
    dual = tmp_path / "dual_img.txt"
    assert len(_lines(dual, "v")) == 3
    assert _lines(dual, "d") == ["d 0.0 -1.0"]
    assert len(_lines(tmp_path / "primal_hrep.txt", "h")) == 3
    assert len(_lines(tmp_path / "dual_hrep.txt", "h")) == 4
    summary = dict(ln.split(" ", 1) for ln in open(tmp_path / "summary.txt").read().splitlines())
    assert summary["status"] == "optimal" and float(summary["eps"]) == 1e-8


def test_write_json_results(tmp_path, simplex2):
    sol = solve(simplex2, SolverConfig(eps=1e-6))
    write_results(sol, tmp_path, "json")
    img = json.load(open(tmp_path / "primal_img.json"))
    assert set(img) == {"vertices", "directions", "cone_compartment"}
    assert len(img["vertices"]) == 2 and img["directions"] == []
    assert json.load(open(tmp_path / "summary.json"))["summary"]["eps"] == 1e-6
    assert len(json.load(open(tmp_path / "primal_hrep.json"))["hrep"]) == 3
    with pytest.raises(ValueError):
        write_results(sol, tmp_path, "xml")


def test_numbers_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    p = validate(random_vlp(rng, q=2))
    sol = solve(p)
    write_results(sol, tmp_path)
    v = np.array([list(map(float, ln.split()[1:3])) for ln in _lines(tmp_path / "primal_img.txt", "v")])
    assert np.array_equal(v.reshape(-1, 2), sol.vertices)


@pytest.fixture
def problem_file(tmp_path):
    path = tmp_path / "simplex2.vlp"
    path.write_text(SIMPLEX2)
    return path


def test_cli_default_run(tmp_path, problem_file, capsys):
    out = tmp_path / "out"
    assert cli_main([str(problem_file), "--output-dir", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["dual_hrep.txt", "dual_img.txt", "primal_hrep.txt",
                                       "primal_img.txt", "summary.txt"]


def test_cli_dual_eps(tmp_path, problem_file):
    out = tmp_path / "out"
    code = cli_main(["--algorithm", "dual", "--eps", "1e-6", "--quiet", "--output-dir", str(out),
                     str(problem_file)])
    assert code == 0
    assert "eps 1e-06" in (out / "summary.txt").read_text()
    assert "algorithm dual" in (out / "summary.txt").read_text()


def test_cli_exit_codes(tmp_path, problem_file):
    assert cli_main([str(tmp_path / "missing.vlp")]) == 66
    bad = tmp_path / "bad.vlp"
    bad.write_text("vlp 2 1 1\np 3 1 1.0\nend\n")
    assert cli_main([str(bad)]) == 65
    assert cli_main(["--eps", "-1", str(problem_file)]) == 64
    assert cli_main(["--bogus", str(problem_file)]) == 64
    assert cli_main(["--dualpar", "1,0", str(problem_file)]) == 64
    infeasible = tmp_path / "inf.vlp"
    infeasible.write_text("vlp 1 1 2\np 1 1 1\nb 1 1 1\nb 2 1 1\nrow 1 1 inf\nrow 2 -inf 0\nend\n")
    assert cli_main(["--quiet", "--output-dir", str(tmp_path / "o1"), str(infeasible)]) == 2
    line = tmp_path / "line.vlp"
    line.write_text("vlp 2 1 0\np 1 1 1\nend\n")
    assert cli_main(["--quiet", "--output-dir", str(tmp_path / "o2"), str(line)]) == 3
    assert cli_main(["--quiet", "--max-iter", "1", "--output-dir", str(tmp_path / "o3"),
                     str(problem_file)]) == 4


def test_cli_verify(problem_file, capsys):
    assert cli_main(["verify", str(problem_file)]) == 0
    assert "verified" in capsys.readouterr().out


def test_cli_progress(tmp_path, capsys):
    rng = np.random.default_rng(0)
    P = rng.integers(0, 11, size=(3, 20)).astype(float)
    B = rng.integers(0, 11, size=(20, 20)).astype(float)
    p = VlpProblem.create(P, B, a=B.sum(axis=1) / 4, l=np.zeros(20))
    path = tmp_path / "big.vlp"
    path.write_text(format_vlp(p))
    assert cli_main(["--eps", "1e-6", "--output-dir", str(tmp_path / "o"), str(path)]) == 0
    err = capsys.readouterr().err
    assert "iteration 1" in err
    assert cli_main(["--quiet", "--eps", "1e-6", "--output-dir", str(tmp_path / "o"), str(path)]) == 0
    assert capsys.readouterr().err == ""
