"""Problem files, result files and the ``vlpsolve`` command.

A problem file is line oriented; ``#`` starts a comment::

    vlp 2 2 3          # q n m
    obj min
    p 1 1 1            # P[1,1] = 1, 1-based
    b 1 1 1
    row 1 1 inf        # 1 <= (Bx)_1 <= inf
    col 2 0 inf
    cone default       # or: cone gen <o> / cone dual <p>, then y/z lines
    dualpar 1 1
    end
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from .benson import Algorithm, SolverConfig, Status, solve
from .dual import CouplingContext, dual_vrep_to_primal_hrep
from .model import OrderingCone, Sense, VlpError, VlpProblem, validate

SENTINEL = 1e30


class ParseError(ValueError):
    """Malformed problem file; ``line`` is 1-based (``None`` if not tied to a line)."""

    def __init__(self, line, message):
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class VlpSyntaxError(ParseError):
    pass


class DuplicateEntry(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class MissingHeader(ParseError):
    pass


class MissingEnd(ParseError):
    pass


# ---------------------------------------------------------------------------
# parsing

def _number(tok, line, allow_inf=False):
    low = tok.lower()
    if low in ("inf", "+inf", "-inf"):
        if not allow_inf:
            raise VlpSyntaxError(line, f"infinite value {tok!r} not allowed here")
        return -math.inf if low.startswith("-") else math.inf
    if low.lstrip("+-") in ("nan", "infinity"):
        raise VlpSyntaxError(line, f"invalid number {tok!r}")
    try:
        val = float(tok)
    except ValueError:
        raise VlpSyntaxError(line, f"invalid number {tok!r}") from None
    if abs(val) >= SENTINEL:
        raise VlpSyntaxError(line, f"{tok!r} looks like an infinity sentinel; write inf")
    return val


def _index(tok, limit, line, what):
    try:
        k = int(tok)
    except ValueError:
        raise VlpSyntaxError(line, f"invalid {what} index {tok!r}") from None
    if not 1 <= k <= limit:
        raise IndexOutOfRange(line, f"{what} index {k} outside 1..{limit}")
    return k - 1


def _expect(tokens, count, line):
    if len(tokens) != count:
        raise VlpSyntaxError(line, f"'{tokens[0]}' expects {count - 1} arguments, got {len(tokens) - 1}")


def parse_vlp(text):
    """Parse problem text into an (unvalidated) :class:`VlpProblem`."""
    lines = [(k, raw.split("#", 1)[0].split()) for k, raw in enumerate(text.splitlines(), 1)]
    lines = [(k, toks) for k, toks in lines if toks]
    if not lines or lines[0][1][0].lower() != "vlp":
        raise MissingHeader(lines[0][0] if lines else None, "first line must be 'vlp <q> <n> <m>'")
    k, toks = lines[0]
    _expect(toks, 4, k)
    try:
        q, n, m = (int(t) for t in toks[1:])
    except ValueError:
        raise VlpSyntaxError(k, "dimensions must be integers") from None
    if q < 1 or n < 1 or m < 0:
        raise VlpSyntaxError(k, "need q >= 1, n >= 1, m >= 0")

    P = np.zeros((q, n))
    B = np.zeros((m, n))
    a, b = np.full(m, -math.inf), np.full(m, math.inf)
    l, s = np.full(n, -math.inf), np.full(n, math.inf)
    seen = set()
    sense, cone, c = None, None, None
    pending = None  # (kind, count, rows, first line) while reading a cone block
    ended = False

    def once(key, line):
        if key in seen:
            raise DuplicateEntry(line, f"duplicate entry {' '.join(map(str, key))}")
        seen.add(key)

    for k, toks in lines[1:]:
        if ended:
            raise VlpSyntaxError(k, "content after 'end'")
        kw = toks[0].lower()
        if pending is not None and kw != pending[0]:
            raise VlpSyntaxError(k, f"expected {pending[1] - len(pending[2])} more '{pending[0]}' lines")
        if kw == "vlp":
            raise DuplicateEntry(k, "header repeated")
        elif kw == "obj":
            _expect(toks, 2, k)
            once(("obj",), k)
            if toks[1].lower() not in ("min", "max"):
                raise VlpSyntaxError(k, "objective sense must be min or max")
            sense = Sense(toks[1].lower())
        elif kw in ("p", "b"):
            _expect(toks, 4, k)
            rows = q if kw == "p" else m
            i = _index(toks[1], rows, k, "row")
            j = _index(toks[2], n, k, "column")
            once((kw, i + 1, j + 1), k)
            (P if kw == "p" else B)[i, j] = _number(toks[3], k)
        elif kw in ("row", "col"):
            _expect(toks, 4, k)
            i = _index(toks[1], m if kw == "row" else n, k, kw)
            once((kw, i + 1), k)
            lo, hi = _number(toks[2], k, True), _number(toks[3], k, True)
            if kw == "row":
                a[i], b[i] = lo, hi
            else:
                l[i], s[i] = lo, hi
        elif kw == "cone":
            once(("cone",), k)
            if len(toks) == 2 and toks[1].lower() == "default":
                cone = OrderingCone.orthant(q)
            elif len(toks) == 3 and toks[1].lower() in ("gen", "dual"):
                try:
                    count = int(toks[2])
                except ValueError:
                    raise VlpSyntaxError(k, "cone size must be an integer") from None
                if count < 1:
                    raise VlpSyntaxError(k, "cone size must be positive")
                pending = ("y" if toks[1].lower() == "gen" else "z", count, {}, k)
            else:
                raise VlpSyntaxError(k, "expected 'cone default', 'cone gen <o>' or 'cone dual <p>'")
        elif kw in ("y", "z"):
            if pending is None:
                raise VlpSyntaxError(k, f"'{kw}' line outside a cone block")
            _expect(toks, q + 2, k)
            idx = _index(toks[1], pending[1], k, "generator")
            if idx in pending[2]:
                raise DuplicateEntry(k, f"generator {idx + 1} repeated")
            pending[2][idx] = [_number(t, k) for t in toks[2:]]
            if len(pending[2]) == pending[1]:
                M = np.array([pending[2][i] for i in range(pending[1])]).T
                cone = OrderingCone(q, M, None) if kw == "y" else OrderingCone(q, None, M)
                pending = None
        elif kw == "dualpar":
            _expect(toks, q + 1, k)
            once(("dualpar",), k)
            c = np.array([_number(t, k) for t in toks[1:]])
        elif kw == "end":
            _expect(toks, 1, k)
            ended = True
        else:
            raise VlpSyntaxError(k, f"unknown keyword {toks[0]!r}")
    if pending is not None:
        raise VlpSyntaxError(pending[3], "cone block incomplete")
    if not ended:
        raise MissingEnd(lines[-1][0], "missing 'end'")
    return VlpProblem(P, B, a, b, l, s, cone or OrderingCone.orthant(q),
                      sense or Sense.MIN, c)


def read_vlp(path):
    with open(path, encoding="utf-8") as fh:
        return parse_vlp(fh.read())


def _fmt(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x + 0.0)


def format_vlp(p):
    """Problem text that :func:`parse_vlp` reads back to the same data."""
    out = [f"vlp {p.q} {p.n} {p.m}", f"obj {Sense(p.sense).value}"]
    for name, M in (("p", p.P), ("b", p.B)):
        for i, j in zip(*np.nonzero(M)):
            out.append(f"{name} {i + 1} {j + 1} {_fmt(M[i, j])}")
    for name, lo, hi in (("row", p.a, p.b), ("col", p.l, p.s)):
        for i, (x, y) in enumerate(zip(lo, hi)):
            if not (x == -math.inf and y == math.inf):
                out.append(f"{name} {i + 1} {_fmt(x)} {_fmt(y)}")
    Y, Z = p.cone.Y, p.cone.Z
    eye = np.eye(p.q)
    if Y is not None and Y.shape == eye.shape and np.array_equal(Y, eye) and \
            (Z is None or np.array_equal(Z, eye)):
        out.append("cone default")
    elif Y is not None:
        out.append(f"cone gen {Y.shape[1]}")
        out += [f"y {k + 1} " + " ".join(map(_fmt, col)) for k, col in enumerate(Y.T)]
    else:
        out.append(f"cone dual {Z.shape[1]}")
        out += [f"z {k + 1} " + " ".join(map(_fmt, col)) for k, col in enumerate(Z.T)]
    if p.c is not None:
        out.append("dualpar " + " ".join(map(_fmt, p.c)))
    out.append("end")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# result files

def _line(tag, *arrays):
    vals = [v for arr in arrays for v in np.ravel(arr)]
    return " ".join([tag] + [_fmt(v) for v in vals])


def _floats(arr):
    return [float(v) for v in np.ravel(arr)]


def primal_hrep(sol):
    """Halfspaces of the outer image, from the dual vertices."""
    if sol.primal_outer is not None:
        return sol.primal_outer.hrep
    return dual_vrep_to_primal_hrep(np.asarray(sol.dual_vertices), CouplingContext(sol.c, sol.sense))


def dual_hrep(sol):
    """Halfspaces of the dual image, from the inner primal image."""
    if sol.dual_outer is not None:
        return sol.dual_outer.hrep
    return None


def summary(sol):
    return {
        "status": Status(sol.status).value,
        "algorithm": Algorithm(sol.algorithm).value,
        "sense": Sense(sol.sense).value,
        "eps": float(sol.eps),
        "q": int(sol.q),
        "n": int(sol.n),
        "vertices": int(len(sol.vertices)),
        "directions": int(len(sol.directions)),
        "cone_compartment": int(len(sol.cone_compartment)),
        "dual_vertices": int(len(sol.dual_vertices)),
        "lp_count": int(sol.lp_count),
        "init_lps": int(sol.init_lps),
        "iterations": int(sol.iterations),
        "elapsed": float(sol.elapsed),
        "duality_parameter": None if sol.c is None else _floats(sol.c),
        "message": sol.message,
    }


def write_results(sol, directory, fmt="text"):
    """Write ``primal_img``, ``dual_img``, ``primal_hrep``, ``dual_hrep`` and ``summary`` files.

    Returns the list of written paths.
    """
    if fmt not in ("text", "json"):
        raise ValueError("format must be 'text' or 'json'")
    os.makedirs(directory, exist_ok=True)
    q = sol.q
    vertical = CouplingContext(sol.c, sol.sense).vertical if sol.c is not None else -np.eye(q)[-1]
    ph = primal_hrep(sol)
    dh = dual_hrep(sol)
    info = summary(sol)
    files = {}
    if fmt == "text":
        files["primal_img.txt"] = (
            [_line("v", y, x) for y, x in zip(sol.vertices, sol.vertex_preimages)]
            + [_line("d", y, x) for y, x in zip(sol.directions, sol.direction_preimages)]
            + [_line("k", y) for y in sol.cone_compartment])
        files["dual_img.txt"] = (
            [_line("v", y, d["u"], d["w"], d["v"]) for y, d in zip(sol.dual_vertices, sol.dual_preimages)]
            + [_line("d", vertical)])
        for name, h in (("primal_hrep.txt", ph), ("dual_hrep.txt", dh)):
            files[name] = [] if h is None else [_line("h", w, g) for w, g in zip(h.normals, h.offsets)]
        files["summary.txt"] = [f"{k} {_summary_value(v)}" for k, v in info.items()]
        for name, lines in files.items():
            files[name] = "\n".join(lines) + ("\n" if lines else "")
    else:
        files["primal_img.json"] = {
            "vertices": [{"y": _floats(y), "x": _floats(x)}
                         for y, x in zip(sol.vertices, sol.vertex_preimages)],
            "directions": [{"y": _floats(y), "x": _floats(x)}
                           for y, x in zip(sol.directions, sol.direction_preimages)],
            "cone_compartment": [{"y": _floats(y)} for y in sol.cone_compartment],
        }
        files["dual_img.json"] = {
            "vertices": [{"y": _floats(y), "u": _floats(d["u"]), "w": _floats(d["w"]), "v": _floats(d["v"])}
                         for y, d in zip(sol.dual_vertices, sol.dual_preimages)],
            "directions": [{"y": _floats(vertical)}],
            "cone_compartment": [],
        }
        for name, h in (("primal_hrep.json", ph), ("dual_hrep.json", dh)):
            files[name] = {"hrep": [] if h is None else
                           [{"w": _floats(w), "gamma": float(g)} for w, g in zip(h.normals, h.offsets)]}
        files["summary.json"] = {"summary": info}
        for name, obj in files.items():
            files[name] = json.dumps(obj, indent=1, allow_nan=False) + "\n"
    paths = []
    for name, content in files.items():
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
        paths.append(path)
    return paths


def _summary_value(v):
    if isinstance(v, float):
        return _fmt(v)
    if isinstance(v, list):
        return " ".join(_fmt(x) for x in v)
    if v is None:
        return "none"
    return str(v)


# ---------------------------------------------------------------------------
# command line

EXIT_OK, EXIT_INFEASIBLE, EXIT_NO_VERTEX, EXIT_LIMIT = 0, 2, 3, 4
EXIT_USAGE, EXIT_DATA, EXIT_NOINPUT = 64, 65, 66

EXIT_CODES = {
    Status.OPTIMAL: EXIT_OK,
    Status.EPS_OPTIMAL: EXIT_OK,
    Status.UNBOUNDED_IMAGE: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.NO_VERTEX: EXIT_NO_VERTEX,
    Status.ITERATION_LIMIT: EXIT_LIMIT,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parser(prog):
    ap = _Parser(prog=prog, description="Solve a vector linear program given as a .vlp file.")
    ap.add_argument("--algorithm", choices=["primal", "dual"], default="primal")
    ap.add_argument("--eps", type=float, default=1e-8)
    ap.add_argument("--dualpar", default=None, help="duality parameter, comma separated")
    ap.add_argument("--max-iter", type=int, default=10 ** 6)
    ap.add_argument("--format", choices=["text", "json"], default="text")
    ap.add_argument("--output-dir", default=".")
    ap.add_argument("--quiet", action="store_true")
    ap.add_argument("file")
    return ap


def _load(args, err):
    """Parsed and validated problem, or an exit code."""
    try:
        problem = read_vlp(args.file)
    except OSError as exc:
        print(f"vlpsolve: cannot read {args.file}: {exc.strerror or exc}", file=err)
        return None, EXIT_NOINPUT
    except ParseError as exc:
        print(f"vlpsolve: {args.file}: {exc}", file=err)
        return None, EXIT_DATA
    try:
        problem = validate(problem)
    except VlpError as exc:
        print(f"vlpsolve: {args.file}: {exc}", file=err)
        return None, EXIT_DATA
    if args.dualpar is not None:
        try:
            c = np.array([float(t) for t in args.dualpar.split(",")])
            problem = validate(VlpProblem(problem.P, problem.B, problem.a, problem.b, problem.l,
                                          problem.s, problem.cone, problem.sense, c))
        except (ValueError, VlpError) as exc:
            print(f"vlpsolve: --dualpar: {exc}", file=err)
            return None, EXIT_USAGE
    return problem, None


def _config(args):
    try:
        return SolverConfig(algorithm=args.algorithm, eps=args.eps, max_iterations=args.max_iter)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _progress(err):
    last = [0]

    def report(iteration, unverified, zmax):
        if iteration // 100 > last[0]:
            last[0] = iteration // 100
            print(f"iteration {iteration}: {unverified} unverified, last distance {zmax:.3g}", file=err)
    return report


def _verify(argv, out, err):
    from .verify import check_geometric_duality, check_solution

    args = _parser("vlpsolve verify").parse_args(argv)
    cfg = _config(args)
    problem, code = _load(args, err)
    if problem is None:
        return code
    sol = solve(problem, cfg)
    print(f"status {Status(sol.status).value}", file=out)
    if not sol.converged:
        return EXIT_CODES[sol.status]
    rep = check_solution(problem, sol)
    print(rep, file=out)
    ok = rep.ok
    if sol.dual_inner is not None:
        g = check_geometric_duality(sol.primal_inner.vrep, sol.dual_inner.vrep,
                                    CouplingContext(sol.c, sol.sense))
        print(g, file=out)
        ok = ok and g.ok
    print("verified" if ok else "verification failed", file=out)
    return EXIT_OK if ok else 1


def cli_main(argv=None, out=None, err=None):
    """Entry point of the ``vlpsolve`` command; returns the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        if argv and argv[0] == "verify":
            return _verify(argv[1:], out, err)
        args = _parser("vlpsolve").parse_args(argv)
        cfg = _config(args)
    except _UsageError as exc:
        print(f"vlpsolve: {exc}", file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    problem, code = _load(args, err)
    if problem is None:
        return code
    sol = solve(problem, cfg, progress=None if args.quiet else _progress(err))
    try:
        write_results(sol, args.output_dir, args.format)
    except OSError as exc:
        print(f"vlpsolve: cannot write results: {exc}", file=err)
        return EXIT_NOINPUT
    if not args.quiet:
        msg = f" ({sol.message})" if sol.message else ""
        print(f"{Status(sol.status).value}: {len(sol.vertices)} vertices, "
              f"{len(sol.directions)} directions, {len(sol.dual_vertices)} dual vertices, "
              f"{sol.lp_count} LPs, {sol.elapsed:.3f} s{msg}", file=out)
    return EXIT_CODES[sol.status]


if __name__ == "__main__":
    sys.exit(cli_main())
