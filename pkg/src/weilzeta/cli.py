"""Command-line entry point: `weilzeta <subcommand> ...`.

Output is line-oriented `key: value` text in a fixed order; `--json PATH` writes the
same report as JSON.  Exit codes: 0 pass, 1 check failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path

import mpmath
import numpy as np

from .checks import SUITES, emit_table, run_suite
from .cosets import (genus1_count_bruteforce, genus1_cosets, genus2_cosets, hecke_count_bruteforce,
                     hecke_right_cosets, pair_classes_bruteforce)
from .cyclotomic import format_cyclo
from .discriminant import A2, A2_A2, D2_DIAG, E8, HYPERBOLIC, discriminant_form, read_gram
from .errors import (DegenerateLattice, FormatError, OddDiagonal, OddRank, WeightParityViolation,
                     WeilZetaError, WordSyntaxError)
from .weil import parse_word, weil_of

BUILTIN = {"a2": A2, "a2a2": A2_A2, "d2": D2_DIAG, "e8": E8, "hyperbolic": HYPERBOLIC}
INPUT_ERRORS = (DegenerateLattice, FormatError, OddDiagonal, OddRank, WeightParityViolation,
                WordSyntaxError)
NO_LATTICE = ("cosets", "local-factors", "reproducing", "orthogonality", "integral-rep")


class Report:
    def __init__(self, command: list[str]):
        self.items: list[tuple[str, object]] = [("command", " ".join(command))]
        self.ok = True

    def add(self, key: str, value) -> None:
        self.items.append((key, value))

    def check(self, key: str, passed: bool, **detail) -> None:
        self.ok &= bool(passed)
        self.items.append((key, "PASS" if passed else "FAIL"))
        for k, v in detail.items():
            self.items.append((f"{key}.{k}", v))

    def text(self) -> str:
        return "\n".join(f"{k}: {_fmt(v)}" for k, v in self.items) + "\n"

    def as_json(self) -> str:
        return json.dumps({"items": [[k, _jsonable(v)] for k, v in self.items],
                           "status": "PASS" if self.ok else "FAIL"}, indent=1)


def _fmt(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:.12e},{v.imag:.12e}"
    if isinstance(v, float):
        return f"{v:.12e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def _lattice(spec: str):
    if spec.lower() in BUILTIN:
        return BUILTIN[spec.lower()], f"builtin:{spec.lower()}"
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"lattice {spec!r} is neither a file nor a built-in name")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()[:16]
    return read_gram(path), f"sha256:{digest}"


def _module(args, rep: Report):
    lat, h = _lattice(args.lattice)
    rep.add("input", h)
    return lat, discriminant_form(lat)


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _real_or_complex(z: complex):
    return z if z.imag else z.real


# ---------------------------------------------------------------------------
# subcommands

def cmd_fqm(args, rep: Report) -> None:
    lat, D = _module(args, rep)
    rep.add("rank", lat.rank)
    rep.add("signature", lat.signature)
    rep.add("elementary_divisors", ",".join(map(str, D.elementary_divisors)) or "-")
    rep.add("order", D.order)
    rep.add("level", D.level)
    rep.add("signature_mod_8", D.signature_mod_8)
    rep.add("anisotropic", D.is_anisotropic())
    rep.add("gauss_sum", format_cyclo(D.gauss_sum(1)))


def cmd_weil(args, rep: Report) -> None:
    _, D = _module(args, rep)
    mat = weil_of(D).word(parse_word(args.word, args.genus))
    rep.add("genus", args.genus)
    rep.add("word", args.word)
    rep.add("size", mat.shape[0])
    rep.add("format", "float" if args.float else "exact")
    values = mat.to_complex() if args.float else None
    for r in range(mat.shape[0]):
        for c in range(mat.shape[1]):
            if args.float:
                if abs(values[r, c]) > 1e-15:
                    rep.add(f"entry[{r},{c}]", complex(values[r, c]))
            else:
                x = mat.entry(r, c)
                if not x.is_zero():
                    rep.add(f"entry[{r},{c}]", format_cyclo(x))


def cmd_cosets(args, rep: Report) -> None:
    rep.add("kind", args.kind)
    rep.add("bound", args.bound)
    if args.kind == "hecke":
        reps, brute = hecke_right_cosets(args.bound).representatives, hecke_count_bruteforce(args.bound)
    elif args.kind == "genus1":
        reps, brute = genus1_cosets(args.bound).representatives, genus1_count_bruteforce(args.bound)
    else:
        reps = genus2_cosets(args.bound).representatives
        brute = len(pair_classes_bruteforce(args.bound))
    rep.add("count", len(reps))
    if args.list:
        for i, m in enumerate(reps):
            rep.add(f"rep[{i}]", _mat_text(m))
    rep.check("bruteforce", len(reps) == brute, count=brute)


def _mat_text(m) -> str:
    return "[" + ",".join("[" + ",".join(str(v) for v in row) + "]" for row in m) + "]"


def cmd_series(args, rep: Report) -> None:
    from .series import eisenstein, poincare_plus, pullback_sides, script_P_plus
    _, D = _module(args, rep)
    s = _real_or_complex(args.s)
    for key in ("kind", "l", "s", "tau", "zeta", "height"):
        rep.add(key, getattr(args, key))
    if args.kind == "pullback":
        sides = pullback_sides(D, args.l, s, args.tau, args.zeta, args.dmax, args.height,
                               method="lipschitz" if s == 0 else "direct")
        res = (sides["lhs"] - sides["rhs"]).norm_inf()
        rep.add("dmax", args.dmax)
        rep.add("residual", res)
        rep.add("correction_norm", float(np.max(np.abs(sides["correction"]))))
        return
    if args.kind == "E1":
        v = eisenstein(D, 1, args.l, s, args.tau, args.height, dual=args.dual)
    elif args.kind == "E2":
        v = eisenstein(D, 2, args.l, s, np.diag([args.tau, args.zeta]), args.height,
                       dual=args.dual, method=args.method)
    elif args.kind == "Pplus":
        v = poincare_plus(D, args.l, s, args.tau, args.zeta, args.height)
    else:
        rep.add("d", args.d)
        v = script_P_plus(D, args.l, s, args.tau, args.zeta, args.d, args.height)
    for i, x in enumerate(v.coords):
        rep.add(f"coord[{i}]", complex(x))


def cmd_hecke(args, rep: Report) -> None:
    from .hecke import eigenvalue_with_deviation, read_qexpansion
    f = read_qexpansion(args.form)
    rep.add("input", "sha256:" + hashlib.sha256(Path(args.form).read_bytes()).hexdigest()[:16])
    rep.add("weight", f.weight)
    rep.add("truncation", f.truncation)
    rep.add("d", args.d)
    lam, dev = eigenvalue_with_deviation(f, args.d, tol=args.tolerance)
    rep.add("eigenvalue", lam)
    rep.add("max_relative_deviation", dev)


def cmd_funceq(args, rep: Report) -> None:
    import warnings
    from .zeta import functional_scalar, xi_constant
    _, D = _module(args, rep)
    s = _real_or_complex(args.s)
    rep.add("l", args.l)
    rep.add("s", args.s)
    rep.add("prime_bound", args.prime_bound)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        xi = xi_constant(args.l, 2 * s - 1.5, D, args.prime_bound)
        scalar = functional_scalar(args.l, s, D, args.prime_bound)
    for w in caught:
        rep.add("warning", str(w.message))
    rep.add("xi_at_2s_minus_3/2", xi)
    rep.add("scalar", scalar)


def cmd_zeta(args, rep: Report) -> None:
    from .zeta import EigenvalueSeries, completed_zeta, standard_zeta_with_tail
    eigs = EigenvalueSeries.read(args.eigs)
    _, D = _module(args, rep)
    rep.add("eigs", "sha256:" + hashlib.sha256(Path(args.eigs).read_bytes()).hexdigest()[:16])
    rep.add("d_max", eigs.d_max)
    rep.add("l", args.l)
    rep.add("s", args.s)
    rep.add("reading", args.reading)
    w = 2 * args.s + (args.l if args.reading == "stated" else 2 * args.l - 4)
    z, tail = standard_zeta_with_tail(eigs, w)
    rep.add("argument", w)
    rep.add("partial_sum", z)
    rep.add("tail_bound", tail)
    rep.add("completed", completed_zeta(eigs, args.l, args.s, D, args.reading))


def cmd_verify(args, rep: Report) -> None:
    rep.add("suite", args.suite)
    fqm = None if args.suite in NO_LATTICE else _module(args, rep)[1]
    kw: dict = {}
    if args.suite == "pullback":
        kw = {"l": args.l, "s": args.s.real, "dmax": args.dmax,
              "heights": tuple(range(1, args.height + 1))}
    elif args.suite == "integral-rep":
        kw = {"dmax": args.dmax, "reading": args.reading}
    elif args.suite == "reproducing":
        kw = {"reading": args.reading}
    elif args.suite == "xi":
        kw = {"l": args.l, "s": args.s.real}
    elif args.suite == "hecke":
        kw = {"tolerance": args.tolerance}
    elif args.suite in ("weil", "extended", "local-factors"):
        rep.add("seed", args.seed)
    for key, value in kw.items():
        rep.add(key, value)
    for r in run_suite(args.suite, fqm, seed=args.seed, **kw):
        rep.check(r.name, r.passed, **r.detail)


def cmd_emit(args, rep: Report) -> None:
    fqm = _module(args, rep)[1] if args.lattice else None
    rep.add("table", args.kind)
    s_values = tuple(int(x) for x in args.s_values.split(","))
    for key, value in emit_table(args.kind, fqm, args.p, s_values):
        rep.add(key, value)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weilzeta", description=__doc__.splitlines()[0])
    p.add_argument("--precision", type=int, default=50, help="mpmath working digits")
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for compatibility; evaluation is single-threaded")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized exact checks")
    p.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p.add_argument("--timings", action="store_true",
                   help="append wall-clock time (breaks byte-identical output)")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("fqm", help="discriminant form of a lattice")
    q.add_argument("--lattice", required=True)
    q.set_defaults(func=cmd_fqm)

    q = sub.add_parser("weil", help="exact Weil matrix of a word")
    q.add_argument("action", choices=("matrix",))
    q.add_argument("--lattice", required=True)
    q.add_argument("--genus", type=int, choices=(1, 2), default=1)
    q.add_argument("--word", required=True)
    q.add_argument("--float", action="store_true", help="complex floats instead of exact entries")
    q.set_defaults(func=cmd_weil)

    q = sub.add_parser("cosets", help="coset representatives and counts")
    q.add_argument("--kind", choices=("hecke", "genus1", "genus2"), default="hecke")
    q.add_argument("--bound", type=int, default=2, help="d for hecke, height otherwise")
    q.add_argument("--list", action="store_true", help="print the representatives")
    q.set_defaults(func=cmd_cosets)

    q = sub.add_parser("series", help="truncated Eisenstein and Poincare series")
    q.add_argument("action", choices=("eval",))
    q.add_argument("--kind", choices=("E1", "E2", "Pplus", "scriptP", "pullback"), required=True)
    q.add_argument("--lattice", required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--s", type=_complex, default=complex(0))
    q.add_argument("--tau", type=_complex, default=complex(0, 1.5))
    q.add_argument("--zeta", type=_complex, default=complex(0, 1.5))
    q.add_argument("--height", type=int, default=2)
    q.add_argument("--method", choices=("box", "structured"), default="box")
    q.add_argument("--dual", action="store_true")
    q.add_argument("--d", type=int, default=1)
    q.add_argument("--dmax", type=int, default=8)
    q.set_defaults(func=cmd_series)

    q = sub.add_parser("hecke", help="Hecke eigenvalue of a q-expansion")
    q.add_argument("action", choices=("eigen",))
    q.add_argument("--form", required=True)
    q.add_argument("--d", type=int, required=True)
    q.set_defaults(func=cmd_hecke)

    q = sub.add_parser("funceq", help="functional-equation scalar")
    q.add_argument("action", choices=("scalar",))
    q.add_argument("--lattice", required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--s", type=_complex, required=True)
    q.add_argument("--prime-bound", dest="prime_bound", type=int, default=1000)
    q.set_defaults(func=cmd_funceq)

    q = sub.add_parser("zeta", help="completed standard zeta function from eigenvalues")
    q.add_argument("--eigs", required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--s", type=_complex, required=True)
    q.add_argument("--lattice", default="e8")
    q.add_argument("--reading", choices=("stated", "classical"), default="stated")
    q.set_defaults(func=cmd_zeta)

    q = sub.add_parser("verify", help="run a verification suite")
    q.add_argument("suite", choices=SUITES)
    q.add_argument("--lattice", default="e8")
    q.add_argument("--l", type=int, default=12)
    q.add_argument("--s", type=_complex, default=complex(0))
    q.add_argument("--dmax", type=int, default=8)
    q.add_argument("--height", type=int, default=3, help="pullback: refine heights 1..H")
    q.add_argument("--reading", choices=("stated", "classical"), default="stated")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("emit", help="stable text tables")
    q.add_argument("kind", choices=("local-factors", "gauss-sums", "coset-counts"))
    q.add_argument("--lattice", default=None)
    q.add_argument("--p", type=int, default=3)
    q.add_argument("--s-values", dest="s_values", default="1,2,3")
    q.set_defaults(func=cmd_emit)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    mpmath.mp.dps = args.precision
    random.seed(args.seed)
    np.random.seed(args.seed)
    rep = Report(["weilzeta"] + argv)
    start = time.perf_counter()
    try:
        args.func(args, rep)
    except (FileNotFoundError, argparse.ArgumentTypeError, *INPUT_ERRORS) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except WeilZetaError as exc:
        rep.check("error", False, type=type(exc).__name__, message=str(exc))
    if args.timings:
        rep.add("wall_seconds", f"{time.perf_counter() - start:.3f}")
    rep.add("status", "PASS" if rep.ok else "FAIL")
    sys.stdout.write(rep.text())
    if args.json:
        Path(args.json).write_text(rep.as_json() + "\n")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
