"""Command-line interface.

Every command takes the Hamiltonian as its first argument, e.g.::

    qperiods trace "1/2*p1^2 + x1^2 + x1^3" --k 4
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import ParseError, QPeriodsError, SingularHypersurface, UnsupportedCase
from .forms import RationalForm
from .groebner import MonomialOrder
from .hypersurface import Hypersurface
from .matrix_rep import engine_for
from .parse import parse_hamiltonian, parse_homogeneous
from .poly import MultiPoly
from .reduction import picard_fuchs, reducer_for
from .trace_series import (
    TraceSeries,
    quantization_transform_check,
    resolvent_symbol_check,
)
from .weyl import WeylElement

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3
EXIT_PARSE = 4
EXIT_UNSUPPORTED = 5


def _hypersurface(args) -> tuple:
    H = parse_hamiltonian(args.hamiltonian, args.n)
    nvars = H.nvars + 1
    order = MonomialOrder(nvars, args.order)
    return H, Hypersurface.from_hamiltonian(H, order)


def _mono_str(names, e) -> str:
    return "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a) or "1"


def _emit(args, text_lines: list[str], payload: dict):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _decomposition_payload(dec) -> list[dict]:
    return [
        {"class": lab, "coefficient": str(c)}
        for lab, c in zip(dec.labels(), dec.vector())
    ]


def cmd_homogenize(args) -> int:
    _, X = _hypersurface(args)
    _emit(args, [f"f = {X.f}", f"D = {X.D}"], {"f": str(X.f), "D": X.D, "n": X.n})
    return EXIT_OK


def cmd_basis(args) -> int:
    _, X = _hypersurface(args)
    X.require_smooth()
    names = X.f.names
    monos = [_mono_str(names, e) for e in X.basis.monomials]
    coh = [f"{_mono_str(names, e)}*Omega/f^{m}" for m, e in X.cohomology_basis]
    lines = [f"d = {X.d}", "basis: " + ", ".join(monos), "cohomology: " + ", ".join(coh)]
    _emit(args, lines, {"d": X.d, "basis": monos, "cohomology": coh})
    return EXIT_OK


def _parse_form(X: Hypersurface, specs: list[str]) -> RationalForm:
    pieces: dict = {}
    for spec in specs:
        if ":" not in spec:
            raise ParseError("form pieces are written 'm:numerator'", 0)
        m_text, num = spec.split(":", 1)
        try:
            m = int(m_text)
        except ValueError:
            raise ParseError(f"pole order {m_text!r} is not an integer", 0) from None
        q = parse_homogeneous(num, X.N)
        pieces[m] = pieces[m] + q if m in pieces else q
    return RationalForm(X, pieces)


def cmd_reduce(args) -> int:
    _, X = _hypersurface(args)
    X.require_smooth()
    dec = reducer_for(X).reduce(_parse_form(X, args.form))
    rows = _decomposition_payload(dec)
    _emit(args, [f"{r['class']}: {r['coefficient']}" for r in rows], {"decomposition": rows})
    return EXIT_OK


def cmd_picard_fuchs(args) -> int:
    _, X = _hypersurface(args)
    X.require_smooth()
    if args.form:
        a = _parse_form(X, args.form)
    else:
        basis = X.cohomology_basis
        if not 1 <= args.index <= len(basis):
            print(f"error: --index must be between 1 and {len(basis)}", file=sys.stderr)
            return EXIT_USAGE
        m, e = basis[args.index - 1]
        a = RationalForm.omega_over_f(X, MultiPoly.monomial(e, 1, X.f.names), m)
    ode = picard_fuchs(a, args.rho_max)
    coeffs = [str(c) for c in ode.highest_first()]
    _emit(
        args,
        [f"order = {ode.order}", "coefficients (highest derivative first): " + ", ".join(coeffs), f"ode: {ode} = 0"],
        {"order": ode.order, "coefficients_highest_first": coeffs},
    )
    return EXIT_OK


def _parse_weyl(text: str, X: Hypersurface, T: TraceSeries) -> WeylElement:
    """Products of z<i>, d<i> (optionally ^k) and g<k>, e.g. 'z1*d2^2' or 'g1*g2'."""
    out = WeylElement.one(X.N, X.D)
    pos = 0
    for factor in text.replace(" ", "").split("*"):
        if not factor:
            raise ParseError("empty factor", pos)
        base, _, power = factor.partition("^")
        k = 1
        if power:
            if not power.isdigit():
                raise ParseError(f"bad exponent {power!r}", pos + len(base) + 1)
            k = int(power)
        kind, idx = base[:1], base[1:]
        if kind not in "zdg" or not idx.isdigit():
            raise ParseError(f"unknown factor {base!r}", pos)
        i = int(idx)
        if kind == "g":
            if not 1 <= i <= X.D:
                raise ParseError(f"g{i} is not defined (1 <= k <= {X.D})", pos)
            w = T.ghat(i) ** k
        else:
            if i >= X.N:
                raise ParseError(f"variable index {i} out of range", pos)
            w = WeylElement.z(X.N, X.D, i, k) if kind == "z" else WeylElement.d(X.N, X.D, i, k)
        out = out * w
        pos += len(factor) + 1
    return out


def cmd_sigma(args) -> int:
    H, X = _hypersurface(args)
    X.require_smooth()
    T = TraceSeries(H, X)
    w = _parse_weyl(args.element, X, T)
    fam = engine_for(X).sigma(w)
    text = fam.dumps()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output} ({len(fam.offsets())} offsets)")
    else:
        print(text)
    return EXIT_OK


def cmd_trace(args) -> int:
    H, X = _hypersurface(args)
    X.require_smooth()
    T = TraceSeries(H, X)
    rows = []
    labels = None
    for k in range(args.start, args.k + 1):
        c = T.trace_coefficient(k)
        labels = c.decomposition.labels()
        phase = "" if not c.ipow else "i*"
        rows.append({"k": k, "phase": phase or "1", "coefficients": [str(v) for v in c.vector()]})
    lines = [f"# [hbar^k] of {T.prefactor_text()} on: " + ", ".join(labels or [])]
    for r in rows:
        pre = "" if r["phase"] == "1" else "i * "
        lines.append(f"k={r['k']}: {pre}(" + ", ".join(r["coefficients"]) + ")")
    _emit(args, lines, {"prefactor": T.prefactor_text(), "classes": labels, "rows": rows})
    return EXIT_OK


def cmd_wkb_check(args) -> int:
    from .wkb_oracle import oracle_coefficient, potential_of

    H, X = _hypersurface(args)
    X.require_smooth()
    try:
        V = potential_of(H)
    except ValueError as exc:
        raise UnsupportedCase(str(exc)) from None
    T = TraceSeries(H, X)
    ok = True
    lines = []
    rows = []
    for k in range(args.k + 1):
        c = T.trace_coefficient(k)
        o = oracle_coefficient(V, k, X)
        agree = c.ipow == 0 and c.decomposition == o
        ok &= agree
        tv = [str(v) for v in c.vector()]
        ov = [str(v) for v in o.vector()]
        lines.append(f"k={k}: trace=({', '.join(tv)}) wkb=({', '.join(ov)}) {'agree' if agree else 'DIFFER'}")
        rows.append({"k": k, "trace": tv, "wkb": ov, "agree": agree})
    _emit(args, lines, {"rows": rows, "agree": ok})
    return EXIT_OK if ok else EXIT_FAILED_CHECK


def cmd_star_check(args) -> int:
    H = parse_hamiltonian(args.hamiltonian, args.n)
    res = resolvent_symbol_check(H, args.k)
    lines = [f"resolvent R*(H-E) = 1 + O(hbar^{args.k + 1}): {'pass' if res else 'FAIL'}"]
    payload = {"resolvent": res}
    ok = res
    try:
        q = quantization_transform_check(H, Fraction(args.s), args.k)
        lines.append(f"quantization s={args.s}, K={args.k}: {'pass' if q else 'FAIL'}")
        payload["quantization"] = q
        ok &= q
    except ValueError as exc:
        lines.append(f"quantization check skipped: {exc}")
        payload["quantization"] = None
    _emit(args, lines, payload)
    return EXIT_OK if ok else EXIT_FAILED_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qperiods", description="Exact quantum periods via Griffiths-Dwork reduction.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("hamiltonian", help="polynomial in x1..xn, p1..pn with rational coefficients")
        sp.add_argument("--n", type=int, default=None, help="number of degrees of freedom (default: inferred)")
        sp.add_argument("--order", choices=["grevlex", "glex"], default="grevlex")
        sp.add_argument("--format", choices=["text", "json"], default="text")
        return sp

    common(sub.add_parser("homogenize", help="print the projective hypersurface f")).set_defaults(func=cmd_homogenize)
    common(sub.add_parser("basis", help="quotient basis and cohomology basis")).set_defaults(func=cmd_basis)

    sp = common(sub.add_parser("reduce", help="normal form of a rational form"))
    sp.add_argument("--form", action="append", required=True, help="piece 'm:numerator' (repeatable)")
    sp.set_defaults(func=cmd_reduce)

    sp = common(sub.add_parser("picard-fuchs", help="Picard-Fuchs equation"))
    sp.add_argument("--index", type=int, default=1, help="1-based cohomology basis element")
    sp.add_argument("--form", action="append", help="piece 'm:numerator' instead of --index")
    sp.add_argument("--rho-max", type=int, default=None)
    sp.set_defaults(func=cmd_picard_fuchs)

    sp = common(sub.add_parser("sigma", help="matrix family of a Weyl element as JSON"))
    sp.add_argument("--element", default="g1", help="e.g. g1, z0, d1^2, z1*d2")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_sigma)

    sp = common(sub.add_parser("trace", help="hbar-expansion coefficients up to order K"))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--start", type=int, default=0, help="first order to compute")
    sp.set_defaults(func=cmd_trace)

    sp = common(sub.add_parser("wkb-check", help="compare against the WKB recursion"))
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_wkb_check)

    sp = common(sub.add_parser("star-check", help="resolvent and quantization checks"))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", default="1/2", help="quantization parameter (rational)")
    sp.set_defaults(func=cmd_star_check)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SingularHypersurface as exc:
        print(f"singular hypersurface: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except UnsupportedCase as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except QPeriodsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED_CHECK


if __name__ == "__main__":
    sys.exit(main())
