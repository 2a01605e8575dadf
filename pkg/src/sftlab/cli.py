"""The ``sftlab`` command line.

Every subcommand prints a line-oriented ``key: value`` report.  Exit codes:
0 when a verdict was computed (negative verdicts included), 2 on input
errors, 3 when a budget or bound ran out before a verdict was reached.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from importlib import resources
from pathlib import Path

from . import gridengine, lift, oracle, zengine
from .groups import (
    AllNonIdentity,
    ComplementOfSubgroup,
    ExplicitList,
    FamilyMismatch,
    GroupError,
    GroupRef,
    INT_LATTICE,
    INT_LINE,
    MULTIPLES,
    OddMultiples,
    RAT_LATTICE,
    SpectrumComplement,
    descriptor_token,
    make_group,
    parse_grp,
    parse_grp_subgroup,
    subgroup,
)
from .sft import EmptySft, SftSpec, SpecError, check_config, parse_spec
from .zengine import PeriodSpectrum, parse_spectrum, serialize_spectrum

__all__ = ["main", "dispatch", "serialize_spectrum", "parse_spectrum"]

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 2, 3
DEFAULT_MAX_DENOMINATOR = 10**6


class InputError(Exception):
    pass


class Exhausted(Exception):
    pass


class Report:
    def __init__(self, argv):
        self.lines = ["command: " + " ".join(argv)]
        self.exit = EXIT_OK

    def add(self, key: str, value="") -> None:
        self.lines.append(f"{key}: {value}".rstrip())

    def digest(self, path: str, data: bytes) -> None:
        self.add(f"input {path}", "sha256=" + hashlib.sha256(data).hexdigest()[:16])

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


# ---------------------------------------------------------------------------
# input helpers


def corpus_dir() -> Path:
    return Path(str(resources.files("sftlab") / "corpus"))


def _read(report: Report, path: str) -> str:
    if path.startswith("corpus:"):
        name = path.split(":", 1)[1]
        hits = sorted(p for p in corpus_dir().glob("*/*") if name in (p.stem, p.name))
        if not hits:
            raise InputError(f"no corpus file named {name!r}")
        p = hits[0]
    else:
        p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    report.digest(path, data)
    return data.decode("utf-8")


def _group(report: Report, token: str) -> tuple[GroupRef, tuple | None]:
    """A group from a family token (Z, Z2, Q2) or a .grp file."""
    if Path(token).is_file() or token.startswith("corpus:"):
        text = _read(report, token)
        return parse_grp(text), parse_grp_subgroup(text)
    return make_group(token), None


def _subgroup(G: GroupRef, token, from_file):
    if token is None and from_file is not None:
        return subgroup(G, from_file)
    return subgroup(G, token)


def _spec(report: Report, path: str) -> SftSpec:
    return parse_spec(_read(report, path))


def _z2_spec(report: Report, args) -> SftSpec:
    if getattr(args, "tiles", None):
        return gridengine.wang_to_spec(gridengine.parse_wang(_read(report, args.tiles)))
    if getattr(args, "spec", None):
        return _spec(report, args.spec)
    raise InputError("give --tiles or --spec")


def parse_freepart(report: Report, G: GroupRef, H, token: str):
    kind, _, arg = token.partition(":")
    if kind == "all-nonzero":
        return AllNonIdentity()
    if kind == "none":
        return ExplicitList(())
    if kind == "odd-multiples":
        return OddMultiples(G.parse_element(arg))
    if kind == "list":
        if not arg.strip():
            return ExplicitList(())
        vector = G.family in (INT_LATTICE, RAT_LATTICE)
        parts = arg.split(";") if vector or ";" in arg else arg.split(",")
        return ExplicitList(G.parse_element(p) for p in parts)
    if kind == "complement":
        return ComplementOfSubgroup(subgroup(G, arg))
    if kind == "spectrum":
        spectrum = parse_spectrum(_read(report, arg))
        if G.family != INT_LINE:
            raise InputError("spectrum free parts live on Z")
        m = H.modulus if H.kind == MULTIPLES else 1
        return SpectrumComplement(spectrum, m)
    raise InputError(f"unknown free-part descriptor {token!r}")


def _describe_spectrum(s: PeriodSpectrum) -> str:
    return f"D={s.modulus} S={','.join(str(r) for r in sorted(s.residues))} T={s.threshold}"


def _witness(c) -> str:
    return f"p={c.p} word={c.text()}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_z_empty(args, r: Report):
    e = zengine.is_empty(_spec(r, args.spec))
    r.add("verdict", "Empty" if e.empty else "Nonempty")
    if e.witness is not None:
        r.add("witness", _witness(e.witness))


def cmd_z_period(args, r: Report):
    if args.k == 0:
        raise InputError("k must be nonzero")
    ok = zengine.has_period(_spec(r, args.spec), args.k)
    r.add("period", args.k)
    r.add("verdict", "true" if ok else "false")


def cmd_z_spectrum(args, r: Report):
    g = zengine.build_graph(_spec(r, args.spec))
    s = zengine.period_spectrum(g)
    r.add("spectrum", _describe_spectrum(s))
    r.add("exceptions", " ".join(str(k) for k in sorted(s.members)))
    if args.sweep:
        bad = [k for k in range(1, args.sweep + 1) if zengine.has_period(g, k) != s.contains(k)]
        r.add("sweep", f"k<={args.sweep} " + ("agree" if not bad else f"disagree at {bad[0]}"))
        if bad:
            r.exit = 1
    if args.write:
        Path(args.write).write_text(serialize_spectrum(s))
        r.add("written", args.write)


def cmd_z_free(args, r: Report):
    spec = _spec(r, args.spec)
    desc = zengine.free_part_z(spec)
    simple = zengine.simplify_free_part(desc)
    if isinstance(simple, SpectrumComplement):
        token = "spectrum-complement"
    elif isinstance(simple, ExplicitList) and not simple.elements:
        token = "none"
    else:
        token = descriptor_token(make_group("Z"), simple)
    r.add("free", token)
    r.add("spectrum", _describe_spectrum(desc.spectrum))


def cmd_z_witness(args, r: Report):
    spec = _spec(r, args.spec)
    w = zengine.no_sa_witness(spec)
    r.add("witness", _witness(w))
    r.add("check", "valid" if check_config(spec, w).valid else "INVALID")


def _render_torus(c) -> str:
    return " / ".join(" ".join(row) for row in c.cells)


def cmd_grid_torus(args, r: Report):
    sol = gridengine.torus_solutions(_z2_spec(r, args), args.p, args.q)
    r.add("torus", f"{args.p}x{args.q}")
    r.add("verdict", "found" if sol else "none")
    if sol:
        r.add("witness", _render_torus(sol))


def cmd_grid_search(args, r: Report):
    rep = gridengine.search_periodic(_z2_spec(r, args), args.bound)
    for ln in rep.lines():
        key, _, val = ln.partition(": ")
        r.add(key, val)
    if rep.assignment:
        r.add("witness", _render_torus(rep.assignment))


def cmd_grid_render(args, r: Report):
    spec = _z2_spec(r, args)
    if args.p and args.q:
        sol = gridengine.torus_solutions(spec, args.p, args.q)
    else:
        sol = gridengine.search_periodic(spec, args.bound).assignment
    if sol is None:
        r.add("verdict", "no periodic point to render")
        return None
    return gridengine.render(sol, args.format, alphabet=spec.alphabet)


def cmd_render(args, r: Report):
    rows = [ln.split() for ln in _read(r, args.cells).splitlines()
            if ln.strip() and not ln.startswith("#")]
    if not rows or len({len(x) for x in rows}) != 1:
        raise InputError("cells file must hold equal-length rows of symbols")
    return gridengine.render(rows, args.format)


def _element(G, text, args):
    try:
        return G.parse_element(text, max_denominator=args.max_denominator)
    except GroupError as exc:
        raise InputError(str(exc)) from None


def _freepart(args, r, G, H):
    if args.spec:
        return lift.free_part_on_subgroup(G, H, _spec(r, args.spec))
    return parse_freepart(r, G, H, args.freepart)


def cmd_lift_free(args, r: Report):
    G, sub = _group(r, args.group)
    H = _subgroup(G, args.subgroup, sub)
    M = _freepart(args, r, G, H)
    g = _element(G, args.element, args)
    v = lift.transfer_free(G, H, M, g, n_bound=args.bound)
    r.add("group", f"{G} subgroup {H}")
    r.add("freepart", descriptor_token(G, M) if not isinstance(M, SpectrumComplement)
          else "spectrum")
    r.add("element", G.format_element(g))
    r.add("verdict", v.answer.value)
    if v.is_free:
        r.add("conjugator", G.format_element(v.conjugator))
        r.add("exponent", v.exponent)
        r.add("hit", G.format_element(v.hit))
    r.add("reason", v.reason)
    if v.answer is lift.Verdict.UNKNOWN:
        r.exit = EXIT_UNKNOWN


def cmd_lift_construct(args, r: Report):
    spec = _spec(r, args.spec)
    if args.group:
        G, sub = _group(r, args.group)
        H = _subgroup(G, args.subgroup, sub)
    else:
        G = make_group("Z")
        H = subgroup(G, args.m)
    g = _element(G, args.g, args)
    con = lift.construct_fixed(spec, G, H, g, window=(-args.window, args.window))
    dec = con.decomposition
    r.add("group", f"{G} subgroup {H}")
    r.add("element", G.format_element(g))
    r.add("verdict", "constructed")
    for j in dec.reps if dec.indices is not None else sorted(con.chosen):
        size = dec.locate(j)[2]
        y = con.chosen[j]
        shown = " ".join(y) if isinstance(y, tuple) else y.text()
        r.add(f"orbit {_fmt_index(G, j)}", f"size={size if size else 'infinite'} y={shown}")
    if G.is_finite:
        r.add("x", " ".join(con.x))
    else:
        r.add("window", f"[{-args.window}..{args.window}]")
        r.add("x", con.x.text())
    r.add("check", "g x = x and every coset restriction is in Y")


def _fmt_index(G, j):
    if isinstance(j, tuple):
        return ",".join(str(c) for c in j)
    return G.format_element(j) if G.is_finite else str(j)


def cmd_lift_certify(args, r: Report):
    G, sub = _group(r, args.group)
    H = _subgroup(G, args.subgroup, sub)
    M = _freepart(args, r, G, H)
    samples = None if G.is_finite else lift.default_samples(G, args.seed, args.samples)
    rep = lift.certify_sa(G, H, M, samples=samples, seed=args.seed)
    r.add("group", f"{G} subgroup {H}")
    for ln in rep.lines(G):
        key, _, val = ln.partition(": ")
        r.add(key, val)
    if rep.verdict == "unknown":
        r.exit = EXIT_UNKNOWN


def _finite_inputs(args, r):
    G, sub = _group(r, args.group)
    if not G.is_finite:
        raise InputError("the oracle needs a finite group (.grp file)")
    return G, sub, _spec(r, args.spec)


def cmd_oracle_enumerate(args, r: Report):
    G, _, spec = _finite_inputs(args, r)
    U = oracle.enumerate_universe(G, spec, args.budget)
    r.add("configurations", len(U))
    for x, stab in zip(U.configs, U.stabilizers):
        r.add("x", " ".join(x) + " | stab " + " ".join(G.names[s] for s in sorted(stab)))
    if U.configs:
        r.add("free", " ".join(G.names[g] for g in sorted(oracle.free_part_finite(U))))
    else:
        r.add("free", "undefined (empty SFT)")


def cmd_oracle_prop2(args, r: Report):
    G, sub, spec = _finite_inputs(args, r)
    H = _subgroup(G, args.subgroup, sub)
    res = oracle.check_prop2(G, H, spec, args.budget)
    r.add("verdict", {"agree": "Agree", "disagree": "Disagree", "skipped": "Skipped"}[res.status])
    if res.status != "skipped":
        r.add("free", " ".join(G.names[g] for g in sorted(res.lhs)))
        r.add("roots", " ".join(G.names[g] for g in sorted(res.rhs)))
    if res.reason:
        r.add("reason", res.reason)
    if res.status == "disagree":
        r.exit = 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampling (default 0)")
    common.add_argument("--no-timing", action="store_true", help="omit the timing line")
    common.add_argument("--out", help="write the report or render here instead of stdout")

    parser = argparse.ArgumentParser(prog="sftlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("z-empty", cmd_z_empty, "emptiness of a Z-SFT, with a periodic witness")
    p.add_argument("--spec", required=True)
    p = add("z-period", cmd_z_period, "does some point have period k")
    p.add_argument("--spec", required=True)
    p.add_argument("k", type=int)
    p = add("z-spectrum", cmd_z_spectrum, "exact period spectrum")
    p.add_argument("--spec", required=True)
    p.add_argument("--sweep", type=int, default=0, help="cross-check has_period for k <= K")
    p.add_argument("--write", help="save the serialized spectrum to this file")
    p = add("z-free", cmd_z_free, "free part of a Z-SFT")
    p.add_argument("--spec", required=True)
    p = add("z-witness", cmd_z_witness, "periodic point showing the SFT is not SA")
    p.add_argument("--spec", required=True)

    for name, func, help_ in (("grid-torus", cmd_grid_torus, "least (p,q)-periodic point"),
                              ("grid-search", cmd_grid_search, "scan tori up to a bound"),
                              ("grid-render", cmd_grid_render, "render a periodic point")):
        p = add(name, func, help_)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--tiles", help=".wang tile file")
        src.add_argument("--spec", help=".sft file on Z2")
        if name == "grid-torus":
            p.add_argument("p", type=int)
            p.add_argument("q", type=int)
        elif name == "grid-search":
            p.add_argument("--bound", type=int, required=True)
        else:
            p.add_argument("p", type=int, nargs="?")
            p.add_argument("q", type=int, nargs="?")
            p.add_argument("--bound", type=int, default=6)
            p.add_argument("--format", choices=["ascii", "ppm"], default="ascii")
    p = add("render", cmd_render, "render a rows-of-symbols file")
    p.add_argument("--cells", required=True)
    p.add_argument("--format", choices=["ascii", "ppm"], default="ascii")

    for name, func, help_ in (("lift-free", cmd_lift_free, "is g in Free(X)"),
                              ("lift-certify", cmd_lift_certify, "is X strongly aperiodic")):
        p = add(name, func, help_)
        p.add_argument("--group", required=True, help="Z, Zd, Qd or a .grp file")
        p.add_argument("--subgroup", help="mZ, Zd, or element indices (default: Z^d in Q^d, else G)")
        fp = p.add_mutually_exclusive_group()
        fp.add_argument("--freepart", default="all-nonzero",
                        help="all-nonzero | odd-multiples:h0 | list:e1,e2 | spectrum:FILE "
                             "| complement:H | none")
        fp.add_argument("--spec", help="compute Free(Y) from this spec on H")
        p.add_argument("--max-denominator", type=int, default=DEFAULT_MAX_DENOMINATOR)
        if name == "lift-free":
            p.add_argument("--element", required=True)
            p.add_argument("--bound", type=int, default=10**6)
        else:
            p.add_argument("--samples", type=int, default=64)
    p = add("lift-construct", cmd_lift_construct, "build a point fixed by g")
    p.add_argument("--spec", required=True, help="spec on H (H's own coordinate for mZ)")
    p.add_argument("--g", required=True)
    p.add_argument("--m", type=int, default=1, help="H = mZ inside Z")
    p.add_argument("--window", type=int, default=20, help="construct on [-W..W]")
    p.add_argument("--group", help="finite .grp file instead of Z")
    p.add_argument("--subgroup")
    p.add_argument("--max-denominator", type=int, default=DEFAULT_MAX_DENOMINATOR)

    p = add("oracle-enumerate", cmd_oracle_enumerate, "all configurations on a finite group")
    p.add_argument("--group", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    p = add("oracle-prop2", cmd_oracle_prop2, "brute-force check of the free-part transfer")
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup")
    p.add_argument("--spec", required=True)
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    return parser


def dispatch(argv: list[str], stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = Report(["sftlab"] + list(argv))
    start = time.perf_counter()
    payload = None
    try:
        payload = args.func(args, report)
    except (InputError, SpecError, GroupError, FamilyMismatch, zengine.SpectrumParseError,
            EmptySft, lift.HypothesisViolated, ValueError) as exc:
        report.add("error", str(exc))
        report.exit = EXIT_INPUT
    except (oracle.BudgetExceeded, lift.NoFixedPointFound) as exc:
        report.add("verdict", "Unknown")
        report.add("error", str(exc))
        report.exit = EXIT_UNKNOWN
    if payload is None and not args.no_timing:
        report.add("timing", f"{time.perf_counter() - start:.4f}s")

    data = payload if payload is not None else report.text().encode()
    if args.out and report.exit in (EXIT_OK, EXIT_UNKNOWN, 1):
        Path(args.out).write_bytes(data)
    elif hasattr(stdout, "buffer"):
        stdout.flush()
        stdout.buffer.write(data)
        stdout.flush()
    else:
        stdout.write(data.decode())
    return report.exit


def main(argv=None) -> None:
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
