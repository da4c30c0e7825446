"""Command-line interface: ``cayley-billiards <command> [options]``.

Commands are ``check-cayley``, ``solve-caustics``, ``simulate``,
``rotation-number`` and ``sweep``.  Options come from flags or from a JSON
file given with ``--config``; explicit flags override the file.

Exit codes: 0 success or periodic, 1 negative verdict, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Sequence

from . import closedform as cf
from .cayley import cayley_condition
from .confocal import (
    PLANAR_TYPES,
    SPATIAL_TYPES,
    CausticError,
    Ellipsoid,
    MergedSpectrum,
    existence_check,
    format_number,
    normalize_numbers,
    parse_number,
    type_from_label,
)
from .polyform import (
    NoConvergence,
    SpuriousRoot,
    certificate_from_matrix,
    signatures,
    solve_signature,
    verify_certificate,
)
from .simulator import (
    LaunchFailure,
    caustic_drift,
    export_csv,
    export_svg,
    launch_tangent,
    simulate,
    winding_numbers,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2
COMMANDS = ("check-cayley", "solve-caustics", "simulate", "rotation-number", "sweep")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a command needs.  Numbers are kept as their literal strings.

    ``b_grid`` / ``c_grid`` / ``a_grid`` are ``"lo:hi:count"`` strings.
    """

    command: str
    axes: str | None = None
    caustics: str | None = None
    m: int | None = None
    n: int | None = None
    type: str | None = None
    tau: str | None = None
    tol: float = 1e-9
    closure_tol: float = 1e-8
    max_bounces: int = 1000
    seed: int = 0
    csv: str | None = None
    svg: str | None = None
    out: str | None = None
    a: str | None = None
    a_grid: str | None = None
    b_grid: str | None = None
    c_grid: str | None = None
    planar: bool = False
    jobs: int = 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown config keys: {sorted(extra)}")
        for key in ("axes", "caustics", "tau", "a"):
            if isinstance(data.get(key), list):
                data[key] = ",".join(str(v) for v in data[key])
        return cls(**data)

    # ---- literal handling
    def _literals(self) -> list[str]:
        out = []
        for key in ("axes", "caustics", "a"):
            v = getattr(self, key)
            if v:
                out += [t for t in str(v).split(",") if t.strip()]
        for key in ("a_grid", "b_grid", "c_grid"):
            v = getattr(self, key)
            if v:
                out += str(v).split(":")[:2]
        return out

    @property
    def mode(self) -> str:
        """``"exact"`` unless a decimal literal appears; mixing is a usage error."""
        lits = [t.strip() for t in self._literals()]
        has_frac = any("/" in t for t in lits)
        has_dec = any(isinstance(_number(t), float) for t in lits)
        if has_frac and has_dec:
            raise UsageError("mixed exact (p/q) and decimal literals")
        return "float" if has_dec else "exact"

    def numbers(self, text: str) -> list:
        vals = [_number(t) for t in text.split(",") if t.strip()]
        if self.mode == "float":
            return [float(v) for v in vals]
        return normalize_numbers(vals)


def _number(text: str):
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad number {text!r}") from exc


def _ellipsoid(cfg: RunConfig) -> Ellipsoid:
    if not cfg.axes:
        raise UsageError("--axes is required")
    vals = sorted(cfg.numbers(cfg.axes))
    try:
        e = Ellipsoid(vals)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.n is not None and cfg.n != e.n:
        raise UsageError(f"--n {cfg.n} does not match {e.n} axes")
    return e


def _tau(cfg: RunConfig):
    if cfg.tau is None:
        return None
    try:
        return tuple(int(t) for t in str(cfg.tau).split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"bad signature {cfg.tau!r}") from exc


def _type_vector(cfg: RunConfig, n: int) -> tuple:
    if not cfg.type:
        raise UsageError("--type is required")
    try:
        return type_from_label(cfg.type, n)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc


def _fmt_list(vals) -> str:
    return ", ".join(format_number(v) for v in vals)


# ---------------------------------------------------------------- check-cayley
def cmd_check_cayley(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    e = _ellipsoid(cfg)
    if not cfg.caustics or cfg.m is None:
        raise UsageError("check-cayley needs --axes, --caustics and --m")
    lams = cfg.numbers(cfg.caustics)
    if cfg.m < e.n:
        raise UsageError("m must be at least n")
    try:
        cs = existence_check(e, lams)
    except CausticError as exc:
        print(f"existence: rejected ({exc})", file=out)
        return EXIT_NEGATIVE
    print(f"existence: ok, caustic type {cs.label}", file=out)
    spec = MergedSpectrum.from_caustics(e, cs)
    verdict = cayley_condition(spec, cfg.m, tol=cfg.tol)
    mode = "exact" if verdict.exact else "float"
    print(f"matrix form ({mode}): rank {verdict.rank} of {verdict.full_rank} -> "
          f"{'periodic' if verdict.holds else 'not periodic'}", file=out)
    if verdict.holds:
        cert = certificate_from_matrix(spec, cfg.m)
        chk = verify_certificate(spec, cert, tol=cfg.tol)
        print(f"certificate form ({mode}): S = {str(cert.S)}", file=out)
        print(f"                          P = {str(cert.P)}", file=out)
        print(f"certificate identity: {'holds' if chk.ok else 'fails'} (residual {chk.relative:.3g})",
              file=out)
        if not chk.ok:
            return EXIT_NEGATIVE
    print(f"verdict: {'periodic' if verdict.holds else 'not periodic'} with elliptic period {cfg.m}",
          file=out)
    return EXIT_OK if verdict.holds else EXIT_NEGATIVE


# ---------------------------------------------------------------- solve-caustics
@dataclass
class Solved:
    ellipsoid: Ellipsoid
    caustics: object
    m: int
    tau: tuple | None
    certificate: object
    route: str
    extra: dict


def solve_caustics(cfg: RunConfig) -> Solved:
    """Route to a closed form when one exists, else to the signature solver."""
    e = _ellipsoid(cfg)
    n = e.n
    if cfg.m is None:
        raise UsageError("--m is required")
    m = cfg.m
    if m < n:
        raise UsageError("m must be at least n")
    tv = _type_vector(cfg, n)
    tau = _tau(cfg)
    label = cfg.type.strip().upper()
    if tau is not None and tau not in signatures(m, n):
        raise UsageError(f"signature {tau} is not valid for m={m}, n={n}")
    ax = list(e.axes)

    if n == 2:
        rows = [r for r in cf.PLANAR_TABLE if r.m == m and r.caustic_type == label
                and (tau is None or r.tau == tau)]
        if len(rows) > 1:
            raise UsageError(f"m={m}, type {label} needs --tau")
        if rows:
            res = cf.planar_table(ax[1], ax[0], m, label, rows[0].tau)
            fe = e if isinstance(res.lam, Fraction) and e.exact else Ellipsoid([float(v) for v in ax])
            lam = res.lam if fe.exact else float(res.lam)
            cs = existence_check(fe, [lam])
            spec = MergedSpectrum.from_caustics(fe, cs)
            return Solved(fe, cs, m, res.tau, certificate_from_matrix(spec, m), "planar table",
                          {"m0": res.m0, "m1": res.m1, "rho": res.rho, "condition": res.existence.condition})
    if n == 3 and m == 3 and label in SPATIAL_TYPES:
        res = cf.spatial_table(ax[2], ax[1], ax[0], label)
        spec = MergedSpectrum.from_caustics(res.ellipsoid, res.caustics)
        return Solved(res.ellipsoid, res.caustics, m, (0, 0, 0), certificate_from_matrix(spec, m),
                      "spatial table", {"condition": res.existence.condition})
    if n == 3 and m == 4 and label == "H1H1" and tau in (None, (0, 0, 1)):
        res = cf.solve_c43(ax[2], ax[1], ax[0])
        spec = MergedSpectrum.from_caustics(res.ellipsoid, res.caustics)
        return Solved(res.ellipsoid, res.caustics, m, (0, 0, 1), certificate_from_matrix(spec, m),
                      "period-four closed form", {"d": res.d, "condition": res.existence.condition})
    if m == n and tv == cf.expected_type_m_eq_n(n):
        inst = cf.construct_m_eq_n(e)
        return Solved(inst.ellipsoid, inst.caustics, m, inst.tau, inst.certificate,
                      "minimal-period closed form", {})
    if tau is None:
        sigs = signatures(m, n)
        if len(sigs) != 1:
            raise UsageError(f"--tau is required: choose one of {sigs}")
        tau = sigs[0]
    sol = solve_signature(e, tv, tau, seed=cfg.seed)
    exact = all(isinstance(v, Fraction) for v in sol.caustics.params)
    fe = e if exact and e.exact else Ellipsoid([float(v) for v in ax])
    return Solved(fe, sol.caustics, m, tau, sol.certificate, "signature solver",
                  {"deltas": sol.deltas, "residual": sol.residual})


def cmd_solve_caustics(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        s = solve_caustics(cfg)
    except (cf.NoSuchTrajectory, cf.IndeterminateExistence) as exc:
        print(f"no solution: {exc}", file=out)
        return EXIT_NEGATIVE
    except (NoConvergence, SpuriousRoot) as exc:
        print(f"no solution: {exc}", file=out)
        return EXIT_NEGATIVE
    except CausticError as exc:
        print(f"no solution: {exc}", file=out)
        return EXIT_NEGATIVE
    print(f"route: {s.route}", file=out)
    print(f"axes: {_fmt_list(s.ellipsoid.axes)}", file=out)
    print(f"caustics: {_fmt_list(s.caustics.params)}", file=out)
    print(f"type: {s.caustics.label}", file=out)
    print(f"elliptic period: {s.m}", file=out)
    if s.tau is not None:
        print(f"signature: {','.join(str(t) for t in s.tau)}", file=out)
    for key, val in s.extra.items():
        if isinstance(val, (tuple, list)):
            val = _fmt_list(val)
        elif not isinstance(val, str):
            val = format_number(val)
        print(f"{key}: {val}", file=out)
    if s.certificate is not None:
        print(f"S = {str(s.certificate.S)}", file=out)
        print(f"P = {str(s.certificate.P)}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------- simulate
def cmd_simulate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if cfg.caustics:
        e = _ellipsoid(cfg)
        try:
            cs = existence_check(e, cfg.numbers(cfg.caustics))
        except CausticError as exc:
            print(f"rejected caustics: {exc}", file=out)
            return EXIT_NEGATIVE
    elif cfg.type and cfg.m is not None:
        try:
            s = solve_caustics(cfg)
        except (CausticError, NoConvergence, SpuriousRoot) as exc:
            print(f"no solution: {exc}", file=out)
            return EXIT_NEGATIVE
        e, cs = s.ellipsoid, s.caustics
    else:
        raise UsageError("simulate needs --caustics, or --type and --m to solve first")
    try:
        st = launch_tangent(e, cs, cfg.seed)
    except LaunchFailure as exc:
        print(f"launch failure: {exc}", file=out)
        return EXIT_NEGATIVE
    t = simulate(e, st, cfg.max_bounces, cfg.closure_tol)
    drift = caustic_drift(t)
    if cfg.csv:
        export_csv(t, cfg.csv)
    if cfg.svg:
        if e.n != 2:
            raise UsageError("--svg is only available for planar billiards")
        export_svg(t, float(cs.params[0]), cfg.svg)
    if t.closure is None:
        print(f"open: no closure within {cfg.max_bounces} bounces", file=out)
        print(f"caustic drift: {drift:.3g}", file=out)
        return EXIT_NEGATIVE
    c = t.closure
    w = winding_numbers(e, t, cs)
    print(f"closed: m0 = {c.m0}, m = {c.m}, sigma = {c.sigma}", file=out)
    print(f"winding numbers: {w.m}, elliptic: {w.m_tilde}", file=out)
    print(f"length L0 = {c.length:.17g}", file=out)
    print(f"closure error: {c.error:.3g}", file=out)
    print(f"caustic drift: {drift:.3g}", file=out)
    print(f"strictly decreasing winding numbers: {w.decreasing}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------- rotation-number
def cmd_rotation_number(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    e = _ellipsoid(cfg)
    if e.n != 2:
        raise UsageError("rotation-number is planar: give two axes")
    if not cfg.caustics:
        raise UsageError("--caustics is required")
    lam = cfg.numbers(cfg.caustics)
    if len(lam) != 1:
        raise UsageError("give one caustic parameter")
    try:
        existence_check(e, lam)
    except CausticError as exc:
        print(f"rejected caustic: {exc}", file=out)
        return EXIT_NEGATIVE
    rho = cf.rotation_number(float(e.axes[1]), float(e.axes[0]), float(lam[0]))
    print(f"rho = {rho:.17g}", file=out)
    guess = Fraction(rho).limit_denominator(1000)
    if abs(float(guess) - rho) < 1e-10:
        print(f"close to {guess}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------- sweep
def _grid(text: str, mode: str) -> list:
    try:
        lo, hi, count = text.split(":")
        count = int(count)
    except ValueError as exc:
        raise UsageError(f"grid must be lo:hi:count, got {text!r}") from exc
    lo, hi = _number(lo), _number(hi)
    if mode == "float":
        lo, hi = float(lo), float(hi)
    else:
        lo, hi = Fraction(lo), Fraction(hi)
    if count < 1:
        raise UsageError("grid count must be positive")
    if count == 1:
        return [lo]
    return [lo + (hi - lo) * Fraction(k, count - 1) if mode == "exact" else lo + (hi - lo) * k / (count - 1)
            for k in range(count)]


def _verdict_text(ex) -> str:
    return {True: "yes", False: "no", None: "indeterminate"}[ex.holds]


SPATIAL_COLUMNS = tuple(f"{t}_m3" for t in SPATIAL_TYPES) + ("H1H1_m4",)
PLANAR_COLUMNS = tuple(r.key for r in cf.PLANAR_TABLE)


def sweep_point(point: tuple) -> list:
    """Verdicts of every registry predicate at one grid point (pure)."""
    if len(point) == 3:
        a, b, c = point
        if not a > b > c > 0:
            return [format_number(a), format_number(b), format_number(c)] + [""] * len(SPATIAL_COLUMNS) + [
                "skipped: need a > b > c > 0"]
        row = [format_number(a), format_number(b), format_number(c)]
        row += [_verdict_text(cf.spatial_existence(a, b, c, t)) for t in SPATIAL_TYPES]
        row.append(_verdict_text(cf.c43_existence(a, b, c)))
        return row + [""]
    a, b = point
    if not a > b > 0:
        return [format_number(a), format_number(b)] + [""] * len(PLANAR_COLUMNS) + ["skipped: need a > b > 0"]
    row = [format_number(a), format_number(b)]
    for r in cf.PLANAR_TABLE:
        row.append(_verdict_text(cf._verdict(r.margins(a, b), r.condition)))
    return row + [""]


def cmd_sweep(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    mode = cfg.mode
    if cfg.planar:
        if not (cfg.a_grid and cfg.b_grid):
            raise UsageError("planar sweep needs --a-grid and --b-grid")
        pts = [(a, b) for a in _grid(cfg.a_grid, mode) for b in _grid(cfg.b_grid, mode)]
        header = ["a", "b", *PLANAR_COLUMNS, "note"]
    else:
        if not (cfg.a and cfg.b_grid and cfg.c_grid):
            raise UsageError("spatial sweep needs --a, --b-grid and --c-grid")
        a = cfg.numbers(cfg.a)[0]
        pts = [(a, b, c) for b in _grid(cfg.b_grid, mode) for c in _grid(cfg.c_grid, mode)]
        header = ["a", "b", "c", *SPATIAL_COLUMNS, "note"]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(sweep_point, pts, chunksize=64))
    else:
        rows = [sweep_point(p) for p in pts]
    if cfg.out:
        fh = open(cfg.out, "w", newline="")
    else:
        fh = out
    try:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if cfg.out:
            fh.close()
    skipped = sum(1 for r in rows if r[-1])
    if cfg.out:
        print(f"wrote {len(rows)} grid points to {cfg.out} ({skipped} skipped)", file=out)
    return EXIT_OK


HANDLERS = {
    "check-cayley": cmd_check_cayley,
    "solve-caustics": cmd_solve_caustics,
    "simulate": cmd_simulate,
    "rotation-number": cmd_rotation_number,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------- parsing
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cayley-billiards", description="Periodic billiards in ellipsoids.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON file with RunConfig fields")
        s.add_argument("--axes", help="axis parameters, e.g. '1/5,1/2,1' or '4,1,0.2'")
        s.add_argument("--caustics", help="caustic parameters, comma separated")
        s.add_argument("--m", type=int, help="elliptic period")
        s.add_argument("--n", type=int, help="dimension (checked against the axes)")
        s.add_argument("--type", help="caustic type: E, H, EH1, H1H1, EH2, H1H2")
        s.add_argument("--tau", help="signature, e.g. '0,0,1'")
        s.add_argument("--tol", type=float)
        s.add_argument("--closure-tol", type=float)
        s.add_argument("--max-bounces", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--csv", help="trajectory CSV output")
        s.add_argument("--svg", help="planar SVG output")
        s.add_argument("--out", help="sweep CSV output (stdout when omitted)")
        s.add_argument("--a", help="fixed largest axis for a spatial sweep")
        s.add_argument("--a-grid", help="lo:hi:count (planar sweep)")
        s.add_argument("--b-grid", help="lo:hi:count")
        s.add_argument("--c-grid", help="lo:hi:count (spatial sweep)")
        s.add_argument("--planar", action="store_true", default=None)
        s.add_argument("--jobs", type=int)
    return p


def config_from_args(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    if ns.config:
        try:
            with open(ns.config) as fh:
                cfg = RunConfig.from_json(fh.read())
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        cfg.command = ns.command
    else:
        cfg = RunConfig(ns.command)
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        val = getattr(ns, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        cfg.mode  # reject mixed literals before any work
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
