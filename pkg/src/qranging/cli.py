"""Command-line front end.

Subcommands write CSV (one header row, 12 significant digits, ``#``
provenance lines) to ``--out`` or stdout::

    qranging bounds   --m 2 --big-m 10000 --ns 1e-3 --nb 3 --kappa 0.01
    qranging fig2     --panel a [--cutoff 300]
    qranging fig3     [--m-list 100,1000,10000]
    qranging receiver --exact --mc --trials 1000000 --seed 42
    qranging ddmc     --m 3 --trials 1000000 --seed 7
    qranging selftest [--pairs 100] [--cutoff 26]

Exit codes: 0 success, 1 usage error, 2 numerical-validation failure.
``--config FILE`` reads ``key=value`` lines that act as defaults under the
explicit flags.  ``QRANGING_WORKERS`` sets the worker-thread count.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import comm, fock, ranging, receivers, validation
from .ranging import RangingScenario

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2
SIG_DIGITS = 12
FOCK_DEFICIT_BOUND = 1e-10
BASE_CUTOFF = validation._TWO_MODE["cutoff"]

PANELS = {
    "a": dict(m=2, nb=3.0),
    "b": dict(m=3, nb=1.0),
    "c": dict(m=50, nb=20.0),
}
FIG2_NS, FIG2_KAPPA = 1e-3, 0.01
FIG3_KAPPA, FIG3_NB = 0.1, 20.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad input; 2 is reserved for validation failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common")
    g.add_argument("--m", type=int, help="number of range slices")
    g.add_argument("--big-m", type=int, help="modes per pulse M")
    g.add_argument("--ns", type=float, help="signal brightness N_S")
    g.add_argument("--nb", type=float, help="background N_B")
    g.add_argument("--kappa", type=float, help="reflectivity")
    g.add_argument("--trials", type=int, help="Monte Carlo trials")
    g.add_argument("--seed", type=int, help="64-bit unsigned seed")
    g.add_argument("--cutoff", type=int, help="Fock cutoff")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--config", help="key=value defaults file")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qranging", description="Quantum ranging bounds, receivers and rates.")
    parser.add_argument("--version", action="version", version=f"qranging {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    common = [_common()]

    p = sub.add_parser("bounds", parents=common, help="all bounds at one scenario")
    p.add_argument("--passive-signature", action="store_true")
    p.add_argument("--digits", type=int, help="working digits of the direct-detection sum")

    p = sub.add_parser("fig2", parents=common, help="error probability versus M")
    p.add_argument("--panel", choices=sorted(PANELS), required=True)
    p.add_argument("--m-min", type=float, default=1e2)
    p.add_argument("--m-max", type=float, default=1e7)
    p.add_argument("--points", type=int, default=26)
    p.add_argument("--passive-signature", action="store_true")
    p.add_argument("--digits", type=int)

    p = sub.add_parser("fig3", parents=common, help="optimized PPM rates versus n_S")
    p.add_argument("--m-list", default="100,1000,10000", help="comma-separated M values")
    p.add_argument("--ns-min", type=float, default=1e-6)
    p.add_argument("--ns-max", type=float, default=1e-2)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--asymptotic", action="store_true", help="use the asymptotic error form")

    p = sub.add_parser("receiver", parents=common, help="OPA receiver error")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--mc", action="store_true")
    p.add_argument("--gain", type=float, help="OPA gain G (default 1 + m sqrt(N_S)/N_B)")

    p = sub.add_parser("ddmc", parents=common, help="direct-detection Monte Carlo")
    p.add_argument("--residual", action="store_true",
                   help="also count the M-1 background-only modes of every slice")
    p.add_argument("--digits", type=int)

    p = sub.add_parser("selftest", parents=common, help="analytic-vs-oracle validation suite")
    p.add_argument("--pairs", type=int, default=100)
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = val
    return out


def _apply_config(sub, cfg: dict):
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, val in cfg.items():
        if key in ("config", "help") or key not in actions:
            raise UsageError(f"unknown config key: {key}")
        if isinstance(actions[key], argparse._StoreTrueAction):
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key} expects a boolean")
            val = val.lower() in ("true", "1", "yes")
        defaults[key] = val
    # string defaults go through the flag's type conversion on re-parse
    sub.set_defaults(**defaults)


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = _subparser(parser, args.command)
        _apply_config(sub, read_config(args.config))
        args = parser.parse_args(argv)
    return args


# ------------------------------------------------------------ validation

def _need(cond: bool, msg: str):
    if not cond:
        raise UsageError(msg)


def _pick(value, default):
    return default if value is None else value


def _scenario(args, m, M, ns, nb, kappa) -> RangingScenario:
    try:
        return RangingScenario(m=_pick(args.m, m), M=_pick(args.big_m, M), N_S=_pick(args.ns, ns),
                               N_B=_pick(args.nb, nb), kappa=_pick(args.kappa, kappa))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_mc(args, trials_default, seed_default):
    trials = _pick(args.trials, trials_default)
    seed = _pick(args.seed, seed_default)
    _need(trials >= 1, "--trials must be >= 1")
    _need(0 <= seed < 2 ** 64, "--seed must be a 64-bit unsigned integer")
    return trials, seed


def _check_digits(args):
    d = getattr(args, "digits", None)
    _need(d is None or d >= 15, "--digits must be >= 15")
    return d


def _log_grid(lo, hi, n, integer=False):
    _need(n >= 1, "--points must be >= 1")
    _need(0 < lo <= hi, "grid bounds must satisfy 0 < min <= max")
    g = np.geomspace(lo, hi, n)
    if integer:
        g = np.unique(np.round(g).astype(np.int64))
        _need(g[0] >= 1, "M grid must start at >= 1")
    return g


# ---------------------------------------------------------------- output

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if math.isnan(x):
        return "nan"
    return f"{x:.{SIG_DIGITS}g}"


def render(command: str, args, header, rows, notes=()) -> str:
    buf = io.StringIO()
    buf.write(f"# qranging {__version__} {command}\n")
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "config")}
    buf.write("# flags: " + " ".join(f"{k}={v}" for k, v in flags.items()) + "\n")
    for note in notes:
        buf.write(f"# {note}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qranging-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _map(fn, items):
    workers = receivers.n_workers()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))


# -------------------------------------------------------------- commands

SCENARIO_COLS = ["m", "M", "N_S", "N_B", "kappa"]
REPORT_COLS = [f.name for f in dataclasses.fields(ranging.BoundsReport)]


def _scenario_row(sc):
    return [sc.m, sc.M, sc.N_S, sc.N_B, sc.kappa]


def _bounds_row(sc, passive, digits):
    rep = ranging.compute_bounds(sc, passive_signature=passive).as_dict()
    if digits is not None:
        rep["p_c_dd"] = ranging.classical_dd(sc, digits=digits)
    return rep


def cmd_bounds(args):
    sc = _scenario(args, 2, 10_000, FIG2_NS, 3.0, FIG2_KAPPA)
    digits = _check_digits(args)
    rep = _bounds_row(sc, args.passive_signature, digits)
    return SCENARIO_COLS + REPORT_COLS, [_scenario_row(sc) + [rep[c] for c in REPORT_COLS]], []


FIG2_COLS = ["p_c_qcb", "p_c_lb", "p_c_dd", "p_e_qcb_full", "p_e_ub"]


def cmd_fig2(args):
    panel = PANELS[args.panel]
    base = _scenario(args, panel["m"], 1, FIG2_NS, panel["nb"], FIG2_KAPPA)
    digits = _check_digits(args)
    _need(args.big_m is None, "fig2 sweeps M; use --m-min/--m-max/--points")
    grid = _log_grid(args.m_min, args.m_max, args.points, integer=True)
    with_opa = args.panel == "a"
    with_fock = args.cutoff is not None
    _need(not with_fock or args.panel == "a", "--cutoff (Fock columns) is only defined for panel a")
    _need(not with_fock or args.cutoff >= 2, "--cutoff must be >= 2")
    _need(not with_opa or base.m == 2, "panel a's OPA column needs m = 2")
    _need(not with_opa or base.N_B > 0, "panel a's OPA column needs N_B > 0")

    def point(M):
        sc = base.with_(M=int(M))
        rep = _bounds_row(sc, args.passive_signature, digits)
        row = [sc.M] + [rep[c] for c in FIG2_COLS]
        deficit = 0.0
        if with_opa:
            row.append(receivers.opa_error_exact_m2(sc))
        if with_fock:
            red = ranging.reduce_classical_to_single_mode(sc)
            r0, r1 = fock.classical_pair_m2(red.alpha_sq, sc.N_B, args.cutoff)
            deficit = max(r0.trace_deficit, r1.trace_deficit)
            if deficit < FOCK_DEFICIT_BOUND:
                row += [fock.helstrom_binary(r0, r1), fock.pgm_error([r0, r1])]
            else:
                row += [math.nan, math.nan]
        return row, deficit

    results = _map(point, grid)
    header = ["M"] + FIG2_COLS + (["p_e_opa"] if with_opa else [])
    notes = [f"panel {args.panel}: m={base.m} N_S={fmt(base.N_S)} N_B={fmt(base.N_B)} "
             f"kappa={fmt(base.kappa)}"]
    if with_fock:
        header += ["p_c_helstrom_fock", "p_c_pgm_fock"]
        skipped = sum(d >= FOCK_DEFICIT_BOUND for _, d in results)
        notes.append(f"fock columns: concentrated m=2 classical pair, cutoff {args.cutoff}, "
                     f"max trace deficit {fmt(max(d for _, d in results))}, "
                     f"{skipped} rows above {FOCK_DEFICIT_BOUND:.0e} left nan")
    return header, [r for r, _ in results], notes


def cmd_fig3(args):
    kappa = _pick(args.kappa, FIG3_KAPPA)
    nb = _pick(args.nb, FIG3_NB)
    _need(args.m is None, "fig3 optimizes m; --m is not accepted")
    _need(0 <= kappa <= 1, "--kappa must lie in [0, 1]")
    _need(nb >= 0 and math.isfinite(nb), "--nb must be finite and >= 0")
    if args.big_m is not None:
        Ms = [args.big_m]
    else:
        try:
            Ms = [int(x) for x in args.m_list.split(",") if x.strip()]
        except ValueError:
            raise UsageError("--m-list must be comma-separated integers") from None
    _need(len(Ms) > 0 and all(M >= 1 for M in Ms), "M values must be >= 1")
    if args.ns is not None:
        ns_grid = np.array([args.ns])
    else:
        ns_grid = _log_grid(args.ns_min, args.ns_max, args.points)[::-1]
    _need(bool(np.all(ns_grid > 0)), "n_S must be > 0")

    jobs = [(M, float(ns)) for M in Ms for ns in ns_grid]
    points = _map(lambda j: comm.optimal_rate(j[0], j[1], kappa, nb, asymptotic=args.asymptotic),
                  jobs)
    rows = []
    for pt in points:
        r_c = pt.R_star / pt.C if pt.C > 0 else math.nan
        e_c = pt.C_E / pt.C if pt.C > 0 else math.nan
        rows.append([pt.n_S, pt.M, pt.m_star, pt.R_star, pt.C, pt.C_E, r_c, e_c])
    header = ["n_S", "M", "m_star", "R_star", "C", "C_E", "R_star_over_C", "C_E_over_C"]
    return header, rows, [f"kappa={fmt(kappa)} N_B={fmt(nb)}"]


def cmd_receiver(args):
    sc = _scenario(args, 2, 100_000, FIG2_NS, 3.0, FIG2_KAPPA)
    exact, mc = args.exact, args.mc
    if not (exact or mc):
        exact = True
    trials, seed = _check_mc(args, 1_000_000, 42)
    if sc.m != 2:
        raise NotImplementedError("not implemented: adaptive receiver (the OPA decision rule "
                                  "is only defined for m = 2)")
    _need(sc.N_B > 0, "the OPA receiver needs --nb > 0")
    G = args.gain if args.gain is not None else receivers.default_gain(sc)
    _need(G >= 1, "--gain must be >= 1")
    header = SCENARIO_COLS + ["G", "N_0", "N_1"]
    n0, n1 = receivers.opa_means_m2(sc, G)
    row = _scenario_row(sc) + [G, n0, n1]
    if exact:
        header += ["p_exact", "p_gaussian"]
        row += [receivers.opa_error_exact_m2(sc, G), receivers.opa_error_gaussian_m2(sc, G)]
    if mc:
        res = receivers.opa_monte_carlo_m2(sc, G, trials, seed)
        header += ["p_mc", "std_error", "trials", "seed"]
        row += [res.error, res.std_error, trials, seed]
    return header, [row], []


def cmd_ddmc(args):
    sc = _scenario(args, 2, 100_000, FIG2_NS, 0.3, FIG2_KAPPA)
    trials, seed = _check_mc(args, 1_000_000, 7)
    digits = _check_digits(args)
    res = receivers.dd_monte_carlo(sc, trials, seed, residual=args.residual)
    header = SCENARIO_COLS + ["p_exact", "p_mc", "std_error", "trials", "seed", "residual"]
    row = _scenario_row(sc) + [ranging.classical_dd(sc, digits=digits), res.error,
                               res.std_error, trials, seed, args.residual]
    return header, [row], []


def cmd_selftest(args):
    _need(args.pairs >= 1, "--pairs must be >= 1")
    _need(args.cutoff is None or args.cutoff >= 2, "--cutoff must be >= 2")
    seed = _pick(args.seed, 2024)
    _need(0 <= seed < 2 ** 64, "--seed must be a 64-bit unsigned integer")
    scale = 1.0 if args.cutoff is None else args.cutoff / BASE_CUTOFF
    checks = validation.run_selftest(args.pairs, scale, seed)
    n_fail = sum(not c.ok for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", n_fail == 0


COMMANDS = {"bounds": cmd_bounds, "fig2": cmd_fig2, "fig3": cmd_fig3,
            "receiver": cmd_receiver, "ddmc": cmd_ddmc}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        if args.command == "selftest":
            text, ok = cmd_selftest(args)
            emit(text, args.out)
            return EXIT_OK if ok else EXIT_VALIDATION
        header, rows, notes = COMMANDS[args.command](args)
        emit(render(args.command, args, header, rows, notes), args.out)
        return EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NotImplementedError as exc:
        print(f"qranging: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError) as exc:
        print(f"qranging: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
