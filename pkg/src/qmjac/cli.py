"""Command-line front end.

Exit codes: 0 success, 1 a verdict disagreed with its expectation, 2 usage
error, 3 computational error. Errors are reported as a JSON object on
stdout so scripted callers can branch on the code.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .cache import ENV_VAR
from .errors import QMError
from .frobenius import DEFAULT_BUDGET, GENERIC, SQUARE
from .serialize import dumps, to_csv, to_pretty

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _csv(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _ints(text: str) -> list[int]:
    return [int(t) for t in _csv(text)]


def _complex(text: str) -> complex:
    try:
        return complex(Fraction(text))
    except ValueError:
        return complex(text.replace("i", "j").replace(" ", ""))


def _omega_map(text: str) -> dict[int, int]:
    out = {}
    for item in _csv(text):
        p, w = item.split(":")
        out[int(p)] = int(w)
    return out


# --------------------------------------------------------------------------
# subcommand handlers; each returns (payload, ok)


def _params(args):
    from .family import FamilyParams

    if args.b is not None:
        return FamilyParams.from_b(args.g, _csv(args.b))
    return FamilyParams.from_a(args.g, _csv(args.a or "1/2"))


def cmd_family(args, config):
    from . import family as fm

    params = _params(args)
    model = fm.build_family_poly(params)
    out = {
        "params": params,
        "model": model,
        "polynomial_discriminant": fm.polynomial_discriminant(params),
        "family_discriminant": fm.family_discriminant(params),
        "q8_symmetric": fm.verify_q8_symmetry(model),
    }
    if params.b is not None:
        out["weierstrass"] = fm.weierstrass_data(params)
    if args.g == 4 and params.is_rational():
        a = params.a_coordinates()[0]
        a = a.re if hasattr(a, "re") else a
        out["moduli_orbit"] = sorted(fm.moduli_orbit_g4(a))
    if args.scan:
        if args.g != 4 or params.b is None:
            raise QMError("PRECONDITION_FAILED", "--scan needs --g 4 and --b")
        b = complex(params.b[0])
        out["automorphisms"] = [fm.mobius_label(m) for m in fm.extra_automorphism_scan(b)]
    return out, True


def cmd_frobenius(args, config):
    from .frobenius import l_polynomial_report

    rep = l_polynomial_report(
        _params(args),
        args.p,
        args.ansatz,
        budget=config.budget,
        cache=config.cache(),
        threads=config.threads,
        surplus=args.surplus,
        r_max=args.r_max,
    )
    return rep, True


def cmd_monodromy(args, config):
    from . import monodromy as mo

    primes = _ints(args.primes)
    if args.omega:
        given = _omega_map(args.omega)
        data = [mo.OmegaDatum(p, given[p]) for p in primes]
    else:
        from .frobenius import l_polynomial_report

        params, cache = _params(args), config.cache()
        data = []
        for p in primes:
            rep = l_polynomial_report(params, p, SQUARE, budget=config.budget, cache=cache, threads=config.threads)
            data.append(mo.OmegaDatum(p, mo.omega_of_frobenius(rep.g_p, p, args.g), rep.g_p))
    cands = mo.candidate_fields(_ints(args.bad))
    ident = mo.identify_connected_monodromy_field(data, cands)
    return {"omega": data, "candidates": cands, "identification": ident}, True


def cmd_lattice(args, config):
    from . import lattice as lt

    data = lt.homology_data()
    obstruction = {g: dict(zip(("nonzero", "rank"), lt.hurwitz_obstruction(g))) for g in _ints(args.genera)}
    rw, integral = lt.hurwitz_rational_rep(data)
    out = {
        "homology": data,
        "two_torsion_obstruction": obstruction,
        "lipschitz_span_rank": lt.lipschitz_span_rank(data),
        "R_omega": [[str(Fraction(v)) for v in row] for row in rw],
        "R_omega_integral": integral,
        "nonfreeness": dict(zip(("dim_JL_mod_2L", "dim_quotient", "verdict"), lt.nonfreeness_check())),
        "free_control": lt.nonfreeness_check(*lt.free_module_generators(2))[2],
        "t_matrix": lt.t_matrix_report(data),
    }
    return out, all(o["nonzero"] for o in obstruction.values())


def cmd_periods(args, config):
    from . import periods as pe

    a = _complex(args.a)
    rep = pe.period_report(a, args.tol)
    ok = rep["residual_alpha"] < 1e-8 and rep["residual_beta"] < 1e-8 and rep["positivity"]
    out = {k: (v.hex() if isinstance(v, float) else v) for k, v in rep.items()}
    if args.scan:
        scan = pe.stability_scan(args.scan, args.radius, seed=config.seed, center=a)
        worst = max(max(s["residual_alpha"], s["residual_beta"]) for s in scan)
        out["scan_max_residual"] = worst.hex()
        ok = ok and worst < 1e-7
    return out, ok


def cmd_clusters(args, config):
    from . import degeneration as dg

    if args.t_adic:
        roots = dg.pullback_roots_t_adic(args.power)
        b = None
    else:
        if args.p is None:
            raise UsageError("clusters: --p is required unless --t-adic is given")
        b = _csv(args.b) if args.b else list(dg.bad_parameter_constructor(args.g, args.p))
        roots = dg.family_roots_p_adic([Fraction(v) for v in b], args.p)
    tree = dg.build_cluster_tree(roots)
    return {"b": b, "tree": tree, "verdict": dg.reduction_verdict(tree)}, True


def cmd_schoen(args, config):
    from . import schoen as sc

    ctx = sc.SchoenContext.make(args.g, [Fraction(v) for v in _csv(args.beta)], gamma=args.gamma)
    symbolic = True if args.symbolic else None
    rep = sc.verify_fourth_power_identity(ctx, args.trials, config.seed, symbolic=symbolic, sign=args.sign)
    out = {"symmetry": sc.surprising_symmetry_check(ctx), "report": rep}
    return out, rep.ok if args.sign == -1 else True


def cmd_pipeline(args, config):
    from .pipelines import run_pipeline

    rep = run_pipeline(args.name, config)
    return rep.to_json(timing=not args.no_timing), rep.all_match


# --------------------------------------------------------------------------
# parser


def _add_family_args(p, default_g=4):
    p.add_argument("--g", type=int, default=default_g, help="genus (even, at least 4)")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--a", help="comma-separated A-coordinates, e.g. 1/2 or 1/2,0 (default 1/2)")
    grp.add_argument("--b", help="comma-separated B-coordinates")


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand.

    Each parser gets its own copy: argparse shares action objects with
    parents, and the subcommand copy must default to SUPPRESS so it never
    overwrites a value given before the subcommand.
    """

    def dflt(value):
        return argparse.SUPPRESS if suppress else value

    common = _Parser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json", default=dflt("json"), help="JSON output (default)")
    fmt.add_argument("--csv", dest="output", action="store_const", const="csv", default=argparse.SUPPRESS, help="flattened key,value CSV")
    fmt.add_argument("--pretty", dest="output", action="store_const", const="pretty", default=argparse.SUPPRESS, help="aligned key/value text")
    common.add_argument("--cache", default=dflt(None), help=f"point-count cache file (env {ENV_VAR})")
    common.add_argument("--budget", type=int, default=dflt(DEFAULT_BUDGET), help=f"largest field size counted directly (default {DEFAULT_BUDGET})")
    common.add_argument("--threads", type=int, default=dflt(1), help="worker threads for counting (default 1)")
    common.add_argument("--seed", type=int, default=dflt(1), help="random seed (default 1)")
    return common


def build_parser() -> argparse.ArgumentParser:
    from .pipelines import PIPELINES

    parser = _Parser(
        prog="qmjac",
        description="Exact and numerical checks for hyperelliptic Jacobians with a Q8 action.",
        parents=[_global_options(False)],
    )
    parser.add_argument("--version", action="version", version=f"qmjac {__version__}")
    parser.add_argument("--manpage", action="store_true", help="print a roff manual page and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    p = sub.add_parser("family", parents=[_global_options(True)], help="build a fiber and its invariants")
    _add_family_args(p)
    p.add_argument("--scan", action="store_true", help="list extra automorphisms (g = 4, needs --b)")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("frobenius", parents=[_global_options(True)], help="L-polynomial report at one prime")
    _add_family_args(p)
    p.add_argument("--p", type=int, required=True, help="odd prime of good reduction")
    p.add_argument("--ansatz", type=str.upper, choices=[SQUARE, GENERIC], default=SQUARE)
    p.add_argument("--surplus", type=int, default=1, help="extra extension degrees used for verification")
    p.add_argument("--r-max", type=int, default=12, help="largest r in the endomorphism dimension table")
    p.set_defaults(func=cmd_frobenius)

    p = sub.add_parser("monodromy", parents=[_global_options(True)], help="identify the connected monodromy field")
    _add_family_args(p)
    p.add_argument("--primes", required=True, help="comma-separated primes, each 1 mod 4")
    p.add_argument("--bad", required=True, help="comma-separated bad primes")
    p.add_argument("--omega", help="skip counting and use these values, e.g. 13:-1,41:1")
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("lattice", parents=[_global_options(True)], help="homology matrices, two-torsion and T-matrix")
    p.add_argument("--genera", default="4,6", help="genera for the two-torsion obstruction")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("periods", parents=[_global_options(True)], help="numerical period matrix (g = 4)")
    p.add_argument("--a", default="1/2", help="parameter, rational or complex like 0.5+0.1i")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--scan", type=int, default=0, help="also check N random nearby parameters")
    p.add_argument("--radius", type=float, default=0.05)
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("clusters", parents=[_global_options(True)], help="cluster picture and reduction verdict")
    p.add_argument("--g", type=int, default=6)
    p.add_argument("--b", help="comma-separated B-coordinates (default: construct a tuple with a twin)")
    p.add_argument("--p", type=int, help="residue characteristic")
    p.add_argument("--t-adic", action="store_true", help="use the b = t^power pullback over Q((t))")
    p.add_argument("--power", type=int, default=2)
    p.set_defaults(func=cmd_clusters)

    p = sub.add_parser("schoen-verify", parents=[_global_options(True)], help="fourth-power identity on random points")
    p.add_argument("--g", type=int, default=4)
    p.add_argument("--beta", default="2", help="comma-separated rationals")
    p.add_argument("--gamma", type=Fraction, default=None)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--symbolic", action="store_true", help="also run the exact symbolic check")
    p.add_argument("--sign", type=int, choices=[-1, 1], default=-1, help="+1 runs the control")
    p.set_defaults(func=cmd_schoen)

    p = sub.add_parser("pipeline", parents=[_global_options(True)], help="run a reproduction pipeline")
    p.add_argument("name", choices=list(PIPELINES))
    p.add_argument("--no-timing", action="store_true", help="omit the wall-clock field")
    p.set_defaults(func=cmd_pipeline)
    return parser


def _roff(text: str) -> str:
    return text.replace("\\", "\\\\").replace("-", "\\-")


def render_manpage(parser: argparse.ArgumentParser | None = None) -> str:
    """Manual page in roff, built by walking the parser."""
    parser = parser or build_parser()
    lines = [
        f'.TH QMJAC 1 "" "qmjac {__version__}"',
        ".SH NAME",
        "qmjac \\- " + _roff(parser.description),
        ".SH SYNOPSIS",
        ".B qmjac",
        "[global options] COMMAND [options]",
        ".SH GLOBAL OPTIONS",
    ]

    def options(p):
        for act in p._actions:
            if not act.option_strings or isinstance(act, argparse._HelpAction):
                continue
            flags = ", ".join(act.option_strings)
            meta = "" if act.nargs == 0 else " " + (act.metavar or act.dest.upper())
            lines.append(".TP")
            lines.append(f"\\fB{_roff(flags)}\\fR{_roff(meta)}")
            extra = f" Choices: {', '.join(map(str, act.choices))}." if act.choices else ""
            lines.append(_roff((act.help or "") + extra))

    options(parser)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    helps = {c.dest: c.help for c in sub._choices_actions}
    lines.append(".SH COMMANDS")
    global_flags = {s for a in parser._actions for s in a.option_strings}
    for name, p in sub.choices.items():
        lines += [".SS " + name, _roff(helps.get(name, ""))]
        for act in p._actions:
            if not act.option_strings and act.dest not in ("help",) and act.choices:
                lines += [".TP", f"\\fI{act.dest}\\fR", _roff("one of " + ", ".join(act.choices))]
        for act in p._actions:
            if not act.option_strings or set(act.option_strings) & global_flags:
                continue
            lines.append(".TP")
            lines.append(f"\\fB{_roff(', '.join(act.option_strings))}\\fR")
            lines.append(_roff(act.help or ""))
    lines += [
        ".SH ENVIRONMENT",
        ".TP",
        f"\\fB{ENV_VAR}\\fR",
        "Point-count cache file used when \\fB\\-\\-cache\\fR is not given.",
        ".TP",
        "\\fBQMJAC_PURE_PYTHON\\fR",
        "Set to 1 to use the numpy counting kernels instead of the compiled ones.",
        ".SH EXIT STATUS",
        "0 success, 1 verdict mismatch, 2 usage error, 3 computational error.",
    ]
    return "\n".join(lines) + "\n"


def _emit(payload, output: str, stream) -> None:
    if output == "csv":
        stream.write(to_csv(payload))
    elif output == "pretty":
        stream.write(to_pretty(payload))
    else:
        stream.write(dumps(payload) + "\n")


def main(argv: list[str] | None = None, stream=None) -> int:
    from .pipelines import RunConfig

    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.manpage:
            stream.write(render_manpage(parser))
            return EXIT_OK
        if args.command is None:
            raise UsageError("qmjac: a command is required")
        config = RunConfig(seed=args.seed, budget=args.budget, cache_path=args.cache, threads=args.threads, output=args.output)
        payload, ok = args.func(args, config)
    except UsageError as exc:
        _emit({"error": "USAGE", "message": str(exc)}, "json", stream)
        return EXIT_USAGE
    except QMError as exc:
        code = EXIT_USAGE if exc.code == "USAGE" else EXIT_ERROR
        _emit(exc.to_json(), "json", stream)
        return code
    _emit(payload, args.output, stream)
    return EXIT_OK if ok else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
