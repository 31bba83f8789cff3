import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

from config import get_config, init_env
from init import init_function, init_integrand, init_weight, parse_range
from src.approx.lipschitz import Side, convergence_report, lipschitz_approximate
from src.constructs.counterexamples import (
    CounterexampleKind,
    CounterexampleSpec,
    build_asymmetry_counterexample,
    build_nonconcavity_counterexample,
    build_symmetric_counterexample,
)
from src.errors import PreconditionFailed, RearrangementLabError
from src.exprlang import parser as expr_parser
from src.exprlang.evaluator import eval_expr
from src.exprlang.expr_nodes import free_variables, to_text
from src.exprlang.parser import parse_expr
from src.functional.functional import evaluate_functional, jensen_level_check, verify_rearrangement
from src.harness.generators import Family, SweepConfig
from src.harness.sweep import RESULT_COLUMNS, sweep
from src.plcore.piecewise import pl_metrics
from src.plcore.rearrangement import RearrangementMode, distribution, rearrange_by_mode
from src.reporting import FORMATS, write_plot_csv, write_report, write_table_csv
from src.weightlab.conditions import check_admissible, check_symmetric_condition
from src.weightlab.diagnostics import compute_Dk
from src.weightlab.lemmas import zero_set_analysis

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2

Handler = Callable[[argparse.Namespace, Dict[str, Any]], Tuple[dict, bool]]


class CliParser(argparse.ArgumentParser):
    """Ошибка разбора печатает справку и грамматику выражений, код выхода 2."""

    def error(self, message):
        self.print_help(sys.stderr)
        if self.epilog is None:
            sys.stderr.write(expr_parser.__doc__)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cmd_rearrange(args, cfg) -> Tuple[dict, bool]:
    u = init_function(args.u, cfg)
    r = rearrange_by_mode(args.mode, u, cfg['RR_DEDUP_TOL'])
    if args.emit_plot:
        write_plot_csv(args.emit_plot, {'u': u, 'u_star' if args.mode == 'monotone' else 'u_bar': r})
    m = distribution(u)
    return {
        'mode': args.mode,
        'u': u.to_literal(),
        'rearranged': r.to_literal(),
        'metrics_u': pl_metrics(u).to_dict(),
        'metrics_rearranged': pl_metrics(r).to_dict(),
        'distribution': {'t': m.ts.tolist(), 'm': m.ms.tolist()},
    }, True


def cmd_evaluate(args, cfg) -> Tuple[dict, bool]:
    u = init_function(args.u, cfg)
    a = init_weight(args.weight, parse_range(args.v_range))
    F = init_integrand(args.F)
    value = evaluate_functional(F, a, u, cfg['RR_QUAD_TOL'], cfg['RR_MAX_DEPTH'])
    payload = {'u': u.to_literal(), 'weight': a.get_weight_info(), 'F': F.to_text(), **value.to_dict()}
    if args.level is not None:
        payload['jensen'] = jensen_level_check(F, a, u, args.level).to_dict()
    return payload, True


def cmd_verify(args, cfg) -> Tuple[dict, bool]:
    u = init_function(args.u, cfg)
    a = init_weight(args.weight, parse_range(args.v_range))
    F = init_integrand(args.F)
    report = verify_rearrangement(F, a, u, args.mode, tol=cfg['RR_QUAD_TOL'],
                                  check_conditions=not args.no_conditions,
                                  nx=cfg['RR_CHECK_X_NODES'], nv=cfg['RR_CHECK_V_SAMPLES'],
                                  condition_tol=cfg['RR_CONDITION_TOL'])
    if args.emit_plot:
        write_plot_csv(args.emit_plot, {'u': u, 'u_star' if args.mode == 'monotone' else 'u_bar':
                                        rearrange_by_mode(args.mode, u)})
    return report.to_dict(), report.holds


def cmd_check_weight(args, cfg) -> Tuple[dict, bool]:
    a = init_weight(args.weight, parse_range(args.v_range))
    nx = args.nx or cfg['RR_CHECK_X_NODES']
    nv = args.nv or cfg['RR_CHECK_V_SAMPLES']
    if args.symmetric:
        report = check_symmetric_condition(a, nx, nv, cfg['RR_CONDITION_TOL'])
        ok = report.symmetric_admissible
    else:
        report = check_admissible(a, nx, nv, cfg['RR_CONDITION_TOL'])
        ok = report.admissible
    payload = {'weight': a.get_weight_info(), 'conditions': report.to_dict()}
    if args.zero_level is not None:
        payload['zero_set'] = zero_set_analysis(a, args.zero_level).to_dict()
    if args.dk is not None:
        if args.u is None:
            raise ValueError("Для --dk нужна функция --u")
        payload['D_k'] = {'k': args.dk, 'value': compute_Dk(a, init_function(args.u, cfg), args.dk)}
    return payload, ok


def cmd_counterexample(args, cfg) -> Tuple[dict, bool]:
    a = init_weight(args.weight, parse_range(args.v_range))
    if args.kind == "asymmetry":
        ce = build_asymmetry_counterexample(a, args.x_bar, args.v_bar, args.eps)
    else:
        kind = CounterexampleKind.NONCONCAVITY if args.kind == "nonconcavity" else CounterexampleKind.NONCONVEXITY
        spec = CounterexampleSpec(kind, eps=args.eps, s=args.s, t=args.t, delta=args.delta,
                                  v_bar=args.v_bar, A=args.A)
        if kind is CounterexampleKind.NONCONCAVITY:
            if args.alpha is None:
                raise ValueError("Для nonconcavity нужен --alpha")
            ce = build_nonconcavity_counterexample(a, spec, args.alpha)
        else:
            ce = build_symmetric_counterexample(a, spec)

    report = verify_rearrangement(ce.F, a, ce.u, ce.mode, tol=cfg['RR_QUAD_TOL'], check_conditions=False)
    if args.emit_plot:
        write_plot_csv(args.emit_plot, {'u': ce.u, 'u_rearranged': ce.u_rearranged})
    confirmed = report.gap < -report.quad_err
    return {
        'counterexample': ce.to_dict(),
        'I_u': report.I_u,
        'I_rearranged': report.I_rearranged,
        'gap': report.gap,
        'quad_err': report.quad_err,
        'confirmed': confirmed,
    }, confirmed


def cmd_approx(args, cfg) -> Tuple[dict, bool]:
    u = init_function(args.u, cfg)
    ladder = [float(h) for h in args.ladder.split(",")]
    if args.weight is None or args.F is None:
        stages = [lipschitz_approximate(u, h, args.side).to_dict() for h in ladder]
        return {'side': args.side, 'stages': stages}, True

    a = init_weight(args.weight, parse_range(args.v_range))
    F = init_integrand(args.F)
    report = convergence_report(F, a, u, ladder, args.side, cfg['RR_QUAD_TOL'])
    if args.emit_plot:
        last = lipschitz_approximate(u, ladder[-1], args.side)
        write_plot_csv(args.emit_plot, {'u': u, 'u_h': last.u_h})
    return report.to_dict(), True


def cmd_sweep(args, cfg) -> Tuple[dict, bool]:
    lo, hi = (int(n) for n in args.breakpoints.split(":"))
    sweep_cfg = SweepConfig(
        seed=args.seed,
        count=args.count,
        mode=args.mode,
        family=args.family,
        breakpoints=(lo, hi),
        values=parse_range(args.values),
        plateau_prob=args.plateau_prob,
        tolerance=args.tolerance,
        quad_tol=cfg['RR_QUAD_TOL'],
        threads=args.threads or cfg['RR_THREADS'],
        resolution=(cfg['RR_SWEEP_RESOLUTION_X'], cfg['RR_SWEEP_RESOLUTION_V']),
    )
    report = sweep(sweep_cfg, progress=not args.no_progress)
    if args.table:
        write_table_csv(args.table, RESULT_COLUMNS, (r.to_dict() for r in report.results))
        logger.info(f"🗒️ instance table written to {args.table}")
    return report.to_dict(), report.passed


def cmd_parse(args, cfg) -> Tuple[dict, bool]:
    e = parse_expr(args.expr)
    payload = {'input': args.expr, 'canonical': to_text(e), 'variables': sorted(free_variables(e))}
    if args.at:
        bindings = {}
        for item in args.at.split(","):
            name, _, value = item.partition("=")
            bindings[name.strip()] = float(value)
        payload['value'] = float(eval_expr(e, bindings))
    return payload, True


def _add_common(p: argparse.ArgumentParser, *, u: bool = False, weight: bool = False, F: bool = False,
                mode: bool = False, plot: bool = False) -> None:
    if u:
        p.add_argument("--u", required=True, help="pl:x0:y0,...,xn:yn или expr:<выражение от x>")
    if weight:
        p.add_argument("--weight", required=True, help="выражение от x и v или grid:@file.csv")
        p.add_argument("--v-range", default="0:1", help="интервал уровней веса lo:hi (по умолчанию 0:1)")
    if F:
        p.add_argument("--F", required=True, help="power:<alpha>, quadratic:<gamma> или выражение от v и p")
    if mode:
        p.add_argument("--mode", choices=[m.value for m in RearrangementMode], default="monotone")
    if plot:
        p.add_argument("--emit-plot", metavar="FILE", help="CSV с колонками x, u и перестановкой")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(
        prog="rearrangement-lab",
        description="Перестановки кусочно-линейных функций и взвешенные функционалы.",
        epilog=expr_parser.__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("--output", metavar="FILE", help="записать отчёт в файл вместо stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rearrange", help="монотонная или симметричная перестановка u")
    _add_common(p, u=True, mode=True, plot=True)
    p.set_defaults(handler=cmd_rearrange)

    p = sub.add_parser("evaluate", help="значение I(a, u)")
    _add_common(p, u=True, weight=True, F=True)
    p.add_argument("--level", type=float, help="дополнительно сравнение Йенсена на уровне v")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("verify", help="сравнение I(a, u) и I(a, u*)")
    _add_common(p, u=True, weight=True, F=True, mode=True, plot=True)
    p.add_argument("--no-conditions", action="store_true", help="не проверять условия на вес")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("check-weight", help="чётность и неравенство на сумму весов (монотонный или симметричный случай)")
    _add_common(p, weight=True)
    p.add_argument("--symmetric", action="store_true", help="проверять условие для симметризации")
    p.add_argument("--nx", type=int, help="число узлов по x")
    p.add_argument("--nv", type=int, help="число уровней v")
    p.add_argument("--zero-level", type=float, help="анализ нулей a(., v) на уровне v")
    p.add_argument("--dk", type=int, help="вычислить D_k для функции --u")
    p.add_argument("--u", help="функция для --dk")
    p.set_defaults(handler=cmd_check_weight)

    p = sub.add_parser("counterexample", help="построить контрпример и проверить знак разности")
    p.add_argument("kind", choices=["asymmetry", "nonconcavity", "symmetric"])
    _add_common(p, weight=True, plot=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--v-bar", type=float, default=0.0)
    p.add_argument("--x-bar", type=float)
    p.add_argument("--A", type=float, help="граница веса; по умолчанию оценивается по сетке")
    p.add_argument("--alpha", type=float)
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("approx", help="липшицево приближение по лестнице порогов")
    p.add_argument("--u", required=True)
    p.add_argument("--weight")
    p.add_argument("--v-range", default="0:1")
    p.add_argument("--F")
    p.add_argument("--ladder", default="4,8,16,32,64")
    p.add_argument("--side", choices=[s.value for s in Side], default="both")
    p.add_argument("--emit-plot", metavar="FILE")
    p.set_defaults(handler=cmd_approx)

    p = sub.add_parser("sweep", help="пакетная проверка на случайных экземплярах")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--mode", choices=[m.value for m in RearrangementMode], default="monotone")
    p.add_argument("--family", choices=[f.value for f in Family], default="admissible")
    p.add_argument("--breakpoints", default="2:64")
    p.add_argument("--values", default="0:1")
    p.add_argument("--plateau-prob", type=float, default=0.3)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--threads", type=int)
    p.add_argument("--table", metavar="FILE", help="CSV с одной строкой на экземпляр")
    p.add_argument("--no-progress", action="store_true")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("parse", help="разобрать выражение")
    p.add_argument("expr")
    p.add_argument("--at", help="значения переменных, например x=0.5,v=1")
    p.set_defaults(handler=cmd_parse)
    return parser


def dispatch(argv: Optional[List[str]] = None, stream=None) -> int:
    """Разбирает аргументы, выполняет подкоманду и печатает отчёт.

    Returns:
        int: 0 - успех, 1 - вердикт не выполнен, 2 - ошибка входных данных.
    """
    stream = sys.stdout if stream is None else stream
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    init_env()
    cfg = get_config()
    handler: Handler = args.handler
    try:
        payload, ok = handler(args, cfg)
    except PreconditionFailed as e:
        logger.error(f"❌ precondition failed: {e}")
        write_report({'error': type(e).__name__, 'message': str(e), 'witness': e.witness},
                     args.format, args.output, stream)
        return EXIT_USAGE
    except (RearrangementLabError, ValueError, OSError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        diag = {'error': type(e).__name__, 'message': str(e)}
        if getattr(e, 'offset', None) is not None:
            diag['offset'] = e.offset
        write_report(diag, args.format, args.output, stream)
        return EXIT_USAGE

    write_report(payload, args.format, args.output, stream)
    if ok:
        logger.info(f"✅ {args.command} done")
        return EXIT_OK
    logger.warning(f"🟧 {args.command}: verdict does not hold")
    return EXIT_VERDICT


def main():
    init_env()
    logging.basicConfig(
        level=get_config()['LOG_LEVEL'],
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )
    sys.exit(dispatch(sys.argv[1:]))

if __name__ == '__main__':
    main()
