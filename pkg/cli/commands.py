"""
Подкоманды командной строки octa-affine
Данные пишутся в stdout или в файл -o, диагностика только в stderr через logging
"""

import argparse
import logging
from typing import Callable, Dict, List, Optional

from analyzer.affine_decision import Verdict, decide, decide_with_labelings
from config.settings import GenConfig, Tolerances, get_settings, get_settings_summary
from core.conditions import evaluate
from core.errors import (
    DevelopmentError,
    EmbeddingError,
    FormatError,
    GenerationError,
    GeometryError,
    OctaError,
    SolverError,
)
from core.io_formats import (
    dump_development,
    dump_octahedron,
    dumps,
    load_json,
    parse_development,
    parse_diagonals,
    parse_octahedron,
    write_output,
)
from core.octa_model import EDGE_KEYS, develop, is_convex, is_hull_facet_set
from genkit.generator import perturb_development, random_convex_octahedron
from solver.reconstruct import reconstruct


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INVALID = 2
EXIT_FAILURE = 3
EXIT_INDETERMINATE = 4

VERDICT_EXIT = {
    Verdict.EQUIVALENT: EXIT_OK,
    Verdict.NOT_EQUIVALENT: EXIT_NOT_EQUIVALENT,
    Verdict.INDETERMINATE: EXIT_INDETERMINATE,
}


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидалось число, получено '{text}'")
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"значение должно быть в интервале (0, 1), получено {value}")
    return value


def _tolerances(args: argparse.Namespace) -> Tolerances:
    """Допуски из настроек с учетом флагов командной строки"""
    tol = get_settings().tolerances.with_overrides(
        eps_rel=args.tol_rel,
        eps_geom=args.tol_geom,
        alpha_yes=args.alpha_yes,
        alpha_no=args.alpha_no,
    )
    errors = tol.validate()
    if errors:
        raise FormatError("; ".join(errors))
    return tol


def _emit(args: argparse.Namespace, payload: Dict) -> None:
    write_output(dumps(payload, pretty=args.pretty), args.output)


def _load_development(path: str):
    return parse_development(load_json(path))


# ---------- обработчики подкоманд ----------

def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        dev = _load_development(args.path)
    except DevelopmentError as e:
        _emit(args, {"valid": False, "errors": e.violations})
        for violation in e.violations:
            logger.error(f"❌ {violation}")
        return EXIT_INVALID
    except FormatError as e:
        _emit(args, {"valid": False, "errors": [str(e)]})
        logger.error(f"❌ {e}")
        return EXIT_INVALID

    _emit(args, {"valid": True, "errors": [], "scale": dev.scale})
    logger.info("✅ Развертка корректна")
    return EXIT_OK


def _cmd_reconstruct(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    result = reconstruct(_load_development(args.path), tol)
    _emit(args, result.to_dict())

    if not result.is_unique:
        logger.error(f"❌ Восстановление: {result.status}")
        return EXIT_FAILURE
    logger.info(f"✅ Диагонали: {result.diagonals.as_dict()}")
    return EXIT_OK


def _cmd_decide(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    dev_a = _load_development(args.path_a)
    dev_b = _load_development(args.path_b)

    if args.search_labelings:
        decision = decide_with_labelings(dev_a, dev_b, tol)
    else:
        decision = decide(dev_a, dev_b, tol)
    _emit(args, decision.to_dict())

    if not all(r.is_unique for r in decision.reconstructions):
        logger.error("❌ Не удалось однозначно восстановить оба октаэдра")
        return EXIT_FAILURE

    logger.info(f"✅ Вердикт: {decision.verdict}")
    if args.exit_on_verdict:
        return VERDICT_EXIT[decision.verdict]
    return EXIT_OK


def _cmd_develop(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    oct = parse_octahedron(load_json(args.path))

    if args.require_convex:
        convexity = is_convex(oct, tol)
        if not convexity.is_convex or not is_hull_facet_set(oct):
            logger.error(f"❌ Октаэдр не выпуклый: {convexity.to_dict()}")
            return EXIT_INVALID

    _emit(args, dump_development(develop(oct)))
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace) -> int:
    settings = get_settings()
    cfg = GenConfig(
        seed=args.seed if args.seed is not None else settings.SEED,
        noise=args.noise if args.noise is not None else settings.NOISE,
        max_rejections=settings.MAX_REJECTIONS,
    )
    errors = cfg.validate()
    if errors:
        raise FormatError("; ".join(errors))

    oct = random_convex_octahedron(cfg, args.index, _tolerances(args))
    payload = dump_development(develop(oct)) if args.as_development else dump_octahedron(oct)
    _emit(args, payload)
    return EXIT_OK


def _cmd_perturb(args: argparse.Namespace) -> int:
    dev = perturb_development(_load_development(args.path), args.edge, args.factor)
    _emit(args, dump_development(dev))
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    dev = _load_development(args.path)

    if args.diagonals:
        diag = parse_diagonals(load_json(args.diagonals))
    else:
        result = reconstruct(dev, tol)
        if not result.is_unique:
            _emit(args, {"status": result.status, "diagnostics": result.outcome.to_dict()})
            logger.error(f"❌ Восстановление: {result.status}")
            return EXIT_FAILURE
        diag = result.diagonals

    report = evaluate(dev, diag, tol, variant=args.group2_variant)
    _emit(args, report.to_dict())
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "validate": _cmd_validate,
    "reconstruct": _cmd_reconstruct,
    "decide": _cmd_decide,
    "develop": _cmd_develop,
    "generate": _cmd_generate,
    "perturb": _cmd_perturb,
    "report": _cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rel", type=_unit_interval, help="граница невязок равенств")
    common.add_argument("--tol-geom", type=_unit_interval, help="полоса marginal для неравенств")
    common.add_argument("--alpha-yes", type=_unit_interval, help="разброс отношений для equivalent")
    common.add_argument("--alpha-no", type=_unit_interval, help="разброс отношений для not_equivalent")
    common.add_argument("--seed", type=int, help="seed генератора")
    common.add_argument("--pretty", action="store_true", help="JSON с отступами")
    common.add_argument("-o", "--output", help="файл результата (по умолчанию stdout)")
    common.add_argument("-v", "--verbose", action="store_true", help="подробный лог")

    parser = argparse.ArgumentParser(
        prog="octa-affine",
        description="Восстановление выпуклых октаэдров по разверткам и проверка аффинной эквивалентности",
    )
    parser.add_argument("--show-config", action="store_true", help="показать настройки и выйти")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("validate", parents=[common], help="проверить развертку")
    p.add_argument("path")

    p = sub.add_parser("reconstruct", parents=[common], help="восстановить диагонали и координаты")
    p.add_argument("path")

    p = sub.add_parser("decide", parents=[common], help="аффинная эквивалентность двух разверток")
    p.add_argument("path_a")
    p.add_argument("path_b")
    p.add_argument("--search-labelings", action="store_true", help="перебрать 48 нумераций второй развертки")
    p.add_argument("--exit-on-verdict", action="store_true",
                   help="код выхода по вердикту: equivalent 0, not_equivalent 1, indeterminate 4")

    p = sub.add_parser("develop", parents=[common], help="развертка октаэдра из octa-geom/1")
    p.add_argument("path")
    p.add_argument("--require-convex", action="store_true", help="отказ для невыпуклого октаэдра")

    p = sub.add_parser("generate", parents=[common], help="случайный выпуклый октаэдр")
    p.add_argument("--index", type=int, default=0, help="номер экземпляра для данного seed")
    p.add_argument("--noise", type=float, help="амплитуда возмущения")
    p.add_argument("--as-development", action="store_true", help="вывести развертку вместо координат")

    p = sub.add_parser("perturb", parents=[common], help="умножить одно ребро развертки")
    p.add_argument("path")
    p.add_argument("--edge", required=True, choices=EDGE_KEYS)
    p.add_argument("--factor", required=True, type=float)

    p = sub.add_parser("report", parents=[common], help="значения всех условий групп 1-2")
    p.add_argument("path")
    p.add_argument("--diagonals", help="файл с диагоналями (octa-diag/1 или результат reconstruct)")
    p.add_argument("--group2-variant", choices=("prose", "displayed"), default="prose")

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Точка входа CLI; возвращает код выхода"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.show_config:
        write_output(dumps(get_settings_summary(), pretty=True))
        return EXIT_OK

    if not args.command:
        parser.print_usage()
        return EXIT_INVALID

    verbose = getattr(args, "verbose", False)
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return COMMANDS[args.command](args)
    except (FormatError, DevelopmentError, GeometryError, KeyError, ValueError) as e:
        logger.error(f"❌ Некорректные входные данные: {e}")
        return EXIT_INVALID
    except (SolverError, EmbeddingError, GenerationError) as e:
        logger.error(f"❌ Вычисление не завершено: {e}")
        return EXIT_FAILURE
    except OctaError as e:
        logger.error(f"❌ {e}")
        return EXIT_FAILURE
    except Exception as e:
        if verbose:
            logger.exception("Непредвиденная ошибка")
        else:
            logger.error(f"❌ Непредвиденная ошибка: {e}")
        return EXIT_FAILURE
