"""`gen-data`: write a synthetic demand panel."""

import argparse
from collections import Counter

import structlog

from src.cli.common import EXIT_OK, positive_int, resolve_path
from src.core.config import settings
from src.forecasting.datagen import GenSpec, classify_demand, generate, write_csv

logger = structlog.get_logger()


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("gen-data", help="generate synthetic service-parts demand")
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--series", type=positive_int, default=50)
    parser.add_argument("--weeks", type=positive_int, default=260)
    parser.add_argument(
        "--class",
        dest="demand_class",
        choices=["mixed", "intermittent", "non-intermittent"],
        default="mixed",
    )
    parser.add_argument("--p", type=float, default=0.3, help="weekly demand probability of intermittent parts")
    parser.add_argument("--k", type=positive_int, default=26, help="input weeks the data must cover")
    parser.add_argument("--g", type=positive_int, default=26, help="horizon weeks the data must cover")
    parser.add_argument("--out", required=True, help="output CSV")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = GenSpec(
        seed=args.seed,
        n_series=args.series,
        weeks=args.weeks,
        demand_class=args.demand_class,
        occurrence_p=args.p,
        input_weeks=args.k,
        horizon_weeks=args.g,
    )
    panel = generate(spec)
    path = resolve_path(args.out)
    write_csv(panel, path)

    classes = Counter(classify_demand(row) for row in panel.demand_matrix())
    print(
        f"wrote {len(panel.frame)} rows ({panel.n_series} series x {panel.n_weeks} weeks) to {path}; "
        f"intermittent={classes['intermittent']} non-intermittent={classes['non-intermittent']}"
    )
    logger.info("gen-data complete", path=str(path), rows=len(panel.frame))
    return EXIT_OK
