import argparse
import sys

from ..analysis.report import localize, save_report
from ..network.network import Network, generate_network, network_summary
from ..network.noise import MeasuredNetwork, apply_noise
from ..network.storage import load_network, save_network
from ..solver.settings import SolveSettings
from ..utils.exceptions import PyEsdpError
from ..utils.logging import get_logger, setup_logging
from ..utils.schemas import METHODS
from ..utils.settings import load_env_settings
from .config import load_config
from .summary import cmd_report
from .support_files import create_support_files
from .sweep import cmd_sweep

logger = get_logger(__name__)

USAGE_ERROR = 2


def cmd_generate(args: argparse.Namespace) -> Network:
    net = generate_network(
        args.sensors,
        args.anchors,
        args.radio,
        max_neighbors=args.max_neighbors,
        seed=args.seed,
        anchor_layout=args.anchor_layout,
    )
    logger.info(f"Generated network: {network_summary(net)}")
    save_network(net, args.out)
    return net


def _measured(args: argparse.Namespace) -> MeasuredNetwork:
    instance = load_network(args.net)
    if isinstance(instance, MeasuredNetwork):
        if args.sigma is not None:
            logger.warning(
                f"{args.net} already holds measurements; re-noising the "
                f"true distances with sigma={args.sigma}"
            )
            return apply_noise(instance.network, args.sigma, args.noise_seed)
        return instance
    return apply_noise(instance, args.sigma or 0.0, args.noise_seed)


def cmd_solve(args: argparse.Namespace):
    mn = _measured(args)
    overrides = {"tolerance": args.tol} if args.tol is not None else {}
    if args.max_iterations is not None:
        overrides["max_iterations"] = args.max_iterations
    settings = SolveSettings.from_env(**overrides)
    p = args.p if args.method == "pesdp" else 0.0
    report = localize(
        mn,
        args.method,
        p,
        settings,
        single_sensor_blocks=args.single_sensor_blocks,
    )
    save_report(report, args.out)
    return report


def _sweep(args: argparse.Namespace):
    config = load_config(args.config)
    out = args.out or config.results_path
    return cmd_sweep(config, out, args.full_scale, args.workers)


def _report(args: argparse.Namespace):
    return cmd_report(args.input, args.out, args.plot_data, args.pairs)


def _init(args: argparse.Namespace):
    return create_support_files(args.dir)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyesdp",
        description="Edge-based SDP sensor network localization.",
    )
    parser.add_argument(
        "--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Write a random network")
    generate.add_argument("--sensors", type=int, required=True)
    generate.add_argument("--anchors", type=int, required=True)
    generate.add_argument("--radio", type=float, required=True)
    generate.add_argument("--max-neighbors", type=int, default=5)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument(
        "--anchor-layout", choices=("random", "symmetric"), default="random"
    )
    generate.add_argument("--out", required=True)
    generate.set_defaults(handler=cmd_generate)

    solve = commands.add_parser("solve", help="Localize one network")
    solve.add_argument("--net", required=True)
    solve.add_argument("--method", choices=METHODS, required=True)
    solve.add_argument("--p", type=float, default=0.1)
    solve.add_argument("--sigma", type=float, default=None)
    solve.add_argument("--noise-seed", type=int, default=0)
    solve.add_argument("--tol", type=float, default=None)
    solve.add_argument("--max-iterations", type=int, default=None)
    solve.add_argument("--single-sensor-blocks", action="store_true")
    solve.add_argument("--out", required=True)
    solve.set_defaults(handler=cmd_solve)

    sweep = commands.add_parser("sweep", help="Run a sweep from a config")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--full-scale", action="store_true")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.set_defaults(handler=_sweep)

    report = commands.add_parser("report", help="Summarize a results CSV")
    report.add_argument("--in", dest="input", required=True)
    report.add_argument("--out", required=True)
    report.add_argument("--plot-data", default=None)
    report.add_argument("--pairs", default=None)
    report.set_defaults(handler=_report)

    init = commands.add_parser("init", help="Write starter config files")
    init.add_argument("--dir", default=".")
    init.set_defaults(handler=_init)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Entry point of the ``pyesdp`` command.

    Returns:
        int: 0 on success, 2 on a usage, configuration or data error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    level = args.log_level or load_env_settings().get("log_level", "INFO")
    setup_logging(level.upper())

    try:
        args.handler(args)
    except PyEsdpError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return USAGE_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
