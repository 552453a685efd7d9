"""
Command-line front end: convolve, qconvolve, reshape, resources, compare.

Every output file embeds a run manifest. Exit status 0 means success;
flag, parse, shape and estimation errors each have their own status (see
app.core.errors).
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .core.errors import EXIT_INTERNAL, EXIT_OK, FlagError, QConvError
from .core.logging import configure_logging
from .models.tensor import ConvShape
from .services import reporting, runs
from .services.engine import resource_report
from .services.storage import build_manifest, load_results, load_tensor, tensor_dict, write_json

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FlagError(message)


def _add_geometry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stride", type=int, default=1, help="window step in pixels (default 1)")
    p.add_argument("--pad", type=int, default=0, help="zero padding in pixels (default 0)")


def _add_plan(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--shots", type=int, default=None, help="shots per entry (default: from epsilon/delta)")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--strategy", choices=["aa", "sparse-aa", "aqram", "parallel-aqram"], default="aqram")
    p.add_argument("--parallel-units", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qconv", description="Quantum convolution simulator and cost model")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convolve", help="classical reference convolution")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel", required=True)
    _add_geometry(p)
    p.add_argument("--out")

    p = sub.add_parser("qconvolve", help="simulated quantum convolution")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel", required=True)
    _add_geometry(p)
    _add_plan(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--circuit", choices=["swap", "interference"], default="interference")
    p.add_argument("--batched", action="store_true")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--out")

    p = sub.add_parser("reshape", help="dump the reshaped kernel (or the Toeplitz baseline)")
    p.add_argument("--kernel", required=True)
    p.add_argument("--input", help="input tensor; fixes H and W, required for --baseline toeplitz")
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--image", type=int, default=0, help="batch index for the toeplitz baseline")
    _add_geometry(p)
    p.add_argument("--baseline", choices=["dbt", "toeplitz"], default="dbt")
    p.add_argument("--out")

    p = sub.add_parser("resources", help="qubit counts, preparation costs and comparison table")
    p.add_argument("--batch", type=int, default=1, help="N")
    p.add_argument("--height", type=int, required=True, help="H")
    p.add_argument("--width", type=int, required=True, help="W")
    p.add_argument("--channels", type=int, default=1, help="C")
    p.add_argument("--kernel-height", type=int, required=True, help="R")
    p.add_argument("--kernel-width", type=int, required=True, help="S")
    p.add_argument("--filters", type=int, default=1, help="M")
    _add_geometry(p)
    _add_plan(p)
    p.add_argument("--copies", type=int, default=None, help="state copies C for the cost formulas")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="tabulate errors, shots and ledger costs across result files")
    p.add_argument("results", nargs="+")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--out")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _manifest(command: str, config: Dict, seed: Optional[int], inputs: Dict[str, str]) -> Dict:
    return build_manifest(command, config, seed, inputs).model_dump()


def cmd_convolve(args) -> None:
    x, k = load_tensor(args.input), load_tensor(args.kernel)
    y = runs.run_convolve(x, k, args.stride, args.pad)
    payload = tensor_dict(y)
    payload["manifest"] = _manifest("convolve", {"stride": args.stride, "pad": args.pad}, None,
                                    {"input": args.input, "kernel": args.kernel})
    _emit(write_json(None, payload), args.out)


def cmd_qconvolve(args) -> None:
    x, k = load_tensor(args.input), load_tensor(args.kernel)
    shape = runs.make_shape(x, k, args.stride, args.pad)
    cfg = runs.build_config(
        shape, mode=args.mode, shots=args.shots, epsilon=args.epsilon, delta=args.delta,
        seed=args.seed, circuit=args.circuit, strategy=args.strategy,
        parallel_units=args.parallel_units, batched=args.batched,
        entries=runs.encodable_entries(x, k, shape),
    )
    payload = runs.run_qconvolve(x, k, cfg, top_k=args.top_k)
    config = dict(cfg.to_dict(), top_k=args.top_k)
    payload["manifest"] = _manifest("qconvolve", config, cfg.plan.seed,
                                    {"input": args.input, "kernel": args.kernel})
    _emit(write_json(None, payload), args.out)


def cmd_reshape(args) -> None:
    k = load_tensor(args.kernel)
    x = load_tensor(args.input) if args.input else None
    out = runs.run_reshape(k, args.height, args.width, args.stride, args.pad,
                           baseline=args.baseline, x=x, image=args.image)
    payload = out.model_dump()
    inputs = {"kernel": args.kernel}
    if args.input:
        inputs["input"] = args.input
    config = {"baseline": args.baseline, "stride": args.stride, "pad": args.pad,
              "height": args.height, "width": args.width, "image": args.image}
    payload["manifest"] = _manifest("reshape", config, None, inputs)
    _emit(write_json(None, payload), args.out)


def cmd_resources(args) -> None:
    shape = ConvShape(
        N=args.batch, H=args.height, W=args.width, C=args.channels,
        R=args.kernel_height, S=args.kernel_width, M=args.filters,
        stride_h=args.stride, stride_w=args.stride, pad_h=args.pad, pad_w=args.pad,
    )
    cfg = runs.build_config(shape, mode=args.mode, shots=args.shots, epsilon=args.epsilon,
                            delta=args.delta, seed=0 if args.mode == "sampled" else None,
                            strategy=args.strategy, parallel_units=args.parallel_units)
    report = resource_report(shape, cfg, copies=args.copies)
    if args.format == "text":
        _emit(reporting.render_resources(report), args.out)
        return
    payload = report.model_dump()
    payload["manifest"] = _manifest("resources", dict(cfg.to_dict(), copies=args.copies), None, {})
    _emit(write_json(None, payload), args.out)


def cmd_compare(args) -> None:
    results = load_results(args.results)
    rows = reporting.compare_rows(results, [Path(p).name for p in args.results])
    render = reporting.render_csv if args.format == "csv" else reporting.render_text
    _emit(render(rows, reporting.COMPARE_COLUMNS), args.out)


_COMMANDS = {
    "convolve": cmd_convolve,
    "qconvolve": cmd_qconvolve,
    "reshape": cmd_reshape,
    "resources": cmd_resources,
    "compare": cmd_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)
    except QConvError as e:
        print(f"qconv: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception("internal error")
        print(f"qconv: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
