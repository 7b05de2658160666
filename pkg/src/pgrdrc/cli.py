"""Command-line front end: featurize, fit, tune, predict, evaluate, synth, split.

Exit codes: 0 success, 1 input error, 2 usage error, 3 internal invariant failure.
Each run emits one JSON run manifest, written to ``--manifest`` if given,
otherwise as a single line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import density, kernels
from .dataset import load_csv, save_csv, split
from .errors import InputError
from .featurize import GridSpec, featurize, label_grids
from .layout import parse_layout, save_layout
from .metrics import evaluate
from .synthgen import SynthConfig, generate_layout, generate_tabular
from .tuner import OBJECTIVES, TuneConfig, tune

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class RunManifest:
    command: str
    inputs: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    seed: int | None = None
    outputs: dict = field(default_factory=dict)
    duration_s: float = 0.0
    exit_code: int = EXIT_OK


class _Run:
    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.manifest = RunManifest(args.command, seed=args.seed)

    def say(self, msg: str = "") -> None:
        # --json keeps stdout machine-readable
        if not (self.args.quiet or self.args.json):
            print(msg)

    def timed(self, label: str, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        dt = time.perf_counter() - t0
        self.manifest.parameters.setdefault("stage_seconds", {})[label] = dt
        self.say(f"[{label}] {dt:.3f} s")
        return out


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def cmd_featurize(run: _Run) -> int:
    a = run.args
    run.manifest.inputs["layout"] = a.layout
    run.manifest.parameters.update(rows=a.rows, cols=a.cols)
    grid = GridSpec(a.rows, a.cols)
    layout = run.timed("parse", parse_layout, a.layout)
    ds = run.timed("featurize", featurize, layout, grid)
    if layout.violations:
        ds = label_grids(layout, grid, ds)
    save_csv(ds, a.output)
    run.manifest.outputs["csv"] = a.output
    run.say(f"wrote {len(ds)} grids to {a.output}")
    return EXIT_OK


def cmd_fit(run: _Run) -> int:
    a = run.args
    run.manifest.inputs["train"] = a.train
    ds = load_csv(a.train)
    if ds.is_labeled and (ds.labels == 1).any():
        i = int(np.flatnonzero(ds.labels == 1)[0])
        raise InputError(f"{a.train}: row {i + 2}: training data must be violation-free (drv=1)")
    model = run.timed("fit", density.fit, ds)
    density.save_model(model, a.output)
    run.manifest.outputs["model"] = a.output
    if a.json:
        print(json.dumps(density.model_to_dict(model)))
    else:
        run.say(f"{'feature':<22s}{'transform':<24s}{'mu':>14s}{'sigma2':>14s}")
        for name in model.active:
            t = model.transforms[name]
            tdesc = t.kind if t.offset is None else f"{t.kind}({t.offset:.4g})"
            p = model.params[name]
            run.say(f"{name:<22s}{tdesc:<24s}{p.mu:>14.6g}{p.sigma2:>14.6g}")
        for name in model.dropped:
            run.say(f"{name:<22s}dropped (constant in training)")
    return EXIT_OK


def cmd_tune(run: _Run) -> int:
    a = run.args
    run.manifest.inputs.update(model=a.model, validation=a.validation)
    run.manifest.parameters["objective"] = a.objective
    model = density.load_model(a.model)
    val = load_csv(a.validation)
    res = run.timed("tune", tune, model, val, TuneConfig(a.objective))
    out = a.output or a.model
    density.save_model(model.with_threshold(res.log_epsilon), out)
    run.manifest.outputs["model"] = out
    if a.sweep_csv:
        res.write_sweep_csv(a.sweep_csv)
        run.manifest.outputs["sweep_csv"] = a.sweep_csv
    if a.json:
        print(json.dumps({"log_epsilon": res.log_epsilon, a.objective: res.objective_value}))
    else:
        run.say(f"log_epsilon = {res.log_epsilon!r}  ({a.objective} = {res.objective_value:.6f})")
    return EXIT_OK


def cmd_predict(run: _Run) -> int:
    a = run.args
    run.manifest.inputs.update(model=a.model, data=a.data)
    model = density.load_model(a.model)
    if not model.is_tuned:
        raise InputError(f"{a.model}: model not tuned; run 'pgrdrc tune' first")
    ds = load_csv(a.data)
    scores = run.timed("score", density.score, model, ds)
    preds = density.predict_scores(model, scores)
    ids = ds.grid_ids if ds.grid_ids is not None else [str(i) for i in range(len(ds))]
    with Path(a.output).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["grid_id", "score", "prediction"])
        for g, s, p in zip(ids, scores.tolist(), preds.tolist()):
            w.writerow([g, repr(s), p])
    run.manifest.outputs["predictions"] = a.output
    run.say(f"flagged {int(preds.sum())} of {len(ds)} grids; wrote {a.output}")
    return EXIT_OK


def cmd_evaluate(run: _Run) -> int:
    a = run.args
    run.manifest.inputs.update(model=a.model, data=a.data)
    model = density.load_model(a.model)
    if not model.is_tuned:
        raise InputError(f"{a.model}: model not tuned; run 'pgrdrc tune' first")
    ds = load_csv(a.data)
    if not ds.is_labeled:
        raise InputError(f"{a.data}: evaluation needs a 'drv' label column")
    preds = run.timed("predict", density.predict, model, ds)
    rep = evaluate(ds.labels, preds)
    if a.output:
        Path(a.output).write_text(json.dumps(rep.to_dict(), indent=2) + "\n", encoding="utf-8")
        run.manifest.outputs["report"] = a.output
    if a.json:
        print(json.dumps(rep.to_dict()))
    else:
        run.say(rep.render())
    return EXIT_OK


def cmd_synth(run: _Run) -> int:
    a = run.args
    if a.mode == "tabular":
        cfg = SynthConfig(
            seed=a.seed,
            n_negatives=a.negatives,
            n_positives=a.positives,
            n_features=a.features,
            shift_sigmas=a.shift,
            min_shifted=a.min_shifted,
        )
        ds = run.timed("generate", generate_tabular, cfg)
        save_csv(ds, a.output)
        run.say(f"wrote {len(ds)} samples to {a.output}")
    else:
        cfg = SynthConfig(
            seed=a.seed,
            die_size=a.die_size,
            rows=a.rows,
            cols=a.cols,
            n_cells=a.cells,
            utilization=a.utilization,
            n_hotspots=a.hotspots,
            hotspot_multiplier=a.multiplier,
        )
        layout = run.timed("generate", generate_layout, cfg)
        save_layout(layout, a.output)
        run.say(f"wrote layout with {len(layout.cells)} cells, {len(layout.pins)} pins to {a.output}")
    run.manifest.parameters.update(asdict(cfg), mode=a.mode)
    run.manifest.outputs[a.mode] = a.output
    return EXIT_OK


def cmd_split(run: _Run) -> int:
    a = run.args
    run.manifest.inputs["data"] = a.data
    parts = split(load_csv(a.data), a.seed)
    for name in ("train", "validation", "test"):
        ds = getattr(parts, name)
        path = f"{a.out_prefix}_{name}.csv"
        if len(ds):
            save_csv(ds, path)
            run.manifest.outputs[name] = path
        run.say(f"{name:<11s}{len(ds):>8d} samples" + ("" if len(ds) else " (not written)"))
    return EXIT_OK


COMMANDS = {
    "featurize": cmd_featurize,
    "fit": cmd_fit,
    "tune": cmd_tune,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "split": cmd_split,
}


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    p.add_argument("--quiet", action="store_true", default=d(False), help="suppress summaries")
    p.add_argument("--manifest", default=d(None), help="write the run manifest here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgrdrc", description="Unsupervised pre-global-routing DRC hotspot prediction."
    )
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", parents=[common], help="layout JSON -> grid feature CSV")
    p.add_argument("layout")
    p.add_argument("--rows", type=_positive_int, required=True)
    p.add_argument("--cols", type=_positive_int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit a density model on violation-free data")
    p.add_argument("train")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("tune", parents=[common], help="choose the threshold on validation data")
    p.add_argument("model")
    p.add_argument("validation")
    p.add_argument("--objective", choices=OBJECTIVES, default="f1")
    p.add_argument("-o", "--output", help="tuned model path (default: overwrite MODEL)")
    p.add_argument("--sweep-csv", help="write candidate,tp,fp,fn,tn,objective diagnostics")

    p = sub.add_parser("predict", parents=[common], help="score and flag grids")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="confusion matrix and metrics")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("-o", "--output", help="also write the JSON report here")

    p = sub.add_parser("synth", parents=[common], help="generate synthetic data")
    p.add_argument("--mode", choices=("tabular", "layout"), default="tabular")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--negatives", type=int, default=1000)
    p.add_argument("--positives", type=int, default=10)
    p.add_argument("--features", type=_positive_int, default=10)
    p.add_argument("--shift", type=float, default=6.0, help="anomaly shift in sigmas")
    p.add_argument("--min-shifted", type=_positive_int, default=None)
    p.add_argument("--die-size", type=_positive_int, default=100_000, help="nm")
    p.add_argument("--rows", type=_positive_int, default=4)
    p.add_argument("--cols", type=_positive_int, default=4)
    p.add_argument("--cells", type=int, default=200)
    p.add_argument("--utilization", type=float, default=0.5)
    p.add_argument("--hotspots", type=int, default=1)
    p.add_argument("--multiplier", type=float, default=3.0)

    p = sub.add_parser("split", parents=[common], help="70/15/15 negatives, 30/70 positives")
    p.add_argument("data")
    p.add_argument("--out-prefix", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = _Run(args)
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](run)
    except InputError as exc:
        print(f"pgrdrc {args.command}: error: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    except Exception as exc:  # invariant broken somewhere below
        print(f"pgrdrc {args.command}: internal error: {exc!r}", file=sys.stderr)
        code = EXIT_INTERNAL
    run.manifest.duration_s = time.perf_counter() - t0
    run.manifest.exit_code = code
    run.manifest.parameters.setdefault("kernel_backend", kernels.BACKEND)
    text = json.dumps(asdict(run.manifest))
    if args.manifest:
        Path(args.manifest).write_text(text + "\n", encoding="utf-8")
    else:
        print(text, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
