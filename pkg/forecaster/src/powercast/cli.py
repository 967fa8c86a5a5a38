"""Command line: train a profile model, predict a horizon, merge forecasts."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import merge_forecast_csvs, read_history_csv, write_forecast_csv
from .model import (TrainingSpec, load_checkpoint, predict_open_loop,
                    save_checkpoint, train)


def cmd_train(args) -> int:
    history = read_history_csv(args.input)
    spec = TrainingSpec(max_epochs=args.epochs, hidden_units=args.hidden,
                        seed=args.seed)
    checkpoint, losses = train(history, spec)
    save_checkpoint(args.out, checkpoint, losses)
    print(json.dumps({"model": str(args.out),
                      "train_days": checkpoint["train_days"],
                      "final_loss": losses[-1]}, indent=2))
    return 0


def cmd_predict(args) -> int:
    net, scale, spec = load_checkpoint(args.model)
    history = read_history_csv(args.history)
    preds = predict_open_loop(net, scale, spec, history, args.slots)
    node_id = args.node_id or Path(args.history).stem
    write_forecast_csv(args.out, node_id, args.kind, preds)
    print(args.out)
    return 0


def cmd_merge(args) -> int:
    merge_forecast_csvs(args.out, args.inputs)
    print(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powercast",
        description="Recurrent next-slot forecaster for 15-minute power series")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on one profile's history")
    p.add_argument("--input", required=True, help="meter CSV")
    p.add_argument("--out", required=True, help="model checkpoint path")
    p.add_argument("--epochs", type=int, default=TrainingSpec.max_epochs)
    p.add_argument("--hidden", type=int, default=TrainingSpec.hidden_units)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="open-loop forecasts for the last N slots")
    p.add_argument("--model", required=True)
    p.add_argument("--history", required=True, help="meter CSV including the horizon")
    p.add_argument("--slots", type=int, required=True)
    p.add_argument("--kind", choices=("generation", "load"), required=True)
    p.add_argument("--node-id", default=None,
                   help="node id for the forecast rows (default: file stem)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("merge", help="combine single-profile forecast files")
    p.add_argument("--out", required=True)
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_merge)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
