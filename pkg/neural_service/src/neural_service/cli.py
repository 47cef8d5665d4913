"""Command line entry points: train a model, serve it over HTTP."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .model import HierarchicalTransformer, ModelConfig
from .service import NeuralService, NeuralSolver


def cmd_train(args) -> int:
    import torch

    from .data import load_dataset
    from .train import exact_match_rate, save_checkpoint, train

    cfg = ModelConfig(d_model=args.d_model, ffn_width=args.d_ffn,
                      n_heads=args.heads)
    specs, targets, _ = load_dataset(args.dataset, cfg.max_properties,
                                     cfg.max_property_ast,
                                     cfg.max_target_tokens)
    if not specs:
        print("dataset contains no usable samples", file=sys.stderr)
        return 1
    torch.manual_seed(args.seed)
    model = HierarchicalTransformer(cfg)
    train(model, specs, targets, steps=args.steps,
          batch_size=args.batch_size, seed=args.seed, log_every=50)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(args.out, model)
    rate = exact_match_rate(model, specs, targets)
    print(f"saved {args.out}; training exact-match rate {rate:.2%}")
    return 0


def cmd_serve(args) -> int:
    solver = NeuralSolver(models_dir=args.models_dir)
    service = NeuralService(solver, port=args.port)
    with service:
        print(f"listening on {service.url}", flush=True)
        try:
            while True:
                service._thread.join(1.0)
        except KeyboardInterrupt:
            pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neural-service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a JSONL dataset")
    p.add_argument("dataset")
    p.add_argument("--out", default="models/model.pt")
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-model", type=int, default=64)
    p.add_argument("--d-ffn", type=int, default=128)
    p.add_argument("--heads", type=int, default=2)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("serve", help="serve a trained model over HTTP")
    p.add_argument("--models-dir", default="models")
    p.add_argument("--port", type=int, default=0)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
