"""Command line front end.

Subcommands:
    synth    write a labeled synthetic dataset
    convert  canonicalize an externally tessellated mesh file
    train    fit a checkpoint on a dataset directory
    eval     score a checkpoint against a dataset
    parse    run one command through the grammar or LLM engine
    replay   re-execute an api_calls log against a model file
    serve    start the HTTP service
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .geometry import MeshError, compute_adjacency, validate_model
from .geometry.io import dumps_model, load_model, model_from_dict, save_model
from .geometry.synth import generate_synthetic_dataset


def _cmd_synth(args) -> int:
    manifest = generate_synthetic_dataset(args.count, args.seed, args.out)
    print(json.dumps({"written": len(manifest["models"]),
                      "out": str(args.out)}))
    return 0


def _cmd_convert(args) -> int:
    try:
        raw = json.loads(Path(args.infile).read_text(encoding="utf-8"))
        model = model_from_dict(raw, validate=False)
        if all(not f.neighbor_face_ids for f in model.faces):
            model = compute_adjacency(model, tol=args.tol)
        validate_model(model)
    except (OSError, json.JSONDecodeError, MeshError) as exc:
        print(f"convert failed: {exc}", file=sys.stderr)
        return 1
    save_model(model, args.out)
    print(json.dumps({"faces": model.num_faces, "out": str(args.out)}))
    return 0


def _load_train_configs(path):
    from .encoding.config import EncoderConfig
    from .training import TrainConfig

    raw = {}
    if path:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    train_cfg = TrainConfig.from_dict(raw.get("train", {}))
    encoder_cfg = None
    if raw.get("encoder"):
        encoder_cfg = EncoderConfig.from_dict(raw["encoder"])
    return train_cfg, encoder_cfg


def _cmd_train(args) -> int:
    from .training import load_dataset, split_dataset, train

    train_cfg, encoder_cfg = _load_train_configs(args.config)
    models = load_dataset(args.data)
    if not models:
        print(f"no models found in {args.data}", file=sys.stderr)
        return 1
    train_part, val_part, _test = split_dataset(models, seed=train_cfg.seed)
    _net, metrics = train(train_part, val_part, train_cfg,
                          encoder_config=encoder_cfg,
                          checkpoint_path=args.out)
    print(json.dumps({"checkpoint": str(args.out),
                      "val_iou": metrics.iou_mean,
                      "val_em": metrics.em_rate,
                      "n_train": len(train_part), "n_val": len(val_part)}))
    return 0


def _cmd_eval(args) -> int:
    from .checkpoint import restore_net
    from .training import evaluate, load_dataset

    net, _meta = restore_net(args.ckpt)
    models = load_dataset(args.data)
    if not models:
        print(f"no models found in {args.data}", file=sys.stderr)
        return 1
    report = evaluate(net, models)
    report.save(args.report)
    print(json.dumps({"iou_mean": report.iou_mean, "em_rate": report.em_rate,
                      "ordered_em_rate": report.ordered_em_rate,
                      "n_samples": report.n_samples,
                      "report": str(args.report)}))
    return 0


def _cmd_parse(args) -> int:
    from .parsing.grammar import parse_with_grammar
    from .parsing.llm import LlmClient, LlmConfigError, parse_with_llm
    from .service.config import ServiceConfig

    if args.engine == "grammar":
        res = parse_with_grammar(args.text)
    else:
        cfg = ServiceConfig.from_env()
        try:
            client = LlmClient(cfg.llm_endpoint, cfg.llm_model)
        except LlmConfigError as exc:
            print(f"llm engine unavailable: {exc} "
                  "(set SDM_LLM_ENDPOINT / SDM_LLM_MODEL)", file=sys.stderr)
            return 1
        res = parse_with_llm(args.text, client)
    if not res.ok:
        print(f"parse failed: {res.failure}", file=sys.stderr)
        return 1
    got = res.structured.to_dict()
    print(json.dumps(got, indent=2))
    if args.gold:
        gold = json.loads(Path(args.gold).read_text(encoding="utf-8"))
        if got != gold:
            print("gold mismatch", file=sys.stderr)
            return 1
        print("gold match", file=sys.stderr)
    return 0


def _cmd_replay(args) -> int:
    from .editing import EditError, replay

    try:
        model = load_model(args.model)
        calls = json.loads(Path(args.calls).read_text(encoding="utf-8"))
        if not isinstance(calls, list):
            raise EditError("calls file must hold a JSON list")
        result = replay(model, calls)
    except (OSError, json.JSONDecodeError, MeshError, EditError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 1
    if args.out:
        save_model(result, args.out)
        print(json.dumps({"faces": result.num_faces, "out": str(args.out)}))
    else:
        print(dumps_model(result))
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, run

    cfg = ServiceConfig.from_env()
    if args.port is not None:
        cfg.port = args.port
    run(cfg, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdm",
                                description="semantic direct modeling workbench")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("synth", help="write a labeled synthetic dataset")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=_cmd_synth)

    s = sub.add_parser("convert", help="canonicalize an external mesh file")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(fn=_cmd_convert)

    s = sub.add_parser("train", help="train a checkpoint")
    s.add_argument("--data", required=True)
    s.add_argument("--config", default=None,
                   help="JSON file with optional 'train' and 'encoder' sections")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=_cmd_train)

    s = sub.add_parser("eval", help="score a checkpoint on a dataset")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--report", required=True)
    s.set_defaults(fn=_cmd_eval)

    s = sub.add_parser("parse", help="parse one designer command")
    s.add_argument("--text", required=True)
    s.add_argument("--engine", choices=("grammar", "llm"), default="grammar")
    s.add_argument("--gold", default=None,
                   help="JSON file with the expected structured command")
    s.set_defaults(fn=_cmd_parse)

    s = sub.add_parser("replay", help="re-execute an api_calls log")
    s.add_argument("--model", required=True)
    s.add_argument("--calls", required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=_cmd_replay)

    s = sub.add_parser("serve", help="start the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=None)
    s.set_defaults(fn=_cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
