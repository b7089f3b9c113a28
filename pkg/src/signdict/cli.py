"""Command-line entry points.

One verb per operator procedure: synth-data, train, eval, check,
predict, sweep-resolution, latency-fit, serve. Usage problems exit 2
(argparse convention); operational failures exit 1 with a diagnostic on
stderr; clean runs exit 0.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="signdict", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-data", help="generate a synthetic labeled dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--noise", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="train a recognizer on a pose dataset")
    p.add_argument("--catalog", required=True)
    p.add_argument("--data", required=True, help="directory of <rendition_id>/*.pose")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--no-augment", action="store_true")

    p = sub.add_parser("eval", help="evaluate a model on a labeled pose dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--test", required=True, help="directory of <rendition_id>/*.pose")
    p.add_argument("--report", help="write the JSON report here")

    p = sub.add_parser("check", help="run the quality gate on a pose file")
    p.add_argument("--pose", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("predict", help="rank catalog entries for one pose file")
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--pose", required=True)
    p.add_argument("--top", type=int, default=7)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep-resolution", help="accuracy across capture resolutions")
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--ratios", default="0.1,0.3,1.0", help="ascending, must end with 1.0")
    p.add_argument("--report", help="write the JSON report here")

    p = sub.add_parser("latency-fit", help="least-squares latency model from observations")
    p.add_argument("--observations", help="JSON observations file (default: packaged data)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--model", default=None)
    p.add_argument("--catalog", default=None)
    p.add_argument("--storage", default=None)
    p.add_argument("--retain-media", action="store_true")
    p.add_argument("--latency-calibration", default=None)

    return parser


def _load_dataset(catalog, data_dir: Path):
    """Stack <rendition_id>/*.pose files into training arrays."""
    from .pose import parse_pose_file

    coords, labels = [], []
    for entry in catalog.entries:
        class_dir = data_dir / entry.rendition_id
        if not class_dir.is_dir():
            continue
        for pose_path in sorted(class_dir.glob("*.pose")):
            seq = parse_pose_file(pose_path.read_text(encoding="utf-8"))
            coords.append(seq.data.astype(np.float32))
            labels.append(catalog.class_index(entry.rendition_id))
    if not coords:
        raise FileNotFoundError(f"no pose files under {data_dir}")
    lengths = {c.shape[0] for c in coords}
    if len(lengths) != 1:
        raise ValueError(f"pose files disagree on frame count: {sorted(lengths)}")
    return np.stack(coords), np.array(labels, dtype=np.int64)


def _cmd_synth_data(args) -> int:
    from .catalog import save_catalog
    from .pose import write_pose_file
    from .synth import synthesize_dataset, synthetic_catalog

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    catalog = synthetic_catalog(args.classes)
    ds = synthesize_dataset(args.classes, args.per_class, args.frames, args.noise, args.seed)
    for i in range(len(ds)):
        entry = catalog.entry(int(ds.labels[i]))
        class_dir = out / entry.rendition_id
        class_dir.mkdir(exist_ok=True)
        (class_dir / f"{int(ds.indices[i]):05d}.pose").write_text(
            write_pose_file(ds.sequence(i)), encoding="utf-8"
        )
    save_catalog(catalog, out / "catalog.tsv")
    print(f"wrote {len(ds)} samples for {args.classes} classes under {out}")
    print(f"catalog: {out / 'catalog.tsv'}")
    return 0


def _cmd_train(args) -> int:
    from .catalog import load_catalog
    from .recognizer import AugmentationConfig, ModelConfig, TrainConfig, save_model, train

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    catalog = load_catalog(args.catalog)
    coords, labels = _load_dataset(catalog, Path(args.data))
    train_cfg = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        seed=args.seed,
        augmentation=None if args.no_augment else AugmentationConfig(),
    )
    model = train(coords, labels, catalog, ModelConfig(), train_cfg)
    save_model(model, args.out)
    print(f"trained on {len(labels)} samples, final loss {model.loss_history[-1]:.4f}")
    print(f"model written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    from .catalog import load_catalog
    from .evalmetrics import evaluation_report, render_report_table
    from .recognizer import load_model, predict_batch

    catalog = load_catalog(args.catalog)
    model = load_model(args.model)
    if not model.matches_catalog(catalog):
        raise ValueError("model fingerprint does not match the catalog")
    coords, labels = _load_dataset(catalog, Path(args.test))
    probs = predict_batch(model, coords)
    report = evaluation_report(probs, labels, catalog)
    print(render_report_table(report))
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2), encoding="utf-8")
        print(f"report written to {args.report}")
    return 0


def _cmd_check(args) -> int:
    from .estimate import FilePoseEstimator
    from .gate import check_technical, check_visibility, gate

    media = Path(args.pose).read_bytes()
    estimator = FilePoseEstimator()
    probe = estimator.probe(media)
    technical = check_technical(probe.byte_status, probe.resolution)
    visibility = []
    if probe.byte_status == "complete":
        visibility = check_visibility(estimator.tracks(media))
    report = gate(technical, visibility)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(f"verdict: {report.verdict}")
        print(report.summary)
        for issue in report.issues:
            print(f"  [{issue.severity}] {issue.code}: {issue.message}")
            print(f"      suggestion: {issue.suggestion}")
    return 0


def _cmd_predict(args) -> int:
    from .catalog import load_catalog
    from .pose import parse_pose_file
    from .ranking import rank
    from .recognizer import load_model, predict

    catalog = load_catalog(args.catalog)
    model = load_model(args.model)
    seq = parse_pose_file(Path(args.pose).read_text(encoding="utf-8"))
    dist = predict(model, seq)
    results = rank(dist, catalog, model)[: args.top]
    if args.json:
        print(json.dumps([r.to_dict() for r in results], indent=2))
    else:
        for r in results:
            print(
                f"{r.rank:>3}. {r.gloss:<16} {r.confidence:<9} p={r.probability:.4f}"
                f"  ({r.metadata.movement}, {r.metadata.hands}-handed, {r.metadata.location})"
            )
    return 0


def _cmd_sweep(args) -> int:
    from .catalog import load_catalog
    from .evalmetrics import resolution_sweep
    from .recognizer import load_model
    from .synth import SynthDataset

    catalog = load_catalog(args.catalog)
    model = load_model(args.model)
    if not model.matches_catalog(catalog):
        raise ValueError("model fingerprint does not match the catalog")
    coords, labels = _load_dataset(catalog, Path(args.test))
    from .pose import parse_pose_file

    # resolution comes from the first pose file's header
    first = sorted(Path(args.test).glob("*/*.pose"))[0]
    seq = parse_pose_file(first.read_text(encoding="utf-8"))
    ds = SynthDataset(
        coords, labels, np.arange(len(labels)), coords.shape[1], 0.0, 0,
        fps=seq.fps, resolution=seq.source_resolution,
    )
    ratios = [float(r) for r in args.ratios.split(",")]
    points = resolution_sweep(model, ds, catalog, ratios)
    for pt in points:
        print(f"ratio {pt.ratio:<5} top1 {pt.top1:.4f} top7 {pt.top7:.4f}")
    if args.report:
        Path(args.report).write_text(
            json.dumps({"sweep": [pt.to_dict() for pt in points]}, indent=2),
            encoding="utf-8",
        )
        print(f"report written to {args.report}")
    return 0


def _cmd_latency_fit(args) -> int:
    from .evalmetrics import latency_fit
    from .service import packaged_latency_observations

    if args.observations:
        doc = json.loads(Path(args.observations).read_text(encoding="utf-8"))
        points = [(float(x), float(y)) for x, y in doc["observations"]]
    else:
        points = packaged_latency_observations()
    model = latency_fit(points)
    if args.json:
        print(json.dumps(model.to_dict(), indent=2))
    else:
        print(
            f"slope {model.slope:.6f} s/s, intercept {model.intercept:.6f} s, "
            f"r^2 {model.r_squared:.6f} over {model.n_points} points"
        )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    env = os.environ
    model_path = args.model or env.get("MODEL_PATH")
    catalog_path = args.catalog or env.get("CATALOG_PATH")
    if not model_path or not catalog_path:
        raise ValueError("--model/--catalog flags or MODEL_PATH/CATALOG_PATH env are required")
    retain = args.retain_media or env.get("RETAIN_MEDIA", "false").lower() in ("1", "true", "yes")
    calibration = args.latency_calibration or env.get("LATENCY_CALIBRATION_PATH")
    config = ServiceConfig(
        storage_dir=Path(args.storage or env.get("STORAGE_DIR", "./submissions")),
        model_path=Path(model_path),
        catalog_path=Path(catalog_path),
        retain_media=retain,
        latency_calibration_path=Path(calibration) if calibration else None,
    )
    port = args.port if args.port is not None else int(env.get("PORT", "8000"))
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


_HANDLERS = {
    "synth-data": _cmd_synth_data,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "check": _cmd_check,
    "predict": _cmd_predict,
    "sweep-resolution": _cmd_sweep,
    "latency-fit": _cmd_latency_fit,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
