"""Command-line front end: prep, train, eval, predict, bench.

Exit codes: 0 success, 2 usage errors, 3 data/config errors, 4 numeric
errors. Every run writes a key/value manifest next to its primary output so
the run can be reproduced from the manifest alone.
"""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__, model_io
from .encoding import TabularEncoder
from .errors import DataError, Ids1dError, NumericError
from .metrics import compute_metrics, confusion, predict_proba, timed_inference
from .pipeline import PrepSchema, class_stats, clean, load_csv, stratified_split_indices
from .trainer import TrainConfig, train

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

SCHEMA_KEYS = {"label_column", "drop_columns", "categorical_columns",
               "normalization", "delimiter", "cardinality_cap"}
TRAIN_KEYS = {"epochs", "batch_size", "learning_rate", "dropout_rate",
              "conv_filters", "kernel_len", "pool_len", "dense_units",
              "seed", "validation_fraction", "train_fraction"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# flat key/value config files


def parse_kv_file(path: str | Path) -> dict[str, str]:
    """`key = value` lines; '#' starts a comment; lists are comma-separated."""
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _as_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def schema_from_kv(kv: dict[str, str]) -> PrepSchema:
    if "label_column" not in kv:
        raise UsageError("schema is missing required key 'label_column'")
    cats = kv.get("categorical_columns", "auto")
    return PrepSchema(
        label_column=kv["label_column"],
        drop_columns=_as_list(kv.get("drop_columns", "")),
        categorical_columns=None if cats == "auto" else _as_list(cats),
        normalization=kv.get("normalization", "zscore"),
    )


def train_config_from_kv(kv: dict[str, str]) -> TrainConfig:
    defaults = TrainConfig()
    return TrainConfig(
        epochs=int(kv.get("epochs", defaults.epochs)),
        batch_size=int(kv.get("batch_size", defaults.batch_size)),
        learning_rate=float(kv.get("learning_rate", defaults.learning_rate)),
        dropout_rate=float(kv.get("dropout_rate", defaults.dropout_rate)),
        conv_filters=tuple(int(v) for v in _as_list(
            kv.get("conv_filters", "64,128,256"))),
        kernel_len=int(kv.get("kernel_len", defaults.kernel_len)),
        pool_len=int(kv.get("pool_len", defaults.pool_len)),
        dense_units=int(kv.get("dense_units", defaults.dense_units)),
        seed=int(kv.get("seed", defaults.seed)),
        validation_fraction=float(kv.get("validation_fraction",
                                         defaults.validation_fraction)),
    )


def write_manifest(path: Path, subcommand: str, values: dict, started: str) -> None:
    lines = [
        f"subcommand = {subcommand}",
        f"toolchain = ids1d {__version__}",
        f"started = {started}",
        f"finished = {datetime.now(timezone.utc).isoformat()}",
    ]
    lines += [f"{k} = {v}" for k, v in values.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# subcommands


def cmd_prep(args) -> int:
    started = _now()
    kv = parse_kv_file(args.schema)
    schema = schema_from_kv(kv)
    table = load_csv(args.input, delimiter=kv.get("delimiter", ","))
    cleaned, stats = clean(table, schema)

    cleaned.to_csv(args.output, index=False)
    enc = TabularEncoder(schema, int(kv.get("cardinality_cap", 64))).fit(cleaned)
    labels = enc.encode_labels(cleaned)
    class_stats(labels, enc.label_names_).to_csv(args.stats_out, index=False)

    print(f"rows in: {stats.rows_in}")
    print(f"rows dropped (missing values): {stats.dropped_nan}")
    print(f"rows dropped (duplicates): {stats.dropped_duplicates}")
    print(f"rows out: {stats.rows_out}")
    print(f"encoded features: {len(enc.feature_names_)}  classes: {len(enc.label_names_)}")
    write_manifest(Path(args.output).with_suffix(".manifest.txt"), "prep", {
        "input": args.input, "schema": args.schema, "output": args.output,
        "stats_out": args.stats_out, "rows_out": stats.rows_out,
    }, started)
    return 0


def cmd_train(args) -> int:
    started = _now()
    kv = parse_kv_file(args.config)
    unknown = set(kv) - SCHEMA_KEYS - TRAIN_KEYS
    if unknown:
        raise UsageError(f"unknown config key(s): {sorted(unknown)}")
    schema = schema_from_kv(kv)
    config = train_config_from_kv(kv)
    train_fraction = float(kv.get("train_fraction", 0.8))

    table = load_csv(args.data, delimiter=kv.get("delimiter", ","))
    labels_raw = table[schema.label_column].astype(str).to_numpy() \
        if schema.label_column in table.columns else None
    if labels_raw is None:
        raise DataError(f"label column {schema.label_column!r} not in {args.data}")
    _, codes = np.unique(labels_raw, return_inverse=True)
    tr_idx, te_idx = stratified_split_indices(codes, train_fraction, config.seed)
    train_table = table.iloc[tr_idx]
    test_table = table.iloc[te_idx]

    enc = TabularEncoder(schema, int(kv.get("cardinality_cap", 64))).fit(train_table)
    ds_train = enc.encode_dataset(train_table)
    net, report = train(ds_train, config)

    model_io.write_model(net, enc.to_metadata(), args.model_out, seed=config.seed)
    rows = [{"epoch": e.epoch, "train_loss": e.train_loss,
             "val_loss": e.val_loss, "seconds": e.seconds} for e in report.epochs]
    rows.append({"epoch": "total", "train_loss": "", "val_loss": "",
                 "seconds": report.total_seconds})
    pd.DataFrame(rows).to_csv(args.report_out, index=False)

    holdout_acc = ""
    if len(te_idx):
        ds_test = enc.encode_dataset(test_table)
        from .metrics import predict as _predict
        acc = float((_predict(net, ds_test.features) == ds_test.labels).mean())
        holdout_acc = f"{100 * acc:.2f}"
        print(f"holdout accuracy: {holdout_acc}%")
    print(f"training seconds: {report.total_seconds:.2f}")
    write_manifest(Path(args.model_out).with_suffix(".manifest.txt"), "train", {
        "data": args.data, "config": args.config, "model_out": args.model_out,
        "report_out": args.report_out, "seed": config.seed,
        "train_fraction": train_fraction, "epochs": config.epochs,
        "batch_size": config.batch_size, "learning_rate": config.learning_rate,
        "train_seconds": f"{report.total_seconds:.4f}",
        "holdout_accuracy_pct": holdout_acc,
    }, started)
    return 0


def _load_model_and_encoder(model_path):
    net, meta = model_io.read_model(model_path)
    return net, TabularEncoder.from_metadata(meta["encoder"])


def cmd_eval(args) -> int:
    started = _now()
    net, enc = _load_model_and_encoder(args.model)
    table = load_csv(args.data)
    ds = enc.encode_dataset(table)
    if ds.n_features != net.arch.input_len:
        raise DataError(
            f"data has {ds.n_features} encoded features, "
            f"model expects {net.arch.input_len}"
        )
    t0 = time.perf_counter()
    from .metrics import predict as _predict
    preds = _predict(net, ds.features)
    test_seconds = time.perf_counter() - t0

    cm = confusion(ds.labels, preds, ds.n_classes, ds.label_names)
    pd.DataFrame(cm.counts, index=cm.label_names,
                 columns=cm.label_names).to_csv(args.confusion_out,
                                                index_label="true\\predicted")
    report = compute_metrics(cm)
    report.test_seconds = test_seconds

    lines = [
        f"accuracy = {report.accuracy:.2f}",
        f"macro_precision = {report.macro_precision:.2f}",
        f"macro_recall = {report.macro_recall:.2f}",
        f"macro_f1 = {report.macro_f1:.2f}",
        f"test_seconds = {test_seconds:.4f}",
    ]
    for c in report.per_class:
        flag = " (zero denominator)" if c.zero_denominator else ""
        lines.append(f"class.{c.name} = precision {c.precision:.2f}, "
                     f"recall {c.recall:.2f}, f1 {c.f1:.2f}{flag}")
    Path(args.metrics_out).write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"{'class':<30} {'precision':>9} {'recall':>9} {'f1':>9}")
    for c in report.per_class:
        print(f"{c.name:<30} {c.precision:>9.2f} {c.recall:>9.2f} {c.f1:>9.2f}")
    print(f"accuracy {report.accuracy:.2f}  macro precision {report.macro_precision:.2f}  "
          f"macro recall {report.macro_recall:.2f}  macro f1 {report.macro_f1:.2f}")
    print(f"test seconds: {test_seconds:.4f}")
    write_manifest(Path(args.metrics_out).with_suffix(".manifest.txt"), "eval", {
        "data": args.data, "model": args.model,
        "confusion_out": args.confusion_out, "metrics_out": args.metrics_out,
        "accuracy_pct": f"{report.accuracy:.2f}",
        "test_seconds": f"{test_seconds:.4f}",
    }, started)
    return 0


def cmd_predict(args) -> int:
    started = _now()
    net, enc = _load_model_and_encoder(args.model)
    table = load_csv(args.input)
    features = enc.transform(table)
    if enc.unseen_categories_:
        print(f"unseen categories encountered: {enc.unseen_categories_}",
              file=sys.stderr)
    proba = predict_proba(net, features)
    preds = proba.argmax(axis=1)
    out = pd.DataFrame({
        "row_index": np.arange(len(preds)),
        "predicted_class": [enc.label_names_[i] for i in preds],
        "confidence": proba[np.arange(len(preds)), preds],
    })
    out.to_csv(args.output, index=False)
    print(f"wrote {len(preds)} predictions to {args.output}")
    write_manifest(Path(args.output).with_suffix(".manifest.txt"), "predict", {
        "model": args.model, "input": args.input, "output": args.output,
        "rows": len(preds),
    }, started)
    return 0


def cmd_bench(args) -> int:
    started = _now()
    if args.repeat < 1:
        raise UsageError(f"--repeat must be >= 1, got {args.repeat}")
    net, enc = _load_model_and_encoder(args.model)
    table = load_csv(args.data)
    features = enc.transform(table)
    _, seconds, rows_per_sec = timed_inference(net, features, repeat=args.repeat)
    print(f"rows: {len(features)}")
    print(f"seconds per pass (median of {args.repeat}): {seconds:.4f}")
    print(f"rows per second: {rows_per_sec:.1f}")
    print("reference full-dataset baseline: 108.46 s train, 3.94 s test "
          "(informational, hardware-dependent)")
    write_manifest(Path(args.data).with_suffix(".bench.manifest.txt"), "bench", {
        "model": args.model, "data": args.data, "repeat": args.repeat,
        "seconds_per_pass": f"{seconds:.4f}",
        "rows_per_second": f"{rows_per_sec:.1f}",
    }, started)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ids1d",
        description="1D-CNN intrusion detection: preprocessing, training, evaluation",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("prep", help="clean a raw CSV and report class stats")
    p.add_argument("--input", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--stats-out", required=True)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("train", help="split, train and save a model")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--report-out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="confusion matrix and metrics on labeled data")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--confusion-out", required=True)
    p.add_argument("--metrics-out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="per-row class predictions with confidence")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="inference throughput measurement")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Ids1dError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
