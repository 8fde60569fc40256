"""Command-line interface.

Subcommands mirror the pipeline stages (ingest, outliers, cluster,
spread, classify, scenario, plot) plus ``run`` for the whole thing.
Stage commands consume prior-stage artifacts from the output directory
when present and recompute them otherwise.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import pipeline as pl
from .data import Horizon
from .errors import (
    DataError,
    NumericError,
    PipelineStageError,
    RiskDynamicsError,
)
from .horizons import MODEL_KINDS, write_horizon_table
from .kmeans import ClusterModel, KMeansConfig, kmeans_fit
from .metrics import cluster_validity
from .preprocess import detect_outliers


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="riskdynamics",
                     description="Temporal disaster-risk cluster analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("ingest", "validate the input CSV and report rejections"),
        ("outliers", "flag z-score outliers and write outliers.csv"),
        ("cluster", "fit KMeans and write clusters.json"),
        ("spread", "run label spreading and write transduction.json"),
        ("classify", "run the horizon experiments and write table2.csv"),
        ("scenario", "compute transition probabilities and write table3.csv"),
        ("plot", "emit the SVG charts"),
        ("run", "run the full pipeline"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--input", help="input CSV path")
        cmd.add_argument("--config", help="JSON config file")
        cmd.add_argument("--out", help="output directory (default: out)")
        cmd.add_argument("--seed", type=int, help="top-level seed")
        cmd.add_argument("--k", type=int, help="number of clusters")
        cmd.add_argument("--alpha", type=float, help="label-spreading clamping factor")
        cmd.add_argument("--neighbors", type=int, help="KNN graph neighbors")
        cmd.add_argument("--hide-fraction", type=float, dest="hide_fraction",
                         help="fraction of labels to hide before spreading")
        cmd.add_argument("--horizon", type=int, choices=[1, 3, 5],
                         help="restrict to one prediction horizon")
        cmd.add_argument("--model", choices=list(MODEL_KINDS),
                         help="restrict to one model family")
    return parser


def _config_from_args(args) -> pl.PipelineConfig:
    if args.config:
        config = pl.config_from_file(args.config)
    else:
        if not args.input:
            raise SystemExit(_usage_error("--input or --config is required"))
        config = pl.PipelineConfig(input_path=args.input, out_dir=args.out or "out")
    if args.input:
        config = replace(config, input_path=args.input)
    if args.out:
        config = replace(config, out_dir=args.out)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.k is not None:
        config = replace(config, kmeans=replace(config.resolved_kmeans(), k=args.k))
    spread_overrides = {}
    if args.alpha is not None:
        spread_overrides["alpha"] = args.alpha
    if args.neighbors is not None:
        spread_overrides["n_neighbors"] = args.neighbors
    if args.hide_fraction is not None:
        spread_overrides["hide_fraction"] = args.hide_fraction
    if spread_overrides:
        config = replace(config, spread=replace(config.resolved_spread(),
                                                **spread_overrides))
    if args.horizon is not None:
        config = replace(config, horizons=(Horizon.parse(args.horizon),))
    if args.model is not None:
        config = replace(config, models=(args.model,), scenario_model=args.model)
    return config


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load(config):
    loaded = pl.stage_ingest(config)
    if loaded.rejected:
        print(f"rejected {len(loaded.rejected)} invalid rows", file=sys.stderr)
    return loaded


def _read_json(path: Path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _transduction_labels(config, dataset, features, out_dir: Path):
    """Labels from transduction.json when present, else recomputed."""
    artifact = out_dir / "transduction.json"
    if artifact.exists():
        payload = _read_json(artifact)
        labels = payload.get("labels", [])
        if len(labels) == len(dataset):
            return [int(v) for v in labels], "transduction.json"
    model = _cluster_model(config, dataset, features, out_dir)
    result = pl.stage_spread(features, model, config)
    return [int(v) for v in result.labels], "recomputed"


def _cluster_model(config, dataset, features, out_dir: Path):
    artifact = out_dir / "clusters.json"
    if artifact.exists():
        payload = _read_json(artifact)
        by_key = {(a["country"], a["year"]): a["cluster"]
                  for a in payload.get("assignments", [])}
        if set(by_key) == set(features.row_keys):
            assignments = np.array([by_key[k] for k in features.row_keys])
            return ClusterModel(
                centroids=np.array(payload["centroids"]),
                assignments=assignments,
                inertia=float(payload["inertia"]),
                iterations_run=int(payload["iterations_run"]),
                inertia_history=(),
                canonical_order=tuple(payload["canonical_order"]),
                columns=tuple(payload["columns"]),
                row_keys=features.row_keys,
                config=KMeansConfig(**payload["config"]),
            )
    return kmeans_fit(features, config.resolved_kmeans())


def _cmd_ingest(config) -> int:
    loaded = pl.stage_ingest(config)
    dataset = loaded.dataset
    out_dir = Path(config.out_dir)
    payload = {
        "rows": len(dataset),
        "countries": len(dataset.countries),
        "years": list(dataset.years),
        "rejected": [{"line": r.line, "reasons": list(r.reasons)}
                     for r in loaded.rejected],
    }
    pl.write_text_atomic(out_dir / "ingest.json", pl.dump_json(payload))
    print(f"{len(dataset)} rows, {len(dataset.countries)} countries, "
          f"years {dataset.years[0]}-{dataset.years[-1]}, "
          f"{len(loaded.rejected)} rejected")
    return 0


def _cmd_outliers(config) -> int:
    dataset = _load(config).dataset
    report = detect_outliers(dataset, config.outliers)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.to_csv(out_dir / "outliers.csv")
    print(f"{len(report.flagged)} outlier points across "
          f"{len(report.distinct_countries)} countries: "
          + ", ".join(report.distinct_countries))
    return 0


def _cmd_cluster(config) -> int:
    dataset = _load(config).dataset
    features, _, model = pl.stage_cluster(dataset, config)
    pl.write_text_atomic(Path(config.out_dir) / "clusters.json",
                         model.to_json() + "\n")
    validity = cluster_validity(features.values, model.assignments)
    print(f"k={model.k} inertia={model.inertia:.4f} "
          f"silhouette={validity.silhouette:.4f} "
          f"calinski_harabasz={validity.calinski_harabasz:.2f} "
          f"davies_bouldin={validity.davies_bouldin:.4f}")
    return 0


def _cmd_spread(config) -> int:
    dataset = _load(config).dataset
    features, _, _ = pl.stage_cluster(dataset, config)
    model = _cluster_model(config, dataset, features, Path(config.out_dir))
    result = pl.stage_spread(features, model, config)
    pl.write_text_atomic(Path(config.out_dir) / "transduction.json",
                         result.to_json() + "\n")
    line = (f"converged={result.converged} iterations={result.iterations_run}")
    if result.evaluation is not None:
        line += (f" hidden_accuracy={result.evaluation.accuracy:.4f}"
                 f" hidden_auc={result.evaluation.auc:.4f}")
    print(line)
    return 0


def _cmd_classify(config) -> int:
    dataset = _load(config).dataset
    features, _, _ = pl.stage_cluster(dataset, config)
    out_dir = Path(config.out_dir)
    labels, source = _transduction_labels(config, dataset, features, out_dir)
    labels_by_key = dict(zip(features.row_keys, labels))
    results = pl.stage_classify(dataset, labels_by_key, config)
    table = [results[(h, m)] for h in config.horizons for m in config.models]
    write_horizon_table(table, out_dir / "table2.csv")
    print(f"labels from {source}")
    for r in table:
        print(f"horizon={r.horizon.value} model={r.model_kind} "
              f"accuracy={r.accuracy:.4f} auc={r.auc:.4f}")
    return 0


def _cmd_scenario(config) -> int:
    dataset = _load(config).dataset
    features, _, _ = pl.stage_cluster(dataset, config)
    out_dir = Path(config.out_dir)
    labels, source = _transduction_labels(config, dataset, features, out_dir)
    labels_by_key = dict(zip(features.row_keys, labels))
    results = pl.stage_classify(dataset, labels_by_key, config)
    report = pl.stage_scenario(dataset, labels_by_key, results, config)
    report.to_csv(out_dir / "table3.csv")
    print(f"labels from {source}")
    for matrix in report.matrices:
        stay = ", ".join(f"P({i}->{i})={matrix.probabilities[i, i]:.2f}"
                         for i in range(report.k))
        print(f"horizon={matrix.horizon.value}: {stay}")
    return 0


def _cmd_plot(config) -> int:
    dataset = _load(config).dataset
    features, _, _ = pl.stage_cluster(dataset, config)
    out_dir = Path(config.out_dir)
    labels, source = _transduction_labels(config, dataset, features, out_dir)
    paths = pl.stage_charts(dataset, features, np.array(labels), out_dir)
    print(f"labels from {source}; wrote {len(paths)} charts under "
          f"{out_dir / 'charts'}")
    return 0


def _cmd_run(config) -> int:
    manifest = pl.run_pipeline(config)
    n_artifacts = sum(len(v) for v in manifest.artifacts.values()) + 1
    print(f"pipeline complete: {n_artifacts} artifacts under {config.out_dir}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "outliers": _cmd_outliers,
    "cluster": _cmd_cluster,
    "spread": _cmd_spread,
    "classify": _cmd_classify,
    "scenario": _cmd_scenario,
    "plot": _cmd_plot,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _config_from_args(args)
        return _COMMANDS[args.command](config)
    except SystemExit as exc:
        return int(exc.code or 0)
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc.cause)
    except RiskDynamicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, NumericError):
        return 3
    if isinstance(exc, DataError):
        return 2
    return 3


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
