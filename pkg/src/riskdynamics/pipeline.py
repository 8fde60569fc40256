"""End-to-end pipeline: ingest -> outliers -> cluster -> spread ->
classify -> scenario -> charts, with deterministic artifacts.

All randomness flows from one top-level seed through per-stage seeds
derived by hashing the stage name, so stages can be rerun independently
and two runs with the same config produce byte-identical reports
(manifest timings excepted).  Artifact writes go through a
write-temp-then-rename helper so readers never see partial files.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import charts
from .data import (
    Dataset,
    Horizon,
    INDICATOR_FIELDS,
    LoadResult,
    SchemaConfig,
    SplitSpec,
    load_dataset,
)
from .errors import PipelineStageError, RiskDynamicsError
from .horizons import (
    MODEL_KINDS,
    ClassifierConfigs,
    HorizonResult,
    run_horizon_experiment,
    write_horizon_table,
)
from .kmeans import ClusterModel, KMeansConfig, kmeans_fit
from .logistic import LogisticConfig
from .metrics import cluster_validity
from .pca import pca_fit, pca_transform
from .preprocess import (
    EncodingConfig,
    FeatureMatrix,
    OutlierConfig,
    detect_outliers,
    indicator_matrix,
    standardize,
)
from .spreading import SpreadConfig, TransductionResult, transduce_full
from .transitions import TransitionReport, build_transition_report, terminal_transitions
from .trees import BoostConfig, ForestConfig, TreeConfig


def derive_seed(master_seed: int, stage: str) -> int:
    """Stable per-stage seed from the top-level seed and stage name."""
    digest = hashlib.sha256(f"{master_seed}:{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    out_dir: str
    seed: int = 42
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    outliers: OutlierConfig = field(default_factory=OutlierConfig)
    kmeans: KMeansConfig | None = None       # None -> derived seed
    spread: SpreadConfig | None = None
    classifiers: ClassifierConfigs = field(default_factory=ClassifierConfigs)
    horizons: tuple[Horizon, ...] = (Horizon.ONE, Horizon.THREE, Horizon.FIVE)
    models: tuple[str, ...] = MODEL_KINDS
    scenario_model: str = "lr"
    paper_literal_five: bool = False

    def resolved_kmeans(self) -> KMeansConfig:
        return self.kmeans or KMeansConfig(seed=derive_seed(self.seed, "kmeans"))

    def resolved_spread(self) -> SpreadConfig:
        return self.spread or SpreadConfig(seed=derive_seed(self.seed, "spread"))

    def to_dict(self) -> dict:
        payload = {
            "input": self.input_path,
            "out": self.out_dir,
            "seed": self.seed,
            "schema": dataclasses.asdict(self.schema),
            "outliers": dataclasses.asdict(self.outliers),
            "kmeans": dataclasses.asdict(self.resolved_kmeans()),
            "spread": dataclasses.asdict(self.resolved_spread()),
            "classifiers": dataclasses.asdict(self.classifiers),
            "horizons": [h.value for h in self.horizons],
            "models": list(self.models),
            "scenario_model": self.scenario_model,
            "paper_literal_five": self.paper_literal_five,
        }
        payload["schema"]["year_range"] = list(self.schema.year_range)
        return payload


def _build(cls, payload: dict | None, **overrides):
    payload = dict(payload or {})
    payload.update(overrides)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(payload) - names
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**payload)


def config_from_dict(payload: dict) -> PipelineConfig:
    """Build a PipelineConfig from a parsed JSON config document."""
    payload = dict(payload)
    schema_payload = dict(payload.get("schema") or {})
    if "year_range" in schema_payload:
        schema_payload["year_range"] = tuple(schema_payload["year_range"])
    classifier_payload = dict(payload.get("classifiers") or {})
    classifiers = ClassifierConfigs(
        logistic=_build(LogisticConfig, classifier_payload.get("logistic")),
        tree=_build(TreeConfig, classifier_payload.get("tree")),
        forest=_build(ForestConfig, _forest_payload(classifier_payload.get("forest"))),
        boost=_build(BoostConfig, classifier_payload.get("boost")),
        encoding=_build(EncodingConfig, classifier_payload.get("encoding")),
    )
    outlier_payload = dict(payload.get("outliers") or {})
    if "variables" in outlier_payload:
        outlier_payload["variables"] = tuple(outlier_payload["variables"])
    return PipelineConfig(
        input_path=payload["input"],
        out_dir=payload.get("out", "out"),
        seed=int(payload.get("seed", 42)),
        schema=_build(SchemaConfig, schema_payload),
        outliers=_build(OutlierConfig, outlier_payload),
        kmeans=_build(KMeansConfig, payload["kmeans"]) if "kmeans" in payload else None,
        spread=_build(SpreadConfig, payload["spread"]) if "spread" in payload else None,
        classifiers=classifiers,
        horizons=tuple(Horizon.parse(h) for h in payload.get("horizons", [1, 3, 5])),
        models=tuple(payload.get("models", list(MODEL_KINDS))),
        scenario_model=payload.get("scenario_model", "lr"),
        paper_literal_five=bool(payload.get("paper_literal_five", False)),
    )


def _forest_payload(payload):
    payload = dict(payload or {})
    if "tree" in payload:
        payload["tree"] = _build(TreeConfig, payload["tree"])
    return payload


def config_from_file(path) -> PipelineConfig:
    with open(path, encoding="utf-8") as handle:
        return config_from_dict(json.load(handle))


def write_text_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def dump_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class RunManifest:
    config: dict
    fingerprint: dict
    artifacts: dict
    timings_s: dict
    status: str
    failed_stage: str | None = None

    def to_dict(self) -> dict:
        payload = {
            "config": self.config,
            "fingerprint": self.fingerprint,
            "artifacts": self.artifacts,
            "timings_s": self.timings_s,
            "status": self.status,
        }
        if self.failed_stage is not None:
            payload["failed_stage"] = self.failed_stage
        return payload


# ---------------------------------------------------------------- stages


def stage_ingest(config: PipelineConfig) -> LoadResult:
    return load_dataset(config.input_path, config.schema)


def stage_cluster(dataset: Dataset, config: PipelineConfig):
    """Standardized indicator matrix plus the fitted KMeans model."""
    features, params = standardize(indicator_matrix(dataset))
    model = kmeans_fit(features, config.resolved_kmeans())
    return features, params, model


def stage_spread(features: FeatureMatrix, model: ClusterModel,
                 config: PipelineConfig) -> TransductionResult:
    return transduce_full(features.values, model.assignments,
                          config.resolved_spread())


def stage_classify(dataset: Dataset, labels_by_key: dict,
                   config: PipelineConfig) -> dict:
    results: dict[tuple[Horizon, str], HorizonResult] = {}
    kinds = list(config.models)
    if config.scenario_model not in kinds:
        kinds.append(config.scenario_model)
    for horizon in config.horizons:
        for kind in kinds:
            seed = derive_seed(config.seed, f"classify:{horizon.value}:{kind}")
            results[(horizon, kind)] = run_horizon_experiment(
                dataset, horizon, kind, labels_by_key,
                configs=config.classifiers,
                paper_literal_five=config.paper_literal_five,
                seed=seed,
            )
    return results


def stage_scenario(dataset: Dataset, transduction_by_key: dict,
                   results: dict, config: PipelineConfig) -> TransitionReport:
    pairs_by_horizon = {}
    for horizon in config.horizons:
        result = results[(horizon, config.scenario_model)]
        spec = SplitSpec.for_horizon(horizon, last_year=max(dataset.years),
                                     paper_literal=config.paper_literal_five)
        last_train_year = max(y for y in dataset.years if spec.in_train(y))
        last_test_year = max(y for y in dataset.years if spec.in_test(y))
        predicted_by_key = dict(zip(result.test_keys,
                                    (int(p) for p in result.predicted)))
        pairs_by_horizon[horizon] = terminal_transitions(
            transduction_by_key, predicted_by_key, last_train_year, last_test_year
        )
    return build_transition_report(pairs_by_horizon, config.resolved_kmeans().k)


def stage_charts(dataset: Dataset, features: FeatureMatrix, labels,
                 out_dir: Path) -> list[Path]:
    paths = []
    for variable in INDICATOR_FIELDS:
        path = out_dir / "charts" / f"{variable}.svg"
        write_text_atomic(path, charts.emit_temporal_chart(dataset, variable))
        paths.append(path)
    pca_model = pca_fit(features, 2)
    projection = pca_transform(pca_model, features)
    path = out_dir / "charts" / "clusters.svg"
    write_text_atomic(path, charts.emit_cluster_scatter(
        projection, labels, title="semi-supervised clusters"))
    paths.append(path)
    return paths


def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Execute every stage and write all artifacts under ``config.out_dir``."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, list[str]] = {}
    timings: dict[str, float] = {}
    stage_name = "ingest"

    def finish(status: str, failed: str | None = None,
               fingerprint: dict | None = None) -> RunManifest:
        manifest = RunManifest(
            config=config.to_dict(),
            fingerprint=fingerprint or {},
            artifacts=artifacts,
            timings_s=timings,
            status=status,
            failed_stage=failed,
        )
        write_text_atomic(out_dir / "manifest.json", dump_json(manifest.to_dict()))
        return manifest

    try:
        clock = time.perf_counter()

        def tick(name: str):
            nonlocal clock, stage_name
            timings[stage_name] = round(time.perf_counter() - clock, 6)
            clock = time.perf_counter()
            stage_name = name

        loaded = stage_ingest(config)
        dataset = loaded.dataset
        raw = Path(config.input_path).read_bytes()
        fingerprint = {
            "rows": len(dataset),
            "rejected_rows": len(loaded.rejected),
            "years": [dataset.years[0], dataset.years[-1]],
            "countries": len(dataset.countries),
            "sha256": hashlib.sha256(raw).hexdigest(),
        }

        tick("outliers")
        outlier_report = detect_outliers(dataset, config.outliers)
        outlier_report.to_csv(out_dir / "outliers.csv.tmp")
        os.replace(out_dir / "outliers.csv.tmp", out_dir / "outliers.csv")
        artifacts["outliers"] = ["outliers.csv"]

        tick("cluster")
        features, _, cluster_model = stage_cluster(dataset, config)
        write_text_atomic(out_dir / "clusters.json", cluster_model.to_json() + "\n")
        artifacts["cluster"] = ["clusters.json"]

        tick("spread")
        transduction = stage_spread(features, cluster_model, config)
        write_text_atomic(out_dir / "transduction.json", transduction.to_json() + "\n")
        artifacts["spread"] = ["transduction.json"]

        tick("metrics")
        validity = cluster_validity(features.values, cluster_model.assignments)
        metrics_payload = dict(validity.to_dict())
        if transduction.evaluation is not None:
            metrics_payload.update(transduction.evaluation.to_dict())
        write_text_atomic(out_dir / "metrics.json", dump_json(metrics_payload))
        artifacts["metrics"] = ["metrics.json"]

        tick("classify")
        labels_by_key = dict(zip(features.row_keys,
                                 (int(v) for v in transduction.labels)))
        results = stage_classify(dataset, labels_by_key, config)
        table_results = [results[(h, m)] for h in config.horizons
                         for m in config.models]
        write_horizon_table(table_results, out_dir / "table2.csv.tmp")
        os.replace(out_dir / "table2.csv.tmp", out_dir / "table2.csv")
        artifacts["classify"] = ["table2.csv"]

        tick("scenario")
        report = stage_scenario(dataset, labels_by_key, results, config)
        report.to_csv(out_dir / "table3.csv.tmp")
        os.replace(out_dir / "table3.csv.tmp", out_dir / "table3.csv")
        artifacts["scenario"] = ["table3.csv"]

        tick("charts")
        chart_paths = stage_charts(dataset, features, transduction.labels, out_dir)
        artifacts["charts"] = [str(p.relative_to(out_dir)) for p in chart_paths]
        tick("done")
    except RiskDynamicsError as exc:
        finish("failed", failed=stage_name,
               fingerprint=locals().get("fingerprint"))
        raise PipelineStageError(stage_name, exc) from exc

    return finish("complete", fingerprint=fingerprint)
