"""Supervised cluster prediction over the 1/3/5-year temporal splits.

For each horizon the dataset is split by year, encoders and
standardization are fit on the training rows only (no test-set
leakage), and one of four model families predicts the semi-supervised
cluster label of each test row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import logistic, trees
from .data import Dataset, Horizon, SplitSpec, temporal_split
from .errors import MissingAssignmentError
from .metrics import ConfusionMatrix2, accuracy, auc, confusion
from .preprocess import (
    EncodingConfig,
    FeatureEncoder,
    FeatureMatrix,
    StandardizationParams,
    fit_encoder,
)

MODEL_KINDS = ("lr", "dt", "rf", "gbt")


@dataclass(frozen=True)
class ClassifierConfigs:
    logistic: logistic.LogisticConfig = field(default_factory=logistic.LogisticConfig)
    tree: trees.TreeConfig = field(default_factory=trees.TreeConfig)
    forest: trees.ForestConfig = field(default_factory=trees.ForestConfig)
    boost: trees.BoostConfig = field(default_factory=trees.BoostConfig)
    encoding: EncodingConfig = field(default_factory=EncodingConfig)


@dataclass(frozen=True)
class HorizonResult:
    horizon: Horizon
    model_kind: str
    confusion: ConfusionMatrix2
    accuracy: float
    auc: float
    n_train: int
    n_test: int
    test_keys: tuple[tuple[str, int], ...]
    predicted: np.ndarray
    scores: np.ndarray
    encoder: FeatureEncoder
    standardization: StandardizationParams

    def table_row(self) -> dict:
        cm = self.confusion
        return {
            "horizon": self.horizon.value,
            "model": self.model_kind,
            "c00": cm.c00, "c01": cm.c01, "c10": cm.c10, "c11": cm.c11,
            "auc": self.auc,
            "accuracy": self.accuracy,
        }


def _standardize_numeric(train_fm: FeatureMatrix, test_fm: FeatureMatrix,
                         encoder: FeatureEncoder):
    """Scale the continuous columns with train statistics; one-hots pass through."""
    numeric = encoder.numeric_columns()
    idx = [train_fm.columns.index(c) for c in numeric]
    means = train_fm.values[:, idx].mean(axis=0)
    stds = train_fm.values[:, idx].std(axis=0)
    stds = np.where(stds == 0, 1.0, stds)  # constant column: leave centered only

    def apply(fm: FeatureMatrix) -> np.ndarray:
        values = fm.values.copy()
        values[:, idx] = (values[:, idx] - means) / stds
        return values

    params = StandardizationParams(numeric, means, stds)
    return apply(train_fm), apply(test_fm), params


def _labels_for(dataset: Dataset, labels_by_key: dict) -> np.ndarray:
    out = np.empty(len(dataset), dtype=int)
    for i, rec in enumerate(dataset):
        label = labels_by_key.get(rec.key())
        if label is None:
            raise MissingAssignmentError(rec.country, rec.year)
        out[i] = label
    return out


def _fit_predict(kind: str, x_train, y_train, x_test, configs: ClassifierConfigs,
                 seed: int):
    if kind == "lr":
        model = logistic.train_logistic(x_train, y_train, configs.logistic)
        scores = logistic.predict_proba(model, x_test)
        return scores, (scores > 0.5).astype(int)
    if kind == "dt":
        model = trees.train_tree(x_train, y_train, configs.tree)
        return trees.tree_predict_proba(model, x_test), trees.tree_predict(model, x_test)
    if kind == "rf":
        cfg = trees.ForestConfig(
            n_trees=configs.forest.n_trees,
            bootstrap=configs.forest.bootstrap,
            max_features=configs.forest.max_features,
            seed=seed,
            tree=configs.forest.tree,
        )
        model = trees.train_forest(x_train, y_train, cfg)
        return trees.forest_predict_proba(model, x_test), trees.forest_predict(model, x_test)
    if kind == "gbt":
        cfg = trees.BoostConfig(
            n_rounds=configs.boost.n_rounds,
            learning_rate=configs.boost.learning_rate,
            max_depth=configs.boost.max_depth,
            min_samples_split=configs.boost.min_samples_split,
            seed=seed,
        )
        model = trees.train_boosted(x_train, y_train, cfg)
        return trees.boosted_predict_proba(model, x_test), trees.boosted_predict(model, x_test)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def run_horizon_experiment(dataset: Dataset, horizon, model_kind: str,
                           labels_by_key: dict,
                           configs: ClassifierConfigs | None = None,
                           paper_literal_five: bool = False,
                           seed: int = 0) -> HorizonResult:
    """Split temporally, train one model family, and score the test rows."""
    configs = configs or ClassifierConfigs()
    horizon = Horizon.parse(horizon)
    spec = SplitSpec.for_horizon(horizon, last_year=max(dataset.years),
                                 paper_literal=paper_literal_five)
    train, test = temporal_split(dataset, spec)

    encoder = fit_encoder(train, configs.encoding)
    train_fm = encoder.transform(train)
    test_fm = encoder.transform(test)
    x_train, x_test, params = _standardize_numeric(train_fm, test_fm, encoder)
    y_train = _labels_for(train, labels_by_key)
    y_test = _labels_for(test, labels_by_key)

    scores, predicted = _fit_predict(model_kind, x_train, y_train, x_test,
                                     configs, seed)
    cm = confusion(y_test, predicted)
    return HorizonResult(
        horizon=horizon,
        model_kind=model_kind,
        confusion=cm,
        accuracy=accuracy(cm),
        auc=auc(scores, y_test),
        n_train=len(train),
        n_test=len(test),
        test_keys=test.row_keys(),
        predicted=predicted,
        scores=scores,
        encoder=encoder,
        standardization=params,
    )


def write_horizon_table(results, path) -> None:
    """CSV mirroring the supervised-performance table."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("horizon,model,c00,c01,c10,c11,auc,accuracy\n")
        for r in results:
            row = r.table_row()
            handle.write(
                f"{row['horizon']},{row['model']},{row['c00']},{row['c01']},"
                f"{row['c10']},{row['c11']},{row['auc']:.6f},{row['accuracy']:.6f}\n"
            )
