"""Cluster stay/shift probabilities over the prediction horizons.

A country's start cluster is its semi-supervised label in the final
training year; its end cluster is the classifier's prediction in the
final test year.  For each (from, to) pair the probability is simply
migrated / total over countries that started in ``from``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset, Horizon
from .errors import EmptySourceClusterError, MissingAssignmentError


@dataclass(frozen=True)
class CountryTrajectory:
    country: str
    steps: tuple[tuple[int, int], ...]  # (year, cluster), years strictly increasing


def country_trajectories(assignments: dict, dataset: Dataset) -> list[CountryTrajectory]:
    """Per-country (year, cluster) paths over every dataset year.

    ``assignments`` maps (country, year) to a cluster id and must cover
    the full panel; a gap raises :class:`MissingAssignmentError`.
    """
    trajectories = []
    for country in dataset.countries:
        steps = []
        for year in dataset.years:
            cluster = assignments.get((country, year))
            if cluster is None:
                raise MissingAssignmentError(country, year)
            steps.append((year, int(cluster)))
        trajectories.append(CountryTrajectory(country=country, steps=tuple(steps)))
    return trajectories


def transition_probability(start_end_pairs, from_cluster: int,
                           to_cluster: int) -> tuple[float, int, int]:
    """(probability, migrated, total) for countries starting in ``from_cluster``."""
    pairs = list(start_end_pairs)
    total = sum(1 for start, _ in pairs if start == from_cluster)
    if total == 0:
        raise EmptySourceClusterError(f"no countries start in cluster {from_cluster}")
    migrated = sum(1 for start, end in pairs
                   if start == from_cluster and end == to_cluster)
    return migrated / total, migrated, total


@dataclass(frozen=True)
class TransitionMatrix:
    horizon: Horizon
    probabilities: np.ndarray  # (k, k); row = from, column = to
    migrated: np.ndarray       # (k, k) integer counts
    totals: np.ndarray         # per-source counts


@dataclass(frozen=True)
class TransitionReport:
    k: int
    matrices: tuple[TransitionMatrix, ...]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("horizon,from,to,probability,migrated,total\n")
            for m in self.matrices:
                for i in range(self.k):
                    for j in range(self.k):
                        handle.write(
                            f"{m.horizon.value},{i},{j},"
                            f"{m.probabilities[i, j]:.6f},"
                            f"{int(m.migrated[i, j])},{int(m.totals[i])}\n"
                        )

    def to_json(self) -> str:
        payload = {
            "k": self.k,
            "horizons": [
                {
                    "horizon": m.horizon.value,
                    "probabilities": [[float(v) for v in row]
                                      for row in m.probabilities],
                    "migrated": [[int(v) for v in row] for row in m.migrated],
                    "totals": [int(v) for v in m.totals],
                }
                for m in self.matrices
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def transition_matrix(start_end_pairs, k: int, horizon) -> TransitionMatrix:
    """Count migrations between clusters and normalize per source row."""
    horizon = Horizon.parse(horizon)
    migrated = np.zeros((k, k), dtype=int)
    for start, end in start_end_pairs:
        migrated[start, end] += 1
    totals = migrated.sum(axis=1)
    probabilities = np.zeros((k, k))
    for i in range(k):
        if totals[i] > 0:
            probabilities[i] = migrated[i] / totals[i]
    return TransitionMatrix(horizon=horizon, probabilities=probabilities,
                            migrated=migrated, totals=totals)


def terminal_transitions(start_by_key: dict, predicted_by_key: dict,
                         last_train_year: int, last_test_year: int) -> list[tuple[int, int]]:
    """Pair each country's start cluster with its predicted end cluster.

    Only countries observed in both anchor years contribute a pair;
    output is ordered by country name so downstream counts are
    permutation-independent.
    """
    starts = {c: v for (c, y), v in start_by_key.items() if y == last_train_year}
    ends = {c: v for (c, y), v in predicted_by_key.items() if y == last_test_year}
    return [(starts[c], ends[c]) for c in sorted(starts) if c in ends]


def build_transition_report(pairs_by_horizon: dict, k: int) -> TransitionReport:
    """Transition matrices for every horizon, in horizon order."""
    matrices = []
    for horizon in sorted(pairs_by_horizon, key=lambda h: Horizon.parse(h).value):
        matrices.append(transition_matrix(pairs_by_horizon[horizon], k, horizon))
    return TransitionReport(k=k, matrices=tuple(matrices))
