"""Synthetic country-year panels with two well-separated risk groups.

Used by the test suite and the demo scripts so everything runs without
the public dataset.  High-group countries sit far above the moderate
group on every indicator, so clustering, spreading, and classification
all have an unambiguous ground truth.
"""

from __future__ import annotations

import numpy as np

from .data import CountryYearRecord, Dataset

REGIONS = ("Africa", "Americas", "Asia", "Europe", "Oceania")

# (mean, trend/yr) per indicator for the high and moderate groups
_HIGH = {
    "wri": (42.0, 0.35), "exposure": (55.0, 0.45), "vulnerability": (62.0, 0.1),
    "susceptibility": (38.0, 0.2), "lack_coping": (78.0, 0.25),
    "lack_adaptive": (52.0, 0.15),
}
_MODERATE = {
    "wri": (6.0, 0.1), "exposure": (12.0, 0.15), "vulnerability": (30.0, 0.05),
    "susceptibility": (16.0, 0.05), "lack_coping": (45.0, 0.1),
    "lack_adaptive": (28.0, 0.05),
}
_NOISE_STD = 1.2


def _band(value: float, edges: tuple[float, float, float]) -> str:
    lo, mid, hi = edges
    if value < lo:
        return "Low"
    if value < mid:
        return "Medium"
    if value < hi:
        return "High"
    return "Very High"


def make_synthetic_panel(n_countries: int = 20, n_years: int = 11,
                         start_year: int = 2011, high_fraction: float = 0.4,
                         seed: int = 7) -> Dataset:
    """Deterministic panel of ``n_countries`` x ``n_years`` records."""
    rng = np.random.default_rng(seed)
    n_high = int(round(high_fraction * n_countries))
    records = []
    for i in range(n_countries):
        country = f"Country_{i:02d}"
        region = REGIONS[i % len(REGIONS)]
        params = _HIGH if i < n_high else _MODERATE
        for t in range(n_years):
            year = start_year + t
            values = {}
            for name, (mean, trend) in params.items():
                noise = rng.normal(0.0, _NOISE_STD)
                values[name] = round(max(0.0, mean + trend * t + noise), 4)
            records.append(CountryYearRecord(
                country=country,
                region=region,
                year=year,
                exposure_cat=_band(values["exposure"], (20.0, 35.0, 50.0)),
                wri_cat=_band(values["wri"], (10.0, 25.0, 40.0)),
                vulnerability_cat=_band(values["vulnerability"], (35.0, 50.0, 65.0)),
                susceptibility_cat=_band(values["susceptibility"], (20.0, 30.0, 40.0)),
                **values,
            ))
    return Dataset(records)
