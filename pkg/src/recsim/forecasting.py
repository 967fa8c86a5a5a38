"""Next-slot power forecasting: contract, baselines, file adapter, RMSE.

A forecaster sees history up to and including slot k (open loop: the true
measured value at k is available) and predicts slot k+1. It must never read
beyond k. The file adapter bridges externally produced forecasts (e.g. the
neural forecaster) through the CSV schema below.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

FORECAST_CSV_HEADER = ("node_id", "slot_index", "p_gen_hat_kw", "p_load_hat_kw")


@dataclass(frozen=True)
class ForecastPair:
    """Predicted generation (>= 0) and load (<= 0) for one node and slot."""

    p_gen_hat_kw: float
    p_load_hat_kw: float

    def __post_init__(self):
        if not (math.isfinite(self.p_gen_hat_kw) and math.isfinite(self.p_load_hat_kw)):
            raise ValueError("forecast values must be finite")
        if self.p_gen_hat_kw < 0:
            raise ValueError(f"generation forecast must be >= 0, got {self.p_gen_hat_kw}")
        if self.p_load_hat_kw > 0:
            raise ValueError(f"load forecast must be <= 0, got {self.p_load_hat_kw}")


def clamp_pair(p_gen_hat_kw: float, p_load_hat_kw: float) -> ForecastPair:
    """Clamp raw model outputs to the physical signs."""
    return ForecastPair(max(0.0, p_gen_hat_kw), min(0.0, p_load_hat_kw))


def persistence_forecast(history: Sequence[float]) -> float:
    """Next-slot forecast equals the latest measurement."""
    if len(history) == 0:
        raise ValueError("persistence needs at least one sample")
    return float(history[-1])


def seasonal_naive_forecast(history: Sequence[float], period: int = 96) -> float:
    """Next-slot forecast equals the value one period earlier."""
    if len(history) < period:
        raise ValueError(f"seasonal naive needs >= {period} samples, got {len(history)}")
    return float(history[-period])


def rmse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    if len(predicted) != len(actual) or len(predicted) == 0:
        raise ValueError("series must have equal, non-zero length")
    return math.sqrt(sum((p - a) ** 2 for p, a in zip(predicted, actual)) / len(predicted))


class SeriesForecaster:
    """Baseline forecaster over per-node actual series.

    `gen` and `load` hold the full actual series (internal sign convention)
    indexed so that the simulation horizon starts at `horizon_start`. The
    forecast for horizon slot k reads samples strictly before
    horizon_start + k, preserving open-loop causality.
    """

    def __init__(self, gen: dict[str, Sequence[float]],
                 load: dict[str, Sequence[float]], horizon_start: int,
                 method: str = "persistence", period: int = 96):
        if method not in ("persistence", "seasonal_naive"):
            raise ValueError(f"unknown forecast method {method!r}")
        need = 1 if method == "persistence" else period
        if horizon_start < need:
            raise ValueError(f"{method} needs {need} slots of history before the horizon")
        self.gen = gen
        self.load = load
        self.horizon_start = horizon_start
        self.method = method
        self.period = period

    def pair(self, node_id: str, slot: int) -> ForecastPair:
        end = self.horizon_start + slot  # history available: [0, end)
        g = self.gen[node_id][:end]
        l = self.load[node_id][:end]
        if self.method == "persistence":
            return clamp_pair(persistence_forecast(g), persistence_forecast(l))
        return clamp_pair(seasonal_naive_forecast(g, self.period),
                          seasonal_naive_forecast(l, self.period))


class PerfectForecaster:
    """Serves the actual powers (used to check online == offline equivalence)."""

    def __init__(self, gen: dict[str, Sequence[float]],
                 load: dict[str, Sequence[float]], horizon_start: int):
        self.gen = gen
        self.load = load
        self.horizon_start = horizon_start

    def pair(self, node_id: str, slot: int) -> ForecastPair:
        k = self.horizon_start + slot
        return ForecastPair(self.gen[node_id][k], self.load[node_id][k])


class FileForecaster:
    """Forecasts precomputed elsewhere, keyed by (node_id, slot_index)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._pairs: dict[tuple[str, int], ForecastPair] = {}
        last_slot: dict[str, int] = {}
        with open(self.path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != FORECAST_CSV_HEADER:
                raise ValueError(f"{self.path}: expected header "
                                 f"{','.join(FORECAST_CSV_HEADER)}, got {header}")
            for lineno, row in enumerate(reader, start=2):
                if len(row) != 4:
                    raise ValueError(f"{self.path}:{lineno}: expected 4 columns")
                node_id, slot_s, gen_s, load_s = row
                try:
                    slot = int(slot_s)
                    pair = ForecastPair(float(gen_s), float(load_s))
                except ValueError as exc:
                    raise ValueError(f"{self.path}:{lineno}: {exc}") from exc
                if node_id in last_slot and slot <= last_slot[node_id]:
                    raise ValueError(f"{self.path}:{lineno}: non-monotone slot index "
                                     f"{slot} for node {node_id}")
                last_slot[node_id] = slot
                self._pairs[(node_id, slot)] = pair

    def pair(self, node_id: str, slot: int) -> ForecastPair:
        try:
            return self._pairs[(node_id, slot)]
        except KeyError:
            raise ValueError(f"{self.path}: no forecast for node {node_id} "
                             f"at slot {slot}") from None


def write_forecast_csv(path: str | Path, rows: Sequence[tuple[str, int, float, float]]) -> None:
    """Write forecasts in the exchange schema; floats via repr for exact round-trips."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(FORECAST_CSV_HEADER) + "\n")
        for node_id, slot, gen, load in rows:
            fh.write(f"{node_id},{slot},{gen!r},{load!r}\n")
