"""Meter CSV ingestion and forecast CSV emission.

Input schema: `timestamp_iso8601,power_kw`, 15-minute steps, consumption
stored positive. Output schema: `node_id,slot_index,p_gen_hat_kw,p_load_hat_kw`
with load values <= 0; floats written via repr so a reload is bit-exact.
"""

from __future__ import annotations

from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

SLOTS_PER_DAY = 96
SLOT_SPACING = timedelta(minutes=15)
FORECAST_HEADER = "node_id,slot_index,p_gen_hat_kw,p_load_hat_kw"


def read_history_csv(path: str | Path) -> np.ndarray:
    """Read a meter series, validating the 15-minute grid."""
    path = Path(path)
    values: list[float] = []
    prev: datetime | None = None
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "timestamp_iso8601,power_kw":
            raise ValueError(f"{path}:1: expected header "
                             f"'timestamp_iso8601,power_kw', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                ts_s, p_s = line.split(",")
                ts = datetime.fromisoformat(ts_s)
                values.append(float(p_s))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if prev is not None and ts - prev != SLOT_SPACING:
                raise ValueError(f"{path}:{lineno}: {ts_s} is not 15 minutes "
                                 f"after the previous row")
            prev = ts
    if not values:
        raise ValueError(f"{path}: no samples")
    return np.asarray(values, dtype=np.float64)


def write_forecast_csv(path: str | Path, node_id: str, kind: str,
                       predictions_kw: np.ndarray,
                       start_slot: int = 0) -> None:
    """Emit one profile's forecasts in the exchange schema.

    Generation predictions are clamped at zero; load predictions (consumption,
    positive in the meter series) are emitted negated in the load column. The
    column for the other kind is written as 0.0.
    """
    if kind not in ("generation", "load"):
        raise ValueError(f"unknown kind {kind!r}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(FORECAST_HEADER + "\n")
        for i, p in enumerate(predictions_kw):
            v = float(p)
            if kind == "generation":
                gen, load = max(0.0, v), 0.0
            else:
                gen, load = 0.0, min(0.0, -max(0.0, v))
            fh.write(f"{node_id},{start_slot + i},{gen!r},{load!r}\n")


def merge_forecast_csvs(out_path: str | Path, paths: list[str | Path]) -> None:
    """Combine single-profile forecast files into one, summing by column."""
    rows: dict[tuple[str, int], list[float]] = {}
    order: list[tuple[str, int]] = []
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != FORECAST_HEADER:
                raise ValueError(f"{path}: unexpected header {header!r}")
            for line in fh:
                node_id, slot_s, gen_s, load_s = line.strip().split(",")
                key = (node_id, int(slot_s))
                if key not in rows:
                    rows[key] = [0.0, 0.0]
                    order.append(key)
                rows[key][0] += float(gen_s)
                rows[key][1] += float(load_s)
    order.sort(key=lambda k: (k[0], k[1]))
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        fh.write(FORECAST_HEADER + "\n")
        for key in order:
            gen, load = rows[key]
            fh.write(f"{key[0]},{key[1]},{gen!r},{load!r}\n")


def rmse(predicted: np.ndarray, actual: np.ndarray) -> float:
    predicted = np.asarray(predicted, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if predicted.shape != actual.shape or predicted.size == 0:
        raise ValueError("series must have equal, non-zero length")
    return float(np.sqrt(np.mean((predicted - actual) ** 2)))
