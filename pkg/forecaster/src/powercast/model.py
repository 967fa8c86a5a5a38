"""Recurrent one-step-ahead power model: training and open-loop prediction.

A single LSTM layer with a linear head maps the measured power at slot k to a
prediction for k+1. Prediction runs open loop: the network state is carried
across slots but every input is a true measurement, and the state is rebuilt
at each day boundary from the trailing history window.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .data import SLOTS_PER_DAY


@dataclass(frozen=True)
class TrainingSpec:
    train_fraction: float = 0.90
    hidden_units: int = 128
    max_epochs: int = 200
    learning_rate: float = 1e-3
    gradient_decay: float = 0.90          # RMSProp momentum
    squared_gradient_decay: float = 0.99  # RMSProp smoothing
    epsilon: float = 1e-8
    l2_regularization: float = 1e-4
    state_refresh_slots: int = SLOTS_PER_DAY
    refresh_history_days: int = 35
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise ValueError("train_fraction must be in (0, 1)")
        if self.hidden_units < 1 or self.max_epochs < 1:
            raise ValueError("hidden_units and max_epochs must be >= 1")


class NextSlotNet(nn.Module):
    def __init__(self, hidden_units: int):
        super().__init__()
        self.lstm = nn.LSTM(1, hidden_units, batch_first=True)
        self.head = nn.Linear(hidden_units, 1)

    def forward(self, x, state=None):
        out, state = self.lstm(x, state)
        return self.head(out), state


def _deterministic(seed: int) -> None:
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(1)


def train(history: np.ndarray, spec: TrainingSpec) -> tuple[dict, list[float]]:
    """Fit the model on the first train_fraction of whole days.

    Returns a checkpoint dict (weights, scale, spec) and the per-epoch loss
    curve. Sequences are whole days, shuffled every epoch, trained with
    teacher forcing on the one-step-ahead target.
    """
    days = len(history) // SLOTS_PER_DAY
    if days < 2:
        raise ValueError(f"need at least 2 whole days of data, got {days}")
    _deterministic(spec.seed)
    train_days = max(1, int(days * spec.train_fraction))
    series = history[:train_days * SLOTS_PER_DAY]
    scale = float(np.abs(series).max()) or 1.0
    x = torch.tensor(series / scale, dtype=torch.float32)
    x = x.view(train_days, SLOTS_PER_DAY, 1)
    inputs, targets = x[:, :-1, :], x[:, 1:, :]

    net = NextSlotNet(spec.hidden_units)
    optimizer = torch.optim.RMSprop(
        net.parameters(), lr=spec.learning_rate,
        alpha=spec.squared_gradient_decay, eps=spec.epsilon,
        momentum=spec.gradient_decay, weight_decay=spec.l2_regularization)
    loss_fn = nn.MSELoss()
    generator = torch.Generator().manual_seed(spec.seed)
    losses: list[float] = []
    for _ in range(spec.max_epochs):
        order = torch.randperm(train_days, generator=generator)
        epoch_loss = 0.0
        for start in range(0, train_days, 8):
            idx = order[start:start + 8]
            optimizer.zero_grad()
            pred, _ = net(inputs[idx])
            loss = loss_fn(pred, targets[idx])
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach()) * len(idx)
        losses.append(epoch_loss / train_days)
    checkpoint = {
        "state_dict": net.state_dict(),
        "scale": scale,
        "spec": asdict(spec),
        "train_days": train_days,
    }
    return checkpoint, losses


def save_checkpoint(path: str | Path, checkpoint: dict,
                    losses: list[float]) -> None:
    torch.save(checkpoint, path)
    with open(f"{path}.log.json", "w", encoding="utf-8") as fh:
        json.dump({"epoch_loss": losses}, fh, indent=2)
        fh.write("\n")


def load_checkpoint(path: str | Path) -> tuple[NextSlotNet, float, TrainingSpec]:
    checkpoint = torch.load(path, weights_only=True)
    spec = TrainingSpec(**checkpoint["spec"])
    net = NextSlotNet(spec.hidden_units)
    net.load_state_dict(checkpoint["state_dict"])
    net.eval()
    return net, float(checkpoint["scale"]), spec


def predict_open_loop(net: NextSlotNet, scale: float, spec: TrainingSpec,
                      history: np.ndarray, slots: int) -> np.ndarray:
    """Predict the last `slots` values of `history`, one step ahead each.

    The prediction for slot t consumes true measurements up to t-1 only. At
    every state-refresh boundary the recurrent state is rebuilt from the
    trailing `refresh_history_days` of true data, mirroring a daily state
    update in deployment.
    """
    total = len(history)
    if not (0 < slots < total):
        raise ValueError(f"slots must be in (0, {total}), got {slots}")
    _deterministic(spec.seed)
    x = torch.tensor(history / scale, dtype=torch.float32).view(1, -1, 1)
    start = total - slots
    preds = np.empty(slots, dtype=np.float64)
    state = None
    warm_end = -1
    with torch.no_grad():
        for i, t in enumerate(range(start, total)):
            offset = i % spec.state_refresh_slots
            if offset == 0:
                anchor = t - 1
                warm_start = max(0, anchor - spec.refresh_history_days
                                 * SLOTS_PER_DAY)
                out, state = net(x[:, warm_start:anchor + 1, :])
                warm_end = anchor
            elif t - 1 > warm_end:
                out, state = net(x[:, t - 1:t, :], state)
                warm_end = t - 1
            preds[i] = float(out[0, -1, 0]) * scale
    return preds
