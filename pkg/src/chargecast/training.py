"""Optimizers, the fine-tuning loop, and the evaluation protocol."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import seeds
from .domain import StationGraph
from .errors import ConfigError, DataError, NumericError
from .losses import LossConfig, combined_loss, metrics
from .model import FREEZE_MODES, PfgaModel, forward_batch

__all__ = [
    "TrainConfig",
    "Adam",
    "MomentumSgd",
    "FitResult",
    "EvalReport",
    "fit",
    "evaluate",
    "persistence_forecast",
]

OPTIMIZER_KINDS = ("adam", "momentum")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    max_epochs: int = 300
    batch_size: int = 64
    seed: int = 0
    optimizer_kind: str = "adam"
    use_bands: bool = True
    use_granules: bool = True
    use_freq_loss: bool = True
    use_graph_mask: bool = True
    freeze_mode: str = "partial"

    def __post_init__(self):
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ConfigError("learning_rate must be positive")
        if self.max_epochs < 1 or self.batch_size < 1:
            raise ConfigError("max_epochs and batch_size must be positive")
        if self.optimizer_kind not in OPTIMIZER_KINDS:
            raise ConfigError(f"optimizer_kind must be one of {OPTIMIZER_KINDS}")
        if self.freeze_mode not in FREEZE_MODES:
            raise ConfigError(f"freeze_mode must be one of {FREEZE_MODES}")


class Adam:
    """Adaptive-moment estimation with bias correction."""

    def __init__(self, params, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(t.data) for t in self.params]
        self.v = [np.zeros_like(t.data) for t in self.params]
        self.t = 0

    def step(self):
        self.t += 1
        for i, p in enumerate(self.params):
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / (1.0 - self.beta1**self.t)
            v_hat = self.v[i] / (1.0 - self.beta2**self.t)
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class MomentumSgd:
    def __init__(self, params, lr: float, momentum: float = 0.9):
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum
        self.v = [np.zeros_like(t.data) for t in self.params]

    def step(self):
        for i, p in enumerate(self.params):
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            self.v[i] = self.momentum * self.v[i] + g
            p.data = p.data - self.lr * self.v[i]


def _make_optimizer(kind: str, params, lr: float):
    if kind == "adam":
        return Adam(params, lr)
    return MomentumSgd(params, lr)


def _stack_batch(samples):
    hist = np.stack([s.history for s in samples])
    target = np.stack([s.target for s in samples])
    hours = np.array([s.anchor_hour for s in samples])
    dows = np.array([s.anchor_dow for s in samples])
    return hist, target, hours, dows


@dataclass
class FitResult:
    model: PfgaModel
    log: list  # (epoch, train_loss, valid_mae) tuples
    best_epoch: int
    best_valid_mae: float


def fit(
    model: PfgaModel,
    train_samples,
    valid_samples,
    graph: StationGraph,
    train_cfg: TrainConfig,
    loss_cfg: LossConfig,
) -> FitResult:
    """Seeded mini-batch descent on the combined loss over trainable parameters.

    Per epoch the samples are reshuffled from the train.shuffle substream,
    the validation MAE is logged, and the best-validation parameter state is
    retained and restored into the model at the end. A non-finite loss
    aborts with the offending epoch. Ablation flags take effect here:
    use_freq_loss=False forces the frequency weight to zero and
    use_graph_mask=False runs attention unmasked.
    """
    if len(train_samples) == 0 or len(valid_samples) == 0:
        raise DataError("fit requires non-empty train and validation sets")
    eff_loss = loss_cfg if train_cfg.use_freq_loss else LossConfig(lambda_freq=0.0)
    params = model.trainable_parameters()
    optimizer = _make_optimizer(train_cfg.optimizer_kind, [t for _, t in params], train_cfg.learning_rate)
    rng = seeds.substream(train_cfg.seed, "train.shuffle")
    adjacency = graph.adjacency
    mask_on = train_cfg.use_graph_mask

    valid_hist, valid_target, valid_hours, valid_dows = _stack_batch(valid_samples)

    log = []
    best = None  # (valid_mae, epoch, state)
    n = len(train_samples)
    for epoch in range(1, train_cfg.max_epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, train_cfg.batch_size):
            batch = [train_samples[i] for i in order[lo : lo + train_cfg.batch_size]]
            hist, target, hours, dows = _stack_batch(batch)
            pred = forward_batch(model, hist, hours, dows, adjacency, use_graph_mask=mask_on)
            loss = combined_loss(pred, target, eff_loss)
            value = float(loss.data)
            if not np.isfinite(value):
                raise NumericError(f"non-finite training loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            total += value * len(batch)
        train_loss = total / n

        valid_pred = forward_batch(
            model, valid_hist, valid_hours, valid_dows, adjacency, use_graph_mask=mask_on
        )
        valid_mae = float(np.mean(np.abs(valid_pred.data - valid_target)))
        if not np.isfinite(valid_mae):
            raise NumericError(f"non-finite validation error at epoch {epoch}")
        log.append((epoch, train_loss, valid_mae))
        if best is None or valid_mae < best[0]:
            best = (valid_mae, epoch, [(name, t.data.copy()) for name, t in params])

    by_name = dict(params)
    for name, data in best[2]:
        by_name[name].data = data
    return FitResult(model=model, log=log, best_epoch=best[1], best_valid_mae=best[0])


def persistence_forecast(samples) -> np.ndarray:
    """Repeat each window's last observed target-channel value across the horizon."""
    preds = []
    for s in samples:
        last = s.history[-1, :, 0]  # (N,)
        horizon = s.target.shape[0]
        preds.append(np.repeat(last[None, :, None], horizon, axis=0))
    return np.stack(preds)


@dataclass
class EvalReport:
    per_step: list  # one metrics dict per horizon step, index 0 = one step ahead
    aggregate: dict
    baseline: dict
    predictions: np.ndarray  # (n_windows, S, N, 1)
    truths: np.ndarray

    def as_json_dict(self) -> dict:
        return {
            "aggregate": self.aggregate,
            "per_step": self.per_step,
            "persistence_baseline": self.baseline,
        }


def evaluate(
    model: PfgaModel,
    test_samples,
    graph: StationGraph,
    use_graph_mask: bool = True,
    chunk: int = 256,
) -> EvalReport:
    if len(test_samples) == 0:
        raise DataError("evaluate requires a non-empty test set")
    preds = []
    truths = []
    for lo in range(0, len(test_samples), chunk):
        batch = test_samples[lo : lo + chunk]
        hist, target, hours, dows = _stack_batch(batch)
        out = forward_batch(model, hist, hours, dows, graph.adjacency, use_graph_mask=use_graph_mask)
        preds.append(out.data)
        truths.append(target)
    predictions = np.concatenate(preds)
    truth = np.concatenate(truths)

    per_step = [metrics(predictions[:, s], truth[:, s]) for s in range(predictions.shape[1])]
    aggregate = metrics(predictions, truth)
    baseline = metrics(persistence_forecast(test_samples), truth)
    return EvalReport(
        per_step=per_step,
        aggregate=aggregate,
        baseline=baseline,
        predictions=predictions,
        truths=truth,
    )
