"""Comparison predictors: Naive ratio, Online-M, and Online-P.

The Naive approach averages the runtime/input-size ratio over the
training tuples and scales the query size by it. The Online variants
share a correlation gate with the main predictor: correlated tasks are
predicted by ratio-scaling the nearest training point; uncorrelated
tasks use the mean runtime (M) or a draw from whichever of a Normal or
Gamma maximum-likelihood fit explains the data better (P). None of the
baselines use microbenchmark data, so their local predictions apply
unchanged to every target machine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, polygamma

from .errors import TooFewRuns
from .predictor import GATE_THRESHOLD, pearson
from .traces import TaskRun

VARIANT_M = "m"
VARIANT_P = "p"


@dataclass(frozen=True)
class NaiveModel:
    task: str
    mean_ratio: float  # seconds per byte

    def __post_init__(self):
        if self.mean_ratio < 0:
            raise ValueError("mean_ratio must be >= 0")


@dataclass(frozen=True)
class OnlineModel:
    task: str
    training: tuple[tuple[float, float, float, float], ...]  # (size, io_read, io_write, runtime_s)
    variant: str
    correlation: float

    def __post_init__(self):
        if not self.training:
            raise TooFewRuns("online model needs at least 1 training tuple")
        if self.variant not in (VARIANT_M, VARIANT_P):
            raise ValueError(f"unknown online variant {self.variant!r}")


def fit_naive(runs: list[TaskRun]) -> NaiveModel:
    """Mean runtime/size ratio over the training runs.

    Zero-size runs have no defined ratio and are left out; a task with
    only zero-size inputs gets ratio 0, honestly reflecting that the
    ratio model cannot describe it.
    """
    if not runs:
        raise TooFewRuns("naive model needs at least 1 run")
    ratios = [
        r.runtime_s / r.input_size_uncompressed
        for r in runs
        if r.input_size_uncompressed > 0
    ]
    mean_ratio = sum(ratios) / len(ratios) if ratios else 0.0
    return NaiveModel(task=runs[0].task, mean_ratio=mean_ratio)


def naive_predict(model: NaiveModel, input_size: float) -> float:
    if input_size < 0:
        raise ValueError("input_size must be >= 0")
    return model.mean_ratio * input_size


def fit_online(runs: list[TaskRun], variant: str) -> OnlineModel:
    if not runs:
        raise TooFewRuns("online model needs at least 1 run")
    training = tuple(
        (float(r.input_size_uncompressed), float(r.io_read_bytes),
         float(r.io_write_bytes), r.runtime_s)
        for r in runs
    )
    sizes = [t[0] for t in training]
    runtimes = [t[3] for t in training]
    correlation = pearson(sizes, runtimes) if len(training) >= 2 else 0.0
    return OnlineModel(task=runs[0].task, training=training,
                       variant=variant, correlation=correlation)


def online_predict(model: OnlineModel, input_size: float, seed: int) -> float:
    """Predict one runtime with the Online-M or Online-P rules.

    Deterministic for a fixed seed: only the uncorrelated P branch
    consumes randomness, with exactly one draw.
    """
    if input_size < 0:
        raise ValueError("input_size must be >= 0")
    if model.correlation > GATE_THRESHOLD:
        # Nearest training point by input size; ties resolved towards the
        # smaller size, then runtime, to keep the choice deterministic.
        nearest = min(model.training, key=lambda t: (abs(t[0] - input_size), t[0], t[3]))
        size_n, runtime_n = nearest[0], nearest[3]
        if size_n == 0.0:
            return runtime_n
        return runtime_n * (input_size / size_n)

    runtimes = np.array([t[3] for t in model.training], dtype=float)
    mean = float(runtimes.mean())
    if model.variant == VARIANT_M:
        return mean

    variance = float(runtimes.var())
    if variance == 0.0:
        return mean
    rng = np.random.default_rng(seed)
    gamma_fit = fit_gamma_mle(runtimes)
    if normal_loglik(runtimes) >= gamma_fit[2]:
        draw = float(rng.normal(mean, math.sqrt(variance)))
    else:
        draw = float(rng.gamma(gamma_fit[0], gamma_fit[1]))
    if draw <= 0.0:
        draw = float(runtimes.min())
    return draw


def normal_loglik(values: np.ndarray) -> float:
    """Log-likelihood of the Normal maximum-likelihood fit."""
    n = values.size
    variance = float(values.var())
    return -0.5 * n * (math.log(2.0 * math.pi * variance) + 1.0)


def fit_gamma_mle(values: np.ndarray) -> tuple[float, float, float]:
    """Gamma maximum-likelihood fit, returning (shape, scale, loglik).

    Newton iteration on the shape parameter, converging the update below
    1e-10. Callers must rule out zero-variance samples first.
    """
    mean = float(values.mean())
    s = math.log(mean) - float(np.mean(np.log(values)))
    if s <= 0.0:
        raise ValueError("degenerate sample for gamma fit")
    shape = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(100):
        step = (math.log(shape) - float(polygamma(0, shape)) - s) \
            / (1.0 / shape - float(polygamma(1, shape)))
        shape -= step
        if abs(step) < 1e-10:
            break
    scale = mean / shape
    n = values.size
    loglik = float(
        (shape - 1.0) * np.sum(np.log(values))
        - np.sum(values) / scale
        - n * shape * math.log(scale)
        - n * gammaln(shape)
    )
    return shape, scale, loglik
