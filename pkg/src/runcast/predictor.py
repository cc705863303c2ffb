"""Per-task runtime models: correlation-gated Bayesian linear regression.

Each task gets its own model, fitted from a handful of local profiling
runs. When runtime correlates with uncompressed input size (sample
Pearson r above 0.75) a conjugate Bayesian linear regression is fitted;
otherwise the model falls back to the median runtime, independent of
input size.

The regression is fitted in fully standardized space: the feature and
the runtime are both shifted to zero mean and scaled to unit variance.
That makes the zero-mean Gaussian prior with unit variance scale-free
(coefficients are O(1) regardless of byte or second magnitudes) and
leaves the intercept effectively unpenalized, since centring the target
drives it to zero. With design matrix X = [1, z], prior variance tau2
and noise variance sigma2, the posterior is

    S_N = (I/tau2 + X'X/sigma2)^-1        (covariance)
    m_N = S_N X'y / sigma2                (mean)

which coincides with ridge regression at penalty sigma2/tau2. The
predictive distribution at a new point is Gaussian with variance
sigma2 + x'S_N x, so intervals widen with distance from the training
mean and with the prior variance.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import norm

from .errors import LengthMismatch, MixedTasks, TooFewPoints, TooFewRuns
from .traces import MachineId, TaskRun

GATE_THRESHOLD = 0.75

# Relative floor on the noise scale: keeps the posterior well conditioned
# when a near-noiseless sample would otherwise drive sigma2 to zero.
NOISE_FLOOR_FRACTION = 0.01

BLR = "blr"
MEDIAN = "median"


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient.

    Returns 0.0 when either sequence has zero variance; the coefficient
    is undefined there and input-independent tasks should fall through
    to the median model.
    """
    if len(xs) != len(ys):
        raise LengthMismatch(f"got {len(xs)} xs and {len(ys)} ys")
    if len(xs) < 2:
        raise TooFewPoints("pearson needs at least 2 points")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return 0.0
    return float(dx @ dy) / denom


@dataclass(frozen=True)
class CorrelationGate:
    """Decision between regression and median fallback for one task."""

    coefficient: float
    threshold: float = GATE_THRESHOLD

    @property
    def use_regression(self) -> bool:
        return self.coefficient > self.threshold


@dataclass(frozen=True)
class Standardization:
    """Affine constants mapping raw (bytes, seconds) to fitting space."""

    x_mean: float
    x_std: float
    y_mean: float
    y_std: float


@dataclass(frozen=True)
class BlrPosterior:
    """Gaussian posterior over [intercept, slope] in standardized space."""

    mean: np.ndarray
    covariance: np.ndarray
    noise_variance: float
    prior_variance: float
    standardization: Standardization

    def __post_init__(self):
        if self.noise_variance <= 0:
            raise ValueError("noise_variance must be > 0")
        cov = np.asarray(self.covariance, dtype=float)
        if not np.allclose(cov, cov.T):
            raise ValueError("covariance must be symmetric")
        if np.any(np.linalg.eigvalsh(cov) <= 0):
            raise ValueError("covariance must be positive definite")

    def raw_coefficients(self) -> tuple[float, float]:
        """Posterior-mean intercept (s) and slope (s/byte) in raw units."""
        st = self.standardization
        slope = st.y_std * float(self.mean[1]) / st.x_std
        intercept = st.y_mean + st.y_std * float(self.mean[0]) - slope * st.x_mean
        return intercept, slope


@dataclass(frozen=True)
class TaskModel:
    """Fitted per-task predictor: regression posterior or median constant."""

    task: str
    kind: str
    training_count: int
    min_runtime_s: float
    correlation: float
    posterior: BlrPosterior | None = None
    median_s: float | None = None


@dataclass(frozen=True)
class Prediction:
    """Point runtime estimate with uncertainty bounds, in seconds."""

    point: float
    lower: float
    upper: float
    confidence: float
    machine: MachineId

    def __post_init__(self):
        if not (self.lower <= self.point <= self.upper):
            raise ValueError("prediction bounds must satisfy lower <= point <= upper")


def fit_blr(sizes, runtimes_s, prior_variance: float = 1.0) -> BlrPosterior:
    """Fit the Bayesian linear regression of runtime on input size.

    The noise variance is the maximum-likelihood residual variance of an
    ordinary least-squares pre-fit, floored at (1% of the mean runtime)^2
    so tiny near-noiseless samples stay well conditioned. Both values are
    computed in raw units and mapped into standardized space.
    """
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(runtimes_s, dtype=float)
    n = x.size
    if n < 3:
        raise TooFewPoints("regression needs at least 3 points")
    st = Standardization(
        x_mean=float(x.mean()),
        x_std=float(x.std()),
        y_mean=float(y.mean()),
        y_std=float(y.std()),
    )
    if st.x_std == 0.0 or st.y_std == 0.0:
        raise TooFewPoints("regression needs spread in both size and runtime")
    z = (x - st.x_mean) / st.x_std
    w = (y - st.y_mean) / st.y_std
    design = np.column_stack([np.ones(n), z])

    beta_ols, *_ = np.linalg.lstsq(design, w, rcond=None)
    residuals = w - design @ beta_ols
    noise_raw = float(residuals @ residuals) / n * st.y_std**2
    noise_raw = max(noise_raw, (NOISE_FLOOR_FRACTION * st.y_mean) ** 2)
    sigma2 = noise_raw / st.y_std**2

    precision = np.eye(2) / prior_variance + (design.T @ design) / sigma2
    covariance = np.linalg.inv(precision)
    covariance = (covariance + covariance.T) / 2.0
    mean = covariance @ (design.T @ w) / sigma2
    return BlrPosterior(
        mean=mean,
        covariance=covariance,
        noise_variance=sigma2,
        prior_variance=prior_variance,
        standardization=st,
    )


def fit_task_model(runs: list[TaskRun], threshold: float = GATE_THRESHOLD,
                   prior_variance: float = 1.0) -> TaskModel:
    """Fit the gated model for one task from its local profiling runs."""
    if len(runs) < 3:
        raise TooFewRuns(f"need at least 3 runs, got {len(runs)}")
    tasks = {r.task for r in runs}
    if len(tasks) > 1:
        raise MixedTasks(f"runs span tasks {sorted(tasks)}")

    sizes = [r.input_size_uncompressed for r in runs]
    runtimes = [r.runtime_s for r in runs]
    gate = CorrelationGate(coefficient=pearson(sizes, runtimes), threshold=threshold)
    common = {
        "task": runs[0].task,
        "training_count": len(runs),
        "min_runtime_s": min(runtimes),
        "correlation": gate.coefficient,
    }
    if gate.use_regression:
        return TaskModel(kind=BLR, posterior=fit_blr(sizes, runtimes, prior_variance), **common)
    return TaskModel(kind=MEDIAN, median_s=statistics.median(runtimes), **common)


def predict_local(model: TaskModel, input_size: float, confidence: float,
                  machine: MachineId = "Local") -> Prediction:
    """Predict the task runtime on the local machine for one input size.

    Regression predictions carry a Gaussian predictive interval at the
    requested confidence; median predictions are size-invariant with
    collapsed bounds. A non-positive point estimate clamps to the
    minimum observed training runtime, and the lower bound never drops
    below zero.
    """
    if not (0.0 < confidence < 1.0):
        raise ValueError("confidence must be in (0, 1)")
    if input_size < 0:
        raise ValueError("input_size must be >= 0")
    if model.kind == MEDIAN:
        point = model.median_s
        return Prediction(point=point, lower=point, upper=point,
                          confidence=confidence, machine=machine)

    post = model.posterior
    st = post.standardization
    z = (input_size - st.x_mean) / st.x_std
    phi = np.array([1.0, z])
    mean_std = float(phi @ post.mean)
    var_std = post.noise_variance + float(phi @ post.covariance @ phi)
    point = st.y_mean + st.y_std * mean_std
    scale = st.y_std * math.sqrt(var_std)
    quantile = float(norm.ppf(0.5 + confidence / 2.0))
    lower = point - quantile * scale
    upper = point + quantile * scale
    if point <= 0.0:
        point = model.min_runtime_s
        upper = max(upper, point)
    lower = max(0.0, min(lower, point))
    return Prediction(point=point, lower=lower, upper=upper,
                      confidence=confidence, machine=machine)


def models_to_json(models: list[TaskModel]) -> str:
    """Serialize fitted models so they can be reused on other clusters."""
    payload = []
    for model in models:
        entry: dict = {
            "task": model.task,
            "kind": model.kind,
            "training_count": model.training_count,
            "min_runtime_s": model.min_runtime_s,
            "correlation": model.correlation,
        }
        if model.kind == BLR:
            post = model.posterior
            entry["posterior"] = {
                "mean": list(map(float, post.mean)),
                "covariance": [list(map(float, row)) for row in post.covariance],
                "noise_variance": post.noise_variance,
                "prior_variance": post.prior_variance,
                "standardization": {
                    "x_mean": post.standardization.x_mean,
                    "x_std": post.standardization.x_std,
                    "y_mean": post.standardization.y_mean,
                    "y_std": post.standardization.y_std,
                },
            }
        else:
            entry["median_s"] = model.median_s
        payload.append(entry)
    return json.dumps({"models": payload}, sort_keys=True, indent=2)


def models_from_json(text: str) -> list[TaskModel]:
    payload = json.loads(text)
    models = []
    for entry in payload["models"]:
        posterior = None
        median_s = entry.get("median_s")
        if entry["kind"] == BLR:
            raw = entry["posterior"]
            posterior = BlrPosterior(
                mean=np.array(raw["mean"], dtype=float),
                covariance=np.array(raw["covariance"], dtype=float),
                noise_variance=raw["noise_variance"],
                prior_variance=raw["prior_variance"],
                standardization=Standardization(**raw["standardization"]),
            )
        models.append(
            TaskModel(
                task=entry["task"],
                kind=entry["kind"],
                training_count=entry["training_count"],
                min_runtime_s=entry["min_runtime_s"],
                correlation=entry["correlation"],
                posterior=posterior,
                median_s=median_s,
            )
        )
    return models


def save_models(models: list[TaskModel], path: str | Path) -> None:
    Path(path).write_text(models_to_json(models), encoding="utf-8")


def load_models(path: str | Path) -> list[TaskModel]:
    return models_from_json(Path(path).read_text(encoding="utf-8"))
