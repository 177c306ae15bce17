"""Bayesian linear regression, expected held-out error, and significance.

The model: y_i ~ Normal(x_i.w + b, sigma^2) with independent
Normal(0, prior_scale^2) priors on w and b and a Normal prior on
log(sigma).  The posterior is approximated by a fully factorized
Gaussian fitted with Adam on exact ELBO gradients (see the backend
kernels).  Model comparison contrasts a target design (baseline +
predictor group) against the baseline-only design via expected MSE
under the posterior on held-out folds; significance comes from a
sign-flip permutation test over per-document errors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .backend import BACKEND_NAME, svi_adam
from .features import FeatureTable, build_design_matrix
from .treebank import ValidationError

INIT_LOG_SD = math.log(0.1)
# ELBO gain per data row between the last two trace windows below which
# the optimizer is considered settled (the ELBO scales with the number
# of rows, and Adam jitters by a few nats at the optimum, so neither an
# absolute nor a relative-to-|ELBO| threshold behaves across scales)
CONVERGENCE_NATS_PER_ROW = 1e-3


@dataclass
class FitConfig:
    learning_rate: float = 0.03
    steps: int = 2000
    prior_scale: float = 1.0
    seed: int = 0
    folds: int = 5
    permutations: int = 10_000
    noise_prior_loc: float = 0.0
    noise_prior_scale: float = 2.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.permutations < 1000:
            raise ValueError("permutations must be >= 1000")
        if self.steps < 1 or self.prior_scale <= 0 or self.noise_prior_scale <= 0:
            raise ValueError("bad fit configuration")


@dataclass
class GaussianPosterior:
    """Diagonal Gaussian over weights, bias, and log noise scale."""

    weight_means: np.ndarray
    weight_log_sds: np.ndarray
    bias_mean: float
    bias_log_sd: float
    noise_log_scale_mean: float
    noise_log_scale_sd: float
    final_elbo: float = float("nan")
    converged: bool = True

    def predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weight_means + self.bias_mean


@dataclass
class ConjugatePosterior:
    """Exact Gaussian posterior of fixed-noise Bayesian ridge regression.

    The bias is the last coordinate of ``mean``/``cov``.
    """

    mean: np.ndarray
    cov: np.ndarray

    @property
    def weight_means(self) -> np.ndarray:
        return self.mean[:-1]

    @property
    def bias_mean(self) -> float:
        return float(self.mean[-1])


@dataclass
class EvalReport:
    dependent: str
    group: str
    per_fold_expected_mse_target: list[float]
    per_fold_expected_mse_baseline: list[float]
    delta_mse: float
    p_value: float
    n_tokens: int
    folds: int
    seed: int
    details: "CellDetails | None" = field(default=None, repr=False)


@dataclass
class CellDetails:
    doc_ids: list[str]
    per_doc_sqerr_target: np.ndarray
    per_doc_sqerr_baseline: np.ndarray
    predictions_target: np.ndarray  # held-out posterior-mean predictions
    observed: np.ndarray


def fit_svi(X: np.ndarray, y: np.ndarray, config: FitConfig) -> GaussianPosterior:
    """Variational fit; deterministic (exact gradients, fixed init).

    Aborts on a non-finite objective; flags (and warns about) runs whose
    ELBO moving average is still climbing at the final step.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"bad shapes X{X.shape} y{y.shape}")
    n, d = X.shape
    if n < d:
        raise ValueError(f"need at least as many rows as columns ({n} < {d})")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in design matrix or response")

    gram = X.T @ X
    xty = X.T @ y
    xsum = X.sum(axis=0)
    ybar = float(y.mean())
    ysd = float(y.std())
    mu, rho, mu_b, rho_b, mu_n, rho_n, trace, ok = svi_adam(
        gram, xty, xsum, float(y.sum()), float(y @ y), float(n),
        config.learning_rate, config.steps, config.prior_scale,
        config.noise_prior_loc, config.noise_prior_scale, INIT_LOG_SD,
        ybar, math.log(max(ysd, 1e-2)),
    )
    if not ok:
        bad = int(np.flatnonzero(~np.isfinite(trace))[0])
        raise RuntimeError(
            f"ELBO became non-finite at step {bad} "
            f"(n={n}, d={d}, lr={config.learning_rate}, backend={BACKEND_NAME})"
        )
    window = max(10, config.steps // 10)
    converged = True
    if config.steps >= 2 * window:
        recent = float(trace[-window:].mean())
        before = float(trace[-2 * window:-window].mean())
        if recent - before > max(0.1, CONVERGENCE_NATS_PER_ROW * n):
            converged = False
            warnings.warn(
                f"ELBO still improving at final step ({before:.3f} -> {recent:.3f}); "
                "consider more steps"
            )
    return GaussianPosterior(
        weight_means=mu, weight_log_sds=rho, bias_mean=mu_b, bias_log_sd=rho_b,
        noise_log_scale_mean=mu_n, noise_log_scale_sd=math.exp(rho_n),
        final_elbo=float(trace[-1]), converged=converged,
    )


def fit_conjugate_oracle(X: np.ndarray, y: np.ndarray, prior_scale: float,
                         noise_scale: float) -> ConjugatePosterior:
    """Exact posterior for *known* noise scale, by direct linear solve.

    Serves as the independent oracle for the variational path: with the
    bias as an extra all-ones column, precision = X'X/sigma^2 + I/tau^2.
    """
    Xa = np.column_stack([X, np.ones(len(y))])
    prec = Xa.T @ Xa / noise_scale**2 + np.eye(Xa.shape[1]) / prior_scale**2
    cov = np.linalg.inv(prec)
    mean = cov @ (Xa.T @ y) / noise_scale**2
    return ConjugatePosterior(mean=mean, cov=cov)


def expected_sqerr(posterior: GaussianPosterior, X: np.ndarray,
                   y: np.ndarray) -> np.ndarray:
    """Per-row E_q[(y - x.w - b)^2], closed form under the diagonal Gaussian.

    (y - x.mu - mu_b)^2 + sum_j x_j^2 s_j^2 + s_b^2.  The observation
    noise variance is deliberately excluded: it is near-common to the
    models being compared and would only dilute their difference.
    """
    resid = y - posterior.predict(X)
    wvar = np.exp(2.0 * posterior.weight_log_sds)
    bvar = math.exp(2.0 * posterior.bias_log_sd)
    return resid**2 + (X**2) @ wvar + bvar


def expected_mse(posterior: GaussianPosterior, X: np.ndarray, y: np.ndarray) -> float:
    return float(expected_sqerr(posterior, X, y).mean())


def paired_permutation_test(per_doc_sqerr_target, per_doc_sqerr_baseline,
                            permutations: int = 10_000, seed: int = 0) -> float:
    """Two-sided sign-flip test on paired per-document mean errors.

    Statistic: mean difference.  When every sign assignment fits the
    budget (2^n - 1 <= permutations) the test is exact over the full
    enumeration; otherwise assignments are sampled and the add-one
    estimate (1 + #{|perm| >= |observed|}) / (permutations + 1) is
    returned.  Deterministic given the seed.
    """
    t = np.asarray(per_doc_sqerr_target, dtype=np.float64)
    b = np.asarray(per_doc_sqerr_baseline, dtype=np.float64)
    if t.shape != b.shape or t.ndim != 1:
        raise ValueError("paired inputs must be equal-length 1-D sequences")
    n = len(t)
    if n < 2:
        raise ValidationError("permutation test needs at least 2 documents")
    diffs = t - b
    obs = abs(diffs.mean())
    chunk = 1 << 16

    if n < 63 and (1 << n) - 1 <= permutations:
        total = 1 << n
        count = 0
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
            bits = (idx[:, None] >> np.arange(n, dtype=np.uint64)) & 1
            stats = (1.0 - 2.0 * bits) @ diffs / n
            count += int((np.abs(stats) >= obs).sum())
        # the identity assignment is part of the enumeration and always
        # matches, so count >= 1 and p is never 0
        return count / total

    rng = np.random.default_rng(seed)
    count = 0
    left = permutations
    while left > 0:
        take = min(chunk, left)
        signs = 1.0 - 2.0 * rng.integers(0, 2, size=(take, n))
        stats = signs @ diffs / n
        count += int((np.abs(stats) >= obs).sum())
        left -= take
    return (1 + count) / (permutations + 1)


def cross_validate(table: FeatureTable, group: str, dependent: str,
                   config: FitConfig) -> EvalReport:
    """Document-level k-fold comparison of target vs. baseline designs.

    For each fold, both models are fitted on the remaining folds and the
    per-token expected squared errors are computed on the held-out fold;
    errors are pooled over all tokens, so delta_mse = pooled target mean
    - pooled baseline mean (negative = target better).  The p-value is a
    sign-flip permutation test over per-document mean errors.
    """
    frame = table.frame
    doc_ids = table.doc_ids
    if len(doc_ids) < config.folds:
        raise ValidationError(
            f"{len(doc_ids)} documents cannot support {config.folds} folds"
        )
    fold_id = frame["fold_id"].to_numpy()
    folds = int(fold_id.max()) + 1
    if folds != config.folds:
        raise ValidationError(
            f"table was built with {folds} folds but config requests {config.folds}"
        )

    n_rows = len(frame)
    pooled_t = np.empty(n_rows)
    pooled_b = np.empty(n_rows)
    predictions = np.empty(n_rows)
    per_fold_t, per_fold_b = [], []
    y_all = frame[dependent].to_numpy(dtype=np.float64)

    for f in range(config.folds):
        test = fold_id == f
        train = ~test
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # zero-variance drops are per-fold noise
            X_t, y, _ = build_design_matrix(table, group, dependent, train_mask=train)
            X_b, _, _ = build_design_matrix(table, "baseline", dependent, train_mask=train)
        post_t = fit_svi(X_t[train], y[train], config)
        post_b = fit_svi(X_b[train], y[train], config)
        se_t = expected_sqerr(post_t, X_t[test], y[test])
        se_b = expected_sqerr(post_b, X_b[test], y[test])
        pooled_t[test] = se_t
        pooled_b[test] = se_b
        predictions[test] = post_t.predict(X_t[test])
        per_fold_t.append(float(se_t.mean()))
        per_fold_b.append(float(se_b.mean()))

    doc_col = frame["doc_id"].to_numpy()
    per_doc_t = np.array([pooled_t[doc_col == d].mean() for d in doc_ids])
    per_doc_b = np.array([pooled_b[doc_col == d].mean() for d in doc_ids])
    p_value = paired_permutation_test(
        per_doc_t, per_doc_b, config.permutations, seed=config.seed)

    return EvalReport(
        dependent=dependent,
        group=group,
        per_fold_expected_mse_target=per_fold_t,
        per_fold_expected_mse_baseline=per_fold_b,
        delta_mse=float(pooled_t.mean() - pooled_b.mean()),
        p_value=p_value,
        n_tokens=n_rows,
        folds=config.folds,
        seed=config.seed,
        details=CellDetails(
            doc_ids=list(doc_ids),
            per_doc_sqerr_target=per_doc_t,
            per_doc_sqerr_baseline=per_doc_b,
            predictions_target=predictions,
            observed=y_all,
        ),
    )
