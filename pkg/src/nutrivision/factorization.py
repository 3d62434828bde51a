"""Low-rank factorization of the sparse user-recipe rating matrix.

Observed ratings are mean-centered and the residual is factored as
P @ Q.T by alternating least squares with ridge regularization:

    J = sum over observed (r - mu - p_u . q_i)^2
        + lambda * (||P||_F^2 + ||Q||_F^2)

Each half-step solves one side's rows exactly while the other is held
fixed, so J is non-increasing after every half-step; the training loop
records J (and training RMSE) so callers can assert that. Initialization
is seeded and all id orderings are sorted, making fits reproducible.

Predictions are mu + p_u . q_i clamped to the 1..5 rating scale; users
or items absent from the training data fall back to the global mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import EmptyRatings

RATING_MIN = 1.0
RATING_MAX = 5.0

DEFAULT_RANK = 8
DEFAULT_LAMBDA = 0.1
DEFAULT_ITERATIONS = 25


@dataclass(frozen=True)
class FactorModel:
    mu: float
    user_factors: np.ndarray  # (n_users, k)
    item_factors: np.ndarray  # (n_items, k)
    rank: int
    reg_lambda: float
    iterations: int
    user_index: dict[str, int]
    item_index: dict[str, int]
    objective_history: tuple[float, ...]  # after every half-step
    rmse_history: tuple[float, ...]  # after every full iteration

    def predict(self, user_id: str, item_id: str) -> float:
        value = self.mu
        u = self.user_index.get(user_id)
        i = self.item_index.get(item_id)
        if u is not None and i is not None:
            value = value + float(self.user_factors[u] @ self.item_factors[i])
        return float(np.clip(value, RATING_MIN, RATING_MAX))

    def predict_for_user(self, user_id: str, item_ids: list[str]) -> np.ndarray:
        return np.array([self.predict(user_id, item) for item in item_ids])


def _solve_rows(this: np.ndarray, other: np.ndarray, resid: np.ndarray,
                observed: np.ndarray, lam: float) -> None:
    """One ALS half-step: re-solve every row of ``this`` in place.

    ``resid`` and ``observed`` are oriented so rows of ``this`` index rows
    of both (callers pass transposes for the item side).
    """
    k = this.shape[1]
    eye = np.eye(k)
    for row in range(this.shape[0]):
        obs = observed[row]
        if not obs.any():
            this[row] = 0.0
            continue
        m = other[obs]
        a = m.T @ m + lam * eye
        b = m.T @ resid[row, obs]
        try:
            this[row] = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            # lam == 0 with rank-deficient design: minimum-norm solution
            this[row] = np.linalg.lstsq(a, b, rcond=None)[0]


def fit_factors(
    ratings: Mapping[tuple[str, str], float] | np.ndarray,
    *,
    rank: int = DEFAULT_RANK,
    reg_lambda: float = DEFAULT_LAMBDA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
) -> FactorModel:
    """Fit user and item factors to observed ratings.

    ``ratings`` is either a mapping ``(user_id, item_id) -> rating`` or a
    2-D float array with NaN marking missing entries (ids become the
    stringified row/column indices). The rank is capped at
    ``min(users, items)``.
    """
    if isinstance(ratings, np.ndarray):
        matrix = np.asarray(ratings, dtype=float)
        if matrix.ndim != 2:
            raise ValueError("rating array must be 2-D")
        user_ids = [str(i) for i in range(matrix.shape[0])]
        item_ids = [str(j) for j in range(matrix.shape[1])]
    else:
        if not ratings:
            raise EmptyRatings("no observed ratings to fit")
        user_ids = sorted({u for u, _ in ratings})
        item_ids = sorted({i for _, i in ratings})
        matrix = np.full((len(user_ids), len(item_ids)), np.nan)
        u_idx = {u: n for n, u in enumerate(user_ids)}
        i_idx = {i: n for n, i in enumerate(item_ids)}
        for (u, i), r in ratings.items():
            matrix[u_idx[u], i_idx[i]] = float(r)

    observed = ~np.isnan(matrix)
    n_obs = int(observed.sum())
    if n_obs == 0:
        raise EmptyRatings("no observed ratings to fit")

    mu = float(matrix[observed].mean())
    resid = np.where(observed, matrix - mu, 0.0)

    n_users, n_items = matrix.shape
    k = max(1, min(rank, n_users, n_items))
    rng = np.random.default_rng(seed)
    p = rng.normal(scale=0.1, size=(n_users, k))
    q = rng.normal(scale=0.1, size=(n_items, k))

    def objective() -> float:
        err = (resid - p @ q.T)[observed]
        sse = float((err**2).sum())
        return sse + reg_lambda * (float((p**2).sum()) + float((q**2).sum()))

    def train_rmse() -> float:
        pred = (p @ q.T)[observed]
        return float(np.sqrt(((resid[observed] - pred) ** 2).mean()))

    obj_history: list[float] = []
    rmse_history: list[float] = []
    for _ in range(iterations):
        _solve_rows(p, q, resid, observed, reg_lambda)
        obj_history.append(objective())
        _solve_rows(q, p, resid.T, observed.T, reg_lambda)
        obj_history.append(objective())
        rmse_history.append(train_rmse())

    return FactorModel(
        mu=mu,
        user_factors=p,
        item_factors=q,
        rank=k,
        reg_lambda=reg_lambda,
        iterations=iterations,
        user_index={u: n for n, u in enumerate(user_ids)},
        item_index={i: n for n, i in enumerate(item_ids)},
        objective_history=tuple(obj_history),
        rmse_history=tuple(rmse_history),
    )
