"""Personalized recipe ranking.

The score pipeline, in order:

1. Hard diet filter. A vegan user only ever sees vegan recipes, a
   vegetarian sees vegan and vegetarian, a non-vegetarian sees all.
   This is an inviolable filter, not a score penalty.
2. Hybrid score: content similarity (TF-IDF of the user's health history
   against recipe descriptions) blended with collaborative predictions
   from the rating factorization, both min-max normalized over the
   candidate set. The blend weight alpha snaps to 1 (content only) for
   users with fewer than three ratings, since collaborative predictions
   mean nothing cold.
3. BMI adjustment: underweight users get a calorie bonus, overweight and
   obese users a calorie penalty, scaled by gamma.
4. Deficiency boost: macros under-supplied by the trailing week of
   logged meals (against configured daily targets) pull up recipes rich
   in those macros, scaled by beta and the deficit fraction.
5. Skip penalty: recipes the user declined within the window lose delta.

Ties break by recipe id ascending; warnings (sugar or carbs above the
user's limits) are attached to the output but never remove a recipe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Mapping, Sequence

import numpy as np

from .catalog import Recipe, allowed_diet_tags, find_recipe
from .errors import NoEligibleRecipes, UnknownUser
from .factorization import FactorModel, fit_factors
from .profiles import FeedbackEvent, SkipRecord, UserProfile, compute_bmi, utc_now
from .store import KIND_FEEDBACK, EventLog, MaterializedState
from .tfidf import TfIdfModel, fit_tfidf

DEFICIT_MACROS = ("carbohydrates", "protein", "fat")

# Shipped placeholder daily targets (grams); real deployments should set
# these per population in the config file.
DEFAULT_DAILY_TARGETS = {"carbohydrates": 275.0, "protein": 60.0, "fat": 70.0}


@dataclass(frozen=True)
class RecommenderConfig:
    alpha: float = 0.5  # content weight in the hybrid blend
    gamma: float = 0.2  # BMI calorie adjustment strength
    beta: float = 0.2  # deficiency boost strength
    delta: float = 0.1  # recent-skip penalty
    rank_k: int = 8
    reg_lambda: float = 0.1
    iterations: int = 25
    seed: int = 0
    stop_words: tuple[str, ...] = ()
    daily_targets: Mapping = field(default_factory=lambda: dict(DEFAULT_DAILY_TARGETS))
    cold_start_min_ratings: int = 3
    window_days: int = 7

    def targets_for(self, profile: UserProfile) -> dict[str, float]:
        """Daily macro targets; flat, or nested per gender with a default."""
        targets = dict(self.daily_targets)
        if targets and all(isinstance(v, Mapping) for v in targets.values()):
            chosen = targets.get(profile.gender) or targets.get("default") or {}
            targets = dict(chosen)
        return {m: float(targets.get(m, 0.0)) for m in DEFICIT_MACROS}


@dataclass(frozen=True)
class NutrientWarning:
    nutrient: str
    amount_g: float
    limit_g: float

    def to_dict(self) -> dict:
        return {"nutrient": self.nutrient, "amount_g": self.amount_g, "limit_g": self.limit_g}


@dataclass(frozen=True)
class Recommendation:
    recipe_id: str
    score: float
    warnings: tuple[NutrientWarning, ...]
    rationale_terms: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "recipe_id": self.recipe_id,
            "score": self.score,
            "warnings": [w.to_dict() for w in self.warnings],
            "rationale_terms": list(self.rationale_terms),
        }


@dataclass(frozen=True)
class ModelSnapshot:
    """Immutable view the ranking reads: fitted models plus rating state."""

    recipes: tuple[Recipe, ...]
    tfidf: TfIdfModel
    factors: FactorModel | None  # None until anyone has rated anything
    rating_counts: Mapping[str, int]  # per user
    skips: tuple[SkipRecord, ...]


def build_snapshot(
    recipes: Sequence[Recipe],
    ratings: Mapping[tuple[str, str], float],
    skips: Sequence[SkipRecord],
    cfg: RecommenderConfig,
) -> ModelSnapshot:
    """Fit both models over the current corpus and ratings."""
    recipes = tuple(recipes)
    tfidf = fit_tfidf([r.description for r in recipes], stop_words=cfg.stop_words)
    factors = None
    if ratings:
        factors = fit_factors(
            dict(ratings),
            rank=cfg.rank_k,
            reg_lambda=cfg.reg_lambda,
            iterations=cfg.iterations,
            seed=cfg.seed,
        )
    counts: dict[str, int] = {}
    for user_id, _ in ratings:
        counts[user_id] = counts.get(user_id, 0) + 1
    return ModelSnapshot(
        recipes=recipes,
        tfidf=tfidf,
        factors=factors,
        rating_counts=counts,
        skips=tuple(skips),
    )


def content_scores(profile: UserProfile, model: TfIdfModel) -> np.ndarray:
    """Cosine of the user's health-history vector against every recipe."""
    return model.doc_vectors @ model.vectorize(profile.health_history)


def _minmax(values: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; a constant vector maps to zeros (no information)."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi > lo:
        return (values - lo) / (hi - lo)
    return np.zeros_like(values)


def hybrid_scores(
    profile: UserProfile,
    snapshot: ModelSnapshot,
    candidates: Sequence[Recipe],
    alpha: float,
    cold_start_min_ratings: int = 3,
) -> np.ndarray:
    """Blend normalized content and collaborative scores over candidates."""
    indices = [snapshot.recipes.index(r) for r in candidates]
    content = content_scores(profile, snapshot.tfidf)[indices]

    n_ratings = snapshot.rating_counts.get(profile.user_id, 0)
    if snapshot.factors is None or n_ratings < cold_start_min_ratings:
        alpha = 1.0
    if alpha >= 1.0:
        return _minmax(content)

    collab = snapshot.factors.predict_for_user(profile.user_id, [r.id for r in candidates])
    return alpha * _minmax(content) + (1.0 - alpha) * _minmax(collab)


def warnings_for(recipe: Recipe, profile: UserProfile) -> tuple[NutrientWarning, ...]:
    """Limit checks: a warning per nutrient strictly above the user's limit."""
    found = []
    if recipe.per_serving.sugar_g > profile.sugar_limit_g:
        found.append(
            NutrientWarning("sugar", recipe.per_serving.sugar_g, profile.sugar_limit_g)
        )
    if recipe.per_serving.carbohydrates_g > profile.carb_limit_g:
        found.append(
            NutrientWarning(
                "carbohydrates", recipe.per_serving.carbohydrates_g, profile.carb_limit_g
            )
        )
    return tuple(found)


def apply_warnings(
    scored: Sequence[tuple[Recipe, float]],
    profile: UserProfile,
    rationale: Mapping[str, tuple[str, ...]] | None = None,
) -> list[Recommendation]:
    """Wrap scored recipes as recommendations; warnings never drop one."""
    rationale = rationale or {}
    return [
        Recommendation(
            recipe_id=recipe.id,
            score=score,
            warnings=warnings_for(recipe, profile),
            rationale_terms=rationale.get(recipe.id, ()),
        )
        for recipe, score in scored
    ]


def _rationale_terms(profile: UserProfile, model: TfIdfModel, doc_index: int, top: int = 3):
    """Terms contributing most to the user-recipe content match."""
    user_vec = model.vectorize(profile.health_history)
    contributions = user_vec * model.doc_vectors[doc_index]
    if not contributions.any():
        return ()
    order = np.argsort(-contributions, kind="stable")[:top]
    terms = sorted(model.vocabulary, key=model.vocabulary.get)
    return tuple(terms[i] for i in order if contributions[i] > 0)


def _recent(ts: datetime, now: datetime, days: int) -> bool:
    return now - timedelta(days=days) <= ts <= now


def recommend(
    profile: UserProfile,
    snapshot: ModelSnapshot,
    cfg: RecommenderConfig,
    count: int = 5,
    now: datetime | None = None,
) -> list[Recommendation]:
    """Rank eligible recipes for the user; see the module docstring.

    ``now`` anchors the trailing meal and skip windows; it defaults to
    the wall clock, so pass it explicitly for reproducible output.
    """
    now = now or utc_now()
    allowed = allowed_diet_tags(profile.diet_pref)
    candidates = [r for r in snapshot.recipes if r.diet_tag in allowed]
    if not candidates:
        raise NoEligibleRecipes(f"no recipes match diet preference {profile.diet_pref!r}")

    scores = hybrid_scores(
        profile, snapshot, candidates, cfg.alpha, cfg.cold_start_min_ratings
    )

    category = profile.bmi().category
    if cfg.gamma != 0.0 and category in ("underweight", "overweight", "obese"):
        calories = _minmax(np.array([r.per_serving.calories for r in candidates]))
        sign = 1.0 if category == "underweight" else -1.0
        scores = scores + sign * cfg.gamma * calories

    targets = cfg.targets_for(profile)
    window_meals = [
        e.report.totals
        for e in profile.meal_log
        if _recent(e.timestamp, now, cfg.window_days)
    ]
    for macro in DEFICIT_MACROS:
        target = targets.get(macro, 0.0)
        if target <= 0:
            continue
        mean_daily = sum(t.macro_grams(macro) for t in window_meals) / cfg.window_days
        if mean_daily >= target:
            continue
        deficit_fraction = (target - mean_daily) / target
        macro_content = _minmax(
            np.array([r.per_serving.macro_grams(macro) for r in candidates])
        )
        scores = scores + cfg.beta * deficit_fraction * macro_content

    recently_skipped = {
        s.recipe_id
        for s in snapshot.skips
        if s.user_id == profile.user_id and _recent(s.timestamp, now, cfg.window_days)
    }
    if recently_skipped:
        penalty = np.array([r.id in recently_skipped for r in candidates], dtype=float)
        scores = scores - cfg.delta * penalty

    order = sorted(range(len(candidates)), key=lambda i: (-scores[i], candidates[i].id))
    top = order[: max(count, 0)]

    rationale = {
        candidates[i].id: _rationale_terms(
            profile, snapshot.tfidf, snapshot.recipes.index(candidates[i])
        )
        for i in top
    }
    return apply_warnings(
        [(candidates[i], float(scores[i])) for i in top], profile, rationale
    )


def ingest_feedback(
    event: FeedbackEvent,
    log: EventLog,
    state: MaterializedState,
    recipes: Sequence[Recipe],
) -> int:
    """Validate, durably append, and fold one feedback event.

    Ratings upsert into the matrix (models must be refit before the next
    recommendation); a not-tried event records a time-stamped skip.
    Returns the log sequence number.
    """
    if event.user_id not in state.profiles:
        raise UnknownUser(f"no profile for user {event.user_id!r}")
    find_recipe(recipes, event.recipe_id)  # raises UnknownRecipe
    sequence = log.append(KIND_FEEDBACK, event.to_dict(), timestamp=event.timestamp)
    state.apply_feedback(event)
    return sequence
