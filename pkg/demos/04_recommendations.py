"""Personalized recommendation walkthrough.

Two users with different diets, histories and BMI categories get ranked
recipes; feedback (a rating and a skip) then changes the next round.
"""

from datetime import datetime, timezone

from nutrivision import (
    FeedbackEvent,
    RecommenderConfig,
    UserProfile,
    build_snapshot,
    compute_bmi,
    default_recipes,
    recommend,
)
from nutrivision.store import MaterializedState

NOW = datetime(2024, 6, 1, 12, 0, tzinfo=timezone.utc)

recipes = default_recipes()
cfg = RecommenderConfig(seed=7, stop_words=("and", "the", "with", "for", "wants"))

maya = UserProfile(
    user_id="maya",
    height_m=1.68,
    weight_kg=54.0,
    gender="female",
    diet_pref="vegan",
    health_history="diabetic, watching sugar; wants fiber and iron",
    sugar_limit_g=25.0,
    carb_limit_g=120.0,
)
ravi = UserProfile(
    user_id="ravi",
    height_m=1.80,
    weight_kg=52.0,  # underweight: calorie-dense recipes get a boost
    gender="male",
    diet_pref="non-vegetarian",
    health_history="gym training, muscle recovery, high protein",
)

for user in (maya, ravi):
    bmi = compute_bmi(user.height_m, user.weight_kg)
    print(f"{user.user_id}: BMI {bmi.value:.1f} ({bmi.category}), {user.diet_pref}")
print()

snapshot = build_snapshot(recipes, ratings={}, skips=(), cfg=cfg)

def show(user, snap):
    print(f"top recipes for {user.user_id}:")
    for rec in recommend(user, snap, cfg, count=5, now=NOW):
        recipe = next(r for r in recipes if r.id == rec.recipe_id)
        badges = " ".join(
            f"[{w.nutrient} {w.amount_g:g}g > {w.limit_g:g}g]" for w in rec.warnings
        )
        why = f" matched: {', '.join(rec.rationale_terms)}" if rec.rationale_terms else ""
        print(f"  {rec.score:6.3f}  {recipe.name:<30} {recipe.diet_tag:<15} {badges}{why}")
    print()

show(maya, snapshot)
show(ravi, snapshot)

# Feedback round: maya loves the curry, skips the parfait.
state = MaterializedState()
state.profiles["maya"] = maya
state.apply_feedback(
    FeedbackEvent(user_id="maya", recipe_id="r-lentil-curry", tried=True, rating=5, timestamp=NOW)
)
state.apply_feedback(
    FeedbackEvent(user_id="maya", recipe_id="r-fruit-parfait", tried=False, timestamp=NOW)
)

snapshot = build_snapshot(recipes, state.ratings, tuple(state.skips), cfg)
print("after maya rates the curry 5 and skips the parfait:")
show(maya, snapshot)
