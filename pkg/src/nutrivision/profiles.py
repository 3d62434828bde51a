"""User profiles, BMI categorization, meal logs and feedback events."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping

from .catalog import DIET_TAGS
from .errors import InvalidAnthropometrics
from .quantify import PlateReport

GENDERS = ("female", "male", "other")

# WHO convention, half-open upper intervals: a value of exactly 25 is
# overweight, exactly 30 is obese.
BMI_UNDERWEIGHT_MAX = 18.5
BMI_NORMAL_MAX = 25.0
BMI_OVERWEIGHT_MAX = 30.0


@dataclass(frozen=True)
class BmiResult:
    value: float
    category: str

    def to_dict(self) -> dict:
        return {"value": self.value, "category": self.category}


def compute_bmi(height_m: float, weight_kg: float) -> BmiResult:
    """weight / height^2, categorized underweight / normal / overweight / obese."""
    if height_m <= 0 or weight_kg <= 0:
        raise InvalidAnthropometrics("height and weight must be positive")
    value = weight_kg / (height_m * height_m)
    if value < BMI_UNDERWEIGHT_MAX:
        category = "underweight"
    elif value < BMI_NORMAL_MAX:
        category = "normal"
    elif value < BMI_OVERWEIGHT_MAX:
        category = "overweight"
    else:
        category = "obese"
    return BmiResult(value=value, category=category)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def ensure_utc(ts: datetime) -> datetime:
    """Attach UTC to naive datetimes; convert aware ones."""
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ensure_utc(ts).isoformat()


def parse_timestamp(value: str) -> datetime:
    return ensure_utc(datetime.fromisoformat(value))


@dataclass(frozen=True)
class MealEntry:
    """One analyzed plate logged at a point in time."""

    timestamp: datetime
    report: PlateReport

    def __post_init__(self):
        object.__setattr__(self, "timestamp", ensure_utc(self.timestamp))

    def to_dict(self) -> dict:
        return {
            "timestamp": format_timestamp(self.timestamp),
            "report": self.report.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MealEntry":
        return cls(
            timestamp=parse_timestamp(data["timestamp"]),
            report=PlateReport.from_dict(data["report"]),
        )


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    height_m: float
    weight_kg: float
    gender: str
    diet_pref: str
    health_history: str = ""
    sugar_limit_g: float = 25.0
    carb_limit_g: float = 130.0
    meal_log: tuple[MealEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.user_id:
            raise ValueError("user_id must be non-empty")
        if self.height_m <= 0 or self.weight_kg <= 0:
            raise InvalidAnthropometrics("height and weight must be positive")
        if self.gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}")
        if self.diet_pref not in DIET_TAGS:
            raise ValueError(f"diet_pref must be one of {DIET_TAGS}")
        if self.sugar_limit_g <= 0 or self.carb_limit_g <= 0:
            raise ValueError("nutrient limits must be positive")
        object.__setattr__(self, "meal_log", tuple(self.meal_log))

    def bmi(self) -> BmiResult:
        return compute_bmi(self.height_m, self.weight_kg)

    def with_meal(self, entry: MealEntry) -> "UserProfile":
        return UserProfile(
            user_id=self.user_id,
            height_m=self.height_m,
            weight_kg=self.weight_kg,
            gender=self.gender,
            diet_pref=self.diet_pref,
            health_history=self.health_history,
            sugar_limit_g=self.sugar_limit_g,
            carb_limit_g=self.carb_limit_g,
            meal_log=self.meal_log + (entry,),
        )

    def to_dict(self, include_meals: bool = True) -> dict:
        data = {
            "user_id": self.user_id,
            "height_m": self.height_m,
            "weight_kg": self.weight_kg,
            "gender": self.gender,
            "diet_pref": self.diet_pref,
            "health_history": self.health_history,
            "sugar_limit_g": self.sugar_limit_g,
            "carb_limit_g": self.carb_limit_g,
        }
        if include_meals:
            data["meal_log"] = [entry.to_dict() for entry in self.meal_log]
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "UserProfile":
        return cls(
            user_id=str(data["user_id"]),
            height_m=float(data["height_m"]),
            weight_kg=float(data["weight_kg"]),
            gender=str(data["gender"]),
            diet_pref=str(data["diet_pref"]),
            health_history=str(data.get("health_history", "")),
            sugar_limit_g=float(data.get("sugar_limit_g", 25.0)),
            carb_limit_g=float(data.get("carb_limit_g", 130.0)),
            meal_log=tuple(
                MealEntry.from_dict(e) for e in data.get("meal_log", [])
            ),
        )


@dataclass(frozen=True)
class FeedbackEvent:
    """A user's reaction to a recommended recipe.

    ``rating`` (an integer 1..5) must be present exactly when the recipe
    was tried; a not-tried event records a skip.
    """

    user_id: str
    recipe_id: str
    tried: bool
    rating: int | None = None
    timestamp: datetime = field(default_factory=utc_now)

    def __post_init__(self):
        if self.tried:
            if self.rating is None:
                raise ValueError("a tried event needs a rating")
            if not isinstance(self.rating, int) or not 1 <= self.rating <= 5:
                raise ValueError("rating must be an integer in 1..5")
        elif self.rating is not None:
            raise ValueError("a not-tried event cannot carry a rating")
        object.__setattr__(self, "timestamp", ensure_utc(self.timestamp))

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "recipe_id": self.recipe_id,
            "tried": self.tried,
            "rating": self.rating,
            "timestamp": format_timestamp(self.timestamp),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "FeedbackEvent":
        rating = data.get("rating")
        return cls(
            user_id=str(data["user_id"]),
            recipe_id=str(data["recipe_id"]),
            tried=bool(data["tried"]),
            rating=int(rating) if rating is not None else None,
            timestamp=parse_timestamp(data["timestamp"]),
        )


@dataclass(frozen=True)
class SkipRecord:
    """A recipe the user declined, with when; penalized for a window."""

    user_id: str
    recipe_id: str
    timestamp: datetime

    def __post_init__(self):
        object.__setattr__(self, "timestamp", ensure_utc(self.timestamp))
