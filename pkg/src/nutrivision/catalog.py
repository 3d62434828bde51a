"""Nutrition database and recipe catalog.

Each food class carries a per-100 g nutrient row plus the two calibration
values the quantifier needs: a generalized height for the class and a
density for the cc-to-gram conversion. The shipped default table covers
the ten supported classes; heights, densities and nutrient rows are
editable calibration data sourced from public per-100 g references, not
measured facts, and can be overridden with a custom catalog file.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

from .errors import DuplicateLabel, SchemaError, UnknownFoodClass, UnknownRecipe

DIET_TAGS = ("vegan", "vegetarian", "non-vegetarian")

# vegan recipes suit everyone; vegetarian recipes suit vegetarians and
# non-vegetarians; non-vegetarian recipes suit only non-vegetarians.
_ALLOWED = {
    "vegan": frozenset({"vegan"}),
    "vegetarian": frozenset({"vegan", "vegetarian"}),
    "non-vegetarian": frozenset(DIET_TAGS),
}

MACROS = ("carbohydrates", "protein", "fat", "sugar")

_CSV_HEADER = [
    "label",
    "default_height_cm",
    "density_g_per_cc",
    "calories",
    "carbohydrates_g",
    "protein_g",
    "fat_g",
    "sugar_g",
]


def allowed_diet_tags(diet_pref: str) -> frozenset[str]:
    """Recipe tags a user with the given preference may be shown."""
    try:
        return _ALLOWED[diet_pref]
    except KeyError:
        raise ValueError(f"unknown diet preference {diet_pref!r}") from None


def normalize_label(label: str, known_labels: Iterable[str] | None = None) -> str:
    """Lowercase and, when the singular exists in ``known_labels``, de-pluralize.

    "Apples" becomes "apple" only if "apple" is a known class; labels the
    catalog does not know are left untouched (minus case) so the caller
    can report them verbatim.
    """
    norm = label.strip().lower()
    if known_labels is not None and norm.endswith("s") and norm[:-1] in set(known_labels):
        return norm[:-1]
    return norm


@dataclass(frozen=True)
class NutrientProfile:
    """Nutrient amounts for one serving basis (per 100 g, or per recipe serving)."""

    calories: float = 0.0
    carbohydrates_g: float = 0.0
    protein_g: float = 0.0
    fat_g: float = 0.0
    sugar_g: float = 0.0
    micros: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("calories", "carbohydrates_g", "protein_g", "fat_g", "sugar_g"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.sugar_g > self.carbohydrates_g:
            raise ValueError("sugar_g cannot exceed carbohydrates_g")
        micros = dict(self.micros)
        for name, amount in micros.items():
            if amount < 0:
                raise ValueError(f"micro {name!r} must be non-negative")
        object.__setattr__(self, "micros", micros)

    def scaled(self, factor: float) -> "NutrientProfile":
        """Linear scaling: nutrients for ``factor`` times this serving."""
        return NutrientProfile(
            calories=self.calories * factor,
            carbohydrates_g=self.carbohydrates_g * factor,
            protein_g=self.protein_g * factor,
            fat_g=self.fat_g * factor,
            sugar_g=self.sugar_g * factor,
            micros={k: v * factor for k, v in self.micros.items()},
        )

    def __add__(self, other: "NutrientProfile") -> "NutrientProfile":
        micros = dict(self.micros)
        for k, v in other.micros.items():
            micros[k] = micros.get(k, 0.0) + v
        return NutrientProfile(
            calories=self.calories + other.calories,
            carbohydrates_g=self.carbohydrates_g + other.carbohydrates_g,
            protein_g=self.protein_g + other.protein_g,
            fat_g=self.fat_g + other.fat_g,
            sugar_g=self.sugar_g + other.sugar_g,
            micros=micros,
        )

    def macro_grams(self, macro: str) -> float:
        """Gram amount of one of the four tracked macros."""
        return {
            "carbohydrates": self.carbohydrates_g,
            "protein": self.protein_g,
            "fat": self.fat_g,
            "sugar": self.sugar_g,
        }[macro]

    def to_dict(self) -> dict:
        return {
            "calories": self.calories,
            "carbohydrates_g": self.carbohydrates_g,
            "protein_g": self.protein_g,
            "fat_g": self.fat_g,
            "sugar_g": self.sugar_g,
            "micros": dict(sorted(self.micros.items())),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "NutrientProfile":
        return cls(
            calories=float(data.get("calories", 0.0)),
            carbohydrates_g=float(data.get("carbohydrates_g", 0.0)),
            protein_g=float(data.get("protein_g", 0.0)),
            fat_g=float(data.get("fat_g", 0.0)),
            sugar_g=float(data.get("sugar_g", 0.0)),
            micros={str(k): float(v) for k, v in dict(data.get("micros", {})).items()},
        )


ZERO_PROFILE = NutrientProfile()


@dataclass(frozen=True)
class FoodClassSpec:
    """One nutrition-database row: label, height/density calibration, per-100 g."""

    label: str
    default_height_cm: float
    density_g_per_cc: float
    per_100g: NutrientProfile

    def __post_init__(self):
        if self.default_height_cm <= 0:
            raise ValueError("default_height_cm must be positive")
        if self.density_g_per_cc <= 0:
            raise ValueError("density_g_per_cc must be positive")


@dataclass(frozen=True)
class Recipe:
    id: str
    name: str
    description: str
    diet_tag: str
    per_serving: NutrientProfile
    video_url: str = ""

    def __post_init__(self):
        if self.diet_tag not in DIET_TAGS:
            raise ValueError(f"diet_tag must be one of {DIET_TAGS}")
        if not self.id:
            raise ValueError("recipe id must be non-empty")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "diet_tag": self.diet_tag,
            "per_serving": self.per_serving.to_dict(),
            "video_url": self.video_url,
        }


class Catalog:
    """Immutable label -> FoodClassSpec map with normalized lookup."""

    def __init__(self, specs: Iterable[FoodClassSpec]):
        table: dict[str, FoodClassSpec] = {}
        for spec in specs:
            key = spec.label.strip().lower()
            if key != spec.label:
                spec = FoodClassSpec(
                    label=key,
                    default_height_cm=spec.default_height_cm,
                    density_g_per_cc=spec.density_g_per_cc,
                    per_100g=spec.per_100g,
                )
            if key in table:
                raise DuplicateLabel(f"duplicate catalog label {key!r}")
            table[key] = spec
        self._table = table

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self._table)

    def lookup(self, label: str) -> FoodClassSpec:
        key = normalize_label(label, self._table)
        try:
            return self._table[key]
        except KeyError:
            raise UnknownFoodClass(f"no food class named {label!r}") from None

    def __len__(self) -> int:
        return len(self._table)

    def __iter__(self):
        return iter(self._table.values())


def _decode(document: bytes | str) -> str:
    if isinstance(document, bytes):
        try:
            return document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"catalog document is not UTF-8: {exc}") from exc
    return document


def _row_to_spec(row: Mapping, where: str) -> FoodClassSpec:
    try:
        label = str(row["label"])
        height = float(row["default_height_cm"])
        density = float(row["density_g_per_cc"])
        profile = NutrientProfile(
            calories=float(row["calories"]),
            carbohydrates_g=float(row["carbohydrates_g"]),
            protein_g=float(row["protein_g"]),
            fat_g=float(row["fat_g"]),
            sugar_g=float(row["sugar_g"]),
            micros={str(k): float(v) for k, v in dict(row.get("micros") or {}).items()},
        )
        return FoodClassSpec(
            label=label,
            default_height_cm=height,
            density_g_per_cc=density,
            per_100g=profile,
        )
    except KeyError as exc:
        raise SchemaError(f"{where}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_catalog(document: bytes | str) -> Catalog:
    """Parse a catalog file: JSON (array of rows, or {"foods": [...]}) or CSV."""
    text = _decode(document).strip()
    if not text:
        raise SchemaError("catalog document is empty")

    if text.startswith(("[", "{")):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"catalog JSON is malformed: {exc}") from exc
        if isinstance(data, dict):
            data = data.get("foods")
        if not isinstance(data, list):
            raise SchemaError("catalog JSON must be an array of rows or {'foods': [...]}")
        rows = data
        specs = [_row_to_spec(row, f"row {i}") for i, row in enumerate(rows)]
        return Catalog(specs)

    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != _CSV_HEADER:
        raise SchemaError(
            f"catalog CSV header must be exactly {','.join(_CSV_HEADER)}"
        )
    specs = [_row_to_spec(row, f"line {i}") for i, row in enumerate(reader, start=2)]
    return Catalog(specs)


def load_recipes(document: bytes | str) -> tuple[Recipe, ...]:
    """Parse a recipe file: JSON array of recipes, or {"recipes": [...]}."""
    text = _decode(document)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"recipe JSON is malformed: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("recipes")
    if not isinstance(data, list):
        raise SchemaError("recipe JSON must be an array or {'recipes': [...]}")

    recipes = []
    seen = set()
    for i, row in enumerate(data):
        try:
            recipe = Recipe(
                id=str(row["id"]),
                name=str(row["name"]),
                description=str(row.get("description", "")),
                diet_tag=str(row["diet_tag"]),
                per_serving=NutrientProfile.from_dict(row["per_serving"]),
                video_url=str(row.get("video_url", "")),
            )
        except KeyError as exc:
            raise SchemaError(f"recipe {i}: missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"recipe {i}: {exc}") from exc
        if recipe.id in seen:
            raise DuplicateLabel(f"duplicate recipe id {recipe.id!r}")
        seen.add(recipe.id)
        recipes.append(recipe)
    return tuple(recipes)


def find_recipe(recipes: Iterable[Recipe], recipe_id: str) -> Recipe:
    for recipe in recipes:
        if recipe.id == recipe_id:
            return recipe
    raise UnknownRecipe(f"no recipe with id {recipe_id!r}")


def default_catalog() -> Catalog:
    data = resources.files("nutrivision.data").joinpath("catalog.json").read_bytes()
    return load_catalog(data)


def default_recipes() -> tuple[Recipe, ...]:
    data = resources.files("nutrivision.data").joinpath("recipes.json").read_bytes()
    return load_recipes(data)
