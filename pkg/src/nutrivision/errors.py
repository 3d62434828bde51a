"""Exception hierarchy.

Every error carries a stable machine ``code`` and an HTTP status so the
service layer can map library failures to API responses without a
lookup table scattered across modules.
"""

from __future__ import annotations


class NutriVisionError(Exception):
    """Base class for all library errors."""

    code = "INTERNAL_ERROR"
    http_status = 500


class SchemaError(NutriVisionError):
    """A document (detections, catalog, config, request body) violates its schema."""

    code = "SCHEMA_ERROR"
    http_status = 400


class NoReferenceFound(NutriVisionError):
    """No component in the image passed the reference-coin screens."""

    code = "NO_REFERENCE_FOUND"
    http_status = 422


class AmbiguousReference(NutriVisionError):
    """Two or more similar-sized candidates passed the coin screens.

    Guessing here would silently mis-scale every downstream gram, so the
    caller is told to re-shoot instead.
    """

    code = "AMBIGUOUS_REFERENCE"
    http_status = 422


class DuplicateLabel(NutriVisionError):
    code = "DUPLICATE_LABEL"
    http_status = 400


class UnknownFoodClass(NutriVisionError):
    code = "UNKNOWN_FOOD_CLASS"
    http_status = 404


class UnknownRecipe(NutriVisionError):
    code = "UNKNOWN_RECIPE"
    http_status = 404


class UnknownUser(NutriVisionError):
    code = "UNKNOWN_USER"
    http_status = 404


class InvalidAnthropometrics(NutriVisionError):
    code = "INVALID_ANTHROPOMETRICS"
    http_status = 400


class EmptyCorpus(NutriVisionError):
    code = "EMPTY_CORPUS"
    http_status = 400


class EmptyRatings(NutriVisionError):
    code = "EMPTY_RATINGS"
    http_status = 400


class NoEligibleRecipes(NutriVisionError):
    code = "NO_ELIGIBLE_RECIPES"
    http_status = 422


class InvalidFeedback(NutriVisionError):
    code = "INVALID_FEEDBACK"
    http_status = 400


class CorruptLog(NutriVisionError):
    code = "CORRUPT_LOG"
    http_status = 500


class StorageFull(NutriVisionError):
    code = "STORAGE_FULL"
    http_status = 507
