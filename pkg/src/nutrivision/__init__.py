"""nutrivision: plate-photo nutrition quantification and recipe recommendations.

The public surface re-exported here covers the full pipeline: coin
calibration, detector-output handling, quantification, the nutrition and
recipe catalogs, the hybrid recommender, persistence, and the engine the
CLI and HTTP service are built on.
"""

from .calibration import (
    ConnectedComponent,
    HsvRange,
    ReferenceMeasurement,
    ReferenceSpec,
    RgbImage,
    detect_reference,
    find_components,
    mask_by_color,
    rgb_to_hsv,
)
from .catalog import (
    Catalog,
    FoodClassSpec,
    NutrientProfile,
    Recipe,
    allowed_diet_tags,
    default_catalog,
    default_recipes,
    load_catalog,
    load_recipes,
    normalize_label,
)
from .config import AppConfig, load_config
from .detections import (
    Detection,
    GroundTruthBox,
    Metrics,
    dedupe,
    evaluate,
    iou,
    load_detections,
)
from .engine import Engine
from .errors import (
    AmbiguousReference,
    CorruptLog,
    DuplicateLabel,
    EmptyCorpus,
    EmptyRatings,
    InvalidAnthropometrics,
    NoEligibleRecipes,
    NoReferenceFound,
    NutriVisionError,
    SchemaError,
    StorageFull,
    UnknownFoodClass,
    UnknownRecipe,
    UnknownUser,
)
from .factorization import FactorModel, fit_factors
from .profiles import (
    BmiResult,
    FeedbackEvent,
    MealEntry,
    SkipRecord,
    UserProfile,
    compute_bmi,
)
from .quantify import (
    PlateReport,
    QuantifiedFood,
    QuantifierConfig,
    SkippedItem,
    analyze_plate,
    build_report,
    quantify_item,
)
from .recommender import (
    ModelSnapshot,
    NutrientWarning,
    Recommendation,
    RecommenderConfig,
    apply_warnings,
    build_snapshot,
    content_scores,
    hybrid_scores,
    ingest_feedback,
    recommend,
)
from .store import EventLog, EventRecord, MaterializedState
from .tfidf import TfIdfModel, cosine, fit_tfidf, tokenize

__version__ = "0.1.0"
