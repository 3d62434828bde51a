"""Application engine: wires config, catalog, store and models together.

Both the CLI and the HTTP service drive this one class, so their outputs
are the same bytes by construction. Reads work off an immutable model
snapshot; writes append to the event log first, then update the
materialized state; model refits happen lazily on the next read that
needs them (a rating upsert marks the factor model stale, a skip does
not, because skips only shift scores at ranking time).
"""

from __future__ import annotations

import threading
from datetime import datetime

from .calibration import RgbImage
from .catalog import (
    Catalog,
    Recipe,
    default_catalog,
    default_recipes,
    find_recipe,
    load_catalog,
    load_recipes,
)
from .config import AppConfig
from .detections import load_detections
from .errors import UnknownUser
from .profiles import BmiResult, FeedbackEvent, MealEntry, UserProfile, utc_now
from .quantify import PlateReport, analyze_plate
from .recommender import (
    ModelSnapshot,
    Recommendation,
    build_snapshot,
    ingest_feedback,
    recommend,
)
from .store import KIND_MEAL_LOGGED, KIND_PROFILE_UPSERT, EventLog


class Engine:
    def __init__(self, config: AppConfig | None = None):
        self.config = config or AppConfig()
        self.catalog: Catalog = (
            load_catalog(self.config.catalog_path.read_bytes())
            if self.config.catalog_path
            else default_catalog()
        )
        self.recipes: tuple[Recipe, ...] = (
            load_recipes(self.config.recipes_path.read_bytes())
            if self.config.recipes_path
            else default_recipes()
        )
        self._log: EventLog | None = None
        self._state = None
        self._write_lock = threading.Lock()
        self._snapshot: ModelSnapshot | None = None
        self._snapshot_ratings_version = -1
        self._ratings_version = 0

    @property
    def log(self) -> EventLog:
        """The event log, opened (and replayed) on first use so that
        store-free commands like analyze never touch the filesystem."""
        if self._log is None:
            self._log = EventLog(self.config.store_path)
            self._state = self._log.replay().state
        return self._log

    @property
    def state(self):
        if self._state is None:
            self.log  # opens and replays
        return self._state

    # ----- plate analysis -------------------------------------------------

    def analyze(self, image: RgbImage | bytes, detection_document: bytes | str) -> PlateReport:
        if isinstance(image, bytes):
            image = RgbImage.from_bytes(image)
        dets = load_detections(
            detection_document,
            image.width,
            image.height,
            confidence_threshold=self.config.detections.confidence_threshold,
            known_labels=self.catalog.labels,
        )
        return analyze_plate(image, dets, self.catalog, self.config.quantifier)

    # ----- users ----------------------------------------------------------

    def upsert_profile(self, profile: UserProfile) -> int:
        with self._write_lock:
            sequence = self.log.append(
                KIND_PROFILE_UPSERT, profile.to_dict(include_meals=False)
            )
            existing = self.state.profiles.get(profile.user_id)
            if existing is not None and not profile.meal_log:
                profile = UserProfile.from_dict(
                    {
                        **profile.to_dict(include_meals=False),
                        "meal_log": [e.to_dict() for e in existing.meal_log],
                    }
                )
            self.state.profiles[profile.user_id] = profile
            return sequence

    def profile(self, user_id: str) -> UserProfile:
        try:
            return self.state.profiles[user_id]
        except KeyError:
            raise UnknownUser(f"no profile for user {user_id!r}") from None

    def bmi(self, user_id: str) -> BmiResult:
        return self.profile(user_id).bmi()

    def log_meal(self, user_id: str, report: PlateReport, timestamp: datetime | None = None) -> int:
        profile = self.profile(user_id)
        entry = MealEntry(timestamp=timestamp or utc_now(), report=report)
        with self._write_lock:
            sequence = self.log.append(
                KIND_MEAL_LOGGED,
                {"user_id": user_id, "entry": entry.to_dict()},
                timestamp=entry.timestamp,
            )
            self.state.profiles[user_id] = profile.with_meal(entry)
            return sequence

    # ----- recommendations and feedback ------------------------------------

    def snapshot(self) -> ModelSnapshot:
        """Current model snapshot; refits lazily after rating changes."""
        cached = self._snapshot
        if cached is None or self._snapshot_ratings_version != self._ratings_version:
            cached = build_snapshot(
                self.recipes,
                self.state.ratings,
                self.state.skips,
                self.config.recommender,
            )
            self._snapshot = cached
            self._snapshot_ratings_version = self._ratings_version
        elif tuple(self.state.skips) != cached.skips:
            # skips change scores but not fitted models: cheap rebuild
            cached = ModelSnapshot(
                recipes=cached.recipes,
                tfidf=cached.tfidf,
                factors=cached.factors,
                rating_counts=cached.rating_counts,
                skips=tuple(self.state.skips),
            )
            self._snapshot = cached
        return cached

    def recommendations(
        self, user_id: str, count: int = 5, now: datetime | None = None
    ) -> list[Recommendation]:
        profile = self.profile(user_id)
        return recommend(
            profile, self.snapshot(), self.config.recommender, count=count, now=now
        )

    def feedback(self, event: FeedbackEvent) -> int:
        with self._write_lock:
            sequence = ingest_feedback(event, self.log, self.state, self.recipes)
            if event.tried:
                self._ratings_version += 1
            return sequence

    def recipe(self, recipe_id: str) -> Recipe:
        return find_recipe(self.recipes, recipe_id)

    def recommendations_payload(
        self, user_id: str, count: int = 5, now: datetime | None = None
    ) -> list[dict]:
        """Recommendation dicts with the recipe card embedded.

        This is the one wire view of a recommendation list; the CLI and
        the HTTP service both serialize exactly this structure.
        """
        return [
            {**rec.to_dict(), "recipe": self.recipe(rec.recipe_id).to_dict()}
            for rec in self.recommendations(user_id, count=count, now=now)
        ]
