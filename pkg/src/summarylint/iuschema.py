"""The 13-category Information Unit classification schema.

The schema ships as an embedded JSON asset so that prompt rendering and the
rule engine share one source of truth.  It is immutable after load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from .docmodel import IMRAD_KINDS, SectionKind
from .errors import SchemaCorrupt

# Fixed fallback order appended after a category's primary locations so
# every search covers all four IMRaD kinds deterministically.
FALLBACK_ORDER = (
    SectionKind.RESULTS,
    SectionKind.DISCUSSION,
    SectionKind.METHODS,
    SectionKind.INTRODUCTION,
)

_KIND_NAMES = {
    "Introduction": SectionKind.INTRODUCTION,
    "Methods": SectionKind.METHODS,
    "Results": SectionKind.RESULTS,
    "Discussion": SectionKind.DISCUSSION,
}


class Confidence(Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


@dataclass(frozen=True)
class IUCategory:
    id: int
    name: str
    scope: str
    primary_locations: tuple[SectionKind, ...]
    primary_location_text: str
    verification_notes: str


@dataclass(frozen=True)
class CategoryAssignment:
    category_id: int
    rationale: str
    confidence: Confidence = Confidence.MEDIUM


def _validate(categories: list[IUCategory]) -> None:
    ids = [c.id for c in categories]
    if ids != list(range(1, 14)):
        raise SchemaCorrupt(f"expected contiguous ids 1..13, got {ids}")
    names = {c.name for c in categories}
    if len(names) != 13:
        raise SchemaCorrupt("category names are not unique")
    for c in categories:
        if not c.primary_locations:
            raise SchemaCorrupt(f"category {c.id} has no primary location")
        if not c.name or not c.scope or not c.verification_notes:
            raise SchemaCorrupt(f"category {c.id} has empty fields")


@lru_cache(maxsize=1)
def load_schema() -> tuple[IUCategory, ...]:
    """Load and validate all 13 categories from the embedded asset."""
    try:
        raw = resources.files("summarylint.data").joinpath("iu_categories.json").read_text("utf-8")
        data = json.loads(raw)
        categories = [
            IUCategory(
                id=entry["id"],
                name=entry["name"],
                scope=entry["scope"],
                primary_locations=tuple(_KIND_NAMES[k] for k in entry["primary_locations"]),
                primary_location_text=entry["primary_location_text"],
                verification_notes=entry["verification_notes"],
            )
            for entry in data["categories"]
        ]
    except SchemaCorrupt:
        raise
    except Exception as exc:
        raise SchemaCorrupt(f"embedded schema asset unreadable: {exc}") from exc
    _validate(categories)
    return tuple(categories)


def get_category(category_id: int) -> IUCategory:
    for c in load_schema():
        if c.id == category_id:
            return c
    raise KeyError(category_id)


def category_search_targets(c: IUCategory) -> list[SectionKind]:
    """Section kinds to search for this category, most probable first.

    Primary locations lead; the remaining IMRaD kinds follow in the fixed
    fallback order, so all four kinds appear exactly once.
    """
    targets = list(c.primary_locations)
    for kind in FALLBACK_ORDER:
        if kind not in targets:
            targets.append(kind)
    assert sorted(t.value for t in targets) == sorted(k.value for k in IMRAD_KINDS)
    return targets


def schema_as_prompt_text() -> str:
    """Render the schema as the numbered plain-text block embedded in prompts."""
    parts = []
    for c in load_schema():
        parts.append(
            f"{c.id}. {c.name}\n"
            f"   Scope: {c.scope}\n"
            f"   Primary IMRaD location: {c.primary_location_text}\n"
            f"   Verification notes: {c.verification_notes}"
        )
    return "\n\n".join(parts)


def export_schema(path) -> None:
    """Write the schema asset to ``path`` as JSON (for prompt tooling)."""
    raw = resources.files("summarylint.data").joinpath("iu_categories.json").read_text("utf-8")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(raw)
