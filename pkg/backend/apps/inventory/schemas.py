"""
Inventory types: raw label observations, canonical labels, frame runs.
"""

from dataclasses import dataclass, field

from pydantic import BaseModel, ConfigDict, Field, field_validator


class LabelObservation(BaseModel):
    """One raw object label reported for a frame."""

    model_config = ConfigDict(frozen=True)

    frame_id: int
    raw_label: str = Field(min_length=1)

    @field_validator("raw_label")
    @classmethod
    def _not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("raw_label must not be blank")
        return value


@dataclass(frozen=True)
class CanonicalLabel:
    slug: str
    members: frozenset[str]
    embedding: tuple[float, ...]


@dataclass(frozen=True, order=True)
class FrameRun:
    """Inclusive contiguous frame interval."""

    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def covers(self, frame_id: int) -> bool:
        return self.start <= frame_id <= self.end


@dataclass(frozen=True)
class ObjectFrameIndex:
    """Canonical slug -> sorted, disjoint frame runs.

    The position of a run in its slug's tuple is that run's sequence index.
    """

    runs: dict[str, tuple[FrameRun, ...]] = field(default_factory=dict)

    def sequences(self) -> list[tuple[str, int, FrameRun]]:
        """``(slug, sequence_index, run)`` for every run, slug-major."""
        return [(slug, seq, run) for slug in sorted(self.runs) for seq, run in enumerate(self.runs[slug])]

    def run_for(self, slug: str, sequence_index: int) -> FrameRun | None:
        runs = self.runs.get(slug, ())
        if 0 <= sequence_index < len(runs):
            return runs[sequence_index]
        return None

    def to_dict(self) -> dict[str, list[list[int]]]:
        return {slug: [[run.start, run.end] for run in runs] for slug, runs in sorted(self.runs.items())}
