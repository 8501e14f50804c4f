"""
QA items, cached answers, per-item results and the evaluation report.
"""

from enum import StrEnum
from typing import Any, Protocol

from ninja import Schema
from pydantic import Field

from apps.core.config import SettingsConfig

METRIC_NAME = "meteor_lite_v1"


class EvalConfig(SettingsConfig):
    settings_name = "EVAL_CONFIG"

    parallel_jobs: int = Field(default=1, ge=1)
    tool_preset: str = "full"


class QuestionCategory(StrEnum):
    ENTITIES_RELATIONS = "entities_relations"
    AFFORDANCE = "affordance"
    FUNCTIONALITY = "functionality"
    PHYSICS_SAFETY = "physics_safety"


class QaItem(Schema):
    scene_id: str = Field(min_length=1)
    question: str
    expected_answer: str
    category: QuestionCategory | None = None


class CachedAnswer(Schema):
    scene_id: str
    question: str
    predicted_answer: str


class ItemResult(Schema):
    index: int
    scene_id: str
    question: str
    category: QuestionCategory | None = None
    predicted_answer: str | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    meteor: float | None = None
    judge: float | None = None
    dangling_predicted: int = 0
    dangling_expected: int = 0
    error: str | None = None

    @property
    def errored(self) -> bool:
        return self.error is not None


class MetricMeans(Schema):
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    meteor: float | None = None
    count: int = 0


class EvalReport(Schema):
    metric: str = METRIC_NAME
    items: list[ItemResult] = Field(default_factory=list)
    aggregate: MetricMeans = Field(default_factory=MetricMeans)
    by_category: dict[str, MetricMeans] = Field(default_factory=dict)
    counts: dict[str, int] = Field(default_factory=dict)
    dangling: dict[str, int] = Field(default_factory=dict)
    judge: dict[str, Any] = Field(default_factory=dict)

    def to_wire(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


class Judge(Protocol):
    """Scores a predicted answer against the expected one, in [0, 1]."""

    name: str

    def score(self, question: str, expected: str, predicted: str) -> float: ...


class ConstantJudge:
    """Placeholder judge returning a fixed score."""

    def __init__(self, value: float = 0.0):
        self.name = "constant"
        self.value = value

    def score(self, question: str, expected: str, predicted: str) -> float:
        return self.value
