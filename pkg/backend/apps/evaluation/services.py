"""
Batch evaluation over QA files: response text (METEOR-lite) and object
grounding (precision / recall / F1 over component tag sets).
"""

import logging
import math
from collections.abc import Iterable
from pathlib import Path

import pandas as pd
import pydantic
from joblib import Parallel, delayed

from apps.agent.parsing import parse_component_tags
from apps.agent.services import AgentService
from apps.core.exceptions import InvalidArgumentError, ParseError, SceneMemoryError
from apps.core.serialization import iter_jsonl
from apps.memory.services import SceneMemory
from apps.tools.registry import ToolRegistry, build_registry
from libs.modelsdk.contracts import ModelClient

from .metrics import grounding_prf, meteor_lite, strip_tags
from .schemas import CachedAnswer, ConstantJudge, EvalConfig, EvalReport, ItemResult, Judge, MetricMeans, QaItem

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["precision", "recall", "f1", "meteor", "judge"]
TABLE_COLUMNS = ["index", "scene_id", "category", *METRIC_COLUMNS, "error"]


def _records(path: Path, schema: type[pydantic.BaseModel]) -> list:
    records = []
    for line_no, raw in iter_jsonl(path):
        try:
            records.append(schema.model_validate(raw))
        except pydantic.ValidationError as e:
            fields = sorted({".".join(str(p) for p in err["loc"]) or "(root)" for err in e.errors()})
            raise ParseError(f"invalid record, check {', '.join(fields)}", position=f"{path.name}:{line_no}")
    return records


def _mean(values: list[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


def _means(results: Iterable[ItemResult]) -> MetricMeans:
    results = list(results)
    return MetricMeans(
        precision=_mean([r.precision for r in results]),
        recall=_mean([r.recall for r in results]),
        f1=_mean([r.f1 for r in results]),
        meteor=_mean([r.meteor for r in results]),
        count=len(results),
    )


class _Scene:
    """A loaded scene memory with its registry, or the reason it failed to load."""

    def __init__(self, memory: SceneMemory | None = None, registry: ToolRegistry | None = None, error: str = ""):
        self.memory = memory
        self.registry = registry
        self.error = error

    @property
    def known_ids(self) -> set[int]:
        return {c.component_id for c in self.memory.components()} if self.memory else set()


class EvalService:
    @staticmethod
    def load_items(qa_path: Path | str) -> list[QaItem]:
        return _records(Path(qa_path), QaItem)

    @staticmethod
    def load_cached_answers(answers_path: Path | str) -> dict[tuple[str, str], str]:
        """Cached answers keyed by ``(scene_id, question)``; later lines win."""
        return {(a.scene_id, a.question): a.predicted_answer for a in _records(Path(answers_path), CachedAnswer)}

    @staticmethod
    def score_item(
        index: int, item: QaItem, predicted: str, known_ids: set[int] | None, judge: Judge
    ) -> ItemResult:
        predicted_tags = parse_component_tags(predicted, known_ids)
        expected_tags = parse_component_tags(item.expected_answer, known_ids)
        precision, recall, f1 = grounding_prf(predicted_tags.component_ids, expected_tags.component_ids)
        return ItemResult(
            index=index,
            scene_id=item.scene_id,
            question=item.question,
            category=item.category,
            predicted_answer=predicted,
            precision=precision,
            recall=recall,
            f1=f1,
            meteor=meteor_lite(strip_tags(predicted), strip_tags(item.expected_answer)),
            judge=judge.score(item.question, item.expected_answer, predicted),
            dangling_predicted=predicted_tags.dangling_count,
            dangling_expected=expected_tags.dangling_count,
        )

    @staticmethod
    def _load_scenes(items: list[QaItem], memories_root: Path, preset: str) -> dict[str, _Scene]:
        scenes: dict[str, _Scene] = {}
        for item in items:
            if item.scene_id in scenes:
                continue
            try:
                memory = SceneMemory.load(memories_root / item.scene_id)
                scenes[item.scene_id] = _Scene(memory, build_registry(memory, preset))
            except SceneMemoryError as e:
                logger.warning(f"Scene {item.scene_id} could not be loaded: {e.message}")
                scenes[item.scene_id] = _Scene(error=f"{e.code}: {e.message}")
        return scenes

    @classmethod
    def _evaluate(
        cls,
        index: int,
        item: QaItem,
        scene: _Scene,
        cached: dict[tuple[str, str], str] | None,
        client: ModelClient | None,
        judge: Judge,
    ) -> ItemResult:
        errored = ItemResult(index=index, scene_id=item.scene_id, question=item.question, category=item.category)
        if scene.error:
            return errored.model_copy(update={"error": scene.error})
        if cached is not None:
            predicted = cached.get((item.scene_id, item.question))
            if predicted is None:
                return errored.model_copy(update={"error": "not_found: no cached answer for this item"})
        else:
            try:
                answer, _ = AgentService.run_query(item.question, scene.memory, scene.registry, client)
            except SceneMemoryError as e:
                return errored.model_copy(update={"error": f"{e.code}: {e.message}"})
            predicted = answer.text
        return cls.score_item(index, item, predicted, scene.known_ids, judge)

    @classmethod
    def run_eval(
        cls,
        qa_path: Path | str,
        memories_root: Path | str,
        *,
        answers_path: Path | str | None = None,
        client: ModelClient | None = None,
        judge: Judge | None = None,
        preset: str | None = None,
        config: EvalConfig | None = None,
    ) -> EvalReport:
        """Score every QA item, with cached answers when ``answers_path`` is given, else the agent."""
        if answers_path is None and client is None:
            raise InvalidArgumentError("evaluation needs a cached-answers file or a model client")
        config = config or EvalConfig.from_settings()
        judge = judge or ConstantJudge()
        items = cls.load_items(qa_path)
        cached = cls.load_cached_answers(answers_path) if answers_path is not None else None
        scenes = cls._load_scenes(items, Path(memories_root), preset or config.tool_preset)

        logger.info(f"Evaluating {len(items)} items over {len(scenes)} scenes")
        results = Parallel(n_jobs=config.parallel_jobs, prefer="threads")(
            delayed(cls._evaluate)(index, item, scenes[item.scene_id], cached, client, judge)
            for index, item in enumerate(items)
        )
        return cls.build_report(sorted(results, key=lambda r: r.index), judge)

    @staticmethod
    def build_report(results: list[ItemResult], judge: Judge) -> EvalReport:
        evaluated = [r for r in results if not r.errored]
        by_category: dict[str, list[ItemResult]] = {}
        for result in evaluated:
            if result.category is not None:
                by_category.setdefault(result.category.value, []).append(result)
        return EvalReport(
            items=results,
            aggregate=_means(evaluated),
            by_category={name: _means(group) for name, group in sorted(by_category.items())},
            counts={"items": len(results), "evaluated": len(evaluated), "errored": len(results) - len(evaluated)},
            dangling={
                "predicted": sum(r.dangling_predicted for r in evaluated),
                "expected": sum(r.dangling_expected for r in evaluated),
            },
            judge={"name": judge.name, "mean": _mean([r.judge for r in evaluated])},
        )

    @staticmethod
    def table(report: EvalReport) -> str:
        """Human-readable per-item table with a trailing mean row."""
        rows = [r.model_dump(mode="json") for r in report.items]
        mean = report.aggregate
        rows.append(
            {
                "index": "mean",
                "precision": mean.precision,
                "recall": mean.recall,
                "f1": mean.f1,
                "meteor": mean.meteor,
                "judge": report.judge.get("mean"),
            }
        )
        frame = pd.DataFrame(rows, columns=TABLE_COLUMNS)
        for column in METRIC_COLUMNS:
            frame[column] = frame[column].map(lambda v: "" if pd.isna(v) else f"{v:.4f}")
        return frame.fillna("").to_string(index=False)
