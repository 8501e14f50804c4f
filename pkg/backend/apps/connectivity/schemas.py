"""
Component graph types: mask nodes, candidate edges, merge log, drafts.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import NamedTuple

from pydantic import Field

from apps.bundles.schemas import InstanceKey
from apps.core.config import SettingsConfig
from apps.geometry.schemas import DbscanParams, VoxelKeySet


class ConnectivityConfig(SettingsConfig):
    settings_name = "CONNECTIVITY_CONFIG"

    voxel_cell: float = Field(default=0.5, gt=0)
    # no edge can have zero overlap, so tau must be positive
    tau: float = Field(default=0.25, gt=0)
    guard_cos_dist: float = Field(default=0.8, ge=0, le=2)
    clean_eps: float = Field(default=0.1, gt=0)
    clean_min_samples: int = Field(default=5, ge=1)
    min_points: int = Field(default=20, ge=1)
    top_k_views: int = Field(default=3, ge=0)
    client_attempts: int = Field(default=3, ge=1)
    backoff_base: float = Field(default=0.5, ge=0)

    @property
    def clean_params(self) -> DbscanParams:
        return DbscanParams(eps=self.clean_eps, min_samples=self.clean_min_samples)


@dataclass(frozen=True)
class MaskNode:
    node_id: int
    key: InstanceKey
    points: frozenset[int]
    voxels: VoxelKeySet
    embedding: tuple[float, ...]
    best_view: int
    frame_points: dict[int, frozenset[int]] = field(default_factory=dict)
    mask_boxes: dict[int, tuple[int, int, int, int]] = field(default_factory=dict)


class CandidateEdge(NamedTuple):
    a: int
    b: int
    jaccard: float


class MergeOutcome(StrEnum):
    APPLIED = "applied"
    REJECTED = "rejected"
    REDUNDANT = "redundant"


class MergeDecision(NamedTuple):
    edge: CandidateEdge
    outcome: MergeOutcome


@dataclass(frozen=True)
class ComponentDraft:
    members: frozenset[int]
    points: frozenset[int]

    @property
    def anchor(self) -> int:
        return min(self.members)
