"""
Ingest run configuration and statistics.
"""

from dataclasses import dataclass, field

from ninja import Schema
from pydantic import Field

from apps.association.services import AssociationConfig
from apps.connectivity.schemas import ConnectivityConfig
from apps.inventory.services import InventoryConfig
from apps.memory.services import MemoryConfig

STAGES = (
    "inventory",
    "label_normalization",
    "association",
    "outlier_rejection",
    "nodes",
    "edges",
    "merge",
    "cleaning",
    "finalize",
    "save",
)


@dataclass(frozen=True)
class IngestConfig:
    inventory: InventoryConfig = field(default_factory=InventoryConfig.from_settings)
    association: AssociationConfig = field(default_factory=AssociationConfig.from_settings)
    connectivity: ConnectivityConfig = field(default_factory=ConnectivityConfig.from_settings)
    memory: MemoryConfig = field(default_factory=MemoryConfig.from_settings)


class IngestStats(Schema):
    """Stage wall times in seconds (in stage order), counts and warnings."""

    timings: dict[str, float] = Field(default_factory=dict)
    counts: dict[str, int] = Field(default_factory=dict)
    warnings: list[str] = Field(default_factory=list)
