"""
End-to-end ingest: bundle → inventory → association → connectivity →
finalize → saved scene memory.
"""

import logging
import time
from contextlib import contextmanager
from pathlib import Path

from apps.association.services import AssociationService
from apps.bundles.services import BundleService
from apps.connectivity.schemas import MergeOutcome
from apps.connectivity.services import ConnectivityService
from apps.core.clients import ClientService, IngestClients
from apps.core.exceptions import PipelineStageError, SceneMemoryError
from apps.core.metrics import INGEST_STAGE_SECONDS
from apps.inventory.services import InventoryService
from apps.memory.services import SceneMemory

from .schemas import IngestConfig, IngestStats

logger = logging.getLogger(__name__)


class PipelineService:
    @staticmethod
    @contextmanager
    def stage(name: str, stats: IngestStats):
        """Time one stage; failures other than domain errors are wrapped with the stage name."""
        started = time.perf_counter()
        try:
            yield
        except PipelineStageError:
            raise
        except SceneMemoryError as e:
            logger.error(f"Ingest stage {name} failed: {e.message}")
            raise PipelineStageError(name, e) from e
        except Exception as e:
            logger.exception(f"Ingest stage {name} crashed")
            raise PipelineStageError(name, e) from e
        finally:
            elapsed = time.perf_counter() - started
            stats.timings[name] = elapsed
            INGEST_STAGE_SECONDS.labels(stage=name).observe(elapsed)

    @classmethod
    def ingest_pipeline(
        cls,
        bundle_dir: Path | str,
        out_dir: Path | str,
        config: IngestConfig | None = None,
        clients: IngestClients | None = None,
    ) -> tuple[SceneMemory, IngestStats]:
        """Build and save the scene memory for one bundle."""
        config = config or IngestConfig()
        out_dir = Path(out_dir)
        stats = IngestStats()

        with cls.stage("inventory", stats):
            bundle = BundleService.load_bundle(bundle_dir)
            clients = clients or ClientService.ingest_clients(bundle_dir)
            observations = InventoryService.enumerate_bundle(bundle, clients.vision, config.inventory)
        stats.warnings.extend(bundle.warnings)

        with cls.stage("label_normalization", stats):
            index, _ = InventoryService.build_object_frame_index(observations, clients.embedder, config.inventory)

        with cls.stage("association", stats):
            instances = AssociationService.associate(bundle, index)

        with cls.stage("outlier_rejection", stats):
            instances = AssociationService.reject_outliers(instances, bundle, config.association.dbscan_params)

        with cls.stage("nodes", stats):
            nodes, warnings = ConnectivityService.build_nodes(instances, bundle, clients.embedder, config.connectivity)
        stats.warnings.extend(warnings)

        with cls.stage("edges", stats):
            edges = ConnectivityService.compute_edges(nodes, config.connectivity)

        with cls.stage("merge", stats):
            drafts, merge_log = ConnectivityService.merge_constrained(nodes, edges)

        with cls.stage("cleaning", stats):
            cleaned = ConnectivityService.clean_components(drafts, bundle, config.connectivity)

        with cls.stage("finalize", stats):
            out_dir.mkdir(parents=True, exist_ok=True)
            components, warnings = ConnectivityService.finalize(
                cleaned, nodes, bundle, clients.captioner, config.connectivity, crops_root=out_dir
            )
        stats.warnings.extend(warnings)

        with cls.stage("save", stats):
            memory = SceneMemory(components, root=out_dir, scene_points=bundle.positions, config=config.memory)
            memory.save(out_dir)

        stats.counts = {
            "frames": len(bundle.frames),
            "masks": len(bundle.masks),
            "points": len(bundle.points),
            "instances": len(instances),
            "nodes": len(nodes),
            "edges": len(edges),
            "merges_applied": sum(1 for d in merge_log if d.outcome == MergeOutcome.APPLIED),
            "merges_rejected": sum(1 for d in merge_log if d.outcome == MergeOutcome.REJECTED),
            "components_dropped": len(drafts) - len(cleaned),
            "components": len(components),
        }
        logger.info(f"Ingested {bundle.root.name} into {out_dir}", extra={"counts": stats.counts})
        return memory, stats
