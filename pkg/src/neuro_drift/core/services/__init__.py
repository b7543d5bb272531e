"""Core services for neuro-drift."""

from .analysis_service import AnalysisService
from .brain_service import BrainService
from .complexity_service import ComplexityService
from .fitness_service import FitnessReplacer
from .genome_service import GenomeService
from .lockstep_service import LockstepReplayer, LockstepSchedule, LockstepService
from .manifest_service import ManifestService
from .pairset_service import PairOutcome, PairsetService
from .plot_service import PlotService
from .report_service import ReportService, RunSetReport
from .run_service import RunService
from .world_service import StepRules, WorldService

__all__ = [
    "AnalysisService",
    "BrainService",
    "ComplexityService",
    "FitnessReplacer",
    "GenomeService",
    "LockstepReplayer",
    "LockstepSchedule",
    "LockstepService",
    "ManifestService",
    "PairOutcome",
    "PairsetService",
    "PlotService",
    "ReportService",
    "RunSetReport",
    "RunService",
    "StepRules",
    "WorldService",
]
