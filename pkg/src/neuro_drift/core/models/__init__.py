"""Core models for neuro-drift."""

from .artifact import ArtifactHeader, RunSummary, SnapshotHeader, TraceHeader
from .brain import BEHAVIORS, Brain, InputGroup, NeuralArchitecture, Pathway, ProcessingGroup
from .complexity import ActivationTrace, ComplexityReport, CovarianceModel
from .event import NATURAL_CAUSES, DeathCause, Event, EventKind, EventLog
from .genome import GeneMap, GeneSpec, GeneValues, Genome
from .manifest import RunRecord, RunSetManifest, RunStatus
from .series import BinnedSeries, GCSeries, HistogramSeries, TSeries
from .world import Agent, FoodField, GeneticCounters, StepLedger, StepResult, WorldState

__all__ = [
    "ActivationTrace",
    "Agent",
    "ArtifactHeader",
    "BEHAVIORS",
    "BinnedSeries",
    "Brain",
    "ComplexityReport",
    "CovarianceModel",
    "DeathCause",
    "Event",
    "EventKind",
    "EventLog",
    "FoodField",
    "GCSeries",
    "GeneMap",
    "GeneSpec",
    "GeneValues",
    "GeneticCounters",
    "Genome",
    "HistogramSeries",
    "InputGroup",
    "NATURAL_CAUSES",
    "NeuralArchitecture",
    "Pathway",
    "ProcessingGroup",
    "RunRecord",
    "RunSetManifest",
    "RunStatus",
    "RunSummary",
    "SnapshotHeader",
    "StepLedger",
    "StepResult",
    "TSeries",
    "TraceHeader",
    "WorldState",
]
