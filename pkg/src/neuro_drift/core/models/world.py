"""World state models: agents, food and the per-step energy ledger."""

from dataclasses import dataclass, field

import numpy as np

from .brain import Brain
from .event import Event, EventLog
from .genome import Genome


@dataclass
class Agent:
    """ワールド内のエージェント."""

    id: int
    genome: Genome
    brain: Brain
    position: np.ndarray
    heading: float
    energy: float
    birth_step: int
    age: int = 0
    alive: bool = True
    wounds: float = 0.0
    trace: list[np.ndarray] = field(default_factory=list, repr=False)

    def record(self) -> None:
        """現在の活性ベクトルを生涯トレースに追加."""
        self.trace.append(self.brain.activations.astype(np.float32))

    def trace_matrix(self) -> np.ndarray:
        """生涯トレース（T × n）."""
        if not self.trace:
            return np.zeros((0, self.brain.n_neurons), dtype=np.float32)
        return np.vstack(self.trace)


@dataclass
class FoodField:
    """餌アイテム（位置とエネルギー）."""

    positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    energies: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return int(self.energies.size)

    @property
    def total_energy(self) -> float:
        return float(self.energies.sum())

    def add(self, position: np.ndarray, energy: float) -> None:
        """餌を1つ追加."""
        self.positions = np.vstack([self.positions, np.asarray(position, dtype=float)[None, :]])
        self.energies = np.append(self.energies, float(energy))

    def remove_empty(self) -> None:
        """エネルギーが尽きた餌を取り除く."""
        keep = self.energies > 0.0
        if not keep.all():
            self.positions = self.positions[keep]
            self.energies = self.energies[keep]


@dataclass
class StepLedger:
    """1ステップ分のエネルギー収支."""

    depleted: float = 0.0
    damage_dissipated: float = 0.0
    corpse_loss: float = 0.0
    regrown: float = 0.0
    floor_injected: float = 0.0
    eaten: float = 0.0


@dataclass
class StepResult:
    """step_world の結果."""

    step: int
    events: list[Event]
    ledger: StepLedger
    died: list[Agent] = field(default_factory=list)
    born: list[Agent] = field(default_factory=list)


@dataclass
class GeneticCounters:
    """遺伝的操作の累計."""

    crossovers: int = 0
    mutations: int = 0
    flipped_bits: int = 0


@dataclass
class WorldState:
    """ワールド全体の状態."""

    width: float
    height: float
    t: int = 0
    agents: dict[int, Agent] = field(default_factory=dict)
    food: FoodField = field(default_factory=FoodField)
    next_id: int = 0
    food_budget: float = 0.0
    event_log: EventLog = field(default_factory=EventLog)
    genetics: GeneticCounters = field(default_factory=GeneticCounters)

    @property
    def population(self) -> int:
        return len(self.agents)

    def living(self) -> list[Agent]:
        """生存エージェント（id 順）."""
        return [self.agents[i] for i in sorted(self.agents)]

    def allocate_id(self) -> int:
        """新しいエージェント id を払い出す."""
        agent_id = self.next_id
        self.next_id += 1
        return agent_id

    def total_energy(self) -> float:
        """エージェントと餌の総エネルギー."""
        return sum(agent.energy for agent in self.agents.values()) + self.food.total_energy
