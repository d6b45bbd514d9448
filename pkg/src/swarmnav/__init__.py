"""Decentralized multi-agent navigation via environment modification.

Agents coordinate solely through pheromones deposited on a node graph,
pushing boxes into holes to open paths to a goal. A hierarchical Double-DQN
policy trained in a small differential-drive arena serves as the embodied
push primitive, gated by a decision-forest feasibility classifier.
"""

from .world import (
    WorldGraph, NodeRecord, EdgeRecord, HoleRecord, BoxRecord, AgentRecord,
    WorldError, UnknownIdError, StateError,
)
from .pheromones import PheromoneField, NodePheromones, BoxPheromones, FieldConfig
from .policy import (
    PolicyConfig, AgentDecision, allowed_moves, box_candidate,
    hole_candidates, decide, softmax,
)

__all__ = [
    "WorldGraph", "NodeRecord", "EdgeRecord", "HoleRecord", "BoxRecord",
    "AgentRecord", "WorldError", "UnknownIdError", "StateError",
    "PheromoneField", "NodePheromones", "BoxPheromones", "FieldConfig",
    "PolicyConfig", "AgentDecision", "allowed_moves", "box_candidate",
    "hole_candidates", "decide", "softmax",
]

__version__ = "0.1.0"
