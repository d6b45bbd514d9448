"""Per-agent decision rule: collision-safe moves, box/hole candidate
selection, and the explore/exploit draw over pheromone concentrations.

``decide`` is a pure function of a world snapshot, the pheromone banks, and a
per-agent random stream; the orchestrator serializes commits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pheromones import PheromoneField
from .world import PUSHING, WorldGraph

MOVE = "move"
CLAIM = "claim"
CONTINUE_PUSH = "continue_push"
WAIT = "wait"


@dataclass
class PolicyConfig:
    epsilon0: float = 0.3
    epsilon_min: float = 0.05
    epsilon_decay: float = 0.995
    beta: float = 8.0        # softmax sharpness shared by every draw
    radius: float = 5.0      # detection radius, path-distance meters

    def __post_init__(self):
        if not 0.0 <= self.epsilon_min <= self.epsilon0 <= 1.0:
            raise ValueError("need 0 <= epsilon_min <= epsilon0 <= 1")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ValueError("epsilon_decay must lie in (0, 1]")
        if self.beta <= 0 or self.radius <= 0:
            raise ValueError("beta and radius must be positive")


@dataclass
class AgentDecision:
    kind: str
    target: int | None = None          # move destination
    box: int | None = None             # claim
    hole: int | None = None            # claim
    path: list[int] = field(default_factory=list)  # claim: box node .. hole node
    abandon: bool = False              # decision made after dropping a push


def softmax(values, beta: float = 1.0) -> np.ndarray:
    """Stable softmax of beta*values; sums to one."""
    v = np.asarray(values, dtype=float) * beta
    v = v - v.max()
    e = np.exp(v)
    return e / e.sum()


def collision_free(world: WorldGraph, agent_id: int, target: int) -> bool:
    """Target holds no agent, and no neighbor of target other than the
    deciding agent's own node holds a different agent."""
    me = world.agent(agent_id)
    if world.agent_at_node(target) is not None:
        return False
    for k in world.reachable_neighbors(target):
        if k == me.node:
            continue
        occupant = world.agent_at_node(k)
        if occupant is not None and occupant != agent_id:
            return False
    return True


def allowed_moves(world: WorldGraph, agent_id: int) -> list[int]:
    """Reachable neighbors that pass the collision rule, ascending id.
    May be empty, in which case the agent waits."""
    me = world.agent(agent_id)
    return [m for m in world.reachable_neighbors(me.node)
            if collision_free(world, agent_id, m)]


def box_candidate(world: WorldGraph, agent_id: int, radius: float) -> int | None:
    """Nearest at-node box within path distance ``radius``; ties take the
    smallest box id; None when no box is in range."""
    me = world.agent(agent_id)
    best: tuple[float, int] | None = None
    for box_id in sorted(world.boxes):
        b = world.boxes[box_id]
        if not b.at_node:
            continue
        d = world.path_distance(me.node, b.node)
        if d <= radius and (best is None or d < best[0] - 1e-12):
            best = (d, box_id)
    return None if best is None else best[1]


def hole_candidates(world: WorldGraph, banks: PheromoneField, box_id: int,
                    radius: float) -> list[int]:
    """Holes within ``radius`` of the box's node, plus holes advertised by a
    nonzero trail on any reachable neighbor of the box's node."""
    b = world.box(box_id)
    if not b.at_node:
        return []
    found = set()
    for hole_id in world.holes:
        if world.hole_distance(b.node, hole_id) <= radius:
            found.add(hole_id)
    for m in world.reachable_neighbors(b.node):
        for hole_id, level in banks.nodes[m].trails.items():
            if level > 0.0 and hole_id in world.holes:
                found.add(hole_id)
    return sorted(found)


def _feasible_holes(world, banks, agent_id, box_id, radius, feasibility):
    """Candidate holes, dropped when the first push hop fails the filter."""
    holes = hole_candidates(world, banks, box_id, radius)
    if feasibility is None:
        return holes
    box_node = world.box(box_id).node
    kept = []
    for hole_id in holes:
        path = world.path_to_hole(box_node, hole_id)
        if path is not None and len(path) >= 2 and feasibility(world, agent_id, box_id, path[1]):
            kept.append(hole_id)
    return kept


def _draw(rng: np.random.Generator, options: list, probs: np.ndarray):
    return options[int(rng.choice(len(options), p=probs))]


def decide(world: WorldGraph, banks: PheromoneField, agent_id: int,
           config: PolicyConfig, epsilon: float, rng: np.random.Generator,
           feasibility=None) -> tuple[AgentDecision, float]:
    """One agent's decision against a pre-step snapshot.

    Returns the decision and the (possibly decayed) exploration probability.
    ``feasibility(world, agent_id, box_id, target_node)`` gates push segments
    when the embodied primitive is in play; None means every push is assumed
    to succeed.
    """
    me = world.agent(agent_id)
    abandon = False

    if me.activity == PUSHING:
        box = world.box(me.box)
        path = me.path
        if box.at_node and len(path) >= 2 and box.node == path[0]:
            nxt = path[1]
            final_hop = nxt == world.hole(me.hole).node
            ok_edge = world.is_reachable(box.node, nxt) if not final_hop \
                else world.edge_length(box.node, nxt) is not None
            if ok_edge and (feasibility is None or feasibility(world, agent_id, me.box, nxt)):
                if collision_free(world, agent_id, nxt):
                    return AgentDecision(CONTINUE_PUSH), epsilon
                return AgentDecision(WAIT), epsilon
        # push no longer viable: fall through to a fresh decision this step
        abandon = True

    moves = allowed_moves(world, agent_id)
    if feasibility is not None:
        pruned = []
        for m in moves:
            box_id = world.box_at_node(m)
            if box_id is not None and not _feasible_holes(
                    world, banks, agent_id, box_id, config.radius, feasibility):
                continue
            pruned.append(m)
        moves = pruned

    explore = rng.random() < epsilon
    if explore:
        next_eps = max(config.epsilon_min, epsilon * config.epsilon_decay)
        if not moves:
            return AgentDecision(WAIT, abandon=abandon), next_eps
        probs = softmax([-banks.nodes[m].visits for m in moves], config.beta)
        target = _draw(rng, moves, probs)
        box_id = world.box_at_node(target)
        if box_id is not None:
            holes = _feasible_holes(world, banks, agent_id, box_id, config.radius, feasibility)
            if holes:
                hole_id = holes[int(rng.integers(len(holes)))]
                path = world.path_to_hole(target, hole_id)
                if path is not None and len(path) >= 2:
                    return AgentDecision(CLAIM, box=box_id, hole=hole_id,
                                         path=path, abandon=abandon), next_eps
        return AgentDecision(MOVE, target=target, abandon=abandon), next_eps

    # exploit: neighbors' goal-proximity pheromone vs the candidate box value
    chosen_hole = None
    box_value = None
    box_id = box_candidate(world, agent_id, config.radius)
    if box_id is not None:
        holes = _feasible_holes(world, banks, agent_id, box_id, config.radius, feasibility)
        if holes:
            values = [banks.placement_value(box_id, h) for h in holes]
            chosen_hole = _draw(rng, holes, softmax(values, config.beta))
            box_value = banks.placement_value(box_id, chosen_hole)

    options: list[tuple[str, int]] = [("node", m) for m in moves]
    weights = [banks.nodes[m].proximity for m in moves]
    if chosen_hole is not None:
        options.append(("box", box_id))
        weights.append(box_value)
    if not options:
        return AgentDecision(WAIT, abandon=abandon), epsilon

    kind, picked = _draw(rng, options, softmax(weights, config.beta))
    if kind == "node":
        return AgentDecision(MOVE, target=picked, abandon=abandon), epsilon

    box_node = world.box(box_id).node
    if box_node in moves:
        path = world.path_to_hole(box_node, chosen_hole)
        if path is not None and len(path) >= 2:
            return AgentDecision(CLAIM, box=box_id, hole=chosen_hole,
                                 path=path, abandon=abandon), epsilon
        return AgentDecision(WAIT, abandon=abandon), epsilon
    route = world.shortest_path(me.node, box_node)
    if route is not None and len(route[0]) >= 2 and route[0][1] in moves:
        return AgentDecision(MOVE, target=route[0][1], abandon=abandon), epsilon
    return AgentDecision(WAIT, abandon=abandon), epsilon
