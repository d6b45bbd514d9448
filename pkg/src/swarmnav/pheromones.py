"""Pheromone banks and their four update rules.

Each node carries a goal-proximity pheromone (``proximity`` = span minus the
stored goal distance), a visit-count pheromone steering exploration, and one
trail value per hole advertising routes to it. Each box carries a placement
value per candidate hole. Agents deposit only at the node they occupy; the
banks are plain value types so snapshots are cheap copies.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

from .world import WorldGraph

CLAIMED = "claimed"
STEPPED_OVER = "stepped_over"


@dataclass
class NodePheromones:
    proximity: float = 0.0            # span - goal_dist once touched
    goal_dist: float = math.inf      # estimated, then path-confirmed
    confirmed: bool = False          # goal_dist came through confirmed neighbors
    visits: float = 0.0              # exploration pheromone
    trails: dict[int, float] = field(default_factory=dict)  # hole id -> [0,1]

    def trail(self, hole_id: int) -> float:
        return self.trails.get(hole_id, 0.0)


@dataclass
class BoxPheromones:
    placement: dict[int, float] = field(default_factory=dict)  # hole id -> value > 0


@dataclass
class FieldConfig:
    span: float                       # upper bound on any goal distance
    placement_decay: float = 0.9      # in (0, 1); claims multiply by this
    placement_init: float = 1.0       # fresh (box, hole) placement value

    def __post_init__(self):
        if not 0.0 < self.placement_decay < 1.0:
            raise ValueError("placement_decay must lie in (0, 1)")
        if self.placement_init <= 0.0:
            raise ValueError("placement_init must be positive")
        if self.span <= 0.0:
            raise ValueError("span must be positive")


class PheromoneField:
    """All pheromone state for one scenario, persisted across episodes."""

    def __init__(self, world: WorldGraph, config: FieldConfig):
        self.config = config
        self.nodes: dict[int, NodePheromones] = {i: NodePheromones() for i in world.nodes}
        self.boxes: dict[int, BoxPheromones] = {b: BoxPheromones() for b in world.boxes}

    # -- goal-proximity pheromone (deposited by the agent on its node) --------

    def update_distance(self, world: WorldGraph, node_id: int) -> None:
        """Refresh the occupied node's goal distance.

        The goal pins distance zero. A node with a path-confirmed reachable
        neighbor takes the cheapest edge-plus-neighbor distance and becomes
        confirmed itself; otherwise the straight-line distance to the goal
        stands in until word of a confirmed path arrives.
        """
        bank = self.nodes[node_id]
        span = self.config.span
        if node_id == world.goal:
            bank.goal_dist = 0.0
            bank.confirmed = True
        else:
            through = [
                world.edge_length(node_id, m) + self.nodes[m].goal_dist
                for m in world.reachable_neighbors(node_id)
                if self.nodes[m].confirmed
            ]
            if through:
                best = min(through)
                # confirmed distance is monotone: never let a re-update raise it
                bank.goal_dist = min(bank.goal_dist, best) if bank.confirmed else best
                bank.confirmed = True
            elif not bank.confirmed:
                bank.goal_dist = world.euclidean(node_id, world.goal)
        bank.proximity = span - bank.goal_dist

    # -- box placement values ---------------------------------------------------

    def placement_value(self, box_id: int, hole_id: int) -> float:
        return self.boxes[box_id].placement.get(hole_id, self.config.placement_init)

    def update_box_value(self, box_id: int, hole_id: int, event: str) -> None:
        """Claims shrink the (box, hole) placement value by the decay factor;
        a successful step over the placed box multiplies it back out."""
        values = self.boxes[box_id].placement
        current = values.get(hole_id, self.config.placement_init)
        if event == CLAIMED:
            values[hole_id] = current * self.config.placement_decay
        elif event == STEPPED_OVER:
            values[hole_id] = current / self.config.placement_decay
        else:
            raise ValueError(f"unknown box-value event {event!r}")

    # -- hole trails --------------------------------------------------------------

    def update_hole_pheromones(self, world: WorldGraph, node_id: int, radius: float,
                               episode_ended: bool = False) -> None:
        """Seed trails for holes detectable within ``radius`` (path distance),
        then soak up neighbor trails decayed by edge length. Trails only ever
        grow within an episode; episode end wipes the node's trails."""
        bank = self.nodes[node_id]
        if episode_ended:
            bank.trails = {h: 0.0 for h in bank.trails}
            return
        for hole_id in world.holes:
            if world.hole_distance(node_id, hole_id) <= radius:
                bank.trails[hole_id] = 1.0
        neighbor_ids = world.reachable_neighbors(node_id)
        for hole_id in world.holes:
            current = bank.trail(hole_id)
            best = current
            for m in neighbor_ids:
                decayed = self.nodes[m].trail(hole_id) * math.exp(-world.edge_length(node_id, m))
                best = max(best, decayed)
            if best > current:
                bank.trails[hole_id] = best

    # -- exploration pheromone -----------------------------------------------------

    def update_exploration(self, world: WorldGraph, node_id: int | None,
                           episode_ended: bool = False) -> None:
        """Visits bump the node's count; episode end shifts every node down by
        the global minimum so the least-visited node reads zero."""
        if episode_ended:
            low = min(b.visits for b in self.nodes.values())
            for b in self.nodes.values():
                b.visits -= low
            return
        self.nodes[node_id].visits += 1.0

    # -- episode boundary -------------------------------------------------------

    def end_episode(self, world: WorldGraph) -> None:
        for node_id in self.nodes:
            self.update_hole_pheromones(world, node_id, 0.0, episode_ended=True)
        self.update_exploration(world, None, episode_ended=True)

    # -- serialization ------------------------------------------------------------

    def snapshot_rows(self, hole_ids: list[int]) -> list[list]:
        """Per-node rows: id, proximity, goal_dist, confirmed, visits, then one
        trail column per hole (sorted by hole id)."""
        rows = []
        for node_id in sorted(self.nodes):
            b = self.nodes[node_id]
            dist = b.goal_dist if math.isfinite(b.goal_dist) else ""
            row = [node_id, b.proximity, dist, int(b.confirmed), b.visits]
            row.extend(b.trail(h) for h in hole_ids)
            rows.append(row)
        return rows

    def snapshot(self) -> "PheromoneField":
        return copy.deepcopy(self)
