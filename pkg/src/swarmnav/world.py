"""Discretized node world: graph, holes, boxes, agents, and traversability.

Locations are nodes; edges carry metric lengths. Holes live on nodes and
block incident edges until the boxes stacked inside them bring the residual
depth within the flushness tolerance. Everything else in the stack queries
this module for "can I get from here to there".
"""
from __future__ import annotations

import copy
import heapq
import math
from dataclasses import dataclass, field


class WorldError(Exception):
    """Base class for world-state violations."""


class UnknownIdError(WorldError):
    """Lookup of a node/edge/hole/box/agent id that does not exist."""


class StateError(WorldError):
    """Operation conflicts with current world state."""


Position = tuple[float, float, float]


@dataclass
class NodeRecord:
    id: int
    position: Position
    hole: int | None = None


@dataclass
class EdgeRecord:
    a: int
    b: int
    length: float

    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass
class HoleRecord:
    id: int
    node: int
    depth: float
    stack: list[int] = field(default_factory=list)  # box ids, bottom first


@dataclass
class BoxRecord:
    id: int
    height: float
    # exactly one of (node, hole) is set
    node: int | None = None
    hole: int | None = None

    @property
    def at_node(self) -> bool:
        return self.node is not None


# Agent activity tags. `pushing` carries (box_id, hole_id, remaining_path)
# where remaining_path runs from the box's current node to the hole's node.
IDLE = "idle"
TRAVELING = "traveling"
PUSHING = "pushing"
WAITING = "waiting"


@dataclass
class AgentRecord:
    id: int
    node: int
    activity: str = IDLE
    target: int | None = None          # traveling
    box: int | None = None             # pushing
    hole: int | None = None            # pushing
    path: list[int] = field(default_factory=list)  # pushing: box node .. hole node
    done: bool = False                 # reached goal and retired


class WorldGraph:
    """Single source of truth for the node environment.

    Single-writer model: one owner mutates (``place_box``, ``move_agent``);
    readers take ``snapshot()`` value copies. Traversability-dependent
    distance queries are cached and invalidated whenever a box placement
    changes reachability.
    """

    def __init__(self, nodes, edges, holes, boxes, agents, goal: int,
                 span: float | None = None, h_tol: float = 0.2):
        nodes, edges = list(nodes), list(edges)
        holes, boxes, agents = list(holes), list(boxes), list(agents)
        self.nodes: dict[int, NodeRecord] = {n.id: n for n in nodes}
        if len(self.nodes) != len(nodes):
            raise WorldError("duplicate node ids")
        self.holes: dict[int, HoleRecord] = {h.id: h for h in holes}
        self.boxes: dict[int, BoxRecord] = {b.id: b for b in boxes}
        self.agents: dict[int, AgentRecord] = {a.id: a for a in agents}
        self.goal = goal
        self.h_tol = h_tol

        self.edges: dict[tuple[int, int], float] = {}
        self._adj: dict[int, list[tuple[int, float]]] = {i: [] for i in self.nodes}
        for e in edges:
            if e.a not in self.nodes or e.b not in self.nodes:
                raise UnknownIdError(f"edge ({e.a},{e.b}) references unknown node")
            if e.a == e.b:
                raise WorldError(f"self edge at node {e.a}")
            if e.key() in self.edges:
                raise WorldError(f"duplicate edge {e.key()}")
            length = e.length if e.length is not None else self.euclidean(e.a, e.b)
            if length <= 0:
                raise WorldError(f"edge {e.key()} has non-positive length")
            self.edges[e.key()] = length
            self._adj[e.a].append((e.b, length))
            self._adj[e.b].append((e.a, length))
        for i in self._adj:
            self._adj[i].sort()

        self._validate(span)
        max_pair = self._max_pairwise_distance()
        self.span = span if span is not None else 1.5 * max_pair

        self._version = 0
        self._dist_cache: dict[int, tuple[dict[int, float], dict[int, int]]] = {}

    # -- construction helpers -------------------------------------------------

    def _validate(self, span: float | None) -> None:
        problems = []
        if self.goal not in self.nodes:
            problems.append(f"goal node {self.goal} does not exist")
        for h in self.holes.values():
            if h.node not in self.nodes:
                problems.append(f"hole {h.id} sits on unknown node {h.node}")
            elif self.nodes[h.node].hole not in (None, h.id):
                problems.append(f"node {h.node} carries two holes")
            else:
                self.nodes[h.node].hole = h.id
            if h.depth <= 0:
                problems.append(f"hole {h.id} has non-positive depth")
        node_boxes: dict[int, int] = {}
        for b in self.boxes.values():
            if (b.node is None) == (b.hole is None):
                problems.append(f"box {b.id} must be at exactly one location")
            if b.height <= 0:
                problems.append(f"box {b.id} has non-positive height")
            if b.node is not None:
                if b.node not in self.nodes:
                    problems.append(f"box {b.id} at unknown node {b.node}")
                elif b.node in node_boxes:
                    problems.append(f"two boxes at node {b.node}")
                else:
                    node_boxes[b.node] = b.id
            if b.hole is not None and b.id not in self.holes.get(b.hole, HoleRecord(-1, -1, 1)).stack:
                problems.append(f"box {b.id} claims hole {b.hole} but is not stacked there")
        seen_nodes: dict[int, int] = {}
        for a in self.agents.values():
            if a.node not in self.nodes:
                problems.append(f"agent {a.id} at unknown node {a.node}")
            elif a.node in seen_nodes:
                problems.append(f"agents {seen_nodes[a.node]} and {a.id} share node {a.node}")
            else:
                seen_nodes[a.node] = a.id
        if span is not None and span < self._max_pairwise_distance() - 1e-9:
            problems.append("span smaller than the largest pairwise node distance")
        if problems:
            raise WorldError("; ".join(problems))

    def _max_pairwise_distance(self) -> float:
        ids = list(self.nodes)
        best = 0.0
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                best = max(best, self.euclidean(a, b))
        return best

    # -- lookups --------------------------------------------------------------

    def node(self, node_id: int) -> NodeRecord:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownIdError(f"unknown node {node_id}") from None

    def hole(self, hole_id: int) -> HoleRecord:
        try:
            return self.holes[hole_id]
        except KeyError:
            raise UnknownIdError(f"unknown hole {hole_id}") from None

    def box(self, box_id: int) -> BoxRecord:
        try:
            return self.boxes[box_id]
        except KeyError:
            raise UnknownIdError(f"unknown box {box_id}") from None

    def agent(self, agent_id: int) -> AgentRecord:
        try:
            return self.agents[agent_id]
        except KeyError:
            raise UnknownIdError(f"unknown agent {agent_id}") from None

    def euclidean(self, a: int, b: int) -> float:
        pa, pb = self.node(a).position, self.node(b).position
        return math.dist(pa, pb)

    def edge_length(self, a: int, b: int) -> float | None:
        return self.edges.get((a, b) if a < b else (b, a))

    def neighbors(self, node_id: int) -> list[tuple[int, float]]:
        self.node(node_id)
        return self._adj[node_id]

    def box_at_node(self, node_id: int) -> int | None:
        for b in self.boxes.values():
            if b.node == node_id:
                return b.id
        return None

    def agent_at_node(self, node_id: int) -> int | None:
        for a in self.agents.values():
            if not a.done and a.node == node_id:
                return a.id
        return None

    def active_agents(self) -> list[AgentRecord]:
        return [self.agents[i] for i in sorted(self.agents) if not self.agents[i].done]

    # -- traversability -------------------------------------------------------

    def residual_depth(self, hole_id: int) -> float:
        """Hole depth minus stacked box heights.

        Positive: open pit. Negative: protruding hill. Within ``h_tol`` of
        zero: flush, i.e. walkable.
        """
        h = self.hole(hole_id)
        return h.depth - sum(self.box(b).height for b in h.stack)

    def node_passable(self, node_id: int) -> bool:
        hole_id = self.node(node_id).hole
        if hole_id is None:
            return True
        return abs(self.residual_depth(hole_id)) <= self.h_tol

    def is_reachable(self, a: int, b: int) -> bool:
        """True iff an edge joins ``a`` and ``b`` and neither endpoint is
        blocked by an open pit or a hill."""
        self.node(a), self.node(b)
        if self.edge_length(a, b) is None:
            return False
        return self.node_passable(a) and self.node_passable(b)

    def reachable_neighbors(self, node_id: int) -> list[int]:
        return [m for m, _ in self.neighbors(node_id) if self.is_reachable(node_id, m)]

    # -- shortest paths -------------------------------------------------------

    def _distances(self, src: int) -> dict[int, float]:
        """Dijkstra over reachable edges; cached until traversability changes."""
        cached = self._dist_cache.get(src)
        if cached is not None:
            return cached
        dist = {src: 0.0}
        pq = [(0.0, src)]
        done: set[int] = set()
        while pq:
            d, u = heapq.heappop(pq)
            if u in done:
                continue
            done.add(u)
            if not self.node_passable(u):
                continue  # blocked nodes terminate paths
            for v, w in self._adj[u]:
                if not self.node_passable(v):
                    continue
                nd = d + w
                if nd < dist.get(v, math.inf) - 1e-12:
                    dist[v] = nd
                    heapq.heappush(pq, (nd, v))
        self._dist_cache[src] = dist
        return dist

    def shortest_path(self, src: int, dst: int,
                      max_radius: float | None = None) -> tuple[list[int], float] | None:
        """Minimal-length path over reachable edges only.

        Returns ``(nodes, length)`` with ``nodes`` running src..dst inclusive
        (empty list when src == dst); ``None`` when disconnected or farther
        than ``max_radius``. Length ties resolve to the smallest lexicographic
        node-id sequence.
        """
        self.node(src), self.node(dst)
        if src == dst:
            return [], 0.0
        if not (self.node_passable(src) and self.node_passable(dst)):
            return None
        # Heap entries order by (length, path), so the first pop ending at dst
        # has minimal length and, among equals, the lexicographically smallest
        # node sequence. Equal-length ties are re-expanded; paths stay simple.
        pq: list[tuple[float, tuple[int, ...]]] = [(0.0, (src,))]
        finalized: dict[int, float] = {}
        while pq:
            d, path = heapq.heappop(pq)
            u = path[-1]
            if max_radius is not None and d > max_radius + 1e-12:
                return None
            if u == dst:
                return list(path), d
            f = finalized.get(u)
            if f is not None and d > f + 1e-12:
                continue
            if f is None:
                finalized[u] = d
            for v, w in self._adj[u]:
                if v in path or not self.node_passable(v):
                    continue
                nd = d + w
                fv = finalized.get(v)
                if fv is not None and nd > fv + 1e-12:
                    continue
                if max_radius is not None and nd > max_radius + 1e-12:
                    continue
                heapq.heappush(pq, (nd, path + (v,)))
        return None

    def path_distance(self, src: int, dst: int) -> float:
        """Reachable path length src->dst, inf when disconnected."""
        if src == dst:
            return 0.0
        dist = self._distances(src)
        if dst in dist and self.node_passable(dst):
            return dist[dst]
        return math.inf

    def hole_distance(self, src: int, hole_id: int) -> float:
        """Path distance from ``src`` to a hole's node. The terminal hop onto
        the hole node is allowed even while the hole blocks traversal, so
        open pits remain detectable and pushable from adjacent nodes."""
        h = self.hole(hole_id)
        if self.node_passable(h.node):
            return self.path_distance(src, h.node)
        if src == h.node:
            return 0.0
        dist = self._distances(src)
        best = math.inf
        for m, w in self._adj[h.node]:
            if m == src:
                best = min(best, w)
            elif m in dist and self.node_passable(m):
                best = min(best, dist[m] + w)
        return best

    def path_to_hole(self, src: int, hole_id: int) -> list[int] | None:
        """Node sequence src..hole-node, allowing the terminal hop onto the
        hole node; ``None`` when no route exists."""
        h = self.hole(hole_id)
        if self.node_passable(h.node):
            got = self.shortest_path(src, h.node)
            if got is None:
                return None
            return got[0] if got[0] else [src]
        if src == h.node:
            return [src]
        best: tuple[float, list[int]] | None = None
        for m, w in sorted(self._adj[h.node]):
            if m == src:
                cand: tuple[float, list[int]] = (w, [src, h.node])
            else:
                got = self.shortest_path(src, m)
                if got is None:
                    continue
                path, d = got
                cand = (d + w, path + [h.node])
            if best is None or cand[0] < best[0] - 1e-12:
                best = cand
        return None if best is None else best[1]

    # -- mutations ------------------------------------------------------------

    def place_box(self, box_id: int, hole_id: int) -> None:
        """Drop an at-node box into an adjacent hole; it joins the stack and
        becomes immovable. Traversability caches are invalidated."""
        b = self.box(box_id)
        h = self.hole(hole_id)
        if b.hole is not None:
            raise StateError(f"box {box_id} is already in hole {b.hole}")
        if self.edge_length(b.node, h.node) is None:
            raise StateError(f"box {box_id} at node {b.node} is not adjacent to hole {hole_id}")
        b.node = None
        b.hole = hole_id
        h.stack.append(box_id)
        self._bump()

    def move_agent(self, agent_id: int, node_id: int) -> None:
        a = self.agent(agent_id)
        self.node(node_id)
        occupant = self.agent_at_node(node_id)
        if occupant is not None and occupant != agent_id:
            raise StateError(f"node {node_id} already holds agent {occupant}")
        a.node = node_id

    def retire_agent(self, agent_id: int) -> None:
        self.agent(agent_id).done = True

    def _bump(self) -> None:
        self._version += 1
        self._dist_cache.clear()

    @property
    def version(self) -> int:
        return self._version

    def snapshot(self) -> "WorldGraph":
        """Value copy safe to hand to concurrent readers."""
        return copy.deepcopy(self)
