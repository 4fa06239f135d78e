"""Communication graph, mixing weights, and consensus parameter averaging."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROLES = ("L", "U", "M")

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ParamVector:
    """Flat view of a model's parameters, the unit of consensus exchange.

    Two vectors are combinable only when their layout tags match; the tag
    binds the flat layout to a concrete architecture.
    """

    values: np.ndarray
    layout_tag: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("ParamVector values must be one-dimensional")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]

    def copy(self) -> "ParamVector":
        return ParamVector(self.values.copy(), self.layout_tag)


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph of clients with per-node roles (L/U/M).

    The sub-graph of node i is the node itself plus its direct neighbors;
    it is the scope of every exchange in the simulation.
    """

    roles: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    _adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.roles)
        if n < 2:
            raise ValueError("topology needs at least two nodes")
        for role in self.roles:
            if role not in ROLES:
                raise ValueError(f"unknown role label {role!r}; expected one of {ROLES}")
        seen = set()
        neighbors: list[set[int]] = [set() for _ in range(n)]
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) references a node outside 0..{n - 1}")
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            neighbors[a].add(b)
            neighbors[b].add(a)
        # connectivity via BFS from node 0
        reached = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in neighbors[u]:
                    if v not in reached:
                        reached.add(v)
                        nxt.append(v)
            frontier = nxt
        if len(reached) != n:
            missing = sorted(set(range(n)) - reached)
            raise ValueError(f"graph is disconnected; unreachable nodes {missing}")
        object.__setattr__(
            self, "_adjacency", tuple(tuple(sorted(s)) for s in neighbors)
        )

    @property
    def node_count(self) -> int:
        return len(self.roles)

    def nodes(self) -> list[int]:
        return list(range(self.node_count))

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._adjacency[i]

    def subgraph(self, i: int) -> tuple[int, ...]:
        """Node i plus its neighbors, sorted."""
        return tuple(sorted((i,) + self._adjacency[i]))

    def nodes_with_role(self, role: str) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r == role]


# Built-in graphs. topo1..topo3 follow the described compositions
# (1L/6U/3M; two connected L hubs with three U and one M leaf each;
# a degree-2 ring of 3L/4U/3M with the L nodes non-adjacent).
# fig1a is the 3-regular default graph: two L nodes bridged to the rest
# through M relays and cross-linked U nodes.
PRESETS: dict[str, dict] = {
    "fig1a": {
        "roles": ("L", "L", "U", "U", "U", "U", "U", "M", "M", "M"),
        "edges": (
            (0, 2), (0, 3), (0, 7),
            (1, 4), (1, 5), (1, 8),
            (2, 4), (2, 7), (3, 5), (3, 8),
            (4, 9), (5, 9),
            (6, 7), (6, 8), (6, 9),
        ),
    },
    "topo1": {
        "roles": ("L", "U", "U", "U", "U", "U", "U", "M", "M", "M"),
        "edges": (
            (0, 7), (0, 8), (0, 9),
            (7, 1), (7, 2), (8, 3), (8, 4), (9, 5), (9, 6),
            (1, 3), (2, 5), (4, 6),
        ),
    },
    "topo2": {
        "roles": ("L", "L", "U", "U", "U", "U", "U", "U", "M", "M"),
        "edges": (
            (0, 1),
            (0, 2), (0, 3), (0, 4), (0, 8),
            (1, 5), (1, 6), (1, 7), (1, 9),
        ),
    },
    "topo3": {
        "roles": ("L", "U", "M", "U", "L", "U", "M", "U", "L", "M"),
        "edges": tuple((i, (i + 1) % 10) for i in range(10)),
    },
}


def preset_topology(name: str) -> Topology:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
    return Topology(roles=spec["roles"], edges=spec["edges"])


def load_topology(spec: str | dict) -> Topology:
    """Build a validated Topology from a preset name or an explicit spec.

    An explicit spec is a mapping with 'roles' (list of L/U/M labels, one
    per node) and 'edges' (list of undirected node-id pairs).
    """
    if isinstance(spec, str):
        return preset_topology(spec)
    if "preset" in spec:
        extra = set(spec) - {"preset"}
        if extra:
            raise ValueError(f"preset topology takes no other keys, got {sorted(extra)}")
        return preset_topology(spec["preset"])
    if "roles" not in spec or "edges" not in spec:
        raise ValueError("topology spec needs 'roles' and 'edges' (or 'preset')")
    roles = tuple(str(r) for r in spec["roles"])
    edges = tuple((int(a), int(b)) for a, b in spec["edges"])
    return Topology(roles=roles, edges=edges)


@dataclass(frozen=True)
class MixingWeights:
    """Per-node aggregation weights over each node's sub-graph.

    rows[i][j] is the weight node i puts on node j's parameters. Every row
    must be nonnegative and sum to one; support outside the sub-graph is
    implicitly zero.
    """

    rows: dict[int, dict[int, float]]

    def row(self, i: int) -> dict[int, float]:
        return self.rows[i]

    def validate_against(self, topology: Topology) -> None:
        if sorted(self.rows) != topology.nodes():
            raise ValueError("weight rows do not cover the topology's nodes")
        for i, row in self.rows.items():
            support = set(row)
            allowed = set(topology.subgraph(i))
            if not support <= allowed:
                raise ValueError(
                    f"node {i} weights reference nodes {sorted(support - allowed)} "
                    "outside its sub-graph"
                )
            total = 0.0
            for j, w in row.items():
                if w < 0:
                    raise ValueError(f"negative weight w[{i}][{j}] = {w}")
                total += w
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ValueError(f"row {i} sums to {total!r}, expected 1")


def uniform_weights(topology: Topology) -> MixingWeights:
    """Constant 1/|sub-graph| weights for every node."""
    rows = {}
    for i in topology.nodes():
        group = topology.subgraph(i)
        w = 1.0 / len(group)
        rows[i] = {j: w for j in group}
    return MixingWeights(rows=rows)


def consensus_update(
    local_params: dict[int, ParamVector], weights: MixingWeights
) -> dict[int, ParamVector]:
    """Simultaneous weighted neighborhood averaging of parameter vectors.

    Every output is computed from the round-start inputs; inputs are never
    mutated, which models a synchronous exchange with a barrier.
    """
    tags = {pv.layout_tag for pv in local_params.values()}
    if len(tags) != 1:
        raise ValueError(f"mixed parameter layouts {sorted(tags)}")
    tag = tags.pop()
    out: dict[int, ParamVector] = {}
    for i in sorted(weights.rows):
        row = weights.rows[i]
        acc = None
        for j in sorted(row):
            if j not in local_params:
                raise ValueError(f"weights reference node {j} with no parameters")
            term = row[j] * local_params[j].values
            acc = term if acc is None else acc + term
        if acc is None:
            raise ValueError(f"empty weight row for node {i}")
        out[i] = ParamVector(acc, tag)
    return out


def max_disagreement(params: dict[int, ParamVector]) -> float:
    """Largest pairwise max-norm distance between the given vectors."""
    ids = sorted(params)
    worst = 0.0
    for a in range(len(ids)):
        va = params[ids[a]].values
        for b in range(a + 1, len(ids)):
            d = float(np.max(np.abs(va - params[ids[b]].values)))
            if d > worst:
                worst = d
    return worst
