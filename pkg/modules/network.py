#!/usr/bin/env python3
"""
Weighted multigraph model, lattice and Bethe generators, boundary
contraction and dilution.

Networks are immutable. Every constructor goes through Network.create(),
which orients links so that a < b, drops self-loops and sorts nodes and
links canonically, so two networks describing the same multigraph compare
equal.

Lattice embeddings (L columns by L rows, node id = row * L + column):
    square      horizontal and vertical nearest-neighbour links
    honeycomb   brick wall: all horizontal links, vertical links only where
                (row + column) is even, so every node has degree <= 3
    triangular  square lattice plus the (row, col) -> (row + 1, col + 1)
                diagonal of every cell

Boundary A is the leftmost node column and boundary B the rightmost.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, NamedTuple, Set, Tuple, Union

import networkx as nx
import numpy as np

from modules import config
from modules.exceptions import ValidationError
from modules.weights import LinkWeight

logger = logging.getLogger(__name__)


class Link(NamedTuple):
    a: int
    b: int
    weight: LinkWeight

    @property
    def theta(self) -> float:
        return self.weight.theta


@dataclass(frozen=True)
class Network:
    """
    Undirected weighted multigraph with optional boundary node sets.

    Use Network.create() rather than the constructor so that links are
    normalized.
    """
    nodes: Tuple[int, ...]
    links: Tuple[Link, ...]
    boundary_a: FrozenSet[int] = field(default_factory=frozenset)
    boundary_b: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValidationError("Duplicate node ids", field_name="nodes")
        for link in self.links:
            for endpoint in (link.a, link.b):
                if endpoint not in node_set:
                    raise ValidationError(
                        config.ERROR_MESSAGES["unknown_node"].format(node=endpoint, record="link"),
                        field_name="links", field_value=endpoint)
        for side, boundary in (("A", self.boundary_a), ("B", self.boundary_b)):
            missing = set(boundary) - node_set
            if missing:
                raise ValidationError(
                    config.ERROR_MESSAGES["unknown_node"].format(node=min(missing), record=f"boundary {side}"),
                    field_name="boundary", field_value=min(missing))
        overlap = set(self.boundary_a) & set(self.boundary_b)
        if overlap:
            raise ValidationError(config.ERROR_MESSAGES["duplicate_boundary"].format(node=min(overlap)),
                                  field_name="boundary", field_value=min(overlap))

    @classmethod
    def create(cls, nodes: Iterable[int], links: Iterable[Tuple[int, int, Union[LinkWeight, float]]],
               boundary_a: Iterable[int] = (), boundary_b: Iterable[int] = ()) -> "Network":
        """
        Build a normalized network.

        Links may carry a LinkWeight or a bare theta. Self-loops are dropped.
        """
        normalized = []
        for a, b, weight in links:
            if not isinstance(weight, LinkWeight):
                weight = LinkWeight(weight)
            a, b = int(a), int(b)
            if a == b:
                logger.debug(f"Dropping self-loop on node {a}")
                continue
            normalized.append(Link(min(a, b), max(a, b), weight))
        normalized.sort(key=lambda link: (link.a, link.b, link.weight.theta))
        return cls(tuple(sorted(int(n) for n in nodes)), tuple(normalized),
                   frozenset(int(n) for n in boundary_a), frozenset(int(n) for n in boundary_b))

    @property
    def link_count(self) -> int:
        return len(self.links)

    @property
    def has_boundaries(self) -> bool:
        return bool(self.boundary_a) and bool(self.boundary_b)

    def degree(self, node: int) -> int:
        return sum((link.a == node) + (link.b == node) for link in self.links)

    def neighbors(self, node: int) -> List[int]:
        result = {link.b for link in self.links if link.a == node}
        result |= {link.a for link in self.links if link.b == node}
        return sorted(result)

    def to_networkx(self) -> nx.MultiGraph:
        """MultiGraph with one edge per link, keyed by link index, attribute 'theta'."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.nodes)
        for index, link in enumerate(self.links):
            graph.add_edge(link.a, link.b, key=index, theta=link.weight.theta)
        return graph

    def is_connected(self) -> bool:
        return len(self.nodes) > 0 and nx.is_connected(self.to_networkx())

    def with_uniform_weight(self, weight: LinkWeight) -> "Network":
        """Same topology and boundaries with every link set to weight."""
        return Network.create(self.nodes, [(link.a, link.b, weight) for link in self.links],
                              self.boundary_a, self.boundary_b)


class LatticeKind(str, Enum):
    SQUARE = "square"
    HONEYCOMB = "honeycomb"
    TRIANGULAR = "triangular"


@dataclass(frozen=True)
class LatticeSpec:
    kind: LatticeKind
    L: int

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", LatticeKind(self.kind))
        except ValueError as e:
            raise ValidationError(f"Unknown lattice kind: {self.kind}", field_name="kind",
                                  field_value=self.kind) from e
        low, high = config.VALIDATION_RULES["L"]
        if not low <= int(self.L) <= high:
            raise ValidationError(f"Lattice size must lie in [{low}, {high}]", field_name="L", field_value=self.L)


def _as_weight(theta: Union[LinkWeight, float]) -> LinkWeight:
    return theta if isinstance(theta, LinkWeight) else LinkWeight(theta)


def build_lattice(spec: LatticeSpec, theta: Union[LinkWeight, float]) -> Network:
    """
    Uniform-weight 2D lattice with left/right boundaries.

    Examples:
        >>> net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 5), math.pi / 8)
        >>> len(net.nodes), net.link_count
        (25, 40)
    """
    weight = _as_weight(theta)
    size = spec.L
    node_id = lambda row, col: row * size + col  # noqa: E731
    links = []
    for row in range(size):
        for col in range(size):
            if col + 1 < size:
                links.append((node_id(row, col), node_id(row, col + 1), weight))
            if row + 1 < size:
                if spec.kind is not LatticeKind.HONEYCOMB or (row + col) % 2 == 0:
                    links.append((node_id(row, col), node_id(row + 1, col), weight))
            if spec.kind is LatticeKind.TRIANGULAR and row + 1 < size and col + 1 < size:
                links.append((node_id(row, col), node_id(row + 1, col + 1), weight))
    return Network.create(range(size * size), links,
                          boundary_a=[node_id(row, 0) for row in range(size)],
                          boundary_b=[node_id(row, size - 1) for row in range(size)])


def build_bethe(k: int, layers: int, theta: Union[LinkWeight, float]) -> Network:
    """
    Finite Bethe lattice (Cayley tree) with breadth-first node ids.

    The root (id 0) has k children and every other internal node k - 1.
    Boundary A is the root, boundary B the leaves of the last layer.
    """
    if k < 3:
        raise ValidationError("Bethe degree must be at least 3", field_name="k", field_value=k)
    if layers < 1:
        raise ValidationError("Bethe lattice needs at least one layer", field_name="layers", field_value=layers)
    weight = _as_weight(theta)
    links = []
    frontier = [0]
    next_id = 1
    for layer in range(layers):
        children_per_node = k if layer == 0 else k - 1
        new_frontier = []
        for parent in frontier:
            for _ in range(children_per_node):
                links.append((parent, next_id, weight))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return Network.create(range(next_id), links, boundary_a=[0], boundary_b=frontier)


def contract_boundaries(net: Network) -> Network:
    """
    Make each boundary set a meta node by adding a clique of pi/4 links.

    A boundary {0, 1} gains the single link (0, 1, pi/4); singleton
    boundaries leave the network unchanged.
    """
    if not net.boundary_a:
        raise ValidationError(config.ERROR_MESSAGES["missing_boundary"].format(side="A"), field_name="boundary_a")
    if not net.boundary_b:
        raise ValidationError(config.ERROR_MESSAGES["missing_boundary"].format(side="B"), field_name="boundary_b")
    maximal = LinkWeight.maximal()
    added = [(a, b, maximal)
             for boundary in (net.boundary_a, net.boundary_b)
             for a, b in itertools.combinations(sorted(boundary), 2)]
    if not added:
        return net
    return Network.create(net.nodes, list(net.links) + added, net.boundary_a, net.boundary_b)


def boundary_representatives(net: Network) -> Tuple[int, int]:
    """Lowest node id of each boundary."""
    if not net.has_boundaries:
        raise ValidationError(config.ERROR_MESSAGES["missing_boundary"].format(side="A/B"), field_name="boundary")
    return min(net.boundary_a), min(net.boundary_b)


def dilute(net: Network, f: float, seed: int) -> Network:
    """
    Keep each link independently with probability f.

    The generator is numpy's default_rng(seed), so a given (net, f, seed)
    always gives the same result. Nodes and boundaries are kept.
    """
    if not 0.0 < f <= 1.0:
        raise ValidationError(config.ERROR_MESSAGES["bad_fraction"].format(value=f), field_name="f", field_value=f)
    rng = np.random.default_rng(seed)
    keep = rng.random(net.link_count) < f
    kept = [link for link, flag in zip(net.links, keep) if flag]
    return Network(net.nodes, tuple(kept), net.boundary_a, net.boundary_b)


def detached_nodes(graph: nx.Graph, anchors: Iterable[int]) -> List[int]:
    """Nodes of graph connected to no anchor, sorted."""
    keep: Set[int] = set()
    for anchor in anchors:
        if anchor in graph:
            keep |= nx.node_connected_component(graph, anchor)
    return sorted(node for node in graph.nodes if node not in keep)


def drop_disconnected(net: Network, anchors: Iterable[int]) -> Network:
    """
    Remove every node (and its links) not connected to any anchor node.

    Boundaries are intersected with the surviving nodes.
    """
    dropped = set(detached_nodes(net.to_networkx(), anchors))
    if not dropped:
        return net
    links = [link for link in net.links if link.a not in dropped]
    return Network(tuple(n for n in net.nodes if n not in dropped), tuple(links),
                   net.boundary_a - dropped, net.boundary_b - dropped)


def random_connected_network(rng: np.random.Generator, max_nodes: int = 8, max_links: int = 12,
                             boundary: bool = True) -> Network:
    """
    Random connected multigraph with random angles (for property tests and
    consistency sweeps).

    A random spanning tree is laid first, then extra random links are added
    up to a random link count. Boundaries are the singletons {0} and
    {n - 1} when requested.
    """
    n = int(rng.integers(2, max_nodes + 1))
    links = []
    for node in range(1, n):
        links.append((int(rng.integers(0, node)), node))
    target = int(rng.integers(n - 1, max(n - 1, max_links) + 1))
    while len(links) < target:
        a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
        links.append((a, b))
    thetas = rng.uniform(0.0, config.THETA_MAX, size=len(links))
    return Network.create(range(n), [(a, b, float(t)) for (a, b), t in zip(links, thetas)],
                          boundary_a=[0] if boundary else [], boundary_b=[n - 1] if boundary else [])
