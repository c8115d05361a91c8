#!/usr/bin/env python3
"""
Classical ground truth for sponge crossing.

Each link is open independently with its singlet conversion probability
p = 2 sin^2(theta); the sponge-crossing probability is the probability that
some open path joins boundary A to boundary B.

Both boundaries are collapsed into one super node each (A -> 0, B -> 1,
interior nodes -> 2, 3, ...) before any counting. Links inside one boundary
are dropped; they cannot change whether A and B are joined.

Oracles:
    brute_force_sc      exact sum over all 2^E link states (E <= 24),
                        vectorized in chunks of 2^16 states
    monte_carlo_sc      independent trials with a union-find per trial,
                        split into blocks with seeds derived from
                        (seed, block index)
    newman_ziff_curve   whole crossing curve for uniform p from random link
                        orderings, convolved with binomial weights
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

import networkx as nx
import numpy as np
from scipy import stats

from modules import config
from modules.exceptions import OracleLimitError, ValidationError
from modules.network import Network, detached_nodes
from modules.performance import parallel_map, timed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrossingSample:
    """Monte Carlo count with its binomial standard error."""
    trials: int
    hits: int

    def __post_init__(self):
        if self.trials < 1 or not 0 <= self.hits <= self.trials:
            raise ValidationError(f"Invalid sample {self.hits}/{self.trials}", field_name="hits",
                                  field_value=self.hits)

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    @property
    def stderr(self) -> float:
        estimate = self.estimate
        return math.sqrt(estimate * (1.0 - estimate) / self.trials)


@dataclass(frozen=True)
class CrossingCurve:
    """Crossing probability over a grid of uniform p values."""
    ps: np.ndarray
    estimates: np.ndarray
    stderrs: np.ndarray
    trials: int


class CollapsedNetwork(NamedTuple):
    node_count: int
    a: np.ndarray
    b: np.ndarray
    p: np.ndarray
    link_index: np.ndarray


def collapse_boundaries(net: Network) -> CollapsedNetwork:
    """
    Map boundary A to node 0, boundary B to node 1 and interior nodes after them.

    Links in components touching no boundary never affect a crossing and are
    left out, so they do not count against the enumeration limit.
    """
    if not net.has_boundaries:
        raise ValidationError(config.ERROR_MESSAGES["missing_boundary"].format(side="A/B"), field_name="boundary")
    mapping = {node: 0 for node in net.boundary_a}
    mapping.update({node: 1 for node in net.boundary_b})
    detached = set(detached_nodes(net.to_networkx(), net.boundary_a | net.boundary_b))
    interior = [node for node in net.nodes if node not in mapping and node not in detached]
    mapping.update({node: position for position, node in enumerate(interior, start=2)})
    a, b, p, index = [], [], [], []
    for position, link in enumerate(net.links):
        if link.a in detached:
            continue
        ma, mb = mapping[link.a], mapping[link.b]
        if ma == mb:
            continue
        a.append(ma)
        b.append(mb)
        p.append(link.weight.p)
        index.append(position)
    return CollapsedNetwork(len(interior) + 2, np.array(a, dtype=np.int64), np.array(b, dtype=np.int64),
                            np.array(p, dtype=float), np.array(index, dtype=np.int64))


# ============================================================================
# Single configurations
# ============================================================================

class UnionFind:
    """Disjoint sets over 0..n-1 with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.size[x] < self.size[y]:
            x, y = y, x
        self.parent[y] = x
        self.size[x] += self.size[y]
        return True

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)


def _open_links(net: Network, open_mask: Sequence[bool]) -> np.ndarray:
    mask = np.asarray(open_mask, dtype=bool)
    if mask.shape != (net.link_count,):
        raise ValidationError(f"Open mask needs {net.link_count} entries", field_name="open_mask",
                              field_value=mask.size)
    return mask


def crossing_union_find(net: Network, open_mask: Sequence[bool]) -> bool:
    """Whether the open links (mask over net.links) join A and B."""
    mask = _open_links(net, open_mask)
    collapsed = collapse_boundaries(net)
    sets = UnionFind(collapsed.node_count)
    for a, b, position in zip(collapsed.a, collapsed.b, collapsed.link_index):
        if mask[position]:
            sets.union(int(a), int(b))
    return sets.connected(0, 1)


def crossing_bfs(net: Network, open_mask: Sequence[bool]) -> bool:
    """Breadth-first check of the same question on the uncollapsed graph."""
    mask = _open_links(net, open_mask)
    graph = nx.Graph()
    graph.add_nodes_from(net.nodes)
    graph.add_edges_from((link.a, link.b) for link, is_open in zip(net.links, mask) if is_open)
    reached = set()
    for source in net.boundary_a:
        if source not in reached:
            reached |= set(nx.bfs_tree(graph, source).nodes)
    return bool(reached & set(net.boundary_b))


# ============================================================================
# Exact enumeration
# ============================================================================

def _crossing_by_labels(open_states: np.ndarray, a: np.ndarray, b: np.ndarray, node_count: int) -> np.ndarray:
    """Min-label propagation over a batch of link states; True where 0 and 1 meet."""
    rows = open_states.shape[0]
    labels = np.tile(np.arange(node_count), (rows, 1))
    changed = True
    while changed:
        changed = False
        for e in range(a.size):
            left, right = labels[:, a[e]], labels[:, b[e]]
            update = open_states[:, e] & (left != right)
            if update.any():
                lowest = np.minimum(left, right)[update]
                labels[update, a[e]] = lowest
                labels[update, b[e]] = lowest
                changed = True
    return labels[:, 1] == 0


@timed("oracle.brute_force")
def brute_force_sc(net: Network) -> float:
    """
    Exact classical sponge-crossing probability.

    A single link A-B with p = 0.3 gives 0.3; two such links in series
    give 0.09.

    Raises:
        OracleLimitError: If the network has more than 24 links between
            distinct super nodes
    """
    collapsed = collapse_boundaries(net)
    links = collapsed.p.size
    if links > config.BRUTE_FORCE_MAX_LINKS:
        raise OracleLimitError(
            config.ERROR_MESSAGES["too_many_links"].format(limit=config.BRUTE_FORCE_MAX_LINKS, links=links),
            limit_type="links", current_value=links, limit=config.BRUTE_FORCE_MAX_LINKS)
    if links == 0:
        return 0.0

    bits = np.left_shift(np.int64(1), np.arange(links, dtype=np.int64))
    total = 0.0
    for start in range(0, 1 << links, config.BRUTE_FORCE_CHUNK):
        states = np.arange(start, min(start + config.BRUTE_FORCE_CHUNK, 1 << links), dtype=np.int64)
        open_states = (states[:, None] & bits) != 0
        weights = np.prod(np.where(open_states, collapsed.p, 1.0 - collapsed.p), axis=1)
        crossing = _crossing_by_labels(open_states, collapsed.a, collapsed.b, collapsed.node_count)
        total += float(np.sum(weights[crossing]))
    return min(max(total, 0.0), 1.0)


# ============================================================================
# Monte Carlo
# ============================================================================

class _BlockTask(NamedTuple):
    collapsed: CollapsedNetwork
    size: int
    seed: int
    block: int


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, block]))


def _monte_carlo_block(task: _BlockTask) -> int:
    collapsed = task.collapsed
    rng = _block_rng(task.seed, task.block)
    open_states = rng.random((task.size, collapsed.p.size)) < collapsed.p
    a, b = collapsed.a.tolist(), collapsed.b.tolist()
    hits = 0
    for row in open_states:
        sets = UnionFind(collapsed.node_count)
        for e in np.flatnonzero(row):
            sets.union(a[e], b[e])
        hits += sets.connected(0, 1)
    return hits


def _blocks(trials: int, collapsed: CollapsedNetwork, seed: int) -> List[_BlockTask]:
    size = config.MC_BLOCK_SIZE
    return [_BlockTask(collapsed, min(size, trials - start), seed, index)
            for index, start in enumerate(range(0, trials, size))]


@timed("oracle.monte_carlo")
def monte_carlo_sc(net: Network, trials: int = config.DEFAULT_TRIALS, seed: int = config.DEFAULT_SEED,
                   workers: Optional[int] = None) -> CrossingSample:
    """
    Monte Carlo sponge-crossing estimate; deterministic per (net, trials, seed).
    """
    if trials < 1:
        raise ValidationError("At least one trial is required", field_name="trials", field_value=trials)
    collapsed = collapse_boundaries(net)
    if collapsed.p.size == 0:
        return CrossingSample(trials, 0)
    hits = sum(parallel_map(_monte_carlo_block, _blocks(trials, collapsed, seed), workers))
    return CrossingSample(trials, int(hits))


def _newman_ziff_block(task: _BlockTask) -> np.ndarray:
    """Histogram of the number of occupied links at which A and B first join."""
    collapsed = task.collapsed
    links = collapsed.p.size
    rng = _block_rng(task.seed, task.block)
    a, b = collapsed.a.tolist(), collapsed.b.tolist()
    counts = np.zeros(links + 2, dtype=np.int64)
    for _ in range(task.size):
        sets = UnionFind(collapsed.node_count)
        joined_at = links + 1
        for occupied, e in enumerate(rng.permutation(links), start=1):
            sets.union(a[e], b[e])
            if sets.connected(0, 1):
                joined_at = occupied
                break
        counts[joined_at] += 1
    return counts


@timed("oracle.newman_ziff")
def newman_ziff_curve(net: Network, ps: Sequence[float], trials: int = config.DEFAULT_TRIALS,
                      seed: int = config.DEFAULT_SEED, workers: Optional[int] = None) -> CrossingCurve:
    """
    Crossing curve for uniform link probability over a whole grid of p.

    Link weights of net are ignored; only its topology and boundaries count.
    """
    if trials < 1:
        raise ValidationError("At least one trial is required", field_name="trials", field_value=trials)
    ps = np.asarray(ps, dtype=float)
    if np.any((ps < 0.0) | (ps > 1.0)):
        raise ValidationError("Probabilities must lie in [0, 1]", field_name="ps")
    collapsed = collapse_boundaries(net)
    links = collapsed.p.size
    if links == 0:
        zeros = np.zeros_like(ps)
        return CrossingCurve(ps, zeros, zeros.copy(), trials)

    counts = sum(parallel_map(_newman_ziff_block, _blocks(trials, collapsed, seed), workers))
    # fraction of orderings already joined once n links are occupied
    joined = np.cumsum(counts[:links + 1]) / trials
    occupied = np.arange(links + 1)
    estimates = np.array([float(np.sum(stats.binom.pmf(occupied, links, p) * joined)) for p in ps])
    estimates = np.clip(estimates, 0.0, 1.0)
    stderrs = np.sqrt(estimates * (1.0 - estimates) / trials)
    return CrossingCurve(ps, estimates, stderrs, trials)
