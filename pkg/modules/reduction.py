#!/usr/bin/env python3
"""
Reduction of networks to a two-terminal equivalent.

Interior nodes are degraded one at a time until only the two terminals are
left. Degrading a node of degree d replaces its star by an equivalent mesh:

    d <= 1   the node is deleted (a dangling leg carries no path)
    d == 2   the two legs merge into one series link
    d >= 3   the star is solved into a d-mesh by the star-mesh solver

Parallel links are merged with the parallel rule as soon as they appear and
links of measure 0 are dropped. Nodes cut off from both terminals are
dropped after every step.

The sponge-crossing estimate contracts each boundary into a meta node
(a clique of pi/4 links), takes the lowest node id of each boundary as
terminal and averages the final link over several randomized degradation
orders. Run i uses seed + i, so the aggregate does not depend on how runs
are scheduled over worker processes.

Order strategies:
    random      uniform random priority, but any node of current degree <= 2
                goes first (those steps are exact)
    min-degree  smallest current degree first, ties by random priority
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from modules import config
from modules.exceptions import ReductionError, SolverConvergenceError, StarTooLargeError, ValidationError
from modules.network import Network, boundary_representatives, contract_boundaries, detached_nodes, drop_disconnected
from modules.performance import parallel_map, timed
from modules.star_mesh import StarMeshSolver, mesh_pairs
from modules.utilities import derive_seed, stable_hash
from modules.weights import LinkWeight, RuleSystem

logger = logging.getLogger(__name__)

Chooser = Callable[[nx.Graph, Set[int]], int]


@dataclass(frozen=True)
class ReductionTrace:
    """
    Result of one reduction.

    order lists every interior node once, in the sequence it left the
    network; per_step_max_degree holds the star size degraded at each step
    (0 for nodes dropped as disconnected).
    """
    order: Tuple[int, ...]
    final_theta: LinkWeight
    per_step_max_degree: Tuple[int, ...]
    rules: RuleSystem
    terminals: Tuple[int, int]
    final_value: float

    @property
    def max_star(self) -> int:
        return max(self.per_step_max_degree, default=0)


@dataclass(frozen=True)
class SpongeCrossingEstimate:
    """Mean and population standard deviation of the final measure over runs."""
    mean: float
    std: float
    runs: int
    rules: RuleSystem
    failed_runs: int = 0
    values: Tuple[float, ...] = ()
    traces: Tuple[Dict, ...] = field(default=(), compare=False)

    @property
    def theta(self) -> LinkWeight:
        return self.rules.weight_of(self.mean)


class _RunTask(NamedTuple):
    rules: str
    tolerance: float
    n_max: int
    strategy: str
    net: Network
    terminals: Tuple[int, int]
    run: int
    run_seed: int


def _merge_edge(graph: nx.Graph, rules: RuleSystem, a: int, b: int, value: float) -> None:
    if value < config.SNAP_EPSILON or a == b:
        return
    if graph.has_edge(a, b):
        graph[a][b]["value"] = rules.parallel_pair(graph[a][b]["value"], value)
    else:
        graph.add_edge(a, b, value=value)


def working_graph(net: Network, rules: RuleSystem) -> nx.Graph:
    """Simple graph of merged link measures (attribute 'value')."""
    graph = nx.Graph()
    graph.add_nodes_from(net.nodes)
    for link in net.links:
        _merge_edge(graph, rules, link.a, link.b, rules.measure(link.weight))
    return graph


def random_chooser(priority: Sequence[int]) -> Chooser:
    """Degree <= 2 nodes first, otherwise by priority."""
    rank = {node: position for position, node in enumerate(priority)}

    def choose(graph: nx.Graph, remaining: Set[int]) -> int:
        easy = [node for node in remaining if graph.degree(node) <= 2]
        return min(easy or remaining, key=rank.__getitem__)
    return choose


def min_degree_chooser(priority: Sequence[int]) -> Chooser:
    """Smallest current degree first, ties by priority."""
    rank = {node: position for position, node in enumerate(priority)}

    def choose(graph: nx.Graph, remaining: Set[int]) -> int:
        return min(remaining, key=lambda node: (graph.degree(node), rank[node]))
    return choose


def fixed_chooser(order: Sequence[int]) -> Chooser:
    """Follow order exactly, skipping nodes that were already dropped."""
    iterator = iter(order)

    def choose(graph: nx.Graph, remaining: Set[int]) -> int:
        for node in iterator:
            if node in remaining:
                return node
        raise ValidationError(config.ERROR_MESSAGES["bad_order"], field_name="order")
    return choose


CHOOSERS: Dict[str, Callable[[Sequence[int]], Chooser]] = {
    "random": random_chooser,
    "min-degree": min_degree_chooser,
}


class ReductionEngine:
    """
    Degrades nodes with series, parallel and star-mesh steps.

    Attributes:
        rules: Rule system of the reduction
        solver: Star-mesh solver used for stars of three or more legs
        strategy: Order strategy name used by sponge_crossing
        logger: Optional logger
    """

    def __init__(self, rules: RuleSystem, tolerance: float = config.DEFAULT_TOLERANCE,
                 n_max: int = config.DEFAULT_N_MAX, strategy: str = config.DEFAULT_ORDER_STRATEGY,
                 logger: Optional[logging.Logger] = None):
        if strategy not in config.ORDER_STRATEGIES:
            raise ValidationError(f"Unknown order strategy: {strategy}", field_name="strategy",
                                  field_value=strategy)
        self.rules = RuleSystem.parse(rules)
        self.solver = StarMeshSolver(self.rules, tolerance=tolerance, n_max=n_max)
        self.strategy = strategy
        self.logger = logger

    # Single steps

    def degrade_node(self, net: Network, node: int, seed: int = config.DEFAULT_SEED) -> Network:
        """
        Degrade one node of a network.

        Raises:
            ValidationError: If node is unknown or a boundary terminal
            StarTooLargeError: If the merged star exceeds n_max
            SolverConvergenceError: If the star-mesh solve fails
        """
        if node not in net.nodes:
            raise ValidationError(config.ERROR_MESSAGES["unknown_node"].format(node=node, record="degrade"),
                                  field_name="node", field_value=node)
        if net.has_boundaries and node in boundary_representatives(net):
            raise ValidationError(config.ERROR_MESSAGES["terminal_degrade"].format(node=node),
                                  field_name="node", field_value=node)
        graph = working_graph(net, self.rules)
        self._degrade(graph, node, seed)
        return self._to_network(graph, net)

    def _degrade(self, graph: nx.Graph, node: int, seed: int) -> int:
        """Degrade node in place; returns the star size."""
        neighbors = sorted(graph.neighbors(node))
        legs = [graph[node][other]["value"] for other in neighbors]
        size = len(neighbors)
        graph.remove_node(node)
        if size <= 1:
            return size
        if size == 2:
            _merge_edge(graph, self.rules, neighbors[0], neighbors[1], legs[0] * legs[1])
            return size

        mesh = self.solver.solve_measures(legs, seed)
        for (a, b), value in zip(mesh_pairs(size), mesh):
            _merge_edge(graph, self.rules, neighbors[a], neighbors[b], float(value))
        return size

    @staticmethod
    def _prune(graph: nx.Graph, terminals: Tuple[int, int]) -> List[int]:
        """Drop nodes connected to neither terminal; returns them sorted."""
        dropped = detached_nodes(graph, terminals)
        graph.remove_nodes_from(dropped)
        return dropped

    def _to_network(self, graph: nx.Graph, template: Network) -> Network:
        links = [(a, b, LinkWeight(float(self.rules.measure_to_theta(data["value"]))))
                 for a, b, data in graph.edges(data=True)]
        remaining = set(graph.nodes)
        return Network.create(remaining, links, template.boundary_a & remaining, template.boundary_b & remaining)

    # Whole reductions

    def _reduce(self, graph: nx.Graph, terminals: Tuple[int, int], choose: Chooser, seed: int) -> ReductionTrace:
        remaining = set(graph.nodes) - set(terminals)
        order: List[int] = []
        degrees: List[int] = []

        def prune_detached():
            for node in self._prune(graph, terminals):
                if node in remaining:
                    remaining.discard(node)
                    order.append(node)
                    degrees.append(0)

        prune_detached()
        step = 0
        while remaining:
            node = choose(graph, remaining)
            remaining.discard(node)
            try:
                size = self._degrade(graph, node, derive_seed(seed, step))
            except (StarTooLargeError, SolverConvergenceError) as e:
                partial = {"order": tuple(order), "per_step_max_degree": tuple(degrees), "failed_node": node}
                raise ReductionError(f"Degrading node {node} failed: {e.message}",
                                     partial_trace=partial) from e
            order.append(node)
            degrees.append(size)
            step += 1
            prune_detached()

        s, t = terminals
        value = float(graph[s][t]["value"]) if graph.has_edge(s, t) else 0.0
        return ReductionTrace(order=tuple(order), final_theta=self.rules.weight_of(value),
                              per_step_max_degree=tuple(degrees), rules=self.rules,
                              terminals=terminals, final_value=value)

    @timed("reduction.reduce_to_pair")
    def reduce_to_pair(self, net: Network, terminals: Tuple[int, int], order: Sequence[int],
                       seed: int = config.DEFAULT_SEED) -> ReductionTrace:
        """
        Degrade the interior nodes in the given order.

        Raises:
            ValidationError: If order is not a permutation of the interior nodes
            ReductionError: If a step fails; carries the partial trace
        """
        s, t = terminals
        if s == t or s not in net.nodes or t not in net.nodes:
            raise ValidationError(f"Invalid terminals {terminals}", field_name="terminals", field_value=terminals)
        interior = set(net.nodes) - {s, t}
        if len(order) != len(interior) or set(order) != interior:
            raise ValidationError(config.ERROR_MESSAGES["bad_order"], field_name="order")
        return self._reduce(working_graph(net, self.rules), (s, t), fixed_chooser(order), seed)

    @timed("reduction.sponge_crossing")
    def sponge_crossing(self, net: Network, runs: int = config.DEFAULT_RUNS, seed: int = config.DEFAULT_SEED,
                        workers: Optional[int] = None) -> SpongeCrossingEstimate:
        """
        Average the two-terminal result over randomized degradation orders.

        Raises:
            ValidationError: If boundaries are missing or runs < 1
            ReductionError: If every run failed
        """
        if runs < 1:
            raise ValidationError("At least one run is required", field_name="runs", field_value=runs)
        contracted = contract_boundaries(net)
        terminals = boundary_representatives(contracted)
        contracted = drop_disconnected(contracted, terminals)
        tasks = [_RunTask(self.rules.value, self.solver.tolerance, self.solver.n_max, self.strategy,
                          contracted, terminals, run, seed + run) for run in range(runs)]
        records = parallel_map(_sponge_run, tasks, workers)

        succeeded = [record for record in records if "error" not in record]
        for record in records:
            if "error" in record and self.logger:
                self.logger.warning(f"Run {record['run']} failed: {record['error']}")
        if not succeeded:
            raise ReductionError(config.ERROR_MESSAGES["no_runs"].format(runs=runs), succeeded_runs=0)

        values = np.sort(np.array([record["value"] for record in succeeded]))
        estimate = SpongeCrossingEstimate(
            mean=float(np.mean(values)), std=float(np.std(values)), runs=len(succeeded), rules=self.rules,
            failed_runs=len(records) - len(succeeded), values=tuple(float(v) for v in values),
            traces=tuple(record for record in succeeded))
        if self.logger:
            self.logger.info(f"Sponge crossing ({self.rules.value}): mean={estimate.mean:.6f} "
                             f"std={estimate.std:.2e} over {estimate.runs} runs")
        return estimate


def _sponge_run(task: _RunTask) -> Dict:
    """One randomized reduction; top-level so it can run in a worker process."""
    start = time.perf_counter()
    engine = ReductionEngine(task.rules, task.tolerance, task.n_max, task.strategy)
    s, t = task.terminals
    interior = [node for node in task.net.nodes if node not in (s, t)]
    rng = np.random.default_rng(task.run_seed)
    priority = [interior[index] for index in rng.permutation(len(interior))]
    try:
        trace = engine._reduce(working_graph(task.net, engine.rules), task.terminals,
                               CHOOSERS[task.strategy](priority), task.run_seed)
    except ReductionError as e:
        return {"run": task.run, "error": e.message}
    return {
        "run": task.run,
        "value": trace.final_value,
        "order_hash": stable_hash(trace.order),
        "final_theta": trace.final_theta.theta,
        "max_star": trace.max_star,
        "wall_time": time.perf_counter() - start,
    }


# Module-level API

def degrade_node(net: Network, v: int, rules: RuleSystem, seed: int = config.DEFAULT_SEED) -> Network:
    """Degrade node v (see ReductionEngine.degrade_node)."""
    return ReductionEngine(rules).degrade_node(net, v, seed)


def reduce_to_pair(net: Network, terminals: Tuple[int, int], rules: RuleSystem, order: Sequence[int],
                   seed: int = config.DEFAULT_SEED) -> ReductionTrace:
    """
    Reduce net to a single link between the terminals.

    Examples:
        >>> w = LinkWeight.from_p(0.5)
        >>> chain = Network.create(range(4), [(0, 1, w), (1, 2, w), (2, 3, w)])
        >>> round(reduce_to_pair(chain, (0, 3), RuleSystem.CLASSICAL, [1, 2]).final_value, 12)
        0.125
    """
    return ReductionEngine(rules).reduce_to_pair(net, terminals, order, seed)


def sponge_crossing(net: Network, rules: RuleSystem, runs: int = config.DEFAULT_RUNS,
                    seed: int = config.DEFAULT_SEED, strategy: str = config.DEFAULT_ORDER_STRATEGY,
                    tolerance: float = config.DEFAULT_TOLERANCE, n_max: int = config.DEFAULT_N_MAX,
                    workers: Optional[int] = None,
                    logger: Optional[logging.Logger] = None) -> SpongeCrossingEstimate:
    """Sponge-crossing estimate between the boundaries of net."""
    engine = ReductionEngine(rules, tolerance=tolerance, n_max=n_max, strategy=strategy, logger=logger)
    return engine.sponge_crossing(net, runs, seed, workers)
