#!/usr/bin/env python3
"""
Star-mesh transform under a rule system.

An n-leaf star (legs w_1..w_n around an implicit root) is replaced by a
complete mesh on the n leaves whose pairwise net connectivities equal the
star's, i.e. for every pair i < j

    series(w_i, w_j) = net_{ij}(mesh)

There is no closed form for these n(n-1)/2 coupled equations, so they are
solved numerically with a Broyden quasi-Newton scheme in theta space.

Net connectivity on a mesh is itself defined by the same transform (a double
recursion): to get net_{ij} on an m-vertex mesh, the highest-indexed vertex
v other than i, j is taken as pivot; v's edges form an (m-1)-star that is
solved into an (m-1)-mesh, which is merged edgewise (parallel rule) with the
edges not touching v. The recursion ends at m = 2, where the single edge is
the answer. For m = 3 the pivot star has two legs and reduces to a series
composition, so the bottom level is exact.

Mesh vertices are 0-based and pairs are enumerated in lexicographic order,
(0, 1), (0, 2), ..., (n - 2, n - 1).

Internally everything below the public API works on measure values (p for
classical rules, c for ConPT) held in numpy vectors in pair order.

Solver:
    - initial mesh edge (i, j) = series(w_i, w_j)
    - initial Jacobian by forward differences (step 1e-6 in theta, backward
      near pi/4), then rank-one Broyden updates
    - backtracking on the residual infinity norm, projection to [0, pi/4]
    - up to MAX_SOLVER_RESTARTS restarts from seeded random meshes
    - nested solves run to a tighter tolerance and are warm-started from the
      previous solution and Jacobian at the same recursion slot
    - sub-results are memoized per top-level solve
    - for four or more legs the returned mesh is re-evaluated from scratch and
      must have a residual below the tolerance

Exact shortcuts:
    - a leg of measure 0 decouples: every mesh edge at that leaf is 0
    - a leg of measure 1 merges its leaf with the root: the mesh edges from
      that leaf equal the other legs and all remaining edges are 0
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from modules import config
from modules.exceptions import SolverConvergenceError, StarTooLargeError, ValidationError
from modules.performance import MemoCache, timed
from modules.utilities import derive_seed
from modules.weights import LinkWeight, RuleSystem

logger = logging.getLogger(__name__)

Slot = Tuple[Hashable, ...]


@functools.lru_cache(maxsize=None)
def mesh_pairs(n: int) -> Tuple[Tuple[int, int], ...]:
    """Vertex pairs of an n-vertex mesh in lexicographic order."""
    return tuple(itertools.combinations(range(n), 2))


@functools.lru_cache(maxsize=None)
def _pair_index(n: int) -> Dict[Tuple[int, int], int]:
    return {pair: index for index, pair in enumerate(mesh_pairs(n))}


def _pivot(n: int, i: int, j: int) -> int:
    """Highest-indexed vertex other than i < j."""
    pivot = n - 1
    while pivot in (i, j):
        pivot -= 1
    return pivot


def _snap(value: float) -> float:
    if value < config.SNAP_EPSILON:
        return 0.0
    if value > 1.0 - config.SNAP_EPSILON:
        return 1.0
    return value


def _snap_vector(values: np.ndarray) -> np.ndarray:
    values = np.clip(values, 0.0, 1.0)
    values[values < config.SNAP_EPSILON] = 0.0
    values[values > 1.0 - config.SNAP_EPSILON] = 1.0
    return values


# ============================================================================
# Public data types
# ============================================================================

@dataclass(frozen=True)
class StarGraph:
    """
    Legs of an n-leaf star; the root is implicit.

    Example:
        >>> StarGraph.from_thetas([0.3, 0.4, 0.5]).n
        3
    """
    legs: Tuple[LinkWeight, ...]

    def __post_init__(self):
        legs = tuple(leg if isinstance(leg, LinkWeight) else LinkWeight(leg) for leg in self.legs)
        if len(legs) < 2:
            raise ValidationError("A star needs at least two legs", field_name="legs", field_value=len(legs))
        object.__setattr__(self, "legs", legs)

    @classmethod
    def from_thetas(cls, thetas: Sequence[float]) -> "StarGraph":
        return cls(tuple(LinkWeight(float(theta)) for theta in thetas))

    @property
    def n(self) -> int:
        return len(self.legs)

    def measures(self, rules: RuleSystem) -> Tuple[float, ...]:
        return tuple(rules.measure(leg) for leg in self.legs)


@dataclass(frozen=True)
class MeshGraph:
    """
    Complete graph on n vertices with one weight per vertex pair.

    edges holds the weights in mesh_pairs(n) order.
    """
    n: int
    edges: Tuple[LinkWeight, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("A mesh needs at least two vertices", field_name="n", field_value=self.n)
        edges = tuple(e if isinstance(e, LinkWeight) else LinkWeight(e) for e in self.edges)
        if len(edges) != len(mesh_pairs(self.n)):
            raise ValidationError(f"Mesh on {self.n} vertices needs {len(mesh_pairs(self.n))} edges",
                                  field_name="edges", field_value=len(edges))
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_measures(cls, rules: RuleSystem, n: int, values: Sequence[float]) -> "MeshGraph":
        thetas = rules.measure_to_theta(np.asarray(values, dtype=float))
        return cls(n, tuple(LinkWeight(float(theta)) for theta in np.atleast_1d(thetas)))

    @classmethod
    def uniform(cls, n: int, weight: Union[LinkWeight, float]) -> "MeshGraph":
        weight = weight if isinstance(weight, LinkWeight) else LinkWeight(weight)
        return cls(n, (weight,) * len(mesh_pairs(n)))

    @property
    def weights(self) -> Dict[Tuple[int, int], LinkWeight]:
        """Symmetric view keyed by (i, j) with i < j."""
        return dict(zip(mesh_pairs(self.n), self.edges))

    def weight(self, i: int, j: int) -> LinkWeight:
        if i == j:
            raise ValidationError("Mesh has no self edges", field_name="pair", field_value=(i, j))
        return self.edges[_pair_index(self.n)[(min(i, j), max(i, j))]]

    def measures(self, rules: RuleSystem) -> np.ndarray:
        return _snap_vector(np.array([float(rules.theta_to_measure(e.theta)) for e in self.edges]))


# ============================================================================
# Solver
# ============================================================================

@dataclass
class _SolveContext:
    """State shared by the nested solves of one top-level call."""
    seed: int
    cache: MemoCache
    warm: Dict[Slot, Tuple[np.ndarray, Optional[np.ndarray]]] = field(default_factory=dict)
    evaluations: int = 0


class StarMeshSolver:
    """
    Solves star-mesh transforms for one rule system.

    Instances hold settings only; every call builds its own memo cache and
    warm-start table, so one solver can serve any number of threads.

    Attributes:
        rules: Rule system used for the series/parallel laws
        tolerance: Residual infinity-norm bound of returned meshes
        n_max: Largest star accepted
        max_iterations: Broyden iterations per attempt
        max_restarts: Random restarts after the series-guess attempt
        logger: Optional logger
    """

    def __init__(self, rules: RuleSystem, tolerance: float = config.DEFAULT_TOLERANCE,
                 n_max: int = config.DEFAULT_N_MAX,
                 max_iterations: int = config.MAX_SOLVER_ITERATIONS,
                 max_restarts: int = config.MAX_SOLVER_RESTARTS,
                 logger: Optional[logging.Logger] = None):
        if tolerance <= 0:
            raise ValidationError("Solver tolerance must be positive", field_name="tolerance", field_value=tolerance)
        low, high = config.VALIDATION_RULES["n_max"]
        if not low <= n_max <= high:
            raise ValidationError(f"n_max must lie in [{int(low)}, {int(high)}]", field_name="n_max",
                                  field_value=n_max)
        self.rules = RuleSystem.parse(rules)
        self.tolerance = tolerance
        self.n_max = n_max
        self.max_iterations = max_iterations
        self.max_restarts = max_restarts
        self.logger = logger

    # Public API

    @timed("star_mesh.solve")
    def solve(self, star: StarGraph, seed: int = config.DEFAULT_SEED) -> MeshGraph:
        """
        Solve a star into its equivalent mesh.

        Raises:
            StarTooLargeError: If star.n exceeds n_max
            SolverConvergenceError: If no attempt reaches the tolerance
        """
        values = self.solve_measures(star.measures(self.rules), seed)
        return MeshGraph.from_measures(self.rules, star.n, values)

    def solve_measures(self, legs: Sequence[float], seed: int = config.DEFAULT_SEED) -> np.ndarray:
        """
        Solve a star given as leg measures; returns mesh measures in pair order.

        Raises:
            StarTooLargeError: If the star exceeds n_max
            SolverConvergenceError: If no attempt reaches the tolerance or
                the returned mesh fails re-evaluation
        """
        legs = tuple(_snap(float(v)) for v in legs)
        n = len(legs)
        if n < 2:
            raise ValidationError("A star needs at least two legs", field_name="legs", field_value=n)
        if n > self.n_max:
            raise StarTooLargeError(config.ERROR_MESSAGES["star_too_large"].format(size=n, limit=self.n_max),
                                    star_size=n, limit=self.n_max)

        target = self.tolerance * config.SOLVER_TARGET_FRACTION
        context = self._new_context(seed)
        solution = self._solve_legs(legs, context, (), target, target)

        # 3-star connectivities are closed-form, so the solver's own residual is already exact;
        # extend this check if that ever changes
        if n > 3:
            check = self._residual(legs, solution, self._new_context(seed), (), self._nested(target))
            worst = float(np.max(np.abs(check)))
            if worst > self.tolerance:
                raise SolverConvergenceError(
                    config.ERROR_MESSAGES["solver_failed"].format(residual=worst),
                    best_residual=worst, star_size=n, seed=seed)
        logger.debug(f"Solved {n}-star with {context.evaluations} connectivity evaluations")
        return solution

    def connectivity(self, mesh: MeshGraph, i: int, j: int, seed: int = config.DEFAULT_SEED) -> float:
        """Net connectivity between mesh vertices i and j."""
        if i == j or not (0 <= i < mesh.n and 0 <= j < mesh.n):
            raise ValidationError(f"Invalid vertex pair ({i}, {j}) for a mesh of {mesh.n}",
                                  field_name="pair", field_value=(i, j))
        pair = (min(i, j), max(i, j))
        values = self._connectivities(mesh.measures(self.rules), mesh.n, [pair], self._new_context(seed), (),
                                      self._nested(self.tolerance))
        return values[pair]

    def residual(self, star: StarGraph, candidate: MeshGraph, seed: int = config.DEFAULT_SEED) -> np.ndarray:
        """series(w_i, w_j) - net_ij(candidate) for every pair, in pair order."""
        if candidate.n != star.n:
            raise ValidationError(f"Mesh has {candidate.n} vertices, star has {star.n} legs",
                                  field_name="candidate", field_value=candidate.n)
        legs = tuple(_snap(v) for v in star.measures(self.rules))
        return self._residual(legs, candidate.measures(self.rules), self._new_context(seed), (),
                              self._nested(self.tolerance))

    # Recursion

    def _new_context(self, seed: int) -> _SolveContext:
        return _SolveContext(seed=int(seed), cache=MemoCache(config.MAX_CACHE_SIZE))

    @staticmethod
    def _nested(tolerance: float) -> float:
        return max(tolerance * config.NESTED_TOLERANCE_FACTOR, config.NESTED_TOLERANCE_FLOOR)

    def _series(self, a: float, b: float) -> float:
        return _snap(a * b)

    def _residual(self, legs: Tuple[float, ...], mesh: np.ndarray, context: _SolveContext,
                  slot: Slot, tolerance: float) -> np.ndarray:
        n = len(legs)
        pairs = mesh_pairs(n)
        net = self._connectivities(mesh, n, pairs, context, slot, tolerance)
        return np.array([self._series(legs[i], legs[j]) - net[(i, j)] for i, j in pairs])

    def _connectivities(self, mesh: np.ndarray, n: int, wanted: Sequence[Tuple[int, int]],
                        context: _SolveContext, slot: Slot, tolerance: float) -> Dict[Tuple[int, int], float]:
        """Net connectivity of the wanted pairs of an n-vertex mesh."""
        context.evaluations += 1
        index = _pair_index(n)
        if n == 2:
            return {(0, 1): float(mesh[0])}

        parallel = self.rules.parallel_pair
        if n == 3:
            result = {}
            for i, j in wanted:
                pivot = 3 - i - j
                via = self._series(mesh[index[(min(i, pivot), max(i, pivot))]],
                                   mesh[index[(min(j, pivot), max(j, pivot))]])
                result[(i, j)] = parallel(float(mesh[index[(i, j)]]), via)
            return result

        groups: Dict[int, List[Tuple[int, int]]] = {}
        for i, j in wanted:
            groups.setdefault(_pivot(n, i, j), []).append((i, j))

        result = {}
        for pivot, members in sorted(groups.items(), reverse=True):
            others = [v for v in range(n) if v != pivot]
            legs = tuple(float(mesh[index[(min(v, pivot), max(v, pivot))]]) for v in others)
            sub_slot = slot + ((n, pivot),)
            sub_mesh = self._solve_legs(legs, context, sub_slot, tolerance, tolerance / config.NESTED_TOLERANCE_FACTOR)
            reduced = np.array([
                parallel(float(mesh[index[(others[a], others[b])]]), float(value))
                for (a, b), value in zip(mesh_pairs(n - 1), sub_mesh)
            ])
            position = {v: p for p, v in enumerate(others)}
            sub_wanted = [(position[i], position[j]) for i, j in members]
            sub_net = self._connectivities(reduced, n - 1, sub_wanted, context, sub_slot + ("reduced",),
                                           tolerance)
            for (i, j), sub_pair in zip(members, sub_wanted):
                result[(i, j)] = sub_net[sub_pair]
        return result

    def _solve_legs(self, legs: Tuple[float, ...], context: _SolveContext, slot: Slot,
                    tolerance: float, accept: float) -> np.ndarray:
        """
        Mesh measures for a star, trying shortcuts, then the memo, then Broyden.

        tolerance is the residual the iteration aims for; accept is the
        largest residual still returned when every attempt falls short.
        """
        n = len(legs)
        if n == 2:
            return np.array([self._series(legs[0], legs[1])])

        if min(legs) <= 0.0:
            result = np.zeros(len(mesh_pairs(n)))
            active = [i for i, value in enumerate(legs) if value > 0.0]
            if len(active) >= 2:
                sub = self._solve_legs(tuple(legs[i] for i in active), context, slot, tolerance, accept)
                index = _pair_index(n)
                for (a, b), value in zip(mesh_pairs(len(active)), sub):
                    result[index[(active[a], active[b])]] = value
            return result

        if max(legs) >= 1.0:
            hub = legs.index(1.0)
            return np.array([legs[j] if i == hub else legs[i] if j == hub else 0.0
                             for i, j in mesh_pairs(n)])

        key = (legs, tolerance)
        cached = context.cache.get(key)
        if cached is not None:
            return cached.copy()
        solution = self._broyden_solve(legs, context, slot, tolerance, accept)
        context.cache.put(key, solution)
        return solution.copy()

    # Broyden

    def _broyden_solve(self, legs: Tuple[float, ...], context: _SolveContext, slot: Slot,
                       tolerance: float, accept: float) -> np.ndarray:
        n = len(legs)
        pairs = mesh_pairs(n)
        nested = self._nested(tolerance)

        def residual(thetas: np.ndarray) -> np.ndarray:
            mesh = _snap_vector(np.asarray(self.rules.theta_to_measure(thetas), dtype=float))
            return self._residual(legs, mesh, context, slot, nested)

        series_guess = np.array([self._series(legs[i], legs[j]) for i, j in pairs])
        starts: List[Tuple[np.ndarray, Optional[np.ndarray]]] = []
        warm = context.warm.get(slot)
        if warm is not None and warm[0].size == len(pairs):
            starts.append(warm)
        starts.append((np.asarray(self.rules.measure_to_theta(series_guess), dtype=float), None))

        rng = np.random.default_rng(derive_seed(context.seed, n, len(slot)))
        low, high = config.RESTART_THETA_RANGE
        restarts = ((rng.uniform(low, high, size=len(pairs)), None) for _ in range(self.max_restarts))

        best_norm = float("inf")
        best: Optional[Tuple[np.ndarray, Optional[np.ndarray]]] = None
        for attempt, (x0, jacobian) in enumerate(itertools.chain(starts, restarts)):
            x, jacobian, norm = self._broyden(residual, x0, jacobian, tolerance)
            if norm < best_norm:
                best_norm, best = norm, (x, jacobian)
            if norm <= accept:
                break
            if self.logger:
                self.logger.debug(f"{n}-star attempt {attempt} stopped at residual {norm:.3e}")

        if best is None or best_norm > accept:
            raise SolverConvergenceError(config.ERROR_MESSAGES["solver_failed"].format(residual=best_norm),
                                         best_residual=best_norm, star_size=n, seed=context.seed)
        context.warm[slot] = best
        return _snap_vector(np.asarray(self.rules.theta_to_measure(best[0]), dtype=float))

    def _broyden(self, func: Callable[[np.ndarray], np.ndarray], x0: np.ndarray,
                 jacobian: Optional[np.ndarray], tolerance: float) -> Tuple[np.ndarray, Optional[np.ndarray], float]:
        """
        One quasi-Newton attempt.

        Returns the last iterate, the Jacobian estimate and the residual
        infinity norm there.
        """
        x = np.clip(np.array(x0, dtype=float), 0.0, config.THETA_MAX)
        r = func(x)
        norm = float(np.max(np.abs(r)))
        if norm <= tolerance:
            return x, jacobian, norm

        fresh = jacobian is None
        J = self._finite_difference_jacobian(func, x, r) if fresh else jacobian.copy()
        for _ in range(self.max_iterations):
            dx = self._newton_step(J, r)
            step = 1.0
            for _ in range(config.MAX_BACKTRACK_STEPS):
                x_new = np.clip(x + step * dx, 0.0, config.THETA_MAX)
                r_new = func(x_new)
                new_norm = float(np.max(np.abs(r_new)))
                if new_norm < norm:
                    break
                step *= 0.5
            else:
                # the secant model has gone stale
                if fresh:
                    return x, J, norm
                J = self._finite_difference_jacobian(func, x, r)
                fresh = True
                continue

            s = x_new - x
            y = r_new - r
            x, r, norm = x_new, r_new, new_norm
            if norm <= tolerance:
                return x, J, norm
            if float(np.max(np.abs(s))) <= config.STEP_TOLERANCE:
                return x, J, norm
            J = J + np.outer(y - J @ s, s) / float(s @ s)
            fresh = False
        return x, J, norm

    @staticmethod
    def _newton_step(J: np.ndarray, r: np.ndarray) -> np.ndarray:
        try:
            dx = np.linalg.solve(J, -r)
            if np.all(np.isfinite(dx)):
                return dx
        except np.linalg.LinAlgError:
            pass
        return np.linalg.lstsq(J, -r, rcond=None)[0]

    @staticmethod
    def _finite_difference_jacobian(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                                    r: np.ndarray) -> np.ndarray:
        J = np.empty((r.size, x.size))
        h = config.FINITE_DIFFERENCE_STEP
        for k in range(x.size):
            shifted = x.copy()
            step = h if x[k] + h <= config.THETA_MAX else -h
            shifted[k] += step
            J[:, k] = (func(shifted) - r) / step
        return J


# ============================================================================
# Module-level API
# ============================================================================

def pairwise_connectivity(mesh: MeshGraph, rules: RuleSystem, i: int, j: int,
                          seed: int = config.DEFAULT_SEED) -> float:
    """
    Net connectivity between vertices i and j of a mesh.

    Examples:
        >>> mesh = MeshGraph.uniform(3, LinkWeight.from_p(0.5))
        >>> round(pairwise_connectivity(mesh, RuleSystem.CLASSICAL, 0, 1), 6)
        0.625
    """
    return StarMeshSolver(rules).connectivity(mesh, i, j, seed)


def star_mesh_residual(star: StarGraph, candidate: MeshGraph, rules: RuleSystem,
                       seed: int = config.DEFAULT_SEED) -> np.ndarray:
    """Residual vector of a candidate mesh, in the rule system's measure."""
    return StarMeshSolver(rules).residual(star, candidate, seed)


def solve_star_mesh(star: StarGraph, rules: RuleSystem, seed: int = config.DEFAULT_SEED,
                    tolerance: float = config.DEFAULT_TOLERANCE,
                    n_max: int = config.DEFAULT_N_MAX) -> MeshGraph:
    """
    Solve a star-mesh transform.

    Examples:
        >>> mesh = solve_star_mesh(StarGraph.from_thetas([0.3, 0.5]), RuleSystem.CONPT, seed=1)
        >>> mesh.n, len(mesh.edges)
        (2, 1)
    """
    return StarMeshSolver(rules, tolerance=tolerance, n_max=n_max).solve(star, seed)
