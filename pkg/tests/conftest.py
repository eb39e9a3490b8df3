"""Shared fixtures and independent test oracles.

The oracles here deliberately avoid the code paths they check: span
membership uses an incremental triangular basis with xgcd elimination
(never the comatrix construction), determinants use the permutation
expansion, reversibility uses a plain displacement-bounded search.
"""

from __future__ import annotations

import itertools

import pytest

from mutreach.net import Action, PetriNet


@pytest.fixture(scope="session")
def token_swap():
    return PetriNet(2, (Action((1, 0), (0, 1)), Action((0, 1), (1, 0))))


@pytest.fixture(scope="session")
def consumer():
    return PetriNet(1, (Action((1,), (0,)),))


@pytest.fixture(scope="session")
def ring():
    return PetriNet(
        2, (Action((2, 0), (1, 1)), Action((1, 1), (0, 2)), Action((0, 2), (2, 0)))
    )


@pytest.fixture(scope="session")
def mixed3():
    return PetriNet(
        3,
        (
            Action((1, 0, 0), (0, 1, 0)),
            Action((0, 1, 0), (1, 0, 0)),
            Action((0, 0, 1), (0, 0, 0)),
        ),
    )


@pytest.fixture(scope="session")
def fixture_nets(token_swap, consumer, ring, mixed3):
    return {
        "token_swap": token_swap,
        "consumer": consumer,
        "ring": ring,
        "mixed3": mixed3,
    }


# --- independent span oracle ---------------------------------------------------


def _xgcd(a, b):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


class IntSpan:
    """Triangular integer basis from incremental xgcd row elimination.

    Rows are kept with their expressions over the original generators so
    membership witnesses can be reconstructed exactly.
    """

    def __init__(self, dim: int, num_gens: int):
        self.dim = dim
        self.num_gens = num_gens
        self.rows: dict[int, tuple[list[int], list[int]]] = {}  # pivot col -> (vec, expr)

    def add(self, vector, gen_index: int):
        vec = list(vector)
        expr = [0] * self.num_gens
        expr[gen_index] = 1
        self._insert(vec, expr)

    def _insert(self, vec, expr):
        for j in range(self.dim):
            if vec[j] == 0:
                continue
            if j not in self.rows:
                self.rows[j] = (vec, expr)
                return
            rvec, rexpr = self.rows[j]
            a, b = rvec[j], vec[j]
            if b % a == 0:
                q = b // a
                vec = [x - q * y for x, y in zip(vec, rvec)]
                expr = [x - q * y for x, y in zip(expr, rexpr)]
            else:
                g, s, t = _xgcd(a, b)
                new_vec = [s * x + t * y for x, y in zip(rvec, vec)]
                new_expr = [s * x + t * y for x, y in zip(rexpr, expr)]
                alt_vec = [(-b // g) * x + (a // g) * y for x, y in zip(rvec, vec)]
                alt_expr = [(-b // g) * x + (a // g) * y for x, y in zip(rexpr, expr)]
                self.rows[j] = (new_vec, new_expr)
                vec, expr = alt_vec, alt_expr

    def witness(self, target):
        """Coefficients z over the generators with sum z_j v_j = target,
        or None when the target is outside the span."""
        vec = list(target)
        expr = [0] * self.num_gens
        for j in range(self.dim):
            if vec[j] == 0:
                continue
            if j not in self.rows:
                return None
            rvec, rexpr = self.rows[j]
            if vec[j] % rvec[j] != 0:
                return None
            q = vec[j] // rvec[j]
            vec = [x - q * y for x, y in zip(vec, rvec)]
            expr = [x - q * y for x, y in zip(expr, rexpr)]
        if any(vec):
            return None
        return [-e for e in expr]

    def contains(self, target) -> bool:
        return self.witness(target) is not None


def span_oracle(generators, dim: int) -> IntSpan:
    span = IntSpan(dim, len(generators))
    for idx, g in enumerate(generators):
        span.add(g, idx)
    return span


def span_membership_mask(span: IntSpan, points):
    """Vectorized membership for an array of points (numpy int64), by
    the same triangular reduction IntSpan.contains performs."""
    import numpy as np

    pts = np.asarray(points, dtype=np.int64)
    residual = pts.copy()
    alive = np.ones(len(pts), dtype=bool)
    for j in sorted(span.rows):
        vec, _ = span.rows[j]
        v = np.asarray(vec, dtype=np.int64)
        col = residual[:, j]
        divisible = col % v[j] == 0
        alive &= divisible
        q = np.where(divisible, col // v[j], 0)
        residual = residual - q[:, None] * v[None, :]
    alive &= (residual == 0).all(axis=1)
    return alive


def representation_membership_mask(rep, points):
    """Vectorized lattice-representation membership for an array of
    points (numpy int64)."""
    import numpy as np

    pts = np.asarray(points, dtype=np.int64)
    alive = np.ones(len(pts), dtype=bool)
    for n, a in rep.pairs:
        dots = pts @ np.asarray(a, dtype=np.int64)
        if n == 0:
            alive &= dots == 0
        else:
            alive &= dots % n == 0
    return alive


def enumerated_span_points(generators, dim: int, coeff_bound: int, box_bound: int):
    """Span points within the box, from coefficients in [-b, b], via a
    meet-in-the-middle sweep (numpy)."""
    import numpy as np

    gens = [tuple(g) for g in generators]
    if not gens:
        return {(0,) * dim} if box_bound >= 0 else set()
    half = len(gens) // 2
    rng = np.arange(-coeff_bound, coeff_bound + 1, dtype=np.int64)

    def side(gs):
        sums = np.zeros((1, dim), dtype=np.int64)
        for g in gs:
            arr = np.asarray(g, dtype=np.int64)
            sums = (sums[:, None, :] + rng[None, :, None] * arr[None, None, :]).reshape(-1, dim)
            sums = np.unique(sums, axis=0)
        return sums

    left = side(gens[:half])
    right = side(gens[half:])
    total = (left[:, None, :] + right[None, :, :]).reshape(-1, dim)
    mask = (np.abs(total) <= box_bound).all(axis=1)
    pts = np.unique(total[mask], axis=0)
    return {tuple(int(x) for x in row) for row in pts}


# --- other independent oracles ---------------------------------------------------


def leibniz_determinant(rows) -> int:
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def brute_force_small_set(lam, index_set, configs):
    """Union of all small subsets, by exhaustive subset scan."""
    index_set = tuple(sorted(index_set))
    best = ()
    for r in range(len(index_set) + 1):
        for js in itertools.combinations(index_set, r):
            if all(c[j] < lam[len(js)] for j in js for c in configs):
                if len(js) > len(best):
                    best = js
    return tuple(sorted(best))


def definitional_reversible(g, length_budget: int, disp_bound: int) -> bool:
    """Every transition has a zero-sum return path, by plain search over
    (state, displacement) pairs within the budget."""
    net = g.net
    for p, a, q in g.transitions:
        delta0 = net.actions[a].displacement
        goal = (p, tuple(0 for _ in range(net.dim)))
        frontier = {(q, delta0)}
        seen = set(frontier)
        found = goal in seen
        for _ in range(length_budget):
            if found:
                break
            nxt = set()
            for state, disp in frontier:
                for p2, a2, q2 in g.transitions:
                    if p2 != state:
                        continue
                    nd = tuple(
                        x + y for x, y in zip(disp, net.actions[a2].displacement)
                    )
                    if max(abs(x) for x in nd) > disp_bound:
                        continue
                    node = (q2, nd)
                    if node == goal:
                        found = True
                        break
                    if node not in seen:
                        seen.add(node)
                        nxt.add(node)
                if found:
                    break
            frontier = nxt
            if not frontier:
                break
        if not found:
            return False
    return True
