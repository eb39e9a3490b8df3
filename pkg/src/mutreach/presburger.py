"""Compiling mutual reachability and bottom membership into formulas.

The mutual-reachability relation compiles to a disjunction of tuples
(a, b, v, gamma): x and y are related when x >= a, y >= b, and y - x - v
lies in the lattice presented by gamma.  Bottom membership compiles to
tuples (r, gamma, phi) with phi a threshold formula evaluated over a
whole lattice coset; the universal quantifier is decided pointwise, not
eliminated.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

from .formula import (
    And,
    BoolConst,
    CompareAtom,
    DivAtom,
    Formula,
    Implies,
    Or,
    conj_ge,
    eval_formula,
    from_sexpr,
    max_threshold,
    smt_term,
    to_sexpr,
    to_smtlib,
)
from .intlinalg import IntMatrix, hermite_normal_form, kernel_basis
from .lattice import LatticeRepresentation, lattice_contains
from .net import PetriNet
from .ratlp import FEASIBLE, solve_standard
from .unfolding import (
    EnumLimits,
    EnumStats,
    Unfolding,
    elementary_path,
    enumerate_unfoldings,
    bounded_states,
    i_fires,
    lattice_of_unfolding,
    _connected_subsets,
    _strongly_connected,
    _circulation_rows,
)
from .ratlp import positive_circulation
from .vectors import Vec, restrict, vadd, vec, vge, vsub
from .witness import PumpingParams, upward_basis


class CompileError(ValueError):
    pass


# --- mutual reachability -------------------------------------------------------


@dataclass(frozen=True)
class Disjunct:
    lower_x: Vec  # a
    lower_y: Vec  # b
    shift: Vec  # v
    rep: LatticeRepresentation


@dataclass(frozen=True)
class MutualFormula:
    dim: int
    disjuncts: tuple[Disjunct, ...]
    provenance: str  # certified | heuristic
    complete: bool  # enumeration ran without truncation
    state_bound: int
    cycle_len: int

    def holds(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return eval_mutual(self, x, y)


def _compile_mutual_for_index_set(
    net: PetriNet, params: PumpingParams, limits: EnumLimits, index_set: tuple[int, ...]
) -> tuple[list[Disjunct], bool, bool]:
    """One enumeration shard: disjuncts (ordered), certified, complete."""
    disjuncts: list[Disjunct] = []
    certified = True
    complete = True
    stats = EnumStats()
    for g in enumerate_unfoldings(net, index_set, params.state_bound, limits, stats):
        certified = certified and params.certified_for(net, g)
        rep = lattice_of_unfolding(g, limits.simple_cycle_cap)
        bases = {}
        for q in g.states:
            basis = upward_basis(g, q, params)
            complete = complete and not basis.truncated
            bases[q] = basis
        for p in g.states:
            for q in g.states:
                v = elementary_path(g, p, q).displacement(net)
                for ea in bases[p].elements:
                    for eb in bases[q].elements:
                        disjuncts.append(Disjunct(ea.vector, eb.vector, v, rep))
    return disjuncts, certified, complete and not stats.truncated


def _shard_entry(payload):
    net, params, limits, index_set = payload
    return _compile_mutual_for_index_set(net, params, limits, index_set)


def compile_mutual(
    net: PetriNet,
    params: PumpingParams,
    limits: EnumLimits | None = None,
    workers: int = 1,
) -> MutualFormula:
    """One disjunct per unfolding, state pair, and pumping-basis pair.

    Basis elements stand in for the full threshold grid: x >= a for some
    basis element a is exactly membership in the upward-closed pumping
    set.  One canonical elementary path per state pair suffices because
    all path displacements fall in the same lattice coset.

    Shards are index sets; merge order is canonical, so the output is
    identical for any worker count.
    """
    limits = limits or EnumLimits()
    dims = range(net.dim)
    index_sets = [
        index_set
        for size in range(net.dim + 1)
        for index_set in itertools.combinations(dims, size)
    ]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(
                pool.map(_shard_entry, [(net, params, limits, ix) for ix in index_sets])
            )
    else:
        shards = [_compile_mutual_for_index_set(net, params, limits, ix) for ix in index_sets]

    disjuncts: list[Disjunct] = []
    seen: set = set()
    certified = True
    complete = True
    for shard_disjuncts, shard_certified, shard_complete in shards:
        certified = certified and shard_certified
        complete = complete and shard_complete
        for d in shard_disjuncts:
            key = (d.lower_x, d.lower_y, d.shift, d.rep)
            if key not in seen:
                seen.add(key)
                disjuncts.append(d)
    return MutualFormula(
        dim=net.dim,
        disjuncts=tuple(disjuncts),
        provenance="certified" if certified else "heuristic",
        complete=complete,
        state_bound=params.state_bound,
        cycle_len=params.cycle_len,
    )


def eval_mutual(f: MutualFormula, x: Sequence[int], y: Sequence[int]) -> bool:
    x, y = vec(x), vec(y)
    if len(x) != f.dim or len(y) != f.dim:
        raise CompileError(f"expected dimension {f.dim}")
    for d in f.disjuncts:
        if vge(x, d.lower_x) and vge(y, d.lower_y) and lattice_contains(
            d.rep, vsub(vsub(y, x), d.shift)
        ):
            return True
    return False


def mutual_to_ast(f: MutualFormula) -> Formula:
    """Tree over variables x0..x{d-1}, y0..y{d-1}."""
    d = f.dim
    total = 2 * d
    parts = []
    for dis in f.disjuncts:
        atoms: list = []
        for i in range(d):
            coeffs = tuple(1 if j == i else 0 for j in range(total))
            atoms.append(CompareAtom(coeffs, ">=", dis.lower_x[i]))
        for i in range(d):
            coeffs = tuple(1 if j == d + i else 0 for j in range(total))
            atoms.append(CompareAtom(coeffs, ">=", dis.lower_y[i]))
        for n, a in dis.rep.pairs:
            # a . (y - x - v) == 0 mod n (or exactly 0 when n == 0)
            coeffs = tuple(-a[j] if j < d else a[j - d] for j in range(total))
            constant = -sum(a[j] * dis.shift[j] for j in range(d))
            if n == 0:
                atoms.append(CompareAtom(coeffs, "==", -constant))
            else:
                atoms.append(DivAtom(coeffs, constant, n))
        parts.append(And(tuple(atoms)))
    return Or(tuple(parts))


def mutual_var_names(dim: int) -> list[str]:
    return [f"x{i}" for i in range(dim)] + [f"y{i}" for i in range(dim)]


def mutual_to_smtlib(f: MutualFormula) -> str:
    names = mutual_var_names(f.dim)
    return to_smtlib(mutual_to_ast(f), names, logic="QF_LIA", nonneg=names)


def mutual_to_json(f: MutualFormula) -> str:
    payload = {
        "kind": "mutual",
        "dim": f.dim,
        "provenance": f.provenance,
        "complete": f.complete,
        "state_bound": f.state_bound,
        "cycle_len": f.cycle_len,
        "disjuncts": [
            {
                "a": list(d.lower_x),
                "b": list(d.lower_y),
                "v": list(d.shift),
                "gamma": [[n, list(a)] for n, a in d.rep.pairs],
            }
            for d in f.disjuncts
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def mutual_to_text(f: MutualFormula) -> str:
    lines = [
        "kind mutual",
        f"dim {f.dim}",
        f"provenance {f.provenance}",
        f"complete {int(f.complete)}",
        f"state-bound {f.state_bound}",
        f"cycle-len {f.cycle_len}",
    ]
    for d in f.disjuncts:
        lines.append("disjunct")
        lines.append("a " + " ".join(map(str, d.lower_x)))
        lines.append("b " + " ".join(map(str, d.lower_y)))
        lines.append("v " + " ".join(map(str, d.shift)))
        for n, a in d.rep.pairs:
            lines.append(f"pair {n} : " + " ".join(map(str, a)))
        lines.append("end")
    return "\n".join(lines) + "\n"


def mutual_from_text(text: str) -> MutualFormula:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != "kind mutual":
        raise CompileError("not a mutual formula file")
    header = {}
    pos = 1
    while pos < len(lines) and lines[pos] != "disjunct":
        key, _, val = lines[pos].partition(" ")
        header[key] = val
        pos += 1
    dim = int(header["dim"])
    disjuncts = []
    while pos < len(lines):
        if lines[pos] != "disjunct":
            raise CompileError(f"expected 'disjunct', got {lines[pos]!r}")
        pos += 1
        fields = {}
        pairs = []
        while lines[pos] != "end":
            key, _, val = lines[pos].partition(" ")
            if key == "pair":
                n_text, _, coeff_text = val.partition(":")
                pairs.append((int(n_text), vec(int(t) for t in coeff_text.split())))
            else:
                fields[key] = vec(int(t) for t in val.split())
            pos += 1
        pos += 1
        disjuncts.append(
            Disjunct(
                fields["a"], fields["b"], fields["v"], LatticeRepresentation(dim, tuple(pairs))
            )
        )
    return MutualFormula(
        dim=dim,
        disjuncts=tuple(disjuncts),
        provenance=header.get("provenance", "heuristic"),
        complete=bool(int(header.get("complete", "0"))),
        state_bound=int(header.get("state-bound", "1")),
        cycle_len=int(header.get("cycle-len", "0")),
    )


# --- bottom configurations ------------------------------------------------------


@dataclass(frozen=True)
class BottomTuple:
    """One certificate shape for bottom membership.

    A configuration matching `state` on `index_set` is accepted when it
    dominates some `membership` vector (it can pump at its own state;
    this is the induction base that makes acceptance sound) and the
    implication formula holds across the whole lattice coset.
    """

    index_set: tuple[int, ...]
    state: Vec  # r
    rep: LatticeRepresentation
    membership: tuple  # pumping basis at r, checked once at the point itself
    implications: tuple  # ((antecedent vectors), (consequent vectors)) per transition
    offsets: tuple  # (state, v_p) pairs, documentation of the construction
    phi: Formula = field(compare=False)

    @property
    def threshold(self) -> int:
        return max_threshold(self.phi)


@dataclass(frozen=True)
class BottomFormula:
    dim: int
    tuples: tuple[BottomTuple, ...]
    provenance: str
    complete: bool


def _forward_closed_unfoldings(
    net: PetriNet, index_set: tuple[int, ...], state_bound: int, limits: EnumLimits
) -> tuple[list[Unfolding], bool]:
    """Forward-closed structurally-reversible unfoldings: the transition
    set is forced (all enabled edges), so only the state set is searched."""
    all_states = bounded_states(index_set, state_bound)
    state_set = set(all_states)
    edges_all = []
    for p in all_states:
        for idx, a in enumerate(net.actions):
            q = i_fires(a, index_set, p)
            if q is not None:
                edges_all.append((p, idx, q))
    pos = {s: i for i, s in enumerate(all_states)}
    undirected: list[set[int]] = [set() for _ in all_states]
    for p, _, q in edges_all:
        if p != q and q in state_set:
            undirected[pos[p]].add(pos[q])
            undirected[pos[q]].add(pos[p])
    found: list[Unfolding] = []
    truncated = False
    for subset in _connected_subsets(undirected, limits.max_states):
        states = tuple(all_states[i] for i in subset)
        sset = set(states)
        edges = []
        closed = True
        for p in states:
            for idx, a in enumerate(net.actions):
                q = i_fires(a, index_set, p)
                if q is None:
                    continue
                if q not in sset:
                    closed = False
                    break
                edges.append((p, idx, q))
            if not closed:
                break
        if not closed:
            continue
        if len(states) > 1 and not _strongly_connected(states, edges)[0]:
            continue
        g = Unfolding(net, index_set, states, tuple(sorted(edges)))
        if positive_circulation(_circulation_rows(g), len(g.transitions)) is None:
            continue
        found.append(g)
        if len(found) >= limits.max_unfoldings:
            truncated = True
            break
    return found, truncated


def compile_bottom(
    net: PetriNet, params: PumpingParams, limits: EnumLimits | None = None
) -> BottomFormula:
    """Tuples (r, gamma, phi) over forward-closed reversible unfoldings;
    phi demands that whenever a shifted configuration covers a source
    pumping basis and the action's precondition, the successor covers the
    target basis.  Each tuple also records the pumping basis at r itself:
    without that one-point membership check the implications can hold
    vacuously for configurations that escape below every basis."""
    limits = limits or EnumLimits()
    tuples: list[BottomTuple] = []
    certified = True
    complete = True
    dims = range(net.dim)
    for size in range(net.dim + 1):
        for index_set in itertools.combinations(dims, size):
            gs, truncated = _forward_closed_unfoldings(net, index_set, params.state_bound, limits)
            complete = complete and not truncated
            for g in gs:
                certified = certified and params.certified_for(net, g)
                rep = lattice_of_unfolding(g, limits.simple_cycle_cap)
                bases = {}
                for q in g.states:
                    basis = upward_basis(g, q, params)
                    complete = complete and not basis.truncated
                    bases[q] = basis
                for r in g.states:
                    offsets = tuple(
                        (p, elementary_path(g, r, p).displacement(net)) for p in g.states
                    )
                    vp = dict(offsets)
                    implications = []
                    for (p, aidx, q) in g.transitions:
                        a = net.actions[aidx]
                        ants = tuple(
                            sorted(
                                tuple(max(m.vector[i], a.pre[i]) - vp[p][i] for i in range(net.dim))
                                for m in bases[p].elements
                            )
                        )
                        cons = tuple(
                            sorted(
                                tuple(m.vector[i] - a.displacement[i] - vp[p][i] for i in range(net.dim))
                                for m in bases[q].elements
                            )
                        )
                        implications.append((ants, cons))
                    phi = And(
                        tuple(
                            Implies(
                                Or(tuple(conj_ge(w, net.dim) for w in ants)),
                                Or(tuple(conj_ge(w, net.dim) for w in cons)),
                            )
                            for ants, cons in implications
                        )
                    )
                    tuples.append(
                        BottomTuple(
                            index_set=tuple(index_set),
                            state=r,
                            rep=rep,
                            membership=tuple(m.vector for m in bases[r].elements),
                            implications=tuple(implications),
                            offsets=offsets,
                            phi=phi,
                        )
                    )
    return BottomFormula(
        dim=net.dim,
        tuples=tuple(tuples),
        provenance="certified" if certified else "heuristic",
        complete=complete,
    )


# --- deciding the universal over a lattice ---------------------------------------


def lattice_basis(rep: LatticeRepresentation) -> list[Vec]:
    """Integer basis of the represented lattice, via the kernel of the
    constraint system with one auxiliary column per divisibility pair."""
    d = rep.dim
    div_pairs = [(n, a) for n, a in rep.pairs if n > 0]
    eq_pairs = [(n, a) for n, a in rep.pairs if n == 0]
    aux = len(div_pairs)
    rows = []
    for _, a in eq_pairs:
        rows.append(list(a) + [0] * aux)
    for j, (n, a) in enumerate(div_pairs):
        rows.append(list(a) + [-n if jj == j else 0 for jj in range(aux)])
    if not rows:
        rows = [[0] * (d + aux)]
    kb = kernel_basis(IntMatrix.from_rows(rows))
    spanning = [tuple(v[:d]) for v in kb]
    spanning = [v for v in spanning if any(v)]
    if not spanning:
        return []
    mat = IntMatrix.from_rows([[v[i] for v in spanning] for i in range(d)])
    res = hermite_normal_form(mat)
    full = mat.matmul(res.u)
    return [tuple(full.at(i, j) for i in range(d)) for j in range(res.rank)]


def _interval_intersect(
    lo: object, hi: object, new_lo: object = None, new_hi: object = None
) -> tuple[object, object]:
    if new_lo is not None:
        lo = new_lo if lo is None else max(lo, new_lo)
    if new_hi is not None:
        hi = new_hi if hi is None else min(hi, new_hi)
    return lo, hi


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def lattice_box_feasible(
    basis: list[Vec], lows: Sequence[int], highs: Sequence[int | None], budget: int = 20000
) -> bool | None:
    """Is there a lattice point v with lows <= v and v <= highs where set?

    Exact for rank <= 1 and for bounded higher-rank instances; None means
    the search was inconclusive (unbounded rank >= 2 with no point found
    in the scanned window).
    """
    d = len(lows)
    for i in range(d):
        if highs[i] is not None and lows[i] > highs[i]:
            return False
    if not basis:
        return all(lows[i] <= 0 and (highs[i] is None or highs[i] >= 0) for i in range(d))
    rank = len(basis)
    if rank == 1:
        b = basis[0]
        t_lo: object = None
        t_hi: object = None
        for i in range(d):
            c = b[i]
            if c == 0:
                if lows[i] > 0 or (highs[i] is not None and highs[i] < 0):
                    return False
                continue
            if c > 0:
                t_lo, t_hi = _interval_intersect(t_lo, t_hi, new_lo=_ceil_div(lows[i], c))
                if highs[i] is not None:
                    t_lo, t_hi = _interval_intersect(t_lo, t_hi, new_hi=highs[i] // c)
            else:
                t_lo, t_hi = _interval_intersect(t_lo, t_hi, new_hi=lows[i] // c)
                if highs[i] is not None:
                    t_lo, t_hi = _interval_intersect(t_lo, t_hi, new_lo=_ceil_div(highs[i], c))
        if t_lo is None or t_hi is None:
            return True
        return t_lo <= t_hi

    # rank >= 2: rational feasibility, then bounded integer enumeration.
    feasible, ranges = _rational_box_ranges(basis, lows, highs)
    if not feasible:
        return False
    if ranges is None:
        return _window_scan(basis, lows, highs, radius=8)
    total = 1
    for lo, hi in ranges:
        total *= max(0, hi - lo + 1)
        if total > budget:
            return _window_scan(basis, lows, highs, radius=8)
    for t in itertools.product(*[range(lo, hi + 1) for lo, hi in ranges]):
        v = tuple(sum(basis[j][i] * t[j] for j in range(rank)) for i in range(d))
        if all(lows[i] <= v[i] and (highs[i] is None or v[i] <= highs[i]) for i in range(d)):
            return True
    return False


def _rational_box_ranges(basis, lows, highs):
    """(feasible, integer ranges per t coordinate or None if unbounded)."""
    import math

    d = len(lows)
    rank = len(basis)
    # variables: t = tp - tn (2*rank), one slack per inequality
    ineqs = []  # (coeffs over t, sense, const): sum >= const or <= const
    for i in range(d):
        coeffs = [basis[j][i] for j in range(rank)]
        ineqs.append((coeffs, ">=", lows[i]))
        if highs[i] is not None:
            ineqs.append((coeffs, "<=", highs[i]))
    nslack = len(ineqs)
    nvars = 2 * rank + nslack
    rows = []
    rhs = []
    for k, (coeffs, sense, const) in enumerate(ineqs):
        row = [0] * nvars
        for j in range(rank):
            row[j] = coeffs[j]
            row[rank + j] = -coeffs[j]
        row[2 * rank + k] = -1 if sense == ">=" else 1
        rows.append(row)
        rhs.append(const)
    status, _, _ = solve_standard(rows, rhs)
    if status != FEASIBLE:
        return False, None
    ranges = []
    for j in range(rank):
        bounds = []
        for maximize in (False, True):
            objective = [0] * nvars
            objective[j] = 1
            objective[rank + j] = -1
            st, _, val = solve_standard(rows, rhs, objective, maximize=maximize)
            if st != FEASIBLE:
                return True, None
            bounds.append(val)
        lo = math.ceil(bounds[0])
        hi = math.floor(bounds[1])
        ranges.append((lo, hi))
    return True, ranges


def _window_scan(basis, lows, highs, radius: int) -> bool | None:
    d = len(lows)
    rank = len(basis)
    for t in itertools.product(range(-radius, radius + 1), repeat=rank):
        v = tuple(sum(basis[j][i] * t[j] for j in range(rank)) for i in range(d))
        if all(lows[i] <= v[i] and (highs[i] is None or v[i] <= highs[i]) for i in range(d)):
            return True
    return None


def _violation_exists(tup: BottomTuple, c: Vec, budget: int = 50000) -> bool | None:
    """Does some lattice point v make phi(c + v) false?

    The negation of phi is a disjunction over transitions of (antecedent
    holds and consequent fails); each consequent failure picks one short
    coordinate per target basis element, giving an axis box intersected
    with the lattice.
    """
    basis = lattice_basis(tup.rep)
    d = len(c)
    saw_inconclusive = False
    for ants, cons in tup.implications:
        for w in ants:
            lows = [w[i] - c[i] for i in range(d)]
            choice_sets = []
            for wq in cons:
                choice_sets.append([(i, wq[i] - 1 - c[i]) for i in range(d)])
            for combo in itertools.product(*choice_sets) if choice_sets else [()]:
                highs: list[int | None] = [None] * d
                ok = True
                for i, ub in combo:
                    highs[i] = ub if highs[i] is None else min(highs[i], ub)
                for i in range(d):
                    if highs[i] is not None and lows[i] > highs[i]:
                        ok = False
                        break
                if not ok:
                    continue
                res = lattice_box_feasible(basis, lows, highs, budget)
                if res is True:
                    return True
                if res is None:
                    saw_inconclusive = True
    return None if saw_inconclusive else False


def eval_bottom(
    f: BottomFormula, c: Sequence[int], method: str = "exact", radius: int = 8
) -> bool | None:
    """True / False / None (inconclusive).

    `exact` decides the per-tuple universal by lattice-box feasibility;
    `enumerate` scans lattice points of norm <= radius for a violation
    and cannot certify success on infinite lattices.
    """
    c = vec(c)
    if len(c) != f.dim:
        raise CompileError(f"expected dimension {f.dim}")
    saw_inconclusive = False
    for tup in f.tuples:
        if restrict(c, tup.index_set) != tup.state:
            continue
        if not any(vge(c, m) for m in tup.membership):
            continue
        if method == "exact":
            vio = _violation_exists(tup, c)
        elif method == "enumerate":
            vio = _violation_by_enumeration(tup, c, radius)
        else:
            raise CompileError(f"unknown method {method!r}")
        if vio is False:
            return True
        if vio is None:
            saw_inconclusive = True
    return None if saw_inconclusive else False


def _lattice_points_in_window(basis: list[Vec], radius: int, budget: int = 200000):
    if not basis:
        yield tuple()
        return
    rank = len(basis)
    d = len(basis[0])
    feasible, ranges = _rational_box_ranges(
        basis, [-radius] * d, [radius] * d
    )
    if not feasible:
        return
    if ranges is None:
        ranges = [(-radius, radius)] * rank
    count = 0
    for t in itertools.product(*[range(lo, hi + 1) for lo, hi in ranges]):
        count += 1
        if count > budget:
            return
        v = tuple(sum(basis[j][i] * t[j] for j in range(rank)) for i in range(d))
        if all(abs(x) <= radius for x in v):
            yield v


def _violation_by_enumeration(tup: BottomTuple, c: Vec, radius: int) -> bool | None:
    basis = lattice_basis(tup.rep)
    d = len(c)
    if not basis:
        return not eval_formula(tup.phi, c)
    for v in _lattice_points_in_window(basis, radius):
        point = vadd(c, v) if v else c
        if not eval_formula(tup.phi, point):
            return True
    return None  # no violation seen, but the lattice is infinite


# --- serialization ---------------------------------------------------------------


def bottom_to_text(f: BottomFormula) -> str:
    lines = [
        "kind bottom",
        f"dim {f.dim}",
        f"provenance {f.provenance}",
        f"complete {int(f.complete)}",
    ]
    for t in f.tuples:
        lines.append("tuple")
        lines.append("index-set " + " ".join(map(str, t.index_set)))
        lines.append("state " + " ".join(map(str, t.state)))
        for n, a in t.rep.pairs:
            lines.append(f"pair {n} : " + " ".join(map(str, a)))
        for m in t.membership:
            lines.append("member " + " ".join(map(str, m)))
        for ants, cons in t.implications:
            lines.append(
                "imp "
                + ";".join(" ".join(map(str, w)) for w in ants)
                + " => "
                + ";".join(" ".join(map(str, w)) for w in cons)
            )
        for p, off in t.offsets:
            lines.append(
                "offset " + " ".join(map(str, p)) + " : " + " ".join(map(str, off))
            )
        lines.append("phi " + to_sexpr(t.phi))
        lines.append("end")
    return "\n".join(lines) + "\n"


def bottom_from_text(text: str) -> BottomFormula:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != "kind bottom":
        raise CompileError("not a bottom formula file")
    header = {}
    pos = 1
    while pos < len(lines) and lines[pos] != "tuple":
        key, _, val = lines[pos].partition(" ")
        header[key] = val
        pos += 1
    dim = int(header["dim"])
    tuples = []
    while pos < len(lines):
        assert lines[pos] == "tuple"
        pos += 1
        index_set: tuple[int, ...] = ()
        state: Vec = ()
        pairs = []
        membership = []
        imps = []
        offsets = []
        phi = BoolConst(True)
        while lines[pos] != "end":
            key, _, val = lines[pos].partition(" ")
            if key == "index-set":
                index_set = tuple(int(t) for t in val.split())
            elif key == "state":
                state = vec(int(t) for t in val.split())
            elif key == "pair":
                n_text, _, coeff_text = val.partition(":")
                pairs.append((int(n_text), vec(int(t) for t in coeff_text.split())))
            elif key == "member":
                membership.append(vec(int(t) for t in val.split()))
            elif key == "imp":
                lhs, _, rhs = val.partition("=>")
                ants = tuple(
                    vec(int(t) for t in part.split()) for part in lhs.split(";") if part.strip()
                )
                cons = tuple(
                    vec(int(t) for t in part.split()) for part in rhs.split(";") if part.strip()
                )
                imps.append((ants, cons))
            elif key == "offset":
                st_text, _, off_text = val.partition(":")
                offsets.append(
                    (vec(int(t) for t in st_text.split()), vec(int(t) for t in off_text.split()))
                )
            elif key == "phi":
                phi = from_sexpr(val)
            else:
                raise CompileError(f"unknown field {key!r}")
            pos += 1
        pos += 1
        tuples.append(
            BottomTuple(
                index_set=index_set,
                state=state,
                rep=LatticeRepresentation(dim, tuple(pairs)),
                membership=tuple(membership),
                implications=tuple(imps),
                offsets=tuple(offsets),
                phi=phi,
            )
        )
    return BottomFormula(
        dim=dim,
        tuples=tuple(tuples),
        provenance=header.get("provenance", "heuristic"),
        complete=bool(int(header.get("complete", "0"))),
    )


def bottom_to_json(f: BottomFormula) -> str:
    payload = {
        "kind": "bottom",
        "dim": f.dim,
        "provenance": f.provenance,
        "complete": f.complete,
        "tuples": [
            {
                "index_set": list(t.index_set),
                "state": list(t.state),
                "gamma": [[n, list(a)] for n, a in t.rep.pairs],
                "membership": [list(m) for m in t.membership],
                "implications": [
                    {"antecedents": [list(w) for w in ants], "consequents": [list(w) for w in cons]}
                    for ants, cons in t.implications
                ],
                "phi": to_sexpr(t.phi),
            }
            for t in f.tuples
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def bottom_to_smtlib(f: BottomFormula) -> str:
    """Quantified export: per tuple, c restricted to I equals r and every
    lattice point v keeps phi(c + v) true."""
    d = f.dim
    c_names = [f"c{i}" for i in range(d)]
    v_names = [f"v{i}" for i in range(d)]
    parts = []
    for t in f.tuples:
        eqs = [
            f"(= {c_names[i]} {t.state[pos]})" for pos, i in enumerate(t.index_set)
        ]
        member_c = _smt_or(
            [
                _smt_and([f"(>= {c_names[i]} {m[i]})" for i in range(d)])
                for m in t.membership
            ]
        )
        eqs.append(member_c)
        member = []
        for n, a in t.rep.pairs:
            term_parts = [f"(* {a[i]} {v_names[i]})" for i in range(d) if a[i] != 0]
            term = "(+ " + " ".join(term_parts) + ")" if len(term_parts) > 1 else (
                term_parts[0] if term_parts else "0"
            )
            if n == 0:
                member.append(f"(= {term} 0)")
            else:
                member.append(f"(= (mod {term} {n}) 0)")
        shifted = [f"(+ {c} {v})" for c, v in zip(c_names, v_names)]
        phi_term = smt_term(t.phi, shifted)
        body = f"(=> {_smt_and(member)} {phi_term})"
        quantified = (
            "(forall (" + " ".join(f"({v} Int)" for v in v_names) + ") " + body + ")"
        )
        parts.append(_smt_and(eqs + [quantified]))
    lines = ["(set-logic LIA)"]
    for n in c_names:
        lines.append(f"(declare-const {n} Int)")
        lines.append(f"(assert (>= {n} 0))")
    lines.append(f"(assert {_smt_or(parts)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def _smt_and(parts: list[str]) -> str:
    if not parts:
        return "true"
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def _smt_or(parts: list[str]) -> str:
    if not parts:
        return "false"
    if len(parts) == 1:
        return parts[0]
    return "(or " + " ".join(parts) + ")"


# --- the quantified wrapper over the mutual formula -------------------------------


@dataclass(frozen=True)
class BottomWrapper:
    """For every action, configurations reachable in one step from a
    mutual partner stay mutual partners; universally quantified over the
    intermediate configuration."""

    net: PetriNet
    mutual: MutualFormula

    def bounded_eval(self, c: Sequence[int], radius: int) -> bool:
        """Instantiate the quantifier over the box [0, radius]^d only;
        explicitly heuristic."""
        c = vec(c)
        d = self.net.dim
        for x in itertools.product(range(radius + 1), repeat=d):
            for a in self.net.actions:
                if eval_mutual(self.mutual, c, x) and vge(x, a.pre):
                    if not eval_mutual(self.mutual, c, vadd(x, a.displacement)):
                        return False
        return True

    def to_smtlib(self) -> str:
        d = self.net.dim
        c_names = [f"c{i}" for i in range(d)]
        x_names = [f"x{i}" for i in range(d)]
        ast = mutual_to_ast(self.mutual)
        conj = []
        for a in self.net.actions:
            step = [f"(+ {x} {delta})" if delta else x for x, delta in zip(x_names, a.displacement)]
            phi_cx = smt_term(ast, c_names + x_names)
            phi_cstep = smt_term(ast, c_names + step)
            pre = _smt_and([f"(>= {x} {p})" for x, p in zip(x_names, a.pre)])
            conj.append(f"(=> (and {phi_cx} {pre}) {phi_cstep})")
        nonneg = _smt_and([f"(>= {x} 0)" for x in x_names])
        body = f"(=> {nonneg} {_smt_and(conj)})"
        quantified = "(forall (" + " ".join(f"({x} Int)" for x in x_names) + ") " + body + ")"
        lines = ["(set-logic LIA)"]
        for n in c_names:
            lines.append(f"(declare-const {n} Int)")
            lines.append(f"(assert (>= {n} 0))")
        lines.append(f"(assert {quantified})")
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


def bottom_wrapper(net: PetriNet, mutual: MutualFormula) -> BottomWrapper:
    return BottomWrapper(net, mutual)
