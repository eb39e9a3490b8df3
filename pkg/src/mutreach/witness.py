"""Witnesses of mutual reachability over structurally-reversible unfoldings.

A set of configurations is mutually reachable exactly when some
structurally-reversible unfolding hard-codes their small coordinates,
every configuration can pump its large coordinates up and down via short
cycle labels, and all pairwise differences fall in the path-displacement
cosets.  The checker validates such certificates; the searcher enumerates
unfoldings; the synthesizer turns an accepted certificate into firing
words.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .lattice import lattice_contains
from .net import Blocked, PetriNet, displacement, fire, hurdle
from .steinitz import prefix_safe_reorder, prune_zero_subsequences
from .unfolding import (
    EnumLimits,
    EnumStats,
    Unfolding,
    UnfoldingError,
    UnfoldingPath,
    coset_between,
    elementary_path,
    embed_simple_cycle,
    enumerate_unfoldings,
    lattice_of_unfolding,
    reverse_path_for,
    simple_cycles,
    unfolding_from_sccc,
    zero_full_state_cycle,
)
from .intlinalg import IntMatrix, solve_integer
from .vectors import Vec, norm_inf, restrict, vec, vge, vsub, zero


class WitnessRejected(ValueError):
    def __init__(self, condition: str, detail=None):
        self.condition = condition
        self.detail = detail
        super().__init__(f"{condition}" if detail is None else f"{condition}: {detail}")


class SynthesisError(ValueError):
    pass


def exact_off_threshold(net: PetriNet, g: Unfolding) -> int:
    """The pumping threshold m r^3 (3 d r m)^d for this unfolding."""
    m, d, r = net.norm, net.dim, g.size
    return m * r**3 * (3 * d * r * m) ** d


@dataclass(frozen=True)
class PumpingParams:
    """Search/certificate thresholds.

    `off_threshold` None means the exact per-unfolding value, in which
    case accepted witnesses are certified (the sufficiency direction
    applies); scaled-down values make verdicts heuristic.  `state_bound`
    and `cycle_len` only trade completeness, never soundness.
    """

    state_bound: int
    cycle_len: int
    off_threshold: int | None = None
    walk_budget: int = 20000

    def __post_init__(self):
        if self.state_bound < 1 or self.cycle_len < 0:
            raise WitnessRejected("invalid parameters")

    def threshold_for(self, net: PetriNet, g: Unfolding) -> int:
        if self.off_threshold is None:
            return exact_off_threshold(net, g)
        return self.off_threshold

    def certified_for(self, net: PetriNet, g: Unfolding) -> bool:
        return self.threshold_for(net, g) >= exact_off_threshold(net, g)


def exact_state_bound(dim: int, m: int) -> tuple[str, int | None]:
    """The exact state-norm bound (3dm)^((d+2)^(2d+1)), symbolically and,
    when it fits comfortably in memory, as an integer."""
    base = 3 * dim * max(m, 1)
    expo = (dim + 2) ** (2 * dim + 1)
    symbolic = f"{base}^{dim + 2}^{2 * dim + 1} = {base}^{expo}"
    if expo * base.bit_length() <= 2_000_000:
        return symbolic, base**expo
    return symbolic, None


# --- upward-closed pumping sets ---------------------------------------------


@dataclass(frozen=True)
class BasisElement:
    vector: Vec
    enter_word: tuple[int, ...]  # labels a cycle on q; fires into c
    leave_word: tuple[int, ...]  # labels a cycle on q; fires from c


@dataclass(frozen=True)
class UpwardBasis:
    state: Vec
    elements: tuple[BasisElement, ...]
    truncated: bool


def _cycle_words(g: Unfolding, q: Vec, max_len: int, budget: int) -> tuple[list[tuple[int, ...]], bool]:
    """All words labelling cycles on q with length <= max_len (walks may
    revisit states), deterministic order, capped by budget."""
    words: list[tuple[int, ...]] = [()]
    truncated = False
    out: dict[Vec, list] = {}
    for t in g.transitions:
        out.setdefault(t[0], []).append(t)
    frontier: list[tuple[Vec, tuple[int, ...]]] = [(q, ())]
    explored = 1
    for _ in range(max_len):
        nxt = []
        for state, word in frontier:
            for t in out.get(state, ()):
                explored += 1
                if explored > budget:
                    truncated = True
                    break
                w = word + (t[1],)
                if t[2] == q:
                    words.append(w)
                nxt.append((t[2], w))
            if truncated:
                break
        if truncated:
            break
        frontier = nxt
    return words, truncated


def _antichain_min(items: list[tuple[Vec, object]]) -> list[tuple[Vec, object]]:
    """Minimal elements under componentwise order; first witness kept."""
    items = sorted(items, key=lambda it: (sum(it[0]), it[0]))
    kept: list[tuple[Vec, object]] = []
    for v, w in items:
        if not any(vge(v, u) for u, _ in kept):
            kept.append((v, w))
    return kept


def upward_basis(g: Unfolding, q: Vec, params: PumpingParams) -> UpwardBasis:
    """Minimal elements of the pumping set at state q.

    A configuration c with c restricted to I equal to q belongs to the
    set when some pair (u, v) of cycle words on q admits firings
    c-minus --u--> c --v--> c-plus with both end configurations at least
    the off-I threshold outside I.  The componentwise requirement on c
    splits as max(f(u), g(v)), so minimal antichains for f and g combine
    pairwise.
    """
    if q not in set(g.states):
        raise WitnessRejected("state not in unfolding", q)
    net = g.net
    tau = params.threshold_for(net, g)
    off = [i for i in range(net.dim) if i not in g.index_set]
    words, truncated = _cycle_words(g, q, params.cycle_len, params.walk_budget)

    f_items: list[tuple[Vec, object]] = []
    g_items: list[tuple[Vec, object]] = []
    for w in words:
        acts = net.word(w)
        h = hurdle(acts, dim=net.dim)
        delta = displacement(acts, dim=net.dim)
        f_vec = tuple(max(h[i] + delta[i], delta[i] + tau) for i in off)
        g_vec = tuple(max(h[i], -delta[i] + tau) for i in off)
        f_items.append((f_vec, w))
        g_items.append((g_vec, w))

    combos: list[tuple[Vec, object]] = []
    for fv, u in _antichain_min(f_items):
        for gv, v in _antichain_min(g_items):
            combined = tuple(max(a, b) for a, b in zip(fv, gv))
            combos.append((combined, (u, v)))
    elements = []
    # entries stay below max(|q|, 2*len*m, len*m + tau): the cycle-length
    # analogue of the basis norm bound
    cap = max(norm_inf(q), 2 * params.cycle_len * net.norm, params.cycle_len * net.norm + tau)
    for off_vec, (u, v) in _antichain_min(combos):
        full = [0] * net.dim
        for pos, i in enumerate(g.index_set):
            full[i] = q[pos]
        for pos, i in enumerate(off):
            full[i] = off_vec[pos]
        assert max(full, default=0) <= cap
        elements.append(BasisElement(tuple(full), u, v))
    elements.sort(key=lambda e: e.vector)
    return UpwardBasis(q, tuple(elements), truncated)


def membership_upward(basis: Iterable[BasisElement] | UpwardBasis, c: Vec) -> bool:
    elems = basis.elements if isinstance(basis, UpwardBasis) else tuple(basis)
    return any(vge(c, e.vector) for e in elems)


# --- witness checking ---------------------------------------------------------


@dataclass(frozen=True)
class PumpCertificate:
    config: Vec
    state: Vec
    enter_word: tuple[int, ...]
    leave_word: tuple[int, ...]
    c_minus: Vec
    c_plus: Vec
    basis_vector: Vec


@dataclass(frozen=True)
class PairCertificate:
    source: Vec
    target: Vec
    offset: Vec  # displacement of the elementary witness path


@dataclass(frozen=True)
class MutualWitness:
    unfolding: Unfolding
    configs: tuple[Vec, ...]
    pumps: tuple[PumpCertificate, ...]
    pairs: tuple[PairCertificate, ...]
    params: PumpingParams
    certified: bool
    within_state_bound: bool
    words: dict = field(default_factory=dict, compare=False)  # (x, y) -> action indices


def check_witness(
    net: PetriNet, configs: Iterable[Vec], g: Unfolding, params: PumpingParams
) -> MutualWitness:
    """Accept iff all restrictions are states, every configuration passes
    pumping-set membership at its own state, and every ordered pair's
    difference lies in the corresponding coset."""
    cs = tuple(sorted(set(vec(c) for c in configs)))
    if not cs:
        raise WitnessRejected("empty configuration set")
    for c in cs:
        if len(c) != net.dim or any(x < 0 for x in c):
            raise WitnessRejected("not a configuration", c)
    state_set = set(g.states)
    bases: dict[Vec, UpwardBasis] = {}
    pumps = []
    for c in cs:
        q = restrict(c, g.index_set)
        if q not in state_set:
            raise WitnessRejected("restriction is not a state", c)
        if q not in bases:
            bases[q] = upward_basis(g, q, params)
        elem = next((e for e in bases[q].elements if vge(c, e.vector)), None)
        if elem is None:
            raise WitnessRejected("configuration outside the pumping set", c)
        enter = net.word(elem.enter_word)
        c_minus = vsub(c, displacement(enter, dim=net.dim))
        c_plus = fire(c, net.word(elem.leave_word))
        assert fire(c_minus, enter) == c
        pumps.append(
            PumpCertificate(c, q, elem.enter_word, elem.leave_word, c_minus, c_plus, elem.vector)
        )
    pairs = []
    for x in cs:
        for y in cs:
            if x == y:
                continue
            coset = coset_between(g, restrict(x, g.index_set), restrict(y, g.index_set))
            if not lattice_contains(coset.representation, vsub(vsub(y, x), coset.offset)):
                raise WitnessRejected("difference outside the displacement coset", (x, y))
            pairs.append(PairCertificate(x, y, coset.offset))
    return MutualWitness(
        unfolding=g,
        configs=cs,
        pumps=tuple(pumps),
        pairs=tuple(pairs),
        params=params,
        certified=params.certified_for(net, g),
        within_state_bound=g.state_norm() < params.state_bound,
    )


# --- search -------------------------------------------------------------------


@dataclass
class SearchResult:
    status: str  # found | not-found-exhausted | not-found-budget
    witness: MutualWitness | None = None
    examined: int = 0


def singleton_unfolding(net: PetriNet, c: Vec) -> Unfolding:
    """One full-index state with the self-loops of all enabled
    zero-displacement actions."""
    index_set = tuple(range(net.dim))
    loops = [
        (c, i, c)
        for i, a in enumerate(net.actions)
        if a.displacement == zero(net.dim) and vge(c, a.pre)
    ]
    return Unfolding(net, index_set, (c,), tuple(loops))


def search_witness(
    net: PetriNet,
    x: Vec,
    y: Vec,
    params: PumpingParams,
    budget: int = 10000,
    limits: EnumLimits | None = None,
) -> SearchResult:
    """Enumerate structurally-reversible unfoldings under the parameters
    and return the first accepted witness for {x, y}.

    `not-found-exhausted` means the bounded space was fully searched; it
    refutes mutual reachability only when the parameters dominate the
    exact thresholds, which they never do at desk scale, so callers
    should cross-check with the reachability oracle.
    """
    x, y = vec(x), vec(y)
    if x == y:
        g = singleton_unfolding(net, x)
        return SearchResult("found", check_witness(net, (x,), g, params), examined=1)
    limits = limits or EnumLimits()
    examined = 0
    truncated = False
    dims = range(net.dim)
    for size in range(net.dim + 1):
        for index_set in itertools.combinations(dims, size):
            stats = EnumStats()
            for g in enumerate_unfoldings(net, index_set, params.state_bound, limits, stats):
                examined += 1
                if examined > budget:
                    return SearchResult("not-found-budget", examined=examined)
                sset = set(g.states)
                if restrict(x, index_set) not in sset or restrict(y, index_set) not in sset:
                    continue
                try:
                    w = check_witness(net, (x, y), g, params)
                except WitnessRejected:
                    continue
                return SearchResult("found", w, examined=examined)
            truncated = truncated or stats.truncated
    return SearchResult(
        "not-found-budget" if truncated else "not-found-exhausted", examined=examined
    )


# --- path synthesis -----------------------------------------------------------


def _decompose_into_simple(g: Unfolding, path: UnfoldingPath) -> list[UnfoldingPath]:
    """Excise simple cycles from a cycle until nothing remains."""
    pieces: list[UnfoldingPath] = []
    stack_states: list[Vec] = [path.source]
    stack_trans: list = []
    for t in path.transitions:
        stack_trans.append(t)
        q = t[2]
        if q in stack_states:
            i = stack_states.index(q)
            cut = len(stack_states) - 1 - i  # transitions since state i
            piece = tuple(stack_trans[len(stack_trans) - 1 - cut :])
            pieces.append(UnfoldingPath(q, piece))
            del stack_trans[len(stack_trans) - 1 - cut :]
            del stack_states[i + 1 :]
        else:
            stack_states.append(q)
    assert not stack_trans, "input was not a cycle"
    return pieces


def _reverse_cycle(g: Unfolding, cycle: UnfoldingPath, bound: int) -> UnfoldingPath:
    """A cycle with the negated displacement, via per-edge return paths."""
    parts: list[UnfoldingPath] = []
    for t in reversed(cycle.transitions):
        parts.append(reverse_path_for(g, t, bound))
    out = parts[0]
    for p in parts[1:]:
        out = out.concat(p)
    assert out.displacement(g.net) == tuple(-v for v in cycle.displacement(g.net))
    return out


def synthesize_path(
    net: PetriNet, x: Vec, y: Vec, witness: MutualWitness, reverse_bound: int = 64
) -> tuple[int, ...]:
    """A word firing x to y, assembled from the witness: pump up at x,
    walk an elementary path, repay the lattice difference by reordered
    full-state cycles, and pump down into y.

    A firing failure reports the first blocked step; it signals that the
    witness thresholds were below the exact ones, not that the
    certificate structure is wrong.
    """
    x, y = vec(x), vec(y)
    g = witness.unfolding
    index_set = g.index_set
    if x == y:
        return ()
    pump = {p.config: p for p in witness.pumps}
    if x not in pump or y not in pump:
        raise SynthesisError("witness does not cover the endpoints")
    px, py = pump[x], pump[y]
    alpha = px.leave_word  # x --alpha--> x_plus
    beta = py.enter_word  # y_minus --beta--> y
    x_plus = px.c_plus
    y_minus = py.c_minus
    p, q = restrict(x, index_set), restrict(y, index_set)
    pi = elementary_path(g, p, q)
    target = vsub(vsub(y_minus, x_plus), pi.displacement(net))
    rep = lattice_of_unfolding(g)
    if not lattice_contains(rep, target):
        raise SynthesisError("pumped difference left the cycle lattice")

    theta_word: tuple[int, ...] = ()
    if target != zero(net.dim):
        cycles, truncated = simple_cycles(g)
        if truncated:
            raise SynthesisError("simple-cycle enumeration truncated")
        mat = IntMatrix.from_rows(
            [[c.displacement(net)[i] for c in cycles] for i in range(net.dim)]
        )
        coeffs = solve_integer(mat, list(target))
        if coeffs is None:
            raise SynthesisError("no integer cycle decomposition of the difference")
        pieces: list[UnfoldingPath] = []
        for c, h in zip(cycles, coeffs):
            if h > 0:
                pieces.extend([c] * h)
            elif h < 0:
                rev = _reverse_cycle(g, c, reverse_bound)
                for piece in _decompose_into_simple(g, rev):
                    pieces.extend([piece] * (-h))
        bag = [piece.displacement(net) for piece in pieces]
        keep = prune_zero_subsequences(bag)
        pieces = [pieces[j] for j in keep]
        bag = [bag[j] for j in keep]
        order = prefix_safe_reorder(bag)
        pieces = [pieces[j] for j in order]
        if pieces:
            zero_cycle = zero_full_state_cycle(g, q)
            for piece in pieces:
                theta = embed_simple_cycle(g, zero_cycle, piece, anchor=q)
                theta_word = theta_word + theta.word

    word = alpha + pi.word + theta_word + beta
    try:
        final = fire(x, net.word(word))
    except Blocked as exc:
        raise SynthesisError(
            f"synthesized word blocked at step {exc.step} (thresholds too small "
            "to guarantee firing, certificate structure unaffected)"
        ) from exc
    if final != y:
        raise SynthesisError(f"synthesized word ends at {final}, expected {y}")
    return word


# --- completeness probe --------------------------------------------------------


@dataclass
class ProbeReport:
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def completeness_probe(net: PetriNet, box) -> ProbeReport:
    """For every reliable mutual-reachability class inside the box, the
    full-index unfolding built from the class itself must pass the
    witness check with degenerate parameters."""
    from .oracle import BoundedStateSpace

    space = BoundedStateSpace(net, box)
    full = tuple(range(net.dim))
    checked = 0
    failures = []
    for comp in space.components():
        if not space.reliable(comp):
            continue
        checked += 1
        configs = sorted(comp)
        try:
            g = unfolding_from_sccc(net, configs, full)
            bound = max(norm_inf(c) for c in configs) + 1
            params = PumpingParams(state_bound=bound, cycle_len=0, off_threshold=None)
            check_witness(net, configs, g, params)
        except (WitnessRejected, UnfoldingError) as exc:
            failures.append((configs, str(exc)))
    return ProbeReport(checked, failures)
