"""I-unfoldings: strongly-connected graphs over partial configurations.

States are restrictions of configurations to a coordinate subset I; edges
carry net actions consistent with the restricted firing relation.  An
unfolding is structurally reversible when every edge's displacement can
be cancelled by a return path, equivalently when a strictly positive
circulation with zero total displacement exists (Euler's condition).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Iterator, Sequence

from .lattice import LatticeCoset, LatticeRepresentation, representation_from_generators
from .net import Action, PetriNet
from .ratlp import max_positive_support, positive_circulation
from .vectors import Vec, norm_inf, restrict, vadd, zero

State = Vec  # values over the unfolding's index set, in index order
Transition = tuple[State, int, State]  # (source, action index, target)


class UnfoldingError(ValueError):
    def __init__(self, reason: str, detail=None):
        self.reason = reason
        self.detail = detail
        super().__init__(reason if detail is None else f"{reason}: {detail}")


def i_fires(action: Action, index_set: Sequence[int], p: State) -> State | None:
    """Target of p under the action on I-configurations, or None."""
    pre = restrict(action.pre, index_set)
    if any(x < y for x, y in zip(p, pre, strict=True)):
        return None
    delta = restrict(action.displacement, index_set)
    return vadd(p, delta)


def _strongly_connected(states: Sequence[State], transitions: Sequence[Transition]) -> tuple[bool, tuple | None]:
    """Tarjan over the induced graph; on failure returns a witness pair."""
    order = {s: i for i, s in enumerate(states)}
    succ: list[list[int]] = [[] for _ in states]
    for p, _, q in transitions:
        succ[order[p]].append(order[q])
    n = len(states)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    roots: list[int] = []

    for start in range(n):
        if index[start] != -1:
            continue
        work = [(start, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for j in range(pi, len(succ[v])):
                w = succ[v][j]
                if index[w] == -1:
                    work[-1] = (v, j + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                roots.append(v)
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    if w == v:
                        break
    if len(roots) == 1:
        return True, None
    return False, (states[roots[0]], states[roots[1]])


@dataclass(frozen=True)
class Unfolding:
    net: PetriNet
    index_set: tuple[int, ...]
    states: tuple[State, ...]
    transitions: tuple[Transition, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "index_set", tuple(self.index_set))
        object.__setattr__(self, "states", tuple(sorted(self.states)))
        object.__setattr__(self, "transitions", tuple(sorted(self.transitions)))

    def __hash__(self):
        return hash((self.index_set, self.states, self.transitions))

    @property
    def size(self) -> int:
        return len(self.states)

    def action(self, idx: int) -> Action:
        return self.net.actions[idx]

    def out_edges(self, p: State) -> list[Transition]:
        return [t for t in self.transitions if t[0] == p]

    def state_norm(self) -> int:
        return max((norm_inf(s) for s in self.states), default=0)


@dataclass(frozen=True)
class UnfoldingPath:
    """A chain of transitions; `start` pins the endpoints of empty paths."""

    start: State
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        cur = self.start
        for p, _, q in self.transitions:
            if p != cur:
                raise UnfoldingError("path transitions do not chain", (cur, p))
            cur = q

    @property
    def source(self) -> State:
        return self.start

    @property
    def target(self) -> State:
        return self.transitions[-1][2] if self.transitions else self.start

    @property
    def word(self) -> tuple[int, ...]:
        return tuple(a for _, a, _ in self.transitions)

    def __len__(self) -> int:
        return len(self.transitions)

    def displacement(self, net: PetriNet) -> Vec:
        total = zero(net.dim)
        for _, a, _ in self.transitions:
            total = vadd(total, net.actions[a].displacement)
        return total

    def states_visited(self) -> set[State]:
        seen = {self.start}
        for _, _, q in self.transitions:
            seen.add(q)
        return seen

    def concat(self, other: "UnfoldingPath") -> "UnfoldingPath":
        if self.target != other.source:
            raise UnfoldingError("concatenation endpoints do not match")
        return UnfoldingPath(self.start, self.transitions + other.transitions)

    def is_cycle(self) -> bool:
        return self.source == self.target


def validate_unfolding(
    net: PetriNet,
    index_set: Sequence[int],
    states: Iterable[State],
    transitions: Iterable[Transition],
) -> Unfolding:
    """Check the I-firing relation on every edge and strong connectivity."""
    index_set = tuple(sorted(index_set))
    if any(i < 0 or i >= net.dim for i in index_set):
        raise UnfoldingError("index set out of range", index_set)
    states = tuple(sorted(set(states)))
    if not states:
        raise UnfoldingError("empty state set")
    state_set = set(states)
    for s in states:
        if len(s) != len(index_set) or any(v < 0 for v in s):
            raise UnfoldingError("state is not an I-configuration", s)
    transitions = tuple(sorted(set(transitions)))
    for t in transitions:
        p, a, q = t
        if p not in state_set or q not in state_set:
            raise UnfoldingError("transition endpoint is not a state", t)
        if not 0 <= a < len(net.actions):
            raise UnfoldingError("unknown action index", t)
        if i_fires(net.actions[a], index_set, p) != q:
            raise UnfoldingError("transition violates the firing relation", t)
    ok, pair = _strongly_connected(states, transitions)
    if not ok:
        raise UnfoldingError("graph is not strongly connected", pair)
    return Unfolding(net, index_set, states, transitions)


# --- structural reversibility ----------------------------------------------


def _circulation_rows(g: Unfolding) -> list[list[int]]:
    """Flow conservation per state plus zero total displacement per axis."""
    rows: list[list[int]] = []
    tindex = {t: j for j, t in enumerate(g.transitions)}
    for s in g.states:
        row = [0] * len(g.transitions)
        for t, j in tindex.items():
            if t[0] == s:
                row[j] += 1
            if t[2] == s:
                row[j] -= 1
        rows.append(row)
    for i in range(g.net.dim):
        rows.append([g.action(t[1]).displacement[i] for t in g.transitions])
    return rows


def is_structurally_reversible(g: Unfolding) -> tuple[bool, dict[Transition, Fraction] | None]:
    """Euler test: a strictly positive circulation with zero displacement."""
    if "reversible" not in g._cache:
        flows = positive_circulation(_circulation_rows(g), len(g.transitions))
        if flows is None:
            g._cache["reversible"] = (False, None)
        else:
            g._cache["reversible"] = (True, dict(zip(g.transitions, flows)))
    return g._cache["reversible"]


def reversible_by_search(g: Unfolding, disp_bound: int, max_steps: int | None = None) -> bool:
    """Definitional check: every edge has a zero-sum return path, found by
    bounded search.  `disp_bound` clamps displacement entries."""
    for t in g.transitions:
        try:
            reverse_path_for(g, t, disp_bound, _checked=False)
        except UnfoldingError:
            return False
    return True


def reverse_path_for(
    g: Unfolding, t: Transition, bound: int, _checked: bool = True
) -> UnfoldingPath:
    """Path p from target(t) to source(t) with displacement(t p) = 0.

    Breadth-first over (state, partial displacement) with entries clamped
    to [-bound*m, bound*m]; raises when the window is exhausted.
    """
    if _checked and not is_structurally_reversible(g)[0]:
        raise UnfoldingError("unfolding is not structurally reversible")
    m = max(g.net.norm, 1)
    clamp = bound * m
    start = (t[2], g.action(t[1]).displacement)
    goal = (t[0], zero(g.net.dim))
    parents: dict[tuple, tuple | None] = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for node in frontier:
            if node == goal:
                path: list[Transition] = []
                cur = node
                while parents[cur] is not None:
                    prev, edge = parents[cur]
                    path.append(edge)
                    cur = prev
                return UnfoldingPath(t[2], tuple(reversed(path)))
            state, disp = node
            for edge in g.transitions:
                if edge[0] != state:
                    continue
                ndisp = vadd(disp, g.action(edge[1]).displacement)
                if norm_inf(ndisp) > clamp:
                    continue
                child = (edge[2], ndisp)
                if child not in parents:
                    parents[child] = (node, edge)
                    nxt.append(child)
        frontier = nxt
        if goal in parents:
            frontier = [goal] + [n for n in frontier if n != goal]
    raise UnfoldingError("no zero-sum return path within bound", (t, bound))


# --- cycles and the lattice L_G --------------------------------------------


def simple_cycles(g: Unfolding, cap: int = 20000) -> tuple[list[UnfoldingPath], bool]:
    """All simple cycles, anchored at their minimal state, in DFS order.

    Returns (cycles, truncated); consumers must treat the spanned lattice
    as an under-approximation when truncated.
    """
    key = ("simple_cycles", cap)
    if key in g._cache:
        return g._cache[key]
    order = {s: i for i, s in enumerate(g.states)}
    out: dict[State, list[Transition]] = {s: [] for s in g.states}
    for t in g.transitions:
        out[t[0]].append(t)
    cycles: list[UnfoldingPath] = []
    truncated = False

    for anchor in g.states:
        if truncated:
            break
        # DFS paths from anchor over states with order >= anchor, distinct
        # internal states; closing edge returns to anchor.
        stack: list[tuple[State, tuple[Transition, ...], frozenset]] = [
            (anchor, (), frozenset([anchor]))
        ]
        while stack:
            state, path, seen = stack.pop()
            for t in reversed(out[state]):
                if t[2] == anchor:
                    if len(cycles) >= cap:
                        truncated = True
                        break
                    cycles.append(UnfoldingPath(anchor, path + (t,)))
                elif order[t[2]] > order[anchor] and t[2] not in seen:
                    stack.append((t[2], path + (t,), seen | {t[2]}))
            if truncated:
                break
    g._cache[key] = (cycles, truncated)
    return cycles, truncated


def lattice_of_unfolding(g: Unfolding, cap: int = 20000) -> LatticeRepresentation:
    """Representation of the lattice spanned by simple-cycle displacements."""
    if "lattice" in g._cache:
        return g._cache["lattice"]
    cycles, truncated = simple_cycles(g, cap)
    if truncated:
        raise UnfoldingError("simple-cycle enumeration truncated; lattice would be partial")
    gens = sorted({c.displacement(g.net) for c in cycles})
    rep = representation_from_generators(gens, g.net.dim)
    g._cache["lattice"] = rep
    return rep


def elementary_path(g: Unfolding, p: State, q: State) -> UnfoldingPath:
    """First breadth-first path p -> q; elementary because BFS trees are."""
    if p == q:
        return UnfoldingPath(p)
    parents: dict[State, tuple[State, Transition] | None] = {p: None}
    frontier = [p]
    while frontier:
        nxt = []
        for s in frontier:
            for t in g.transitions:
                if t[0] != s or t[2] in parents:
                    continue
                parents[t[2]] = (s, t)
                if t[2] == q:
                    path = []
                    cur = q
                    while parents[cur] is not None:
                        prev, edge = parents[cur]
                        path.append(edge)
                        cur = prev
                    return UnfoldingPath(p, tuple(reversed(path)))
                nxt.append(t[2])
        frontier = nxt
    raise UnfoldingError("states are not connected", (p, q))


def coset_between(g: Unfolding, p: State, q: State) -> LatticeCoset:
    """The displacement coset of all paths p -> q: offset + L_G."""
    path = elementary_path(g, p, q)
    offset = path.displacement(g.net)
    assert norm_inf(offset) <= g.size * g.net.norm
    return LatticeCoset(offset, lattice_of_unfolding(g))


def _integer_circulation(g: Unfolding) -> dict[Transition, int]:
    ok, flows = is_structurally_reversible(g)
    if not ok:
        raise UnfoldingError("unfolding is not structurally reversible")
    assert flows is not None
    scale = reduce(lcm, (f.denominator for f in flows.values()), 1)
    return {t: int(f * scale) for t, f in flows.items()}


def zero_full_state_cycle(g: Unfolding, anchor: State) -> UnfoldingPath:
    """A zero-displacement cycle on `anchor` visiting every state.

    Assembled as an Euler circuit of the multigraph weighted by the
    integer-scaled circulation witness, which covers every transition.
    """
    if anchor not in set(g.states):
        raise UnfoldingError("anchor is not a state", anchor)
    if not g.transitions:
        if g.size != 1:
            raise UnfoldingError("no transitions but several states")
        return UnfoldingPath(anchor)
    counts = _integer_circulation(g)
    remaining = {t: c for t, c in counts.items()}
    out: dict[State, list[Transition]] = {s: [] for s in g.states}
    for t in sorted(remaining):
        out[t[0]].append(t)

    # Hierholzer with explicit stack.
    circuit: list[Transition] = []
    path_stack: list[Transition] = []
    cur = anchor
    while True:
        edge = next((t for t in out[cur] if remaining[t] > 0), None)
        if edge is not None:
            remaining[edge] -= 1
            path_stack.append(edge)
            cur = edge[2]
        else:
            if not path_stack:
                break
            last = path_stack.pop()
            circuit.append(last)
            cur = last[0]
    circuit.reverse()
    cycle = UnfoldingPath(anchor, tuple(circuit))
    if any(v > 0 for v in remaining.values()):
        raise UnfoldingError("euler assembly left unused flow (graph not connected?)")
    assert cycle.is_cycle()
    assert cycle.displacement(g.net) == zero(g.net.dim)
    assert cycle.states_visited() == set(g.states)
    return cycle


def rotate_cycle(cycle: UnfoldingPath, anchor: State) -> UnfoldingPath:
    if not cycle.is_cycle():
        raise UnfoldingError("cannot rotate a non-cycle")
    if cycle.source == anchor:
        return cycle
    ts = cycle.transitions
    for i, t in enumerate(ts):
        if t[0] == anchor:
            return UnfoldingPath(anchor, ts[i:] + ts[:i])
    raise UnfoldingError("anchor does not occur on the cycle", anchor)


def embed_simple_cycle(
    g: Unfolding,
    zero_cycle: UnfoldingPath,
    cycle: UnfoldingPath,
    anchor: State | None = None,
) -> UnfoldingPath:
    """Insert a cycle into a full-state zero cycle; the result is a
    full-state cycle with the inserted cycle's displacement, rotated to
    `anchor` (default: the zero cycle's own anchor)."""
    if anchor is None:
        anchor = zero_cycle.source
    base = rotate_cycle(zero_cycle, cycle.source) if zero_cycle.transitions else zero_cycle
    if base.source != cycle.source:
        raise UnfoldingError("cycle state does not occur on the zero cycle", cycle.source)
    combined = cycle.concat(base) if base.transitions else cycle
    return rotate_cycle(combined, anchor)


# --- construction from an explicit SCCC -------------------------------------


def unfolding_from_sccc(net: PetriNet, configs: Iterable[Vec], index_set: Sequence[int]) -> Unfolding:
    """The graph over C|_I with every action edge realized inside C."""
    index_set = tuple(sorted(index_set))
    cset = sorted(set(tuple(c) for c in configs))
    if not cset:
        raise UnfoldingError("empty configuration set")
    members = set(cset)
    states = {restrict(c, index_set) for c in cset}
    transitions = set()
    for x in cset:
        for idx, a in enumerate(net.actions):
            if all(c >= p for c, p in zip(x, a.pre, strict=True)):
                y = vadd(x, a.displacement)
                if y in members:
                    transitions.add((restrict(x, index_set), idx, restrict(y, index_set)))
    g = validate_unfolding(net, index_set, states, transitions)
    ok, _ = is_structurally_reversible(g)
    if not ok:
        raise UnfoldingError("constructed graph is not structurally reversible "
                             "(input was not a mutually-reachable set?)")
    return g


# --- enumeration -------------------------------------------------------------


@dataclass
class EnumLimits:
    max_states: int = 6
    max_unfoldings: int = 5000
    transition_subsets: bool = False
    max_edges_for_subsets: int = 14
    simple_cycle_cap: int = 20000


@dataclass
class EnumStats:
    emitted: int = 0
    truncated: bool = False
    reasons: list = field(default_factory=list)


def _connected_subsets(neighbors: list[set[int]], max_size: int) -> Iterator[tuple[int, ...]]:
    """Connected subsets of an undirected graph, each exactly once."""
    n = len(neighbors)
    for root in range(n):
        start_ext = tuple(sorted(w for w in neighbors[root] if w > root))
        stack = [((root,), start_ext, frozenset())]
        while stack:
            cur, ext, banned = stack.pop()
            yield cur
            if len(cur) >= max_size:
                continue
            cur_set = set(cur)
            for i in range(len(ext)):
                v = ext[i]
                new_banned = banned | set(ext[:i])
                grown = set(ext[i + 1 :])
                for w in neighbors[v]:
                    if w > root and w not in cur_set and w != v and w not in new_banned:
                        grown.add(w)
                stack.append((tuple(sorted(cur_set | {v})), tuple(sorted(grown)), new_banned))


def bounded_states(index_set: Sequence[int], bound: int) -> list[State]:
    """All I-configurations with infinity norm strictly below `bound`."""
    return sorted(itertools.product(range(bound), repeat=len(index_set)))


def enabled_edges(net: PetriNet, index_set: Sequence[int], states: Sequence[State]) -> list[Transition]:
    sset = set(states)
    edges = []
    for p in states:
        for idx, a in enumerate(net.actions):
            q = i_fires(a, index_set, p)
            if q is not None and q in sset:
                edges.append((p, idx, q))
    return sorted(edges)


def _spanning_strongly_connected(states: Sequence[State], edges: Sequence[Transition]) -> bool:
    return _strongly_connected(states, edges)[0]


def enumerate_unfoldings(
    net: PetriNet,
    index_set: Sequence[int],
    state_bound: int,
    limits: EnumLimits | None = None,
    stats: EnumStats | None = None,
) -> Iterator[Unfolding]:
    """Structurally-reversible unfoldings over states of norm < state_bound.

    By default each qualifying state set yields its unique maximal
    reversible transition set, which subsumes all smaller ones for
    formula purposes: unions of positive circulations are positive
    circulations, so lattice, cosets and pumping sets only grow.  With
    `transition_subsets` every valid transition subset is emitted.
    """
    limits = limits or EnumLimits()
    stats = stats if stats is not None else EnumStats()
    index_set = tuple(sorted(index_set))
    if state_bound < 1:
        raise UnfoldingError("state bound must be >= 1")
    all_states = bounded_states(index_set, state_bound)
    all_edges = enabled_edges(net, index_set, all_states)
    pos = {s: i for i, s in enumerate(all_states)}
    undirected: list[set[int]] = [set() for _ in all_states]
    for p, _, q in all_edges:
        if p != q:
            undirected[pos[p]].add(pos[q])
            undirected[pos[q]].add(pos[p])

    for subset in _connected_subsets(undirected, limits.max_states):
        if stats.truncated:
            return
        states = tuple(all_states[i] for i in subset)
        sset = set(states)
        edges = [t for t in all_edges if t[0] in sset and t[2] in sset]
        if len(states) > 1 and not _spanning_strongly_connected(states, edges):
            continue
        if limits.transition_subsets:
            if len(edges) > limits.max_edges_for_subsets:
                stats.truncated = True
                stats.reasons.append(("edge-subsets", states, len(edges)))
                continue
            for mask in range(1 if len(states) > 1 else 0, 1 << len(edges)):
                chosen = [edges[j] for j in range(len(edges)) if mask >> j & 1]
                if len(states) > 1 and not _spanning_strongly_connected(states, chosen):
                    continue
                support = max_positive_support(
                    _rows_for(net, chosen, states), len(chosen)
                )
                if len(support) != len(chosen):
                    continue
                yield _emit(net, index_set, states, chosen, stats, limits)
                if stats.emitted >= limits.max_unfoldings:
                    stats.truncated = True
                    stats.reasons.append(("max-unfoldings",))
                    return
        else:
            support = max_positive_support(_rows_for(net, edges, states), len(edges))
            chosen = [edges[j] for j in support]
            if len(states) > 1 and not _spanning_strongly_connected(states, chosen):
                continue
            yield _emit(net, index_set, states, chosen, stats, limits)
            if stats.emitted >= limits.max_unfoldings:
                stats.truncated = True
                stats.reasons.append(("max-unfoldings",))
                return


def _rows_for(net: PetriNet, edges: Sequence[Transition], states: Sequence[State]) -> list[list[int]]:
    rows = []
    for s in states:
        row = [0] * len(edges)
        for j, t in enumerate(edges):
            if t[0] == s:
                row[j] += 1
            if t[2] == s:
                row[j] -= 1
        rows.append(row)
    for i in range(net.dim):
        rows.append([net.actions[t[1]].displacement[i] for t in edges])
    return rows


def _emit(net, index_set, states, edges, stats: EnumStats, limits: EnumLimits) -> Unfolding:
    g = Unfolding(net, index_set, tuple(states), tuple(edges))
    stats.emitted += 1
    return g


def collect_unfoldings(
    net: PetriNet,
    index_set: Sequence[int],
    state_bound: int,
    limits: EnumLimits | None = None,
) -> tuple[list[Unfolding], EnumStats]:
    stats = EnumStats()
    gs = list(enumerate_unfoldings(net, index_set, state_bound, limits, stats))
    return gs, stats


def enumerate_candidate_unfoldings(
    net: PetriNet,
    index_set: Sequence[int],
    state_bound: int,
    limits: EnumLimits | None = None,
) -> Iterator[Unfolding]:
    """Valid I-unfoldings regardless of reversibility (test generator)."""
    limits = limits or EnumLimits()
    index_set = tuple(sorted(index_set))
    all_states = bounded_states(index_set, state_bound)
    all_edges = enabled_edges(net, index_set, all_states)
    pos = {s: i for i, s in enumerate(all_states)}
    undirected: list[set[int]] = [set() for _ in all_states]
    for p, _, q in all_edges:
        if p != q:
            undirected[pos[p]].add(pos[q])
            undirected[pos[q]].add(pos[p])
    emitted = 0
    for subset in _connected_subsets(undirected, limits.max_states):
        states = tuple(all_states[i] for i in subset)
        sset = set(states)
        edges = [t for t in all_edges if t[0] in sset and t[2] in sset]
        if len(edges) > limits.max_edges_for_subsets:
            continue
        for mask in range(1 << len(edges)):
            chosen = tuple(edges[j] for j in range(len(edges)) if mask >> j & 1)
            if len(states) > 1 and not _spanning_strongly_connected(states, chosen):
                continue
            yield Unfolding(net, index_set, states, chosen)
            emitted += 1
            if emitted >= limits.max_unfoldings:
                return


# --- DOT export --------------------------------------------------------------


def unfolding_to_dot(g: Unfolding, name: str = "unfolding") -> str:
    def label(s: State) -> str:
        return "(" + ",".join(map(str, s)) + ")"

    lines = [f"digraph {name} {{"]
    lines.append(f'  label="I={list(g.index_set)}";')
    for s in g.states:
        lines.append(f'  "{label(s)}";')
    for p, a, q in g.transitions:
        delta = g.action(a).displacement
        lines.append(f'  "{label(p)}" -> "{label(q)}" [label="a{a} d={list(delta)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
