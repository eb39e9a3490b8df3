import itertools

import pytest

from mutreach.formula import (
    And,
    BoolConst,
    CompareAtom,
    DivAtom,
    Implies,
    Not,
    Or,
    atom_count,
    eval_formula,
    from_sexpr,
    max_threshold,
    to_sexpr,
    to_smtlib,
)
from mutreach.lattice import LatticeRepresentation
from mutreach.net import Action, PetriNet
from mutreach.oracle import BoundedStateSpace
from mutreach.presburger import (
    CompileError,
    _violation_exists,
    bottom_from_text,
    bottom_to_json,
    bottom_to_smtlib,
    bottom_to_text,
    bottom_wrapper,
    compile_bottom,
    compile_mutual,
    eval_bottom,
    eval_mutual,
    lattice_basis,
    lattice_box_feasible,
    mutual_from_text,
    mutual_to_ast,
    mutual_to_json,
    mutual_to_smtlib,
    mutual_to_text,
    mutual_var_names,
)
from mutreach.witness import PumpingParams

PARAMS = PumpingParams(state_bound=4, cycle_len=4)


# --- formula AST ----------------------------------------------------------------


def test_formula_eval_atoms():
    ge = CompareAtom((1, -1), ">=", 2)
    assert eval_formula(ge, (5, 1))
    assert not eval_formula(ge, (2, 1))
    eq = CompareAtom((1, 1), "==", 3)
    assert eval_formula(eq, (1, 2))
    div = DivAtom((2, 1), 1, 4)
    assert eval_formula(div, (1, 1))  # 2+1+1 = 4
    assert not eval_formula(div, (1, 0))


def test_formula_eval_connectives():
    a = CompareAtom((1,), ">=", 1)
    b = CompareAtom((1,), ">=", 3)
    assert eval_formula(And((a, b)), (5,))
    assert not eval_formula(And((a, b)), (2,))
    assert eval_formula(Or((a, b)), (2,))
    assert eval_formula(Not(b), (2,))
    assert eval_formula(Implies(b, a), (2,))
    assert eval_formula(Implies(a, b), (0,))
    assert eval_formula(BoolConst(True), ())


def test_sexpr_round_trip():
    f = And(
        (
            Implies(
                Or((CompareAtom((1, 0), ">=", 3),)),
                Or((CompareAtom((0, 1), ">=", -2),)),
            ),
            DivAtom((2, -1), 0, 3),
            Not(CompareAtom((1, 1), "==", 0)),
        )
    )
    text = to_sexpr(f)
    again = from_sexpr(text)
    assert again == f
    for values in itertools.product(range(-3, 4), repeat=2):
        assert eval_formula(f, values) == eval_formula(again, values)


def test_smtlib_formula_rendering():
    f = And((CompareAtom((1, 0), ">=", 3), DivAtom((2, 1), 1, 4)))
    script = to_smtlib(f, ["a", "b"], nonneg=["a", "b"])
    assert "(set-logic QF_LIA)" in script
    assert "(declare-const a Int)" in script
    assert "(>= a 3)" in script
    assert "(= (mod (+ (* 2 a) b 1) 4) 0)" in script
    assert script.strip().endswith("(check-sat)")


def test_atom_count_and_threshold():
    f = And((CompareAtom((1,), ">=", 7), Not(DivAtom((1,), 0, 2))))
    assert atom_count(f) == (1, 1)
    assert max_threshold(f) == 7


# --- mutual compile -------------------------------------------------------------


def test_empty_net_compiles_to_identity():
    empty = PetriNet(1, ())
    f = compile_mutual(empty, PumpingParams(state_bound=1, cycle_len=0))
    for x in range(4):
        for y in range(4):
            assert eval_mutual(f, (x,), (y,)) == (x == y)


def test_consumer_compiles_to_identity(consumer):
    f = compile_mutual(consumer, PARAMS)
    for x in range(6):
        for y in range(6):
            assert eval_mutual(f, (x,), (y,)) == (x == y)


def test_token_swap_matches_oracle_exactly(token_swap):
    f = compile_mutual(token_swap, PARAMS)
    assert f.provenance == "certified"
    space = BoundedStateSpace(token_swap, 5)
    pts = list(itertools.product(range(4), repeat=2))
    for x in pts:
        for y in pts:
            oc = space.mutual(x, y)
            assert oc is not None
            assert eval_mutual(f, x, y) == oc


def test_disjunct_atom_budget(token_swap, ring):
    for net in (token_swap, ring):
        f = compile_mutual(net, PARAMS)
        d = net.dim
        for dis in f.disjuncts:
            assert len(dis.rep.pairs) == d  # d divisibility/equality atoms
            # the two bound vectors expand to at most 2d comparisons
            assert len(dis.lower_x) + len(dis.lower_y) == 2 * d


def test_eval_mutual_dimension_check(token_swap):
    f = compile_mutual(token_swap, PARAMS)
    with pytest.raises(CompileError):
        eval_mutual(f, (1,), (1, 0))


def test_mutual_ast_agrees_with_eval(token_swap):
    f = compile_mutual(token_swap, PARAMS)
    ast = mutual_to_ast(f)
    assert mutual_var_names(2) == ["x0", "x1", "y0", "y1"]
    for x in itertools.product(range(3), repeat=2):
        for y in itertools.product(range(3), repeat=2):
            assert eval_formula(ast, list(x) + list(y)) == eval_mutual(f, x, y)


def test_mutual_serialization_round_trips(token_swap):
    f = compile_mutual(token_swap, PARAMS)
    again = mutual_from_text(mutual_to_text(f))
    assert again.dim == f.dim
    assert again.disjuncts == f.disjuncts
    assert again.provenance == f.provenance
    js = mutual_to_json(f)
    assert '"kind": "mutual"' in js
    smt = mutual_to_smtlib(f)
    assert smt.count("declare-const") == 4


def test_compile_workers_deterministic(ring):
    f1 = compile_mutual(ring, PARAMS, workers=1)
    f2 = compile_mutual(ring, PARAMS, workers=2)
    assert f1 == f2


def test_certified_thresholds_are_what_make_it_sound(ring):
    """With the pumping threshold zeroed out, the ring net accepts the
    deadlocked pair (0,1) / (1,0) through a one-coordinate unfolding the
    configurations cannot actually traverse; the certified default
    rejects it.  This is the boundary the provenance label records."""
    heuristic = compile_mutual(ring, PumpingParams(state_bound=4, cycle_len=4, off_threshold=0))
    assert heuristic.provenance == "heuristic"
    assert eval_mutual(heuristic, (0, 1), (1, 0))  # false positive
    space = BoundedStateSpace(ring, 5)
    assert space.mutual((0, 1), (1, 0)) is False

    certified = compile_mutual(ring, PumpingParams(state_bound=4, cycle_len=4))
    assert certified.provenance == "certified"
    assert not eval_mutual(certified, (0, 1), (1, 0))
    pts = list(itertools.product(range(4), repeat=2))
    for x in pts:
        for y in pts:
            if eval_mutual(certified, x, y):
                assert space.mutual(x, y) is True


# --- bottom compile -------------------------------------------------------------


def test_consumer_bottom_formula(consumer):
    f = compile_bottom(consumer, PumpingParams(state_bound=5, cycle_len=2))
    space = BoundedStateSpace(consumer, 7)
    for c in range(5):
        want = space.bottom((c,))
        assert eval_bottom(f, (c,), method="exact") == want
        enum = eval_bottom(f, (c,), method="enumerate", radius=6)
        assert enum is None or enum == want


def test_token_swap_bottom_everywhere(token_swap):
    # points up to total 4: their classes stay below the state bound
    f = compile_bottom(token_swap, PumpingParams(state_bound=5, cycle_len=4))
    space = BoundedStateSpace(token_swap, 8)
    for c in itertools.product(range(3), repeat=2):
        assert eval_bottom(f, c, method="exact") is True
        assert space.bottom(c) is True


def test_mixed_bottom_third_coordinate(mixed3):
    f = compile_bottom(mixed3, PumpingParams(state_bound=5, cycle_len=2))
    space = BoundedStateSpace(mixed3, 6)
    for c in itertools.product(range(3), repeat=3):
        want = space.bottom(c)
        got = eval_bottom(f, c, method="exact")
        if want is not None:
            assert got == want, (c, got, want)


def test_no_enabled_action_every_config_bottom():
    blocked = PetriNet(2, (Action((9, 9), (0, 0)),))
    f = compile_bottom(blocked, PumpingParams(state_bound=4, cycle_len=1))
    for c in itertools.product(range(4), repeat=2):
        assert eval_bottom(f, c, method="exact") is True


def test_bottom_threshold_form(token_swap):
    f = compile_bottom(token_swap, PumpingParams(state_bound=4, cycle_len=4))
    for t in f.tuples:
        # implication-form threshold formulas with bounded constants
        assert t.threshold <= 10**6
        comparisons, divisibility = atom_count(t.phi)
        assert divisibility == 0


def test_bottom_serialization_round_trips(token_swap):
    f = compile_bottom(token_swap, PumpingParams(state_bound=4, cycle_len=4))
    again = bottom_from_text(bottom_to_text(f))
    assert again.dim == f.dim
    assert len(again.tuples) == len(f.tuples)
    for a, b in zip(f.tuples, again.tuples):
        assert a.index_set == b.index_set
        assert a.state == b.state
        assert a.rep == b.rep
        assert a.implications == b.implications
        assert a.phi == b.phi
    assert '"kind": "bottom"' in bottom_to_json(f)
    smt = bottom_to_smtlib(f)
    assert "(set-logic LIA)" in smt and "forall" in smt


# --- lattice point machinery ------------------------------------------------------


def test_lattice_basis_from_representation():
    rep = LatticeRepresentation(2, ((0, (1, 1)), (1, (1, 0))))  # x0 + x1 = 0
    basis = lattice_basis(rep)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] == 0 and v != (0, 0)

    zero_rep = LatticeRepresentation(2, ((0, (1, 0)), (0, (0, 1))))
    assert lattice_basis(zero_rep) == []

    full = LatticeRepresentation(1, ((1, (1,)),))
    basis = lattice_basis(full)
    assert len(basis) == 1 and abs(basis[0][0]) == 1


def test_lattice_box_feasible_rank_one():
    basis = [(1, -1)]
    assert lattice_box_feasible(basis, [2, -9], [None, None]) is True
    assert lattice_box_feasible(basis, [2, -9], [8, -3]) is True
    assert lattice_box_feasible(basis, [2, -1], [8, None]) is False
    assert lattice_box_feasible([], [0, -1], [1, 0]) is True
    assert lattice_box_feasible([], [1, 0], [2, 0]) is False


def test_lattice_box_feasible_rank_two():
    basis = [(2, 0), (0, 3)]
    assert lattice_box_feasible(basis, [1, 1], [4, 4]) is True  # (2,3)
    assert lattice_box_feasible(basis, [1, 1], [1, 2]) is False
    assert lattice_box_feasible(basis, [3, 4], [3, 4]) is False  # x0=3 odd


def test_lattice_box_feasible_unbounded_rank_two():
    basis = [(1, 0), (0, 1)]
    # unbounded box, point near the origin: the window scan finds it
    assert lattice_box_feasible(basis, [5, 5], [None, None]) is True
    # unbounded box with no point inside the scanned window: honest None
    assert lattice_box_feasible(basis, [100, 100], [None, None]) is None


def test_violation_search_matches_enumeration(token_swap):
    f = compile_bottom(token_swap, PumpingParams(state_bound=4, cycle_len=4))
    for tup in f.tuples:
        for c in itertools.product(range(3), repeat=2):
            from mutreach.vectors import restrict

            if restrict(c, tup.index_set) != tup.state:
                continue
            exact = _violation_exists(tup, c)
            from mutreach.presburger import _violation_by_enumeration

            enum = _violation_by_enumeration(tup, c, radius=6)
            if exact is not None and enum is not None:
                assert exact == enum


# --- quantified wrapper -------------------------------------------------------------


def test_bottom_wrapper(consumer, token_swap):
    f = compile_mutual(consumer, PARAMS)
    w = bottom_wrapper(consumer, f)
    assert w.bounded_eval((0,), 5) is True
    assert w.bounded_eval((3,), 5) is False
    script = w.to_smtlib()
    assert "forall" in script and "(set-logic LIA)" in script

    empty = PetriNet(1, ())
    fe = compile_mutual(empty, PumpingParams(state_bound=1, cycle_len=0))
    we = bottom_wrapper(empty, fe)
    assert we.bounded_eval((2,), 4) is True  # empty conjunction

    ft = compile_mutual(token_swap, PARAMS)
    wt = bottom_wrapper(token_swap, ft)
    space = BoundedStateSpace(token_swap, 6)
    bf = compile_bottom(token_swap, PumpingParams(state_bound=5, cycle_len=4))
    for c in itertools.product(range(3), repeat=2):
        agreed = eval_bottom(bf, c, method="exact")
        assert wt.bounded_eval(c, 4) == agreed == space.bottom(c)
