import itertools

import pytest

from mutreach.net import Action, PetriNet
from mutreach.oracle import (
    BoundedStateSpace,
    bounded_reach,
    oracle_bottom,
    oracle_mutual,
    reach_graph_to_dot,
    sccc_in_box,
)


def test_bounded_reach_examples(token_swap, consumer):
    blocked = PetriNet(1, (Action((9,), (0,)),))
    seen, clipped = bounded_reach(blocked, (3,), 5)
    assert seen == {(3,)} and not clipped

    seen, clipped = bounded_reach(token_swap, (2, 0), 4)
    assert seen == {(2, 0), (1, 1), (0, 2)} and not clipped

    seen, clipped = bounded_reach(consumer, (3,), 4)
    assert seen == {(3,), (2,), (1,), (0,)} and not clipped


def test_bounded_reach_frontier_flag():
    grower = PetriNet(1, (Action((0,), (1,)),))
    seen, clipped = bounded_reach(grower, (0,), 3)
    assert seen == {(0,), (1,), (2,), (3,)} and clipped
    with pytest.raises(ValueError):
        bounded_reach(grower, (9,), 3)


def test_sccc_level_sets(token_swap):
    comps = sccc_in_box(token_swap, 3)
    level2 = frozenset({(2, 0), (1, 1), (0, 2)})
    assert any(c == level2 and reliable for c, reliable in comps)
    # components whose closure needs states beyond the box are flagged
    level6 = next(c for c, _ in comps if (3, 3) in c)
    reliable6 = next(r for c, r in comps if c == level6)
    assert not reliable6


def test_sccc_singletons(consumer):
    comps = sccc_in_box(consumer, 4)
    assert all(len(c) == 1 for c, _ in comps)
    assert all(reliable for _, reliable in comps)
    empty = PetriNet(2, ())
    comps = sccc_in_box(empty, 2)
    assert all(len(c) == 1 and reliable for c, reliable in comps)


def test_oracle_mutual_verdicts(token_swap):
    assert oracle_mutual(token_swap, (2, 0), (0, 2), 4) is True
    assert oracle_mutual(token_swap, (2, 0), (1, 0), 4) is False
    # same tainted component still decides True (in-box paths are real)
    assert oracle_mutual(token_swap, (4, 4), (4, 4), 4) is True
    space = BoundedStateSpace(token_swap, 4)
    assert space.mutual((4, 1), (1, 4)) is True


def test_oracle_forward_taint_blocks_false_negatives():
    # 0 -> 1 -> ... -> 4 -> 0: the cycle closes only through 4, so in a
    # box of 2 the component of 0 must be unreliable, not "singleton"
    net = PetriNet(1, (Action((0,), (1,)), Action((4,), (0,))))
    space = BoundedStateSpace(net, 2)
    assert space.mutual((0,), (2,)) is None
    full = BoundedStateSpace(net, 4)
    assert full.mutual((0,), (2,)) is True


def test_oracle_mutual_is_equivalence(fixture_nets):
    boxes = {"token_swap": 4, "consumer": 5, "ring": 4, "mixed3": 2}
    for name, net in fixture_nets.items():
        space = BoundedStateSpace(net, boxes[name])
        pts = list(itertools.product(range(boxes[name] + 1), repeat=net.dim))
        verdicts = {}
        for x in pts:
            for y in pts:
                verdicts[(x, y)] = space.mutual(x, y)
        for x in pts:
            assert verdicts[(x, x)] is True
        for (x, y), v in verdicts.items():
            assert verdicts[(y, x)] == v
        for x in pts:
            for y in pts:
                if verdicts[(x, y)] is True:
                    for z in pts:
                        if verdicts[(y, z)] is True:
                            assert verdicts[(x, z)] is True


def test_oracle_bottom_examples(consumer, token_swap, mixed3):
    assert oracle_bottom(consumer, (0,), 4) is True
    assert oracle_bottom(consumer, (1,), 4) is False
    assert oracle_bottom(token_swap, (2, 1), 6) is True
    assert oracle_bottom(mixed3, (1, 1, 0), 4) is True
    assert oracle_bottom(mixed3, (1, 1, 1), 4) is False


def test_oracle_bottom_constant_on_components(token_swap):
    space = BoundedStateSpace(token_swap, 5)
    for comp in space.components():
        if not space.reliable(comp):
            continue
        verdicts = {space.bottom(c) for c in comp}
        assert len(verdicts) == 1


def test_reliability_monotone_in_box(token_swap):
    small = BoundedStateSpace(token_swap, 3)
    big = BoundedStateSpace(token_swap, 6)
    for comp in small.components():
        if small.reliable(comp):
            rep = min(comp)
            assert big.component_of(rep) == comp
            assert big.reliable(comp)


def test_dot_export(token_swap):
    dot = reach_graph_to_dot(token_swap, 2)
    assert dot.startswith("digraph")
    assert '"(1,0)" -> "(0,1)"' in dot
