"""Text serialization of mutual-reachability witnesses.

The format spells out the unfolding, one pumping block per
configuration, one coset block per ordered pair, and any synthesized
words; `verify_witness` re-validates everything from scratch so a stored
witness is a checkable certificate.
"""

from __future__ import annotations

from .net import PetriNet, fire
from .unfolding import validate_unfolding
from .vectors import vec
from .witness import MutualWitness, PumpingParams, check_witness


def witness_to_text(w: MutualWitness) -> str:
    lines = ["witness", f"dim {w.unfolding.net.dim}"]
    lines.append("index-set " + " ".join(map(str, w.unfolding.index_set)))
    lines.append(f"state-bound {w.params.state_bound}")
    lines.append(f"cycle-len {w.params.cycle_len}")
    off = "exact" if w.params.off_threshold is None else str(w.params.off_threshold)
    lines.append(f"off-threshold {off}")
    lines.append(f"certified {int(w.certified)}")
    lines.append(f"within-bound {int(w.within_state_bound)}")
    for s in w.unfolding.states:
        lines.append("state " + " ".join(map(str, s)))
    for p, a, q in w.unfolding.transitions:
        lines.append(
            "trans " + " ".join(map(str, p)) + f" | {a} | " + " ".join(map(str, q))
        )
    for c in w.configs:
        lines.append("config " + " ".join(map(str, c)))
    for p in w.pumps:
        lines.append("pump " + " ".join(map(str, p.config)))
        lines.append("  enter " + " ".join(map(str, p.enter_word)))
        lines.append("  leave " + " ".join(map(str, p.leave_word)))
        lines.append("  cminus " + " ".join(map(str, p.c_minus)))
        lines.append("  cplus " + " ".join(map(str, p.c_plus)))
        lines.append("  basis " + " ".join(map(str, p.basis_vector)))
    for pc in w.pairs:
        lines.append(
            "coset "
            + " ".join(map(str, pc.source))
            + " -> "
            + " ".join(map(str, pc.target))
            + " : "
            + " ".join(map(str, pc.offset))
        )
    for (x, y), word in sorted(w.words.items()):
        lines.append(
            "word "
            + " ".join(map(str, x))
            + " -> "
            + " ".join(map(str, y))
            + " : "
            + " ".join(map(str, word))
        )
    lines.append("end")
    return "\n".join(lines) + "\n"


def witness_from_text(net: PetriNet, text: str) -> MutualWitness:
    """Rebuild a witness by re-running the checker on the stored data.

    Stored pump/coset blocks are certificates; the checker recomputes
    them, so parsing accepts a witness only if it still validates.
    """
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "witness":
        raise ValueError("not a witness file")
    index_set: tuple[int, ...] = ()
    header: dict[str, str] = {}
    states = []
    transitions = []
    configs = []
    words: dict = {}
    i = 1
    while i < len(lines) and lines[i] != "end":
        line = lines[i].strip()
        key, _, val = line.partition(" ")
        if key == "index-set":
            index_set = tuple(int(t) for t in val.split())
        elif key in ("dim", "state-bound", "cycle-len", "off-threshold", "certified", "within-bound"):
            header[key] = val
        elif key == "state":
            states.append(vec(int(t) for t in val.split()))
        elif key == "trans":
            p_text, a_text, q_text = val.split("|")
            transitions.append(
                (
                    vec(int(t) for t in p_text.split()),
                    int(a_text),
                    vec(int(t) for t in q_text.split()),
                )
            )
        elif key == "config":
            configs.append(vec(int(t) for t in val.split()))
        elif key == "word":
            arrow, _, word_text = val.partition(":")
            x_text, _, y_text = arrow.partition("->")
            x = vec(int(t) for t in x_text.split())
            y = vec(int(t) for t in y_text.split())
            words[(x, y)] = tuple(int(t) for t in word_text.split())
        # pump/coset blocks are recomputed by the checker
        i += 1
    g = validate_unfolding(net, index_set, states, transitions)
    off = header.get("off-threshold", "exact")
    params = PumpingParams(
        state_bound=int(header.get("state-bound", "1")),
        cycle_len=int(header.get("cycle-len", "0")),
        off_threshold=None if off == "exact" else int(off),
    )
    w = check_witness(net, configs, g, params)
    object.__setattr__(w, "words", words)
    return w


def verify_witness(net: PetriNet, text: str) -> MutualWitness:
    """Full re-validation: unfolding, witness conditions, and that every
    stored word fires between its endpoints."""
    w = witness_from_text(net, text)
    for (x, y), word in w.words.items():
        if fire(x, net.word(word)) != y:
            raise ValueError(f"stored word for {x} -> {y} does not fire")
    return w
