"""Petri net syntax and operational semantics.

A net is a finite set of actions (pre, post) over d counters.  Firing a
word subtracts and adds vectors while counters stay non-negative.  The
hurdle of a word is the unique minimal configuration the whole word can
fire from, which turns word firability into a single comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .vectors import Vec, is_nonnegative, norm_inf, vadd, vec, vsub, zero

Config = Vec


class NetError(ValueError):
    pass


class Blocked(NetError):
    """A word failed to fire; `step` is the 1-based offending position."""

    def __init__(self, step: int, coordinate: int, config: Config):
        self.step = step
        self.coordinate = coordinate
        self.config = config
        super().__init__(
            f"blocked at step {step}: coordinate {coordinate} of {config} would go negative"
        )


@dataclass(frozen=True)
class Action:
    """A pair (pre, post) of configurations of equal dimension."""

    pre: Config
    post: Config

    def __post_init__(self):
        object.__setattr__(self, "pre", vec(self.pre))
        object.__setattr__(self, "post", vec(self.post))
        if len(self.pre) != len(self.post):
            raise NetError(f"action dimension mismatch: {self.pre} vs {self.post}")
        if not (is_nonnegative(self.pre) and is_nonnegative(self.post)):
            raise NetError(f"action entries must be non-negative: {self.pre} -> {self.post}")

    @property
    def dim(self) -> int:
        return len(self.pre)

    @property
    def displacement(self) -> Vec:
        return vsub(self.post, self.pre)

    @property
    def norm(self) -> int:
        return max(norm_inf(self.pre), norm_inf(self.post))


@dataclass(frozen=True)
class PetriNet:
    dim: int
    actions: tuple[Action, ...]
    norm: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if self.dim < 1:
            raise NetError("dimension must be >= 1")
        for a in self.actions:
            if a.dim != self.dim:
                raise NetError(f"action {a} has dimension {a.dim}, net has {self.dim}")
        object.__setattr__(self, "norm", max((a.norm for a in self.actions), default=0))

    def word(self, indices: Sequence[int]) -> tuple[Action, ...]:
        """Expand a word stored as indices into the action table."""
        return tuple(self.actions[i] for i in indices)


def _check_word(word: Sequence[Action]) -> int:
    dims = {a.dim for a in word}
    if len(dims) > 1:
        raise NetError(f"mixed dimensions in word: {sorted(dims)}")
    return dims.pop() if dims else 0


def displacement(word: Sequence[Action], dim: int | None = None) -> Vec:
    """Sum of per-action displacements; the empty word is the zero vector."""
    d = _check_word(word)
    if not word:
        if dim is None:
            raise NetError("dimension required for the empty word")
        return zero(dim)
    if dim is not None and dim != d:
        raise NetError(f"word dimension {d} does not match requested {dim}")
    total = zero(d)
    for a in word:
        total = vadd(total, a.displacement)
    return total


def hurdle(word: Sequence[Action], dim: int | None = None) -> Config:
    """Minimal configuration the whole word fires from.

    Computed right to left by h -> max(pre, h - delta); entries never go
    negative because pre >= 0 dominates the max.
    """
    d = _check_word(word)
    if not word:
        if dim is None:
            raise NetError("dimension required for the empty word")
        return zero(dim)
    h = zero(d)
    for a in reversed(word):
        h = tuple(max(p, x - dx) for p, x, dx in zip(a.pre, h, a.displacement, strict=True))
    assert is_nonnegative(h)
    return h


def can_fire(x: Config, word: Sequence[Action]) -> bool:
    h = hurdle(word, dim=len(x))
    return all(a >= b for a, b in zip(x, h, strict=True))


def fire(x: Config, word: Sequence[Action]) -> Config:
    """Fire the word from x, raising Blocked at the first failing step."""
    cur = vec(x)
    for step, a in enumerate(word, start=1):
        for i, (c, p) in enumerate(zip(cur, a.pre, strict=True)):
            if c < p:
                raise Blocked(step, i, cur)
        cur = vadd(cur, a.displacement)
    return cur


def fire_trace(x: Config, word: Sequence[Action]) -> list[Config]:
    """All intermediate configurations c0..ck of a successful firing."""
    out = [vec(x)]
    for a in word:
        out.append(fire(out[-1], (a,)))
    return out


def step_targets(net: PetriNet, x: Config) -> Iterator[tuple[int, Config]]:
    """Single-action successors of x, as (action index, target) pairs."""
    for idx, a in enumerate(net.actions):
        if all(c >= p for c, p in zip(x, a.pre, strict=True)):
            yield idx, vadd(x, a.displacement)


# --- net file format -------------------------------------------------------
#
#   # comment
#   dim 2
#   pre: 1 0  post: 0 1


def parse_net(text: str) -> PetriNet:
    dim: int | None = None
    actions: list[Action] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("dim"):
            if dim is not None:
                raise NetError(f"line {lineno}: duplicate dim header")
            try:
                dim = int(line.split()[1])
            except (IndexError, ValueError):
                raise NetError(f"line {lineno}: malformed dim header: {line!r}") from None
            continue
        if dim is None:
            raise NetError(f"line {lineno}: dim header must come first")
        if not line.startswith("pre:") or "post:" not in line:
            raise NetError(f"line {lineno}: expected 'pre: ... post: ...': {line!r}")
        pre_part, post_part = line[len("pre:"):].split("post:", 1)
        try:
            pre = vec(int(t) for t in pre_part.split())
            post = vec(int(t) for t in post_part.split())
        except ValueError:
            raise NetError(f"line {lineno}: non-integer entry: {line!r}") from None
        if len(pre) != dim or len(post) != dim:
            raise NetError(f"line {lineno}: expected {dim} entries per vector")
        actions.append(Action(pre, post))
    if dim is None:
        raise NetError("missing dim header")
    return PetriNet(dim, tuple(actions))


def format_net(net: PetriNet, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"dim {net.dim}")
    for a in net.actions:
        lines.append(
            "pre: " + " ".join(map(str, a.pre)) + "  post: " + " ".join(map(str, a.post))
        )
    return "\n".join(lines) + "\n"


def load_net(path) -> PetriNet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_net(fh.read())


def parse_config(text: str, dim: int | None = None) -> Config:
    entries = vec(int(t) for t in text.replace(",", " ").split())
    if dim is not None and len(entries) != dim:
        raise NetError(f"expected {dim} entries, got {len(entries)}")
    if not is_nonnegative(entries):
        raise NetError(f"configurations are non-negative: {entries}")
    return entries
