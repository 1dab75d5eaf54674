"""Finite substrates, attributes, and reversible one-step dynamics.

The desk-scale model: a substrate is a finite set of state labels plus a
bijective one-step evolution map.  An attribute is a subset of a
substrate's states.  Every verdict exported by the other modules is
ultimately computed by exhaustive simulation of these maps, so all types
here are immutable values and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Iterable, Mapping

State = Hashable


class ModelError(ValueError):
    """A model object or argument violates a structural requirement."""


@dataclass(frozen=True)
class StateSpace:
    """Finite ordered set of state labels."""

    id: str
    states: tuple[State, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ModelError(f"state space {self.id!r} has no states")
        if len(set(self.states)) != len(self.states):
            raise ModelError(f"state space {self.id!r} has duplicate state labels")


@dataclass(frozen=True, eq=False)
class Substrate:
    """A state space evolving under a bijective one-step map.

    Equality is object identity: two substrates built from identical data
    are still distinct physical systems, and several operations (pairing,
    composition) depend on telling instances apart.
    """

    space: StateSpace
    step: Mapping[State, State]
    children: tuple["Substrate", ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "step", dict(self.step))
        labels = set(self.space.states)
        if set(self.step) != labels:
            raise ModelError(f"substrate {self.id!r}: step map domain != state set")
        if set(self.step.values()) != labels:
            raise ModelError(f"substrate {self.id!r}: step map is not a bijection")

    @property
    def id(self) -> str:
        return self.space.id

    @property
    def states(self) -> tuple[State, ...]:
        return self.space.states

    @property
    def is_composite(self) -> bool:
        return bool(self.children)

    def __repr__(self) -> str:
        kind = "composite" if self.is_composite else "atomic"
        return f"Substrate({self.id!r}, {len(self.states)} states, {kind})"


@dataclass(frozen=True)
class Attribute:
    """A named subset of a substrate's states.

    Name is metadata only; two attributes are equal when they pick out the
    same states of the same substrate instance.  Empty member sets are
    allowed (degenerate timers need them) and flagged by validators.
    """

    substrate: Substrate
    members: frozenset
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(self.members))
        stray = self.members - set(self.substrate.states)
        if stray:
            raise ModelError(
                f"attribute {self.name or '?'}: members {sorted(map(repr, stray))} "
                f"not states of {self.substrate.id!r}"
            )

    @property
    def complement(self) -> "Attribute":
        rest = frozenset(self.substrate.states) - self.members
        return Attribute(self.substrate, rest, name=f"not-{self.name}" if self.name else "")

    def __repr__(self) -> str:
        return f"Attribute({self.name or sorted(map(repr, self.members))} on {self.substrate.id!r})"


@dataclass(frozen=True, eq=False)
class Variable:
    """Disjoint attributes of one substrate indexed by a rational parameter."""

    substrate: Substrate
    entries: Mapping[Fraction, Attribute]
    allow_static: bool = False

    def __post_init__(self) -> None:
        normal = {Fraction(k): v for k, v in self.entries.items()}
        object.__setattr__(self, "entries", normal)
        seen: set = set()
        for lam, attr in sorted(normal.items()):
            if attr.substrate is not self.substrate:
                raise ModelError(f"variable entry {lam}: attribute on a different substrate")
            if attr.members & seen:
                raise ModelError(f"variable entry {lam}: attributes are not pairwise disjoint")
            seen |= attr.members
            if not self.allow_static and is_static(attr):
                raise ModelError(
                    f"variable entry {lam}: attribute is static "
                    "(pass allow_static=True to permit)"
                )

    @property
    def domain(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.entries))

    def attribute(self, lam) -> Attribute:
        key = Fraction(lam)
        if key not in self.entries:
            raise ModelError(f"parameter {lam} outside the variable's domain")
        return self.entries[key]

    def __contains__(self, lam) -> bool:
        return Fraction(lam) in self.entries


def make_substrate(sid: str, states: Iterable[State], step: Mapping[State, State]) -> Substrate:
    return Substrate(StateSpace(sid, tuple(states)), step)


def cyclic_substrate(sid: str, states: Iterable[State]) -> Substrate:
    """Substrate whose step advances along the given order, wrapping at the end."""
    seq = tuple(states)
    step = {seq[i]: seq[(i + 1) % len(seq)] for i in range(len(seq))}
    return make_substrate(sid, seq, step)


def identity_substrate(sid: str, states: Iterable[State]) -> Substrate:
    seq = tuple(states)
    return make_substrate(sid, seq, {s: s for s in seq})


def clone_substrate(s: Substrate, suffix: str = "'") -> Substrate:
    """Fresh instance with the same states and step (a second copy of the system)."""
    return Substrate(StateSpace(s.space.id + suffix, s.space.states), dict(s.step), s.children)


def retarget(attr: Attribute, substrate: Substrate) -> Attribute:
    """The same member set read as an attribute of another substrate instance."""
    return Attribute(substrate, attr.members, name=attr.name)


def compose_substrates(a: Substrate, b: Substrate) -> Substrate:
    """Composite substrate: ordered-pair states, component-wise step.

    Rejects composing a substrate instance with itself; use
    :func:`clone_substrate` to model two copies of the same system.
    """
    if a is b:
        raise ModelError(
            f"cannot compose substrate {a.id!r} with itself; clone it to get a second instance"
        )
    states = tuple(product(a.states, b.states))
    step = {(x, y): (a.step[x], b.step[y]) for x, y in states}
    space = StateSpace(f"({a.id}⊕{b.id})", states)
    return Substrate(space, step, children=(a, b))


def pair_attribute(composite: Substrate, left: Attribute, right: Attribute, name: str = "") -> Attribute:
    """Attribute (x, y) of a composite substrate."""
    if len(composite.children) != 2:
        raise ModelError(f"{composite.id!r} is not a binary composite")
    ca, cb = composite.children
    if left.substrate is not ca or right.substrate is not cb:
        raise ModelError("pair_attribute: attributes do not match the composite's components")
    members = frozenset(product(left.members, right.members))
    return Attribute(composite, members, name=name or f"({left.name},{right.name})")


def evolve(s: Substrate, state: State, n: int) -> State:
    """State after n applications of the substrate's step map.

    Model-internal machinery: the step counter exists only inside the
    simulations, every exported verdict is a task-level statement.
    """
    if state not in s.step:
        raise ModelError(f"unknown state {state!r} of substrate {s.id!r}")
    if n < 0:
        raise ModelError("step count must be non-negative")
    cur = state
    for _ in range(n):
        cur = s.step[cur]
    return cur


def first_entry(s: Substrate, state: State, members: frozenset, max_steps: int) -> int | None:
    """First step index (0-based, counting the start) at which the state lies in members."""
    cur = state
    for k in range(max_steps + 1):
        if cur in members:
            return k
        cur = s.step[cur]
    return None


def orbit(s: Substrate, state: State) -> tuple[State, ...]:
    """The cycle through `state` under the step map, starting at `state`."""
    if state not in s.step:
        raise ModelError(f"unknown state {state!r} of substrate {s.id!r}")
    out = [state]
    cur = s.step[state]
    while cur != state:
        out.append(cur)
        cur = s.step[cur]
    return tuple(out)


def cycle_lengths(s: Substrate) -> tuple[int, ...]:
    seen: set = set()
    lengths = []
    for st in s.states:
        if st in seen:
            continue
        cyc = orbit(s, st)
        seen.update(cyc)
        lengths.append(len(cyc))
    return tuple(lengths)


def recurrence_period(s: Substrate) -> int:
    """Least L > 0 with evolve(s, x, L) == x for every state x (lcm of cycle lengths)."""
    return math.lcm(*cycle_lengths(s))


def is_static(x: Attribute) -> bool:
    """True iff the member set is invariant under the step map.

    On a finite bijection, forward closure already forces exact
    invariance, so image == members is the whole check.
    """
    step = x.substrate.step
    return {step[s] for s in x.members} == x.members


def entry_states(x: Attribute) -> frozenset:
    """Members whose immediate predecessor lies outside the attribute."""
    inv = {v: k for k, v in x.substrate.step.items()}
    return frozenset(s for s in x.members if inv[s] not in x.members)


def is_static_for_horizon(x: Attribute, h: int) -> bool:
    """Horizon-bounded staticity.

    True iff every state that enters the attribute (its predecessor lies
    outside) then remains inside for at least h further steps.  An
    attribute with no entry states is invariant under a bijection and so
    is static for every horizon; h = 0 is trivially true.  This is the
    operational sense in which a finite system's completion attribute is
    "static in practice" despite eventual recurrence.
    """
    if h < 0:
        raise ModelError("horizon must be non-negative")
    step = x.substrate.step
    for start in entry_states(x):
        cur = start
        for _ in range(h):
            cur = step[cur]
            if cur not in x.members:
                return False
    return True


def static_horizon(x: Attribute, cap: int | None = None) -> int:
    """Largest h <= cap for which is_static_for_horizon holds (cap defaults to the recurrence period)."""
    if cap is None:
        cap = recurrence_period(x.substrate)
    step = x.substrate.step
    best = cap
    for start in entry_states(x):
        cur = start
        stayed = 0
        while stayed < cap:
            cur = step[cur]
            if cur not in x.members:
                break
            stayed += 1
        best = min(best, stayed)
    return best


def are_distinguishable(xs: Iterable[Attribute]) -> bool:
    """Pairwise disjointness, the classical criterion for perfect classification."""
    attrs = list(xs)
    if len(attrs) < 2:
        raise ModelError("distinguishability needs at least two attributes")
    substrate = attrs[0].substrate
    for a in attrs[1:]:
        if a.substrate is not substrate:
            raise ModelError("attributes on different substrates are not comparable")
    seen: set = set()
    for a in attrs:
        if a.members & seen:
            return False
        seen |= a.members
    return True
