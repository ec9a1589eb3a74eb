"""Tree automorphisms presented by wreath recursion.

A :class:`Machine` is a finite set of states; each state carries a root
permutation and, for every first-level letter, a transition word over the
states one level deeper.  An :class:`Element` is a word over states and
their formal inverses and represents the product automorphism (the
rightmost letter acts first, so ``(g*h)(v) = g(h(v))``).

Identity testing is decidable for such elements: the sections of a word of
length L are words of length <= L over a finite alphabet, so a
breadth-first search over sections terminates.  The search is budgeted;
exhausting the budget raises :class:`~treeact.outcomes.BudgetExceeded`
rather than returning a boolean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .outcomes import BudgetExceeded, Certified, Inconclusive, SearchOutcome
from .permutations import Perm, is_perm, perm_identity, perm_inv, perm_mul, perm_str
from .tree import MAX_DEPTH, TreeShape, Word, _check_depth

#: Default cap on the number of distinct section words visited by the
#: identity-testing BFS before it gives up.
DEFAULT_NODE_BUDGET = 10**6

SignedLetter = tuple[str, int]
LetterWord = tuple[SignedLetter, ...]


class MachineError(ValueError):
    """A machine definition violates its invariants."""


@dataclass(frozen=True)
class StateDef:
    """One machine state: a root permutation plus one transition word per letter."""

    name: str
    offset: int
    perm: Perm  # 0-based images over degree(offset) points
    transitions: tuple[LetterWord, ...]


@dataclass(frozen=True)
class Machine:
    """A finite wreath-recursion machine over a fixed tree shape."""

    shape: TreeShape
    states: tuple[StateDef, ...]
    involutions: frozenset[str] = field(default=frozenset(), compare=False)

    @classmethod
    def create(
        cls,
        shape: TreeShape,
        states: list[StateDef] | tuple[StateDef, ...],
        detect_involutions: bool = True,
    ) -> "Machine":
        """Validate and build a machine; optionally certify involutive states.

        A state s is marked involutive only after ``is_identity(s*s)``
        certifies the relation, which later lets word enumeration cancel
        adjacent equal letters soundly.
        """
        canon = []
        names = set()
        for st in states:
            if st.name in names:
                raise MachineError(f"duplicate state name {st.name!r}")
            names.add(st.name)
            canon.append(
                StateDef(st.name, shape.canonical_offset(st.offset), st.perm, st.transitions)
            )
        by_name = {st.name: st for st in canon}
        for st in canon:
            d = shape.degree(st.offset)
            if len(st.perm) != d or not is_perm(st.perm):
                raise MachineError(
                    f"state {st.name!r}: perm {st.perm} is not a permutation of {d} points"
                )
            if len(st.transitions) != d:
                raise MachineError(
                    f"state {st.name!r}: expected {d} transition words, got {len(st.transitions)}"
                )
            child_offset = shape.canonical_offset(st.offset + 1)
            for letter, tword in enumerate(st.transitions, start=1):
                for name, exp in tword:
                    if exp not in (1, -1):
                        raise MachineError(
                            f"state {st.name!r}, letter {letter}: exponent {exp} not in (1, -1)"
                        )
                    ref = by_name.get(name)
                    if ref is None:
                        raise MachineError(
                            f"state {st.name!r}, letter {letter}: unknown state {name!r}"
                        )
                    if ref.offset != child_offset:
                        raise MachineError(
                            f"state {st.name!r}, letter {letter}: transition uses "
                            f"{name!r} at offset {ref.offset}, expected offset {child_offset}"
                        )
        machine = cls(shape, tuple(canon))
        if detect_involutions:
            invs = set()
            for st in canon:
                e = machine.element([(st.name, 1), (st.name, 1)], st.offset)
                try:
                    if is_identity(e, budget=20_000):
                        invs.add(st.name)
                except BudgetExceeded:
                    pass
            object.__setattr__(machine, "involutions", frozenset(invs))
        return machine

    @cached_property
    def _by_name(self) -> dict[str, StateDef]:
        return {st.name: st for st in self.states}

    @cached_property
    def _identity_cache(self) -> dict[tuple[int, LetterWord], bool]:
        return {}

    def state(self, name: str) -> StateDef:
        st = self._by_name.get(name)
        if st is None:
            raise MachineError(f"unknown state {name!r}")
        return st

    def identity(self, offset: int = 0) -> "Element":
        return Element(self, (), self.shape.canonical_offset(offset))

    def generator(self, name: str) -> "Element":
        st = self.state(name)
        return Element(self, ((name, 1),), st.offset)

    def element(self, word, offset: int = 0) -> "Element":
        """Build an element from ``(state name, exponent)`` pairs."""
        offset = self.shape.canonical_offset(offset)
        word = tuple((name, exp) for name, exp in word)
        for name, exp in word:
            st = self.state(name)
            if st.offset != offset:
                raise MachineError(
                    f"state {name!r} lives at offset {st.offset}, element is at {offset}"
                )
            if exp not in (1, -1):
                raise MachineError(f"exponent {exp} not in (1, -1)")
        return Element(self, _reduce_word(word, self.involutions), offset)


def _reduce_word(word: LetterWord, involutions: frozenset[str]) -> LetterWord:
    """Cancel adjacent inverse pairs (and s*s for certified involutions)."""
    out: list[SignedLetter] = []
    for letter in word:
        if out:
            name, exp = letter
            pname, pexp = out[-1]
            if pname == name and (pexp == -exp or name in involutions):
                out.pop()
                continue
        out.append(letter)
    return tuple(out)


@dataclass(frozen=True)
class Element:
    """A word over machine states and their inverses, acting on the tree."""

    machine: Machine
    word: LetterWord
    offset: int = 0

    # -- word algebra ------------------------------------------------

    def __mul__(self, other: "Element") -> "Element":
        return compose(self, other)

    def __pow__(self, k: int) -> "Element":
        if k < 0:
            return inverse(self) ** (-k)
        out = self.machine.identity(self.offset)
        for _ in range(k):
            out = compose(out, self)
        return out

    def inverse(self) -> "Element":
        return inverse(self)

    def is_trivial_word(self) -> bool:
        return not self.word

    # -- action ------------------------------------------------------

    def root_permutation(self) -> Perm:
        return _root_perm(self.machine, self.word, self.offset)

    def section(self, v: Word) -> "Element":
        """The automorphism induced on the subtree at ``v``, one shape down per letter."""
        self.machine.shape.check_vertex(v, self.offset)
        word, offset = self.word, self.offset
        for letter in v:
            word, offset = _section_word(self.machine, word, offset, letter - 1)
        return Element(self.machine, word, offset)

    def apply(self, v: Word) -> Word:
        """Image of the vertex ``v``; a bijection on every level."""
        self.machine.shape.check_vertex(v, self.offset)
        out = []
        word, offset = self.word, self.offset
        for letter in v:
            p = _root_perm(self.machine, word, offset)
            out.append(p[letter - 1] + 1)
            word, offset = _section_word(self.machine, word, offset, letter - 1)
        return tuple(out)

    def level_permutation(self, n: int) -> Perm:
        """The permutation induced on level ``n``, in lexicographic indexing."""
        _check_depth(n)
        memo: dict[tuple[LetterWord, int, int], Perm] = {}
        return _level_perm(self.machine, self.word, self.offset, n, memo)

    def fixes_level(self, n: int) -> bool:
        p = self.level_permutation(n)
        return all(i == x for i, x in enumerate(p))

    def __str__(self) -> str:
        if not self.word:
            return "1"
        return "*".join(name if exp == 1 else f"{name}^-1" for name, exp in self.word)


def _state_perm(machine: Machine, name: str, exp: int) -> Perm:
    p = machine.state(name).perm
    return p if exp == 1 else perm_inv(p)


def _root_perm(machine: Machine, word: LetterWord, offset: int) -> Perm:
    d = machine.shape.degree(offset)
    p = perm_identity(d)
    # rightmost letter acts first: fold left so p = s1 o s2 o ... o sk
    for name, exp in word:
        p = perm_mul(p, _state_perm(machine, name, exp))
    return p


def _letter_section(
    machine: Machine, name: str, exp: int, pos: int
) -> tuple[LetterWord, int]:
    """Section word of a single signed letter at 0-based point ``pos``.

    Returns the section word one level down and the image of ``pos``.
    """
    st = machine.state(name)
    if exp == 1:
        return st.transitions[pos], st.perm[pos]
    j = st.perm.index(pos)  # inverse image
    piece = tuple((n, -e) for n, e in reversed(st.transitions[j]))
    return piece, j


def _section_word(
    machine: Machine, word: LetterWord, offset: int, pos: int
) -> tuple[LetterWord, int]:
    """Section of a word at a 0-based first-level point.

    Walks the word right to left (action order), tracking the point as each
    letter moves it, and concatenates the per-letter sections in the
    original order.
    """
    pieces: list[LetterWord] = []
    for name, exp in reversed(word):
        piece, pos = _letter_section(machine, name, exp, pos)
        pieces.append(piece)
    flat = tuple(letter for piece in reversed(pieces) for letter in piece)
    return _reduce_word(flat, machine.involutions), machine.shape.canonical_offset(offset + 1)


def _level_perm(
    machine: Machine,
    word: LetterWord,
    offset: int,
    n: int,
    memo: dict[tuple[LetterWord, int, int], Perm],
) -> Perm:
    if n == 0:
        return (0,)
    key = (word, offset, n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    shape = machine.shape
    d = shape.degree(offset)
    m = shape.level_size(n - 1, offset + 1)
    root = _root_perm(machine, word, offset)
    out = [0] * (d * m)
    for i in range(d):
        sub_word, sub_offset = _section_word(machine, word, offset, i)
        inner = _level_perm(machine, sub_word, sub_offset, n - 1, memo)
        base_src = i * m
        base_dst = root[i] * m
        for j in range(m):
            out[base_src + j] = base_dst + inner[j]
    result = tuple(out)
    memo[key] = result
    return result


# -- composition ------------------------------------------------------


def _same_context(g: Element, h: Element) -> None:
    if g.machine is not h.machine and g.machine != h.machine:
        raise MachineError("elements belong to different machines")
    if g.offset != h.offset:
        raise MachineError(f"offset mismatch: {g.offset} != {h.offset}")


def compose(g: Element, h: Element) -> Element:
    """The product g*h, acting as v -> g(h(v))."""
    _same_context(g, h)
    return Element(g.machine, _reduce_word(g.word + h.word, g.machine.involutions), g.offset)


def inverse(g: Element) -> Element:
    word = tuple((name, -exp) for name, exp in reversed(g.word))
    return Element(g.machine, word, g.offset)


# -- exact identity testing -------------------------------------------


def is_identity(e: Element, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Exact identity test by breadth-first search over sections.

    ``e`` is the identity iff every reachable section has a trivial root
    permutation.  Section words never grow, so the reachable set is finite
    and the search terminates; a visited-set cap guards against blowup and
    raises :class:`BudgetExceeded` when hit (a distinct third outcome).
    """
    machine = e.machine
    cache = machine._identity_cache
    start = (e.offset, e.word)
    known = cache.get(start)
    if known is not None:
        return known
    seen: set[tuple[int, LetterWord]] = set()
    queue: list[tuple[int, LetterWord]] = [start]
    seen.add(start)
    qi = 0
    while qi < len(queue):
        offset, word = queue[qi]
        qi += 1
        if not word:
            continue
        known = cache.get((offset, word))
        if known is True:
            continue
        if known is False:
            cache[start] = False
            return False
        root = _root_perm(machine, word, offset)
        if any(i != x for i, x in enumerate(root)):
            cache[(offset, word)] = False
            cache[start] = False
            return False
        for pos in range(len(root)):
            child = _section_word(machine, word, offset, pos)
            child_key = (child[1], child[0])
            if child_key not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(
                        f"identity test on word of length {len(e.word)} exhausted its node budget",
                        budget,
                    )
                seen.add(child_key)
                queue.append(child_key)
    # every reachable section acts trivially at its root: all are identities
    for key in seen:
        cache[key] = True
    return True


def equals(g: Element, h: Element, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """g == h as automorphisms, decided via ``is_identity(g * h^-1)``."""
    _same_context(g, h)
    return is_identity(compose(g, inverse(h)), budget=budget)


def commute(g: Element, h: Element, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    return is_identity(
        compose(compose(g, h), inverse(compose(h, g))), budget=budget
    )


def bounded_order(
    e: Element, bound: int, budget: int = DEFAULT_NODE_BUDGET
) -> SearchOutcome[int]:
    """Least k <= bound with e^k = 1, or Inconclusive.

    The full order problem is undecidable here, so nonexistence is never
    asserted: an element of infinite order simply comes back Inconclusive.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    power = e
    for k in range(1, bound + 1):
        if is_identity(power, budget=budget):
            return Certified(k)
        power = compose(power, e)
    return Inconclusive(f"no power k <= {bound} of {e} is the identity")


def portrait(e: Element, depth: int) -> dict[Word, Perm]:
    """Per-vertex root permutations of ``e`` down to (excluding) ``depth``.

    A finite-depth description of the automorphism, useful for display and
    fingerprinting; vertices of depth < ``depth`` are the domain.
    """
    _check_depth(depth)
    out: dict[Word, Perm] = {}
    stack: list[tuple[Word, LetterWord, int]] = [((), e.word, e.offset)]
    while stack:
        v, word, offset = stack.pop()
        if len(v) >= depth:
            continue
        root = _root_perm(e.machine, word, offset)
        out[v] = root
        for pos in range(len(root)):
            child = _section_word(e.machine, word, offset, pos)
            stack.append((v + (pos + 1,), child[0], child[1]))
    return dict(sorted(out.items()))


def portrait_str(e: Element, depth: int) -> str:
    from .tree import vertex_str

    parts = []
    for v, p in portrait(e, depth).items():
        parts.append(f"{vertex_str(v)}: {perm_str(p)}")
    return "; ".join(parts)
