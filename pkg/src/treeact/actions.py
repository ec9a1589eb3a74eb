"""Group actions on rooted trees: transitivity, stabilizers, Schreier data.

An :class:`ActionSpec` is a machine together with a generating set of
elements at the root.  Everything here operates either on words in the
generators (ball searches) or on the induced finite permutation actions on
levels (orbit/stabilizer computations), matching the principle that
stabilizer arithmetic happens in the finite level quotients.

All searches are bounded and return three-valued outcomes; nonexistence is
never asserted.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .autom import Element, Machine, compose, inverse, is_identity
from .outcomes import BudgetExceeded, Certified, Inconclusive, SearchOutcome
from .permutations import Perm, perm_identity, perm_inv, perm_mul
from .tree import Word, vertex_str


class NotTransitiveError(ValueError):
    def __init__(self, level: int, orbit_size: int, level_size: int):
        super().__init__(
            f"action is not transitive on level {level}: "
            f"orbit has {orbit_size} of {level_size} vertices"
        )
        self.level = level


class TowerValidationError(ValueError):
    """A level tower violates one of its structural invariants."""


class RigidWitnessError(ValueError):
    """No rigid witness was found for some vertex of the requested level."""

    def __init__(self, vertex: Word, radius: int):
        super().__init__(
            f"no rigid stabilizer witness found for vertex {vertex_str(vertex)} "
            f"within radius {radius}"
        )
        self.vertex = vertex


@dataclass(frozen=True)
class ActionSpec:
    """A named action: a machine plus root-level generators."""

    name: str
    machine: Machine
    generators: tuple[Element, ...]
    gen_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.generators:
            raise ValueError("generator list must be nonempty")
        for g in self.generators:
            if g.machine is not self.machine and g.machine != self.machine:
                raise ValueError("all generators must share the action's machine")
            if g.offset != 0:
                raise ValueError("generators must live at the root (offset 0)")
        if not self.gen_names:
            object.__setattr__(self, "gen_names", tuple(str(g) for g in self.generators))
        elif len(self.gen_names) != len(self.generators):
            raise ValueError("gen_names must match generators")

    @cached_property
    def _gen_involution(self) -> tuple[bool, ...]:
        flags = []
        for g in self.generators:
            try:
                flags.append(is_identity(compose(g, g), budget=20_000))
            except BudgetExceeded:
                flags.append(False)
        return tuple(flags)

    def generator_named(self, name: str) -> Element:
        for g, n in zip(self.generators, self.gen_names):
            if n == name:
                return g
        raise KeyError(f"action {self.name!r} has no generator named {name!r}")


# ---------------------------------------------------------------------------
# ball enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _BallLetter:
    elem: Element
    label: str
    inv_index: int  # alphabet index of the inverse letter (self for involutions)


def _ball_alphabet(
    generators: Sequence[Element],
    labels: Sequence[str],
    involutions: Sequence[bool],
) -> list[_BallLetter]:
    letters: list[_BallLetter] = []
    for g, label, inv in zip(generators, labels, involutions):
        if inv:
            i = len(letters)
            letters.append(_BallLetter(g, label, i))
        else:
            i = len(letters)
            letters.append(_BallLetter(g, label, i + 1))
            letters.append(_BallLetter(inverse(g), f"{label}^-1", i))
    return letters


def _ball_iter(
    alphabet: Sequence[_BallLetter],
    radius: int,
    level: int | None = None,
) -> Iterator[tuple[Element, Perm | None]]:
    """Breadth-first reduced words over the alphabet, identity first.

    Words are reduced in the free sense over the alphabet (no letter
    followed by its inverse), which enumerates the literal-word-deduplicated
    ball exactly once.  When ``level`` is given, yields the level
    permutation too, maintained incrementally along the tree.
    """
    if not alphabet:
        return
    machine = alphabet[0].elem.machine
    ident = machine.identity()
    root_perm = ident.level_permutation(level) if level is not None else None
    yield ident, root_perm
    letter_perms = (
        [letter.elem.level_permutation(level) for letter in alphabet]
        if level is not None
        else None
    )
    # queue entries: (element, index of last letter, perm at level)
    frontier: deque[tuple[Element, int, Perm | None]] = deque()
    for i, letter in enumerate(alphabet):
        p = letter_perms[i] if letter_perms is not None else None
        frontier.append((letter.elem, i, p))
        yield letter.elem, p
    for _ in range(radius - 1):
        nxt: deque[tuple[Element, int, Perm | None]] = deque()
        while frontier:
            elem, last, perm = frontier.popleft()
            for i, letter in enumerate(alphabet):
                if alphabet[last].inv_index == i:
                    continue  # would cancel; that word was already enumerated
                child = compose(elem, letter.elem)
                cp = perm_mul(perm, letter_perms[i]) if perm is not None else None
                nxt.append((child, i, cp))
                yield child, cp
        frontier = nxt


def ball(action: ActionSpec, radius: int) -> Iterator[Element]:
    """All products of <= ``radius`` generators/inverses, literal-word deduplicated.

    Over-counts group elements (no group-equality dedup) but is sound and
    deterministic: breadth-first, generator order as declared.
    """
    alphabet = _ball_alphabet(action.generators, action.gen_names, action._gen_involution)
    for elem, _ in _ball_iter(alphabet, radius):
        yield elem


def ball_elements(action: ActionSpec, radius: int, include_identity: bool = False) -> list[Element]:
    out = list(ball(action, radius))
    return out if include_identity else [e for e in out if e.word]


# ---------------------------------------------------------------------------
# Schreier graphs and orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchreierGraph:
    """Level action of the generators: one permutation row per generator."""

    level: int
    vertices: tuple[Word, ...]
    perms: tuple[Perm, ...]
    gen_names: tuple[str, ...]

    def to_dot(self) -> str:
        lines = [f"digraph schreier_level{self.level} {{"]
        names = [vertex_str(v) for v in self.vertices]
        for name in names:
            lines.append(f'  "{name}";')
        for gname, perm in zip(self.gen_names, self.perms):
            for x, y in enumerate(perm):
                lines.append(f'  "{names[x]}" -> "{names[y]}" [label="{gname}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def schreier_graph(action: ActionSpec, n: int) -> SchreierGraph:
    vertices = tuple(action.machine.shape.level_vertices(n))
    perms = tuple(g.level_permutation(n) for g in action.generators)
    return SchreierGraph(n, vertices, perms, action.gen_names)


def _orbit(perms: Sequence[Perm], start: int) -> list[int]:
    """Orbit of a point under permutations and their inverses, BFS order."""
    gens = list(perms) + [perm_inv(p) for p in perms]
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for p in gens:
            y = p[x]
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def is_level_transitive(action: ActionSpec, n: int) -> bool:
    if n == 0:
        return True
    size = action.machine.shape.level_size(n)
    perms = [g.level_permutation(n) for g in action.generators]
    return len(_orbit(perms, 0)) == size


def check_spherically_transitive(action: ActionSpec, depth: int) -> None:
    """Raise :class:`NotTransitiveError` at the first non-transitive level <= depth."""
    for k in range(1, depth + 1):
        size = action.machine.shape.level_size(k)
        perms = [g.level_permutation(k) for g in action.generators]
        orb = len(_orbit(perms, 0))
        if orb != size:
            raise NotTransitiveError(k, orb, size)


# ---------------------------------------------------------------------------
# stabilizers
# ---------------------------------------------------------------------------


def vertex_stabilizer_gens(action: ActionSpec, v: Word) -> list[Element]:
    """Schreier generators of the stabilizer of ``v`` in the generated group.

    Works in the level-|v| quotient: computes the orbit of ``v`` with a
    transversal of generator words, then forms t(g(x))^-1 * g * t(x).
    Every returned element is checked to fix ``v``.
    """
    shape = action.machine.shape
    shape.check_vertex(v)
    n = len(v)
    if n == 0:
        return list(action.generators)
    perms = [g.level_permutation(n) for g in action.generators]
    start = shape.vertex_index(v)
    transversal: dict[int, Element] = {start: action.machine.identity()}
    queue = deque([start])
    gens_with_inv = [(g, p) for g, p in zip(action.generators, perms)]
    gens_with_inv += [(inverse(g), perm_inv(p)) for g, p in zip(action.generators, perms)]
    while queue:
        x = queue.popleft()
        for g, p in gens_with_inv:
            y = p[x]
            if y not in transversal:
                transversal[y] = compose(g, transversal[x])
                queue.append(y)
    out: list[Element] = []
    seen_words = set()
    for x in transversal:
        for g, p in zip(action.generators, perms):
            u = compose(inverse(transversal[p[x]]), compose(g, transversal[x]))
            if not u.word or u.word in seen_words:
                continue
            seen_words.add(u.word)
            if u.apply(v) != v:
                raise AssertionError(f"Schreier generator {u} fails to fix {vertex_str(v)}")
            out.append(u)
    return out


def stabilizer_chain_gens(action: ActionSpec, vertices: Sequence[Word]) -> list[Element]:
    """Generators of the simultaneous stabilizer of ``vertices``, by iterated Schreier.

    Generator words are deduplicated literally; the count can grow with each
    stabilized point, so callers should keep ``vertices`` short.
    """
    current = ActionSpec(action.name, action.machine, action.generators, action.gen_names)
    for v in vertices:
        gens = vertex_stabilizer_gens(current, v)
        if not gens:
            gens = [action.machine.identity()]
        current = ActionSpec(
            f"{action.name}|stab", action.machine, tuple(gens), tuple(str(g) for g in gens)
        )
    return [g for g in current.generators if g.word]


def fixes_subtree(e: Element, v: Word, budget: int | None = None) -> bool:
    """Exact: e fixes the whole subtree at v (v itself and everything below)."""
    if e.apply(v) != v:
        return False
    section = e.section(v)
    if budget is None:
        return is_identity(section)
    return is_identity(section, budget=budget)


# ---------------------------------------------------------------------------
# bounded searches
# ---------------------------------------------------------------------------


def _rigid_support(e: Element, level_vertices: Sequence[Word]) -> Word | None:
    """If e fixes all of ``level_vertices`` and all their subtrees except
    exactly one, return that vertex; otherwise None."""
    moved: Word | None = None
    for w in level_vertices:
        if e.apply(w) != w:
            return None
    for w in level_vertices:
        if not is_identity(e.section(w)):
            if moved is not None:
                return None
            moved = w
    return moved


def rigid_stabilizer_search(
    action: ActionSpec, v: Word, radius: int
) -> SearchOutcome[Element]:
    """Search the radius ball for a nontrivial element supported on the subtree at v.

    A certified witness fixes the whole level of ``v`` and every subtree
    rooted off ``v``; the ball is enumerated breadth-first with literal-word
    deduplication only.
    """
    shape = action.machine.shape
    shape.check_vertex(v)
    n = len(v)
    level = shape.level_vertices(n)
    alphabet = _ball_alphabet(action.generators, action.gen_names, action._gen_involution)
    for elem, perm in _ball_iter(alphabet, radius, level=n):
        if not elem.word:
            continue
        if any(i != x for i, x in enumerate(perm)):
            continue
        if _rigid_support(elem, level) == v:
            return Certified(elem)
    return Inconclusive(f"no rigid witness for {vertex_str(v)} in ball of radius {radius}")


def _fill_witnesses_by_conjugation(
    action: ActionSpec, n: int, witnesses: dict[Word, Element]
) -> None:
    """Extend a partial witness table using h * Rist(v) * h^-1 = Rist(h(v))."""
    if not witnesses:
        return
    shape = action.machine.shape
    level = shape.level_vertices(n)
    missing = [v for v in level if v not in witnesses]
    if not missing:
        return
    perms = [g.level_permutation(n) for g in action.generators]
    start = shape.vertex_index(next(iter(witnesses)))
    transversal: dict[int, Element] = {start: action.machine.identity()}
    queue = deque([start])
    gens_with_inv = list(zip(action.generators, perms))
    gens_with_inv += [(inverse(g), perm_inv(p)) for g, p in zip(action.generators, perms)]
    while queue:
        x = queue.popleft()
        for g, p in gens_with_inv:
            y = p[x]
            if y not in transversal:
                transversal[y] = compose(g, transversal[x])
                queue.append(y)
    for v in missing:
        vi = shape.vertex_index(v)
        if vi not in transversal:
            continue
        for w, gw in witnesses.items():
            wi = shape.vertex_index(w)
            if wi not in transversal:
                continue
            u = compose(transversal[vi], inverse(transversal[wi]))
            cand = compose(u, compose(gw, inverse(u)))
            if _rigid_support(cand, level) == v:
                witnesses[v] = cand
                break


def rigid_witnesses_for_level(
    action: ActionSpec,
    n: int,
    radius: int,
    refine: bool = True,
    refine_radius: int = 8,
    refine_budget: int = 2_000_000,
) -> dict[Word, Element]:
    """One rigid-stabilizer witness per vertex of level ``n`` (as far as found).

    Strategy: plain ball search first, then conjugation to move witnesses
    around the level, then (for n >= 2, if still incomplete) a second ball
    search over Schreier generators of the stabilizer of the previous level.
    The refined ball reaches elements whose plain word length is far beyond
    any feasible radius; every witness it returns is re-verified.
    """
    shape = action.machine.shape
    level = shape.level_vertices(n)
    witnesses: dict[Word, Element] = {}

    alphabet = _ball_alphabet(action.generators, action.gen_names, action._gen_involution)
    for elem, perm in _ball_iter(alphabet, radius, level=n):
        if len(witnesses) == len(level):
            break
        if not elem.word or any(i != x for i, x in enumerate(perm)):
            continue
        support = _rigid_support(elem, level)
        if support is not None and support not in witnesses:
            witnesses[support] = elem
    _fill_witnesses_by_conjugation(action, n, witnesses)

    if len(witnesses) < len(level) and refine and n >= 2:
        stab_gens = stabilizer_chain_gens(action, shape.level_vertices(n - 1))
        if stab_gens:
            flags = []
            for g in stab_gens:
                try:
                    flags.append(is_identity(compose(g, g), budget=20_000))
                except BudgetExceeded:
                    flags.append(False)
            refined = _ball_alphabet(stab_gens, [str(g) for g in stab_gens], flags)
            visited = 0
            for elem, perm in _ball_iter(refined, refine_radius, level=n):
                visited += 1
                if visited > refine_budget or len(witnesses) == len(level):
                    break
                if not elem.word or any(i != x for i, x in enumerate(perm)):
                    continue
                support = _rigid_support(elem, level)
                if support is not None and support not in witnesses:
                    witnesses[support] = elem
                    _fill_witnesses_by_conjugation(action, n, witnesses)
    return witnesses


def lsf_certificate(
    action: ActionSpec, K: Iterable[Element], depth: int
) -> SearchOutcome[Word]:
    """Find a vertex moved by every nontrivial element of the finite set K.

    Identity elements are filtered out first (their presence is harmless for
    the property being certified).  Vertices are scanned breadth-first in
    lexicographic order down to ``depth``.
    """
    nontrivial = [k for k in K if not is_identity(k)]
    if not nontrivial:
        return Certified(())
    shape = action.machine.shape
    for d in range(depth + 1):
        for v in shape.level_vertices(d):
            if all(k.apply(v) != v for k in nontrivial):
                return Certified(v)
    return Inconclusive(f"no jointly moved vertex up to depth {depth}")


def upsilon(action: ActionSpec, K: Iterable[Element], v: Word) -> list[Element]:
    """The subset of K fixing the vertex v.

    Monotone under descent: if v is a prefix of w then upsilon(w) is a
    subset of upsilon(v).
    """
    action.machine.shape.check_vertex(v)
    return [k for k in K if k.apply(v) == v]


def joint_free_tuple(
    action: ActionSpec, K: Iterable[Element], arity: int, depth: int
) -> SearchOutcome[tuple[Word, ...]]:
    """A tuple of vertices whose joint stabilizer misses every nontrivial k in K.

    Greedy: walk K, and for each element not yet moved by a chosen vertex,
    pick the first vertex (breadth-first) that it moves.  The tuple is
    padded with the root up to ``arity``.
    """
    if arity < 1:
        raise ValueError(f"arity must be >= 1, got {arity}")
    nontrivial = [k for k in K if not is_identity(k)]
    shape = action.machine.shape
    chosen: list[Word] = []
    for k in nontrivial:
        if any(k.apply(v) != v for v in chosen):
            continue
        found = None
        for d in range(depth + 1):
            for v in shape.level_vertices(d):
                if k.apply(v) != v:
                    found = v
                    break
            if found is not None:
                break
        if found is None:
            return Inconclusive(f"{k} fixes every vertex up to depth {depth}")
        chosen.append(found)
        if len(chosen) > arity:
            return Inconclusive(
                f"needed more than {arity} vertices to separate {len(nontrivial)} elements"
            )
    while len(chosen) < arity:
        chosen.append(())
    for k in nontrivial:
        assert any(k.apply(v) != v for v in chosen)
    return Certified(tuple(chosen))


def fixing_subset_search(
    action: ActionSpec,
    n: int,
    radius: int,
    require_level_fixed: bool = False,
) -> SearchOutcome[tuple[frozenset[Word], Element]]:
    """Find a nontrivial ball element fixing as many level-n subtrees as possible.

    Returns the witness together with A(g) = set of level-n vertices whose
    whole subtree g fixes, maximizing |A(g)| over the ball; Inconclusive if
    no nontrivial element fixes any subtree.  With ``require_level_fixed``
    the search is restricted to elements fixing level n pointwise.
    """
    if n < 1 or radius < 1:
        raise ValueError("need n >= 1 and radius >= 1")
    shape = action.machine.shape
    level = shape.level_vertices(n)
    best: tuple[frozenset[Word], Element] | None = None
    alphabet = _ball_alphabet(action.generators, action.gen_names, action._gen_involution)
    for elem, perm in _ball_iter(alphabet, radius, level=n):
        if not elem.word:
            continue
        if require_level_fixed and any(i != x for i, x in enumerate(perm)):
            continue
        fixed = frozenset(w for w in level if fixes_subtree(elem, w))
        if len(fixed) == len(level):
            continue  # fixes everything at and below level n: the identity
        if fixed and (best is None or len(fixed) > len(best[0])):
            best = (fixed, elem)
            if len(fixed) == len(level) - 1:
                break
    if best is None:
        mode = "level-fixing " if require_level_fixed else ""
        return Inconclusive(
            f"no nontrivial {mode}element of the radius-{radius} ball fixes a level-{n} subtree"
        )
    return Certified(best)


# ---------------------------------------------------------------------------
# coset chain and level towers
# ---------------------------------------------------------------------------


def chain_indices(action: ActionSpec, N: int) -> list[int]:
    """Indices [St(v_n) : St(v_{n+1})] along the leftmost ray, for n < N.

    The action must be transitive on every level up to N (checked; the
    failing level is named).  Stabilizers are handled in the level-N
    permutation quotient via iterated Schreier generators, per the general
    principle that all stabilizer arithmetic happens on finite levels.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    shape = action.machine.shape
    check_spherically_transitive(action, N)
    sizes = [shape.level_size(k) for k in range(N + 1)]
    perms_n = [g.level_permutation(N) for g in action.generators]

    def block_image(p: Perm, b: int, m: int) -> int:
        return p[b * m] // m

    indices: list[int] = []
    current: list[Perm] = list(dict.fromkeys(perms_n))
    for n in range(N):
        m = sizes[N] // sizes[n + 1]
        # v_{n+1} = 1^(n+1) is block 0 at level n+1
        transversal: dict[int, Perm] = {0: perm_identity(sizes[N])}
        queue = deque([0])
        gens_all = current + [perm_inv(p) for p in current]
        while queue:
            x = queue.popleft()
            for p in gens_all:
                y = block_image(p, x, m)
                if y not in transversal:
                    transversal[y] = perm_mul(p, transversal[x])
                    queue.append(y)
        indices.append(len(transversal))
        new_gens: dict[Perm, None] = {}
        for x, t in transversal.items():
            for p in current:
                u = perm_mul(perm_inv(transversal[block_image(p, x, m)]), perm_mul(p, t))
                if any(i != im for i, im in enumerate(u)):
                    new_gens[u] = None
        current = list(new_gens) or [perm_identity(sizes[N])]
    return indices


@dataclass(frozen=True)
class LevelTower:
    """Per-level permutation actions plus parent maps between levels.

    The bridge from tree actions (or abstract coset tables) to matrices and
    spectra.  Invariants: rows are permutations, parent maps are uniformly
    d-to-1, and parents are equivariant under every generator.
    """

    level_sizes: tuple[int, ...]
    perms: tuple[tuple[Perm, ...], ...]  # perms[n][g]
    parent_maps: tuple[tuple[int, ...], ...]  # parent_maps[n] for n >= 1; [0] is ()
    gen_names: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.level_sizes) - 1

    def validate(self) -> None:
        if not self.level_sizes or self.level_sizes[0] != 1:
            raise TowerValidationError("tower must start with a single root vertex")
        for n, size in enumerate(self.level_sizes):
            if len(self.perms[n]) != len(self.gen_names):
                raise TowerValidationError(f"level {n}: wrong number of generator rows")
            for gname, p in zip(self.gen_names, self.perms[n]):
                if len(p) != size or sorted(p) != list(range(size)):
                    raise TowerValidationError(
                        f"level {n}: row for generator {gname!r} is not a permutation"
                    )
        for n in range(1, len(self.level_sizes)):
            pm = self.parent_maps[n]
            size, prev = self.level_sizes[n], self.level_sizes[n - 1]
            if len(pm) != size:
                raise TowerValidationError(f"level {n}: parent map has wrong length")
            fibers: dict[int, int] = {}
            for x, par in enumerate(pm):
                if not (0 <= par < prev):
                    raise TowerValidationError(
                        f"level {n}: parent of point {x} is {par}, outside level {n - 1}"
                    )
                fibers[par] = fibers.get(par, 0) + 1
            if size % prev != 0 or set(fibers.values()) != {size // prev}:
                raise TowerValidationError(
                    f"level {n}: parent map is not uniformly {size}/{prev}-to-1"
                )
            for g, gname in enumerate(self.gen_names):
                p_here, p_up = self.perms[n][g], self.perms[n - 1][g]
                for x in range(size):
                    if pm[p_here[x]] != p_up[pm[x]]:
                        raise TowerValidationError(
                            f"equivariance fails at level {n}, generator {gname!r}, "
                            f"point {x}: parent(g(x)) = {pm[p_here[x]]} but "
                            f"g(parent(x)) = {p_up[pm[x]]}"
                        )


def tower_from_action(action: ActionSpec, N: int) -> LevelTower:
    """Levels 0..N of the action; parents drop the last letter."""
    shape = action.machine.shape
    sizes = tuple(shape.level_size(n) for n in range(N + 1))
    perms = tuple(
        tuple(g.level_permutation(n) for g in action.generators) for n in range(N + 1)
    )
    parents: list[tuple[int, ...]] = [()]
    for n in range(1, N + 1):
        d = shape.degree(n - 1)
        parents.append(tuple(x // d for x in range(sizes[n])))
    tower = LevelTower(sizes, perms, tuple(parents), action.gen_names)
    tower.validate()
    return tower


def tower_from_tables(
    perms: Sequence[Sequence[Sequence[int]]],
    parent_maps: Sequence[Sequence[int]],
    gen_names: Sequence[str] | None = None,
) -> LevelTower:
    """Build a tower from raw permutation tables and parent maps.

    ``perms[n][g]`` is the permutation of generator g on level n;
    ``parent_maps[n]`` (for n >= 1) maps level-n points to level-(n-1)
    points.  All invariants are checked, with errors naming the level,
    generator and point.
    """
    if not perms:
        raise TowerValidationError("need at least the root level")
    n_gens = len(perms[0])
    names = tuple(gen_names) if gen_names else tuple(f"g{i}" for i in range(n_gens))
    sizes = tuple(len(level[0]) if level else 0 for level in perms)
    packed = tuple(tuple(tuple(p) for p in level) for level in perms)
    parents: list[tuple[int, ...]] = [()]
    for pm in parent_maps:
        parents.append(tuple(pm))
    if len(parents) != len(packed):
        raise TowerValidationError(
            f"expected {len(packed) - 1} parent maps, got {len(parents) - 1}"
        )
    tower = LevelTower(sizes, packed, tuple(parents), names)
    tower.validate()
    return tower


# ---------------------------------------------------------------------------
# free-ball certificate
# ---------------------------------------------------------------------------


def free_ball_certificate(
    action: ActionSpec, length: int, max_level: int = 12
) -> SearchOutcome[tuple[int, int]]:
    """Certify that no nontrivial reduced word of length <= ``length`` over the
    generators and their inverses is the identity.

    Method: enumerate all freely reduced words of length <= ceil(length/2)
    and look for a level k where they all induce distinct permutations.  Any
    reduced word w of length <= ``length`` splits as u*v with both halves in
    the enumerated set and no cancellation at the junction; if w acted
    trivially at level k then u and v^-1 would induce the same permutation,
    hence be the same word, contradicting reducedness.  Certified value is
    (separating level, number of half-words).
    """
    import numpy as np

    half = (length + 1) // 2
    gens = list(action.generators) + [inverse(g) for g in action.generators]
    inv_of = [i + len(action.generators) for i in range(len(action.generators))] + list(
        range(len(action.generators))
    )
    # BFS over freely reduced words, recorded as (parent index, letter index)
    parent_ix: list[int] = [-1]
    letter_ix: list[int] = [-1]
    last_letter: list[int] = [-1]
    layer = [0]
    for _ in range(half):
        nxt = []
        for w in layer:
            for i in range(len(gens)):
                if last_letter[w] != -1 and inv_of[last_letter[w]] == i:
                    continue
                parent_ix.append(w)
                letter_ix.append(i)
                last_letter.append(i)
                nxt.append(len(parent_ix) - 1)
        layer = nxt
    count = len(parent_ix)
    for k in range(1, max_level + 1):
        size = action.machine.shape.level_size(k)
        gen_rows = [np.array(g.level_permutation(k), dtype=np.int64) for g in gens]
        rows = np.empty((count, size), dtype=np.uint32)
        rows[0] = np.arange(size, dtype=np.uint32)
        for w in range(1, count):
            rows[w] = rows[parent_ix[w]][gen_rows[letter_ix[w]]]
        if np.unique(rows, axis=0).shape[0] == count:
            return Certified((k, count))
    return Inconclusive(
        f"half-ball of {count} reduced words not separated by any level <= {max_level}"
    )
