"""Evaluating the tree representation and its tensor powers exactly.

The permutation representation of an action sends a group element g to the
operator permuting the vertex basis, delta_v -> delta_{g(v)}.  Everything
here evaluates algebra elements columnwise on truncated bases (vertices up
to a chosen depth); the operator is never materialized.  The truncation is
sound for these checks because levels are invariant: images of depth-k
vertices stay at depth k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .actions import ActionSpec, RigidWitnessError, rigid_witnesses_for_level
from .autom import Element, is_identity
from .groupalg import AlgebraElement, kernel_product
from .outcomes import BudgetExceeded
from .tree import Word, vertex_str

#: Default cap on tuple-term evaluations in tensor-power vanishing checks.
DEFAULT_TENSOR_BUDGET = 10**7


@dataclass(frozen=True)
class FormalVector:
    """A finite rational combination of basis tensors delta_{z1} x ... x delta_{zp}."""

    entries: tuple[tuple[tuple[Word, ...], Fraction], ...]

    @classmethod
    def build(cls, data: dict[tuple[Word, ...], Fraction]) -> "FormalVector":
        items = tuple(sorted((k, v) for k, v in data.items() if v != 0))
        if items:
            arities = {len(k) for k, _ in items}
            if len(arities) != 1:
                raise ValueError("mixed arities in formal vector")
        return cls(items)

    def is_zero(self) -> bool:
        return not self.entries

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for key, c in self.entries:
            basis = "x".join(vertex_str(v) for v in key)
            parts.append(f"({c})*d[{basis}]")
        return " + ".join(parts)


def rho_apply(a: AlgebraElement, v: Word) -> FormalVector:
    """The image of the basis vector at ``v`` under the algebra element.

    Merging happens on literal vertex words, so no group-equality queries
    are ever needed here.
    """
    acc: dict[tuple[Word, ...], Fraction] = {}
    for c, g in a.terms:
        key = (g.apply(v),)
        acc[key] = acc.get(key, Fraction(0)) + c
    return FormalVector.build(acc)


def _vertices_to_depth(a: AlgebraElement, depth: int) -> list[Word]:
    shape = a.machine.shape
    out: list[Word] = []
    for k in range(depth + 1):
        out.extend(shape.level_vertices(k, a.offset))
    return out


def _term_vertex_maps(
    a: AlgebraElement, vertices: list[Word]
) -> list[dict[Word, Word]]:
    return [{v: g.apply(v) for v in vertices} for _, g in a.terms]


def vanishes_to_depth(a: AlgebraElement, depth: int) -> bool:
    """Exact check that the element kills every basis vector of depth <= depth.

    This certifies vanishing on the truncated space only; for finite-state
    elements whose activity is exhausted above the certificate depth the
    conclusion extends to the full space, but that extension is a remark,
    not a return value.
    """
    vertices = _vertices_to_depth(a, depth)
    maps = _term_vertex_maps(a, vertices)
    coeffs = [c for c, _ in a.terms]
    for v in vertices:
        acc: dict[Word, Fraction] = {}
        for c, m in zip(coeffs, maps):
            w = m[v]
            acc[w] = acc.get(w, Fraction(0)) + c
        if any(x != 0 for x in acc.values()):
            return False
    return True


def tensor_vanishes_to_depth(
    a: AlgebraElement,
    power: int,
    depth: int,
    budget: int = DEFAULT_TENSOR_BUDGET,
) -> bool:
    """Exact vanishing of the power-fold diagonal action on all basis tensors.

    Enumerates every ``power``-tuple of vertices of depth <= ``depth``
    lexicographically with early exit on the first nonzero image.  Raises
    :class:`BudgetExceeded` (a third outcome, never False) if the tuple-term
    count overruns the budget.
    """
    if power < 1:
        raise ValueError(f"power must be >= 1, got {power}")
    if power == 1:
        return vanishes_to_depth(a, depth)
    vertices = _vertices_to_depth(a, depth)
    total = len(vertices) ** power * max(len(a.terms), 1)
    if total > budget:
        raise BudgetExceeded(
            f"tensor check needs {total} tuple-term evaluations", budget
        )
    maps = _term_vertex_maps(a, vertices)
    coeffs = [c for c, _ in a.terms]
    from itertools import product

    for tup in product(vertices, repeat=power):
        acc: dict[tuple[Word, ...], Fraction] = {}
        for c, m in zip(coeffs, maps):
            key = tuple(m[z] for z in tup)
            acc[key] = acc.get(key, Fraction(0)) + c
        if any(x != 0 for x in acc.values()):
            return False
    return True


# ---------------------------------------------------------------------------
# kernel elements of weakly branched actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelReport:
    """Transcript of a kernel-element construction and its verification."""

    action: str
    level: int
    radius: int
    witnesses: tuple[tuple[Word, str], ...]
    raw_terms: int
    power: int
    vanish_depth: int
    vanishes: bool
    nonzero_sections: tuple[tuple[Word, str], ...]

    def render(self) -> str:
        lines = [
            f"kernel element for action {self.action}, level {self.level}, "
            f"search radius {self.radius}",
            f"  witnesses ({len(self.witnesses)}):",
        ]
        for v, w in self.witnesses:
            lines.append(f"    {vertex_str(v)}: {w}")
        lines.append(
            f"  product of {len(self.witnesses)} factors (1 - g_v): "
            f"{self.raw_terms} terms"
        )
        lines.append("  nonzero because each subset product has a distinguishing section:")
        for v, s in self.nonzero_sections:
            lines.append(
                f"    at {vertex_str(v)}: section of its witness is {s} != 1; "
                f"all other witnesses have trivial section there"
            )
        lines.append(
            f"  tensor power {self.power} kills every basis tensor to depth "
            f"{self.vanish_depth}: {self.vanishes}"
        )
        return "\n".join(lines)


def weakly_branched_kernel(
    action: ActionSpec,
    n: int,
    radius: int,
    vanish_depth: int = 4,
    power: int | None = None,
    tensor_budget: int = DEFAULT_TENSOR_BUDGET,
) -> tuple[AlgebraElement, KernelReport]:
    """Build the level-n kernel element from rigid witnesses and verify it.

    Picks one nontrivial rigid-stabilizer witness per level-n vertex
    (raising :class:`RigidWitnessError` naming the first vertex without
    one), forms the product of the factors (1 - g_v), certifies it nonzero
    by the section argument, and checks that the tensor power d^n - 1 of
    the representation kills it on the truncated basis.

    The nonzero certificate is exact: every witness fixes level n, has
    trivial sections at all other level-n vertices and a nontrivial section
    at its own vertex, so distinct subsets of witnesses have products with
    different section patterns and no cancellation can occur.
    """
    shape = action.machine.shape
    level = shape.level_vertices(n)
    witnesses = rigid_witnesses_for_level(action, n, radius)
    for v in level:
        if v not in witnesses:
            raise RigidWitnessError(v, radius)

    nonzero_sections = []
    for v in level:
        g = witnesses[v]
        if not g.fixes_level(n):
            raise AssertionError(f"witness at {vertex_str(v)} does not fix level {n}")
        own = g.section(v)
        if is_identity(own):
            raise AssertionError(f"witness at {vertex_str(v)} has trivial section there")
        for w in level:
            if w != v and not is_identity(g.section(w)):
                raise AssertionError(
                    f"witness at {vertex_str(v)} acts on the subtree at {vertex_str(w)}"
                )
        nonzero_sections.append((v, str(own)))

    ordered = [witnesses[v] for v in level]
    m = kernel_product(ordered, normalize_terms=False)
    if power is None:
        power = shape.level_size(n) - 1
        if power < 1:
            power = 1
    vanishes = tensor_vanishes_to_depth(m, power, vanish_depth, budget=tensor_budget)
    report = KernelReport(
        action=action.name,
        level=n,
        radius=radius,
        witnesses=tuple((v, str(witnesses[v])) for v in level),
        raw_terms=len(m.terms),
        power=power,
        vanish_depth=vanish_depth,
        vanishes=vanishes,
        nonzero_sections=tuple(nonzero_sections),
    )
    return m, report


def level_matrix(tower, n: int, gen_index: int) -> np.ndarray:
    """The 0/1 matrix of a generator's level-n permutation: P[g(x), x] = 1."""
    perm = tower.perms[n][gen_index]
    size = tower.level_sizes[n]
    mat = np.zeros((size, size), dtype=np.int64)
    for x, y in enumerate(perm):
        mat[y, x] = 1
    return mat
