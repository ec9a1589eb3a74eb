"""Exact group-algebra arithmetic over tree automorphisms.

Elements are formal rational combinations of automorphisms.  Coefficients
are exact :class:`fractions.Fraction` values throughout: nullity tests are
meaningless with floats.  Normalization merges terms whose group elements
are equal; group equality is decided exactly but can be expensive, so terms
are first partitioned by level-permutation fingerprints (unequal
fingerprints certify unequal elements) and the word-problem search runs
only inside colliding classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .autom import (
    DEFAULT_NODE_BUDGET,
    Element,
    Machine,
    compose,
    equals,
    inverse,
    is_identity,
)
from .outcomes import BudgetExceeded, Certified, Inconclusive, SearchOutcome

#: Depth to which level permutations are used as cheap inequality
#: certificates before falling back to the exact word-problem search.
FINGERPRINT_DEPTH = 6


@dataclass(frozen=True)
class AlgebraElement:
    """A finite rational combination of group elements.

    ``normalized`` records whether equal group elements have been merged;
    arithmetic on unnormalized elements is still exact, only the term list
    may be redundant.
    """

    machine: Machine
    offset: int
    terms: tuple[tuple[Fraction, Element], ...]
    normalized: bool = False

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return add(self, other)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return add(self, scale(Fraction(-1), other))

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return multiply(self, other)

    def __rmul__(self, c) -> "AlgebraElement":
        return scale(Fraction(c), self)

    def augmentation(self) -> Fraction:
        """Sum of all coefficients (image under the trivial representation)."""
        return sum((c for c, _ in self.terms), Fraction(0))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, g in sorted(self.terms, key=lambda t: (t[1].word,)):
            parts.append(f"({c})*{g}")
        return " + ".join(parts)


def _context(machine: Machine, offset: int, *elems: AlgebraElement) -> None:
    for a in elems:
        if a.machine is not machine and a.machine != machine:
            raise ValueError("algebra elements belong to different machines")
        if a.offset != offset:
            raise ValueError(f"offset mismatch: {a.offset} != {offset}")


def zero(machine: Machine, offset: int = 0) -> AlgebraElement:
    return AlgebraElement(machine, offset, (), normalized=True)


def one(machine: Machine, offset: int = 0) -> AlgebraElement:
    return AlgebraElement(
        machine, offset, ((Fraction(1), machine.identity(offset)),), normalized=True
    )


def from_element(g: Element, coeff=1) -> AlgebraElement:
    return AlgebraElement(
        g.machine, g.offset, ((Fraction(coeff), g),), normalized=True
    )


def one_minus(g: Element) -> AlgebraElement:
    """The fundamental kernel factor 1 - g."""
    return add(one(g.machine, g.offset), from_element(g, -1))


def _merge_by_word(
    terms: tuple[tuple[Fraction, Element], ...]
) -> list[tuple[Fraction, Element]]:
    by_word: dict = {}
    for c, g in terms:
        key = (g.word, g.offset)
        if key in by_word:
            by_word[key] = (by_word[key][0] + c, by_word[key][1])
        else:
            by_word[key] = (c, g)
    return [(c, g) for c, g in by_word.values() if c != 0]


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _context(a.machine, a.offset, b)
    merged = _merge_by_word(a.terms + b.terms)
    return AlgebraElement(a.machine, a.offset, tuple(merged), normalized=False)


def scale(c, a: AlgebraElement) -> AlgebraElement:
    c = Fraction(c)
    if c == 0:
        return zero(a.machine, a.offset)
    return AlgebraElement(
        a.machine, a.offset, tuple((c * ci, g) for ci, g in a.terms), a.normalized
    )


def multiply(
    a: AlgebraElement, b: AlgebraElement, budget: int = DEFAULT_NODE_BUDGET
) -> AlgebraElement:
    """Convolution product, expanded term by term and normalized."""
    _context(a.machine, a.offset, b)
    raw = tuple(
        (ca * cb, compose(ga, gb)) for ca, ga in a.terms for cb, gb in b.terms
    )
    return normalize(
        AlgebraElement(a.machine, a.offset, tuple(_merge_by_word(raw))), budget=budget
    )


def _fingerprint_classes(elems: list[Element]) -> list[list[int]]:
    """Partition indices by level permutations up to FINGERPRINT_DEPTH.

    Elements in different classes are certified distinct; elements in the
    same class still need an exact equality check.
    """
    classes: dict[tuple, list[int]] = {(): list(range(len(elems)))}
    for depth in range(1, FINGERPRINT_DEPTH + 1):
        nxt: dict[tuple, list[int]] = {}
        for key, members in classes.items():
            if len(members) == 1:
                nxt[key] = members
                continue
            for i in members:
                fp = key + (elems[i].level_permutation(depth),)
                nxt.setdefault(fp, []).append(i)
        classes = nxt
        if all(len(m) == 1 for m in classes.values()):
            break
    return list(classes.values())


def normalize(a: AlgebraElement, budget: int = DEFAULT_NODE_BUDGET) -> AlgebraElement:
    """Merge terms with equal group elements; drop zero coefficients.

    Propagates :class:`BudgetExceeded` if an equality inside a colliding
    fingerprint class cannot be decided within the budget; the element can
    then be used unnormalized (arithmetic stays exact, nullity unknown).
    """
    if a.normalized:
        return a
    terms = _merge_by_word(a.terms)
    if len(terms) <= 1:
        return AlgebraElement(a.machine, a.offset, tuple(terms), normalized=True)
    elems = [g for _, g in terms]
    out: list[tuple[Fraction, Element]] = []
    for members in _fingerprint_classes(elems):
        reps: list[tuple[Fraction, Element]] = []
        for i in members:
            c, g = terms[i]
            for j, (cj, gj) in enumerate(reps):
                if equals(g, gj, budget=budget):
                    reps[j] = (cj + c, gj)
                    break
            else:
                reps.append((c, g))
        out.extend((c, g) for c, g in reps if c != 0)
    return AlgebraElement(a.machine, a.offset, tuple(out), normalized=True)


def is_zero(a: AlgebraElement, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Exact nullity test (normalizes first; budget overruns propagate)."""
    return not normalize(a, budget=budget).terms


# ---------------------------------------------------------------------------
# kernel products
# ---------------------------------------------------------------------------


def check_pairwise_commuting(
    elements: list[Element], budget: int = DEFAULT_NODE_BUDGET
) -> None:
    for i, j in combinations(range(len(elements)), 2):
        g, h = elements[i], elements[j]
        comm = compose(compose(g, h), inverse(compose(h, g)))
        if not is_identity(comm, budget=budget):
            raise ValueError(f"elements {i} and {j} do not commute: [{g}, {h}] != 1")


def kernel_expansion(
    elements: list[Element],
) -> list[tuple[frozenset[int], Element]]:
    """The 2^(N+1) signed terms of prod_i (1 - g_i), keyed by index subset.

    The coefficient of the subset S term is (-1)^|S| and its group element
    is the product of the g_i over S in increasing index order.
    """
    machine = elements[0].machine
    expansion: list[tuple[frozenset[int], Element]] = [
        (frozenset(), machine.identity(elements[0].offset))
    ]
    for i, g in enumerate(elements):
        expansion += [(subset | {i}, compose(prod, g)) for subset, prod in expansion]
    return expansion


def kernel_product(
    elements: list[Element],
    budget: int = DEFAULT_NODE_BUDGET,
    normalize_terms: bool = True,
) -> AlgebraElement:
    """The expanded product of the factors (1 - g_i).

    The inputs must pairwise commute (checked; the construction is
    meaningless otherwise).  With ``normalize_terms`` the result has equal
    group elements merged; otherwise terms are merged by literal word only,
    which is still exact for evaluation purposes.
    """
    if not elements:
        raise ValueError("need at least one element")
    machine, offset = elements[0].machine, elements[0].offset
    for g in elements:
        if g.machine is not machine and g.machine != machine:
            raise ValueError("kernel factors belong to different machines")
        if g.offset != offset:
            raise ValueError("kernel factors live at different offsets")
    check_pairwise_commuting(elements, budget=budget)
    raw = tuple(
        (Fraction(-1) ** len(subset), prod) for subset, prod in kernel_expansion(elements)
    )
    a = AlgebraElement(machine, offset, tuple(_merge_by_word(raw)))
    return normalize(a, budget=budget) if normalize_terms else a


def merge_classes(
    expansion: list[tuple[frozenset[int], Element]],
    budget: int = DEFAULT_NODE_BUDGET,
) -> list[list[frozenset[int]]]:
    """Group the expansion subsets whose products are equal group elements.

    This surfaces exactly which cancellations a vanishing kernel product
    relies on: a class containing subsets of both parities yields a relation
    1 = product of g_i over an odd symmetric difference.
    """
    elems = [prod for _, prod in expansion]
    subsets = [s for s, _ in expansion]
    classes: list[list[int]] = []
    for members in _fingerprint_classes(elems):
        buckets: list[list[int]] = []
        for i in members:
            for bucket in buckets:
                if equals(elems[i], elems[bucket[0]], budget=budget):
                    bucket.append(i)
                    break
            else:
                buckets.append([i])
        classes.extend(buckets)
    classes.sort(key=lambda bucket: sorted(tuple(sorted(subsets[i])) for i in bucket))
    return [[subsets[i] for i in bucket] for bucket in classes]


def odd_relations(classes: list[list[frozenset[int]]]) -> list[frozenset[int]]:
    """Odd-size index sets I with prod_{i in I} g_i = 1, from merge classes.

    Whenever two subsets of different parity have equal products, their
    symmetric difference is such a relation.
    """
    out = []
    for bucket in classes:
        for s, t in combinations(bucket, 2):
            diff = s ^ t
            if len(diff) % 2 == 1:
                out.append(diff)
    return out


# ---------------------------------------------------------------------------
# independent tuples (torsion case)
# ---------------------------------------------------------------------------


def independent_tuple_search(
    blocks: list[list[Element]],
    bound: int,
    closure_cap: int = 4096,
    budget: int = DEFAULT_NODE_BUDGET,
) -> SearchOutcome[list[Element]]:
    """Pick one torsion element per block, each outside the group generated so far.

    Candidates across different blocks must commute and be torsion of order
    <= ``bound`` (both checked; violations raise).  Success guarantees the
    kernel product of the tuple is nonzero: a vanishing product would force
    a relation putting some g_i inside the subgroup generated by its
    predecessors.
    """
    from .autom import bounded_order

    chosen: list[Element] = []
    chosen_orders: list[int] = []
    closure: list[Element] | None = None  # None until the first pick
    for bi, block in enumerate(blocks):
        picked = None
        for cand in block:
            if is_identity(cand, budget=budget):
                continue
            for prev in chosen:
                comm = compose(compose(prev, cand), inverse(compose(cand, prev)))
                if not is_identity(comm, budget=budget):
                    raise ValueError(
                        f"candidate {cand} in block {bi} does not commute with chosen {prev}"
                    )
            order = bounded_order(cand, bound, budget=budget)
            if isinstance(order, Inconclusive):
                raise ValueError(
                    f"candidate {cand} in block {bi} is not certified torsion within {bound}"
                )
            if closure is not None and any(
                equals(cand, x, budget=budget) for x in closure
            ):
                continue
            picked = (cand, order.value)
            break
        if picked is None:
            return Inconclusive(
                f"block {bi} has no certified candidate outside the current subgroup"
            )
        cand, order = picked
        chosen.append(cand)
        chosen_orders.append(order)
        base = closure if closure is not None else [cand.machine.identity(cand.offset)]
        new_closure: list[Element] = []
        power = cand.machine.identity(cand.offset)
        for _ in range(order):
            for x in base:
                y = compose(x, power)
                if not any(equals(y, z, budget=budget) for z in new_closure):
                    new_closure.append(y)
                if len(new_closure) > closure_cap:
                    return Inconclusive(
                        f"subgroup closure exceeded cap {closure_cap} after block {bi}"
                    )
            power = compose(power, cand)
        closure = new_closure
    return Certified(chosen)
