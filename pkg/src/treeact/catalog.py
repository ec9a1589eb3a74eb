"""Built-in actions, plus the finite permutation-group checks they need.

The wreath recursions below are standard literature data, embedded with
construction-time relation checks so a transcription error fails fast.
"""

from __future__ import annotations

from functools import lru_cache

from .actions import ActionSpec
from .autom import Machine, StateDef, is_identity
from .permutations import Perm, fixed_points, is_perm, perm_from_cycles, perm_identity, perm_mul
from .tree import TreeShape

BINARY = TreeShape((), (2,))

_SWAP: Perm = (1, 0)
_ID2: Perm = (0, 1)


def _w(*names: str):
    return tuple((name, 1) for name in names)


def _assert_relations(machine: Machine, relations: dict[str, list[tuple[str, int]]]) -> None:
    for label, word in relations.items():
        if not is_identity(machine.element(word)):
            raise AssertionError(f"catalog relation {label} failed to verify")


@lru_cache(maxsize=None)
def odometer() -> ActionSpec:
    """The adding machine on the binary tree: a = (1, a) (1,2).

    Generates a transitive action of the integers; the induced subgroup
    chain halves at every level.
    """
    machine = Machine.create(
        BINARY,
        [StateDef("a", 0, _SWAP, ((), _w("a")))],
    )
    return ActionSpec("odometer", machine, (machine.generator("a"),), ("a",))


@lru_cache(maxsize=None)
def grigorchuk() -> ActionSpec:
    """The first Grigorchuk group: a = (1,1)s, b = (a,c), c = (a,d), d = (1,b)."""
    machine = Machine.create(
        BINARY,
        [
            StateDef("a", 0, _SWAP, ((), ())),
            StateDef("b", 0, _ID2, (_w("a"), _w("c"))),
            StateDef("c", 0, _ID2, (_w("a"), _w("d"))),
            StateDef("d", 0, _ID2, ((), _w("b"))),
        ],
    )
    _assert_relations(
        machine,
        {
            "a^2": [("a", 1), ("a", 1)],
            "b^2": [("b", 1), ("b", 1)],
            "c^2": [("c", 1), ("c", 1)],
            "d^2": [("d", 1), ("d", 1)],
            "bcd": [("b", 1), ("c", 1), ("d", 1)],
        },
    )
    gens = tuple(machine.generator(s) for s in "abcd")
    return ActionSpec("grigorchuk", machine, gens, ("a", "b", "c", "d"))


@lru_cache(maxsize=None)
def lamplighter() -> ActionSpec:
    """The lamplighter group as an automaton group: a = (a,b)s, b = (a,b)."""
    machine = Machine.create(
        BINARY,
        [
            StateDef("a", 0, _SWAP, (_w("a"), _w("b"))),
            StateDef("b", 0, _ID2, (_w("a"), _w("b"))),
        ],
    )
    gens = (machine.generator("a"), machine.generator("b"))
    return ActionSpec("lamplighter", machine, gens, ("a", "b"))


@lru_cache(maxsize=None)
def aleshin() -> ActionSpec:
    """The Aleshin automaton: a = (b,c)s, b = (c,b)s, c = (a,a).

    The three states generate a free group of rank 3; used for the
    interval-coverage experiment with |F| = 3.
    """
    machine = Machine.create(
        BINARY,
        [
            StateDef("a", 0, _SWAP, (_w("b"), _w("c"))),
            StateDef("b", 0, _SWAP, (_w("c"), _w("b"))),
            StateDef("c", 0, _ID2, (_w("a"), _w("a"))),
        ],
    )
    gens = tuple(machine.generator(s) for s in "abc")
    return ActionSpec("aleshin", machine, gens, ("a", "b", "c"))


#: Root permutations of the degree-6 example action.
ALPHA: Perm = perm_from_cycles(6, [(1, 3, 5), (2, 4, 6)])
BETA_R: Perm = perm_from_cycles(6, [(1, 2), (3, 4)])


@lru_cache(maxsize=None)
def example6() -> ActionSpec:
    """A finite group crossed with the adding machine, on the (6;2,2,...) tree.

    Generators: alpha and beta_r permute the six first-level subtrees rigidly
    (all sections trivial); sbar acts as the binary odometer simultaneously
    on all six subtrees.  beta_r fixes the two right-most subtrees pointwise,
    so the action has nontrivial subtree stabilizers while remaining
    spherically transitive.
    """
    shape = TreeShape((6,), (2,))
    trivial6 = ((),) * 6
    machine = Machine.create(
        shape,
        [
            StateDef("alpha", 0, ALPHA, trivial6),
            StateDef("beta_r", 0, BETA_R, trivial6),
            StateDef("sbar", 0, tuple(range(6)), (_w("s"),) * 6),
            StateDef("s", 1, _SWAP, ((), _w("s"))),
        ],
    )
    _assert_relations(
        machine,
        {
            "alpha^3": [("alpha", 1)] * 3,
            "beta_r^2": [("beta_r", 1)] * 2,
        },
    )
    gens = tuple(machine.generator(s) for s in ("alpha", "beta_r", "sbar"))
    return ActionSpec("example6", machine, gens, ("alpha", "beta_r", "sbar"))


_CATALOG = {
    "odometer": odometer,
    "grigorchuk": grigorchuk,
    "lamplighter": lamplighter,
    "aleshin": aleshin,
    "example6": example6,
}


def catalog_names() -> list[str]:
    return list(_CATALOG)


def get_action(name: str) -> ActionSpec:
    try:
        return _CATALOG[name]()
    except KeyError:
        raise KeyError(
            f"unknown catalog action {name!r}; available: {', '.join(_CATALOG)}"
        ) from None


# ---------------------------------------------------------------------------
# finite permutation-group arithmetic
# ---------------------------------------------------------------------------

ENUMERATE_DEGREE_CAP = 12
ALGEBRA_ORDER_CAP = 4096


def enumerate_group(perms: list[Perm]) -> list[Perm]:
    """Close a set of permutations under products (breadth-first order)."""
    if not perms:
        raise ValueError("need at least one permutation")
    degree = len(perms[0])
    if degree > ENUMERATE_DEGREE_CAP:
        raise ValueError(f"degree {degree} exceeds cap {ENUMERATE_DEGREE_CAP}")
    for p in perms:
        if len(p) != degree or not is_perm(p):
            raise ValueError(f"{p} is not a permutation of {degree} points")
    ident = perm_identity(degree)
    seen = {ident}
    order = [ident]
    queue = [ident]
    while queue:
        x = queue.pop(0)
        for p in perms:
            y = perm_mul(p, x)
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def fixed_point_character(p: Perm) -> int:
    """Number of fixed points of the permutation (the trace of its 0/1 matrix)."""
    return fixed_points(p)


def algebra_image_dimension(group: list[Perm], degree: int) -> int:
    """Rank over the rationals of the group's permutation matrices.

    Flattens each permutation matrix to a 0/1 vector and computes the exact
    rank by fraction-free integer elimination.  The permutation
    representation generates the full |H|-dimensional image algebra exactly
    when every irreducible constituent appears, so rank == |H| certifies a
    faithful image algebra.
    """
    if len(group) > ALGEBRA_ORDER_CAP:
        raise ValueError(f"group order {len(group)} exceeds cap {ALGEBRA_ORDER_CAP}")
    rows = []
    for p in group:
        if len(p) != degree:
            raise ValueError(f"{p} does not act on {degree} points")
        vec = [0] * (degree * degree)
        for x, y in enumerate(p):
            vec[y * degree + x] = 1
        rows.append(vec)
    return _integer_rank(rows)


def _integer_rank(rows: list[list[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free Gaussian elimination."""
    pivots: list[list[int]] = []
    pivot_cols: list[int] = []
    for row in rows:
        r = list(row)
        for piv, col in zip(pivots, pivot_cols):
            if r[col]:
                factor_r, factor_p = piv[col], r[col]
                r = [factor_r * a - factor_p * b for a, b in zip(r, piv)]
        lead = next((j for j, a in enumerate(r) if a), None)
        if lead is not None:
            pivots.append(r)
            pivot_cols.append(lead)
    return len(pivots)


def recursion_table(action: ActionSpec) -> str:
    """The wreath recursion of the action's machine, one state per line."""
    from .permutations import perm_str

    lines = [f"action {action.name} on {action.machine.shape}"]
    lines.append(f"generators: {', '.join(action.gen_names)}")
    for st in action.machine.states:
        sections = []
        for tword in st.transitions:
            if not tword:
                sections.append("1")
            else:
                sections.append("*".join(n if e == 1 else f"{n}^-1" for n, e in tword))
        perm = perm_str(st.perm)
        suffix = "" if perm == "()" else f" {perm}"
        offset = f" [offset {st.offset}]" if st.offset else ""
        lines.append(f"  {st.name} = ({', '.join(sections)}){suffix}{offset}")
    return "\n".join(lines)
