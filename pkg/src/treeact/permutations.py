"""Plain permutation helpers.

Permutations are tuples of 0-based images: ``p[i]`` is the image of point
``i``.  Composition follows the action convention used throughout the
package, ``(p * q)(x) = p(q(x))`` (rightmost factor acts first).
"""

from __future__ import annotations

from typing import Iterable, Sequence

Perm = tuple[int, ...]


def perm_identity(n: int) -> Perm:
    return tuple(range(n))


def is_perm(p: Sequence[int]) -> bool:
    n = len(p)
    return sorted(p) == list(range(n))


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Compose two permutations, applying ``q`` first."""
    return tuple(p[x] for x in q)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def perm_from_cycles(degree: int, cycles: Iterable[Sequence[int]]) -> Perm:
    """Build a permutation from 1-based cycles, e.g. ``[(1, 3, 5), (2, 4, 6)]``."""
    images = list(range(degree))
    for cycle in cycles:
        if len(set(cycle)) != len(cycle):
            raise ValueError(f"repeated point in cycle {cycle}")
        for a, b in zip(cycle, tuple(cycle[1:]) + (cycle[0],)):
            if not (1 <= a <= degree):
                raise ValueError(f"cycle point {a} outside 1..{degree}")
            images[a - 1] = b - 1
    if not is_perm(images):
        raise ValueError(f"cycles {list(cycles)} overlap")
    return tuple(images)


def perm_cycles(p: Perm) -> list[tuple[int, ...]]:
    """Nontrivial cycles of ``p``, 1-based, each starting at its least point."""
    seen = [False] * len(p)
    cycles = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        cycles.append(tuple(x + 1 for x in cyc))
    return cycles


def perm_str(p: Perm) -> str:
    cycles = perm_cycles(p)
    if not cycles:
        return "()"
    return "".join("(" + ",".join(map(str, c)) + ")" for c in cycles)


def fixed_points(p: Perm) -> int:
    return sum(1 for i, x in enumerate(p) if i == x)


def perm_order(p: Perm) -> int:
    """Order of the permutation (lcm of cycle lengths)."""
    from math import lcm

    order = 1
    for c in perm_cycles(p):
        order = lcm(order, len(c))
    return order
