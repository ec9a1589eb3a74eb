"""Rooted trees with depth-dependent branching.

A tree shape is an eventually periodic sequence of degrees d0, d1, ...
(all >= 2): a finite prefix followed by a tail repeated forever.  Vertices
are addressed by words of 1-based letters; the empty word is the root.
Level n consists of all words of length n, ordered lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

Word = tuple[int, ...]

ROOT: Word = ()

#: Hard bound on level indices and word lengths.  Keeps accidental
#: astronomically-sized level enumerations from hanging the process;
#: raise it explicitly if a computation genuinely needs deeper levels.
MAX_DEPTH = 64


class DepthLimitError(ValueError):
    """A level index or word length exceeded MAX_DEPTH."""


def _check_depth(n: int) -> None:
    if n < 0:
        raise ValueError(f"level index must be nonnegative, got {n}")
    if n > MAX_DEPTH:
        raise DepthLimitError(f"level {n} exceeds MAX_DEPTH={MAX_DEPTH}")


@dataclass(frozen=True)
class TreeShape:
    """Degree sequence of a rooted tree: ``prefix`` then ``tail`` repeated."""

    prefix: tuple[int, ...]
    tail: tuple[int, ...]

    def __post_init__(self):
        if not self.tail:
            raise ValueError("tail must be nonempty")
        for d in (*self.prefix, *self.tail):
            if d < 2:
                raise ValueError(f"every degree must be >= 2, got {d}")

    def degree(self, n: int) -> int:
        """Branching degree at depth ``n``; total for all n >= 0."""
        if n < 0:
            raise ValueError(f"depth must be nonnegative, got {n}")
        if n < len(self.prefix):
            return self.prefix[n]
        return self.tail[(n - len(self.prefix)) % len(self.tail)]

    def canonical_offset(self, k: int) -> int:
        """Collapse a level offset modulo the tail period.

        Two offsets past the prefix that agree modulo the tail length
        describe the same shifted shape, so automaton states living there
        are interchangeable.
        """
        if k < 0:
            raise ValueError(f"offset must be nonnegative, got {k}")
        if k <= len(self.prefix):
            return k
        return len(self.prefix) + (k - len(self.prefix)) % len(self.tail)

    def shift(self, k: int = 1) -> "TreeShape":
        """The shape seen from depth ``k`` (drop the first k degrees)."""
        k = self.canonical_offset(k)
        if k <= len(self.prefix):
            rot = self.tail
            pre = self.prefix[k:]
        else:
            r = k - len(self.prefix)
            rot = self.tail[r:] + self.tail[:r]
            pre = ()
        return TreeShape(pre, rot)

    def level_size(self, n: int, offset: int = 0) -> int:
        """Number of vertices at depth ``n`` below a vertex at depth ``offset``."""
        _check_depth(n)
        size = 1
        for k in range(n):
            size *= self.degree(offset + k)
        return size

    def level_vertices(self, n: int, offset: int = 0) -> list[Word]:
        """All depth-``n`` words in lexicographic order."""
        _check_depth(n)
        ranges = [range(1, self.degree(offset + k) + 1) for k in range(n)]
        return [tuple(w) for w in product(*ranges)]

    def check_vertex(self, v: Word, offset: int = 0) -> None:
        _check_depth(len(v))
        for depth, letter in enumerate(v):
            d = self.degree(offset + depth)
            if not (1 <= letter <= d):
                raise ValueError(
                    f"letter {letter} at depth {depth} outside 1..{d} for {self}"
                )

    def vertex_index(self, v: Word, offset: int = 0) -> int:
        """Lexicographic index of ``v`` within its level."""
        idx = 0
        for depth, letter in enumerate(v):
            idx = idx * self.degree(offset + depth) + (letter - 1)
        return idx

    def __str__(self) -> str:
        pre = ",".join(map(str, self.prefix))
        tail = ",".join(map(str, self.tail))
        return f"T({pre};{tail}...)" if pre else f"T({tail}...)"


def is_descendant(v: Word, w: Word) -> bool:
    """True iff ``v`` is a prefix of ``w`` (every vertex descends from itself)."""
    return len(v) <= len(w) and w[: len(v)] == v


def parent(v: Word) -> Word:
    if not v:
        raise ValueError("the root has no parent")
    return v[:-1]


def children(shape: TreeShape, v: Word, offset: int = 0) -> list[Word]:
    _check_depth(len(v) + 1)
    d = shape.degree(offset + len(v))
    return [v + (i,) for i in range(1, d + 1)]


def vertex_str(v: Word) -> str:
    if not v:
        return "()"
    if all(letter <= 9 for letter in v):
        return "".join(map(str, v))
    return ".".join(map(str, v))
