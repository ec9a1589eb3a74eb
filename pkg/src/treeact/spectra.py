"""Markov operators on level actions and their spectra.

For a finite set F of words in the generators, the associated Markov
operator averages g + g^-1 over F; its level-n matrix is the transition
matrix of the simple random walk on the level-n Schreier graph.  The dense
eigensolver (LAPACK symmetric path: tridiagonalization plus implicit
QL/QR) is the correctness reference; an iterative path computes extremal
subsets for sizes past the dense cap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .actions import LevelTower
from .permutations import Perm, perm_inv, perm_mul

DENSE_CAP = 4096

#: A generating word: sequence of (generator index, +-1).
GenWord = tuple[tuple[int, int], ...]


def _resolve_words(tower: LevelTower, F: Sequence) -> list[tuple[str, GenWord]]:
    out: list[tuple[str, GenWord]] = []
    for item in F:
        if isinstance(item, int):
            out.append((tower.gen_names[item], ((item, 1),)))
        elif isinstance(item, str):
            out.append((item, parse_gen_word(tower.gen_names, item)))
        else:
            word = tuple((int(i), int(e)) for i, e in item)
            label = "*".join(
                tower.gen_names[i] if e == 1 else f"{tower.gen_names[i]}^-1"
                for i, e in word
            )
            out.append((label, word))
    if not out:
        raise ValueError("generating set F must be nonempty")
    return out


def parse_gen_word(gen_names: Sequence[str], text: str) -> GenWord:
    """Parse words like ``a``, ``a*b`` or ``a*b^-1`` over generator names."""
    word = []
    for token in text.split("*"):
        token = token.strip()
        exp = 1
        if token.endswith("^-1"):
            token, exp = token[:-3], -1
        if token not in gen_names:
            raise ValueError(f"unknown generator {token!r} (have {', '.join(gen_names)})")
        word.append((list(gen_names).index(token), exp))
    return tuple(word)


def _word_perm(tower: LevelTower, n: int, word: GenWord) -> Perm:
    size = tower.level_sizes[n]
    p = tuple(range(size))
    for i, e in word:
        q = tower.perms[n][i] if e == 1 else perm_inv(tower.perms[n][i])
        p = perm_mul(p, q)
    return p


@dataclass(frozen=True)
class MarkovMatrix:
    """Symmetric transition matrix of the level-n walk for a generating set F."""

    level: int
    matrix: np.ndarray
    gen_labels: tuple[str, ...]
    trivial_at_level: tuple[str, ...]  # words acting trivially here, flagged

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def markov_matrix(tower: LevelTower, n: int, F: Sequence) -> MarkovMatrix:
    """(1 / 2|F|) sum over F of (P_g + P_g^T) on level n.

    Words of F inducing the identity permutation at this level contribute
    diagonal mass; they are recorded in ``trivial_at_level`` so callers can
    see that the "does not contain 1" requirement is only violated modulo
    this level.
    """
    words = _resolve_words(tower, F)
    size = tower.level_sizes[n]
    counts = np.zeros((size, size), dtype=np.int64)
    trivial = []
    for label, word in words:
        p = _word_perm(tower, n, word)
        if all(i == x for i, x in enumerate(p)):
            trivial.append(label)
        for x, y in enumerate(p):
            counts[y, x] += 1
            counts[x, y] += 1
    matrix = counts / (2.0 * len(words))
    return MarkovMatrix(n, matrix, tuple(label for label, _ in words), tuple(trivial))


def spectrum(
    m: MarkovMatrix,
    dense_cap: int = DENSE_CAP,
    iterative: bool = False,
    k: int = 6,
) -> np.ndarray:
    """Eigenvalues, ascending.

    Dense path (the default and the correctness reference) returns all of
    them via the symmetric solver; the iterative path returns the ``k``
    extremal ones (half from each end) and is only an acceleration.
    """
    if iterative:
        try:
            vals = scipy.sparse.linalg.eigsh(
                scipy.sparse.csr_matrix(m.matrix), k=k, which="BE",
                return_eigenvectors=False,
            )
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise RuntimeError(
                f"iterative eigensolver failed to converge on level {m.level}: {exc}"
            ) from exc
        return np.sort(vals)
    if m.size > dense_cap:
        raise ValueError(
            f"level {m.level} matrix of size {m.size} exceeds dense cap {dense_cap}; "
            "request the iterative path"
        )
    return scipy.linalg.eigh(m.matrix, eigvals_only=True, driver="ev")


@dataclass
class SpectrumReport:
    """Per-level spectra of one Markov operator, with coverage statistics."""

    gen_labels: tuple[str, ...]
    levels: tuple[int, ...]
    eigenvalues: dict[int, np.ndarray]

    def union(self, up_to_level: int | None = None) -> np.ndarray:
        vals = [
            v
            for lvl, v in self.eigenvalues.items()
            if up_to_level is None or lvl <= up_to_level
        ]
        return np.sort(np.concatenate(vals))

    def coverage_trend(self, lo: float, hi: float) -> list[tuple[int, float]]:
        """Max gap over the interval as levels accumulate (non-increasing)."""
        return [
            (lvl, interval_coverage(self.union(lvl), lo, hi)) for lvl in self.levels
        ]


def spectrum_report(
    tower: LevelTower, F: Sequence, levels: Iterable[int], dense_cap: int = DENSE_CAP
) -> SpectrumReport:
    levels = tuple(levels)
    eigs = {}
    labels: tuple[str, ...] = ()
    for n in levels:
        m = markov_matrix(tower, n, F)
        labels = m.gen_labels
        eigs[n] = spectrum(m, dense_cap=dense_cap)
    return SpectrumReport(labels, levels, eigs)


def interval_coverage(values: np.ndarray, lo: float, hi: float) -> float:
    """Largest distance from a point of [lo, hi] to the given value set.

    Zero means the interval is covered at this resolution.  The maximum is
    attained at an endpoint or at a midpoint between consecutive values, so
    the computation is exact given the inputs.
    """
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if lo < -1 - 1e-9 or hi > 1 + 1e-9:
        raise ValueError(f"interval [{lo}, {hi}] is outside [-1, 1]")
    pts = np.sort(np.asarray(values, dtype=float))
    if pts.size == 0:
        raise ValueError("empty eigenvalue union")

    def dist(x: float) -> float:
        i = np.searchsorted(pts, x)
        best = np.inf
        if i < pts.size:
            best = min(best, abs(pts[i] - x))
        if i > 0:
            best = min(best, abs(x - pts[i - 1]))
        return float(best)

    candidates = [lo, hi]
    inside = pts[(pts > lo) & (pts < hi)]
    mids = (inside[1:] + inside[:-1]) / 2 if inside.size > 1 else np.array([])
    candidates.extend(float(x) for x in mids)
    return max(dist(x) for x in candidates)


def nesting_check(
    tower: LevelTower, F: Sequence, n: int, tol: float, dense_cap: int = DENSE_CAP
) -> tuple[bool, float]:
    """Do all level-n eigenvalues recur at level n+1 within tol?

    True for tree actions because functions on level n pull back
    equivariantly to level n+1 along the parent map, making the level-n
    walk operator a compression of the deeper one on an invariant subspace.
    Returns the verdict and the worst distance found.
    """
    lower = spectrum(markov_matrix(tower, n, F), dense_cap=dense_cap)
    upper = spectrum(markov_matrix(tower, n + 1, F), dense_cap=dense_cap)
    worst = 0.0
    for lam in lower:
        i = np.searchsorted(upper, lam)
        best = np.inf
        if i < upper.size:
            best = min(best, abs(upper[i] - lam))
        if i > 0:
            best = min(best, abs(lam - upper[i - 1]))
        worst = max(worst, float(best))
    return worst <= tol, worst


def write_spectrum_csv(report: SpectrumReport, path: str) -> None:
    """One row per eigenvalue: level,index,value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "index", "value"])
        for lvl in report.levels:
            for idx, val in enumerate(report.eigenvalues[lvl]):
                writer.writerow([lvl, idx, f"{val:.12e}"])


def coverage_report_text(
    report: SpectrumReport, lo: float, hi: float
) -> str:
    lines = [
        f"interval [{lo:.6f}, {hi:.6f}], generating set {{{', '.join(report.gen_labels)}}}",
        "level  union size  max gap",
    ]
    for lvl, gap in report.coverage_trend(lo, hi):
        lines.append(f"{lvl:5d}  {report.union(lvl).size:10d}  {gap:.6e}")
    return "\n".join(lines)
