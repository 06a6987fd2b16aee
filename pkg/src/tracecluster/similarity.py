"""Similarity measures between variants and distance matrix construction.

Three views of a variant are supported: the raw activity sequence
(edit distance), bag-of-k-gram counts, and counts of maximal repeat
alphabets. The latter two produce count vectors compared under a
euclidean or manhattan metric.
"""

from __future__ import annotations

from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError
from .log_model import GroupedEventLog

METRICS = ("euclidean", "manhattan")


# -- edit distance --------------------------------------------------------------

def _levenshtein(xa: np.ndarray, xb: np.ndarray) -> int:
    """Unit-cost edit distance between two integer-encoded sequences.

    Row-wise DP; the insertion cascade cur[j] = min(cur[j], cur[j-1]+1)
    is a prefix minimum of cur[j]-j, which keeps the inner loop in numpy.
    """
    if len(xa) == 0:
        return len(xb)
    if len(xb) == 0:
        return len(xa)
    ar = np.arange(len(xb) + 1, dtype=np.int64)
    prev = ar.copy()
    cur = np.empty_like(prev)
    for i in range(1, len(xa) + 1):
        cur[0] = i
        np.minimum(prev[:-1] + (xb != xa[i - 1]), prev[1:] + 1, out=cur[1:])
        cur -= ar
        np.minimum.accumulate(cur, out=cur)
        cur += ar
        prev, cur = cur, prev
    return int(prev[-1])


def ged(a: Sequence[str], b: Sequence[str]) -> int:
    """Edit distance between two activity sequences (unit costs)."""
    sym: dict[str, int] = {}
    ea = np.array([sym.setdefault(x, len(sym)) for x in a], dtype=np.int64)
    eb = np.array([sym.setdefault(x, len(sym)) for x in b], dtype=np.int64)
    return _levenshtein(ea, eb)


# -- count features --------------------------------------------------------------

@dataclass(frozen=True)
class VariantFeatures:
    """Per-variant count vectors over a shared feature space.

    features names the columns (k-gram tuples, or frozensets of labels
    for repeat alphabets); matrix is supp x len(features), int64.
    """

    features: tuple
    matrix: np.ndarray


def kgram_features(g: GroupedEventLog, k: int) -> VariantFeatures:
    """Counts of contiguous length-k activity windows per variant.

    The feature space is every k-gram occurring anywhere in the log,
    ordered lexicographically. Variants shorter than k get a zero vector.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    grams: set[tuple[str, ...]] = set()
    per_variant: list[dict[tuple[str, ...], int]] = []
    for v in g.variants:
        counts: dict[tuple[str, ...], int] = {}
        seq = v.sequence
        for i in range(len(seq) - k + 1):
            gram = seq[i:i + k]
            counts[gram] = counts.get(gram, 0) + 1
        grams.update(counts)
        per_variant.append(counts)
    features = tuple(sorted(grams))
    index = {f: i for i, f in enumerate(features)}
    matrix = np.zeros((g.supp, len(features)), dtype=np.int64)
    for row, counts in enumerate(per_variant):
        for gram, c in counts.items():
            matrix[row, index[gram]] = c
    return VariantFeatures(features=features, matrix=matrix)


def _suffix_array(text: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling (stable argsorts, O(n log^2 n))."""
    n = len(text)
    order = np.argsort(text, kind="stable")
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.cumsum(np.r_[0, np.diff(text[order]) != 0])
    k = 1
    while rank[order[-1]] != n - 1:
        second = np.full(n, 0, dtype=np.int64)
        second[: n - k] = rank[k:] + 1
        keys = rank * (n + 1) + second
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[order] = np.cumsum(np.r_[0, np.diff(sorted_keys) != 0])
        rank = new_rank
        k *= 2
    return order


def _lcp_array(text: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """lcp[i] = longest common prefix of suffixes sa[i-1] and sa[i]."""
    n = len(text)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(n, dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and text[i + h] == text[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


def _maximal_repeats(text: np.ndarray):
    """Yield (length, occurrence positions) per maximal repeat of text.

    A maximal repeat occurs at least twice and its occurrence set can be
    extended neither uniformly left nor uniformly right. Right-maximality
    comes from enumerating lcp intervals; left-maximality is a check for
    at least two distinct preceding symbols (text start counts as unique).
    """
    n = len(text)
    if n < 2:
        return
    sa = _suffix_array(text)
    lcp = _lcp_array(text, sa)
    # neq[i] == 1 when the symbols preceding suffixes sa[i-1] and sa[i] differ
    neq = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        a, b = sa[i - 1], sa[i]
        if a == 0 or b == 0 or text[a - 1] != text[b - 1]:
            neq[i] = 1
    diverse = np.cumsum(neq)

    stack: list[tuple[int, int]] = [(0, 0)]
    for i in range(1, n + 1):
        cur = int(lcp[i]) if i < n else 0
        lb = i - 1
        while stack and cur < stack[-1][0]:
            val, left = stack.pop()
            right = i - 1
            # lcp interval [left, right] with value val: right-maximal repeat
            if val >= 1 and diverse[right] - diverse[left] > 0:
                yield val, sa[left:right + 1]
            lb = left
        if not stack or cur > stack[-1][0]:
            stack.append((cur, lb))


def mra_features(g: GroupedEventLog) -> VariantFeatures:
    """Counts of maximal repeat alphabets per variant.

    Maximal repeats are computed once over the concatenation of all
    variant sequences, separated by per-variant unique symbols so no
    repeat crosses a boundary. Each repeat is reduced to its alphabet
    (the set of labels it contains); the count for a variant and an
    alphabet is the number of positions in the variant where some
    maximal repeat with that alphabet starts.
    """
    labels = sorted({a for v in g.variants for a in v.sequence})
    code = {a: i for i, a in enumerate(labels)}
    n_labels = len(labels)
    text: list[int] = []
    starts: list[int] = []
    for vi, v in enumerate(g.variants):
        starts.append(len(text))
        text.extend(code[a] for a in v.sequence)
        text.append(n_labels + vi)  # unique separator per variant
    arr = np.asarray(text, dtype=np.int64)

    positions: list[dict[frozenset, set[int]]] = [dict() for _ in g.variants]
    alphabets: set[frozenset] = set()
    for length, occs in _maximal_repeats(arr):
        first = int(occs[0])
        word = arr[first:first + length]
        alpha = frozenset(labels[c] for c in word.tolist())
        alphabets.add(alpha)
        for pos in occs.tolist():
            vi = bisect_right(starts, pos) - 1
            local = pos - starts[vi]
            positions[vi].setdefault(alpha, set()).add(local)

    features = tuple(sorted(alphabets, key=lambda s: (len(s), tuple(sorted(s)))))
    index = {f: i for i, f in enumerate(features)}
    matrix = np.zeros((g.supp, len(features)), dtype=np.int64)
    for row, by_alpha in enumerate(positions):
        for alpha, pos_set in by_alpha.items():
            matrix[row, index[alpha]] = len(pos_set)
    return VariantFeatures(features=features, matrix=matrix)


# -- distances --------------------------------------------------------------------

def vector_distance(u: np.ndarray, v: np.ndarray, metric: str = "euclidean") -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"shapes {u.shape} and {v.shape}")
    if metric == "euclidean":
        return float(np.sqrt(((u - v) ** 2).sum()))
    if metric == "manhattan":
        return float(np.abs(u - v).sum())
    raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense symmetric distances between variants.

    kind records whether constraint adjustment has been applied; raw_max
    keeps the maximum of the original matrix so re-adjusting never feeds
    a penalty value back into the penalty formula.
    """

    entries: np.ndarray
    kind: str = "raw"
    raw_max: float = None  # type: ignore[assignment]

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise DimensionMismatchError(f"matrix shape {e.shape}")
        if not np.array_equal(e, e.T) or np.any(np.diag(e) != 0.0):
            raise ValueError("distance matrix must be symmetric with zero diagonal")
        if self.raw_max is None:
            object.__setattr__(self, "raw_max", float(e.max()) if e.size else 0.0)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _encode_sequences(g: GroupedEventLog) -> list[np.ndarray]:
    sym: dict[str, int] = {}
    out = []
    for v in g.variants:
        out.append(
            np.array([sym.setdefault(a, len(sym)) for a in v.sequence], dtype=np.int64)
        )
    return out


def distance_matrix(
    g: GroupedEventLog,
    method: str = "ged",
    k: int = 3,
    metric: str = "euclidean",
    jobs: int = 1,
) -> DistanceMatrix:
    """Pairwise variant distances for one of the supported methods.

    method is "ged", "kgram" (window length k) or "mra". Only the upper
    triangle is computed; the mirror makes the result exactly symmetric.
    Rows are independent, so jobs > 1 fills them from a thread pool;
    each row lands at its own index and the result does not depend on
    scheduling.
    """
    n = g.supp
    out = np.zeros((n, n), dtype=np.float64)
    if method == "ged":
        enc = _encode_sequences(g)

        def fill_row(i: int) -> None:
            for j in range(i + 1, n):
                out[i, j] = _levenshtein(enc[i], enc[j])

    elif method in ("kgram", "mra"):
        if metric not in ("euclidean", "manhattan"):
            raise ValueError(f"unknown metric {metric!r}")
        feats = kgram_features(g, k) if method == "kgram" else mra_features(g)
        x = feats.matrix.astype(np.float64)

        def fill_row(i: int) -> None:
            diff = x[i + 1:] - x[i]
            if metric == "euclidean":
                out[i, i + 1:] = np.sqrt((diff ** 2).sum(axis=1))
            else:
                out[i, i + 1:] = np.abs(diff).sum(axis=1)

    else:
        raise ValueError(f"unknown method {method!r}, expected ged, kgram or mra")
    if jobs > 1 and n > 2:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(fill_row, range(n)))
    else:
        for i in range(n):
            fill_row(i)
    out = out + out.T
    return DistanceMatrix(entries=out, kind="raw")


def method_tag(method: str, k: int = 3, constrained: bool = False) -> str:
    base = {"ged": "GED", "mra": "MRA"}.get(method)
    if base is None:
        if method != "kgram":
            raise ValueError(f"unknown method {method!r}")
        base = f"{k}-gram"
    return f"Con{base}" if constrained else base


def write_matrix_csv(m: DistanceMatrix, path: str) -> None:
    """Dump the upper triangle: row i holds d(i, j) for j > i, else blanks."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index," + ",".join(str(j) for j in range(m.n)) + "\n")
        for i in range(m.n):
            cells = [""] * (i + 1) + [repr(float(m.entries[i, j]))
                                      for j in range(i + 1, m.n)]
            fh.write(f"{i}," + ",".join(cells) + "\n")
