"""Ward agglomerative clustering with constraint-adjusted distances.

Constraints act purely on the distance matrix: must-linked pairs get
distance zero so they merge as early as possible, cannot-linked pairs get
a penalty far above any genuine distance so they merge as late as
possible. The hierarchy is then cut by merge count, never by height,
because the penalty entries break height monotonicity on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import VariantConstraintSet
from .errors import DimensionMismatchError, KOutOfRangeError
from .log_model import GroupedEventLog
from .similarity import DistanceMatrix, distance_matrix, method_tag
from .solution import ClusteringSolution


def adjust_matrix(m: DistanceMatrix, vcs: VariantConstraintSet) -> DistanceMatrix:
    """Overwrite constrained cells: must-links to 0, cannot-links to
    max(raw) * n / 2 with n the number of variants. All other cells are
    untouched. The penalty base is the raw matrix maximum carried on the
    input, so applying the same adjustment twice changes nothing.
    """
    if vcs.n_variants != m.n:
        raise DimensionMismatchError(
            f"constraints cover {vcs.n_variants} variants, matrix has {m.n}"
        )
    if vcs.is_empty:
        return m
    entries = m.entries.copy()
    penalty = m.raw_max * m.n / 2.0
    for i, j in vcs.ml_plus:
        entries[i, j] = entries[j, i] = 0.0
    for i, j in vcs.cl_plus:
        entries[i, j] = entries[j, i] = penalty
    return DistanceMatrix(entries=entries, kind="constraint-adjusted",
                          raw_max=m.raw_max)


@dataclass(frozen=True)
class Dendrogram:
    """Merge list: (cluster a, cluster b, height), clusters named by the
    smallest variant index they contain. Heights are the increase of the
    Ward objective (half the Lance-Williams pair distance), which equals
    the within-cluster variance increase for euclidean inputs."""

    merges: tuple[tuple[int, int, float], ...]


def ward_ahc(m: DistanceMatrix, k: int, method: str = "ward",
             params: dict | None = None) -> tuple[ClusteringSolution, Dendrogram]:
    """Agglomerate until k clusters remain (Lance-Williams Ward updates).

    Distances are squared once up front; ties in the minimum pair
    distance resolve to the lexicographically smallest index pair.
    Cluster labels in the result are dense, ordered by smallest member.
    """
    n = m.n
    if not 1 <= k <= n:
        raise KOutOfRangeError(f"k={k} outside [1, {n}]")
    w = m.entries.astype(np.float64) ** 2
    np.fill_diagonal(w, np.inf)
    sizes = np.ones(n, dtype=np.int64)
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    iu, ju = np.triu_indices(n, 1)
    merges: list[tuple[int, int, float]] = []
    for _ in range(n - k):
        flat = np.argmin(w[iu, ju])
        i, j = int(iu[flat]), int(ju[flat])
        dij = w[i, j]
        merges.append((i, j, dij / 2.0))
        si, sj, sh = sizes[i], sizes[j], sizes
        row = ((si + sh) * w[i] + (sj + sh) * w[j] - sh * dij) / (si + sj + sh)
        w[i] = row
        w[:, i] = row
        w[i, i] = np.inf
        w[j, :] = np.inf
        w[:, j] = np.inf
        sizes[i] += sizes[j]
        members[i].extend(members.pop(j))
    assignment = [0] * n
    for c, rep in enumerate(sorted(members)):
        for v in members[rep]:
            assignment[v] = c
    final_params = dict(params or {})
    final_params.setdefault("k", k)
    return _RawPartition(tuple(assignment), k, method, final_params), Dendrogram(tuple(merges))


@dataclass(frozen=True)
class _RawPartition:
    """Partition of matrix rows, before binding to a grouped log."""

    assignment: tuple[int, ...]
    n_clusters: int
    method: str
    params: dict

    def bind(self, grouped: GroupedEventLog) -> ClusteringSolution:
        return ClusteringSolution(
            grouped=grouped, assignment=self.assignment,
            n_clusters=self.n_clusters, method=self.method, params=self.params,
        )


def constrained_cluster(
    g: GroupedEventLog,
    method: str,
    vcs: VariantConstraintSet | None,
    k: int,
    kgram_k: int = 3,
    metric: str = "euclidean",
    jobs: int = 1,
) -> ClusteringSolution:
    """Distance matrix, optional constraint adjustment, Ward cut at k.

    The method tag of the result carries a Con prefix exactly when a
    non-empty constraint set was applied.
    """
    m = distance_matrix(g, method=method, k=kgram_k, metric=metric, jobs=jobs)
    constrained = vcs is not None and not vcs.is_empty
    if constrained:
        m = adjust_matrix(m, vcs)
    tag = method_tag(method, kgram_k, constrained)
    params = {"method": method, "metric": metric, "constrained": constrained}
    if method == "kgram":
        params["kgram_k"] = kgram_k
    part, _ = ward_ahc(m, k, method=tag, params=params)
    return part.bind(g)
