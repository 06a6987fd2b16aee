"""Must-link / cannot-link constraints over traces and their closure.

Constraints arrive as unordered trace-id pairs. Extension propagates them:
must-links are closed transitively (connected components), and a
cannot-link between two traces separates the full must-link component of
one from the full component of the other. Clustering itself runs on
variants, so extended sets get lifted to variant indices, where the same
propagation is applied again because grouping can merge components.
"""

from __future__ import annotations

import random
from collections import deque
from itertools import combinations
from math import floor
from typing import Hashable, Iterable

from .errors import (
    InfeasibleSamplingError,
    IntraVariantCannotLinkError,
    InvalidConstraintsError,
    KOutOfRangeError,
    MlClConflictError,
    SelfConstraintError,
    UnknownTraceIdError,
)
from .log_model import EventLog, GroupedEventLog
from .solution import ClusteringSolution

Pair = tuple[Hashable, Hashable]

# above this many cannot-link vertices the clique search defaults to greedy
GREEDY_CUTOFF = 5000


def _canon(a, b) -> Pair:
    return (a, b) if a <= b else (b, a)


def _canonical_pairs(pairs: Iterable, kind: str) -> frozenset:
    out = set()
    for a, b in pairs:
        if a == b:
            raise SelfConstraintError(f"{kind} pair ({a!r}, {a!r})")
        out.add(_canon(a, b))
    return frozenset(out)


class ConstraintSet:
    """Raw user-supplied constraints, canonicalised and overlap-checked."""

    def __init__(self, must_links: Iterable = (), cannot_links: Iterable = ()):
        self.must_links = _canonical_pairs(must_links, "must-link")
        self.cannot_links = _canonical_pairs(cannot_links, "cannot-link")
        both = self.must_links & self.cannot_links
        if both:
            raise InvalidConstraintsError(
                f"pairs in both relations: {sorted(both)}"
            )

    def __len__(self) -> int:
        return len(self.must_links) + len(self.cannot_links)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConstraintSet)
            and self.must_links == other.must_links
            and self.cannot_links == other.cannot_links
        )

    def ids(self) -> set:
        out = set()
        for a, b in self.must_links | self.cannot_links:
            out.add(a)
            out.add(b)
        return out

    def issubset(self, other: "ConstraintSet") -> bool:
        return (self.must_links <= other.must_links
                and self.cannot_links <= other.cannot_links)


def _components(pairs: Iterable[Pair]) -> dict:
    """Connected components of the pair graph: id -> frozenset of members."""
    adj: dict = {}
    for a, b in pairs:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    comp: dict = {}
    for start in adj:
        if start in comp:
            continue
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        members = frozenset(seen)
        for u in seen:
            comp[u] = members
    return comp


def _ml_path(ml_pairs: Iterable[Pair], a, b) -> list:
    """Shortest must-link path from a to b; empty if none exists."""
    adj: dict = {}
    for x, y in ml_pairs:
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)
    if a not in adj:
        return []
    prev = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for v in adj.get(u, ()):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    return []


def _propagate(ml_pairs, cl_pairs):
    """Close must-links transitively and push cannot-links across components.

    Returns (components, ml_plus, cl_plus). Raises MlClConflictError when a
    cannot-link pair ends up inside one must-link component.
    """
    comp = _components(ml_pairs)
    ml_plus = set()
    for members in set(comp.values()):
        ml_plus.update(_canon(u, v) for u, v in combinations(sorted(members), 2))
    cl_plus = set()
    for x, y in sorted(cl_pairs):
        cx = comp.get(x, frozenset((x,)))
        cy = comp.get(y, frozenset((y,)))
        if cx is cy or cx == cy:
            raise MlClConflictError((x, y), _ml_path(ml_pairs, x, y) or [x, y])
        for u in cx:
            for v in cy:
                cl_plus.add(_canon(u, v))
    return comp, frozenset(ml_plus), frozenset(cl_plus)


class ExtendedConstraintSet:
    """Transitively closed constraints over trace ids."""

    def __init__(self, source: ConstraintSet):
        self.source = source
        self._comp, self.ml_plus, self.cl_plus = _propagate(
            source.must_links, source.cannot_links
        )

    def connected(self, t) -> frozenset:
        """All traces must-linked to t, including t itself."""
        return self._comp.get(t, frozenset((t,))) | {t}


def validate(cs: ConstraintSet, log: EventLog) -> None:
    """Check ids against the log and reject must/cannot contradictions.

    Self pairs and direct overlaps are already rejected when the
    ConstraintSet is built; this adds id resolution and the transitive
    conflict check. Raises on the first problem found.
    """
    for a, b in sorted(cs.must_links | cs.cannot_links):
        for t in (a, b):
            if t not in log:
                raise UnknownTraceIdError(f"constraint id {t!r} not in log")
    _propagate(cs.must_links, cs.cannot_links)


def extend(cs: ConstraintSet) -> ExtendedConstraintSet:
    """Propagate a structurally valid constraint set; raises on conflict."""
    return ExtendedConstraintSet(cs)


class VariantConstraintSet:
    """Extended constraints lifted to variant indices of a grouped log.

    Must-links inside one variant are trivially satisfied and dropped;
    a raw cannot-link inside one variant can never be satisfied and is
    rejected. Lifting can merge components, so propagation runs again.
    """

    def __init__(self, ml_plus, cl_plus, comp, n_variants: int):
        self.ml_plus = ml_plus
        self.cl_plus = cl_plus
        self._comp = comp
        self.n_variants = n_variants
        self._cl_adj: dict[int, frozenset] = {}
        adj: dict[int, set] = {}
        for a, b in cl_plus:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        self._cl_adj = {v: frozenset(nb) for v, nb in adj.items()}

    @property
    def is_empty(self) -> bool:
        return not self.ml_plus and not self.cl_plus

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n_variants:
            raise UnknownTraceIdError(f"variant index {v} outside [0, {self.n_variants})")

    def connected(self, v: int) -> frozenset:
        self._check(v)
        return self._comp.get(v, frozenset((v,))) | {v}

    def cl_neighbors(self, v: int) -> frozenset:
        self._check(v)
        return self._cl_adj.get(v, frozenset())


def lift(ecs: ExtendedConstraintSet, grouped: GroupedEventLog) -> VariantConstraintSet:
    v_of = grouped.variant_of()
    src = ecs.source

    def to_variant(t) -> int:
        if t not in v_of:
            raise UnknownTraceIdError(f"constraint id {t!r} not in log")
        return v_of[t]

    ml_v = set()
    for a, b in sorted(src.must_links):
        va, vb = to_variant(a), to_variant(b)
        if va != vb:
            ml_v.add(_canon(va, vb))
    cl_v = set()
    for a, b in sorted(src.cannot_links):
        va, vb = to_variant(a), to_variant(b)
        if va == vb:
            raise IntraVariantCannotLinkError((a, b), va)
        cl_v.add(_canon(va, vb))
    comp, ml_plus, cl_plus = _propagate(ml_v, cl_v)
    return VariantConstraintSet(ml_plus, cl_plus, comp, grouped.supp)


def empty_variant_constraints(grouped: GroupedEventLog) -> VariantConstraintSet:
    return VariantConstraintSet(frozenset(), frozenset(), {}, grouped.supp)


# -- clique search -------------------------------------------------------------

def k_bounded_max_clique(constraints, k: int, exact: bool | None = None) -> frozenset:
    """Clique of at most k vertices in the cannot-link graph.

    Returns a clique of size exactly k whenever one exists, otherwise a
    maximum (hence maximal) clique. Vertices are the endpoints of cl_plus
    edges; with no such edges the result is empty. Branch and bound over
    vertices ordered by descending degree keeps the search exact and
    deterministic; above GREEDY_CUTOFF vertices (or with exact=False) a
    greedy maximal clique is built instead.
    """
    if k < 1:
        raise KOutOfRangeError(f"k={k}")
    cl = constraints.cl_plus
    adj: dict = {}
    for a, b in cl:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    if not adj:
        return frozenset()
    order = sorted(adj, key=lambda v: (-len(adj[v]), v))
    if exact is None:
        exact = len(order) <= GREEDY_CUTOFF
    if not exact:
        clique: list = []
        for v in order:
            if len(clique) >= k:
                break
            if all(u in adj[v] for u in clique):
                clique.append(v)
        return frozenset(clique)

    best: list = []

    def expand(cur: list, cand: list) -> bool:
        nonlocal best
        if len(cur) > len(best):
            best = list(cur)
            if len(best) >= k:
                return True
        for i, v in enumerate(cand):
            if len(cur) + len(cand) - i <= len(best):
                return False
            cur.append(v)
            if expand(cur, [u for u in cand[i + 1:] if u in adj[v]]):
                return True
            cur.pop()
        return False

    expand([], order)
    return frozenset(best)


# -- sampling from a ground truth -----------------------------------------------

# hard ceiling on rejection draws; quotas are feasibility-checked first, so
# hitting this means something is off with the inputs
_MAX_DRAWS_PER_CONSTRAINT = 100_000


def generate_constraints(
    ground_truth: ClusteringSolution, percentage: float, seed: int
) -> ConstraintSet:
    """Draw constraints consistent with a reference partition.

    The total count is percentage/100 times the number of variants,
    rounded half up. Must-links take the larger half on odd totals and
    are drawn within ground-truth clusters, cannot-links across. Draws
    come from one seeded rejection stream over trace-id pairs, so the
    set for a smaller percentage at the same seed is a subset of the set
    for a larger one.
    """
    if percentage < 0:
        raise InfeasibleSamplingError(f"negative percentage {percentage}")
    g = ground_truth.grouped
    total = floor(percentage / 100.0 * g.supp + 0.5)
    ml_needed = (total + 1) // 2
    cl_needed = total // 2
    if total == 0:
        return ConstraintSet()

    cluster_of = ground_truth.trace_assignment()
    ids = [tid for v in g.variants for tid in v.trace_ids]
    n = len(ids)
    sizes: dict[int, int] = {}
    for c in cluster_of.values():
        sizes[c] = sizes.get(c, 0) + 1
    within = sum(s * (s - 1) // 2 for s in sizes.values())
    cross = n * (n - 1) // 2 - within
    if ml_needed > within:
        raise InfeasibleSamplingError(
            f"need {ml_needed} must-links, only {within} within-cluster pairs exist"
        )
    if cl_needed > cross:
        raise InfeasibleSamplingError(
            f"need {cl_needed} cannot-links, only {cross} cross-cluster pairs exist"
        )

    rng = random.Random(seed)
    ml: list[Pair] = []
    cl: list[Pair] = []
    seen_ml: set[Pair] = set()
    seen_cl: set[Pair] = set()
    budget = _MAX_DRAWS_PER_CONSTRAINT * (total + 1)
    draws = 0
    while len(ml) < ml_needed or len(cl) < cl_needed:
        if draws >= budget:
            raise InfeasibleSamplingError("sampling budget exhausted")
        draws += 1
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        pair = _canon(ids[i], ids[j])
        if cluster_of[ids[i]] == cluster_of[ids[j]]:
            if len(ml) < ml_needed and pair not in seen_ml:
                seen_ml.add(pair)
                ml.append(pair)
        else:
            if len(cl) < cl_needed and pair not in seen_cl:
                seen_cl.add(pair)
                cl.append(pair)
    return ConstraintSet(must_links=ml, cannot_links=cl)


# -- file format -----------------------------------------------------------------

def write_constraints_tsv(cs: ConstraintSet, path: str) -> None:
    """Write one constraint per line: relation, id, id, tab-separated."""
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in sorted(cs.must_links):
            fh.write(f"ML\t{a}\t{b}\n")
        for a, b in sorted(cs.cannot_links):
            fh.write(f"CL\t{a}\t{b}\n")


def read_constraints_tsv(path: str) -> ConstraintSet:
    ml: list[Pair] = []
    cl: list[Pair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[0] not in ("ML", "CL"):
                raise InvalidConstraintsError(
                    f"{path}:{lineno}: expected 'ML|CL<TAB>id<TAB>id', got {line!r}"
                )
            target = ml if parts[0] == "ML" else cl
            target.append((parts[1], parts[2]))
    return ConstraintSet(must_links=ml, cannot_links=cl)
