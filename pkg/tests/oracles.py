"""Independent reference implementations used to cross-check the package.

Everything here is written directly from the definitions, favouring
clarity over speed, and deliberately shares no code with the package:
fixed-point iteration instead of union-find, exhaustive enumeration
instead of branch and bound, naive rescans instead of incremental
bookkeeping. Tests compare package output against these.
"""

from fractions import Fraction
from itertools import combinations


# -- edit distance ---------------------------------------------------------------

def lev_recursive(a, b):
    """Memoised top-down evaluation of the textbook recurrence."""
    cache = {}

    def rec(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        key = (i, j)
        if key not in cache:
            cache[key] = min(
                rec(i - 1, j) + 1,
                rec(i, j - 1) + 1,
                rec(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
            )
        return cache[key]

    return rec(len(a), len(b))


def lev_recursive_plain(a, b):
    """The same recurrence with no memoisation; keep inputs tiny."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        lev_recursive_plain(a[:-1], b) + 1,
        lev_recursive_plain(a, b[:-1]) + 1,
        lev_recursive_plain(a[:-1], b[:-1]) + (a[-1] != b[-1]),
    )


# -- constraint closure ------------------------------------------------------------

def canon(a, b):
    return (a, b) if a <= b else (b, a)


def closure_fixed_point(ml, cl):
    """Apply the propagation rules until nothing changes.

    Returns (ml_plus, cl_plus, conflicts) where conflicts are pairs that
    ended up in both relations (equivalently: cannot-links bridged by a
    must-link path).
    """
    ml_plus = {canon(*p) for p in ml}
    cl_plus = {canon(*p) for p in cl}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in list(combinations(ml_plus, 2)):
            joined = None
            if a == c:
                joined = canon(b, d)
            elif a == d:
                joined = canon(b, c)
            elif b == c:
                joined = canon(a, d)
            elif b == d:
                joined = canon(a, c)
            if joined and joined[0] != joined[1] and joined not in ml_plus:
                ml_plus.add(joined)
                changed = True
        for (x, y) in list(cl_plus):
            for (a, b) in ml_plus:
                for u, v in ((a, b), (b, a)):
                    for p, q in ((x, y), (y, x)):
                        if u == p and q != v:
                            new = canon(v, q)
                            if new not in cl_plus:
                                cl_plus.add(new)
                                changed = True
    conflicts = sorted(p for p in cl_plus if p in ml_plus or p[0] == p[1])
    return ml_plus, cl_plus, conflicts


def components_naive(pairs):
    """Connected components by repeated merging of overlapping sets."""
    groups = [set(p) for p in pairs]
    changed = True
    while changed:
        changed = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if groups[i] and groups[j] and groups[i] & groups[j]:
                    groups[i] |= groups[j]
                    groups[j] = set()
                    changed = True
    return [g for g in groups if g]


def ml_path_exists(ml, a, b):
    front = {a}
    seen = {a}
    while front:
        nxt = set()
        for u in front:
            for x, y in ml:
                other = y if x == u else (x if y == u else None)
                if other is not None and other not in seen:
                    seen.add(other)
                    nxt.add(other)
        if b in seen:
            return True
        front = nxt
    return False


# -- cliques ------------------------------------------------------------------------

def max_clique_exhaustive(edges):
    """Maximum clique size by checking every vertex subset. <= ~16 vertices."""
    vertices = sorted({v for e in edges for v in e})
    eset = {canon(*e) for e in edges}
    best = 0
    for r in range(len(vertices), 0, -1):
        if r <= best:
            break
        for sub in combinations(vertices, r):
            if all(canon(u, v) in eset for u, v in combinations(sub, 2)):
                best = r
                break
    return best


def is_clique(vertices, edges):
    eset = {canon(*e) for e in edges}
    return all(canon(u, v) in eset for u, v in combinations(sorted(vertices), 2))


def is_maximal_clique(vertices, edges):
    if not is_clique(vertices, edges):
        return False
    eset = {canon(*e) for e in edges}
    universe = {v for e in edges for v in e}
    for cand in universe - set(vertices):
        if all(canon(cand, v) in eset for v in vertices):
            return False
    return True


# -- k-grams and maximal repeats ------------------------------------------------------

def kgram_sliding(seq, k):
    counts = {}
    for i in range(len(seq) - k + 1):
        g = tuple(seq[i:i + k])
        counts[g] = counts.get(g, 0) + 1
    return counts


def maximal_repeats_quadratic(sequences):
    """All maximal repeats over a list of label sequences.

    Normative quadratic definition: collect every substring occurrence,
    keep substrings occurring at least twice whose occurrence set has at
    least two distinct left contexts and two distinct right contexts.
    Sequence boundaries count as per-occurrence unique contexts.
    """
    occ = {}
    for vi, seq in enumerate(sequences):
        n = len(seq)
        for i in range(n):
            for j in range(i + 1, n + 1):
                occ.setdefault(tuple(seq[i:j]), []).append((vi, i))
    repeats = []
    for word, places in occ.items():
        if len(places) < 2:
            continue
        lefts = set()
        rights = set()
        for vi, p in places:
            seq = sequences[vi]
            lefts.add(seq[p - 1] if p > 0 else ("start", vi, p))
            end = p + len(word)
            rights.add(seq[end] if end < len(seq) else ("end", vi, p))
        if len(lefts) >= 2 and len(rights) >= 2:
            repeats.append(word)
    return sorted(repeats)


def mra_counts_quadratic(sequences):
    """Per-sequence counts of maximal repeat alphabets.

    The count for (sequence, alphabet) is the number of start positions
    where at least one maximal repeat with that alphabet occurs.
    """
    repeats = maximal_repeats_quadratic(sequences)
    by_alpha = {}
    for r in repeats:
        by_alpha.setdefault(frozenset(r), []).append(r)
    counts = []
    for seq in sequences:
        row = {}
        for alpha, words in by_alpha.items():
            positions = set()
            for w in words:
                m = len(w)
                for i in range(len(seq) - m + 1):
                    if tuple(seq[i:i + m]) == w:
                        positions.add(i)
            if positions:
                row[alpha] = len(positions)
        counts.append(row)
    return sorted(by_alpha), counts


# -- vectors --------------------------------------------------------------------------

def vector_distance_loop(u, v, metric):
    total = 0.0
    if metric == "euclidean":
        for x, y in zip(u, v):
            total += (float(x) - float(y)) ** 2
        return total ** 0.5
    for x, y in zip(u, v):
        total += abs(float(x) - float(y))
    return total


# -- Ward clustering ---------------------------------------------------------------------

def ward_merge_sequence_naive(d, k):
    """Merge sequence via the closed-form cluster distance.

    For clusters A, B the pair distance is computed fresh each step from
    the original squared matrix:
      D(A,B) = w * (2*S_ab/(|A||B|) - S_aa/|A|^2 - S_bb/|B|^2),
      w = |A||B|/(|A|+|B|),
    where S_xy sums squared distances over ordered member pairs. This is
    algebraically the Ward criterion and shares nothing with the
    recurrence-based implementation. Ties break on the lexicographically
    smallest pair of cluster representatives (smallest member).
    """
    n = len(d)
    d2 = [[float(d[i][j]) ** 2 for j in range(n)] for i in range(n)]
    clusters = {i: [i] for i in range(n)}

    def pair_sum(xs, ys):
        return sum(d2[x][y] for x in xs for y in ys)

    merges = []
    while len(clusters) > k:
        best = None
        for i, j in combinations(sorted(clusters), 2):
            a, b = clusters[i], clusters[j]
            na, nb = len(a), len(b)
            dist = (na * nb / (na + nb)) * (
                2.0 * pair_sum(a, b) / (na * nb)
                - pair_sum(a, a) / na ** 2
                - pair_sum(b, b) / nb ** 2
            )
            if best is None or dist < best[0]:
                best = (dist, i, j)
        dist, i, j = best
        merges.append((i, j, dist / 2.0))
        clusters[i] = clusters[i] + clusters.pop(j)
    assignment = {}
    for c, rep in enumerate(sorted(clusters)):
        for v in clusters[rep]:
            assignment[v] = c
    return merges, [assignment[v] for v in range(n)]


def ward_objective(d, assignment):
    """Total within-cluster dispersion: sum over clusters of
    (sum of squared pairwise distances) / cluster size."""
    n = len(d)
    clusters = {}
    for v, c in enumerate(assignment):
        clusters.setdefault(c, []).append(v)
    total = 0.0
    for members in clusters.values():
        s = 0.0
        for x, y in combinations(members, 2):
            s += float(d[x][y]) ** 2
        total += s / len(members)
    return total


# -- conformance ----------------------------------------------------------------------------

def recall_by_steps(arcs, starts, ends, sublog):
    """Step-by-step replay over expanded traces."""
    ok = 0
    total = 0
    for seq, mult in sublog:
        for _ in range(mult):
            total += len(seq) + 1
            if seq[0] in starts:
                ok += 1
            for a, b in zip(seq, seq[1:]):
                if (a, b) in arcs:
                    ok += 1
            if seq[-1] in ends:
                ok += 1
    return ok / total


def precision_by_continuations(model_activities, arcs, sublog):
    perm = {}
    for a, b in arcs:
        perm.setdefault(a, set()).add(b)
    obs = {}
    weight = {}
    for seq, mult in sublog:
        for a in seq:
            weight[a] = weight.get(a, 0) + mult
        for a, b in zip(seq, seq[1:]):
            obs.setdefault(a, set()).add(b)
    num = Fraction(0)
    den = 0
    for a, w in weight.items():
        if a not in model_activities or not perm.get(a):
            continue
        num += w * min(Fraction(1), Fraction(len(obs.get(a, ())), len(perm[a])))
        den += w
    return float(num / den) if den else 0.0


def df_counts_expanded(sublog):
    """Directly-follows counts by literally expanding multiplicities."""
    pairs = {}
    starts = {}
    ends = {}
    for seq, mult in sublog:
        for _ in range(mult):
            starts[seq[0]] = starts.get(seq[0], 0) + 1
            ends[seq[-1]] = ends.get(seq[-1], 0) + 1
            for a, b in zip(seq, seq[1:]):
                pairs[(a, b)] = pairs.get((a, b), 0) + 1
    return pairs, starts, ends


# -- pair-counting agreement -------------------------------------------------------------------

def jaccard_by_pairs(assign_a, assign_b, weights=None):
    """Jaccard agreement by enumerating instance pairs.

    weights expands instance i into weights[i] identical copies first
    (trace-level agreement of a variant-level partition).
    """
    if weights is None:
        weights = [1] * len(assign_a)
    ea = []
    eb = []
    for i, w in enumerate(weights):
        ea.extend([assign_a[i]] * w)
        eb.extend([assign_b[i]] * w)
    n11 = n10 = n01 = 0
    for i, j in combinations(range(len(ea)), 2):
        sa = ea[i] == ea[j]
        sb = eb[i] == eb[j]
        if sa and sb:
            n11 += 1
        elif sa:
            n10 += 1
        elif sb:
            n01 += 1
    if n11 + n10 + n01 == 0:
        return 1.0
    return n11 / (n11 + n10 + n01)


def violation_rates(trace_clusters, ml, cl):
    """Percentages of raw constraints a trace-level assignment violates."""
    ml = list(ml)
    cl = list(cl)
    ml_bad = sum(1 for a, b in ml if trace_clusters[a] != trace_clusters[b])
    cl_bad = sum(1 for a, b in cl if trace_clusters[a] == trace_clusters[b])
    ml_pct = 100.0 * ml_bad / len(ml) if ml else 0.0
    cl_pct = 100.0 * cl_bad / len(cl) if cl else 0.0
    return ml_pct, cl_pct
