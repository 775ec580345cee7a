"""Edge balance ratios and whole-network balance statistics.

For a directed edge (A, B) the balance ratio is R = d_i(B) / d_i(A),
taken as infinite when d_i(A) = 0. The balance profile tabulates the
finite-ratio edges in logarithmic bins [alpha^s, alpha^(s+1)); the
positivity is the mean log-ratio over finite-ratio edges normalized by
log(N - 1), so it always lies in [-1, 1].

Binning is exact with respect to the IEEE value of alpha: a ratio that
equals a power of alpha (as a rational comparison of the integer degree
pair against the exact rational alpha^s) lands in the lower-closed bin,
never misassigned by floating-point log rounding. In particular R = 1
is always bin s = 0.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UndefinedPositivityError, UsageError

__all__ = [
    "DEFAULT_ALPHA",
    "RATIO_INFINITE",
    "EdgeBalanceRecord",
    "BalanceProfile",
    "DegreeSlice",
    "edge_balance_ratio",
    "balance_profile",
    "positivity",
    "degree_slice",
    "bin_average_degrees",
    "bin_of_ratio",
    "profile_to_json",
    "profile_from_json",
    "profile_to_csv",
]

DEFAULT_ALPHA = 10 ** 0.1  # ten bins per decade
RATIO_INFINITE = math.inf

# Log-space distance to a bin edge below which the float result is not
# trusted and the edge is re-resolved with exact rational arithmetic.
# Float log error is ~1e-14 here, so 1e-9 catches every true boundary hit.
_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class EdgeBalanceRecord:
    """Balance ratio of one edge; ratio is math.inf when d_i(source) = 0."""

    source: int
    target: int
    ratio: float

    @property
    def is_infinite(self):
        return math.isinf(self.ratio)


def _exact_bin(p, q, alpha_num, alpha_den, s):
    """Exact bin index for ratio p/q near guess s.

    alpha_num/alpha_den is the exact rational value of the float alpha.
    Walks s until alpha^s <= p/q < alpha^(s+1) holds under integer
    comparison; the guess is off by at most one in practice.
    """

    def ratio_lt_pow(e):
        # p/q < alpha^e  <=>  p * alpha_den^e < q * alpha_num^e   (e >= 0)
        # and symmetrically with alpha^-e = alpha_den^e / alpha_num^e.
        if e >= 0:
            return p * alpha_den**e < q * alpha_num**e
        return p * alpha_num**(-e) < q * alpha_den**(-e)

    while ratio_lt_pow(s):
        s -= 1
    while not ratio_lt_pow(s + 1):
        s += 1
    return s


def bin_of_ratio(numerator, denominator, alpha):
    """Bin index s with alpha^s <= numerator/denominator < alpha^(s+1).

    Both arguments are positive integers (in-degrees). Exact at bin
    boundaries.
    """
    if alpha <= 1.0:
        raise ConfigError(f"alpha must be > 1, got {alpha}")
    if numerator <= 0 or denominator <= 0:
        raise UsageError("ratio endpoints must have positive in-degree")
    if numerator == denominator:
        return 0
    x = (math.log(numerator) - math.log(denominator)) / math.log(alpha)
    s = math.floor(x)
    if min(x - s, s + 1 - x) >= _BOUNDARY_TOL:
        return s
    a_num, a_den = alpha.as_integer_ratio()
    return _exact_bin(int(numerator), int(denominator), a_num, a_den, s)


def _bin_indices(d_src, d_tgt, alpha):
    """Vectorized bin assignment for finite-ratio degree pairs."""
    log_alpha = math.log(alpha)
    x = (np.log(d_tgt) - np.log(d_src)) / log_alpha
    s = np.floor(x).astype(np.int64)
    s[d_tgt == d_src] = 0

    frac = x - s
    suspect = (d_tgt != d_src) & ((frac < _BOUNDARY_TOL) | (frac > 1.0 - _BOUNDARY_TOL))
    if np.any(suspect):
        a_num, a_den = alpha.as_integer_ratio()
        idx = np.nonzero(suspect)[0]
        cache = {}
        for i in idx.tolist():
            p, q = int(d_tgt[i]), int(d_src[i])
            g = math.gcd(p, q)
            key = (p // g, q // g)
            hit = cache.get(key)
            if hit is None:
                hit = cache[key] = _exact_bin(key[0], key[1], a_num, a_den, int(s[i]))
            s[i] = hit
    return s


@dataclass(frozen=True)
class BalanceProfile:
    """Log-binned counts of edge balance ratio for one graph.

    bins is a list of (s, count) covering the contiguous range between
    the smallest and largest occupied bin; interior bins may hold zero.
    positivity is None when undefined (no finite-ratio edge or N <= 2).
    """

    alpha: float
    bins: list
    infinite_count: int
    n_vertices: int
    n_edges: int
    positivity: float | None = None

    def counts_by_s(self):
        return {s: c for s, c in self.bins}

    @property
    def finite_count(self):
        return int(sum(c for _, c in self.bins))

    def bin_edges(self, s):
        return (self.alpha ** s, self.alpha ** (s + 1))


def edge_balance_ratio(g, edge):
    """Balance ratio of one edge of g.

    Raises UsageError if (source, target) is not an edge of g.
    """
    u, v = int(edge[0]), int(edge[1])
    if not g.has_edge(u, v):
        raise UsageError(f"({u}, {v}) is not an edge of the graph")
    d_src = int(g.in_degree[u])
    d_tgt = int(g.in_degree[v])
    ratio = RATIO_INFINITE if d_src == 0 else d_tgt / d_src
    return EdgeBalanceRecord(source=u, target=v, ratio=ratio)


def _positivity_from_arrays(d_src, d_tgt, n_vertices):
    finite = d_src > 0
    n_finite = int(finite.sum())
    if n_finite == 0:
        raise UndefinedPositivityError("no finite-ratio edges")
    if n_vertices <= 2:
        raise UndefinedPositivityError(
            f"positivity needs N >= 3 for log(N-1) > 0, got N={n_vertices}")
    total = float(np.sum(np.log(d_tgt[finite])) - np.sum(np.log(d_src[finite])))
    return total / (n_finite * math.log(n_vertices - 1))


def positivity(g):
    """Normalized mean log balance ratio over finite-ratio edges, in [-1, 1].

    Raises UndefinedPositivityError when no edge has a finite ratio or
    the graph has fewer than 3 vertices.
    """
    d_src = g.in_degree[g.src]
    d_tgt = g.in_degree[g.dst]
    return _positivity_from_arrays(d_src, d_tgt, g.n_vertices)


def balance_profile(g, alpha=DEFAULT_ALPHA):
    """Tabulate balance ratios of g in bins [alpha^s, alpha^(s+1)).

    Infinite-ratio edges (source in-degree 0) are counted separately and
    excluded from the bins and from positivity. The bin counts plus the
    infinite count always sum to the edge count exactly.
    """
    alpha = float(alpha)
    if alpha <= 1.0:
        raise ConfigError(f"alpha must be > 1, got {alpha}")

    d_src = g.in_degree[g.src]
    d_tgt = g.in_degree[g.dst]
    finite = d_src > 0
    infinite_count = int(g.n_edges - finite.sum())

    bins = []
    if finite.any():
        s = _bin_indices(d_src[finite], d_tgt[finite], alpha)
        s_min, s_max = int(s.min()), int(s.max())
        counts = np.bincount(s - s_min, minlength=s_max - s_min + 1)
        bins = [(s_min + i, int(c)) for i, c in enumerate(counts)]

    try:
        p = _positivity_from_arrays(d_src, d_tgt, g.n_vertices)
    except UndefinedPositivityError:
        p = None

    return BalanceProfile(alpha=alpha, bins=bins, infinite_count=infinite_count,
                          n_vertices=g.n_vertices, n_edges=g.n_edges, positivity=p)


@dataclass(frozen=True)
class DegreeSlice:
    """Balance ratios of every edge touching the vertices with in-degree k.

    in_edge_ratios come from edges pointing at the focal vertices (ratio
    k / d_i(source), inf when the source has in-degree 0); out_edge_ratios
    from edges leaving them (ratio d_i(target) / k). The parallel degree
    arrays keep the raw endpoint in-degrees for per-edge reports.
    """

    k: int
    in_edge_ratios: np.ndarray
    out_edge_ratios: np.ndarray
    in_source_degrees: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    out_target_degrees: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))


def degree_slice(g, k):
    """Collect ratios of the in-edges and out-edges of in-degree-k vertices.

    A k with no vertices yields an empty slice, not an error.
    """
    k = int(k)
    if k < 0:
        raise UsageError(f"in-degree must be >= 0, got {k}")
    d_src = g.in_degree[g.src]
    d_tgt = g.in_degree[g.dst]

    in_mask = d_tgt == k
    in_src_deg = d_src[in_mask]
    with np.errstate(divide="ignore"):
        in_ratios = np.where(in_src_deg > 0, k / np.maximum(in_src_deg, 1), np.inf)

    out_mask = d_src == k
    out_tgt_deg = d_tgt[out_mask]
    if k == 0:
        out_ratios = np.full(out_tgt_deg.shape, np.inf)
    else:
        out_ratios = out_tgt_deg / k

    return DegreeSlice(k=k, in_edge_ratios=in_ratios, out_edge_ratios=out_ratios,
                       in_source_degrees=in_src_deg.astype(np.int64),
                       out_target_degrees=out_tgt_deg.astype(np.int64))


def bin_average_degrees(g, alpha=DEFAULT_ALPHA):
    """Mean endpoint in-degrees per profile bin, over finite-ratio edges.

    Returns {s: (mean in-vertex degree, mean out-vertex degree)} for
    every nonempty bin; empty bins are omitted.
    """
    alpha = float(alpha)
    if alpha <= 1.0:
        raise ConfigError(f"alpha must be > 1, got {alpha}")
    d_src = g.in_degree[g.src]
    d_tgt = g.in_degree[g.dst]
    finite = d_src > 0
    if not finite.any():
        return {}
    d_src, d_tgt = d_src[finite], d_tgt[finite]
    s = _bin_indices(d_src, d_tgt, alpha)
    s_min = int(s.min())
    shifted = s - s_min
    counts = np.bincount(shifted)
    sum_tgt = np.bincount(shifted, weights=d_tgt)
    sum_src = np.bincount(shifted, weights=d_src)
    return {
        s_min + i: (sum_tgt[i] / counts[i], sum_src[i] / counts[i])
        for i in np.nonzero(counts)[0].tolist()
    }


# -- serialization ----------------------------------------------------------
#
# JSON document fields (in this order, for byte-stable golden files):
#   manifest?, n_vertices, n_edges, alpha, bins, infinite_edges, positivity
# CSV columns: s, r_low, r_high, count

def profile_to_dict(profile, manifest=None):
    doc = {}
    if manifest is not None:
        doc["manifest"] = manifest
    doc["n_vertices"] = profile.n_vertices
    doc["n_edges"] = profile.n_edges
    doc["alpha"] = profile.alpha
    doc["bins"] = [
        {"s": s, "r_low": profile.alpha ** s, "r_high": profile.alpha ** (s + 1),
         "count": c}
        for s, c in profile.bins
    ]
    doc["infinite_edges"] = profile.infinite_count
    doc["positivity"] = profile.positivity
    return doc


def profile_from_dict(doc):
    return BalanceProfile(
        alpha=float(doc["alpha"]),
        bins=[(int(b["s"]), int(b["count"])) for b in doc["bins"]],
        infinite_count=int(doc["infinite_edges"]),
        n_vertices=int(doc["n_vertices"]),
        n_edges=int(doc["n_edges"]),
        positivity=None if doc["positivity"] is None else float(doc["positivity"]),
    )


def profile_to_json(profile, manifest=None):
    return json.dumps(profile_to_dict(profile, manifest=manifest), indent=2) + "\n"


def profile_from_json(text):
    return profile_from_dict(json.loads(text))


def profile_to_csv(profile):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "r_low", "r_high", "count"])
    for s, c in profile.bins:
        writer.writerow([s, repr(profile.alpha ** s), repr(profile.alpha ** (s + 1)), c])
    return buf.getvalue()
