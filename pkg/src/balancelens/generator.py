"""Seeded generators for power-law in-degree directed networks.

Two pairs of construction rules combine into four models:

* degree counts: either the count of in-degree-k vertices is fixed at
  round(A * k^-gamma) (deterministic counts), or each vertex draws its
  in-degree independently with probability proportional to k^-gamma
  (stochastic counts);
* edge realization: either each vertex receives exactly its assigned
  in-degree from sources sampled without replacement (exact), or every
  other vertex points at it independently with probability k/N
  (bernoulli).

Model table: deterministic = counts + exact, type1 = stochastic counts +
exact, type2 = deterministic counts + bernoulli, type3 = stochastic
counts + bernoulli. A fifth model, "sequence", realizes a caller-provided
in-degree sequence exactly.

All randomness flows through per-vertex Philox substreams keyed on
(seed, vertex id): generation is bit-identical for equal (config, seed)
and could be partitioned across workers without changing the output.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import DirectedGraph

__all__ = [
    "MODELS",
    "GeneratorConfig",
    "DegreeAssignment",
    "assign_degrees_deterministic",
    "assign_degrees_stochastic",
    "realize_edges_exact",
    "realize_edges_bernoulli",
    "generate",
]

MODELS = ("deterministic", "type1", "type2", "type3", "sequence")
_STOCHASTIC_COUNT_MODELS = ("type1", "type3")

# Substream tag for the degree-assignment stream; vertex substreams use
# the vertex id (< N <= 2**63), so this cannot collide.
_ASSIGN_STREAM = (1 << 64) - 1


def _substream(seed, stream):
    """Independent Philox stream for (seed, stream id)."""
    key = (int(seed) << 64) | int(stream)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class GeneratorConfig:
    """Model selector plus the power-law parameters.

    k_cap bounds the in-degree support, default N - 1 (a simple digraph
    cannot exceed it). gamma must be > 1 for the stochastic-count models
    (the k^-gamma normalization over an unbounded head requires it);
    deterministic-count models accept any gamma > 0.
    """

    model: str
    n_vertices: int
    gamma: float
    seed: int
    k_cap: int | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n_vertices < 2:
            raise ConfigError(f"n_vertices must be >= 2, got {self.n_vertices}")
        if self.model in _STOCHASTIC_COUNT_MODELS:
            if self.gamma <= 1.0:
                raise ConfigError(
                    f"gamma must be > 1 for model {self.model!r}, got {self.gamma}")
        elif self.gamma <= 0.0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if self.k_cap is not None and not 1 <= self.k_cap <= self.n_vertices - 1:
            raise ConfigError(
                f"k_cap must be in [1, N-1], got {self.k_cap} for N={self.n_vertices}")

    @property
    def effective_k_cap(self):
        return self.n_vertices - 1 if self.k_cap is None else self.k_cap


@dataclass(frozen=True)
class DegreeAssignment:
    """Intended in-degree per vertex and the realized scale factor A."""

    target_in_degree: np.ndarray
    scale_a: float

    @property
    def n_vertices(self):
        return int(self.target_in_degree.size)


def _deterministic_counts(scale_a, gamma, k_cap):
    """Rounded counts per degree k = 1..k_max for a given scale factor.

    The support ends at the largest k whose ideal count A * k^-gamma
    still exceeds one vertex; beyond it rounding noise would manufacture
    spurious single-vertex tail degrees.
    """
    if scale_a <= 1.0:
        return np.zeros(0, dtype=np.int64)
    k_max = min(int(math.floor(scale_a ** (1.0 / gamma))), k_cap)
    while k_max >= 1 and scale_a * k_max ** (-gamma) <= 1.0:
        k_max -= 1
    if k_max < 1:
        return np.zeros(0, dtype=np.int64)
    ks = np.arange(1, k_max + 1, dtype=np.float64)
    return np.rint(scale_a * ks ** (-gamma)).astype(np.int64)


def assign_degrees_deterministic(cfg):
    """Fix the count of in-degree-k vertices at round(A * k^-gamma).

    A is found by bisection so the rounded counts sum to N; any residual
    vertices left by rounding are assigned in-degree 1, the mode of the
    distribution, where they distort the shape least. Degrees are laid
    out in descending order from vertex 0.
    """
    n = cfg.n_vertices
    gamma = cfg.gamma
    k_cap = cfg.effective_k_cap

    lo, hi = 0.0, float(2 * n)
    while np.sum(_deterministic_counts(hi, gamma, k_cap)) < n:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(_deterministic_counts(mid, gamma, k_cap)) <= n:
            lo = mid
        else:
            hi = mid
    scale_a = lo
    counts = _deterministic_counts(scale_a, gamma, k_cap)
    residual = n - int(counts.sum())
    if residual > 0:
        if counts.size == 0:
            counts = np.zeros(1, dtype=np.int64)
        counts[0] += residual

    degrees = np.repeat(np.arange(1, counts.size + 1, dtype=np.int64), counts)
    target = degrees[::-1].copy()  # descending from vertex 0
    return DegreeAssignment(target_in_degree=target, scale_a=float(scale_a))


def assign_degrees_stochastic(cfg):
    """Draw each vertex's in-degree independently, P(k) proportional to k^-gamma.

    Sampling is inverse-CDF over the cumulative table on [1, k_cap]. The
    reported scale factor is A = N / sum_{j<=k_cap} j^-gamma, the value
    for which the expected count of in-degree-k vertices is A * k^-gamma.
    """
    n = cfg.n_vertices
    k_cap = cfg.effective_k_cap
    weights = np.arange(1, k_cap + 1, dtype=np.float64) ** (-cfg.gamma)
    norm = weights.sum()
    cdf = np.cumsum(weights) / norm

    rng = _substream(cfg.seed, _ASSIGN_STREAM)
    u = rng.random(n)
    target = np.searchsorted(cdf, u, side="right").astype(np.int64) + 1
    np.clip(target, 1, k_cap, out=target)
    return DegreeAssignment(target_in_degree=target, scale_a=float(n / norm))


def _distinct_sources(rng, n_others, k):
    """k distinct uniform draws from range(n_others), first-draw order."""
    if k >= n_others:
        return np.arange(n_others, dtype=np.int64)
    if 2 * k >= n_others:
        return rng.permutation(n_others)[:k].astype(np.int64)
    if k == 1:
        return np.array([rng.integers(0, n_others)], dtype=np.int64)
    picked = []
    seen = set()
    while len(picked) < k:
        need = k - len(picked)
        batch = rng.integers(0, n_others, size=need + max(4, need >> 2))
        for t in batch.tolist():
            if t not in seen:
                seen.add(t)
                picked.append(t)
                if len(picked) == k:
                    break
    return np.array(picked, dtype=np.int64)


def _realize(target, seed, bernoulli):
    n = int(target.size)
    if n < 2:
        raise ConfigError("need at least 2 vertices to realize edges")
    limit = n if bernoulli else n - 1
    bad = np.nonzero(target > limit)[0]
    if bad.size:
        v = int(bad[0])
        raise ConfigError(
            f"target in-degree {int(target[v])} of vertex {v} exceeds {limit}")
    if target.min() < 0:
        raise ConfigError("target in-degrees must be >= 0")

    src_blocks = []
    dst_blocks = []
    seed = int(seed)
    philox = np.random.Philox
    generator = np.random.Generator
    seed_hi = seed << 64
    for v in range(n):
        k = int(target[v])
        if k == 0 and not bernoulli:
            continue
        rng = generator(philox(key=seed_hi | v))
        if bernoulli:
            # Binomial count then distinct sources is distributionally the
            # same as N-1 independent coin flips at k/N, without the O(N^2)
            # pair scan.
            m = int(rng.binomial(n - 1, k / n)) if k > 0 else 0
            if m == 0:
                continue
        else:
            m = k
        chosen = _distinct_sources(rng, n - 1, m)
        chosen += chosen >= v  # skip the vertex itself
        src_blocks.append(chosen)
        dst_blocks.append(np.full(m, v, dtype=np.int64))

    if src_blocks:
        src = np.concatenate(src_blocks)
        dst = np.concatenate(dst_blocks)
    else:
        src = np.empty(0, dtype=np.int64)
        dst = np.empty(0, dtype=np.int64)
    return DirectedGraph(n, src, dst, validate=False)


def realize_edges_exact(assignment, seed):
    """Give each vertex exactly its target in-degree.

    Sources are sampled uniformly without replacement from all other
    vertices, per-vertex substream, so realized in-degree equals the
    target exactly.
    """
    return _realize(assignment.target_in_degree, seed, bernoulli=False)


def realize_edges_bernoulli(assignment, seed):
    """Point every other vertex at each target independently with p = k/N.

    Realized in-degree fluctuates around the target with mean
    k * (N-1) / N.
    """
    return _realize(assignment.target_in_degree, seed, bernoulli=True)


def generate(cfg, degree_sequence=None):
    """Generate a graph per the model table; returns (graph, assignment).

    The assignment is returned alongside the graph so callers can report
    the realized scale factor A and, for the bernoulli models, compare
    realized in-degrees against their targets.
    """
    if cfg.model == "sequence":
        if degree_sequence is None:
            raise ConfigError("model 'sequence' needs a degree_sequence")
        target = np.asarray(degree_sequence, dtype=np.int64)
        if target.size != cfg.n_vertices:
            raise ConfigError(
                f"degree_sequence length {target.size} != n_vertices {cfg.n_vertices}")
        assignment = DegreeAssignment(target_in_degree=target, scale_a=math.nan)
    elif degree_sequence is not None:
        raise ConfigError("degree_sequence is only valid for model 'sequence'")
    elif cfg.model in _STOCHASTIC_COUNT_MODELS:
        assignment = assign_degrees_stochastic(cfg)
    else:
        assignment = assign_degrees_deterministic(cfg)

    if cfg.model in ("type2", "type3"):
        graph = realize_edges_bernoulli(assignment, cfg.seed)
    else:
        graph = realize_edges_exact(assignment, cfg.seed)
    return graph, assignment
