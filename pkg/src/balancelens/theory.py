"""Closed-form balance-ratio predictions and empirical fits.

For a network whose in-degree counts follow N_k ~ A * k^-gamma, the
binned balance-ratio counts follow a four-piece power law in R:

    far below 1:   (A^2/N) * (1 - alpha^(1-gamma)) / ((gamma-2)(2*gamma-3)) * R^(gamma-1)
    near below 1:  (A^2/N) / (2*gamma - 2) * R^gamma
    near above 1:  (A^2/N) / (2*gamma - 2) * R^(1-gamma)
    far above 1:   (A^2/N) * (1 - alpha^(2-gamma)) / ((gamma-2)(2*gamma-3)) * R^(2-gamma)

so the section exponents are gamma-1, gamma, 1-gamma and 2-gamma. Close
to R = 1 the per-bin counts vibrate: ratios are ratios of two small
integers, so mass spikes exactly at integer R (above 1) and at
reciprocal integers (below 1). The near sections therefore describe the
peak envelope, not every bin, and empirical near-section fits here use
only the bins containing a single such peak abscissa.

The two far coefficients are singular at gamma = 2 and gamma = 1.5 and
the near coefficient at gamma = 1; these raise rather than return
limits. Intercepts (coefficients) are approximations and should not be
gated on, only the exponents are sharp.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import ConfigError, EstimationError, SingularGammaError, UsageError
from .metrics import BalanceProfile, bin_of_ratio

__all__ = [
    "FAR_BELOW", "NEAR_BELOW", "NEAR_ABOVE", "FAR_ABOVE", "SECTION_LABELS",
    "TheoryParams", "TheorySection", "TheoreticalProfile", "SectionFit",
    "ComparisonReport", "section_exponents", "near_coefficient",
    "far_below_coefficient", "far_above_coefficient", "lemma1_count",
    "theorem1_profile", "estimate_gamma", "estimate_scale_A",
    "fit_section_slopes", "compare_profiles",
    "theory_to_json", "theory_from_json", "comparison_to_json",
]

FAR_BELOW = "far_below"
NEAR_BELOW = "near_below"
NEAR_ABOVE = "near_above"
FAR_ABOVE = "far_above"
SECTION_LABELS = (FAR_BELOW, NEAR_BELOW, NEAR_ABOVE, FAR_ABOVE)

DEFAULT_BOUNDARIES = (0.1, 10.0)

# Snap tolerance when placing grid/selection cutoffs that sit exactly on
# a bin edge in exact arithmetic (e.g. r_hi = 10 with alpha = 10**0.1).
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class TheoryParams:
    """Power-law scale factor A, exponent gamma, vertex count and bin base."""

    scale_a: float
    gamma: float
    n_vertices: int
    alpha: float

    def __post_init__(self):
        if not self.scale_a > 0:
            raise ConfigError(f"scale factor must be > 0, got {self.scale_a}")
        if not self.gamma > 1:
            raise ConfigError(f"gamma must be > 1, got {self.gamma}")
        if self.n_vertices < 2:
            raise ConfigError(f"n_vertices must be >= 2, got {self.n_vertices}")
        if not self.alpha > 1:
            raise ConfigError(f"alpha must be > 1, got {self.alpha}")

    @property
    def amplitude(self):
        """A^2 / N, the common prefactor of all four sections."""
        return self.scale_a ** 2 / self.n_vertices


def section_exponents(gamma):
    """The four section exponents as a label -> exponent dict."""
    return {
        FAR_BELOW: gamma - 1.0,
        NEAR_BELOW: gamma,
        NEAR_ABOVE: 1.0 - gamma,
        FAR_ABOVE: 2.0 - gamma,
    }


def _check_far_denominator(gamma):
    if gamma == 2.0:
        raise SingularGammaError(
            "far-section coefficient denominator (gamma - 2) vanishes at gamma = 2")
    if gamma == 1.5:
        raise SingularGammaError(
            "far-section coefficient denominator (2*gamma - 3) vanishes at gamma = 1.5")


def near_coefficient(params):
    """Coefficient of both near sections; they agree at R = 1 by construction."""
    if params.gamma == 1.0:
        raise SingularGammaError(
            "near-section coefficient denominator (2*gamma - 2) vanishes at gamma = 1")
    return params.amplitude / (2.0 * params.gamma - 2.0)


def far_below_coefficient(params):
    _check_far_denominator(params.gamma)
    g, a = params.gamma, params.alpha
    return params.amplitude * (1.0 - a ** (1.0 - g)) / ((g - 2.0) * (2.0 * g - 3.0))


def far_above_coefficient(params):
    _check_far_denominator(params.gamma)
    g, a = params.gamma, params.alpha
    return params.amplitude * (1.0 - a ** (2.0 - g)) / ((g - 2.0) * (2.0 * g - 3.0))


def lemma1_count(params, k, r):
    """Expected number of edges with in-vertex degree k and balance ratio r.

    Closed form (A^2/N) * k^(1-2*gamma) * r^gamma. k is the in-degree of
    the edge's target; the source then has in-degree k/r.
    """
    if k < 1:
        raise UsageError(f"in-vertex degree must be >= 1, got {k}")
    if not r > 0:
        raise UsageError(f"balance ratio must be > 0, got {r}")
    return params.amplitude * float(k) ** (1.0 - 2.0 * params.gamma) * float(r) ** params.gamma


@dataclass(frozen=True)
class TheorySection:
    label: str
    exponent: float
    coefficient: float
    r: np.ndarray
    value: np.ndarray


@dataclass(frozen=True)
class TheoreticalProfile:
    """Predicted per-bin counts from the four closed forms.

    Near sections are evaluated at their peak abscissae (integers above
    1, reciprocal integers below 1); far sections at the bin anchors
    alpha^s outside the near range.
    """

    scale_a: float
    gamma: float
    n_vertices: int
    alpha: float
    boundaries: tuple
    sections: dict

    @property
    def exponents(self):
        return {label: sec.exponent for label, sec in self.sections.items()}


def _log_alpha(x, alpha):
    return math.log(x) / math.log(alpha)


def theorem1_profile(params, boundaries=DEFAULT_BOUNDARIES):
    """Evaluate the four-piece prediction on the default ratio grid.

    The grid spans [1/(N-1), N-1], split at the near/far boundaries
    (r_lo, r_hi). Raises SingularGammaError for gamma in {1.5, 2} (and
    ConfigError for gamma <= 1, which TheoryParams already rejects).
    """
    r_lo, r_hi = boundaries
    if not 0 < r_lo < 1 < r_hi:
        raise ConfigError(f"boundaries must satisfy 0 < r_lo < 1 < r_hi, got {boundaries}")
    c_near = near_coefficient(params)
    c_fb = far_below_coefficient(params)
    c_fa = far_above_coefficient(params)
    exps = section_exponents(params.gamma)
    alpha = params.alpha
    n = params.n_vertices
    r_min, r_max = 1.0 / (n - 1), float(n - 1)

    # integer peaks 2..r_hi and reciprocal peaks down to r_lo
    m_above = np.arange(2, math.floor(r_hi + _GRID_EPS) + 1, dtype=np.float64)
    m_above = m_above[m_above <= r_max]
    m_below = np.arange(2, math.floor(1.0 / r_lo + _GRID_EPS) + 1, dtype=np.float64)
    r_below = 1.0 / m_below
    r_below = r_below[r_below >= r_min][::-1]

    s_hi_first = math.floor(_log_alpha(r_hi, alpha) + _GRID_EPS) + 1
    s_hi_last = math.floor(_log_alpha(r_max, alpha) + _GRID_EPS)
    s_fa = np.arange(s_hi_first, s_hi_last + 1, dtype=np.float64)
    r_fa = alpha ** s_fa

    s_lo_last = math.ceil(_log_alpha(r_lo, alpha) - _GRID_EPS) - 1
    s_lo_first = math.ceil(_log_alpha(r_min, alpha) - _GRID_EPS)
    s_fb = np.arange(s_lo_first, s_lo_last + 1, dtype=np.float64)
    r_fb = alpha ** s_fb

    def sec(label, coeff, r):
        r = np.asarray(r, dtype=np.float64)
        return TheorySection(label=label, exponent=exps[label], coefficient=coeff,
                             r=r, value=coeff * r ** exps[label])

    sections = {
        FAR_BELOW: sec(FAR_BELOW, c_fb, r_fb),
        NEAR_BELOW: sec(NEAR_BELOW, c_near, r_below),
        NEAR_ABOVE: sec(NEAR_ABOVE, c_near, m_above),
        FAR_ABOVE: sec(FAR_ABOVE, c_fa, r_fa),
    }
    return TheoreticalProfile(scale_a=params.scale_a, gamma=params.gamma,
                              n_vertices=params.n_vertices, alpha=alpha,
                              boundaries=(float(r_lo), float(r_hi)), sections=sections)


# -- estimation --------------------------------------------------------------

def _usable_degrees(hist, k_min):
    ks, ns = hist.as_arrays()
    keep = (ks >= k_min) & (ns > 0)
    return ks[keep].astype(np.float64), ns[keep].astype(np.float64)


def estimate_gamma(hist, method="mle", k_min=1):
    """Fit the in-degree scaling exponent; returns (gamma, std_error).

    method "mle" maximizes the discrete power-law likelihood truncated at
    k_min (Hurwitz-zeta normalization); "loglog-ls" takes the negated
    least-squares slope of log N_k against log k. MLE weights vertices,
    least squares weights distinct degrees, so on real data MLE is less
    tail-dominated.
    """
    if k_min < 1:
        raise ConfigError(f"k_min must be >= 1, got {k_min}")
    ks, ns = _usable_degrees(hist, k_min)
    if ks.size < 2:
        raise EstimationError(
            f"need >= 2 distinct degrees >= {k_min}, got {ks.size}")

    if method == "loglog-ls":
        x, y = np.log(ks), np.log(ns)
        slope, intercept = np.polyfit(x, y, 1)
        if ks.size > 2:
            resid = y - (slope * x + intercept)
            sxx = np.sum((x - x.mean()) ** 2)
            se = math.sqrt(float(resid @ resid) / (ks.size - 2) / sxx)
        else:
            se = math.nan
        return float(-slope), float(se)

    if method != "mle":
        raise ConfigError(f"unknown method {method!r}; expected 'mle' or 'loglog-ls'")

    m_total = float(ns.sum())
    log_sum = float(ns @ np.log(ks))

    def neg_ll(g):
        return g * log_sum + m_total * math.log(zeta(g, k_min))

    res = minimize_scalar(neg_ll, bounds=(1.000001, 25.0), method="bounded",
                          options={"xatol": 1e-10})
    g_hat = float(res.x)
    h = 1e-4
    curv = (math.log(zeta(g_hat + h, k_min)) - 2.0 * math.log(zeta(g_hat, k_min))
            + math.log(zeta(g_hat - h, k_min))) / h ** 2
    se = 1.0 / math.sqrt(m_total * curv) if curv > 0 else math.nan
    return g_hat, float(se)


def estimate_scale_A(hist, gamma, k_min=1):
    """Least-squares scale factor with gamma held fixed.

    Minimizes sum over usable k of (log N_k - (log A - gamma log k))^2,
    i.e. log A is the mean of log N_k + gamma log k.
    """
    if not gamma > 1:
        raise ConfigError(f"gamma must be > 1, got {gamma}")
    ks, ns = _usable_degrees(hist, k_min)
    if ks.size == 0:
        raise EstimationError(f"no degrees >= {k_min} with positive counts")
    return float(np.exp(np.mean(np.log(ns) + gamma * np.log(ks))))


# -- section fitting ---------------------------------------------------------

@dataclass(frozen=True)
class SectionFit:
    """Log-log regression over one section; slope None when < 3 points."""

    label: str
    slope: float | None
    intercept: float | None
    r_range: tuple
    n_points: int


def _fit_points(label, x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    keep = y > 0
    x, y = x[keep], y[keep]
    if x.size < 3:
        return SectionFit(label=label, slope=None, intercept=None,
                          r_range=(float(x.min()), float(x.max())) if x.size else (math.nan, math.nan),
                          n_points=int(x.size))
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return SectionFit(label=label, slope=float(slope), intercept=float(intercept),
                      r_range=(float(x.min()), float(x.max())), n_points=int(x.size))


def _single_peak_bins(peaks_num_den, alpha, counts):
    """(abscissa, count) for bins holding exactly one peak ratio.

    peaks_num_den is a list of (numerator, denominator) integer pairs.
    With a coarse alpha two adjacent peaks can share one bin; such bins
    mix two peak masses and are excluded from the envelope.
    """
    by_bin = {}
    for num, den in peaks_num_den:
        s = bin_of_ratio(num, den, alpha)
        by_bin.setdefault(s, []).append(num / den)
    xs, ys = [], []
    for s, peaks in sorted(by_bin.items()):
        if len(peaks) != 1:
            continue
        c = counts.get(s, 0)
        if c > 0:
            xs.append(peaks[0])
            ys.append(c)
    return xs, ys


def fit_section_slopes(profile, boundaries=DEFAULT_BOUNDARIES):
    """Fit the four section slopes; returns {label: SectionFit}.

    For a TheoreticalProfile each section is fit on its own evaluated
    points (a self-consistency path that recovers the exponents
    exactly). For an empirical BalanceProfile, far sections fit
    log(count) against log(bin anchor) over the bins outside
    [r_lo, r_hi] (anchor alpha^s above 1, alpha^(s+1) below 1, matching
    the side each integral is collapsed to); near sections fit the peak
    envelope on single-peak bins, abscissa at the peak ratio. Zero-count
    bins never contribute. Sections with fewer than 3 usable points are
    returned unfittable rather than raising.
    """
    if isinstance(profile, TheoreticalProfile):
        return {label: _fit_points(label, sec.r, sec.value)
                for label, sec in profile.sections.items()}

    if not isinstance(profile, BalanceProfile):
        raise UsageError(f"cannot fit sections of {type(profile).__name__}")
    r_lo, r_hi = boundaries
    if not 0 < r_lo < 1 < r_hi:
        raise ConfigError(f"boundaries must satisfy 0 < r_lo < 1 < r_hi, got {boundaries}")

    alpha = profile.alpha
    counts = profile.counts_by_s()

    s_hi_first = math.floor(_log_alpha(r_hi, alpha) + _GRID_EPS) + 1
    fa_x = [alpha ** s for s, c in profile.bins if s >= s_hi_first and c > 0]
    fa_y = [c for s, c in profile.bins if s >= s_hi_first and c > 0]

    t_lo_last = math.ceil(_log_alpha(r_lo, alpha) - _GRID_EPS) - 1  # upper edge exponent
    fb_x = [alpha ** (s + 1) for s, c in profile.bins if s + 1 <= t_lo_last and c > 0]
    fb_y = [c for s, c in profile.bins if s + 1 <= t_lo_last and c > 0]

    m_above = range(2, math.floor(r_hi + _GRID_EPS) + 1)
    na_x, na_y = _single_peak_bins([(m, 1) for m in m_above], alpha, counts)
    m_below = range(2, math.floor(1.0 / r_lo + _GRID_EPS) + 1)
    nb_x, nb_y = _single_peak_bins([(1, m) for m in m_below], alpha, counts)

    return {
        FAR_BELOW: _fit_points(FAR_BELOW, fb_x, fb_y),
        NEAR_BELOW: _fit_points(NEAR_BELOW, nb_x, nb_y),
        NEAR_ABOVE: _fit_points(NEAR_ABOVE, na_x, na_y),
        FAR_ABOVE: _fit_points(FAR_ABOVE, fa_x, fa_y),
    }


# -- profile comparison ------------------------------------------------------

@dataclass(frozen=True)
class SectionComparison:
    label: str
    exponent: float
    coefficient: float
    fitted_slope: float | None
    delta: float | None
    intercept_delta: float | None
    within_tolerance: bool | None
    n_points: int


@dataclass(frozen=True)
class ComparisonReport:
    """Per-section slope deltas plus non-gating intercept and bin residuals."""

    alpha: float
    slope_tolerance: float
    boundaries: tuple
    sections: list
    bin_residuals: dict

    @property
    def deltas(self):
        return {s.label: s.delta for s in self.sections}


def _empirical_abscissa(s, alpha):
    return alpha ** s if s >= 0 else alpha ** (s + 1)


def compare_profiles(empirical, theory, slope_tolerance=0.25):
    """Compare an empirical profile with the closed-form prediction.

    Both inputs must use the same alpha. Slope deltas (empirical fit
    minus theoretical exponent) carry the per-section verdicts; intercept
    deltas and per-bin log residuals are reported but never gated, since
    the closed-form coefficients absorb integral approximations.

    The empirical argument may itself be a TheoreticalProfile (identity
    checks); deltas are then zero to rounding.
    """
    if not math.isclose(empirical.alpha, theory.alpha, rel_tol=1e-9, abs_tol=0.0):
        raise ConfigError(
            f"alpha mismatch: empirical {empirical.alpha} vs theory {theory.alpha}")

    fits = fit_section_slopes(empirical, boundaries=theory.boundaries)

    sections = []
    for label in SECTION_LABELS:
        sec = theory.sections[label]
        fit = fits[label]
        delta = None if fit.slope is None else fit.slope - sec.exponent
        icept = None
        if fit.intercept is not None and sec.coefficient > 0:
            icept = fit.intercept - math.log(sec.coefficient)
        sections.append(SectionComparison(
            label=label, exponent=sec.exponent, coefficient=sec.coefficient,
            fitted_slope=fit.slope, delta=delta, intercept_delta=icept,
            within_tolerance=None if delta is None else abs(delta) <= slope_tolerance,
            n_points=fit.n_points))

    residuals = {label: [] for label in SECTION_LABELS}
    if isinstance(empirical, BalanceProfile):
        r_lo, r_hi = theory.boundaries
        coeff = {label: theory.sections[label].coefficient for label in SECTION_LABELS}
        exps = {label: theory.sections[label].exponent for label in SECTION_LABELS}
        for s, c in empirical.bins:
            if c <= 0:
                continue
            x = _empirical_abscissa(s, empirical.alpha)
            if x > r_hi:
                label = FAR_ABOVE
            elif x >= 1.0:
                label = NEAR_ABOVE
            elif x >= r_lo:
                label = NEAR_BELOW
            else:
                label = FAR_BELOW
            pred = coeff[label] * x ** exps[label]
            if pred > 0:
                residuals[label].append(math.log(c) - math.log(pred))
    summary = {}
    for label, res in residuals.items():
        if res:
            arr = np.abs(np.array(res))
            summary[label] = {"n_bins": int(arr.size),
                              "mean_abs_log_residual": float(arr.mean()),
                              "max_abs_log_residual": float(arr.max())}
        else:
            summary[label] = {"n_bins": 0,
                              "mean_abs_log_residual": None,
                              "max_abs_log_residual": None}

    return ComparisonReport(alpha=empirical.alpha, slope_tolerance=slope_tolerance,
                            boundaries=tuple(theory.boundaries), sections=sections,
                            bin_residuals=summary)


# -- serialization -----------------------------------------------------------

def theory_to_dict(profile, manifest=None):
    doc = {}
    if manifest is not None:
        doc["manifest"] = manifest
    doc["scale_a"] = profile.scale_a
    doc["gamma"] = profile.gamma
    doc["n_vertices"] = profile.n_vertices
    doc["alpha"] = profile.alpha
    doc["boundaries"] = list(profile.boundaries)
    doc["sections"] = [
        {"label": label,
         "exponent": profile.sections[label].exponent,
         "coefficient": profile.sections[label].coefficient,
         "points": [[float(r), float(v)]
                    for r, v in zip(profile.sections[label].r,
                                    profile.sections[label].value)]}
        for label in SECTION_LABELS
    ]
    return doc


def theory_from_dict(doc):
    sections = {}
    for entry in doc["sections"]:
        r = np.array([p[0] for p in entry["points"]], dtype=np.float64)
        v = np.array([p[1] for p in entry["points"]], dtype=np.float64)
        sections[entry["label"]] = TheorySection(
            label=entry["label"], exponent=float(entry["exponent"]),
            coefficient=float(entry["coefficient"]), r=r, value=v)
    return TheoreticalProfile(
        scale_a=float(doc["scale_a"]), gamma=float(doc["gamma"]),
        n_vertices=int(doc["n_vertices"]), alpha=float(doc["alpha"]),
        boundaries=tuple(doc["boundaries"]), sections=sections)


def theory_to_json(profile, manifest=None):
    return json.dumps(theory_to_dict(profile, manifest=manifest), indent=2) + "\n"


def theory_from_json(text):
    return theory_from_dict(json.loads(text))


def comparison_to_dict(report, manifest=None):
    doc = {}
    if manifest is not None:
        doc["manifest"] = manifest
    doc["alpha"] = report.alpha
    doc["slope_tolerance"] = report.slope_tolerance
    doc["boundaries"] = list(report.boundaries)
    doc["sections"] = [
        {"label": s.label, "exponent": s.exponent, "coefficient": s.coefficient,
         "fitted_slope": s.fitted_slope, "delta": s.delta,
         "intercept_delta": s.intercept_delta,
         "within_tolerance": s.within_tolerance, "n_points": s.n_points}
        for s in report.sections
    ]
    doc["bin_residuals"] = report.bin_residuals
    return doc


def comparison_to_json(report, manifest=None):
    return json.dumps(comparison_to_dict(report, manifest=manifest), indent=2) + "\n"
