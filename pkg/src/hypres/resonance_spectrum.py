"""Resonances of the geodesic flow from Laplacian spectral data.

A spectrum is a list of ``SpectrumEntry(m, sigma, mult)``: sigma is an
eigenvalue of the Laplacian on trace-free divergence-free symmetric m-tensors.
Each entry of order k feeds the bands m = k, k+2, ... with l = (m-k)/2 through

    (lam + m + n/2)^2 = n^2/4 + k - sigma.

Also here: exceptional sets, admissible regions, the decay rate nu_0, Weyl
constants, pairing constants and a few integral constants with independent
numerical oracles.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gamma as _gamma, rgamma as _rgamma

from .frame_transport import contract_axes
from .lorentz_core import DomainError
from .poisson_operator import PoleError, boundary_leading_constant
from .quadrature import sphere_rule

__all__ = [
    "COINCIDE_TOL",
    "ADJACENT_TOL",
    "DISC_DEAD_ZONE",
    "SpectrumEntry",
    "Window",
    "ResonanceEntry",
    "ExcludedEntry",
    "Enumeration",
    "validate_spectrum",
    "hodge_augment",
    "enumerate_resonances",
    "m_loop_bound",
    "s_from_sigma",
    "dim2_resonances",
    "ExceptionalSet",
    "exceptional_points",
    "is_exceptional",
    "admissible_region",
    "decay_rate_nu0",
    "WeylReport",
    "weyl",
    "c0",
    "c1",
    "c2",
    "pairing_constant",
    "pairing_constant_literal",
    "pairing_constant_audit",
    "c00",
    "ConstantReport",
    "analytic_constants",
    "hodge_shift_m1",
    "ExpansionTerm",
    "resonance_expansion_terms",
    "synthetic_weyl_spectrum",
    "synthetic_spectrum",
]

COINCIDE_TOL = 1e-9
ADJACENT_TOL = 1e-6
DISC_DEAD_ZONE = 1e-12


# ---------------------------------------------------------------------------
# Input data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumEntry:
    m: int
    sigma: float
    mult: int = 1

    def validate(self, n: int) -> None:
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise DomainError(f"tensor order must be a nonnegative integer, got {self.m!r}")
        if not isinstance(self.mult, (int, np.integer)) or self.mult < 1:
            raise DomainError(f"multiplicity must be a positive integer, got {self.mult!r}")
        if not math.isfinite(self.sigma):
            raise DomainError("eigenvalue must be finite")
        if n == 1 and self.m >= 2:
            raise DomainError("for n = 1 there are no nonzero trace-free tensors of order >= 2")
        bound = 0.0 if self.m == 0 else self.m + n - 1.0
        if self.sigma < bound - 1e-12:
            raise DomainError(f"eigenvalue {self.sigma} for m = {self.m} violates the lower bound {bound}")


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float = 0.0
    im_max: float = 10.0

    def __post_init__(self):
        for v in (self.re_min, self.re_max, self.im_max):
            if v is None or not math.isfinite(v):
                raise DomainError("window must be bounded")
        if self.re_min > self.re_max or self.im_max < 0:
            raise DomainError("empty or inverted window")

    def contains(self, lam: complex) -> bool:
        tol = COINCIDE_TOL
        return (self.re_min - tol <= lam.real <= self.re_max + tol) and abs(lam.imag) <= self.im_max + tol


def validate_spectrum(n: int, spectrum: Iterable[SpectrumEntry]) -> list[SpectrumEntry]:
    if n < 1:
        raise DomainError("n must be >= 1")
    out = list(spectrum)
    for e in out:
        e.validate(n)
    return out


def hodge_augment(n: int, spectrum: Sequence[SpectrumEntry]) -> list[SpectrumEntry]:
    """For n = 1 without explicit m = 1 data: every scalar eigenvalue
    sigma > 0 yields a coclosed 1-form with sigma_1 = sigma + 1."""
    spectrum = list(spectrum)
    if n != 1 or any(e.m == 1 for e in spectrum):
        return spectrum
    extra = [SpectrumEntry(1, e.sigma + 1.0, e.mult) for e in spectrum if e.m == 0 and e.sigma > 0]
    return spectrum + extra


# ---------------------------------------------------------------------------
# Exceptional sets and regions
# ---------------------------------------------------------------------------

def _dist_to_grid(lam: complex, start: float) -> float:
    """Distance from lam to start - (1/2) N_0."""
    re = lam.real
    k = max(0, round((start - re) * 2))
    return abs(lam - complex(start - k / 2.0, 0.0))


@dataclass(frozen=True)
class ExceptionalSet:
    n: int
    m: Optional[int]
    start: float

    def contains(self, lam: complex, tol: float = COINCIDE_TOL) -> bool:
        return _dist_to_grid(complex(lam), self.start) < tol

    def first(self, count: int = 3) -> list[float]:
        return [self.start - k / 2.0 for k in range(count)]

    def describe(self) -> str:
        return f"{self.start:g} - (1/2) N_0"


def exceptional_points(n: int, m: Optional[int] = None) -> ExceptionalSet:
    """-n/2 - N_0/2 when m is None; otherwise R_m (-N_0/2 for n = 1, m > 0)."""
    if m is not None and n == 1 and m > 0:
        return ExceptionalSet(n, m, 0.0)
    return ExceptionalSet(n, m, -n / 2.0)


def is_exceptional(n: int, lam: complex, tol: float = COINCIDE_TOL) -> bool:
    return exceptional_points(n).contains(lam, tol)


def _in_minus_2N(lam: complex, tol: float = COINCIDE_TOL) -> Optional[int]:
    """k if lam = -2k with k >= 1 (within tol)."""
    k = round(-lam.real / 2)
    if k >= 1 and abs(lam + 2 * k) < tol:
        return k
    return None


def admissible_region(n: int, m: int, ell: int, lam: complex, tol: float = COINCIDE_TOL) -> frozenset:
    """Subset of {"vertical_line", "real_segment"} containing lam."""
    lam = complex(lam)
    flags = set()
    if abs(lam.real + m + n / 2.0) < tol:
        flags.add("vertical_line")
    if abs(lam.imag) < tol:
        if m == 2 * ell:
            lo, hi = -n - m, -m
        elif n == 1:
            lo, hi = -1 - m, -m
        else:
            lo, hi = 1 - n - m, -1 - m
        if lo - tol <= lam.real <= hi + tol:
            flags.add("real_segment")
    return frozenset(flags)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResonanceEntry:
    lam: complex
    mult: int
    m: int
    ell: int
    source_sigma: float
    flags: frozenset = field(default_factory=frozenset)

    def sort_key(self):
        return (round(self.lam.real, 12), round(self.lam.imag, 12), self.m, self.ell, self.source_sigma)


@dataclass(frozen=True)
class ExcludedEntry:
    lam: complex
    mult: int
    m: int
    ell: int
    source_sigma: float
    reason: str

    def sort_key(self):
        return (round(self.lam.real, 12), round(self.lam.imag, 12), self.m, self.ell, self.source_sigma)


@dataclass(frozen=True)
class Enumeration:
    n: int
    window: Window
    resonances: list
    excluded: list

    def multiplicity_at(self, lam: complex, tol: float = COINCIDE_TOL) -> int:
        """Total multiplicity of all sources at lam."""
        return sum(r.mult for r in self.resonances if abs(r.lam - lam) < tol)

    def aggregated(self, tol: float = COINCIDE_TOL) -> list[tuple[complex, int]]:
        """(lam, total multiplicity), in the sort order of the records."""
        out: list[list] = []
        for r in self.resonances:
            for slot in out:
                if abs(slot[0] - r.lam) < tol:
                    slot[1] += r.mult
                    break
            else:
                out.append([r.lam, r.mult])
        return [(lam, k) for lam, k in out]


def m_loop_bound(n: int, window: Window) -> int:
    """No admissible resonance of band m lies in the window once m exceeds this."""
    return math.ceil(-window.re_min) + n


def _roots(n: int, k: int, m: int, sigma: float) -> list[complex]:
    disc = n * n / 4.0 + k - sigma
    centre = -m - n / 2.0
    if abs(disc) < DISC_DEAD_ZONE:
        return [complex(centre)]
    d = cmath.sqrt(disc)
    return [complex(centre + d), complex(centre - d)]


def _clean(z: complex) -> complex:
    re = 0.0 if abs(z.real) < 1e-15 else z.real
    im = 0.0 if abs(z.imag) < 1e-15 else z.imag
    return complex(re, im)


def enumerate_resonances(n: int, spectrum: Iterable[SpectrumEntry], window: Window,
                         augment: bool = True) -> Enumeration:
    spectrum = validate_spectrum(n, spectrum)
    if augment:
        spectrum = hodge_augment(n, spectrum)
    exc = exceptional_points(n)
    bound = m_loop_bound(n, window)
    kept, dropped = [], []
    for e in spectrum:
        for m in range(e.m, bound + 1, 2):
            ell = (m - e.m) // 2
            for lam in _roots(n, e.m, m, e.sigma):
                lam = _clean(lam)
                if not window.contains(lam):
                    continue
                if exc.contains(lam):
                    dropped.append(ExcludedEntry(lam, e.mult, m, ell, e.sigma, "exceptional"))
                    continue
                k2 = _in_minus_2N(lam)
                if k2 is not None and m == 2 * k2:
                    dropped.append(ExcludedEntry(lam, e.mult, m, ell, e.sigma, "m=-lambda"))
                    continue
                flags = {"on_" + f if f == "vertical_line" else f for f in admissible_region(n, m, ell, lam)}
                if _dist_to_grid(lam, exc.start) < ADJACENT_TOL:
                    flags.add("exceptional_adjacent")
                kept.append(ResonanceEntry(lam, e.mult, m, ell, e.sigma, frozenset(flags)))
    kept.sort(key=ResonanceEntry.sort_key)
    dropped.sort(key=ExcludedEntry.sort_key)
    # flag coincidences between distinct sources
    out = []
    for r in kept:
        others = [q for q in kept if q is not r and abs(q.lam - r.lam) < COINCIDE_TOL
                  and (q.m, q.ell, q.source_sigma) != (r.m, r.ell, r.source_sigma)]
        out.append(ResonanceEntry(r.lam, r.mult, r.m, r.ell, r.source_sigma,
                                  r.flags | ({"collision"} if others else set())))
    return Enumeration(n, window, out, dropped)


def s_from_sigma(sigma: float) -> complex:
    """s with s(1-s) = sigma and Re s >= 1/2 (or Im s >= 0 on the critical line)."""
    d = cmath.sqrt(0.25 - sigma)
    if d.real == 0 and d.imag < 0:
        d = -d
    return complex(0.5 + d)


def _valid_s(s: complex) -> bool:
    if abs(s.imag) < 1e-12:
        return -1e-12 <= s.real <= 1 + 1e-12
    return abs(s.real - 0.5) < 1e-12


def dim2_resonances(s_values: Iterable, window: Window) -> Enumeration:
    """lam = -m - 1 + s for surfaces; ``s_values`` holds s or (s, mult) pairs.

    Pass both s and 1 - s for each eigenvalue.  Points of -1 - N_0/2 are
    moved to the excluded list.
    """
    exc = ExceptionalSet(1, None, -1.0)
    bound = m_loop_bound(1, window)
    kept, dropped = [], []
    for item in s_values:
        s, mult = (item if isinstance(item, tuple) else (item, 1))
        s = complex(s)
        if not _valid_s(s):
            raise DomainError(f"s = {s} is neither in [0, 1] nor on the critical line")
        if not isinstance(mult, (int, np.integer)) or mult < 1:
            raise DomainError("multiplicity must be a positive integer")
        sigma = (s * (1 - s)).real
        for m in range(0, bound + 1):
            lam = _clean(complex(-m - 1) + s)
            if not window.contains(lam):
                continue
            if exc.contains(lam):
                dropped.append(ExcludedEntry(lam, mult, m, 0, sigma, "exceptional"))
                continue
            kept.append(ResonanceEntry(lam, mult, m, 0, sigma, frozenset()))
    kept.sort(key=ResonanceEntry.sort_key)
    dropped.sort(key=ExcludedEntry.sort_key)
    return Enumeration(1, window, kept, dropped)


# ---------------------------------------------------------------------------
# Decay rate, expansion terms, Hodge shift
# ---------------------------------------------------------------------------

def decay_rate_nu0(n: int, spectrum: Iterable[SpectrumEntry]) -> Optional[float]:
    """min(nu + m) over m < n/2, nu in (0, n/2 - m), nu(n - nu) + m in Spec^m."""
    best = None
    for e in validate_spectrum(n, spectrum):
        if not e.m < n / 2.0:
            continue
        disc = n * n / 4.0 + e.m - e.sigma
        if disc < 0:
            continue
        nu = n / 2.0 - math.sqrt(disc)
        if 0 < nu < n / 2.0 - e.m:
            cand = nu + e.m
            best = cand if best is None else min(best, cand)
    return best


def hodge_shift_m1(n: int, sigma: float) -> float:
    """Hodge eigenvalue sigma - n of the coclosed 1-form with rough eigenvalue sigma."""
    return sigma - n


@dataclass(frozen=True)
class ExpansionTerm:
    lam: float
    mult: int
    m: int
    ell: int
    source_sigma: float

    @property
    def rate(self) -> str:
        return f"exp({self.lam:.17g} t)"


def resonance_expansion_terms(n: int, spectrum: Iterable[SpectrumEntry],
                              window: Optional[Window] = None) -> list[ExpansionTerm]:
    """Resonances with real lam in the open interval (-n/2, 0)."""
    window = window or Window(-n / 2.0, 0.0, 0.0)
    res = enumerate_resonances(n, spectrum, window)
    out = []
    for r in res.resonances:
        if abs(r.lam.imag) < COINCIDE_TOL and -n / 2.0 + COINCIDE_TOL < r.lam.real < -COINCIDE_TOL:
            out.append(ExpansionTerm(r.lam.real, r.mult, r.m, r.ell, r.source_sigma))
    return out


# ---------------------------------------------------------------------------
# Weyl law
# ---------------------------------------------------------------------------

def c0(n: int) -> float:
    return (2.0 * math.sqrt(math.pi)) ** (-n - 1) / math.gamma((n + 3) / 2.0)


def c1(n: int, m: int) -> int:
    """Dimension of symmetric m-tensors in n variables, (m+n-1)!/(m!(n-1)!)."""
    if m < 0:
        return 0
    return math.comb(m + n - 1, m)


def c2(n: int, m: int) -> int:
    """Dimension of trace-free symmetric m-tensors in n variables."""
    return c1(n, m) - c1(n, m - 2)


@dataclass(frozen=True)
class WeylReport:
    n: int
    m: int
    R: float
    volume: float
    c0: float
    c1: int
    c2: int
    band_coefficient: float
    eig_coefficient: float
    leading_band_count: float
    leading_eig_count: float


def weyl(n: int, m: int, R: float, volume: float) -> WeylReport:
    if R <= 0:
        raise DomainError("R must be positive")
    if volume <= 0:
        raise DomainError("volume must be positive")
    k1, k2 = c1(n, m), c2(n, m)
    band = 2.0 ** (-n) * math.pi ** (-(n + 1) / 2.0) / math.gamma((n + 3) / 2.0) * k1 * volume
    eig = c0(n) * k2 * volume
    return WeylReport(n, m, R, volume, c0(n), k1, k2, band, eig,
                      band * R ** (n + 1), eig * R ** (n + 1))


def synthetic_weyl_spectrum(volume: float, count: int, seed: int = 0) -> list[SpectrumEntry]:
    """Scalar eigenvalues 4 pi j / volume (j = 1..count) with small seeded jitter,
    plus the constant eigenvalue 0: a stand-in obeying the n = 1 Weyl law."""
    rng = np.random.default_rng(seed)
    base = 4.0 * math.pi / volume
    sig = base * (np.arange(1, count + 1) + rng.uniform(-0.25, 0.25, count))
    return [SpectrumEntry(0, 0.0, 1)] + [SpectrumEntry(0, float(s), 1) for s in sig]


def synthetic_spectrum(n: int, count: int, seed: int = 0, m_max: int = 2,
                       sigma_max: float = 40.0) -> list[SpectrumEntry]:
    """A seeded stand-in spectrum for plotting: the constant eigenvalue plus
    ``count`` random entries per tensor order m <= m_max, each above its lower bound."""
    rng = np.random.default_rng(seed)
    out = [SpectrumEntry(0, 0.0, 1)]
    for m in range(0, (0 if n == 1 else m_max) + 1):
        lo = 0.0 if m == 0 else m + n - 1.0
        for s in np.sort(rng.uniform(lo, lo + sigma_max, count)):
            out.append(SpectrumEntry(m, float(s), int(rng.integers(1, 3))))
    return out


# ---------------------------------------------------------------------------
# Pairing constants
# ---------------------------------------------------------------------------

def _is_pole(z: complex, tol: float = 1e-12) -> bool:
    r = round(z.real)
    return r <= 0 and abs(z - r) < tol


def pairing_constant(n: int, m: int, ell: int, lam: complex) -> complex:
    """c_{m l}(lam), written with the sine absorbed by the reflection formula:

    2^{m+2l-n} pi^{-n/2} l! (m-2l)! (-1)^{m-l} Gamma(m+n/2-l)/Gamma(m+n/2-2l)
      * prod_{i<l} (-lam-2l+i) * Gamma(lam+n+2m-2l) / Gamma(lam+m+n/2-l).
    """
    if not (0 <= 2 * ell <= m):
        raise DomainError("need 0 <= 2 l <= m")
    lam = complex(lam)
    a = lam + n + 2 * m - 2 * ell
    if _is_pole(a):
        raise PoleError("Gamma(lambda+n+2m-2l)", lam)
    poly = 1.0 + 0j
    for i in range(ell):
        poly *= -lam - 2 * ell + i
    pref = (2.0 ** (m + 2 * ell - n) * math.pi ** (-n / 2.0) * math.factorial(ell)
            * math.factorial(m - 2 * ell) * (-1) ** (m - ell)
            * math.gamma(m + n / 2.0 - ell) / math.gamma(m + n / 2.0 - 2 * ell))
    return complex(pref * poly * _gamma(a) * _rgamma(lam + m + n / 2.0 - ell))


def pairing_constant_literal(n: int, m: int, ell: int, lam: complex, dps: int = 30) -> complex:
    """The displayed product with the sine factor, in mpmath (oracle)."""
    import mpmath as mp

    with mp.workdps(dps):
        L = mp.mpc(lam.real, lam.imag) if isinstance(lam, complex) else mp.mpf(lam)
        v = (mp.mpf(2) ** (m + 2 * ell - n) * mp.pi ** (-1 - mp.mpf(n) / 2) * mp.factorial(ell)
             * mp.factorial(m - 2 * ell) * mp.sin(mp.pi * (mp.mpf(n) / 2 + L))
             * mp.gamma(m + mp.mpf(n) / 2 - ell) * mp.gamma(L + n + 2 * m - 2 * ell)
             * mp.gamma(-L - ell) * mp.gamma(-L - m - mp.mpf(n) / 2 + ell + 1)
             / (mp.gamma(m + mp.mpf(n) / 2 - 2 * ell) * mp.gamma(-L - 2 * ell)))
        return complex(v)


def pairing_constant_audit(n: int, m: int, ell: int, lam: complex) -> dict:
    """Factors of c_{m l} that vanish or blow up at lam."""
    lam = complex(lam)
    zeros, poles = [], []
    if _is_pole(lam + n + 2 * m - 2 * ell):
        poles.append("Gamma(lambda+n+2m-2l)")
    for i in range(ell):
        if abs(-lam - 2 * ell + i) < 1e-12:
            zeros.append(f"(-lambda-{2 * ell - i})")
    if _is_pole(lam + m + n / 2.0 - ell):
        zeros.append("1/Gamma(lambda+m+n/2-l)")
    return {"zeros": zeros, "poles": poles, "nonzero": not zeros and not poles}


def c00(n: int, lam: complex) -> complex:
    """(4 pi)^{-n/2} Gamma(n+lam)/Gamma(n/2+lam)."""
    lam = complex(lam)
    if _is_pole(lam + n):
        raise PoleError("Gamma(n+lambda)", lam)
    return complex((4 * math.pi) ** (-n / 2.0) * _gamma(n + lam) * _rgamma(n / 2.0 + lam))


# ---------------------------------------------------------------------------
# Integral constants with numerical oracles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantReport:
    name: str
    params: dict
    value: complex
    oracle: Optional[complex]
    deviation: Optional[float]
    divergent: bool = False


def _hadamard_value(alpha: complex, beta: complex, chi0: float) -> complex:
    if _is_pole(alpha) or _is_pole(beta - alpha):
        raise PoleError("Gamma(alpha) Gamma(beta-alpha)", complex(alpha))
    return complex(_gamma(alpha) * _gamma(beta - alpha) * _rgamma(beta) * chi0)


def _quad_complex(f, a, b, **kw) -> complex:
    re = integrate.quad(lambda t: f(t).real, a, b, limit=400, epsabs=1e-14, epsrel=1e-13, **kw)[0]
    im = integrate.quad(lambda t: f(t).imag, a, b, limit=400, epsabs=1e-14, epsrel=1e-13, **kw)[0]
    return complex(re, im)


def _beta_integral(alpha: complex, beta: complex) -> complex:
    """int_0^inf t^{alpha-1}(1+t)^{-beta} dt for Re beta > Re alpha > 0, via s = t/(1+t)."""
    f = lambda s: complex(s ** (alpha - 1) * (1 - s) ** (beta - alpha - 1))  # noqa: E731
    if alpha.real < 1 or (beta - alpha).real < 1:
        # split to let quad handle the endpoint singularities
        return _quad_complex(f, 0, 0.5) + _quad_complex(f, 0.5, 1)
    return _quad_complex(f, 0, 1)


def _hadamard_oracle(alpha: complex, beta: complex, chi0: float) -> complex:
    """Constant term from a convergent integral and the recursion
    (beta - alpha) F_{alpha, beta} = beta F_{alpha, beta+1}."""
    M = 0
    while (beta + M - alpha).real <= 1.0:
        M += 1
    val = _beta_integral(alpha, beta + M)
    for j in range(M - 1, -1, -1):
        b = beta + j
        val = b * val / (b - alpha)
    return val * chi0


def _sphere_coefficient(n: int, ell: int) -> float:
    """int_{S^{n-1}} (x . eta)^{2l} dS(eta) / |x|^{2l}."""
    return 2.0 * math.pi ** ((n - 1) / 2.0) * math.gamma(ell + 0.5) / math.gamma(ell + n / 2.0)


def _sphere_nodes(n: int, order: int = 32):
    """Quadrature on S^{n-1}; for n = 1 the two points +-1 with unit weights."""
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    return sphere_rule(n - 1, order)


def _sphere_oracle(n: int, ell: int) -> float:
    pts, wts = _sphere_nodes(n, max(16, 2 * ell + 8))
    return float(np.sum(wts * pts[:, 0] ** (2 * ell)))


def _twist_sum(n: int, m: int, r: float) -> float:
    t = -r * r / (1.0 + r * r)
    return 2.0 * math.pi ** (n / 2.0) * sum(
        math.factorial(m) / (math.factorial(m - l) * math.gamma(n / 2.0 + l)) * t ** l
        for l in range(m + 1))


def _trace_free_pair(n: int, m: int, seed: int):
    from .sym_tensor import SymTensor, decompose_trace_free

    rng = np.random.default_rng(seed)
    A = [decompose_trace_free(SymTensor.random_float(rng, n, m))[0].to_full().astype(float)
         for _ in range(2)]
    return A[0], A[1]


def _twist_angular(n: int, m: int, r: float, A1: np.ndarray, A2: np.ndarray, order: int = 24) -> float:
    """int_{S^{n-1}} <(x)^m C_{r eta} A1, A2> dS(eta) by quadrature."""
    pts, wts = _sphere_nodes(n, order)
    k = 2.0 * r * r / (1.0 + r * r)
    total = 0.0
    for p, w in zip(pts, wts):
        C = np.eye(n) - k * np.outer(p, p)
        total += w * float(np.sum(contract_axes(A1, C) * A2)) if m else w * float(A1 * A2)
    return total


def _twist_oracle(n: int, m: int, r: float, seed: int = 0) -> tuple[float, float]:
    """(quadrature value, <A1, A2>) for random trace-free A1, A2."""
    if m == 0:
        A1 = A2 = np.array(1.0)
    else:
        A1, A2 = _trace_free_pair(n, m, seed)
    ip = float(np.sum(A1 * A2))
    return _twist_angular(n, m, r, A1, A2), ip


def _main_constant(n: int, lam: complex, m: int) -> complex:
    return math.pi ** (n / 2.0) * boundary_leading_constant(n, m, lam)


def _main_oracle(n: int, lam: complex, m: int, seed: int = 0) -> complex:
    """int_{R^n} (1+|eta|^2)^{-lam-n} <(x)^m C_eta A1, A2> d eta / <A1, A2>."""
    if m == 0:
        A1 = A2 = np.array(1.0)
    else:
        A1, A2 = _trace_free_pair(n, m, seed)
    ip = float(np.sum(A1 * A2))
    order = 8 + 2 * m

    def radial(r):
        return complex(r ** (n - 1) * (1.0 + r * r) ** (-lam - n)
                       * _twist_angular(n, m, r, A1, A2, order))

    # t = r/(1+r) maps [0, inf) to [0, 1)
    g = lambda t: radial(t / (1.0 - t)) / (1.0 - t) ** 2 if t < 1 else 0j  # noqa: E731
    return (_quad_complex(g, 0, 0.5) + _quad_complex(g, 0.5, 1.0)) / ip


def analytic_constants(name: str, oracle: bool = True, **p) -> ConstantReport:
    """Evaluate a named constant and, when requested, its numerical oracle.

    names: "hadamard" (alpha, beta, chi0), "sphere" (n, ell), "twist" (n, m, r),
    "main" (n, lam, m).
    """
    if name == "hadamard":
        a, b, chi0 = complex(p["alpha"]), complex(p["beta"]), float(p.get("chi0", 1.0))
        if a.real <= 0:
            raise DomainError("need Re alpha > 0")
        val = _hadamard_value(a, b, chi0)
        divergent = (b - a).real <= 0
        orc = _hadamard_oracle(a, b, chi0) if oracle else None
    elif name == "sphere":
        n, ell = int(p["n"]), int(p["ell"])
        if n < 1 or ell < 0:
            raise DomainError("need n >= 1, l >= 0")
        val, divergent = complex(_sphere_coefficient(n, ell)), False
        orc = complex(_sphere_oracle(n, ell)) if oracle else None
    elif name == "twist":
        n, m, r = int(p["n"]), int(p["m"]), float(p["r"])
        if n == 1 and m >= 2:
            raise DomainError("no nonzero trace-free tensors for n = 1, m >= 2")
        val, divergent = complex(_twist_sum(n, m, r)), False
        if oracle:
            q, ip = _twist_oracle(n, m, r, int(p.get("seed", 0)))
            orc = complex(q / ip)
        else:
            orc = None
    elif name == "main":
        n, lam, m = int(p["n"]), complex(p["lam"]), int(p.get("m", 0))
        if n == 1 and m >= 2:
            raise DomainError("no nonzero trace-free tensors for n = 1, m >= 2")
        val = complex(_main_constant(n, lam, m))
        divergent = (2 * lam + n).real <= 0
        orc = None if (divergent or not oracle) else _main_oracle(n, lam, m, int(p.get("seed", 0)))
    else:
        raise DomainError(f"unknown constant {name!r}")
    dev = None if orc is None else abs(val - orc) / max(1.0, abs(val))
    return ConstantReport(name, dict(p), val, orc, dev, divergent)
