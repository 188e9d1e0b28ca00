"""Gagliardo double-integral energies of circle- and plane-valued maps.

The energy of F over a region A of the torus is

    E_p(F; A) = iint_A |F(x) - F(y)|^p / |x - y|^2 dx dy,

with |x - y| the Euclidean (chord) distance between points of S^1 in R^2.
Quadrature is a staggered tensor midpoint rule: x-nodes sit at cell
midpoints, y-nodes at cell boundaries, so x = y never occurs and the kernel
needs no regularization; for p > 1 and maps with bounded lifting slope the
integrand is bounded.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import TWO_PI, ArcSet, TorusRegion
from .maps import CircleMap, PlaneMap, difference, pointwise_quotient

DEFAULT_RESOLUTION = 1024
_CHUNK_ROWS = 512


class EnergyDomainError(ValueError):
    """Raised for exponents or resolutions outside the supported range."""


@dataclass(frozen=True)
class EnergyReport:
    """Result of one quadrature energy evaluation.

    `value` is the raw E_p; for the full torus and a circle-valued map,
    value**(1/p) is the W^{1/p,p} semi-norm.  `error_estimate` is the
    two-level Richardson proxy |value(R) - value(R/2)|.
    """

    value: float
    p: float
    resolution: int
    error_estimate: float
    region: str = "full"

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("energy value must be nonnegative")

    @property
    def seminorm(self) -> float:
        return self.value ** (1.0 / self.p)

    def to_json(self) -> str:
        return json.dumps({
            "value": self.value,
            "p": self.p,
            "resolution": self.resolution,
            "error_estimate": self.error_estimate,
            "region": self.region,
        })


@lru_cache(maxsize=16)
def _staggered_nodes(R: int) -> tuple[np.ndarray, np.ndarray]:
    xs = (np.arange(R) + 0.5) * (TWO_PI / R)
    ys = np.arange(R) * (TWO_PI / R)
    return xs, ys


@lru_cache(maxsize=16)
def _offset_weights(R: int) -> np.ndarray:
    """Quadrature weight / chord^2 for each node-offset class, times cell^2."""
    d = TWO_PI / R
    offs = (np.arange(R) + 0.5) * d
    chord2 = (2.0 * np.sin(offs / 2.0)) ** 2
    return (d * d) / chord2


def energy_from_node_values(Vx: np.ndarray, Vy: np.ndarray, p: float,
                            mask: np.ndarray | None = None) -> float:
    """Kernel-weighted double sum over staggered node values.

    Deterministic chunked accumulation (fixed order) keeps memory bounded
    and results reproducible bit-for-bit in single-threaded mode.
    """
    R = len(Vx)
    w = _offset_weights(R)
    idx = np.arange(R)
    total = 0.0
    for start in range(0, R, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, R)
        rows = np.arange(start, stop)
        W = w[(rows[:, None] - idx[None, :]) % R]
        D = Vx[rows, None] - Vy[None, :]
        A2 = D.real * D.real + D.imag * D.imag
        if p == 2.0:
            block = A2
        else:
            block = A2 ** (p / 2.0)
        if mask is not None:
            total += float(np.sum(block * W, where=mask[rows, :]))
        else:
            total += float(np.sum(block * W))
    return total


def _values_at(F: CircleMap | PlaneMap, t: np.ndarray) -> np.ndarray:
    return F.values_at(t)


def _energy_single(F, p: float, region: TorusRegion | None, R: int) -> float:
    xs, ys = _staggered_nodes(R)
    Vx, Vy = _values_at(F, xs), _values_at(F, ys)
    mask = None
    if region is not None:
        mask = region.indicator(xs, ys)
    return energy_from_node_values(Vx, Vy, p, mask)


def gagliardo_energy(F: CircleMap | PlaneMap, p: float,
                     region: TorusRegion | None = None,
                     resolution: int | None = None) -> EnergyReport:
    """E_p(F; region) by staggered midpoint quadrature with a two-level
    error estimate.  `resolution` must be a multiple of F's grid size."""
    if p <= 1.0:
        raise EnergyDomainError(
            f"p must exceed 1 (integral may diverge for p <= 1), got {p}")
    M = F.grid_size
    R = resolution if resolution is not None else max(DEFAULT_RESOLUTION, 2 * M)
    if R % M != 0:
        raise EnergyDomainError(
            f"resolution {R} is not a multiple of the map grid {M}")
    value = _energy_single(F, p, region, R)
    coarse = _energy_single(F, p, region, max(R // 2, 16))
    return EnergyReport(value=value, p=float(p), resolution=R,
                        error_estimate=abs(value - coarse),
                        region="full" if region is None else region.descriptor())


def seminorm_distance(f: CircleMap, g: CircleMap, p: float,
                      resolution: int | None = None) -> EnergyReport:
    """E_p(f - g; full torus); report's .seminorm is the distance itself."""
    return gagliardo_energy(difference(f, g), p, region=None,
                            resolution=resolution)


def spectral_energy_p2(F: CircleMap | PlaneMap) -> float:
    """4*pi^2 * sum |n| |a_n|^2 over the computable coefficient range.

    Equals the p = 2 Gagliardo energy for any map with square-summable
    weighted coefficients (Plancherel applied to the difference kernel), so
    it serves as the independent p = 2 oracle for the quadrature path.
    """
    if isinstance(F, CircleMap):
        n, a = F.fourier_coefficients()
    else:
        M = F.grid_size
        raw = np.fft.fft(F.samples) / M
        n = np.fft.fftfreq(M, d=1.0 / M).astype(int)
        keep = np.abs(n) <= M // 2 - 1
        n, a = n[keep], raw[keep]
    weights = np.abs(n) * np.abs(a) ** 2
    total = float(4.0 * np.pi**2 * np.sum(weights))
    cutoff = int(np.max(np.abs(n)))
    band = np.abs(n) > cutoff / 10.0
    band_sum = float(4.0 * np.pi**2 * np.sum(weights[band]))
    if total > 0 and band_sum > 0.01 * total:
        warnings.warn(
            f"top decade of Fourier coefficients carries "
            f"{band_sum / total:.1%} of the weighted sum; cutoff {cutoff} "
            f"may be too small", RuntimeWarning, stacklevel=2)
    return total


# ---------------------------------------------------------------------------
# phase-window preimages and the key-lemma instance geometry
# ---------------------------------------------------------------------------

def phase_window_preimage(f: CircleMap, center: float, eps: float) -> ArcSet:
    """Exact arcs {x : f(x) lies in the closed value-arc [center-eps, center+eps]},
    solved cell by cell on the piecewise-linear lifting."""
    th = f.lifting.samples
    M = f.grid_size
    h = TWO_PI / M
    ext = np.concatenate([th, [th[0] + TWO_PI * f.winding]])
    intervals: list[tuple[float, float]] = []
    for j in range(M):
        a, b = ext[j], ext[j + 1]
        lo_v, hi_v = (a, b) if a <= b else (b, a)
        k_min = int(np.ceil((lo_v - center - eps) / TWO_PI))
        k_max = int(np.floor((hi_v - center + eps) / TWO_PI))
        for k in range(k_min, k_max + 1):
            wlo = center + TWO_PI * k - eps
            whi = center + TWO_PI * k + eps
            s, e = max(lo_v, wlo), min(hi_v, whi)
            if s > e:
                continue
            t0 = j * h
            if b == a:
                intervals.append((t0, t0 + h))
            else:
                slope = (b - a) / h
                t1 = t0 + (s - a) / slope
                t2 = t0 + (e - a) / slope
                lo_t, hi_t = (t1, t2) if t1 <= t2 else (t2, t1)
                if hi_t > lo_t:
                    intervals.append((lo_t, hi_t))
    return ArcSet.from_intervals(intervals, closed=True)


def sup_chord_distance(f: CircleMap, g: CircleMap) -> float:
    """max over grid nodes of |f(x) - g(x)| in R^2."""
    d = f.lifting.samples - g.lifting.samples
    return float(np.max(2.0 * np.abs(np.sin(d / 2.0))))


class KeyLemmaInstance:
    """Inputs and derived regions for the restricted-energy inequality check.

    Given u, u_tilde, v with sup |u - u_tilde| <= eps, builds the value-window
    preimages of w_tilde = v / u_tilde:

        C+ = {x : w(x) in A[-eps, eps]},  C- = {x : w(x) in A[pi-eps, pi+eps]},

    their union C, and the pair region D = complement of (C+ x C+) u (C- x C-)
    assembled through its disjoint product decomposition.
    """

    def __init__(self, u: CircleMap, u_tilde: CircleMap, v: CircleMap,
                 eps: float):
        if not (0.0 < eps < np.pi / 20.0):
            raise ValueError(f"eps must lie in (0, pi/20), got {eps}")
        sup = sup_chord_distance(u, u_tilde)
        if sup > eps + 1e-12:
            raise ValueError(
                f"sup |u - u_tilde| = {sup:.4g} exceeds eps = {eps}")
        self.u, self.u_tilde, self.v = u, u_tilde, v
        self.eps = float(eps)
        self.w_tilde = pointwise_quotient(v, u_tilde)
        self.c_plus = phase_window_preimage(self.w_tilde, 0.0, eps)
        self.c_minus = phase_window_preimage(self.w_tilde, np.pi, eps)
        self.c_union = self.c_plus.union(self.c_minus)
        comp = self.c_union.complement()
        full = ArcSet.full()
        self.d_region = TorusRegion([
            (comp, full),
            (self.c_union, comp),
            (self.c_plus, self.c_minus),
            (self.c_minus, self.c_plus),
        ])
        self.off_c_region = TorusRegion.product(comp, full)


@dataclass(frozen=True)
class KeyLemmaEnergies:
    """The three region energies entering both sides of the key inequality."""

    diff_on_d: EnergyReport       # E_p(v - u_tilde; D_eps)
    u_off_c: EnergyReport         # E_p(u; (S^1 \\ C_eps) x S^1)
    u_full: EnergyReport          # E_p(u; S^1 x S^1)


def restricted_energy_decomposition(inst: KeyLemmaInstance, p: float,
                                    resolution: int | None = None
                                    ) -> KeyLemmaEnergies:
    """Evaluate the three energies of the key inequality on one instance."""
    diff = difference(inst.v, inst.u_tilde)
    return KeyLemmaEnergies(
        diff_on_d=gagliardo_energy(diff, p, region=inst.d_region,
                                   resolution=resolution),
        u_off_c=gagliardo_energy(inst.u, p, region=inst.off_c_region,
                                 resolution=resolution),
        u_full=gagliardo_energy(inst.u, p, region=None, resolution=resolution),
    )
