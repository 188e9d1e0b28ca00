"""Circle-valued maps as sampled phase liftings.

Every map is stored through a real lifting theta sampled on the uniform grid
t_j = 2*pi*j/M, together with its integer winding number, so that degree
bookkeeping under products, quotients and reparametrizations is exact phase
arithmetic rather than something inferred from complex samples.
"""

from __future__ import annotations

import json
import struct
import threading
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, geodesic_distance, wrap_angle

DEFAULT_GRID = 512
MIN_GRID = 16

_BINARY_MAGIC = b"FMAP"
_BINARY_VERSION = 1


class GridError(ValueError):
    """Raised when a grid is too coarse or inconsistent for an operation."""


@dataclass(frozen=True)
class PhaseLifting:
    """Sampled lifting theta_0..theta_{M-1} with theta(t + 2*pi) = theta(t) + 2*pi*winding."""

    samples: np.ndarray
    winding: int

    def __post_init__(self):
        samples = np.ascontiguousarray(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", samples)
        M = len(samples)
        if M < MIN_GRID:
            raise GridError(f"grid size {M} below minimum {MIN_GRID}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("lifting samples must be finite")
        incs = self.increments()
        if np.any(np.abs(incs) >= np.pi):
            raise GridError(
                "lifting increments reach pi; winding reconstruction is "
                "ambiguous at this grid size")
        recon = int(np.rint(np.sum(incs) / TWO_PI))
        if recon != self.winding:
            raise ValueError(
                f"stored winding {self.winding} inconsistent with samples "
                f"(reconstructed {recon})")

    @property
    def grid_size(self) -> int:
        return len(self.samples)

    def grid_angles(self) -> np.ndarray:
        M = self.grid_size
        return TWO_PI * np.arange(M) / M

    def increments(self) -> np.ndarray:
        """Successive differences including the closing jump back to theta_0."""
        closing = self.samples[0] + TWO_PI * self.winding - self.samples[-1]
        return np.concatenate([np.diff(self.samples), [closing]])

    def interpolate(self, t) -> np.ndarray:
        """Piecewise-linear evaluation at arbitrary angles (exact at nodes)."""
        t = np.asarray(t, dtype=float)
        M = self.grid_size
        turns = np.floor(t / TWO_PI)
        pos = (t - turns * TWO_PI) * M / TWO_PI
        j = np.minimum(pos.astype(int), M - 1)
        frac = pos - j
        ext = np.concatenate([self.samples,
                              [self.samples[0] + TWO_PI * self.winding]])
        return ext[j] + frac * (ext[j + 1] - ext[j]) + TWO_PI * self.winding * turns


class CircleMap:
    """A circle-valued map e^{i theta} backed by a PhaseLifting.

    Fourier coefficients of the complex samples are computed on demand and
    cached; the cache is lock-guarded so concurrent readers see either no
    coefficients or the full array.
    """

    def __init__(self, lifting: PhaseLifting):
        self.lifting = lifting
        self._fourier: tuple[np.ndarray, np.ndarray] | None = None
        self._fourier_lock = threading.Lock()

    # -- construction helpers --------------------------------------------

    @staticmethod
    def from_samples(samples: np.ndarray, winding: int) -> "CircleMap":
        return CircleMap(PhaseLifting(np.asarray(samples, dtype=float), winding))

    # -- basic queries ------------------------------------------------------

    @property
    def grid_size(self) -> int:
        return self.lifting.grid_size

    @property
    def winding(self) -> int:
        return self.lifting.winding

    def grid_angles(self) -> np.ndarray:
        return self.lifting.grid_angles()

    def values(self) -> np.ndarray:
        return np.exp(1j * self.lifting.samples)

    def lifting_at(self, t) -> np.ndarray:
        return self.lifting.interpolate(t)

    def values_at(self, t) -> np.ndarray:
        return np.exp(1j * self.lifting.interpolate(t))

    def conj(self) -> "CircleMap":
        return CircleMap(PhaseLifting(-self.lifting.samples, -self.winding))

    def rotate_values(self, phase: float) -> "CircleMap":
        """Multiply by the constant e^{i phase}."""
        return CircleMap(PhaseLifting(self.lifting.samples + phase, self.winding))

    # -- Fourier ------------------------------------------------------------

    def fourier_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients a_n of the sampled values, n in [-(M/2-1), M/2-1]."""
        with self._fourier_lock:
            if self._fourier is None:
                M = self.grid_size
                raw = np.fft.fft(self.values()) / M
                n = np.fft.fftfreq(M, d=1.0 / M).astype(int)
                keep = np.abs(n) <= M // 2 - 1
                order = np.argsort(n[keep])
                self._fourier = (n[keep][order], raw[keep][order])
            return self._fourier

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "grid_size": self.grid_size,
            "winding": self.winding,
            "samples": [float(v) for v in self.lifting.samples],
        })

    @staticmethod
    def from_json(text: str) -> "CircleMap":
        obj = json.loads(text)
        samples = np.asarray(obj["samples"], dtype=float)
        if len(samples) != obj["grid_size"]:
            raise ValueError("grid_size does not match sample count")
        return CircleMap.from_samples(samples, int(obj["winding"]))

    def to_binary(self) -> bytes:
        head = _BINARY_MAGIC + struct.pack("<IIq", _BINARY_VERSION,
                                           self.grid_size, self.winding)
        return head + self.lifting.samples.astype("<f8").tobytes()

    @staticmethod
    def from_binary(blob: bytes) -> "CircleMap":
        if blob[:4] != _BINARY_MAGIC:
            raise ValueError("not a circle-map binary blob")
        version, M, winding = struct.unpack("<IIq", blob[4:20])
        if version != _BINARY_VERSION:
            raise ValueError(f"unsupported binary version {version}")
        samples = np.frombuffer(blob[20:], dtype="<f8")
        if len(samples) != M:
            raise ValueError("truncated sample payload")
        return CircleMap.from_samples(samples.copy(), winding)


@dataclass
class PlaneMap:
    """An R^2-valued (complex) map on the grid; differences of circle maps
    leave the circle, so they land here.

    `evaluator`, when present, gives exact values at off-grid angles (set by
    `difference` from the operand liftings); otherwise evaluation falls back
    to periodic linear interpolation of the samples.
    """

    samples: np.ndarray
    evaluator: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.samples = np.ascontiguousarray(np.asarray(self.samples, dtype=complex))
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("plane-map samples must be finite")

    @property
    def grid_size(self) -> int:
        return len(self.samples)

    def grid_angles(self) -> np.ndarray:
        M = self.grid_size
        return TWO_PI * np.arange(M) / M

    def values_at(self, t) -> np.ndarray:
        if self.evaluator is not None:
            return self.evaluator(np.asarray(t, dtype=float))
        t = np.asarray(t, dtype=float)
        M = self.grid_size
        pos = wrap_angle(t) * M / TWO_PI
        j = np.minimum(pos.astype(int), M - 1)
        frac = pos - j
        ext = np.concatenate([self.samples, [self.samples[0]]])
        return ext[j] + frac * (ext[j + 1] - ext[j])


# ---------------------------------------------------------------------------
# map families
# ---------------------------------------------------------------------------

def power_map(d: int, M: int = DEFAULT_GRID) -> CircleMap:
    """The map z^d, lifting theta(t) = d*t."""
    t = TWO_PI * np.arange(M) / M
    return CircleMap.from_samples(d * t, d)


def default_alpha(p: float) -> float:
    """Midpoint of the admissible zig-zag slope window for exponent p."""
    if p >= 2.0:
        return 1.0 - 1.0 / (2.0 * p)
    return (1.0 / p + 1.0) / 2.0


def alpha_window(p: float) -> tuple[float, float]:
    if p >= 2.0:
        return (1.0 - 1.0 / p, 1.0)
    return (1.0 / p, 1.0)


def zigzag(n: int, alpha: float, M: int, p: float | None = None) -> CircleMap:
    """Degree-1 zig-zag map: slope n^alpha on even arcs of width pi/n,
    slope -(n^alpha - 2) on odd arcs, normalized so theta(0) = 0.

    M must be divisible by 2*n so the arc breakpoints land on grid nodes.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if p is not None:
        lo, hi = alpha_window(p)
        if not (lo < alpha < hi):
            raise ValueError(
                f"alpha={alpha} outside the admissible window ({lo}, {hi}) "
                f"for p={p}")
    if M % (2 * n) != 0:
        raise GridError(f"grid size {M} not divisible by 2n = {2 * n}")
    cells_per_arc = M // (2 * n)
    up = float(n) ** alpha
    slopes = np.where(np.arange(2 * n) % 2 == 0, up, -(up - 2.0))
    per_cell = np.repeat(slopes, cells_per_arc) * (TWO_PI / M)
    theta = np.concatenate([[0.0], np.cumsum(per_cell)])[:-1]
    return CircleMap.from_samples(theta, 1)


def kdelta(delta: float, M: int = DEFAULT_GRID) -> CircleMap:
    """Degree-1 collapse map: constant 1 on a delta-neighborhood of angle 0
    and constant -1 on [pi - delta, pi + delta], linear in between with
    lifting slope pi/(pi - 2*delta).
    """
    if not (0.0 < delta < np.pi / 2):
        raise ValueError(f"delta must lie in (0, pi/2), got {delta}")
    h = TWO_PI / M
    if min(2 * delta, np.pi - 2 * delta) < 2 * h:
        raise GridError(
            f"grid size {M} leaves a k_delta branch with fewer than two nodes")
    t = TWO_PI * np.arange(M) / M
    s = np.pi / (np.pi - 2 * delta)
    theta = np.select(
        [t <= delta,
         t < np.pi - delta,
         t <= np.pi + delta,
         t < TWO_PI - delta],
        [0.0,
         s * (t - delta),
         np.pi,
         np.pi + s * (t - np.pi - delta)],
        default=TWO_PI)
    return CircleMap.from_samples(theta, 1)


# ---------------------------------------------------------------------------
# pointwise algebra
# ---------------------------------------------------------------------------

def _check_same_grid(f: CircleMap, g: CircleMap):
    if f.grid_size != g.grid_size:
        raise GridError(
            f"grid mismatch: {f.grid_size} vs {g.grid_size}")


def pointwise_product(f: CircleMap, g: CircleMap) -> CircleMap:
    """(fg)(x) = f(x) g(x); liftings add, windings add."""
    _check_same_grid(f, g)
    return CircleMap.from_samples(f.lifting.samples + g.lifting.samples,
                                  f.winding + g.winding)


def pointwise_quotient(f: CircleMap, g: CircleMap) -> CircleMap:
    """(f/g)(x) = f(x) conj(g(x)); liftings subtract, windings subtract."""
    _check_same_grid(f, g)
    return CircleMap.from_samples(f.lifting.samples - g.lifting.samples,
                                  f.winding - g.winding)


def difference(f: CircleMap, g: CircleMap) -> PlaneMap:
    """The plane-valued map f - g, with exact off-grid evaluation."""
    _check_same_grid(f, g)
    samples = f.values() - g.values()

    def evaluator(t):
        return f.values_at(t) - g.values_at(t)

    return PlaneMap(samples, evaluator=evaluator)


def project_to_circle(F: PlaneMap, floor: float = 1e-9) -> CircleMap:
    """Radial projection F/|F| re-lifted by nearest-branch phase unwrapping.

    Rejects maps passing within `floor` of the origin, where the degree of
    the projection is ill-defined, and grids too coarse to unwrap safely.
    """
    moduli = np.abs(F.samples)
    if np.min(moduli) < floor:
        raise ValueError(
            f"plane map has modulus {np.min(moduli):.3e} below the "
            f"projection floor {floor:.1e}")
    raw = np.angle(F.samples)
    incs = np.mod(np.diff(raw) + np.pi, TWO_PI) - np.pi
    closing = np.mod(raw[0] - raw[-1] + np.pi, TWO_PI) - np.pi
    theta = np.concatenate([[raw[0]], raw[0] + np.cumsum(incs)])
    winding = int(np.rint((np.sum(incs) + closing) / TWO_PI))
    return CircleMap.from_samples(theta, winding)


# ---------------------------------------------------------------------------
# Mobius reparametrization
# ---------------------------------------------------------------------------

def _is_positively_ordered(angles: tuple[float, float, float]) -> bool:
    a, b, c = angles
    u = np.mod(b - a, TWO_PI)
    v = np.mod(c - a, TWO_PI)
    return 0.0 < u < v


class MobiusReparam:
    """Degree-1 reparametrization of S^1 from the Mobius transformation that
    maps one positively ordered triple of boundary points to another,
    realized through the standard cross-ratio construction.
    """

    def __init__(self, src: tuple[float, float, float],
                 dst: tuple[float, float, float]):
        for name, tri in (("src", src), ("dst", dst)):
            z = np.exp(1j * np.asarray(tri, dtype=float))
            if np.min(np.abs(z[:, None] - z[None, :])
                      [~np.eye(3, dtype=bool)]) < 1e-12:
                raise ValueError(f"{name} triple has coincident points")
            if not _is_positively_ordered(tuple(map(float, tri))):
                raise ValueError(
                    f"{name} triple is not strictly positively ordered")
        self.src = tuple(map(float, src))
        self.dst = tuple(map(float, dst))
        A = self._to_standard(np.exp(1j * np.asarray(self.src)))
        B = self._to_standard(np.exp(1j * np.asarray(self.dst)))
        Binv = np.array([[B[1, 1], -B[0, 1]], [-B[1, 0], B[0, 0]]])
        self.matrix = Binv @ A

    @staticmethod
    def _to_standard(z: np.ndarray) -> np.ndarray:
        # the Mobius map sending (z1, z2, z3) to (0, 1, inf)
        z1, z2, z3 = z
        return np.array([[z2 - z3, -z1 * (z2 - z3)],
                         [z2 - z1, -z3 * (z2 - z1)]])

    def transform_point(self, z: np.ndarray) -> np.ndarray:
        (a, b), (c, d) = self.matrix
        w = (a * z + b) / (c * z + d)
        return w / np.abs(w)

    def __call__(self, t) -> np.ndarray:
        """Image angles in (-pi, pi] (principal branch)."""
        return np.angle(self.transform_point(np.exp(1j * np.asarray(t, dtype=float))))

    def lifted(self, t: np.ndarray) -> np.ndarray:
        """Monotone lifting of the reparametrization along sorted angles."""
        t = np.asarray(t, dtype=float)
        raw = self(t)
        incs = np.mod(np.diff(raw), TWO_PI)
        return np.concatenate([[raw[0]], raw[0] + np.cumsum(incs)])

    def apply(self, f: CircleMap) -> CircleMap:
        """Resample f o M onto f's uniform grid; winding is preserved."""
        m = self.lifted(f.grid_angles())
        theta = f.lifting_at(m)
        return CircleMap.from_samples(theta, f.winding)


def mobius_from_triples(src: tuple[float, float, float],
                        dst: tuple[float, float, float]) -> MobiusReparam:
    """The unique orientation-preserving Mobius reparametrization of S^1
    sending the ordered angle triple src to dst."""
    return MobiusReparam(src, dst)


def sup_geodesic_deviation(f: CircleMap) -> float:
    """max_j of the geodesic distance between t_j and the image angle of t_j."""
    t = f.grid_angles()
    return float(np.max(geodesic_distance(f.lifting.samples, t)))
