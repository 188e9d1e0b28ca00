"""Metric and arc primitives on the unit circle and on the torus S^1 x S^1.

Angles are plain radians; every comparison reduces mod 2*pi to a canonical
representative in [0, 2*pi), so callers never need to pre-normalize.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_angle(x):
    """Canonical representative of an angle (or array) in [0, 2*pi)."""
    return np.mod(x, TWO_PI)


def chord_distance(x, y):
    """Euclidean distance |e^{ix} - e^{iy}| between points of S^1 (in [0, 2])."""
    return 2.0 * np.abs(np.sin((np.asarray(x, dtype=float) - y) / 2.0))


def geodesic_distance(x, y):
    """Arc-length distance on S^1, in [0, pi]."""
    d = np.mod(np.asarray(x, dtype=float) - y, TWO_PI)
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class Arc:
    """A circular arc from angle `lo` to `hi`, with explicit endpoint closure.

    The default constructor flags give the half-open arc (lo, hi], the form
    used by half-open circle partitions; `Arc.open_arc` and `Arc.closed`
    build the other variants.
    """

    lo: float
    hi: float
    closed_lo: bool = False
    closed_hi: bool = True

    def __post_init__(self):
        width = self.hi - self.lo
        if not (0.0 < width <= TWO_PI):
            raise ValueError(f"arc width must lie in (0, 2*pi], got {width}")

    @staticmethod
    def open_arc(lo: float, hi: float) -> "Arc":
        return Arc(lo, hi, closed_lo=False, closed_hi=False)

    @staticmethod
    def closed(lo: float, hi: float) -> "Arc":
        return Arc(lo, hi, closed_lo=True, closed_hi=True)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray | bool:
        """Membership test, 2*pi-periodic in x and honoring closure flags."""
        t = np.mod(np.asarray(x, dtype=float) - self.lo, TWO_PI)
        w = self.width
        if w == TWO_PI:
            # full circle except possibly the seam point
            inside = np.ones_like(t, dtype=bool)
            if not (self.closed_lo or self.closed_hi):
                inside &= t != 0.0
            return inside if inside.shape else bool(inside)
        inside = (t > 0.0) & (t < w)
        if self.closed_lo:
            inside |= t == 0.0
        if self.closed_hi:
            inside |= t == w
        return inside if inside.shape else bool(inside)

    def complement(self) -> "Arc":
        """The complementary arc, endpoint closures negated."""
        if self.width == TWO_PI:
            raise ValueError("complement of a full-circle arc is not an arc")
        return Arc(self.hi, self.lo + TWO_PI,
                   closed_lo=not self.closed_hi, closed_hi=not self.closed_lo)


def arc_contains(a: Arc, x) -> np.ndarray | bool:
    """Functional form of Arc.contains."""
    return a.contains(x)


class ArcSet:
    """A finite union of pairwise-disjoint arcs, closed under the set algebra.

    The constructor sorts the arcs by canonical start angle and merges
    overlapping or touching pieces, so a given point set has one normal form.
    Isolated single points (which can arise from intersections of closed
    arcs) are not representable and are dropped; they carry no measure.
    """

    def __init__(self, arcs: Iterable[Arc] = ()):
        self.arcs: tuple[Arc, ...] = self._normalize(list(arcs))

    # -- constructors -----------------------------------------------------

    @staticmethod
    def full() -> "ArcSet":
        return ArcSet([Arc(0.0, TWO_PI, closed_lo=True, closed_hi=True)])

    @staticmethod
    def empty() -> "ArcSet":
        return ArcSet([])

    @staticmethod
    def from_intervals(intervals: Sequence[tuple[float, float]],
                       closed: bool = True) -> "ArcSet":
        arcs = [Arc(lo, hi, closed_lo=closed, closed_hi=closed)
                for lo, hi in intervals if hi > lo]
        return ArcSet(arcs)

    # -- normal form ------------------------------------------------------

    @staticmethod
    def _normalize(arcs: list[Arc]) -> tuple[Arc, ...]:
        if not arcs:
            return ()
        total = sum(a.width for a in arcs)
        if total >= TWO_PI:
            merged = ArcSet._merge_sorted(arcs)
            if len(merged) == 1 and merged[0].width >= TWO_PI - 1e-15:
                a = merged[0]
                return (Arc(a.lo, a.lo + TWO_PI, closed_lo=True, closed_hi=True),)
            return tuple(merged)
        return tuple(ArcSet._merge_sorted(arcs))

    @staticmethod
    def _merge_sorted(arcs: list[Arc]) -> list[Arc]:
        # work with (start, end) in lifted coordinates, start in [0, 2*pi)
        items = []
        for a in arcs:
            lo = wrap_angle(a.lo)
            items.append((lo, lo + a.width, a.closed_lo, a.closed_hi))
        items.sort(key=lambda it: (it[0], it[1]))
        merged: list[list] = []
        for lo, hi, clo, chi in items:
            if merged:
                plo, phi, pclo, pchi = merged[-1]
                touches = lo < phi or (lo == phi and (pchi or clo))
                if touches:
                    if hi > phi:
                        merged[-1][1] = hi
                        merged[-1][3] = chi
                    elif hi == phi:
                        merged[-1][3] = pchi or chi
                    continue
            merged.append([lo, hi, clo, chi])
        # wrap-around merge: last piece reaching 2*pi + first starting at 0
        if len(merged) > 1:
            flo, fhi, fclo, fchi = merged[0]
            llo, lhi, lclo, lchi = merged[-1]
            if lhi - TWO_PI > flo or (lhi - TWO_PI == flo and (lchi or fclo)):
                new_hi = max(lhi, fhi + TWO_PI)
                chi_flag = fchi if fhi + TWO_PI >= lhi else lchi
                merged = merged[1:]
                merged[-1] = [llo, new_hi, lclo, chi_flag]
        out = []
        for lo, hi, clo, chi in merged:
            out.append(Arc(lo, min(hi, lo + TWO_PI), closed_lo=clo,
                           closed_hi=chi))
        return out

    # -- queries ----------------------------------------------------------

    def contains(self, x) -> np.ndarray | bool:
        xs = np.asarray(x, dtype=float)
        out = np.zeros(xs.shape, dtype=bool)
        for a in self.arcs:
            out |= a.contains(xs)
        return out if out.shape else bool(out)

    @property
    def measure(self) -> float:
        return float(sum(a.width for a in self.arcs))

    def is_empty(self) -> bool:
        return not self.arcs

    def is_full(self) -> bool:
        return len(self.arcs) == 1 and self.arcs[0].width == TWO_PI

    # -- set algebra --------------------------------------------------------

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(list(self.arcs) + list(other.arcs))

    def complement(self) -> "ArcSet":
        if self.is_empty():
            return ArcSet.full()
        if self.is_full():
            return ArcSet.empty()
        gaps = []
        arcs = self.arcs
        for i, a in enumerate(arcs):
            b = arcs[(i + 1) % len(arcs)]
            lo = wrap_angle(a.lo) + a.width          # end of a, lifted
            hi_b = wrap_angle(b.lo) if i + 1 < len(arcs) else wrap_angle(arcs[0].lo) + TWO_PI
            if hi_b > lo:
                gaps.append(Arc(lo, hi_b, closed_lo=not a.closed_hi,
                                closed_hi=not b.closed_lo))
            # zero-width gap: a single point, in the complement only if both
            # neighbors exclude it; single points are dropped (measure zero)
        return ArcSet(gaps)

    def intersect(self, other: "ArcSet") -> "ArcSet":
        pieces = []
        for a in self.arcs:
            for b in other.arcs:
                pieces.extend(_intersect_arcs(a, b))
        return ArcSet(pieces)

    def __repr__(self):
        inner = ", ".join(
            f"{'[' if a.closed_lo else '('}{a.lo:.6g}, {a.hi:.6g}"
            f"{']' if a.closed_hi else ')'}" for a in self.arcs)
        return f"ArcSet({inner})"


def _intersect_arcs(a: Arc, b: Arc) -> list[Arc]:
    """Intersection of two arcs: zero, one or two arcs (single points drop)."""
    if a.width == TWO_PI:
        return [b]
    if b.width == TWO_PI:
        return [a]
    base = wrap_angle(a.lo)
    wa = a.width
    blo = wrap_angle(b.lo - base)
    out = []
    for shift in (0.0, -TWO_PI):
        lo = blo + shift
        hi = lo + b.width
        s = max(lo, 0.0)
        e = min(hi, wa)
        if e < s:
            continue
        if e == s:
            continue  # isolated point, dropped
        closed_s = (b.closed_lo if s == lo else True) and \
                   (a.closed_lo if s == 0.0 else True)
        closed_e = (b.closed_hi if e == hi else True) and \
                   (a.closed_hi if e == wa else True)
        out.append(Arc(base + s, base + e, closed_lo=closed_s,
                       closed_hi=closed_e))
    return out


class TorusRegion:
    """A subset of S^1 x S^1 stored as a finite union of ArcSet products."""

    def __init__(self, products: Iterable[tuple[ArcSet, ArcSet]] = ()):
        self.products: tuple[tuple[ArcSet, ArcSet], ...] = tuple(
            (A, B) for A, B in products if not (A.is_empty() or B.is_empty()))

    @staticmethod
    def full() -> "TorusRegion":
        return TorusRegion([(ArcSet.full(), ArcSet.full())])

    @staticmethod
    def product(A: ArcSet, B: ArcSet) -> "TorusRegion":
        return TorusRegion([(A, B)])

    def is_empty(self) -> bool:
        return not self.products

    def contains(self, x, y) -> bool:
        return any(bool(A.contains(x)) and bool(B.contains(y))
                   for A, B in self.products)

    def indicator(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Boolean membership matrix over the node grid xs x ys."""
        out = np.zeros((len(xs), len(ys)), dtype=bool)
        for A, B in self.products:
            out |= np.outer(A.contains(xs), B.contains(ys))
        return out

    def union(self, other: "TorusRegion") -> "TorusRegion":
        return TorusRegion(list(self.products) + list(other.products))

    @staticmethod
    def disjoint_union(*regions: "TorusRegion") -> "TorusRegion":
        """Union that verifies the parts are pairwise disjoint (by measure)."""
        for i in range(len(regions)):
            for j in range(i + 1, len(regions)):
                for A1, B1 in regions[i].products:
                    for A2, B2 in regions[j].products:
                        inter_a = A1.intersect(A2).measure
                        inter_b = B1.intersect(B2).measure
                        if inter_a > 1e-12 and inter_b > 1e-12:
                            raise ValueError(
                                "disjoint_union: parts overlap with positive measure")
        out: list[tuple[ArcSet, ArcSet]] = []
        for r in regions:
            out.extend(r.products)
        return TorusRegion(out)

    def complement(self) -> "TorusRegion":
        """Exact complement, again as a union of ArcSet products."""
        # complement of U (A_k x B_k) = Intersection_k (A_k^c x S u A_k x B_k^c)
        acc: list[tuple[ArcSet, ArcSet]] = [(ArcSet.full(), ArcSet.full())]
        for A, B in self.products:
            Ac, Bc = A.complement(), B.complement()
            nxt: list[tuple[ArcSet, ArcSet]] = []
            for X, Y in acc:
                XA_c = X.intersect(Ac)
                if not XA_c.is_empty():
                    nxt.append((XA_c, Y))
                XA = X.intersect(A)
                YB_c = Y.intersect(Bc)
                if not (XA.is_empty() or YB_c.is_empty()):
                    nxt.append((XA, YB_c))
            acc = nxt
        return TorusRegion(acc)

    @property
    def measure(self) -> float:
        """Total measure; exact when the stored products are disjoint."""
        return float(sum(A.measure * B.measure for A, B in self.products))

    def descriptor(self) -> str:
        if not self.products:
            return "empty"
        if len(self.products) == 1 and self.products[0][0].is_full() \
                and self.products[0][1].is_full():
            return "full"
        return " u ".join(f"{A!r}x{B!r}" for A, B in self.products)
