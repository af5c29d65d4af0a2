"""Outward-rounded interval arithmetic and axis-aligned boxes.

Every endpoint operation is computed in double precision and then pushed one
ulp outward, so an interval result always encloses the true real result
(round-to-nearest error is below one ulp).  A Fraction-based exact mirror of
the same evaluations backs the on-demand shadow re-check of refutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF) if math.isfinite(x) else x


def _up(x: float) -> float:
    return math.nextafter(x, _INF) if math.isfinite(x) else x


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_dn(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_dn(self.lo - other.hi), _up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        p = (a * c, a * d, b * c, b * d)
        return Interval(_dn(min(p)), _up(max(p)))

    def scale(self, k: float) -> "Interval":
        if k >= 0:
            return Interval(_dn(self.lo * k), _up(self.hi * k))
        return Interval(_dn(self.hi * k), _up(self.lo * k))

    def sqr(self) -> "Interval":
        a, b = self.lo, self.hi
        if a >= 0:
            return Interval(_dn(a * a), _up(b * b))
        if b <= 0:
            return Interval(_dn(b * b), _up(a * a))
        return Interval(0.0, _up(max(a * a, b * b)))

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def strictly_inside(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)


ZERO = Interval(0.0, 0.0)
ONE = Interval(1.0, 1.0)


def isqrt_nonneg(x: Interval) -> Interval | None:
    """Enclosure of sqrt over x ∩ [0, ∞); None when x is entirely negative."""
    if x.hi < 0:
        return None
    lo = max(x.lo, 0.0)
    return Interval(_dn(math.sqrt(lo)), _up(math.sqrt(x.hi)))


def extended_div(num: Interval, den: Interval) -> list[Interval]:
    """num / den as 0, 1 or 2 intervals (splitting around a zero of den).

    The union of the returned intervals contains every x with x*d ∈ num for
    some d ∈ den.  A two-sided zero denominator with 0 ∈ num yields the whole
    line (returned as one interval).
    """
    a, b = num.lo, num.hi
    c, d = den.lo, den.hi
    if c == 0.0 and d == 0.0:
        return [Interval(-_INF, _INF)] if num.contains_zero() else []
    if c > 0 or d < 0:
        lo = min(_dn(a / c), _dn(a / d), _dn(b / c), _dn(b / d))
        hi = max(_up(a / c), _up(a / d), _up(b / c), _up(b / d))
        return [Interval(lo, hi)]
    # den straddles zero
    if num.contains_zero():
        return [Interval(-_INF, _INF)]
    out = []
    if b < 0:
        if d > 0:
            out.append(Interval(-_INF, _up(b / d)))
        if c < 0:
            out.append(Interval(_dn(b / c), _INF))
    else:  # a > 0
        if c < 0:
            out.append(Interval(-_INF, _up(a / c)))
        if d > 0:
            out.append(Interval(_dn(a / d), _INF))
    return out


def narrow_by_div(var: Interval, num: Interval, den: Interval) -> Interval | None:
    """var ∩ (num / den), hulled when the division splits; None when empty."""
    pieces = extended_div(num, den)
    best: Interval | None = None
    for p in pieces:
        cut = var.intersect(p)
        if cut is not None:
            best = cut if best is None else best.hull(cut)
    return best


# ---------------------------------------------------------------------------
# Exact-rational mirror (shadow mode)

@dataclass(frozen=True, slots=True)
class QInterval:
    lo: Fraction
    hi: Fraction

    @staticmethod
    def from_interval(x: Interval) -> "QInterval":
        return QInterval(Fraction(x.lo), Fraction(x.hi))

    def __add__(self, o):
        return QInterval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o):
        return QInterval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, o):
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return QInterval(min(p), max(p))

    def sqr(self):
        if self.lo >= 0:
            return QInterval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return QInterval(self.hi * self.hi, self.lo * self.lo)
        return QInterval(Fraction(0), max(self.lo * self.lo, self.hi * self.hi))

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi


# ---------------------------------------------------------------------------
# Boxes

class WidthUnderflow(RuntimeError):
    """The widest dimension cannot be split in finite precision."""


@dataclass(frozen=True)
class IntervalBox:
    """One closed interval per variable, outward-rounded endpoints."""

    ivs: tuple[Interval, ...]

    def __len__(self):
        return len(self.ivs)

    def __getitem__(self, i: int) -> Interval:
        return self.ivs[i]

    def replace(self, i: int, iv: Interval) -> "IntervalBox":
        return IntervalBox(self.ivs[:i] + (iv,) + self.ivs[i + 1 :])

    @property
    def max_width(self) -> float:
        return max((iv.width for iv in self.ivs), default=0.0)

    def log_volume(self) -> float:
        """Sum of log2 widths (thin dimensions clamped); orders boxes by volume."""
        total = 0.0
        for iv in self.ivs:
            total += math.log2(max(iv.width, 1e-300))
        return total

    def midpoint(self) -> list[float]:
        return [iv.mid for iv in self.ivs]

    def contains_point(self, pt) -> bool:
        return all(iv.contains(v) for iv, v in zip(self.ivs, pt))

    def to_lists(self) -> list[list[float]]:
        return [[iv.lo, iv.hi] for iv in self.ivs]

    @staticmethod
    def from_lists(data) -> "IntervalBox":
        return IntervalBox(tuple(Interval(lo, hi) for lo, hi in data))


def bisect(box: IntervalBox) -> tuple[IntervalBox, IntervalBox]:
    """Split the widest dimension at its midpoint (ties: lowest index).

    The two children cover the parent exactly.  Raises
    :class:`WidthUnderflow` when no dimension can be split.
    """
    widest = -1
    wmax = 0.0
    for i, iv in enumerate(box.ivs):
        if iv.width > wmax:
            wmax = iv.width
            widest = i
    if widest < 0:
        raise WidthUnderflow("box has zero width in every dimension")
    iv = box.ivs[widest]
    m = iv.mid
    if m <= iv.lo or m >= iv.hi:
        raise WidthUnderflow(f"dimension {widest} cannot be split at {m!r}")
    return box.replace(widest, Interval(iv.lo, m)), box.replace(widest, Interval(m, iv.hi))
