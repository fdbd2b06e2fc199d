"""Base places and exact absolute-value arithmetic.

A place is a point of a base spectrum such as M(Z) (Ostrowski: trivial,
archimedean |.|^eps, p-adic |.|_p^eps, residue seminorms |.|_p^{+inf}) or the
hybrid segment M(C_hyb) = {trivial} u {|.|^eps : 0 < eps <= 1}.

Log-magnitudes are kept on a per-place scale so ultrametric arithmetic stays
exact: at a p-adic place the stored value is the rational coefficient of
log(p), at t-adic/trivial/residue places the coefficient of 1, and at
archimedean places a plain float.  ``Place.log_unit`` converts to real
numbers at the boundary (integration, CSV output).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

# A log-magnitude coefficient: exact Fraction at ultrametric places, float at
# archimedean ones; +/-inf floats are the extended values at every kind.
LogValue = Union[Fraction, int, float]

NEG_INF = float("-inf")
POS_INF = float("inf")

ARCH = "arch"
PADIC = "padic"
TADIC = "tadic"
TRIVIAL = "trivial"
RESIDUE = "res"


class PlaceError(ValueError):
    """Operation applied at an incompatible place."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}: {x!r}")


@dataclass(frozen=True)
class Place:
    """One point of a base spectrum.

    kind is one of "arch", "padic", "tadic", "trivial", "res"; p is set for
    padic/res kinds; eps is the exponent (exact rational).
    """

    kind: str
    p: int | None = None
    eps: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in (ARCH, PADIC, TADIC, TRIVIAL, RESIDUE):
            raise PlaceError(f"unknown place kind {self.kind!r}")
        if self.kind in (PADIC, RESIDUE):
            if self.p is None or self.p < 2 or not _is_prime(self.p):
                raise PlaceError(f"{self.kind} place needs a prime, got {self.p}")
        if self.kind == ARCH and not (0 < self.eps <= 1):
            raise PlaceError(f"archimedean exponent must lie in (0,1], got {self.eps}")
        if self.kind in (PADIC, TADIC) and not self.eps > 0:
            raise PlaceError(f"{self.kind} exponent must be positive, got {self.eps}")

    @staticmethod
    def archimedean(eps=Fraction(1)) -> "Place":
        return Place(ARCH, None, _as_fraction(eps))

    @staticmethod
    def padic(p: int, eps=Fraction(1)) -> "Place":
        return Place(PADIC, p, _as_fraction(eps))

    @staticmethod
    def tadic(eps=Fraction(1)) -> "Place":
        return Place(TADIC, None, _as_fraction(eps))

    @staticmethod
    def trivial() -> "Place":
        return Place(TRIVIAL)

    @staticmethod
    def residue(p: int) -> "Place":
        return Place(RESIDUE, p)

    @property
    def is_ultrametric(self) -> bool:
        return self.kind != ARCH

    @property
    def is_exact(self) -> bool:
        """Whether log-magnitudes at this place are exact rationals."""
        return self.kind != ARCH

    @property
    def log_unit(self) -> float:
        """Real scale of one coefficient unit of log-magnitude."""
        if self.kind == PADIC:
            return math.log(self.p)
        return 1.0

    def describe(self) -> tuple[str, str]:
        """(kind, parameter) pair used in sweep tables."""
        if self.kind == ARCH:
            return ARCH, str(self.eps)
        if self.kind == PADIC:
            return PADIC, f"p={self.p},eps={self.eps}"
        if self.kind == TADIC:
            return TADIC, str(self.eps)
        if self.kind == RESIDUE:
            return RESIDUE, f"p={self.p}"
        return TRIVIAL, ""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _padic_valuation(n: int, p: int) -> int:
    # n != 0
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class LogMag:
    """log|q| at a place, tagged with exactness and the place's log scale."""

    value: LogValue
    exact: bool
    unit: float = 1.0

    @property
    def real(self) -> float:
        """Value as a plain real number."""
        if isinstance(self.value, float):
            return self.value * (self.unit if math.isfinite(self.value) else 1.0)
        return float(self.value) * self.unit

    def __float__(self) -> float:
        return self.real


def abs_log_value(place: Place, q) -> LogValue:
    """Raw log|q| at the place, in coefficient units (see module docstring)."""
    q = _as_fraction(q)
    if q == 0:
        return NEG_INF
    if place.kind == ARCH:
        return float(place.eps) * (math.log(abs(q.numerator)) - math.log(q.denominator))
    if place.kind == PADIC:
        v = _padic_valuation(q.numerator, place.p) - _padic_valuation(q.denominator, place.p)
        return -v * place.eps
    if place.kind == RESIDUE:
        vn = _padic_valuation(q.numerator, place.p)
        vd = _padic_valuation(q.denominator, place.p)
        if vn > 0:
            return NEG_INF
        if vd > 0:
            return POS_INF
        return Fraction(0)
    # trivial and t-adic: rational constants have trivial valuation
    return Fraction(0)


def abs_log(place: Place, q) -> LogMag:
    """log|q| at the place; -inf iff q = 0 (or the residue seminorm kills q)."""
    return LogMag(abs_log_value(place, q), place.is_exact, place.log_unit)


def epsilon_of(place: Place) -> Fraction:
    """The exponent eps = log|2| / log 2 of an archimedean place."""
    if place.kind != ARCH:
        raise PlaceError(f"epsilon_of is defined for archimedean places only, got {place.kind}")
    return place.eps


def flow_place(place: Place, eps) -> Place:
    """Raise the place's absolute value to the power eps in (0,1].

    Exponents multiply; trivially valued and residue places are fixed points
    and flow(., 1) is the identity.
    """
    eps = _as_fraction(eps)
    if not (0 < eps <= 1):
        raise PlaceError(f"flow exponent must lie in (0,1], got {eps}")
    if place.kind == ARCH:
        return Place.archimedean(place.eps * eps)
    if place.kind == PADIC:
        return Place.padic(place.p, place.eps * eps)
    if place.kind == TADIC:
        return Place.tadic(place.eps * eps)
    return place


# -- extended-value helpers (coefficient scale) ------------------------------

def vplus(a: LogValue, b: LogValue) -> LogValue:
    """a + b with -inf absorbing (never add opposite infinities)."""
    if a == NEG_INF or b == NEG_INF:
        if a == POS_INF or b == POS_INF:
            raise ArithmeticError("adding opposite log infinities")
        return NEG_INF
    if a == POS_INF or b == POS_INF:
        return POS_INF
    return a + b


def vscale(c, a: LogValue) -> LogValue:
    """c * a for nonzero rational c, with infinities flipped when c < 0."""
    c = _as_fraction(c)
    if a == NEG_INF or a == POS_INF:
        return a if c > 0 else (NEG_INF if a == POS_INF else POS_INF)
    if isinstance(a, float):
        return float(c) * a
    return c * a


def vmax(*values: LogValue) -> LogValue:
    out = NEG_INF
    for v in values:
        if out == NEG_INF or (v != NEG_INF and v > out):
            out = v
    return out


def is_neg_inf(a: LogValue) -> bool:
    return a == NEG_INF


# -- (de)serialization --------------------------------------------------------

def place_to_json(place: Place) -> dict:
    if place.kind == ARCH:
        return {"kind": "arch", "eps": str(place.eps)}
    if place.kind == PADIC:
        return {"kind": "padic", "p": place.p, "eps": str(place.eps)}
    if place.kind == TADIC:
        return {"kind": "tadic", "eps": str(place.eps)}
    if place.kind == RESIDUE:
        return {"kind": "res", "p": place.p}
    return {"kind": "trivial"}


def place_from_json(obj: dict) -> Place:
    try:
        kind = obj["kind"]
        if kind == "arch":
            return Place.archimedean(snap_rational(obj["eps"]))
        if kind == "padic":
            return Place.padic(int(obj["p"]), snap_rational(obj["eps"]))
        if kind == "tadic":
            return Place.tadic(snap_rational(obj["eps"]))
        if kind == "res":
            return Place.residue(int(obj["p"]))
        if kind == "trivial":
            return Place.trivial()
    except (KeyError, TypeError, ValueError) as exc:
        raise PlaceError(f"bad place JSON {obj!r}: {exc}") from exc
    raise PlaceError(f"bad place JSON {obj!r}")


def snap_rational(x, max_denominator: int = 10**6) -> Fraction:
    """Snap a CLI-supplied real to a rational with denominator <= 10^6.

    Keeps the flow identities exact; exact fraction strings pass through
    unchanged.
    """
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x).limit_denominator(max_denominator)
