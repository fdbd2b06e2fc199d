"""Homogeneous lifts of degree-d endomorphisms of P^1.

A lift is a pair (F0, F1) of degree-d forms in (T0, T1), stored through the
dehomogenized coefficient lists of F_i(t, 1).  Membership in the space of
actual endomorphisms is Res(F0, F1) != 0 (Sylvester determinant at formal
degrees (d, d)).  Coefficients are shared exact rationals (one lift serves
every fiber) or complex floats (archimedean-only lifts).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .places import NEG_INF, Place, PlaceError, abs_log_value, is_neg_inf, vmax, vplus, vscale
from .points import BerkPoint, CLS, INF, classical, classical_pair, disk, infinity
from .polys import exact_det, poly_eval, sylvester_matrix, taylor_shift, trim

INF_POINT = "inf"  # marker used in preimage lists


class MapError(ValueError):
    pass


def sylvester_resultant(f, g, m: int, n: int):
    """Resultant of f, g at formal degrees (m, n) via the Sylvester matrix."""
    if m == 0 and n == 0:
        return Fraction(1)
    mat = sylvester_matrix(f, g, m, n)
    if all(isinstance(x, (Fraction, int)) for row in mat for x in row):
        return exact_det(mat)
    return complex(np.linalg.det(np.array(mat, dtype=complex)))


@dataclass(frozen=True)
class HomogeneousLift:
    """Degree-d pair (F0, F1); coefficient lists are of F_i(t,1), ascending."""

    d: int
    f0: tuple
    f1: tuple

    def __post_init__(self):
        if self.d < 2:
            raise MapError("degree must be at least 2")
        if len(self.f0) != self.d + 1 or len(self.f1) != self.d + 1:
            raise MapError("coefficient lists must have length d+1")

    @staticmethod
    def from_coeffs(d: int, f0, f1) -> "HomogeneousLift":
        f0 = _pad(_coerce(f0), d)
        f1 = _pad(_coerce(f1), d)
        lift = HomogeneousLift(d, tuple(f0), tuple(f1))
        if lift.resultant == 0:
            raise MapError("degenerate pair: Res(F0, F1) = 0")
        return lift

    @staticmethod
    def polynomial(coeffs) -> "HomogeneousLift":
        """Lift of a polynomial map phi(T) = sum coeffs[i] T^i."""
        coeffs = _coerce(coeffs)
        d = len(trim(coeffs)) - 1
        one = Fraction(1) if isinstance(coeffs[0], (Fraction, int)) else complex(1)
        return HomogeneousLift.from_coeffs(d, coeffs, [one] + [0] * d)

    @cached_property
    def resultant(self):
        return sylvester_resultant(list(self.f0), list(self.f1), self.d, self.d)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(c, (Fraction, int)) for c in self.f0 + self.f1)

    @property
    def is_polynomial(self) -> bool:
        """Whether F1 is a nonzero multiple of T1^d (phi polynomial in the T-chart)."""
        return self.f1[0] != 0 and all(c == 0 for c in self.f1[1:])

    def phi_coeffs(self):
        """Affine coefficients of phi = F0/F1 when the map is polynomial."""
        if not self.is_polynomial:
            raise MapError("map is not polynomial in the T-chart")
        c = self.f1[0]
        return [a / c for a in self.f0]

    def coeff_list(self):
        return list(self.f0) + list(self.f1)


def _coerce(coeffs):
    out = []
    for c in coeffs:
        if isinstance(c, (Fraction, int)):
            out.append(Fraction(c))
        elif isinstance(c, str):
            out.append(Fraction(c))
        else:
            out.append(complex(c))
    if any(isinstance(c, complex) for c in out):
        out = [complex(c) for c in out]
    return out

def _pad(coeffs, d):
    if len(coeffs) > d + 1:
        raise MapError("coefficient list longer than degree allows")
    zero = Fraction(0) if all(isinstance(c, (Fraction, int)) for c in coeffs) else complex(0)
    return list(coeffs) + [zero] * (d + 1 - len(coeffs))


def apply_point(place: Place, lift: HomogeneousLift, x: BerkPoint) -> BerkPoint:
    """Image of a point: evaluation for classical points, exact disk
    transport eta_{a,r} -> eta_{phi(a), r'} for polynomial maps.

    The new log-radius is max_{i>=1}(log|c_i| + i r) for phi(a+T) = sum c_i T^i.
    """
    if x.t == INF:
        return classical_pair(lift.f0[lift.d], lift.f1[lift.d])
    if x.t == CLS:
        z0 = poly_eval(lift.f0, x.z)
        z1 = poly_eval(lift.f1, x.z)
        return classical_pair(z0, z1)
    if not place.is_ultrametric:
        raise PlaceError("disk points live in ultrametric fibers only")
    if not lift.is_polynomial:
        raise MapError("disk transport implemented for polynomial maps only")
    phi = lift.phi_coeffs()
    shifted = taylor_shift(phi, x.center)
    new_center = shifted[0]
    new_logr = NEG_INF
    for i in range(1, len(shifted)):
        a = abs_log_value(place, shifted[i])
        if is_neg_inf(a):
            continue
        new_logr = vmax(new_logr, vplus(a, vscale(i, x.logr)))
    if is_neg_inf(new_logr):
        raise MapError("disk image degenerated to a classical point")
    from .points import reduce_center

    # same seminorm, bounded-height center: keeps orbit arithmetic small
    return disk(reduce_center(place, new_center, new_logr), new_logr)


@dataclass
class PreimageSet:
    """Solutions of phi = a with multiplicity; multiplicities sum to d."""

    entries: list  # (complex | "inf", multiplicity)
    flagged: bool = False  # set when clusters were numerically ambiguous

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)


def preimages_arch(lift: HomogeneousLift, a) -> PreimageSet:
    """Preimages of a under phi over C, with multiplicities from clustering.

    Roots of F0(t,1) - a F1(t,1) via companion-matrix eigenvalues plus one
    Newton polish; infinity accounts for any degree drop.
    """
    d = lift.d
    if a == INF_POINT or (isinstance(a, BerkPoint) and a.t == INF):
        coeffs = [complex(c) for c in lift.f1]
    else:
        a = complex(a)
        coeffs = [complex(c0) - a * complex(c1) for c0, c1 in zip(lift.f0, lift.f1)]
    scale = max(abs(c) for c in coeffs)
    if scale == 0:
        raise MapError("zero preimage polynomial; degenerate map")
    deg = d
    while deg > 0 and abs(coeffs[deg]) <= 1e-12 * scale:
        deg -= 1
    entries = []
    inf_mult = d - deg
    if deg > 0:
        roots = np.roots(np.array(coeffs[: deg + 1][::-1], dtype=complex))
        poly = np.array(coeffs[: deg + 1][::-1], dtype=complex)
        dpoly = np.polyder(poly)
        polished = []
        for r in roots:
            fp = np.polyval(dpoly, r)
            if abs(fp) > 1e-12 * scale:
                r = r - np.polyval(poly, r) / fp
            polished.append(complex(r))
        entries, flagged = _cluster(polished)
    else:
        flagged = False
    if inf_mult > 0:
        entries.append((INF_POINT, inf_mult))
    out = PreimageSet(entries, flagged)
    assert out.total_multiplicity == d
    return out


def _cluster(roots, rel=1e-7):
    """Greedy clustering; cluster sizes become multiplicities."""
    clusters = []  # (representative, members)
    flagged = False
    for r in roots:
        placed = False
        for k, (rep, members) in enumerate(clusters):
            tol = rel * (1.0 + abs(rep))
            dist = abs(r - rep)
            if dist <= tol:
                members.append(r)
                clusters[k] = (sum(members) / len(members), members)
                placed = True
                break
            if dist <= 10 * tol:
                flagged = True
        if not placed:
            clusters.append((r, [r]))
    return [(rep, len(members)) for rep, members in clusters], flagged


def preimage_points(lift: HomogeneousLift, a) -> list:
    """Preimages as BerkPoints with multiplicity."""
    out = []
    for z, m in preimages_arch(lift, a).entries:
        out.append((infinity() if z == INF_POINT else classical(z), m))
    return out


def pushforward_values(place: Place, lift: HomogeneousLift, f, xprime) -> float:
    """(phi_* f)(x') = sum over preimages of deg_x(phi) f(x)."""
    if place.is_ultrametric:
        raise PlaceError("pushforward of values uses complex preimages")
    total = 0.0
    for pt, m in preimage_points(lift, xprime):
        total += m * f(pt)
    return total


# -- (de)serialization --------------------------------------------------------

def _coeff_to_json(c):
    if isinstance(c, Fraction):
        return str(c)
    return {"re": c.real, "im": c.imag}


def lift_to_json(lift: HomogeneousLift) -> dict:
    def form(coeffs):
        out = []
        for j, c in enumerate(coeffs):
            if c != 0:
                out.append([_coeff_to_json(c), f"{j},{lift.d - j}"])
        return out

    return {"d": lift.d, "F0": form(lift.f0), "F1": form(lift.f1)}


def lift_from_json(obj: dict) -> HomogeneousLift:
    try:
        d = int(obj["d"])

        def parse(entries):
            coeffs = [Fraction(0)] * (d + 1)
            cplx = False
            for coeff, expo in entries:
                j_str, k_str = str(expo).split(",")
                j, k = int(j_str), int(k_str)
                if j + k != d or j < 0:
                    raise MapError(f"exponent {expo!r} not of total degree {d}")
                if isinstance(coeff, dict):
                    coeffs[j] = complex(float(coeff["re"]), float(coeff.get("im", 0.0)))
                    cplx = True
                else:
                    coeffs[j] = Fraction(str(coeff))
            if cplx:
                coeffs = [complex(c) for c in coeffs]
            return coeffs

        return HomogeneousLift.from_coeffs(d, parse(obj["F0"]), parse(obj["F1"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise MapError(f"bad map JSON: {exc}") from exc
