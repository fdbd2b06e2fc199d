"""Desk-scale Radon measures on the fiber line and equilibrium measures.

A measure is a finite list of point atoms plus circle components carrying
normalized Haar mass.  Circle components store the Euclidean radius of the
underlying set, so the unit circle means the same set at every archimedean
exponent; in ultrametric fibers the circle measures are Dirac masses at the
corresponding disk points and never appear as Haar components.

Equilibrium measures come in two regimes: over C as normalized preimage
trees d^{-n} (phi^*)^n delta_seed, and over ultrametric fields as
chi_{0,1} - (graph Laplacian of the canonical potential restricted to a
skeleton).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import PLFunction, graph_laplacian
from .green import lambda_limit
from .places import Place, PlaceError
from .points import GAUSS, BerkPoint, MetricGraph, classical, disk
from .rmaps import HomogeneousLift, MapError, preimage_points


class MeasureError(RuntimeError):
    pass


class ExceptionalSeedWarning(UserWarning):
    """Preimage tree collapsed; the seed looks exceptional."""


@dataclass
class Measure:
    """Finite atoms plus weighted unit-mass circle (Haar) components."""

    atoms: list = field(default_factory=list)   # (BerkPoint, weight)
    haars: list = field(default_factory=list)   # (complex center, euclidean radius, weight)

    @property
    def total_mass(self):
        return sum(w for _, w in self.atoms) + sum(w for _, _, w in self.haars)

    def scaled(self, c) -> "Measure":
        return Measure(
            [(x, c * w) for x, w in self.atoms],
            [(z, r, c * w) for z, r, w in self.haars],
        )

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.atoms + other.atoms, self.haars + other.haars)

    def __sub__(self, other: "Measure") -> "Measure":
        return self + other.scaled(-1)


def dirac(x: BerkPoint, weight=1) -> Measure:
    return Measure([(x, weight)])


def haar_circle(center, euclid_radius, weight=1) -> Measure:
    return Measure([], [(complex(center), float(euclid_radius), weight)])


def chi_measure(place: Place, center, radius_log, euclid_radius=None) -> Measure:
    """The circle family member at this place: Haar on the circle at
    archimedean places, Dirac at the disk point eta_{center, radius}
    at ultrametric ones.  ``radius_log`` is on the place's coefficient scale;
    archimedean callers pass the Euclidean radius explicitly.
    """
    if place.is_ultrametric:
        return dirac(disk(center, radius_log))
    if euclid_radius is None:
        raise MeasureError("archimedean circle needs a Euclidean radius")
    return haar_circle(complex(Fraction(center)), euclid_radius)


def integrate(place: Place, mu: Measure, f, quad_n: int = 64, quad_tol: float = 1e-9,
              quad_cap: int = 1 << 16):
    """sum of f over atoms plus circle quadrature, doubling until stable.

    f maps BerkPoint -> real (coefficient-scale values are the caller's
    concern; f should return plain reals).  Returns (value, quad_error).
    """
    total = 0.0
    for x, w in mu.atoms:
        v = f(x)
        if v is None or (isinstance(v, float) and not math.isfinite(v)):
            raise MeasureError(f"integrand is not finite at atom {x!r}")
        total += float(w) * float(v)
    err = 0.0
    for z, r, w in mu.haars:
        val, e = _circle_quadrature(f, z, r, quad_n, quad_tol, quad_cap)
        total += float(w) * val
        err += abs(float(w)) * e
    return total, err


def _circle_quadrature(f, center, radius, n, tol, cap):
    def estimate(m):
        s = 0.0
        for k in range(m):
            z = center + radius * cmath.exp(2j * math.pi * (k + 0.5) / m)
            s += float(f(classical(z)))
        return s / m

    prev = estimate(n)
    m = n
    while m < cap:
        m *= 2
        cur = estimate(m)
        if abs(cur - prev) < tol:
            return cur, abs(cur - prev)
        prev = cur
    return prev, tol


def pushforward_measure(map_fn, mu: Measure, circle_image=None, haar_samples: int = 256) -> Measure:
    """Transport atoms; Haar components move exactly only under maps that
    preserve circles (pass ``circle_image`` mapping (center, radius) to the
    image circle), otherwise they are discretized into ``haar_samples`` atoms.
    """
    atoms = [(map_fn(x), w) for x, w in mu.atoms]
    haars = []
    sampled = False
    for z, r, w in mu.haars:
        if circle_image is not None:
            zc, rc = circle_image(z, r)
            haars.append((complex(zc), float(rc), w))
        else:
            sampled = True
            for k in range(haar_samples):
                pt = classical(z + r * cmath.exp(2j * math.pi * (k + 0.5) / haar_samples))
                atoms.append((map_fn(pt), w / haar_samples))
    out = Measure(atoms, haars)
    out.sampled_haar = sampled
    return out


def pullback_measure(place: Place, lift: HomogeneousLift, mu: Measure) -> Measure:
    """Atoms pulled back with multiplicities; total mass multiplies by d."""
    if place.is_ultrametric:
        raise PlaceError("measure pullback uses complex preimages")
    if mu.haars:
        raise MeasureError("pullback implemented for atomic measures")
    atoms = []
    for x, w in mu.atoms:
        if x.t == "disk":
            raise MeasureError("pullback needs classical atoms")
        target = x if x.t == "inf" else complex(x.z)
        for pt, m in preimage_points(lift, "inf" if x.t == "inf" else target):
            atoms.append((pt, w * m))
    return Measure(atoms)


def _atom_key(pt: BerkPoint):
    if pt.t == "cls":
        z = complex(pt.z)
        return (0, round(z.real, 12), round(z.imag, 12))
    return (1, 0.0, 0.0)


def equilibrium_arch(place: Place, lift: HomogeneousLift, seed, n: int) -> Measure:
    """d^{-n} (phi^*)^n delta_seed as an atomic measure with d^n atoms.

    Warns when the preimage tree collapses to <= 2 points across three
    consecutive levels: the seed is then (numerically) exceptional.
    """
    if place.is_ultrametric:
        raise PlaceError("preimage-tree equilibrium is archimedean")
    if n < 0:
        raise MeasureError("n must be nonnegative")
    mu = dirac(classical(complex(seed)) if not isinstance(seed, BerkPoint) else seed)
    collapse_streak = 0
    for level in range(n):
        mu = pullback_measure(place, lift, mu).scaled(Fraction(1, lift.d))
        distinct = len({_atom_key(pt) for pt, _ in mu.atoms})
        if distinct <= 2:
            collapse_streak += 1
            if collapse_streak >= 3:
                warnings.warn(
                    f"preimage tree collapsed to {distinct} points at level {level + 1}; "
                    "seed looks exceptional",
                    ExceptionalSeedWarning,
                )
                collapse_streak = 0
        else:
            collapse_streak = 0
    # deterministic atom order
    mu.atoms.sort(key=lambda item: _atom_key(item[0]))
    return mu


@dataclass
class NonArchReport:
    total_mass: object
    min_atom_weight: object
    negative_atoms: bool
    potential: PLFunction
    states: list


def equilibrium_nonarch(place: Place, lift: HomogeneousLift, skeleton: MetricGraph,
                        tol: float = 1e-9):
    """chi_{0,1} minus the skeleton Laplacian of the canonical potential.

    Returns (measure, report).  The potential is PL-interpolated between
    vertices, so a kink inside an edge smears its mass onto the flanking
    vertices; total mass is exactly 1 regardless (telescoping).  Negative
    atoms are reported, not clamped: they flag a skeleton too coarse for
    the potential's kinks.
    """
    if not place.is_ultrametric:
        raise PlaceError("nonarchimedean equilibrium needs an ultrametric place")
    gauss_idx = skeleton.vertex_of_point(place, GAUSS)
    if gauss_idx is None:
        raise MeasureError("skeleton must contain the Gauss point")
    values = []
    states = []
    for idx, lbl in enumerate(skeleton.labels):
        if lbl is None:
            raise MeasureError(f"skeleton vertex {idx} carries no point")
        try:
            st = lambda_limit(place, lift, lbl, tol)
        except MapError as exc:
            raise MeasureError(f"potential transport failed at vertex {idx} ({lbl!r}): {exc}") from exc
        values.append(st.value)
        states.append(st)
    potential = PLFunction(skeleton, values)
    lap = graph_laplacian(potential)
    atoms = []
    for v, w in lap.atoms:
        weight = -w
        if v == gauss_idx:
            weight = weight + 1
        if weight != 0:
            atoms.append((skeleton.labels[v], weight))
    mu = Measure(atoms)
    weights = [w for _, w in atoms]
    report = NonArchReport(
        total_mass=mu.total_mass,
        min_atom_weight=min(weights) if weights else 0,
        negative_atoms=any(w < 0 for w in weights),
        potential=potential,
        states=states,
    )
    return mu, report


def measure_to_rows(place: Place, mu: Measure):
    """CSV rows: kind, point_or_center, logr_or_radius, weight."""
    rows = []
    for x, w in mu.atoms:
        if x.t == "cls":
            rows.append(("atom", str(x.z), "", float(w)))
        elif x.t == "inf":
            rows.append(("atom", "inf", "", float(w)))
        else:
            rows.append(("atom", str(x.center), str(x.logr), float(w)))
    for z, r, w in mu.haars:
        rows.append(("haar", str(z), repr(r), float(w)))
    return rows


def energy_pairing(place: Place, lift_f: HomogeneousLift, lift_g: HomogeneousLift,
                   n: int = 10, seed=2, tol: float = 1e-8,
                   skeleton: MetricGraph = None) -> float:
    """Mutual energy <mu_f, mu_g> = int (lambda_f - lambda_g) d(mu_f - mu_g).

    Vanishes when the maps coincide and behaves like a squared distance
    between the two equilibrium measures; with the Laplacian oriented
    positive at zeros this orientation of the integrand is the nonnegative
    one (it is the Dirichlet energy of the potential difference).
    """
    if place.is_ultrametric:
        if skeleton is None:
            raise MeasureError("ultrametric pairing needs a skeleton")
        mu_f, _ = equilibrium_nonarch(place, lift_f, skeleton, tol)
        mu_g, _ = equilibrium_nonarch(place, lift_g, skeleton, tol)
    else:
        mu_f = equilibrium_arch(place, lift_f, seed, n)
        mu_g = equilibrium_arch(place, lift_g, seed, n)
    unit = place.log_unit

    def integrand(x: BerkPoint) -> float:
        lf = lambda_limit(place, lift_f, x, tol).value
        lg = lambda_limit(place, lift_g, x, tol).value
        return (float(lf) - float(lg)) * unit

    total = 0.0
    for x, w in (mu_f - mu_g).atoms:
        total += float(w) * integrand(x)
    return total
