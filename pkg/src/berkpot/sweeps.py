"""Family sweeps over base spectra and convergence reports.

A sweep walks a grid of places (a curve inside the base spectrum), builds
the relevant fiber measure at each place, integrates a battery of affable
test functions, and reports the modulus sequence (successive differences
along the tail of the grid).  Continuity of the measure family is reported,
never asserted: the tables are the witness.

Certified row errors combine quadrature-doubling estimates with the
potential-tail bound multiplied by the test function's Laplacian-mass bound
(the pairing |int f dmu_n - int f dmu_phi| <= ||lambda_phi - lambda_n|| *
mass(|Delta f|)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .affable import affable_real, mass_bound
from .battery import load_battery, standard_battery
from .green import contraction_ratios, deviation_bound
from .measures import (
    Measure,
    chi_measure,
    equilibrium_arch,
    equilibrium_nonarch,
    integrate,
)
from .places import Place, snap_rational
from .points import GAUSS, MetricGraph, disk
from .rmaps import HomogeneousLift, lift_from_json


class SweepError(ValueError):
    pass


def default_grid(depth: int = 10) -> list[Place]:
    """eps in {1, 1/2, ..., 2^-depth} followed by the trivial endpoint."""
    grid = [Place.archimedean(Fraction(1, 2**k)) for k in range(depth + 1)]
    grid.append(Place.trivial())
    return grid


def padic_branch_grid(p: int, depth: int = 10) -> list[Place]:
    """eps in {1, 2, ..., 2^depth} followed by the residue endpoint."""
    grid = [Place.padic(p, Fraction(2**k)) for k in range(depth + 1)]
    grid.append(Place.residue(p))
    return grid


def validate_grid(grid: list[Place]):
    if not grid:
        raise SweepError("grid must be nonempty")
    for place in grid[:-1]:
        if place.kind in ("trivial", "res"):
            raise SweepError("the ultrametric endpoint must come last in the grid")


def default_skeleton(place: Place, span: int = 2, halves: bool = True) -> MetricGraph:
    """Segment skeleton eta_{0, p^q}, q in [-span, span], through Gauss."""
    from .points import build_skeleton

    step = Fraction(1, 2) if halves else Fraction(1)
    pts = []
    q = Fraction(-span)
    while q <= span:
        pts.append(disk(0, q))
        q += step
    return build_skeleton(place, pts)


@dataclass
class SweepRow:
    place_kind: str
    place_param: str
    fn_id: str
    value: float
    cert_err: float
    n_used: int
    error: str = ""


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)
    modulus: dict = field(default_factory=dict)  # fn_id -> list of successive diffs

    def compute_modulus(self, fn_ids, grid_len):
        """Successive |row_{k+1} - row_k| per test function, grid order."""
        by_fn = {fid: [None] * grid_len for fid in fn_ids}
        seen = {}
        for row in self.rows:
            key = (row.place_kind, row.place_param)
            if key not in seen:
                seen[key] = len(seen)
            if not row.error:
                by_fn[row.fn_id][seen[key]] = row.value
        for fid, vals in by_fn.items():
            diffs = []
            for a, b in zip(vals, vals[1:]):
                diffs.append(abs(b - a) if a is not None and b is not None else None)
            self.modulus[fid] = diffs

    def value(self, place: Place, fn_id: str):
        kind, param = place.describe()
        for row in self.rows:
            if (row.place_kind, row.place_param, row.fn_id) == (kind, param, fn_id):
                return row.value
        raise KeyError((kind, param, fn_id))


@dataclass(frozen=True)
class RadiusSpec:
    """Closed-form radius along the grid: a constant, or base^eps (the
    flow-equivariant family, which tends to radius 1 at the trivial end)."""

    kind: str  # "const" | "pow_eps"
    value: Fraction

    def at(self, place: Place) -> float:
        if self.kind == "const":
            return float(self.value)
        if place.kind == "arch" or place.kind == "padic":
            return float(self.value) ** float(place.eps)
        return 1.0  # eps -> 0 endpoint

    @staticmethod
    def parse(obj) -> "RadiusSpec":
        if isinstance(obj, dict):
            if "pow_eps" in obj:
                return RadiusSpec("pow_eps", Fraction(str(obj["pow_eps"])))
            raise SweepError(f"unknown radius form {obj!r}")
        return RadiusSpec("const", Fraction(str(obj)))


@dataclass
class SweepConfig:
    grid: list
    battery: list
    center: Fraction = Fraction(0)
    radius: RadiusSpec = RadiusSpec("const", Fraction(1))
    lift: HomogeneousLift = None
    tol: float = 1e-8
    quad_n: int = 64
    atom_budget: int = 1 << 14
    skeleton_span: int = 2
    seed_point: complex = 2 + 0j
    rng_seed: int = 0

    @staticmethod
    def from_json(obj: dict) -> "SweepConfig":
        try:
            if "grid" in obj and obj["grid"] != "default":
                from .places import place_from_json

                grid = [place_from_json(p) for p in obj["grid"]]
            else:
                branch = obj.get("base", "hybrid")
                if isinstance(branch, dict) and branch.get("branch") == "padic":
                    grid = padic_branch_grid(int(branch["p"]), int(obj.get("depth", 10)))
                else:
                    grid = default_grid(int(obj.get("depth", 10)))
            validate_grid(grid)
            battery = load_battery(obj["battery"]) if obj.get("battery") else standard_battery()
            cfg = SweepConfig(grid=grid, battery=battery)
            if "map" in obj:
                cfg.lift = lift_from_json(obj["map"])
            if "center" in obj:
                cfg.center = Fraction(str(obj["center"]))
            if "radius" in obj:
                cfg.radius = RadiusSpec.parse(obj["radius"])
            for k in ("tol", "quad_n", "atom_budget", "skeleton_span", "rng_seed"):
                if k in obj:
                    setattr(cfg, k, type(getattr(cfg, k))(obj[k]))
            if "seed_point" in obj:
                s = obj["seed_point"]
                cfg.seed_point = complex(float(s.get("re", 2.0)), float(s.get("im", 0.0))) if isinstance(s, dict) else complex(s)
            return cfg
        except (KeyError, ValueError, TypeError) as exc:
            raise SweepError(f"bad sweep config: {exc}") from exc


def _chi_at(place: Place, center: Fraction, radius: RadiusSpec) -> Measure:
    r = radius.at(place)
    if place.is_ultrametric:
        if r == 1.0:
            logr = Fraction(0)
        else:
            logr = snap_rational(math.log(r) / place.log_unit)
        return chi_measure(place, center, logr)
    # the place-radius r names the Euclidean circle of radius r^(1/eps); for
    # the constant radius 1 and for the base^eps family this is eps-uniform
    euclid = r ** (1.0 / float(place.eps))
    return chi_measure(place, center, None, euclid_radius=euclid)


def sweep_chi(config: SweepConfig) -> SweepTable:
    """Integrate the battery against the circle family along the grid."""
    validate_grid(config.grid)
    table = SweepTable()
    for place in config.grid:
        mu = _chi_at(place, config.center, config.radius)
        kind, param = place.describe()
        for fn in config.battery:
            try:
                val, qerr = integrate(place, mu, affable_real(place, fn), config.quad_n)
                table.rows.append(SweepRow(kind, param, fn.fn_id, val, qerr, 0))
            except Exception as exc:  # per-row failures recorded, sweep continues
                table.rows.append(SweepRow(kind, param, fn.fn_id, float("nan"), float("nan"), 0, error=str(exc)))
    table.compute_modulus([f.fn_id for f in config.battery], len(config.grid))
    return table


def _eq_measure_at(place: Place, config: SweepConfig):
    """Equilibrium measure at one place: (measure, n_used, potential tail bound)."""
    lift = config.lift
    bound = deviation_bound(place, lift)
    if bound.certified and bound.gmax == 0.0:
        # canonical potential is identically zero: the measure is the circle
        # family member itself, exactly
        return _chi_at(place, Fraction(0), RadiusSpec("const", Fraction(1))), 0, 0.0
    if place.is_ultrametric:
        skel = default_skeleton(place, config.skeleton_span)
        mu, _report = equilibrium_nonarch(place, lift, skel, config.tol)
        return mu, 0, config.tol
    d = lift.d
    n = 1
    tail = bound.gmax / (d - 1) / d
    while tail > config.tol and d ** (n + 1) <= config.atom_budget:
        n += 1
        tail /= d
    mu = equilibrium_arch(place, lift, config.seed_point, n)
    return mu, n, tail


def sweep_equilibrium(config: SweepConfig) -> SweepTable:
    """Equilibrium-measure rows along the grid, ultrametric endpoint last."""
    validate_grid(config.grid)
    if config.lift is None:
        raise SweepError("equilibrium sweep needs a map")
    if not config.lift.is_rational:
        raise SweepError("sweep maps must have rational coefficients (shared across fibers)")
    table = SweepTable()
    for place in config.grid:
        kind, param = place.describe()
        try:
            mu, n_used, tail = _eq_measure_at(place, config)
        except Exception as exc:
            for fn in config.battery:
                table.rows.append(SweepRow(kind, param, fn.fn_id, float("nan"), float("nan"), 0, error=str(exc)))
            continue
        for fn in config.battery:
            try:
                val, qerr = integrate(place, mu, affable_real(place, fn), config.quad_n)
                cert = qerr + (tail * mass_bound(place, fn) if tail else 0.0)
                table.rows.append(SweepRow(kind, param, fn.fn_id, val, cert, n_used))
            except Exception as exc:
                table.rows.append(SweepRow(kind, param, fn.fn_id, float("nan"), float("nan"), n_used, error=str(exc)))
    table.compute_modulus([f.fn_id for f in config.battery], len(config.grid))
    return table


def report_contraction(lift: HomogeneousLift, place: Place, sample, n_max: int):
    """Ratio rows for the metric iteration; None ratio means exact zero."""
    return contraction_ratios(place, lift, sample, n_max)


def circle_sample(n: int = 64, radius: float = 1.0):
    from .points import classical

    return [
        classical(radius * complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)))
        for k in range(n)
    ]


def unit_sphere_sample_padic(place: Place, count: int = 16):
    """Rational points with |z| = 1 plus the Gauss point."""
    from .points import classical

    pts = [GAUSS]
    z = 1
    while len(pts) < count + 1 and z < 200:
        if z % place.p != 0:
            pts.append(classical(Fraction(z)))
        z += 1
    return pts
