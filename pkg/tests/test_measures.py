import cmath
import math
import random
import warnings
from fractions import Fraction as F

import pytest

from berkpot.measures import (
    ExceptionalSeedWarning,
    Measure,
    MeasureError,
    chi_measure,
    dirac,
    energy_pairing,
    equilibrium_arch,
    equilibrium_nonarch,
    haar_circle,
    integrate,
    measure_to_rows,
    pullback_measure,
    pushforward_measure,
)
from berkpot.places import Place, flow_place
from berkpot.points import GAUSS, classical, disk, flow_point, same_point
from berkpot.rmaps import HomogeneousLift, apply_point
from berkpot.sweeps import default_skeleton
from berkpot.affable import affable_real
from berkpot.battery import standard_battery

ARC = Place.archimedean()
Z2 = HomogeneousLift.polynomial([0, 0, 1])


def quadrature_oracle(f, center, radius, n=4096):
    total = 0.0
    for k in range(n):
        total += f(center + radius * cmath.exp(2j * math.pi * (k + 0.5) / n))
    return total / n


def test_integrate_atom_examples():
    triv = Place.trivial()
    mu = dirac(GAUSS)
    f = affable_real(triv, standard_battery()[0])  # max(0, log|T-2|)
    val, err = integrate(triv, mu, f)
    assert val == 0 and err == 0


def test_integrate_haar_mass():
    val, err = integrate(ARC, haar_circle(0, 1.0), lambda x: 1.0)
    assert val == pytest.approx(1.0, abs=1e-12)


def test_integrate_jensen():
    mu = haar_circle(0, 1.0)
    f = lambda x: math.log(abs(complex(x.z) - 2))
    val, _ = integrate(ARC, mu, f)
    oracle = quadrature_oracle(lambda z: math.log(abs(z - 2)), 0, 1.0)
    assert val == pytest.approx(math.log(2), abs=1e-9)
    assert val == pytest.approx(oracle, abs=1e-7)


def test_integrate_rejects_infinite_atom():
    mu = dirac(classical(0j))
    with pytest.raises(MeasureError):
        integrate(ARC, mu, lambda x: math.inf)


def test_pushforward_examples():
    mu = dirac(classical(2 + 0j))
    out = pushforward_measure(lambda x: apply_point(ARC, Z2, x), mu)
    assert out.atoms[0][0] == classical(4 + 0j)
    omega = cmath.exp(2j * math.pi / 7)  # rotation fixes centered circles
    rot = pushforward_measure(
        lambda x: classical(omega * x.z), haar_circle(0, 1.0),
        circle_image=lambda c, r: (omega * c, r),
    )
    assert rot.haars == [(0j, 1.0, 1)]
    p5 = Place.padic(5)
    tp = HomogeneousLift.from_coeffs(2, [5, 0, 1], [1])
    img = pushforward_measure(lambda x: apply_point(p5, tp, x), dirac(GAUSS))
    assert same_point(p5, img.atoms[0][0], GAUSS)


def test_pushforward_samples_haar_under_generic_map():
    out = pushforward_measure(lambda x: apply_point(ARC, Z2, x), haar_circle(0, 1.0), haar_samples=64)
    assert out.sampled_haar and len(out.atoms) == 64
    assert out.total_mass == pytest.approx(1.0)


def test_pullback_examples():
    mu4 = pullback_measure(ARC, Z2, dirac(classical(4 + 0j)))
    pts = sorted(round(p.z.real) for p, _ in mu4.atoms)
    assert pts == [-2, 2] and mu4.total_mass == 2
    mu0 = pullback_measure(ARC, Z2, dirac(classical(0j)))
    assert mu0.atoms == [(classical(0j), 2)]


def test_pullback_mass_multiplies_by_degree():
    rng = random.Random(1)
    lift = HomogeneousLift.polynomial([1, 2, 0, 1])
    mu = Measure([(classical(complex(rng.uniform(-2, 2), rng.uniform(-2, 2))), rng.uniform(0.1, 2)) for _ in range(5)])
    out = pullback_measure(ARC, lift, mu)
    assert float(out.total_mass) == pytest.approx(3 * float(mu.total_mass), abs=1e-9)


def test_equilibrium_arch_level1():
    mu = equilibrium_arch(ARC, Z2, 2, 1)
    assert [round(p.z.real, 6) for p, _ in mu.atoms] == [round(-math.sqrt(2), 6), round(math.sqrt(2), 6)]
    assert all(w == F(1, 2) for _, w in mu.atoms)


def test_equilibrium_arch_weak_haar_limit():
    mu = equilibrium_arch(ARC, Z2, 2, 11)
    for fn in standard_battery():
        f = affable_real(ARC, fn)
        v_mu, _ = integrate(ARC, mu, f)
        v_haar, _ = integrate(ARC, haar_circle(0, 1.0), f)
        assert v_mu == pytest.approx(v_haar, abs=3e-3)


def test_equilibrium_arch_exceptional_seed_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        equilibrium_arch(ARC, Z2, 0, 4)
    assert any(issubclass(w.category, ExceptionalSeedWarning) for w in caught)


def test_equilibrium_arch_successive_diffs_decreasing():
    # shipped example: the squaring map, whose preimage trees of 2 fill the
    # unit circle monotonically; the potential-type entry is dropped so the
    # test set stays finite on every atom
    lift = Z2
    battery = [fn for fn in standard_battery() if fn.fn_id != "standard_potential"]
    sups = []
    mus = [equilibrium_arch(ARC, lift, 2, n) for n in range(4, 9)]
    for a, b in zip(mus, mus[1:]):
        gaps = []
        for fn in battery:
            fa, _ = integrate(ARC, a, affable_real(ARC, fn))
            fb, _ = integrate(ARC, b, affable_real(ARC, fn))
            gaps.append(abs(fb - fa))
        sups.append(max(gaps))
    assert all(x > y for x, y in zip(sups, sups[1:]))


def test_equilibrium_invariance_weak_form():
    from berkpot.rmaps import pushforward_values

    lift = HomogeneousLift.polynomial([1, 0, 1])
    mu = equilibrium_arch(ARC, lift, 2, 10)
    fn = standard_battery()[0]
    f = affable_real(ARC, fn)
    lhs, _ = integrate(ARC, mu, lambda x: pushforward_values(ARC, lift, f, x.z))
    rhs, _ = integrate(ARC, mu, f)
    assert lhs == pytest.approx(2 * rhs, abs=2e-3 * 2)


def test_equilibrium_nonarch_good_reduction():
    for p, lift in ((2, Z2), (5, HomogeneousLift.from_coeffs(2, [5, 0, 1], [1]))):
        place = Place.padic(p)
        mu, report = equilibrium_nonarch(place, lift, default_skeleton(place))
        assert len(mu.atoms) == 1
        pt, w = mu.atoms[0]
        assert same_point(place, pt, GAUSS) and w == 1
        assert report.total_mass == 1 and not report.negative_atoms


def test_equilibrium_nonarch_bad_reduction_atom_location():
    # T^2/p: potential bends at eta_{0, p^{-1}}; all mass sits there
    p5 = Place.padic(5)
    t25 = HomogeneousLift.from_coeffs(2, [0, 0, F(1, 5)], [1])
    mu, report = equilibrium_nonarch(p5, t25, default_skeleton(p5))
    assert report.total_mass == 1
    assert len(mu.atoms) == 1
    pt, w = mu.atoms[0]
    assert w == 1 and same_point(p5, pt, disk(0, F(-1)))


def test_equilibrium_nonarch_random_polynomial_maps_mass_one():
    rng = random.Random(77)
    for _ in range(15):
        p = rng.choice([2, 3, 5])
        place = Place.padic(p)
        d = rng.choice([2, 3])
        while True:
            coeffs = [F(rng.randint(-6, 6), rng.choice([1, 1, p])) for _ in range(d)]
            coeffs.append(F(rng.choice([1, 2, p]), rng.choice([1, p])))
            try:
                lift = HomogeneousLift.polynomial(coeffs)
                if lift.d == d:
                    break
            except Exception:
                continue
        mu, report = equilibrium_nonarch(place, lift, default_skeleton(place, span=3))
        assert report.total_mass == 1  # telescoping, independent of skeleton


def test_equilibrium_nonarch_coarse_skeleton_smears():
    # a skeleton missing the potential's kink receives the PL-projected
    # measure: mass splits onto the flanking vertices, total still exactly 1
    p5 = Place.padic(5)
    t25 = HomogeneousLift.from_coeffs(2, [0, 0, F(1, 5)], [1])
    from berkpot.points import build_skeleton

    coarse = build_skeleton(p5, [disk(0, F(-2)), disk(0, F(0)), disk(0, F(2))])
    mu, report = equilibrium_nonarch(p5, t25, coarse)
    assert report.total_mass == 1
    weights = {str(pt): w for pt, w in mu.atoms}
    assert weights == {"Eta(0,-2)": F(1, 2), "Eta(0,0)": F(1, 2)}


def test_equilibrium_nonarch_requires_gauss():
    p2 = Place.padic(2)
    from berkpot.points import build_skeleton

    skel = build_skeleton(p2, [disk(0, F(1)), disk(0, F(2))])
    with pytest.raises(MeasureError):
        equilibrium_nonarch(p2, Z2, skel)


def test_chi_flow_equivariance_exact():
    p3 = Place.padic(3)
    for eps in (F(1, 2), F(1, 3), F(2, 5)):
        for (z, rho) in ((F(0), F(0)), (F(1), F(-2)), (F(2, 3), F(1, 2))):
            chi = chi_measure(p3, z, rho)
            moved = pushforward_measure(lambda x: flow_point(x, eps), chi)
            target = chi_measure(flow_place(p3, eps), z, eps * rho)
            assert len(moved.atoms) == len(target.atoms) == 1
            assert same_point(flow_place(p3, eps), moved.atoms[0][0], target.atoms[0][0])


def test_energy_pairing_basics():
    assert energy_pairing(ARC, Z2, Z2, n=5) == 0.0
    zt = HomogeneousLift.polynomial([F(1, 4), 0, 1])
    val = energy_pairing(ARC, Z2, zt, n=8)
    swapped = energy_pairing(ARC, zt, Z2, n=8)
    assert val >= -1e-9
    assert val == pytest.approx(swapped, abs=1e-9)


def test_energy_pairing_nonarch():
    p5 = Place.padic(5)
    t25 = HomogeneousLift.from_coeffs(2, [0, 0, F(1, 5)], [1])
    skel = default_skeleton(p5)
    assert energy_pairing(p5, Z2, Z2, skeleton=skel) == 0.0
    val = energy_pairing(p5, Z2, t25, skeleton=skel)
    assert val >= 0  # distinct measures separate


def test_measure_csv_rows():
    mu = Measure([(GAUSS, F(1))], [(0j, 1.0, 0.5)])
    rows = measure_to_rows(Place.padic(2), mu)
    assert rows[0][0] == "atom" and rows[1][0] == "haar"
