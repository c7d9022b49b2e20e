"""Acceptance suite: one test per criterion, each printing a PASS line.

Everything here is exact: zero tolerance on every equality and bound.
"""

import json
import random
from fractions import Fraction

import pytest

from ietlab import (
    Interval,
    IntervalSet,
    PreconditionError,
    RigidityCertificate,
    block_mixing_thresholds,
    certify_rigidity,
    corpus,
    correlation,
    dyadic,
    first_return,
    mixing_window_check,
    n0_for_density,
    rigidity_blocks_mixing,
    rotation,
    scalar,
    verify_certificate,
)
from ietlab.cli import main
from ietlab.exactnum import ZERO, ONE
from ietlab.return_map import saturation

from conftest import random_interval_set, random_point_in, random_rational_iet

EPSILON = Fraction(1, 10)
GRID_TOP = 5000


def geometric_grid(n0: int, top: int):
    grid = []
    n = max(n0, 4)
    while n < top:
        grid.append(n)
        n *= 2
    grid.append(top)
    return grid


@pytest.fixture(scope="session")
def grid_certificates():
    """Criterion-1 certificates for every minimal map on the full grid."""
    results = {}
    for name in corpus.CERTIFICATE_SUITE:
        iet = corpus.load(name)
        n0 = n0_for_density(iet, EPSILON, cap=GRID_TOP)
        grid = geometric_grid(n0, GRID_TOP)
        certs = []
        for n in grid:
            cert = certify_rigidity(iet, EPSILON, n)
            iet.clear_power_cache()
            certs.append(cert)
        results[name] = (iet, n0, grid, certs)
    return results


def test_criterion_1_certificate_suite(grid_certificates):
    for name, (iet, n0, grid, certs) in grid_certificates.items():
        d = iet.d
        for n, cert in zip(grid, certs):
            assert cert.n == n
            low = scalar(Fraction(n, 20 * d))
            assert not low > cert.k, (name, n, cert.k)
            assert cert.k <= 20 * n * d, (name, n, cert.k)
            assert cert.measure() > scalar(Fraction(1, 10**5 * d**5)), (name, n)
            # independent verifier on a re-parsed certificate: fresh map
            # instance, fresh piecewise powers, per-piece displacement < eps
            replay = RigidityCertificate.from_json(
                json.loads(json.dumps(cert.to_json()))
            )
            report = verify_certificate(replay)
            assert report.ok, (name, n, report.checks)
            replay.iet.clear_power_cache()
        print(f"  criterion 1 [{name}]: {len(grid)} certificates on grid {grid}")
    print("ACCEPTANCE 1 certificate-suite: PASS")


def test_criterion_2_return_map_suite(rng):
    checked = 0
    tested_pairs = 0
    while checked < 500:
        iet = random_rational_iet(rng, max_den=12)
        lo = Fraction(rng.randint(0, 7), 8)
        hi = lo + Fraction(rng.randint(1, 3), 8)
        if hi > 1:
            continue
        base = Interval(scalar(lo), scalar(hi))
        tested_pairs += 1
        sat = saturation(iet, base)
        system = first_return(iet, base, step_cap=2000)
        assert len(system.pieces) <= iet.d + 2
        assert system.kac_sum() == sat.measure()
        if sat != IntervalSet.full():
            continue
        assert system.kac_sum() == ONE
        _confirm_pieces_pointwise(iet, system, rng, points=10)
        checked += 1
    # the bundled minimal maps, exact Kac identity included
    for name in corpus.MINIMAL:
        iet = corpus.load(name)
        base = Interval(scalar("1/7"), scalar("3/7"))
        system = first_return(iet, base)
        assert len(system.pieces) <= iet.d + 2
        assert system.kac_sum() == ONE
        _confirm_pieces_pointwise(iet, system, rng, points=10)
    print(f"ACCEPTANCE 2 return-map-suite: PASS "
          f"(500 saturating pairs of {tested_pairs} sampled, plus corpus)")


def _confirm_pieces_pointwise(iet, system, rng, points):
    base = system.base
    for piece in system.pieces:
        for _ in range(points):
            x = random_point_in(rng, piece.part.lo, piece.part.hi)
            y = iet.apply(x)
            steps = 1
            while not base.contains(y):
                y = iet.apply(y)
                steps += 1
            assert steps == piece.return_time
            assert y - x == piece.translation


def test_criterion_3_obstruction_suite(grid_certificates):
    for name, (iet, n0, grid, certs) in grid_certificates.items():
        qualifying = 0
        for cert in certs:
            kappa, eps_cap = block_mixing_thresholds(cert.measure())
            if not cert.max_displacement() < scalar(eps_cap):
                continue  # certificate cannot be tightened below the threshold
            tight = cert.with_epsilon(eps_cap)
            witness = rigidity_blocks_mixing(iet, tight)
            assert witness.k == cert.k
            # replay the strict inequality exactly
            region = IntervalSet.of(witness.interval)
            value = (
                iet.power(cert.k).image_of_set(region).intersect(region).measure()
            )
            assert value == witness.value
            assert witness.value > 2 * witness.interval.length * witness.interval.length
            qualifying += 1
            iet.clear_power_cache()
        assert qualifying >= 1, f"no tightenable certificate for {name}"
        print(f"  criterion 3 [{name}]: {qualifying} dyadic witnesses")
    print("ACCEPTANCE 3 obstruction-suite: PASS")


def test_criterion_4_power_oracle(maps, rng):
    total_points = 0
    for name, iet in maps.items():
        for n in (1, 7, 50, 200):
            power = iet.power(n)
            assert power.piece_count <= n * (iet.d - 1) + 1, (name, n)
            for _ in range(32):
                x = random_point_in(rng, ZERO, ONE)
                y = x
                for _ in range(n):
                    y = iet.apply(y)
                assert power.apply(x) == y, (name, n)
                total_points += 1
        iet.clear_power_cache()
    assert total_points >= 1000
    print(f"ACCEPTANCE 4 power-oracle: PASS ({total_points} points)")


def _brute_correlation(iet, set_a, set_b, n):
    """Refine by the breakpoints of T^{-n}, translate, intersect naively."""
    pw = iet.power(-n)
    total = ZERO
    for i, shift in enumerate(pw.shifts):
        lo, hi = pw.breaks[i], pw.breaks[i + 1]
        for part in set_a.parts:
            c_lo = part.lo if part.lo > lo else lo
            c_hi = part.hi if part.hi < hi else hi
            if not c_lo < c_hi:
                continue
            t_lo, t_hi = c_lo + shift, c_hi + shift
            for other in set_b.parts:
                d_lo = t_lo if t_lo > other.lo else other.lo
                d_hi = t_hi if t_hi < other.hi else other.hi
                if d_lo < d_hi:
                    total = total + (d_hi - d_lo)
    return total


def test_criterion_5_correlation_exactness(maps, rng):
    names = list(maps)
    times = (0, 1, 2, 3, 5, 8, 13, 21)
    done = 0
    while done < 1000:
        iet = maps[names[done % len(names)]]
        n = times[rng.randrange(len(times))]
        set_a = random_interval_set(rng)
        set_b = random_interval_set(rng)
        report = correlation(iet, set_a, set_b, n)
        assert report.value == _brute_correlation(iet, set_a, set_b, n)
        assert report.target == set_a.measure() * set_b.measure()
        done += 1
    # dyadic partition of unity at depths <= 6
    iet = maps["golden_rotation"]
    for n in (0, 4, 9):
        set_a = random_interval_set(rng)
        for depth in range(0, 7):
            total = ZERO
            for b in range(2**depth):
                total = total + correlation(
                    iet, set_a, IntervalSet.of(dyadic(depth, b)), n
                ).value
            assert total == set_a.measure()
    for iet in maps.values():
        iet.clear_power_cache()
    print(f"ACCEPTANCE 5 correlation-exactness: PASS ({done} random triples)")


def test_criterion_6_negative_controls(maps):
    for name in ("rotation_1_3", "rotation_1_4"):
        with pytest.raises(PreconditionError):
            certify_rigidity(maps[name], EPSILON, 100)
    identity = maps["identity"]
    for eps in (Fraction(1, 5), Fraction(1, 100), Fraction(24, 100)):
        for depth in (1, 2):
            report = mixing_window_check(identity, 1, 4, eps, depth=depth)
            assert not report.passed
            assert report.witness["a"] == (1, 0)
            assert report.witness["b"] == (1, 0)
            assert report.witness["deviation"] == Fraction(1, 4)
    print("ACCEPTANCE 6 negative-controls: PASS")


def test_criterion_7_determinism(tmp_path, maps):
    golden = tmp_path / "golden.json"
    golden.write_text(json.dumps(maps["golden_rotation"].to_json(), indent=2))
    runs = [
        (["certify-rigidity", "--iet", str(golden), "--epsilon", "1/10",
          "--n", "88"], "cert"),
        (["return-map", "--iet", str(golden), "--lo", "0", "--hi", "1/3"], "rm"),
        (["mixing-window", "--iet", str(golden), "--j", "2", "--k", "4",
          "--epsilon", "1/3", "--depth", "2"], "mw"),
        (["correlations", "--iet", str(golden), "--n-from", "0", "--n-to", "2",
          "--depth", "2"], "corr"),
    ]
    for argv, tag in runs:
        first = tmp_path / f"{tag}_first"
        second = tmp_path / f"{tag}_second"
        assert main(argv + ["--output", str(first)]) == 0
        assert main(argv + ["--output", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes(), tag
    print("ACCEPTANCE 7 determinism: PASS")
