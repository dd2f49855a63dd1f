"""Acceptance criteria.

Each test exercises one exit criterion at its stated tolerance and prints a
single PASS/FAIL line (visible with pytest -s or in captured output on
failure).  Timings assume the kernel backend is warmed up, which the
session fixture guarantees.
"""

import time

import numpy as np

from spdmeans import (
    MatrixTuple,
    MeanKind,
    OpCounters,
    alm_mean,
    bmp_mean,
    bracket4,
    composed_mean4_expr,
    dihedral_group,
    estimate_stabilizer,
    homomorphism_image,
    induced_action,
    is_subgroup,
    new_mean4,
    palfia_mean,
    parse_permutation,
    preimage_of,
    reductive_stabilizer,
    right_transversal,
    symmetric_group,
    transversal_from_reps,
    weighted_sharp3,
)
from spdmeans.lab import PROPERTY_TOLERANCES, SpdSampler, check_property
from spdmeans.fixtures import powers_of_m
from spdmeans.perm import Permutation, _all_permutations


def _criterion(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def rel_gap(x, y):
    scale = max(np.max(np.abs(x)), np.max(np.abs(y)), 1e-300)
    return float(np.max(np.abs(x - y))) / scale


def test_criterion_1_exact_count_reproduction(spread):
    counters = OpCounters()
    start = time.perf_counter()
    _, report = new_mean4(*spread.items, counters=counters)
    elapsed = time.perf_counter() - start

    inner = report.inner_iter_log[0]
    counts = (counters.sqrt_count, counters.proot_count)
    ok = (
        report.converged
        and abs(inner - 3) <= 1
        and counts == (9 + 3 * inner, 3 * inner)
        and (inner != 3 or counts == (18, 9))
        and elapsed < 1.0
    )
    _criterion(
        1,
        ok,
        f"composed mean: {inner} inner iterations, sqrt={counts[0]}, "
        f"proot={counts[1]}, {elapsed:.3f} s",
    )


def test_criterion_2_count_ratio(spread):
    start = time.perf_counter()
    new_counters = OpCounters()
    new_mean4(*spread.items, counters=new_counters)
    bmp_counters = OpCounters()
    bmp_mean(spread, counters=bmp_counters)
    elapsed = time.perf_counter() - start

    sqrt_ratio = new_counters.sqrt_count / bmp_counters.sqrt_count
    proot_ratio = new_counters.proot_count / bmp_counters.proot_count
    ok = sqrt_ratio <= 0.25 and proot_ratio <= 0.25 and elapsed < 5.0
    _criterion(
        2,
        ok,
        f"sqrt ratio {new_counters.sqrt_count}/{bmp_counters.sqrt_count}={sqrt_ratio:.3f}, "
        f"proot ratio {new_counters.proot_count}/{bmp_counters.proot_count}={proot_ratio:.3f}, "
        f"{elapsed:.3f} s",
    )


def test_criterion_3_accuracy_commuting_powers():
    tup = powers_of_m(dim=6)
    m = tup[1].values
    gaps = {}
    for name, fn in [("bmp", bmp_mean), ("new", lambda t: new_mean4(*t.items))]:
        result, report = fn(tup)
        assert report.converged
        gaps[name] = float(np.linalg.norm(result.values - m, 2))
    ok = all(g <= 1e-12 for g in gaps.values())
    _criterion(
        3, ok, f"|G(M^-2,M,M^2,M^3) - M|_2: bmp={gaps['bmp']:.2e}, new={gaps['new']:.2e}"
    )


def test_criterion_4_determinant_accuracy(spread):
    det_target = np.prod([np.linalg.det(x.values) for x in spread]) ** 0.25
    gaps = {}
    for name, fn in [("bmp", bmp_mean), ("new", lambda t: new_mean4(*t.items))]:
        result, _ = fn(spread)
        gaps[name] = abs(float(np.linalg.det(result.values)) - det_target)
    ok = all(g <= 1e-11 for g in gaps.values())
    _criterion(4, ok, f"|det G - (prod det)^(1/4)|: bmp={gaps['bmp']:.2e}, new={gaps['new']:.2e}")


def test_criterion_5_permutation_invariance(spread):
    perms = list(_all_permutations(4))

    worst = {"new": 0.0, "bmp": 0.0}
    base_new, _ = new_mean4(*spread.items)
    base_bmp, _ = bmp_mean(spread)
    for sigma in perms:
        permuted = spread.permuted(sigma)
        got_new, _ = new_mean4(*permuted.items)
        got_bmp, _ = bmp_mean(permuted)
        worst["new"] = max(worst["new"], rel_gap(got_new.values, base_new.values))
        worst["bmp"] = max(worst["bmp"], rel_gap(got_bmp.values, base_bmp.values))

    base_palfia, _ = palfia_mean(spread)
    palfia_worst = 0.0
    for sigma in perms:
        got, _ = palfia_mean(spread.permuted(sigma))
        palfia_worst = max(
            palfia_worst, float(np.max(np.abs(got.values - base_palfia.values)))
        )

    ok = worst["new"] <= 1e-10 and worst["bmp"] <= 1e-10 and palfia_worst > 1e-6
    _criterion(
        5,
        ok,
        f"24-permutation sweep: new={worst['new']:.2e}, bmp={worst['bmp']:.2e} "
        f"(<=1e-10); circular-mean witness discrepancy {palfia_worst:.2e} (>1e-6)",
    )


def test_criterion_6_group_theory_oracles():
    start = time.perf_counter()
    di4 = dihedral_group(4)
    order_ok = di4.order == 8

    canonical = right_transversal(di4)
    index_ok = canonical.index == 3

    textbook = transversal_from_reps(
        di4,
        [Permutation.identity(4), parse_permutation("(1 2)", 4), parse_permutation("(1 4)", 4)],
    )
    rho_12 = induced_action(textbook, parse_permutation("(1 2)", 4)).cycle_string()
    rho_14 = induced_action(textbook, parse_permutation("(1 4)", 4)).cycle_string()
    action_ok = rho_12 == "(1 2)" and rho_14 == "(1 3)"

    image_ok = homomorphism_image(textbook, symmetric_group(4)).order == 6
    preimage_ok = preimage_of(textbook, symmetric_group(3)) == symmetric_group(4)
    elapsed = time.perf_counter() - start

    ok = order_ok and index_ok and action_ok and image_ok and preimage_ok and elapsed < 1.0
    _criterion(
        6,
        ok,
        f"|Di4|=8: {order_ok}, index 3: {index_ok}, rho values: {action_ok}, "
        f"image order 6: {image_ok}, preimage Sym(4): {preimage_ok}, {elapsed:.3f} s",
    )


def test_criterion_7_empirical_stabilizers():
    sampler = SpdSampler(seed=424242, dim=3, count=20)
    tol = 1e-8

    cases = [
        ("crossed bracket", bracket4(1, 3, 2, 4), 4, dihedral_group(4)),
        ("composed 4-mean", composed_mean4_expr(), 4, symmetric_group(4)),
        ("weighted 3-tree", weighted_sharp3(), 3, None),
    ]
    details = []
    ok = True
    for label, expression, n, expected in cases:
        estimate = estimate_stabilizer(expression, n, sampler, tol=tol)
        survivors = estimate.survivors
        reductive = reductive_stabilizer(expression, n)
        contained = is_subgroup(reductive, survivors)
        if expected is None:
            matched = survivors.order == 2
        else:
            matched = survivors == expected
        ok = ok and matched and contained and estimate.sample_count == 20
        details.append(f"{label}: order {survivors.order}, reductive contained {contained}")
    _criterion(7, ok, "; ".join(details))


def test_criterion_8_property_battery():
    battery_props = ("P1", "P2", "P4", "P5", "P6", "P7", "P8", "P9", "P10")
    subjects = [
        ("alm-3", MeanKind.ALM, 3),
        ("bmp-3", MeanKind.BMP, 3),
        ("bmp-4", MeanKind.BMP, 4),
        ("new-4", MeanKind.NEW, 4),
    ]
    start = time.perf_counter()
    failures = []
    for label, kind, n in subjects:
        sampler = SpdSampler(seed=9000 + n, dim=3, count=20)
        for prop in battery_props:
            report = check_property(kind, prop, sampler, n)
            if not report.passed:
                failures.append(f"{label}/{prop}: {report.max_violation:.2e}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60.0
    detail = f"{len(subjects) * len(battery_props)} checks in {elapsed:.1f} s"
    if failures:
        detail += "; failures: " + ", ".join(failures)
    _criterion(8, ok, detail)


def test_criterion_9_convergence_ordering(spread):
    counts = []
    ok = True
    for drop in range(4):
        tup = MatrixTuple([m for k, m in enumerate(spread) if k != drop])
        _, bmp_report = bmp_mean(tup)
        _, alm_report = alm_mean(tup)
        counts.append((bmp_report.outer_iters, alm_report.outer_iters))
        ok = ok and bmp_report.outer_iters <= alm_report.outer_iters
    detail = ", ".join(f"cubic {b} <= linear {a}" for b, a in counts)
    _criterion(9, ok, detail)
