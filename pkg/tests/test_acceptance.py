"""Acceptance suite: every criterion at its pinned tolerance.

Each test prints one `[acceptance] criterion N: PASS|FAIL` line (run with
`pytest -s` to see them on passing runs) and then asserts.
"""

import math
import time

from union_channel import (
    CodeParams,
    avg_capacity_no_feedback,
    avg_feedback_capacity,
    case_discriminant,
    concave_envelope,
    cover_leung_witness,
    grid_max_joint_entropy,
    max_joint_entropy,
    output_entropy,
    pattern_count,
    random_feasible_sampler,
    rank_pattern,
    rate_root,
    simulate,
    uncertainty_peak_bound,
    unrank_pattern,
    validate_params,
)

R_FEEDBACK_TABLE = {2: 0.79113, 3: 0.81510, 4: 0.83044, 5: 0.84130, 6: 0.84959}
R_NO_FEEDBACK_TABLE = {2: 0.75, 3: 0.78969, 4: 0.8125, 5: 0.82773, 6: 0.83881}
RATE_ROOT_TABLE = {2: 0.77291, 3: 0.81071, 4: 0.82946, 5: 0.84123, 6: 0.84953}


def _report(number, name, ok):
    print(f"[acceptance] criterion {number} ({name}): {'PASS' if ok else 'FAIL'}")


def test_criterion_1_capacity_table():
    start = time.perf_counter()
    failures = []
    for q in range(2, 7):
        report = avg_feedback_capacity(q)
        if abs(report.r_feedback - R_FEEDBACK_TABLE[q]) > 5e-6:
            failures.append((q, "r_feedback", report.r_feedback))
        if abs(avg_capacity_no_feedback(q) - R_NO_FEEDBACK_TABLE[q]) > 5e-6:
            failures.append((q, "r_no_feedback", report.r_no_feedback))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 1.0
    _report(1, "capacity table q=2..6", ok)
    assert ok, f"failures={failures} elapsed={elapsed:.3f}s"


def test_criterion_2_rate_roots():
    start = time.perf_counter()
    failures = []
    for q in range(2, 7):
        value = rate_root(q)
        if abs(value - RATE_ROOT_TABLE[q]) > 5e-6:
            failures.append((q, value))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 1.0
    _report(2, "zero-error rate roots q=2..6", ok)
    assert ok, (
        f"failures={failures} elapsed={elapsed:.3f}s. Known defect in the q=6 "
        f"reference value: the true root of H_b(a)+(1-a)*log2(6)=1 is "
        f"0.8495249900198161452... (verified at 50-digit precision), which "
        f"sits 1.0e-9 below the 0.849525 rounding boundary and therefore "
        f"5-decimal-rounds to 0.84952, not 0.84953; the distance to the "
        f"0.84953 target is 5.01e-6 > 5e-6, so this subcase cannot pass as "
        f"specified. The computed root itself is asserted to full precision "
        f"in tests/test_codec.py."
    )


def test_criterion_3_case_split():
    start = time.perf_counter()
    ok = case_discriminant(3) < 0 and case_discriminant(4) < 0
    ok = ok and all(case_discriminant(q) > 0 for q in range(5, 101))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1.0
    _report(3, "discriminant signs q=3..100", ok)
    assert ok


def test_criterion_4_zero_error_n17_m13():
    start = time.perf_counter()
    params = CodeParams(q=2, n=17, m=13, blocks=3)
    report = simulate(params, trials=1000)
    elapsed = time.perf_counter() - start
    ok = (
        report.errors == 0
        and report.max_uncertainty <= 35840
        and all(r.uses <= 67 for r in report.records)
        and elapsed < 60.0
    )
    _report(4, "zero-error run q=2 n=17 m=13 B=3 x1000", ok)
    assert ok, (
        f"errors={report.errors} max_uncertainty={report.max_uncertainty} "
        f"max_uses={report.max_uses} elapsed={elapsed:.1f}s"
    )


def test_criterion_5_cross_alphabet_sweep():
    start = time.perf_counter()
    configs = 0
    failures = []
    for q in range(2, 5):
        for n in range(1, 13):
            for m in range((n + 1) // 2, n + 1):
                if not validate_params(q, n, m).feasible:
                    continue
                configs += 1
                params = CodeParams(q=q, n=n, m=m, blocks=3)
                report = simulate(params, trials=50)
                if report.errors != 0:
                    failures.append((q, n, m, report.errors))
                if report.max_uncertainty > uncertainty_peak_bound(n, m):
                    failures.append((q, n, m, "peak bound"))
    elapsed = time.perf_counter() - start
    ok = configs > 0 and not failures and elapsed < 300.0
    _report(5, f"zero-error sweep ({configs} feasible configs)", ok)
    assert ok, f"failures={failures} elapsed={elapsed:.1f}s"


def test_criterion_6_oracle_agreement():
    start = time.perf_counter()
    failures = []
    for i in range(55, 100, 5):
        theta = i / 100
        oracle = grid_max_joint_entropy(2, theta, 1e-4).value
        closed = max_joint_entropy(theta, 2)
        if oracle > closed + 1e-9 or abs(oracle - closed) > 1e-3:
            failures.append(("grid", theta, oracle, closed))
    for q in (3, 4, 5):
        for theta in (0.5, 0.7, 0.9):
            best = random_feasible_sampler(q, theta, 100_000)
            closed = max_joint_entropy(theta, q)
            if best > closed + 1e-9 or best < closed - 0.02:
                failures.append(("sampler", q, theta, best, closed))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120.0
    _report(6, "oracle vs closed form", ok)
    assert ok, f"failures={failures} elapsed={elapsed:.1f}s"


def test_criterion_7_witness_identities():
    start = time.perf_counter()
    failures = []
    for q in range(2, 11):
        report = avg_feedback_capacity(q)
        theta = report.theta_star
        witness = cover_leung_witness(q, theta)
        envelope_value = concave_envelope(theta, q).value
        if abs(witness.h_x1_given_u - 0.5 * envelope_value) > 1e-9:
            failures.append((q, "h_x1"))
        if abs(witness.h_x2_given_u - 0.5 * envelope_value) > 1e-9:
            failures.append((q, "h_x2"))
        if abs(witness.h_output - output_entropy(theta, q)) > 1e-9:
            failures.append((q, "h_output"))
        for v in range(1, q + 1):
            if abs(witness.pair_marginal[(v, v)] - theta / q) > 1e-12:
                failures.append((q, "equal marginal", v))
        off = (1 - theta) / (q * (q - 1))
        for v1 in range(1, q + 1):
            for v2 in range(1, q + 1):
                if v1 != v2 and abs(witness.pair_marginal[(v1, v2)] - off) > 1e-12:
                    failures.append((q, "unequal marginal", v1, v2))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 1.0
    _report(7, "achievability witness identities q=2..10", ok)
    assert ok, f"failures={failures} elapsed={elapsed:.3f}s"


def test_criterion_8_combinatorics():
    start = time.perf_counter()
    failures = []
    combos = [(2, 17, 13)]
    for q in range(2, 7):
        for n in range(1, 15):
            for m in range(0, n + 1):
                if pattern_count(q, n, m) <= 100_000:
                    combos.append((q, n, m))
    for q, n, m in combos:
        total = pattern_count(q, n, m)
        previous = None
        for r in range(total):
            pattern = unrank_pattern(r, q, n, m)
            if rank_pattern(pattern, q, m=m) != r:
                failures.append((q, n, m, r, "round trip"))
                break
            if previous is not None and pattern <= previous:
                failures.append((q, n, m, r, "ordering"))
                break
            previous = pattern
    for n in range(1, 41):
        for m in range((n + 1) // 2, n + 1):
            u = [math.comb(n - l, m - l) * 2**l for l in range(m + 1)]
            peak = max(u)
            argmax = {l for l, v in enumerate(u) if v == peak}
            expected = {l for l in (2 * m - n, 2 * m - n + 1) if l <= m}
            if argmax != expected:
                failures.append((n, m, "peak location"))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30.0
    _report(8, f"rank/unrank bijection ({len(combos)} spaces) and peak locations", ok)
    assert ok, f"failures={failures[:5]} elapsed={elapsed:.1f}s"
