"""Smoke test for the qsum extension module.

Build and install first, e.g. `maturin develop --release` from crates/python.
"""

import math
from fractions import Fraction

import qsum


def main():
    f = qsum.FunctionTable(3, [2, 0, 1])
    assert (f.n, f.k, f.sum()) == (3, 3, 0)

    report = qsum.run_sum(f, 1, seed=5)
    assert report["true_sum"] == 0
    assert abs(report["success_prob"] - 1.0) < 1e-9
    assert report["queries_used"] == 2
    assert report["sampled_prediction"] == 0

    one_query = qsum.run_sum(qsum.FunctionTable(3, [1, 1]), 1)
    assert abs(one_query["success_prob"] - 2 / 3) < 1e-9

    segments = qsum.plan(7, 3, 2)["segments"]
    assert segments[0]["kind"] == "core_block"
    assert sum(1 for s in segments if s["kind"] == "classical_read") == 1

    amps = qsum.run_core(f, 1)
    assert len(amps) == 9
    assert abs(sum(abs(a) ** 2 for a in amps[:3]) - 1.0) < 1e-12

    assert qsum.success_probability(4, 3, 4) == Fraction(1, 3)
    assert qsum.identify_probability(3, 3, 1) == Fraction(7, 27)
    assert qsum.identify_sum_bound(3, 3, 1) == Fraction(41, 81)

    rows = qsum.sweep(12, 3)
    assert len(rows) == 13
    assert all(row[1] == Fraction(1, 3) for row in rows[:6])
    assert next(q for q, t, _, _ in rows if t == 1) == 8

    assert abs(qsum.measurement_prob(3, 2, 0, 0) - 2 / 3) < 1e-12
    state = qsum.character_state(3, 2, 0)
    assert abs(abs(state[0]) ** 2 - 2 / 3) < 1e-12
    assert qsum.central_mass(16, 5) >= 4 / math.pi**2

    stats = qsum.exhaustive_success(3, 2, 1)
    assert stats["oracles"] == 8 and abs(stats["min"] - 1.0) < 1e-9

    try:
        qsum.run_sum(f, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("r = 0 must be rejected")

    suite = qsum.verify_suite()
    assert suite["failed"] == 0, suite["failed"]
    print(f"smoke test ok: {suite['passed']} verification checks passed")


if __name__ == "__main__":
    main()
