"""Acceptance gate: every criterion runs at its stated tolerance.

Each golden check covers one numbered acceptance criterion (the property
suite is criterion 10); a pass/fail line is printed per criterion so the
suite readout doubles as the acceptance report.  The same registry backs
``aperycmzv selftest``.
"""

import time

import pytest

from aperycmzv.suite import GOLDEN, PROPERTIES

CRITERIA = {
    "apery_anchors": "1. Apery anchors (oracle), 1e-12",
    "catalan_2g": "2. 2G via pipeline AND oracle (1e-10); b3 value (1e-8)",
    "seven_zeta3": "3. 7 zeta(3) (1e-10)",
    "chi_heads": "4. chi-head values (1e-8)",
    "mixed_parity": "5. mixed-parity values (1e-8)",
    "example_s": "6. Example S: S1 (1e-9), S2 limit mode (1e-8), relation (7,-8)",
    "squared_binomial": "7. squared-binomial values (1e-8)",
    "beta_family": "8. t*(2_d) and 2 beta families (1e-10)",
    "algebraic_points": "9. algebraic x: pi^3 family and oracle arbitration",
    "interleave_cor51": "11. interleaving vs brute-force double sums (1e-8)",
}


@pytest.mark.parametrize("name,fn", GOLDEN, ids=[n for n, _ in GOLDEN])
def test_acceptance_criterion(name, fn):
    t0 = time.time()
    ok, detail = fn()
    label = CRITERIA.get(name, name)
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {label} ({time.time() - t0:.1f}s): {detail}")
    assert ok, f"{label}: {detail}"


@pytest.mark.parametrize("name,fn", PROPERTIES, ids=[n for n, _ in PROPERTIES])
def test_property_suite(name, fn):
    t0 = time.time()
    ok, detail = fn()
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] 10. {name} ({time.time() - t0:.1f}s): {detail}")
    assert ok, f"{name}: {detail}"
