"""Acceptance suite: one test per criterion, each timed against its limit.

Run with `pytest tests/test_acceptance.py -v -s`, or as a script
(`python3 tests/test_acceptance.py`) for a plain PASS/FAIL summary.
"""
import random
import sys
import time
from fractions import Fraction
from math import gcd
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from gwtqft.gwdata import GWInput, check_input, effective_metric  # noqa: E402
from gwtqft.invariants import (  # noqa: E402
    bethe_check,
    cgp_invariant,
    circle_bundle_presentation,
    euler_characteristic,
    gl11_chi,
    gl11_lattice,
    sphere_presentation,
    state_space_dimension,
    verlinde_partition,
)
from gwtqft.lattice import discriminant_group, smith_normal_form  # noqa: E402
from gwtqft.relmod import (  # noqa: E402
    HypothesisFailed,
    build_structure,
    closed_form_deltas,
    matrix_deltas,
    sample_generic,
    structure_constants,
)
from gwtqft.repcat import (  # noqa: E402
    check_relations,
    coev_left,
    ev_right,
    open_hopf,
    open_hopf_scalar,
    twist,
    twist_scalar,
    verma,
)
from gwtqft.scalar import q_power  # noqa: E402

from oracles import category_axioms, random_typical, random_weight, trace_axioms  # noqa: E402

GL11 = GWInput([[0, 1], [1, 0]], [[1], [0]])
RANK3 = GWInput([[0, 1, 0], [1, 0, 0], [0, 0, 2]], [[1, 2], [0, 0], [0, 0]])
TORAL = GWInput([[2]])
HALF = Fraction(1, 2)
CASES = [(3, Fraction(3, 2)), (5, Fraction(5, 2)), (2, Fraction(1, 2))]


def _compact(s=3, u=Fraction(3, 2)):
    return build_structure(GL11, "compact", gl11_lattice(s, 1, u))


def _toral():
    return build_structure(TORAL, "toral", [[1]])


def _kernel():
    return build_structure(GL11, "kernel", [[1, 0]])


def _verdict(number, title, limit, body):
    """Run body, print one PASS/FAIL line, and return (passed, message)."""
    start = time.perf_counter()
    try:
        body()
        ok, why = True, ""
    except AssertionError as e:
        ok, why = False, str(e) or "assertion failed"
    except Exception as e:  # any crash is a failure of the criterion
        ok, why = False, f"{type(e).__name__}: {e}"
    elapsed = time.perf_counter() - start
    if ok and elapsed >= limit:
        ok, why = False, f"took {elapsed:.2f}s, limit {limit}s"
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} ({title}) {elapsed:.2f}s / {limit}s"
    if why:
        line += f": {why}"
    return ok, line


def _report(capsys, number, title, limit, body):
    ok, line = _verdict(number, title, limit, body)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def input_validation():
    rep = check_input(GL11)
    assert rep.passed, [c.name for c in rep.conditions if not c.passed]
    assert effective_metric(GL11) == [[1, 1], [1, 0]]


def lattice_suite():
    for s, u in CASES:
        b = [[0, s], [s, int(2 * u)]]
        snf = smith_normal_form(b)
        assert snf.check(b)
        D = discriminant_group(b)
        g = gcd(s, int(2 * u))
        assert D.order == s * s
        assert D.factors == (g, s * s // g) == snf.diagonal, (s, u, D.factors)


def relations_and_axioms():
    rng = random.Random(2024)
    mods = []
    for i in range(20):
        data = GL11 if i % 2 else RANK3
        V = verma(data, random_weight(rng, data.r), rng.randint(0, 1))
        assert all(check_relations(V).values()), V.label
        mods.append(V)
    for i in range(0, 20, 2):
        # triples within one datum, cycling through the sampled weights
        same = [m for m in mods if m.data is mods[i].data]
        j = same.index(mods[i])
        U, V, W = (same[(j + k) % len(same)] for k in range(3))
        res = category_axioms(U, V, W)
        assert all(res.values()), {k: v for k, v in res.items() if not v}
    for i in range(1, 20, 2):
        U, V = mods[i], mods[(i + 2) % 20]
        res = category_axioms(U, V, mods[i])
        assert all(res.values()), {k: v for k, v in res.items() if not v}


def closed_form_oracles():
    rng = random.Random(7)
    for i in range(20):
        data = GL11 if i % 2 else RANK3
        a, b = random_typical(rng, data), random_typical(rng, data)
        pa, pb = rng.randint(0, 1), rng.randint(0, 1)
        assert twist(verma(data, a, pa)).matrix.scalar() == twist_scalar(data, a)
        assert open_hopf(verma(data, a, pa), verma(data, b, pb)).matrix.scalar() == open_hopf_scalar(data, a, pa, b, pb)
    # direct 2x2 evaluation at circle (1,0), strand (0,1/2)
    assert open_hopf(verma(GL11, (1, 0)), verma(GL11, (0, HALF))).matrix.scalar() == -2
    assert open_hopf_scalar(GL11, (1, 0), 0, (0, HALF), 0) == -2


def trace_properties():
    rng = random.Random(11)
    for i in range(50):
        data = GL11 if i % 5 else RANK3
        V = verma(data, random_typical(rng, data), rng.randint(0, 1))
        assert trace_axioms(rng, V, V) == (True, True), V.label
        assert (ev_right(V).matrix @ coev_left(V).matrix).is_zero()


def structure_constant_checks():
    i = q_power(1)
    expected = [
        (_compact(), 3, -3, -9),
        (_toral(), 1 - i, 1 + i, 2),
        (_kernel(), 1, -1, -1),
    ]
    for s, plus, minus, zeta in expected:
        c = structure_constants(s, seed=5)
        assert (c.delta_plus, c.delta_minus) == (plus, minus)
        assert c.delta_plus * c.delta_minus == zeta == c.zeta
        rng = random.Random(6)
        a, b = sample_generic(s, rng, 24), sample_generic(s, rng, 24)
        assert a != b
        assert closed_form_deltas(s, a) == closed_form_deltas(s, b) == (plus, minus)
        assert matrix_deltas(s, a) == (plus, minus)


def surgery_invariance():
    for s in (_compact(), _toral()):
        c = structure_constants(s, matrix_check=False)
        lam = sample_generic(s, random.Random(3), 24)
        vals = [cgp_invariant(s, sphere_presentation(s, lam, f), c) for f in (0, 1, -1)]
        assert vals[0] == vals[1] == vals[2], vals


def euler_numbers():
    s = _compact()
    for g, want in ((1, 9), (2, 162)):
        e = euler_characteristic(s, g)
        b = bethe_check(s, g)
        assert e == want == gl11_chi(3, 1, Fraction(3, 2), g)
        assert b.equal and b.chi_via_bethe == want and b.solutions == 9
    t = _toral()
    for g in (1, 2, 3):
        assert state_space_dimension(t, g) == t.order ** g
    k = _kernel()
    n = GL11.n
    for g in (2, 3):
        assert state_space_dimension(k, g) == 2 ** (n * (2 * g - 2))
        assert euler_characteristic(k, g) == 0
    assert euler_characteristic(k, 1) == 1


def genus_one():
    for s in (_toral(), _compact()):
        rng = random.Random(19)
        beta, alpha, beta1 = (sample_generic(s, rng, 24) for _ in range(3))
        z = cgp_invariant(s, circle_bundle_presentation(alpha, beta1, beta))
        assert z == verlinde_partition(s, 1, beta), z


def failing_cases():
    with pytest.raises(HypothesisFailed) as e:
        build_structure(GWInput([[0, 1], [1, 0]], [[2], [0]]), "compact", [[1, 0]])
    assert e.value.condition == "finiteness"
    assert [c.name for c in e.value.report.failed()] == ["finiteness"]
    with pytest.raises(HypothesisFailed) as e:
        build_structure(GL11, "compact", gl11_lattice(3, 1, 0))
    assert e.value.condition == "effective_even_integral"


CRITERIA = [
    (1, "input validation", 1, input_validation),
    (2, "lattice suite", 1, lattice_suite),
    (3, "relations and category axioms", 120, relations_and_axioms),
    (4, "twist and open Hopf closed forms", 60, closed_form_oracles),
    (5, "modified trace axioms", 120, trace_properties),
    (6, "structure constants", 60, structure_constant_checks),
    (7, "surgery invariance of S3", 120, surgery_invariance),
    (8, "Verlinde and Euler numbers", 60, euler_numbers),
    (9, "genus-1 cross-check", 300, genus_one),
    (10, "failing-case detection", 1, failing_cases),
]


@pytest.mark.parametrize("number, title, limit, body", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(capsys, number, title, limit, body):
    _report(capsys, number, title, limit, body)


if __name__ == "__main__":
    results = [_verdict(*c) for c in CRITERIA]
    for _, line in results:
        print(line, flush=True)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
