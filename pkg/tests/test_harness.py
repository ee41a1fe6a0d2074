import math
import random

import pytest

from infdiv import harness
from infdiv.arith import Conv, Delta, Jordan, Mu, Session, Table, Xi, pointwise_power
from infdiv.errors import HypothesisError, UsageError
from infdiv.harness import (eq5_oracle, eq5_pairwise, lemma23_composite, random_set,
                            reproduce_counterexample, verify_det_lower_bound, verify_eq5,
                            verify_infdiv_theorems, verify_lemma21, verify_lemma22,
                            verify_lemma23, verify_smith)
from infdiv.sets import IntegerSet, alpha_vector, class_membership
from oracles import brute_divisors, leibniz_det


@pytest.mark.parametrize("f, n, det", [(Xi(1), 4, 4.0), (Xi(2), 3, 24.0), (Jordan(3), 1, 1.0)])
def test_smith_examples(f, n, det):
    rep = verify_smith(f, n)
    assert rep.passed and rep.instances == 1
    s = list(range(1, n + 1))
    assert leibniz_det([[f(math.gcd(i, j)) for j in s] for i in s]) == pytest.approx(det)


def test_smith_range():
    with pytest.raises(UsageError):
        verify_smith(Xi(1), 0)


def test_det_bound_examples():
    s = IntegerSet.of([6, 10, 15])
    rep = verify_det_lower_bound(Xi(1), s, eps_list=())
    assert rep.passed and rep.instances == 1
    assert leibniz_det([[math.gcd(a, b) for b in s] for a in s]) == 660
    assert math.prod((6, 8, 8)) == 384
    # a single element gives det = f(x) = alpha exactly
    assert verify_det_lower_bound(Jordan(2), IntegerSet.of([12])).passed
    assert verify_det_lower_bound(Xi(1), IntegerSet.of([1, 2, 4])).passed


def test_det_bound_perturbed():
    rep = verify_det_lower_bound(Jordan(1), IntegerSet.of([2, 3, 12, 30]), eps_list=(0.1, 1.0))
    assert rep.passed and rep.instances == 3 and not rep.skipped


def test_det_bound_skips_outside_class():
    rep = verify_det_lower_bound(Mu(), IntegerSet.of([4, 6]))
    assert rep.instances == 0 and rep.passed and rep.skipped
    # fbar must lie in the strict class; J_1 has (J_1*mu)(2) = 0
    rep = verify_det_lower_bound(Xi(1), IntegerSet.of([2, 3]), fbar=Jordan(1))
    assert rep.instances == 1 and any("fbar" in s for s in rep.skipped)


def test_psd_from_class_verifier():
    rep = verify_lemma21(Xi(1), IntegerSet.of([6, 10, 15]))
    assert rep.passed and rep.instances > 7
    assert verify_lemma21(Table.from_mapping({1: 0.0, 3: 0.0, 10: 3.0}, 1.0),
                          IntegerSet.of([6, 10, 15])).passed


def test_pointwise_closure_examples():
    rep = verify_lemma22(Xi(1), IntegerSet.of([6, 10, 15]), [0, 0.5, 2, math.pi])
    assert rep.passed and rep.instances == 4
    assert verify_lemma22(Jordan(2), IntegerSet.of([30]), [0.3]).passed


def test_pointwise_closure_requires_multiplicative():
    rep = verify_lemma22(Table.from_mapping({}, 1.0), IntegerSet.of([6]), [1.0])
    assert rep.instances == 0 and rep.skipped


def test_composite_examples():
    s = IntegerSet.of([6, 10, 15])
    assert verify_lemma23([Xi(1)], [2], 1, s).passed
    assert verify_lemma23([Xi(0)], [1], 0, s).passed
    assert verify_lemma23([Xi(1), Jordan(2)], [1, 1], 1, IntegerSet.of([12, 18])).passed
    # xi_0 * mu = delta
    g = lemma23_composite([Xi(0)], [1], 1)
    sess = Session()
    assert all(sess.value(g, m) == Delta()(m) for m in range(1, 60))


def test_composite_hypotheses():
    s = IntegerSet.of([6])
    with pytest.raises(HypothesisError):
        verify_lemma23([Xi(1)], [1], 1, s)
    with pytest.raises(HypothesisError):
        verify_lemma23([Xi(1)], [0], 0, s)
    with pytest.raises(UsageError):
        verify_lemma23([Xi(1)], [1, 2], 0, s)


def test_composite_sharpness():
    # with sum(l) = d the composite can leave the class: xi_0 * mu^(2) = mu
    g = lemma23_composite([Xi(0)], [1], 2)
    assert not class_membership(g, IntegerSet.of([4])).member


def test_tuple_sum_examples():
    assert eq5_oracle([Xi(1), Xi(1)], 0, 4) == 8
    assert eq5_oracle([Jordan(2), Xi(0), Xi(1)], 1, 1) == 1
    for m in range(1, 30):
        assert eq5_oracle([Xi(1)], 0, m) == Jordan(1)(m)
    with pytest.raises(UsageError):
        eq5_oracle([Xi(1)], 1, 4)


def test_tuple_sum_oracle_is_independent_of_convolution():
    # direct tuple sum against the pairwise convolution, computed differently
    gs, d = [Xi(0), Jordan(2), Xi(1)], 1
    sess = Session(fast=False)
    h = eq5_pairwise(gs, d)
    for m in (1, 6, 12, 30, 60):
        assert eq5_oracle(gs, d, m) == pytest.approx(sess.value(h, m), rel=1e-12, abs=1e-12)
    assert verify_eq5(gs, d).passed


def test_counterexample():
    rep = reproduce_counterexample()
    assert rep.passed and rep.instances == 7


def test_infdiv_theorems_examples():
    rep = verify_infdiv_theorems(Xi(1), IntegerSet.of([6, 10, 15]))
    assert rep.passed and rep.instances == 3 * 81 + 3 * 2
    rep = verify_infdiv_theorems(Jordan(1), IntegerSet.of([2, 3, 4]))
    assert rep.passed
    rep = verify_infdiv_theorems(pointwise_power(Jordan(2), 0.5), IntegerSet.of([4, 9, 12, 30]))
    assert rep.passed


def test_infdiv_theorems_skip_non_multiplicative():
    rep = verify_infdiv_theorems(harness.remark_function(), IntegerSet.of([6, 10, 15]))
    assert rep.instances == 0 and rep.skipped


def test_random_set_reproducible():
    a = [random_set(random.Random(7)) for _ in range(3)]
    assert len({tuple(s) for s in a}) == 1
    s = a[0]
    assert 1 <= len(s) <= 6 and max(s) <= 200


def test_report_json_and_seed():
    rep = harness.run_suite("lemma22", seed=11)
    d = rep.to_dict()
    assert d["seed"] == 11 and d["statement"] == "lemma22" and d["instances"] == 50
    assert harness.run_suite("lemma22", seed=11).to_dict() == d


def test_failures_are_reported():
    rep = harness.VerificationReport("x")
    rep.record("bad", False, 1.0, 2.0, -1.0)
    assert not rep.passed
    assert "FAIL" in harness.summary_table([rep]) and "bad" in harness.summary_table([rep])


@pytest.mark.parametrize("sid", harness.STATEMENTS)
def test_every_suite_passes(sid):
    rep = harness.run_suite(sid)
    assert rep.statement == sid
    assert rep.passed, rep.failures[:3]
    assert rep.instances > 0


def test_unknown_statement():
    with pytest.raises(UsageError):
        harness.run_suite("thm99")


@pytest.mark.parametrize("m", [4, 12, 30, 16])
def test_factor_closed_sets_attain_bound(m):
    f = Conv(Xi(1), Jordan(2))
    s = IntegerSet.of(brute_divisors(m))
    assert verify_det_lower_bound(f, s, eps_list=()).passed
    det = leibniz_det([[f(math.gcd(a, b)) for b in s] for a in s])
    assert det == pytest.approx(alpha_vector(f, s).product(), rel=1e-9)
