import math

import pytest

import spectral_markov as sm


def test_measure_coefficients():
    leb = sm.Measure.lebesgue()
    assert leb.coefficient(0) == 1.0
    assert leb.coefficient(5) == 0.0

    d = sm.Measure.dirac(0.25)
    assert d.coefficient(1) == pytest.approx(complex(math.cos(-math.pi / 2),
                                                     math.sin(-math.pi / 2)))

    cantor = sm.Measure.cantor()
    assert abs(cantor.coefficient(1)) == pytest.approx(0.3714373567, abs=1e-9)
    assert cantor.coefficient(3) == pytest.approx(cantor.coefficient(1))


def test_riesz_and_classify():
    r = sm.Measure.riesz(4, 4.0, 8, rule="inv_log", finite=True)
    assert abs(r.coefficient(4)) <= 0.5
    res = sm.classify(sm.Measure.convex_ac(rule="inv_log"), N=20000)
    assert res["overall"] == "NotHyperbounded"
    assert res["ht"]["verdict"] == "Converges"


def test_finite_operator_norms_and_classes():
    op = sm.example2(4)
    assert sm.opnorm(op, 2, 4)["value"] == pytest.approx(2 ** 0.25, abs=1e-6)
    assert sm.cyclic_classes(op)["d"] == 2
    cert = sm.aperiodicity_certificate(op)
    assert not cert["certified"]

    mixed = sm.mix(sm.rank_one([0.5, 0.5]), sm.example2(2), 0.75)
    assert sm.aperiodicity_certificate(mixed)["certified"]

    with pytest.raises(sm.SpecError):
        sm.FiniteOp([0.5, 0.5], [[1.5, -0.5], [-0.5, 1.5]])


def test_deterministic_sets_match_class_algebra():
    ds = sm.deterministic_sets(sm.cycle(3))
    assert ds["matches_class_algebra"]
    assert ds["divisor_rule_ok"]
    assert len(ds["sigmaD"]) == 8


def test_ud_experiment_and_del():
    seq = sm.Sequence.arith(0, 1)
    rep = sm.ud_experiment(sm.Measure.lebesgue(), seq, samples=10, N=5000)
    assert rep["pass_fraction"] > 0.8
    bad = sm.ud_experiment(sm.Measure.dirac(0.0), seq, samples=10, N=5000)
    assert bad["pass_fraction"] == 0.0

    del_rep = sm.del_series(sm.Measure.lebesgue(), seq, N_max=2000)
    assert del_rep["series"]["verdict"] == "Converges"
    assert del_rep["final_sum"] == pytest.approx(math.pi ** 2 / 6, abs=2e-3)
