import math

import pytest

import delaygeom as dg


def unit_ratio():
    p = dg.NetworkParams.defaults()
    p.lambda_mt = p.lambda_bs
    return p


def test_local_delay_closed_form_and_integral():
    p = unit_ratio()
    d = dg.local_delay(p, dg.Sir(1.0))
    assert d == pytest.approx(2.409936741898484, rel=1e-12)
    assert dg.local_delay(p, dg.Sir(1.0), general_integral=True) == pytest.approx(d, abs=1e-8)
    gstar = dg.critical_threshold(4.0, dg.active_probability(p.lambda_bs, p.lambda_mt))
    assert math.isinf(dg.local_delay(p, dg.Sir(gstar * 1.01)))


def test_f1_values():
    p = dg.NetworkParams.defaults()
    assert dg.f1(5, p, dg.Sinr(1.0)) == pytest.approx(0.2127454694134403, rel=1e-10)
    curve = dg.f1_curve(5, p, dg.Sinr(1.0))
    assert len(curve) == 6
    assert curve[0] == 1.0
    assert curve[-1] == pytest.approx(dg.f1(5, p, dg.Sinr(1.0)), rel=1e-14)


def test_f2_methods_agree():
    p = dg.NetworkParams.defaults()
    p.lambda_mt = 1e12 * p.lambda_bs  # L = 1
    exact = dg.f2(5.0, p, dg.Sir(1.0))
    assert exact == pytest.approx(0.1751914035486616, abs=1e-7)
    assert dg.f2(5.0, p, dg.Sir(1.0), method="euler") == pytest.approx(exact, abs=1e-6)
    assert dg.f2(5.0, p, dg.Sir(1.0), method="beta") == pytest.approx(exact, abs=0.03)
    assert 0.0 <= dg.f3(0.5, 10, p, dg.Sir(1.0)) <= 1.0


def test_packet_loss_and_char_fn():
    p = dg.NetworkParams.defaults()
    c = dg.SirAsnr(1.0, dg.db_to_linear(12.5))
    pe = dg.packet_loss(p, c)
    assert pe == pytest.approx(0.5828617642340169, rel=1e-12)
    assert dg.char_fn(0.0, p, c) == pytest.approx(1.0 - pe)
    assert dg.packet_loss(p, dg.Sir(1.0)) == 0.0


def test_special_functions():
    g = 3.0
    assert dg.hyp2f1(-0.5, 1.0, 0.5, -g) == pytest.approx(1 + math.sqrt(g) * math.atan(math.sqrt(g)))
    assert dg.regularized_incomplete_beta(0.3, 1.0, 1.0) == pytest.approx(0.3)
    shape = dg.beta_shape(dg.NetworkParams.defaults(), dg.Sinr(1.0))
    assert set(shape) == {"a", "b", "mu", "nu"}
    with pytest.raises(Exception):
        dg.beta_shape(dg.NetworkParams.defaults(), dg.SirAsnr(1.0, 10.0))


def test_simulation_is_reproducible():
    p = dg.NetworkParams.defaults()
    a = dg.simulate(p, dg.Sir(1.0), realizations=200, seed=11)
    b = dg.simulate(p, dg.Sir(1.0), realizations=200, seed=11)
    assert a["pcov"] == b["pcov"]
    assert len(a["r0"]) == 200
    mean = sum(a["pcov"]) / len(a["pcov"])
    assert abs(mean - (1 - dg.f1(1, p, dg.Sir(1.0)))) < 0.1


def test_invalid_parameters_raise():
    p = dg.NetworkParams.defaults()
    p.alpha = 2.0
    with pytest.raises(Exception):
        dg.f1(3, p, dg.Sir(1.0))
