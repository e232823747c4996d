import math
from fractions import Fraction

import pytest

import cubres


def test_method_one_at_g_06():
    lv = cubres.resonances(g=0.6, levels=1)[0]
    assert abs(lv["energy"] - complex(0.554053519, -0.351401778)) < 1e-8
    assert lv["width"] == pytest.approx(-2 * lv["energy"].imag)


def test_pt_ground_state():
    lv = cubres.resonances(beta=0.1, levels=1)[0]
    assert abs(lv["energy"].real - 0.512538145) < 1e-9


def test_free_spectrum():
    levels = cubres.resonances(g=0.0, levels=3)
    assert [round(lv["energy"].real, 12) for lv in levels] == [0.5, 1.5, 2.5]


def test_errors_map_to_python():
    with pytest.raises(cubres.DomainError):
        cubres.resonances(g=0.6, theta=math.radians(36))
    with pytest.raises(ValueError):
        cubres.resonances(g=0.1, beta=0.1)
    assert issubclass(cubres.ConvergenceError, cubres.CubresError)


def test_exact_series():
    b = cubres.b_series(2)
    assert b[1] == [Fraction(7, 16), 0, Fraction(15, 4)]
    assert b[2] == [0, Fraction(1365, 64), 0, Fraction(1155, 16)]
    e = cubres.rspt_coefficients(0, 2)
    assert e == [Fraction(1, 2), Fraction(-11, 8), Fraction(-465, 32)]
    assert cubres.instanton_action() == Fraction(2, 15)


def test_borel_pade_stieltjes():
    coeffs = [(-1) ** k * math.factorial(k) for k in range(51)]
    r = cubres.borel_pade(coeffs, 0.1)
    assert abs(r["value"] - 0.9156333394) < 1e-9


def test_pt_energy():
    r = cubres.pt_energy(0, 0.1)
    assert abs(r["value"].real - 0.512538145) < 1e-9


def test_instanton_width():
    g = 0.02
    assert cubres.instanton_width(g) == pytest.approx(-math.exp(-2 / (15 * g)) / math.sqrt(math.pi * g))


def test_autocorrelation_harmonic_revival():
    tr = cubres.autocorrelation([0.0, math.pi], g_root=0.0, theta=0.0, n_max=200)
    assert tr["P_normalized"][0] == pytest.approx(1.0)
    assert abs(tr["P_normalized"][1] - 1.0) < 1e-6


def test_oracle_small_box():
    tr = cubres.cn_autocorrelation([0.0, 1.0], g_root=0.0, half_width=12.0, spacing=0.01)
    assert tr["P_normalized"][0] == pytest.approx(1.0)
    assert not tr["boundary_warning"]
    assert abs(tr["norm_loss"]) < 1e-10
