import math
import warnings

import numpy as np
import pytest

from bec_steering.closed_form import (
    closed_form_moments,
    closed_form_spin_moments,
    crosscheck,
    signed_power,
)
from bec_steering.fock import ModelParams, beam_splitter_state, evolve
from bec_steering.moments import moments_from_state


def test_k_minus_one_examples():
    cf = closed_form_moments(ModelParams(100, 1.0, -1.0, 0.1))
    assert math.isclose(cf.mean_sx, 50 * math.cos(0.4) ** 99, rel_tol=1e-13)
    cf = closed_form_moments(ModelParams(2, 1.0, -1.0, 0.1))
    assert math.isclose(cf.second_yy, 0.5, rel_tol=1e-15)
    assert abs(cf.c_value) < 1e-15
    assert abs(cf.f_value - 2j * math.sin(0.4)) < 1e-15


@pytest.mark.parametrize("n", [1, 2, 17, 500])
def test_time_zero(n):
    cf = closed_form_moments(ModelParams(n, 1.0, -1.0, 0.0))
    assert cf.mean_sx == n / 2
    assert cf.f_value == 0
    assert cf.second_zz == n / 4


def test_signed_power():
    assert signed_power(-0.5, 3) == -0.125
    assert signed_power(-0.5, 2) == 0.25
    assert signed_power(0.0, 0) == 1.0
    assert signed_power(-0.9, 10001) == -0.0 or signed_power(-0.9, 10001) < 0
    assert np.array_equal(signed_power(np.array([-2.0, 3.0]), 3), [-8.0, 27.0])
    with pytest.raises(ValueError):
        signed_power(2.0, -1)


@pytest.mark.parametrize("as_printed", [False, True])
def test_printed_forms_match_reduced(as_printed):
    for n in (2, 3, 10, 60):
        for k in (-1.0, 0.0, 0.5):
            for t in (0.01, 0.17, 0.9):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    rep = crosscheck(ModelParams(n, 1.0, k, t), 1e-9, as_printed=as_printed)
                assert rep.passed, (n, k, t, rep.worst_field, rep.worst_deviation)


def test_removable_singularity_is_flagged():
    params = ModelParams(10, 1.0, -1.0, math.pi / 8)
    with pytest.warns(RuntimeWarning):
        cf = closed_form_moments(params, as_printed=True)
    assert cf.warnings
    ref = closed_form_moments(params)
    assert abs(cf.mean_sx - ref.mean_sx) < 1e-3 * 5


def test_printed_forms_need_two_bosons():
    with pytest.raises(ValueError):
        closed_form_moments(ModelParams(1, 1.0, -1.0, 0.2), as_printed=True)


def test_crosscheck_grid_examples():
    worst = 0.0
    for t in np.linspace(0, 2 * math.pi, 50):
        worst = max(worst, crosscheck(ModelParams(200, 1.0, -1.0, float(t))).worst_deviation)
    assert worst < 1e-10
    for n in range(2, 31):
        for t in (0.05, 0.4, 2.5):
            assert crosscheck(ModelParams(n, 1.0, 0.0, t)).worst_deviation < 1e-10


def test_underflowed_power_large_n():
    # cos(8t) = 0.5: the power underflows and <S_y^2> saturates at (N^2+N)/8
    n = 10_000
    t = math.acos(0.5) / 8
    params = ModelParams(n, 1.0, -1.0, t)
    cf = closed_form_moments(params)
    summed = moments_from_state(evolve(beam_splitter_state(n), params))
    target = (n * n + n) / 8
    assert abs(cf.second_yy - target) / target < 1e-9
    assert abs(summed.second_yy - target) / target < 1e-9


@pytest.mark.parametrize("n", [1, 2, 9, 40])
def test_spin_moment_adapter_matches_sums(n):
    for t in (0.0, 0.08, 1.3):
        params = ModelParams(n, 1.0, -1.0, t)
        a = closed_form_spin_moments(params).as_dict()
        b = moments_from_state(evolve(beam_splitter_state(n), params)).as_dict()
        for key in a:
            assert abs(a[key] - b[key]) < 1e-10 * max(1, n * n), key
