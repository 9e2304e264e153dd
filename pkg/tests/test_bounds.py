import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from bec_steering.bounds import (
    BoundEntry,
    BoundTable,
    asymptotic_check,
    build_table,
    interpolate_c_tilde,
    largest_two_s_above,
    reference_table,
    solve_c_s,
    solve_c_s_detailed,
    solve_zeta2,
    solve_zeta2_detailed,
)


def spin_matrices(two_s):
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    raise_ = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), k=1)
    sx = (raise_ + raise_.T) / 2
    sy = (raise_ - raise_.T) / 2j
    return sx, sy, np.diag(m)


def brute_force_c_s(two_s, restarts=12, seed=0):
    """Minimize the transverse variance sum over complex states with random restarts."""
    sx, sy, _ = spin_matrices(two_s)
    a = sx @ sx + sy @ sy
    dim = two_s + 1
    rng = np.random.default_rng(seed)

    def f(v):
        psi = v[:dim] + 1j * v[dim:]
        psi = psi / np.linalg.norm(psi)
        ev = lambda op: np.vdot(psi, op @ psi).real  # noqa: E731
        return ev(a) - ev(sx) ** 2 - ev(sy) ** 2

    best = math.inf
    for _ in range(restarts):
        res = minimize(f, rng.normal(size=2 * dim), method="BFGS", options={"gtol": 1e-11})
        best = min(best, res.fun)
    return best


def dense_zeta2_spin_one():
    """Grid plus polish over real spin-1 states of (<A> - <S_x>^2) / |<S_x>|."""
    sx, sy, _ = spin_matrices(2)
    a = (sx @ sx + (sy @ sy).real)

    def ratio(angles):
        th, ph = angles
        v = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
        x = v @ sx @ v
        return (v @ a @ v - x * x) / abs(x) if abs(x) > 1e-12 else math.inf

    th = np.linspace(0, math.pi, 1000)
    ph = np.linspace(0, 2 * math.pi, 1000)
    best = min(((ratio((a_, b_)), a_, b_) for a_ in th[::1] for b_ in ph[::10]))
    res = minimize(ratio, best[1:], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
    return res.fun


# values produced by the oracles above and frozen here
FROZEN_C_S = {1: 0.25, 2: 0.4375, 3: 0.6009333353215327, 4: 0.7495533863979063}
FROZEN_ZETA2_SPIN_ONE = 0.44905880690871025


def test_exact_low_spin_values():
    assert solve_c_s(0.5) == pytest.approx(0.25, abs=1e-14)
    assert solve_c_s(1) == pytest.approx(7 / 16, abs=1e-14)
    for two_s, value in FROZEN_C_S.items():
        assert solve_c_s(two_s / 2) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("two_s", range(1, 13))
def test_solver_matches_brute_force(two_s):
    assert abs(solve_c_s(two_s / 2) - brute_force_c_s(two_s)) < 1e-8


def test_zeta2_oracles():
    assert solve_zeta2(0.5) == pytest.approx(0.5, abs=1e-12)
    assert abs(dense_zeta2_spin_one() - FROZEN_ZETA2_SPIN_ONE) < 1e-9
    assert solve_zeta2(1) == pytest.approx(FROZEN_ZETA2_SPIN_ONE, abs=1e-12)


@pytest.mark.parametrize("two_s", [1, 2, 7, 40, 301, 2000])
def test_solution_is_self_consistent_eigenstate(two_s):
    sol = solve_c_s_detailed(two_s / 2)
    assert sol.eigen_residual < 1e-10
    assert abs(sol.mu - sol.mean_sx) < 1e-9 * max(1, two_s)
    assert math.isclose(sol.value, sol.second_a - sol.mean_sx**2, rel_tol=1e-12)
    z = solve_zeta2_detailed(two_s / 2)
    assert z.eigen_residual < 1e-10


def test_tridiagonal_matches_dense_eigensolve():
    for two_s in (3, 10, 57, 200):
        sol = solve_c_s_detailed(two_s / 2)
        sx, sy, sz = spin_matrices(two_s)
        s = two_s / 2
        h = s * (s + 1) * np.eye(two_s + 1) - sz @ sz - 2 * sol.mu * sx
        w, v = np.linalg.eigh(h)
        vec = v[:, 0]
        x = vec @ sx @ vec
        dense_value = vec @ (s * (s + 1) * np.eye(two_s + 1) - sz @ sz) @ vec - x * x
        assert abs(dense_value - sol.value) < 1e-10 * max(1, sol.value)


def test_invalid_spin():
    for bad in (0, 0.25, -1, float("nan")):
        with pytest.raises(ValueError):
            solve_c_s(bad)


def test_table_invariants(small_table):
    ct = small_table.c_tilde
    assert ct[0] == pytest.approx(0.5, abs=1e-14)
    assert np.all(np.diff(ct) < 0)
    z = small_table.zeta2
    assert np.all(z <= 0.5 + 1e-12) and np.all(np.diff(z) <= 1e-12)
    for e in small_table:
        assert math.isclose(e.c_tilde, e.c_s / e.spin)


def test_table_rejects_broken_entries():
    with pytest.raises(ValueError):
        BoundTable([BoundEntry(2, 0.4375, 0.4375), BoundEntry(3, 0.9, 0.6)])
    with pytest.raises(ValueError):
        BoundTable([BoundEntry(2, 0.4375, 0.5)])
    with pytest.raises(ValueError):
        BoundTable([])


def test_serialization_round_trip(small_table, tmp_path):
    again = BoundTable.from_csv(small_table.to_csv())
    assert again.to_csv() == small_table.to_csv()
    back = BoundTable.from_json(small_table.to_json())
    assert back.to_json() == small_table.to_json()
    assert small_table.to_csv().splitlines()[0] == "two_s,c_s,c_tilde,zeta2"
    path = tmp_path / "t.csv"
    small_table.save(path)
    assert BoundTable.load(path).to_csv() == small_table.to_csv()


def test_build_table_cache_and_workers(tmp_path):
    a = build_table([1, 5, 9], cache_dir=tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    b = build_table([9, 5, 1], cache_dir=tmp_path)
    assert a.to_csv() == b.to_csv()
    c = build_table([1, 5, 9], workers=2)
    assert c.to_csv() == a.to_csv()


def test_reference_table():
    t = reference_table()
    assert list(t.two_s) == [21, 42, 87, 223, 456, 4772]


def test_asymptotic_check():
    table = build_table(np.unique(np.geomspace(200, 20000, 13).astype(int)))
    slope = asymptotic_check(table)
    assert 0.646 <= slope <= 0.686
    with pytest.raises(ValueError):
        asymptotic_check(build_table([1, 2]))
    with pytest.raises(ValueError):
        asymptotic_check(build_table(range(1, 11)))


def test_interpolation(small_table):
    assert interpolate_c_tilde(small_table, 10.5) == small_table.lookup(21).c_tilde
    sparse = BoundTable([small_table.lookup(t) for t in (1, 21, 40, 60)])
    mid = interpolate_c_tilde(sparse, 10.75)
    assert sparse.lookup(40).c_tilde < mid < sparse.lookup(21).c_tilde
    with pytest.raises(ValueError):
        interpolate_c_tilde(sparse, 31)
    with pytest.raises(ValueError):
        interpolate_c_tilde(sparse, 0.25)


def test_interpolation_never_over_certifies(small_table):
    # the chord in log-log space lies below the concave solved curve
    sparse = BoundTable([small_table.lookup(t) for t in (1, 4, 13, 30, 60)])
    for e in small_table:
        assert interpolate_c_tilde(sparse, e.spin) <= e.c_tilde + 1e-15


@given(st.floats(0.5, 30.0), st.floats(0.5, 30.0))
def test_interpolation_monotone(small_table, s1, s2):
    lo, hi = sorted((s1, s2))
    assert interpolate_c_tilde(small_table, hi) <= interpolate_c_tilde(small_table, lo)


def test_largest_two_s_above(small_table):
    q = 0.5 * (small_table.lookup(30).c_tilde + small_table.lookup(31).c_tilde)
    assert largest_two_s_above(q, two_s_max=60) == 30
    assert largest_two_s_above(0.6) == 0
