"""Spin and bosonic moments of a two-mode state.

Schwinger spins are built from the two modes as

    S_x = (a†b + ab†)/2,   S_y = (a†b - ab†)/(2i),   S_z = (a†a - b†b)/2

so the total spin is S = N/2.  Every moment below is a single O(N) pass
over products of neighbouring (or next-neighbouring) Fock amplitudes.
``dense_oracle_moments`` recomputes the same record from explicit
(N+1)x(N+1) operator matrices and is meant for testing only.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .exceptions import ConsistencyError
from .fock import TwoModeState

__all__ = [
    "SpinMoments",
    "moments_from_state",
    "dense_oracle_moments",
    "variance",
    "covariance",
    "second_moment_scale",
    "total_spin_residual",
    "DENSE_ORACLE_MAX_N",
]

DENSE_ORACLE_MAX_N = 50

# variances in (-CLAMP_TOL, 0) are treated as rounding noise and clamped to 0;
# anything below -FLAG_TOL * scale means the moments are inconsistent
CLAMP_TOL = 1e-12
FLAG_TOL = 1e-9


@dataclass(frozen=True)
class SpinMoments:
    """First and second spin moments together with the bosonic moments they come from.

    ``anti_yz``, ``anti_xy`` and ``anti_xz`` are halves of the
    anticommutator expectations, e.g. ``anti_yz = <{S_y, S_z}>/2``, so that
    they play the role of symmetrized second moments.  ``f_value`` is the
    purely mixed combination ``F = 4i * anti_yz`` assembled from the
    quartic bosonic moments, and ``c_value = second_zz - second_yy``.
    """

    n_total: int
    mean_sx: float
    mean_sy: float
    mean_sz: float
    second_xx: float
    second_yy: float
    second_zz: float
    anti_yz: float
    anti_xy: float
    anti_xz: float
    f_value: complex
    c_value: float
    mean_ab: complex
    mean_na: float
    mean_nanb: float

    @property
    def spin(self):
        return self.n_total / 2

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _mixed_moments(psi, n):
    """The quartic/quadratic bosonic moments that build ``F``.

    With ``P_k = psi_k* psi_{k+1} sqrt((k+1)(N-k))`` (one boson hops from
    b to a), each moment is a weighted sum of ``P_k``.
    """
    k = np.arange(n, dtype=np.float64)
    hop = np.conj(psi[:-1]) * psi[1:] * np.sqrt((k + 1.0) * (n - k))
    mean_ab = hop.sum()                              # <a† b>
    a2ab = np.sum(hop * (n - k - 1.0))               # <a†² a b>
    aa2b = np.conj(a2ab)                             # <a† a² b†>
    nb_abd = np.conj(np.sum(hop * (k + 1.0)))        # <b†b a b†>
    nb_adb = np.sum(hop * k)                         # <b†b a† b>
    return mean_ab, a2ab, aa2b, nb_abd, nb_adb


def moments_from_state(state: TwoModeState) -> SpinMoments:
    """All spin moments of ``state`` from explicit Fock-basis sums."""
    n = state.n_total
    psi = state.amplitudes
    prob = state.probabilities()
    r = np.arange(n + 1, dtype=np.float64)
    n_b = r
    n_a = n - r

    mean_ab, a2ab, aa2b, nb_abd, nb_adb = _mixed_moments(psi, n)
    # <a†² b²>: two bosons hop from b to a
    if n >= 2:
        rr = r[2:]
        pair = np.sum(
            np.conj(psi[:-2]) * psi[2:] * np.sqrt(rr * (rr - 1) * (n - rr + 1) * (n - rr + 2))
        )
    else:
        pair = 0.0j

    mean_na = float(np.dot(prob, n_a))
    mean_nb = float(np.dot(prob, n_b))
    mean_nanb = float(np.dot(prob, n_a * n_b))
    mean_diff2 = float(np.dot(prob, (n_a - n_b) ** 2))

    # F = <a†²ab> - <ab†> - <a†a²b†> + <b†b ab†> - <b†b a†b>
    f_value = complex(a2ab - np.conj(mean_ab) - aa2b + nb_abd - nb_adb)
    # <{a†b, S_z}> = <a†²ab> - <b†b a†b>: the hop weights (N-k-1) - k
    # collect into sum_k P_k (N - 2k - 1)
    x_sz = a2ab - nb_adb

    second_zz = mean_diff2 / 4
    second_xx = 0.5 * pair.real + 0.25 * (2 * mean_nanb + n)
    second_yy = -0.5 * pair.real + 0.25 * (2 * mean_nanb + n)

    return SpinMoments(
        n_total=n,
        mean_sx=float(mean_ab.real),
        mean_sy=float(mean_ab.imag),
        mean_sz=(mean_na - mean_nb) / 2,
        second_xx=float(second_xx),
        second_yy=float(second_yy),
        second_zz=float(second_zz),
        anti_yz=float(x_sz.imag) / 2,
        anti_xy=float(pair.imag) / 2,
        anti_xz=float(x_sz.real) / 2,
        f_value=f_value,
        c_value=float(second_zz) - float(second_yy),
        mean_ab=complex(mean_ab),
        mean_na=mean_na,
        mean_nanb=mean_nanb,
    )


def _ladder(n):
    """Matrix of a†b in the basis r = 0..N (r bosons in mode b)."""
    r = np.arange(1, n + 1, dtype=np.float64)
    return np.diag(np.sqrt(r * (n - r + 1)), k=1).astype(complex)


def dense_oracle_moments(state: TwoModeState) -> SpinMoments:
    """Same record as :func:`moments_from_state`, from dense operator matrices."""
    n = state.n_total
    if n > DENSE_ORACLE_MAX_N:
        raise ValueError(f"dense oracle is limited to N <= {DENSE_ORACLE_MAX_N}")
    psi = np.asarray(state.amplitudes, dtype=complex)
    adag_b = _ladder(n)
    a_bdag = adag_b.conj().T
    occ_b = np.diag(np.arange(n + 1, dtype=np.float64)).astype(complex)
    occ_a = n * np.eye(n + 1) - occ_b
    sx = (adag_b + a_bdag) / 2
    sy = (adag_b - a_bdag) / 2j
    sz = (occ_a - occ_b) / 2

    def ev(op):
        return complex(np.vdot(psi, op @ psi))

    f_op = adag_b @ occ_a - a_bdag - occ_a @ a_bdag + occ_b @ a_bdag - occ_b @ adag_b
    second_yy = ev(sy @ sy).real
    second_zz = ev(sz @ sz).real
    return SpinMoments(
        n_total=n,
        mean_sx=ev(sx).real,
        mean_sy=ev(sy).real,
        mean_sz=ev(sz).real,
        second_xx=ev(sx @ sx).real,
        second_yy=second_yy,
        second_zz=second_zz,
        anti_yz=ev(sy @ sz + sz @ sy).real / 2,
        anti_xy=ev(sx @ sy + sy @ sx).real / 2,
        anti_xz=ev(sx @ sz + sz @ sx).real / 2,
        f_value=ev(f_op),
        c_value=second_zz - second_yy,
        mean_ab=ev(adag_b),
        mean_na=ev(occ_a).real,
        mean_nanb=ev(occ_a @ occ_b).real,
    )


_AXES = {
    "x": ("mean_sx", "second_xx"),
    "y": ("mean_sy", "second_yy"),
    "z": ("mean_sz", "second_zz"),
}


def second_moment_scale(n_total):
    """Natural size of a second spin moment, used to normalize comparisons."""
    return max(1.0, n_total * n_total / 4)


def _checked_variance(second, mean, label):
    var = second - mean * mean
    if var < -FLAG_TOL * max(1.0, abs(second)):
        raise ConsistencyError(f"negative variance for {label}: {var!r}")
    return max(var, 0.0) if var < CLAMP_TOL else var


def variance(moments: SpinMoments, axis: str) -> float:
    """``<S_i^2> - <S_i>^2`` for ``axis`` in {'x', 'y', 'z'}.

    Tiny negative values from cancellation are clamped to zero; a clearly
    negative result raises :class:`ConsistencyError`.
    """
    try:
        mean_name, second_name = _AXES[axis]
    except KeyError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None
    mean = getattr(moments, mean_name)
    second = getattr(moments, second_name)
    return _checked_variance(second, mean, f"S_{axis}")


def covariance(moments: SpinMoments) -> np.ndarray:
    """Symmetrized 3x3 covariance matrix of (S_x, S_y, S_z)."""
    m = np.array([moments.mean_sx, moments.mean_sy, moments.mean_sz])
    second = np.array(
        [
            [moments.second_xx, moments.anti_xy, moments.anti_xz],
            [moments.anti_xy, moments.second_yy, moments.anti_yz],
            [moments.anti_xz, moments.anti_yz, moments.second_zz],
        ]
    )
    return second - np.outer(m, m)


def total_spin_residual(moments: SpinMoments) -> float:
    """Relative departure of ``<S_x^2 + S_y^2 + S_z^2>`` from S(S+1)."""
    s = moments.spin
    total = moments.second_xx + moments.second_yy + moments.second_zz
    return abs(total - s * (s + 1)) / (s * (s + 1))

