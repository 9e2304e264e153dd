"""Two-mode Fock-basis states of N bosons and their nonlinear evolution.

A state of N bosons shared between modes ``a`` and ``b`` is stored as the
N+1 amplitudes of ``|N-r>_a |r>_b`` for r = 0..N.  The state prepared by a
50/50 beam splitter acting on ``|N>_a |0>_b`` has binomial amplitudes; the
two-mode Kerr Hamiltonian

    H = chi * (a†² a² + b†² b² + 2K a†a b†b + a†a + b†b)

is diagonal in this basis, so evolution only attaches the phase
``exp(-i * Omega(r) * t)`` with ``Omega(r) = chi[(N-r)² + r² + 2K r(N-r)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "TwoModeState",
    "ModelParams",
    "beam_splitter_state",
    "phase_exponent",
    "phase_exponents",
    "evolve",
    "reduce_phase",
]

TWO_PI = 2.0 * math.pi
# 2*pi - float(2*pi), the part of 2*pi lost when rounding to double
_TWO_PI_TAIL = 2.4492935982947064e-16
_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp split constant

NORM_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Interferometer parameters: boson number, nonlinearity, shape constant, time."""

    n_total: int
    chi: float = 1.0
    k_const: float = -1.0
    time: float = 0.0

    def __post_init__(self):
        if int(self.n_total) != self.n_total or self.n_total < 1:
            raise ValueError(f"n_total must be a positive integer, got {self.n_total!r}")
        object.__setattr__(self, "n_total", int(self.n_total))
        for name in ("chi", "k_const", "time"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def at(self, time):
        return ModelParams(self.n_total, self.chi, self.k_const, float(time))


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Pure N-boson two-mode state; ``amplitudes[r]`` multiplies ``|N-r>_a |r>_b``."""

    n_total: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size != self.n_total + 1:
            raise ValueError(
                f"expected {self.n_total + 1} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.sum(amps.real**2 + amps.imag**2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def spin(self):
        return self.n_total / 2

    def probabilities(self):
        return self.amplitudes.real**2 + self.amplitudes.imag**2


def beam_splitter_state(n_total: int) -> TwoModeState:
    """Output of a 50/50 beam splitter fed with ``|N>_a |0>_b``.

    Amplitudes are ``sqrt(N! / (2^N r! (N-r)!))``, built from log-gamma so
    nothing overflows for large N; far tails underflow to zero.
    """
    if int(n_total) != n_total or n_total < 1:
        raise ValueError("n_total must be a positive integer (N = 0 has no spin)")
    n = int(n_total)
    r = np.arange(n + 1)
    log_c2 = gammaln(n + 1) - gammaln(r + 1) - gammaln(n - r + 1) - n * math.log(2.0)
    amps = np.exp(0.5 * log_c2)
    # renormalize away the O(eps) drift of the log-space construction
    amps /= math.sqrt(math.fsum(amps * amps))
    return TwoModeState(n, amps.astype(complex))


def _integer_valued(x):
    return float(x).is_integer()


def phase_exponents(params: ModelParams) -> np.ndarray:
    """``Omega(r)`` for every r = 0..N as a float array."""
    n = params.n_total
    r = np.arange(n + 1, dtype=np.int64)
    squares = (n - r) ** 2 + r**2
    cross = 2 * r * (n - r)
    if _integer_valued(params.k_const) and _integer_valued(params.chi):
        # exact while chi*N^2*(1+|K|) stays below 2**53
        omega = int(params.chi) * (squares + int(params.k_const) * cross)
        return omega.astype(np.float64)
    return params.chi * (squares + params.k_const * cross).astype(np.float64)


def phase_exponent(params: ModelParams, r: int) -> float:
    """``Omega(r) = chi[(N-r)^2 + r^2 + 2K r (N-r)]`` for a single occupation."""
    n = params.n_total
    if int(r) != r or not 0 <= r <= n:
        raise ValueError(f"occupation index must lie in [0, {n}], got {r!r}")
    r = int(r)
    if _integer_valued(params.k_const) and _integer_valued(params.chi):
        return float(int(params.chi) * ((n - r) ** 2 + r**2 + 2 * int(params.k_const) * r * (n - r)))
    return params.chi * ((n - r) ** 2 + r**2 + 2 * params.k_const * r * (n - r))


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    """Error-free product: ``a*b == p + e`` exactly (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def reduce_phase(omega, t):
    """``omega * t`` reduced to [-pi, pi] with a compensated product.

    The product is carried as an unevaluated double-double sum and the
    multiple of 2*pi is removed in two pieces, so the result stays accurate
    to ~1e-15 absolute even when ``omega * t`` is of order 1e8.
    """
    omega = np.asarray(omega, dtype=np.float64)
    p, e = _two_prod(omega, np.float64(t))
    k = np.rint(p / TWO_PI)
    q, qe = _two_prod(k, TWO_PI)
    return ((p - q) + (e - qe)) - k * _TWO_PI_TAIL


def evolve(state: TwoModeState, params: ModelParams) -> TwoModeState:
    """Apply ``exp(-i H t)``: amplitude r picks up ``exp(-i Omega(r) t)``."""
    if state.n_total != params.n_total:
        raise ValueError("state and params disagree on n_total")
    if params.time == 0.0:
        return state
    phase = reduce_phase(phase_exponents(params), params.time)
    return TwoModeState(state.n_total, state.amplitudes * np.exp(-1j * phase))
