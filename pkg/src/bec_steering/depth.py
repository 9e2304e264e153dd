"""Certified lower bounds on the number of particles in an entangled or steerable pair.

Given a measured Hillery-Zubairy value ``E`` and normalized Bloch length
``r``, the state contains a two-mode entangled (or steerable) component of
at least ``2 s0`` particles, where ``s0`` is the largest spin whose bound
still exceeds the measured ratio:

    entanglement:   E / r < c_tilde(s0),                       gate E < 1
    steering:       E / r < c_tilde(s0), r c_tilde(s0) < 1/2,   gate E < 1/2
    planar (PQS):   E / r_par < zeta2(s0),                     gate E / r_par < 1/2

When the gate passes but no tabulated spin qualifies, the minimal depth
``s0 = 1/2`` is returned.  A failed gate returns ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundTable

__all__ = [
    "DepthResult",
    "infer_depth_entanglement",
    "infer_depth_steering",
    "infer_depth_pqs",
]

KINDS = ("entanglement", "steering", "steering_pqs")


@dataclass(frozen=True)
class DepthResult:
    s0: float
    n_lower_bound: int
    kind: str
    margin: float
    inputs_echo: dict = field(default_factory=dict)

    def as_dict(self):
        return {"s0": self.s0, "n_lower_bound": self.n_lower_bound, "kind": self.kind,
                "margin": self.margin, "inputs_echo": dict(self.inputs_echo)}


def _check_inputs(value, length, length_name):
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"measured parameter must be a finite non-negative number, got {value!r}")
    if not math.isfinite(length) or length <= 0:
        raise ValueError(f"{length_name} must be positive, got {length!r}")
    if length > 1 + 1e-12:
        raise ValueError(f"{length_name} is a normalized length and cannot exceed 1, got {length!r}")


def _interp_loglog(two_s, nodes_two_s, nodes_val):
    return float(np.exp(np.interp(np.log(two_s), np.log(nodes_two_s), np.log(nodes_val))))


def _largest_spin_above(two_s_nodes, values, threshold, interpolate, allowed=None):
    """Largest ``2S`` whose (interpolated) bound exceeds ``threshold``.

    ``allowed`` is an extra predicate on the bound value.  Between nodes the
    bound is interpolated linearly in log-log space and the search rounds
    down to the last qualifying half-integer spin.
    """
    allowed = allowed or (lambda v: True)
    ok = [i for i, v in enumerate(values) if v > threshold and allowed(v)]
    if not ok:
        return None
    i = max(ok)
    best = int(two_s_nodes[i])
    if not interpolate or i + 1 >= len(values):
        return best, float(values[i])
    lo, hi = best, int(two_s_nodes[i + 1])

    def good(t):
        v = _interp_loglog(t, two_s_nodes, values)
        return v > threshold and allowed(v)

    # the interpolant is monotone, so bisect for the last qualifying 2S
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo, _interp_loglog(lo, two_s_nodes, values)


def _result(found, kind, ratio, gate_margin, echo):
    if found is None:
        return DepthResult(0.5, 1, kind, gate_margin, echo)
    two_s, bound = found
    return DepthResult(two_s / 2, int(two_s), kind, bound - ratio, echo)


def infer_depth_entanglement(e_hz, r, table: BoundTable, interpolate=True):
    """Entanglement depth from ``E_HZ`` and the Bloch length ``r``; ``None`` unless ``E_HZ < 1``."""
    _check_inputs(e_hz, r, "r")
    ratio = e_hz / r
    echo = {"e_hz": e_hz, "r": r}
    if e_hz >= 1.0:
        return None
    found = _largest_spin_above(table.two_s, table.c_tilde, ratio, interpolate)
    return _result(found, "entanglement", ratio, 1.0 - e_hz, echo)


def infer_depth_steering(e_hz, r, table: BoundTable, interpolate=True):
    """Steering depth from ``E_HZ`` and ``r``; ``None`` unless ``E_HZ < 1/2``."""
    _check_inputs(e_hz, r, "r")
    ratio = e_hz / r
    echo = {"e_hz": e_hz, "r": r}
    if e_hz >= 0.5:
        return None
    found = _largest_spin_above(table.two_s, table.c_tilde, ratio, interpolate,
                                allowed=lambda v: r * v < 0.5)
    return _result(found, "steering", ratio, 0.5 - e_hz, echo)


def infer_depth_pqs(e_hz_yz, r_parallel, table: BoundTable, interpolate=True):
    """Steering depth from planar squeezing: ``E / r_par`` against ``zeta2``."""
    _check_inputs(e_hz_yz, r_parallel, "r_parallel")
    if not table.has_zeta2:
        raise ValueError("bound table has no zeta2 column")
    ratio = e_hz_yz / r_parallel
    echo = {"e_hz_yz": e_hz_yz, "r_parallel": r_parallel}
    if ratio >= 0.5:
        return None
    found = _largest_spin_above(table.two_s, table.zeta2, ratio, interpolate)
    return _result(found, "steering_pqs", ratio, 0.5 - ratio, echo)
