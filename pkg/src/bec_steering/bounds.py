"""Lower bounds on planar spin variances for pure spin-S states.

Two quantities are tabulated as functions of the spin S:

``c_s``
    ``min (dS_x)^2 + (dS_y)^2`` over all spin-S states, with the normalized
    form ``c_tilde = c_s / S``.
``zeta2``
    ``min [(dS_x)^2 + (dS_y)^2] / |<S_par>|``, the smallest planar
    squeezing ratio, with ``S_par`` the in-plane mean spin.

Both reduce to one-dimensional problems.  Rotating so that the mean spin
lies along x, write ``A = S_x^2 + S_y^2 = S(S+1) - S_z^2`` and use
``-x^2 = min_mu (mu^2 - 2 mu x)``:

    c_s = min_mu [ mu^2 + lambda_min(A - 2 mu S_x) ]

The inner eigenproblem is tridiagonal in the S_z basis.  The outer
minimum sits where the ground state is self-consistent, ``<S_x> = mu``,
which is located by scanning mu and polishing sign changes of
``mu - <S_x>`` with Brent's method.  ``zeta2`` adds the Dinkelbach
parameter ``eta`` to the field (``A - (2 mu + eta) S_x``) and iterates
``eta`` to the achieved ratio.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq, minimize_scalar

from .exceptions import ConvergenceError

__all__ = [
    "SolverSettings",
    "BoundSolution",
    "BoundEntry",
    "BoundTable",
    "REFERENCE_ROWS",
    "reference_table",
    "solve_c_s",
    "solve_c_s_detailed",
    "solve_zeta2",
    "solve_zeta2_detailed",
    "asymptotic_check",
    "interpolate_c_tilde",
    "largest_two_s_above",
    "build_table",
    "two_s_of",
]

# (2S, c_tilde) calibration rows used for the depth round-trip
REFERENCE_ROWS = (
    (21, 0.1952),
    (42, 0.1581),
    (87, 0.1262),
    (223, 0.0938),
    (456, 0.07459),
    (4772, 0.034776),
)


@dataclass(frozen=True)
class SolverSettings:
    """Knobs of the bound solvers; part of the table cache key."""

    mu_grid_points: int = 21
    mu_xtol: float = 1e-13
    ratio_tol: float = 1e-10
    max_iter: int = 100

    def key(self):
        return json.dumps(asdict(self), sort_keys=True)


def two_s_of(spin_s) -> int:
    """Validate a half-integer spin and return ``2S``."""
    two_s = 2 * float(spin_s)
    if not math.isfinite(two_s) or two_s < 1 or abs(two_s - round(two_s)) > 1e-9:
        raise ValueError(f"spin must be a positive half-integer, got {spin_s!r}")
    return int(round(two_s))


class _SpinChain:
    """Tridiagonal pieces of ``A - field * S_x`` for a fixed spin."""

    def __init__(self, two_s: int):
        self.two_s = two_s
        s = two_s / 2
        self.spin = s
        m = s - np.arange(two_s + 1, dtype=np.float64)
        self.m2 = m * m
        # <m-1| S_x |m> for m = S .. -S+1
        self.sx_offdiag = 0.5 * np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] - 1))
        self.diag = s * (s + 1) - self.m2

    def ground(self, field_strength):
        """Ground energy, ``<A>``, ``<S_x>`` and the (real) ground vector."""
        off = -field_strength * self.sx_offdiag
        if self.two_s == 0:
            return self.diag[0], self.diag[0], 0.0, np.ones(1)
        w, v = eigh_tridiagonal(self.diag, off, select="i", select_range=(0, 0))
        vec = v[:, 0]
        sx = 2.0 * float(np.dot(vec[:-1] * vec[1:], self.sx_offdiag))
        a = float(np.dot(vec * vec, self.diag))
        return float(w[0]), a, sx, vec

    def residual(self, field_strength, vec, energy):
        off = -field_strength * self.sx_offdiag
        hv = self.diag * vec
        hv[:-1] += off * vec[1:]
        hv[1:] += off * vec[:-1]
        return float(np.linalg.norm(hv - energy * vec)) / max(1.0, abs(energy))


@dataclass(frozen=True)
class BoundSolution:
    """A solved bound together with the certificate data."""

    two_s: int
    value: float
    mu: float
    mean_sx: float
    second_a: float
    state: np.ndarray = field(repr=False)
    eigen_residual: float = 0.0
    iterations: int = 0

    @property
    def spin(self):
        return self.two_s / 2


def _minimize_shifted(chain: _SpinChain, eta: float, settings: SolverSettings):
    """``min_psi <A> - <S_x>^2 - eta <S_x>`` and its minimizer.

    Returns ``(objective, mu, energy, a, sx, vec)`` at the best
    self-consistent point found on the mu scan.
    """
    s = chain.spin

    def at(mu):
        return chain.ground(2.0 * mu + eta)

    def resid(mu):
        return mu - at(mu)[2]

    hi = 1.05 * s
    grid = np.linspace(hi / settings.mu_grid_points, hi, settings.mu_grid_points)
    res = np.array([resid(mu) for mu in grid])
    candidates = []
    for i in range(len(grid) - 1):
        if res[i] < 0 <= res[i + 1]:
            mu = brentq(resid, grid[i], grid[i + 1], xtol=settings.mu_xtol * max(1.0, s),
                        rtol=4 * np.finfo(float).eps, maxiter=settings.max_iter)
            candidates.append(mu)
    if res[0] >= 0:
        # self-consistency may already hold below the first grid point
        tiny = 1e-15 * max(1.0, s)
        if resid(tiny) < 0:
            candidates.append(brentq(resid, tiny, grid[0],
                                     xtol=settings.mu_xtol * max(1.0, s), maxiter=settings.max_iter))
    if not candidates:
        # no sign change on the scan: minimize the outer function directly
        def outer(mu):
            energy = at(mu)[0]
            return mu * mu + energy
        opt = minimize_scalar(outer, bounds=(0.0, hi), method="bounded",
                              options={"xatol": settings.mu_xtol * max(1.0, s)})
        if not opt.success:
            raise ConvergenceError(f"no self-consistent field found for 2S={chain.two_s}",
                                   best=float(opt.fun))
        candidates.append(float(opt.x))

    best = None
    for mu in candidates:
        energy, a, sx, vec = at(mu)
        objective = a - sx * sx - eta * sx
        if best is None or objective < best[0]:
            best = (objective, mu, energy, a, sx, vec)
    return best


def solve_c_s_detailed(spin_s, settings: SolverSettings | None = None) -> BoundSolution:
    """Minimal ``(dS_x)^2 + (dS_y)^2`` at spin ``spin_s`` with its minimizing state."""
    settings = settings or SolverSettings()
    two_s = two_s_of(spin_s)
    chain = _SpinChain(two_s)
    objective, mu, energy, a, sx, vec = _minimize_shifted(chain, 0.0, settings)
    return BoundSolution(
        two_s=two_s,
        value=objective,
        mu=mu,
        mean_sx=sx,
        second_a=a,
        state=vec,
        eigen_residual=chain.residual(2.0 * mu, vec, energy),
    )


def solve_c_s(spin_s, settings: SolverSettings | None = None) -> float:
    """Minimal ``(dS_x)^2 + (dS_y)^2`` over pure spin-``spin_s`` states."""
    return solve_c_s_detailed(spin_s, settings).value


def solve_zeta2_detailed(spin_s, settings: SolverSettings | None = None) -> BoundSolution:
    """Minimal planar squeezing ratio by Dinkelbach iteration.

    Starts from the ratio achieved by the ``c_s`` minimizer, which is a
    feasible value, so the iterates decrease monotonically.
    """
    settings = settings or SolverSettings()
    two_s = two_s_of(spin_s)
    chain = _SpinChain(two_s)
    start = solve_c_s_detailed(spin_s, settings)
    eta = start.value / start.mean_sx
    best = start
    for it in range(1, settings.max_iter + 1):
        objective, mu, energy, a, sx, vec = _minimize_shifted(chain, eta, settings)
        ratio = (a - sx * sx) / sx
        best = BoundSolution(two_s, ratio, mu, sx, a, vec,
                             chain.residual(2.0 * mu + eta, vec, energy), it)
        if abs(ratio - eta) < settings.ratio_tol:
            return best
        eta = ratio
    raise ConvergenceError(f"ratio iteration did not settle for 2S={two_s}", best=best.value)


def solve_zeta2(spin_s, settings: SolverSettings | None = None) -> float:
    """Minimal ``[(dS_x)^2 + (dS_y)^2] / |<S_par>|`` over pure spin-``spin_s`` states."""
    return solve_zeta2_detailed(spin_s, settings).value


@dataclass(frozen=True)
class BoundEntry:
    two_s: int
    c_s: float
    c_tilde: float
    zeta2: float | None = None

    @property
    def spin(self):
        return self.two_s / 2


class BoundTable:
    """Calibration table ``2S -> (c_s, c_tilde, zeta2)`` sorted by spin.

    Construction checks ``c_tilde = c_s / S`` and that ``c_tilde`` (and
    ``zeta2`` where present) never increase with S.
    """

    def __init__(self, entries, provenance=None, check=True):
        entries = sorted(entries, key=lambda e: e.two_s)
        self.entries = tuple(entries)
        self.provenance = dict(provenance or {})
        if not entries:
            raise ValueError("bound table is empty")
        if check:
            self._validate()

    def _validate(self):
        prev = None
        for e in self.entries:
            if not math.isclose(e.c_tilde, e.c_s / e.spin, rel_tol=1e-9, abs_tol=1e-15):
                raise ValueError(f"c_tilde != c_s/S at 2S={e.two_s}")
            if prev is not None:
                if e.two_s == prev.two_s:
                    raise ValueError(f"duplicate entry 2S={e.two_s}")
                if e.c_tilde > prev.c_tilde:
                    raise ValueError(f"c_tilde increases between 2S={prev.two_s} and {e.two_s}")
                if e.zeta2 is not None and prev.zeta2 is not None and e.zeta2 > prev.zeta2 + 1e-12:
                    raise ValueError(f"zeta2 increases between 2S={prev.two_s} and {e.two_s}")
            if e.zeta2 is not None and e.zeta2 > 0.5 + 1e-12:
                raise ValueError(f"zeta2 above 1/2 at 2S={e.two_s}")
            prev = e

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def two_s(self):
        return np.array([e.two_s for e in self.entries])

    @property
    def spins(self):
        return self.two_s / 2

    @property
    def c_tilde(self):
        return np.array([e.c_tilde for e in self.entries])

    @property
    def has_zeta2(self):
        return all(e.zeta2 is not None for e in self.entries)

    @property
    def zeta2(self):
        if not self.has_zeta2:
            raise ValueError("table has no zeta2 column")
        return np.array([e.zeta2 for e in self.entries])

    def lookup(self, two_s):
        for e in self.entries:
            if e.two_s == two_s:
                return e
        raise KeyError(two_s)

    # serialization -------------------------------------------------------

    COLUMNS = ("two_s", "c_s", "c_tilde", "zeta2")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for e in self.entries:
            w.writerow([e.two_s, repr(e.c_s), repr(e.c_tilde), "" if e.zeta2 is None else repr(e.zeta2)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance=None):
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        reader = csv.DictReader(lines)
        if reader.fieldnames is None or list(reader.fieldnames[:3]) != list(cls.COLUMNS[:3]):
            raise ValueError(f"bound table CSV needs columns {','.join(cls.COLUMNS)}")
        entries = []
        for row in reader:
            z = row.get("zeta2") or ""
            entries.append(BoundEntry(int(row["two_s"]), float(row["c_s"]),
                                      float(row["c_tilde"]), float(z) if z.strip() else None))
        return cls(entries, provenance)

    def to_json(self) -> str:
        return json.dumps(
            {"provenance": self.provenance, "entries": [asdict(e) for e in self.entries]},
            indent=2, sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str):
        data = json.loads(text)
        entries = [BoundEntry(**e) for e in data["entries"]]
        return cls(entries, data.get("provenance"))

    @classmethod
    def load(cls, path):
        path = Path(path)
        text = path.read_text()
        if path.suffix.lower() == ".json":
            return cls.from_json(text)
        return cls.from_csv(text, {"source": str(path)})

    def save(self, path):
        path = Path(path)
        text = self.to_json() if path.suffix.lower() == ".json" else self.to_csv()
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)


def reference_table() -> BoundTable:
    """Table built from :data:`REFERENCE_ROWS` (c_s reconstructed as c_tilde * S)."""
    entries = [BoundEntry(t, c * t / 2, c) for t, c in REFERENCE_ROWS]
    return BoundTable(entries, {"source": "reference rows"})


def asymptotic_check(table: BoundTable) -> float:
    """Log-log slope of ``c_s`` against S over the top decade of the table.

    Requires at least two decades of S, reaching S >= 100.
    """
    spins = table.spins
    c_s = np.array([e.c_s for e in table.entries])
    if len(spins) < 3 or spins.max() / spins.min() < 100 or spins.max() < 100:
        raise ValueError("need entries spanning two decades of S up to S >= 100")
    top = spins >= spins.max() / 10
    if top.sum() < 2:
        raise ValueError("need at least two entries in the top decade")
    slope, _ = np.polyfit(np.log(spins[top]), np.log(c_s[top]), 1)
    return float(slope)


def interpolate_c_tilde(table: BoundTable, spin_s) -> float:
    """``c_tilde`` at ``spin_s`` by linear interpolation in log-log space.

    Exact at tabulated spins and monotone between them.  Where log c_tilde
    is concave in log S (as it is for the solved curve) the chord lies
    below the curve, so interpolated values under-certify depth.
    """
    s = float(spin_s)
    spins = table.spins
    if not spins[0] <= s <= spins[-1]:
        raise ValueError(f"S={s} outside table range [{spins[0]}, {spins[-1]}]")
    ct = table.c_tilde
    hit = np.nonzero(spins == s)[0]
    if hit.size:
        return float(ct[hit[0]])
    return float(np.exp(np.interp(np.log(s), np.log(spins), np.log(ct))))


def largest_two_s_above(threshold, two_s_max=40000, settings: SolverSettings | None = None):
    """Largest ``2S`` whose solved ``c_tilde`` still exceeds ``threshold``.

    Bisection over integers using exact solves; relies on ``c_tilde``
    decreasing in S.  Returns 0 when even 2S = 1 fails.
    """
    settings = settings or SolverSettings()

    def ct(two_s):
        return solve_c_s(two_s / 2, settings) / (two_s / 2)

    if ct(1) <= threshold:
        return 0
    lo, hi = 1, int(two_s_max)
    if ct(hi) > threshold:
        raise ValueError(f"c_tilde still above {threshold} at 2S={hi}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ct(mid) > threshold:
            lo = mid
        else:
            hi = mid
    return lo


def _solve_entry(args):
    two_s, settings, with_zeta2 = args
    sol = solve_c_s_detailed(two_s / 2, settings)
    z = solve_zeta2(two_s / 2, settings) if with_zeta2 else None
    return BoundEntry(two_s, sol.value, sol.value / (two_s / 2), z)


def _cache_key(two_s_values, settings, with_zeta2):
    payload = json.dumps({"grid": list(two_s_values), "settings": settings.key(),
                          "zeta2": bool(with_zeta2)}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def build_table(two_s_values, settings: SolverSettings | None = None, with_zeta2=False,
                workers: int = 1, cache_dir=None) -> BoundTable:
    """Solve every ``2S`` in ``two_s_values`` and assemble a :class:`BoundTable`.

    With ``cache_dir`` the table is stored as JSON under a hash of the grid
    and settings and reused on later calls.
    """
    settings = settings or SolverSettings()
    grid = sorted({int(v) for v in two_s_values})
    if not grid or grid[0] < 1:
        raise ValueError("2S values must be positive integers")
    cache_path = None
    if cache_dir is not None:
        cache_path = Path(cache_dir) / f"bounds-{_cache_key(grid, settings, with_zeta2)}.json"
        if cache_path.exists():
            return BoundTable.from_json(cache_path.read_text())
    jobs = [(t, settings, with_zeta2) for t in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_solve_entry, jobs))
    else:
        entries = [_solve_entry(j) for j in jobs]
    provenance = {"solver": "self-consistent tridiagonal", "settings": asdict(settings),
                  "two_s_grid": grid, "zeta2": bool(with_zeta2)}
    table = BoundTable(entries, provenance)
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        table.save(cache_path)
    return table
