"""Mean-field trap stability: generalized Mathieu equation and spin-motion EOMs.

The reduced equation of motion for small kz is

    z'' + [r + 2 q cos(2 tau) - r cos(2 eta tau)] z = 0,   tau = omega t / 2,

with q = V_SAW/E_S, r = Omega0^2/(4 E_S |Delta|), eta = |Delta|/omega and
E_S = m (omega/k)^2 / 2.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .units import HBAR_UEV_S, M_ELECTRON, UEV

STABILITY_TOL = 1e-6
LYAPUNOV_THRESHOLD = 1e-3
MAX_DENOMINATOR = 100


class StabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class StabilityParams:
    q: float
    r: float
    eta: float

    def __post_init__(self):
        if self.q < 0 or self.r < 0:
            raise ValueError("q and r must be >= 0")
        if not self.eta > 0:
            raise ValueError("eta must be > 0")

    def to_dict(self):
        return asdict(self)


def saw_energy(m, omega, k):
    """E_S = m (omega/k)^2 / 2 in ueV (m in m0, omega in rad/s, k in 1/m)."""
    if not (m > 0 and omega > 0 and k > 0):
        raise ValueError("m, omega and k must be positive")
    return 0.5 * m * M_ELECTRON * (omega / k) ** 2 / UEV


def derive_params(rabi, delta, v_saw, m, omega, k) -> StabilityParams:
    """(q, r, eta) from energies in ueV, m in m0, omega in rad/s and k in 1/m."""
    if delta == 0:
        raise ValueError("Delta = 0 leaves r undefined; use a finite detuning "
                         "(the reduced equation assumes |Delta| >> Omega0)")
    e_s = saw_energy(m, omega, k)
    hw = HBAR_UEV_S * omega
    return StabilityParams(q=v_saw / e_s, r=rabi ** 2 / (4 * e_s * abs(delta)), eta=abs(delta) / hw)


def common_period(p: StabilityParams):
    """Period pi p' of the coefficient for rational eta = p/p' (else None)."""
    if p.r == 0:
        return math.pi
    frac = Fraction(p.eta).limit_denominator(MAX_DENOMINATOR)
    if abs(float(frac) - p.eta) > 1e-9:
        return None
    return math.pi * frac.denominator


def _omega2(tau, q, r, eta):
    return r + 2 * q * np.cos(2 * tau) - r * np.cos(2 * eta * tau)


def _linear_rhs(q, r, eta):
    def rhs(tau, y):
        # y = [z1, z2, p1, p2] stacked over points
        n = len(q)
        z = y[:2 * n].reshape(2, n)
        p = y[2 * n:].reshape(2, n)
        w2 = _omega2(tau, q, r, eta)
        return np.concatenate([p.ravel(), (-w2 * z).ravel()])
    return rhs


def _propagate(q, r, eta, z, p, t0, t1, tol):
    n = len(q)
    y0 = np.concatenate([z.ravel(), p.ravel()])
    sol = solve_ivp(_linear_rhs(q, r, eta), (t0, t1), y0, method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise StabilityError(sol.message)
    y = sol.y[:, -1]
    return y[:2 * n].reshape(2, n), y[2 * n:].reshape(2, n)


def _chunk_matrices(q, r, eta, t0, t1, tol):
    n = len(q)
    z = np.stack([np.ones(n), np.zeros(n)])
    p = np.stack([np.zeros(n), np.ones(n)])
    z, p = _propagate(q, r, eta, z, p, t0, t1, tol)
    M = np.empty((n, 2, 2))
    M[:, 0, 0], M[:, 0, 1] = z[0], z[1]
    M[:, 1, 0], M[:, 1, 1] = p[0], p[1]
    return M


def monodromy(q, r, eta, period=None, tol=1e-12, return_det=False):
    """Monodromy matrices (n, 2, 2) over one common period, batched over points.

    The period is composed of pi-long chunks, each started from the identity.
    With ``return_det`` the determinant is also returned as the product of the
    chunk determinants: each chunk is well conditioned, so this isolates the
    integration error from the cancellation in ad - bc of a strongly growing M.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    r = np.broadcast_to(np.asarray(r, dtype=float), q.shape).copy()
    if period is None:
        period = common_period(StabilityParams(0.0, float(r.max()), eta))
        if period is None:
            raise ValueError("eta is not rational within tolerance; use the Lyapunov method")
    n_chunks = max(1, int(round(period / math.pi)))
    edges = np.linspace(0.0, period, n_chunks + 1)
    M = np.broadcast_to(np.eye(2), (len(q), 2, 2)).copy()
    det = np.ones(len(q))
    for t0, t1 in zip(edges[:-1], edges[1:]):
        step = _chunk_matrices(q, r, eta, t0, t1, tol)
        M = step @ M
        det *= np.linalg.det(step)
    return (M, det) if return_det else M


def spectral_radius(M) -> np.ndarray:
    return np.max(np.abs(np.linalg.eigvals(M)), axis=-1)


def lyapunov_exponent(q, r, eta, tau_max=1e4, tol=1e-10):
    """Largest growth rate per pi of tau, Benettin-style with QR every period.

    Returns the slope of the accumulated log-stretch versus period count.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    r = np.broadcast_to(np.asarray(r, dtype=float), q.shape).copy()
    n = len(q)
    n_per = int(round(tau_max / math.pi))
    z = np.stack([np.ones(n), np.zeros(n)])
    p = np.stack([np.zeros(n), np.ones(n)])
    acc = np.zeros((n_per, n))
    total = np.zeros(n)
    for k in range(n_per):
        z, p = _propagate(q, r, eta, z, p, k * math.pi, (k + 1) * math.pi, tol)
        # tangent vectors as columns of a (n, 2, 2) matrix
        T = np.stack([np.stack([z[0], p[0]], -1), np.stack([z[1], p[1]], -1)], -1)
        Q, R = np.linalg.qr(T)
        total += np.log(np.abs(R[:, 0, 0]))
        acc[k] = total
        z = np.stack([Q[:, 0, 0], Q[:, 0, 1]])
        p = np.stack([Q[:, 1, 0], Q[:, 1, 1]])
    k = np.arange(1, n_per + 1)
    slope = np.polyfit(k, acc, 1)[0]
    return slope


@dataclass(frozen=True)
class StabilityPoint:
    params: StabilityParams
    stable: bool
    growth: float     # spectral radius per common period, or Lyapunov rate per pi
    margin: float     # threshold - growth (positive = stable)
    method: str
    determinant: float | None = None

    def to_dict(self):
        d = asdict(self)
        d.update(d.pop("params"))
        return d


def classify_many(q, r, eta, method="auto", tau_max=1e4, period=None) -> list[StabilityPoint]:
    """Classify a batch of points; ``period`` overrides the common period of the batch."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    r = np.broadcast_to(np.asarray(r, dtype=float), q.shape).copy()
    if period is None:
        period = common_period(StabilityParams(0.0, float(r.max()), eta))
    if method == "auto":
        method = "monodromy" if period is not None else "lyapunov"
    out = []
    if method == "monodromy":
        if period is None:
            raise ValueError("monodromy needs a rational eta")
        M, det = monodromy(q, r, eta, period, return_det=True)
        rho = spectral_radius(M)
        for qi, ri, g, d in zip(q, r, rho, det):
            out.append(StabilityPoint(StabilityParams(qi, ri, eta), bool(g <= 1 + STABILITY_TOL),
                                      float(g), float(1 + STABILITY_TOL - g), "monodromy", float(d)))
    elif method == "lyapunov":
        lam = lyapunov_exponent(q, r, eta, tau_max)
        for qi, ri, g in zip(q, r, lam):
            out.append(StabilityPoint(StabilityParams(qi, ri, eta), bool(g < LYAPUNOV_THRESHOLD),
                                      float(g), float(LYAPUNOV_THRESHOLD - g), "lyapunov"))
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


def classify(q, r, eta, method="auto", tau_max=1e4) -> StabilityPoint:
    return classify_many([q], [r], eta, method, tau_max)[0]


def boundary_q(r=0.0, eta=0.1, lo=0.5, hi=1.0, tol=1e-4) -> float:
    """Bisect the stability edge in q between a stable ``lo`` and unstable ``hi``."""
    if not classify(lo, r, eta).stable or classify(hi, r, eta).stable:
        raise ValueError("bracket must go from stable to unstable")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if classify(mid, r, eta).stable:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- diagrams ------------------------------------------------------------

@dataclass
class StabilityDiagram:
    q: np.ndarray
    r: np.ndarray
    eta: float
    stable: np.ndarray    # (len(r), len(q))
    growth: np.ndarray
    method: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# units: dimensionless\n")
        buf.write("q,r,eta,stable,exponent\n")
        for i, r in enumerate(self.r):
            for j, q in enumerate(self.q):
                buf.write(f"{q:.10g},{r:.10g},{self.eta:.10g},{int(self.stable[i, j])},"
                          f"{self.growth[i, j]:.10g}\n")
        return buf.getvalue()

    def to_pgm(self) -> bytes:
        """Binary PGM, stable = white, r increasing upwards."""
        img = np.where(self.stable[::-1], 255, 0).astype(np.uint8)
        h, w = img.shape
        return f"P5\n{w} {h}\n255\n".encode() + img.tobytes()

    def stable_fraction(self) -> float:
        return float(self.stable.mean())


def diagram(q_range, r_range, eta=0.1, resolution=(41, 41), method="auto", tau_max=1e4,
            threads=None) -> StabilityDiagram:
    """Classify a (q, r) grid row by row.

    Each row of constant r is one batch over a period fixed for the whole
    diagram, so the result does not depend on ``threads``.
    """
    nq, nr = resolution
    if not all(map(math.isfinite, (*q_range, *r_range))):
        raise ValueError("ranges must be finite")
    qs = np.linspace(*q_range, nq)
    rs = np.linspace(*r_range, nr)
    period = common_period(StabilityParams(0.0, float(np.max(np.abs(rs))), eta))

    def row(r):
        return classify_many(qs, np.full(nq, r), eta, method, tau_max, period=period)

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(row, rs))
    else:
        rows = [row(r) for r in rs]
    stable = np.array([[p.stable for p in rw] for rw in rows])
    growth = np.array([[p.growth for p in rw] for rw in rows])
    return StabilityDiagram(qs, rs, eta, stable, growth, rows[0][0].method)


def mathieu_q0_oracle(r, eta):
    """Stability of z'' + r(1 - cos 2 eta tau) z = 0 via Mathieu characteristic values.

    In slow time s = eta tau this is y'' + (a - 2 q_M cos 2s) y = 0 with
    a = r/eta^2, q_M = r/(2 eta^2); stable iff a lies in (a_n, b_{n+1}).
    """
    from scipy.special import mathieu_a, mathieu_b
    a = r / eta ** 2
    qm = r / (2 * eta ** 2)
    if a < mathieu_a(0, qm):
        return False
    n = 0
    while True:
        lo, hi = mathieu_a(n, qm), mathieu_b(n + 1, qm)
        if lo <= a <= hi:
            return True
        if a < mathieu_a(n + 1, qm):
            return False
        n += 1


# --- mean-field spin/motion EOMs --------------------------------------------

@dataclass(frozen=True)
class MeanFieldState:
    z: float
    p: float
    sx: float = 0.0
    sy: float = 0.0
    sz: float = -1.0

    def __post_init__(self):
        if abs(math.sqrt(self.sx ** 2 + self.sy ** 2 + self.sz ** 2) - 1) > 1e-12:
            raise ValueError("spin vector must have unit norm")

    def array(self):
        return np.array([self.z, self.p, self.sx, self.sy, self.sz])


@dataclass
class MeanFieldTrajectory:
    tau: np.ndarray
    y: np.ndarray  # (5, n_t)

    @property
    def spin_norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.y[2:], axis=0) - 1)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# units: dimensionless (z = k z, tau = omega t / 2)\n")
        buf.write("tau,z,p,sx,sy,sz\n")
        for row in np.vstack([self.tau, self.y]).T:
            buf.write(",".join(f"{v:.12g}" for v in row) + "\n")
        return buf.getvalue()


def mean_field_rhs(params: StabilityParams, kappa, sign=1.0):
    """Decorrelated Heisenberg EOMs in tau = omega t / 2.

    kappa = Omega0/omega; the spin term in p' has prefactor
    Omega0/(2 E_S) = 2 eta r / kappa.  Arrays of shape (5, ...) are accepted.
    """
    q, r, eta = params.q, params.r, params.eta
    c_spin = 2 * eta * r / kappa if kappa > 0 else 0.0
    we = 2 * sign * eta

    def rhs(tau, y):
        y = y.reshape(5, -1)
        z, p, sx, sy, sz = y
        sn, cs = np.sin(z), np.cos(z)
        return np.concatenate([
            p,
            -2 * q * sn * math.cos(2 * tau) + c_spin * sn * sx,
            -we * sy,
            we * sx - kappa * cs * sz,
            kappa * cs * sy,
        ])
    return rhs


def integrate_mean_field(params: StabilityParams, kappa, state: MeanFieldState, tau_final,
                         sign=1.0, tol=1e-12, n_out=2001) -> MeanFieldTrajectory:
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    t_eval = np.linspace(0, tau_final, n_out)
    sol = solve_ivp(mean_field_rhs(params, kappa, sign), (0, tau_final), state.array(),
                    method="DOP853", rtol=tol, atol=tol, t_eval=t_eval)
    if not sol.success:
        raise StabilityError(sol.message)
    return MeanFieldTrajectory(sol.t, sol.y)


def mean_field_verdicts(q, r, eta, kappa, z0=1e-3, n_periods=100, growth_limit=20.0, tol=1e-10):
    """Stability from long mean-field runs started at small z (batched over points).

    A point is unstable if |z| ever exceeds ``growth_limit * z0`` within
    ``n_periods`` common periods (pi/eta each, or pi when r = 0).
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    r = np.broadcast_to(np.asarray(r, dtype=float), q.shape).copy()
    n = len(q)
    c_spin = 2 * eta * r / kappa
    we = 2 * eta

    def rhs(tau, y):
        z, p, sx, sy, sz = y.reshape(5, n)
        sn, cs = np.sin(z), np.cos(z)
        return np.concatenate([p, -2 * q * sn * math.cos(2 * tau) + c_spin * sn * sx,
                               -we * sy, we * sx - kappa * cs * sz, kappa * cs * sy])

    y0 = np.concatenate([np.full(n, z0), np.zeros(n), np.zeros(n), np.zeros(n), -np.ones(n)])
    tau_final = n_periods * math.pi / eta
    sol = solve_ivp(rhs, (0, tau_final), y0, method="DOP853", rtol=tol, atol=tol * z0,
                    t_eval=np.linspace(0, tau_final, 20 * n_periods + 1))
    if not sol.success:
        raise StabilityError(sol.message)
    zmax = np.max(np.abs(sol.y[:n]), axis=1)
    return zmax < growth_limit * z0
