"""Limited memory bundle method for nonsmooth, possibly nonconvex problems.

The solver only needs an oracle ``x -> (f(x), xi)`` where ``xi`` is any
subgradient at ``x``.  Search directions are ``d = -D @ agg`` where ``agg``
is an aggregate subgradient and ``D`` a limited-memory inverse metric built
from stored correction pairs ``(s, u)``: applied with the L-BFGS two-loop
recursion after serious steps and with the compact inverse SR1 formula
after null steps.
"""

import enum
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import NonFiniteOracle

# Curvature admission for correction pairs and the SR1 denominator guard.
CURVATURE_TOL = 1e-12
SR1_TOL = 1e-8
MAX_BISECTIONS = 30


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    ITER_LIMIT = "IterLimit"
    NULL_STEP_LIMIT = "NullStepLimit"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


@dataclass(frozen=True)
class SolverConfig:
    max_corrections: int = 7
    stop_tol: float = 1e-5
    max_iters: int = 500
    max_null_steps: int = 50
    ls_c1: float = 1e-4
    ls_c2: float = 0.25
    initial_step: float = 1.0
    dist_measure_weight: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.ls_c1 < self.ls_c2 < 1.0:
            raise ValueError("need 0 < ls_c1 < ls_c2 < 1")
        if self.max_corrections < 1:
            raise ValueError("max_corrections must be >= 1")
        if not self.stop_tol > 0.0:
            raise ValueError("stop_tol must be positive")
        if self.max_iters < 1 or self.max_null_steps < 1:
            raise ValueError("iteration caps must be >= 1")
        if not self.initial_step > 0.0:
            raise ValueError("initial_step must be positive")
        if self.dist_measure_weight < 0.0:
            raise ValueError("dist_measure_weight must be nonnegative")


@dataclass
class SolverResult:
    x_final: np.ndarray
    f_final: float
    n_iters: int
    n_oracle_calls: int
    status: Status

    @property
    def converged(self):
        return self.status is Status.CONVERGED


class BundleState:
    """Iterate, aggregate subgradient and correction-pair store."""

    def __init__(self, x, f, g, capacity):
        self.x = x
        self.f = f
        self.g = g
        self.agg = g.copy()
        self.beta_agg = 0.0
        self.capacity = capacity
        self.S = []
        self.U = []
        self.use_sr1 = False
        self._sr1_cache = None

    def reset_metric(self):
        self.S.clear()
        self.U.clear()
        self._sr1_cache = None

    def _gamma(self):
        s, u = self.S[-1], self.U[-1]
        return float(s @ u) / float(u @ u)

    def _apply_bfgs(self, v):
        q = np.array(v, dtype=float, copy=True)
        rho = [1.0 / float(s @ u) for s, u in zip(self.S, self.U)]
        alpha = [0.0] * len(self.S)
        for i in range(len(self.S) - 1, -1, -1):
            alpha[i] = rho[i] * float(self.S[i] @ q)
            q -= alpha[i] * self.U[i]
        q *= self._gamma()
        for i in range(len(self.S)):
            b = rho[i] * float(self.U[i] @ q)
            q += (alpha[i] - b) * self.S[i]
        return q

    def _sr1_factors(self):
        """Compact inverse SR1 factors, or None when singular or not positive definite.

        Pairs already reproduced by the scaled identity (``s = gamma * u``)
        contribute nothing and are left out of the correction term.
        """
        if self._sr1_cache is not None:
            return self._sr1_cache or None
        gamma = self._gamma()
        keep = [i for i, (s, u) in enumerate(zip(self.S, self.U))
                if np.linalg.norm(s - gamma * u) > SR1_TOL * np.linalg.norm(s)]
        if not keep:
            self._sr1_cache = (gamma, None, None)
            return self._sr1_cache
        S = np.array([self.S[i] for i in keep]).T
        U = np.array([self.U[i] for i in keep]).T
        SU = S.T @ U
        upper = np.triu(SU)
        M = upper + upper.T - np.diag(np.diag(SU)) - gamma * (U.T @ U)
        psi = S - gamma * U
        factors = False
        if np.all(np.isfinite(M)) and np.linalg.cond(M) < 1e10:
            Minv = np.linalg.inv(M)
            # H = gamma*I + psi Minv psi^T is PD iff its restriction to range(psi) is.
            _, R = np.linalg.qr(psi)
            small = gamma * np.eye(R.shape[0]) + R @ Minv @ R.T
            if np.linalg.eigvalsh(0.5 * (small + small.T)).min() > SR1_TOL * gamma:
                factors = (gamma, psi, Minv)
        self._sr1_cache = factors
        return factors or None

    def _apply_sr1(self, v):
        factors = self._sr1_factors()
        if factors is None:
            return None
        gamma, psi, Minv = factors
        if psi is None:
            return gamma * np.asarray(v, dtype=float)
        return gamma * v + psi @ (Minv @ (psi.T @ v))

    def apply(self, v, sr1=None):
        """Return ``D @ v`` for the current limited-memory metric."""
        if not self.S:
            return np.array(v, dtype=float, copy=True)
        if sr1 is None:
            sr1 = self.use_sr1
        if sr1:
            out = self._apply_sr1(v)
            if out is not None:
                return out
        return self._apply_bfgs(v)

    def add_pair(self, s, u, sr1):
        """Store ``(s, u)`` if it passes the curvature guards; FIFO eviction."""
        su = float(s @ u)
        ns, nu = float(np.linalg.norm(s)), float(np.linalg.norm(u))
        if not su > CURVATURE_TOL * ns * nu:
            return False
        if sr1:
            w = s - self.apply(u, sr1=True)
            if abs(float(u @ w)) <= SR1_TOL * nu * float(np.linalg.norm(w)):
                return False
        saved = (list(self.S), list(self.U))
        self.S.append(np.array(s, dtype=float))
        self.U.append(np.array(u, dtype=float))
        if len(self.S) > self.capacity:
            del self.S[0]
            del self.U[0]
        self._sr1_cache = None
        if sr1 and self._sr1_factors() is None:
            # The SR1 update would lose positive definiteness: keep the old metric.
            self.S, self.U = saved
            self._sr1_cache = None
            return False
        return True


def direction(state):
    """``d = -D @ agg``; falls back to ``-agg`` when ``D`` is not positive along ``agg``."""
    d = -state.apply(state.agg)
    dg = float(d @ state.agg)
    if not (np.all(np.isfinite(d)) and dg < 0.0) and np.any(state.agg):
        if state.use_sr1 and state.S:
            d = -state.apply(state.agg, sr1=False)
            dg = float(d @ state.agg)
        if not (np.all(np.isfinite(d)) and dg < 0.0):
            state.reset_metric()
            d = -state.agg.copy()
    return d


@dataclass
class StepOutcome:
    kind: str  # "serious", "null" or "failure"
    t: float
    x: np.ndarray = None
    f: float = math.nan
    g: np.ndarray = None
    beta: float = 0.0
    calls: int = 0


def _evaluate(oracle, x):
    f, g = oracle(x)
    return float(f), np.asarray(g, dtype=float).reshape(-1)


def line_search(oracle, state, d, w, cfg):
    """Armijo test on the trial point, else a local null step, else shrink ``t``.

    Finite trials shrink ``t`` by safeguarded quadratic interpolation (within
    ``[0.1 t, 0.5 t]``), non-finite ones by halving.  Voluntary null steps
    need a scaled metric (a nonempty correction store) and a locality
    measure no larger than ``w``.  After ``MAX_BISECTIONS`` reductions the
    last finite trial becomes a forced null step; without any finite trial
    the search fails.
    """
    x, f = state.x, state.f
    dg = float(d @ state.agg)
    dnorm2 = float(d @ d)
    t = cfg.initial_step
    last = None
    calls = 0
    for _ in range(MAX_BISECTIONS + 1):
        y = x + t * d
        fy, gy = _evaluate(oracle, y)
        calls += 1
        if not (math.isfinite(fy) and np.all(np.isfinite(gy))):
            t *= 0.5
            continue
        if fy <= f + cfg.ls_c1 * t * dg:
            return StepOutcome("serious", t, y, fy, gy, 0.0, calls)
        beta = max(abs(f - fy + t * float(gy @ d)), cfg.dist_measure_weight * t * t * dnorm2)
        last = StepOutcome("null", t, y, fy, gy, beta, calls)
        if state.S and beta <= w and -beta + float(d @ gy) >= -cfg.ls_c2 * w:
            return last
        curv = fy - f - t * dg
        tq = -dg * t * t / (2.0 * curv) if curv > 0.0 else 0.5 * t
        t = min(0.5 * t, max(0.1 * t, tq))
    if last is not None:
        last.calls = calls
        return last
    return StepOutcome("failure", t, calls=calls)


def _simplex_qp(G, b):
    """Minimise ``l @ G @ l + 2 b @ l`` over the unit simplex (3 points)."""
    best_val, best = math.inf, None
    p = len(b)
    for size in range(1, p + 1):
        for sup in combinations(range(p), size):
            idx = list(sup)
            K = np.zeros((size + 1, size + 1))
            K[:size, :size] = 2.0 * G[np.ix_(idx, idx)]
            K[:size, size] = 1.0
            K[size, :size] = 1.0
            rhs = np.concatenate([-2.0 * b[idx], [1.0]])
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0][:size]
            if np.any(sol < -1e-12) or not np.all(np.isfinite(sol)):
                continue
            lam = np.zeros(p)
            lam[idx] = np.clip(sol, 0.0, None)
            s = lam.sum()
            if s <= 0.0:
                continue
            lam /= s
            val = float(lam @ G @ lam + 2.0 * b @ lam)
            if val < best_val:
                best_val, best = val, lam
    if best is None:
        best = np.array([1.0] + [0.0] * (p - 1))
    return best


def aggregate(state, g_trial, beta_trial):
    """Combine current, trial and previous aggregate subgradients."""
    vecs = [state.g, g_trial, state.agg]
    betas = np.array([0.0, beta_trial, state.beta_agg])
    dv = [state.apply(v) for v in vecs]
    G = np.array([[float(a @ b) for b in dv] for a in vecs])
    G = 0.5 * (G + G.T)
    lam = _simplex_qp(G, betas)
    agg = lam[0] * vecs[0] + lam[1] * vecs[1] + lam[2] * vecs[2]
    return agg, max(0.0, float(lam @ betas))


def minimize(oracle, x0, cfg=None):
    """Minimise a nonsmooth function from ``x0``; see :class:`SolverResult`."""
    cfg = cfg or SolverConfig()
    x = np.array(x0, dtype=float, copy=True).reshape(-1)
    f, g = _evaluate(oracle, x)
    if not (math.isfinite(f) and np.all(np.isfinite(g))):
        raise NonFiniteOracle(f"oracle is not finite at the starting point (f={f})")
    state = BundleState(x, f, g, cfg.max_corrections)
    calls = 1
    n_null = 0
    status = Status.ITER_LIMIT
    it = 0
    while it < cfg.max_iters:
        it += 1
        d = direction(state)
        w = -float(d @ state.agg) + 2.0 * state.beta_agg
        if w <= cfg.stop_tol:
            status = Status.CONVERGED
            break
        step = line_search(oracle, state, d, w, cfg)
        calls += step.calls
        if step.kind == "serious":
            state.add_pair(step.x - state.x, step.g - state.g, sr1=False)
            state.use_sr1 = False
            state.x, state.f, state.g = step.x, step.f, step.g
            state.agg = step.g.copy()
            state.beta_agg = 0.0
            n_null = 0
        elif step.kind == "null":
            state.add_pair(step.t * d, step.g - state.g, sr1=True)
            state.use_sr1 = True
            state.agg, state.beta_agg = aggregate(state, step.g, step.beta)
            n_null += 1
            if n_null >= cfg.max_null_steps:
                status = Status.NULL_STEP_LIMIT
                break
        else:
            status = Status.LINE_SEARCH_FAILURE
            break
    return SolverResult(x_final=state.x, f_final=state.f, n_iters=it, n_oracle_calls=calls, status=status)
