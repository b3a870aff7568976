"""Euler-Lagrange operator, functional values, and first variations.

The residual E_L = L_u - D_s L_p + D_ss L_q is evaluated exactly: the jet
(s, u, p, q) is bound as order-2 Taylor series in the curve parameter, each
partial derivative of L is extracted with a dual perturbation, and the total
derivatives D_s, D_ss are read off the Taylor coefficients of the partials
(coefficient 1, and 2 x coefficient 2).  No finite differences anywhere in
this path; they appear only as independent oracles in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveJet, CurveSpec, JetBatch
from .dsl import LagrangianDef
from .errors import BoundaryViolation, QuadratureNonConvergence
from .expr import evaluate
from .taylor import DualDirection, TaylorScalar

QUAD_REL_TOL = 1e-10
QUAD_MAX_DEPTH = 20


@dataclass(frozen=True)
class ELResult:
    """Euler-Lagrange residual split into tangential and normal parts."""

    residual: np.ndarray     # E_L(u)(s), an n-vector
    tangential: float        # u' . E_L
    normal: np.ndarray       # E_L - (u' . E_L / |u'|^2) u'
    scale: float             # max(1, magnitude of the L-jet at the point)

    @property
    def normal_magnitude(self) -> float:
        return float(np.linalg.norm(self.normal))


def _taylor_bindings(ldef: LagrangianDef, jets: JetBatch):
    """Order-2 Taylor bindings for (s, u, p, q) generated from the jets."""
    n = ldef.n
    zero = np.zeros(jets.size)
    env = {"s": TaylorScalar((jets.s, zero + 1.0, zero))}
    for i in range(n):
        env[f"u{i + 1}"] = TaylorScalar((jets.u[i], jets.du[i], jets.d2u[i] / 2.0))
        env[f"p{i + 1}"] = TaylorScalar((jets.du[i], jets.d2u[i], jets.d3u[i] / 2.0))
        if ldef.order == 2:
            env[f"q{i + 1}"] = TaylorScalar((jets.d2u[i], jets.d3u[i], jets.d4u[i] / 2.0))
    return env


def _coef(series: TaylorScalar, j: int, B: int) -> np.ndarray:
    return np.zeros(B) + series.coeffs[j]


def partial_series(body, env, name) -> TaylorScalar:
    """L_name along the curve as a Taylor series (zeros if name unused)."""
    base = env[name]
    one = TaylorScalar.constant(base.coeffs[0] * 0.0 + 1.0, base.order)
    penv = dict(env)
    penv[name] = DualDirection(base, one)
    out = evaluate(body, penv)
    if isinstance(out, DualDirection):
        out = out.perturbation
    else:
        out = base * 0.0
    if not isinstance(out, TaylorScalar):
        out = TaylorScalar.constant(out, base.order)
    return out


def euler_lagrange_batch(ldef: LagrangianDef, jets: JetBatch):
    """Vectorized residual over a batch; returns (residual, tangential, normal, scale)."""
    n, B = ldef.n, jets.size
    env = _taylor_bindings(ldef, jets)
    value = evaluate(ldef.body, env)
    if not isinstance(value, TaylorScalar):
        value = TaylorScalar.constant(value, 2)
    scale = np.abs(_coef(value, 0, B))
    residual = np.empty((n, B))
    for i in range(n):
        lu = partial_series(ldef.body, env, f"u{i + 1}")
        lp = partial_series(ldef.body, env, f"p{i + 1}")
        res = _coef(lu, 0, B) - _coef(lp, 1, B)
        scale = np.maximum(scale, np.abs(_coef(lu, 0, B)))
        scale = np.maximum(scale, np.abs(_coef(lp, 0, B)))
        scale = np.maximum(scale, np.abs(_coef(lp, 1, B)))
        if ldef.order == 2:
            lq = partial_series(ldef.body, env, f"q{i + 1}")
            res = res + 2.0 * _coef(lq, 2, B)
            scale = np.maximum(scale, np.abs(_coef(lq, 0, B)))
            scale = np.maximum(scale, 2.0 * np.abs(_coef(lq, 2, B)))
        residual[i] = res
    scale = np.maximum(1.0, scale)
    speed2 = np.sum(jets.du**2, axis=0)
    tangential = np.sum(jets.du * residual, axis=0)
    normal = residual - (tangential / speed2)[None, :] * jets.du
    return residual, tangential, normal, scale


def euler_lagrange(ldef: LagrangianDef, jet: CurveJet) -> ELResult:
    """Residual E_L = L_u - D_s L_p + D_ss L_q at a single jet."""
    batch = JetBatch.from_jets([jet])
    residual, tangential, normal, scale = euler_lagrange_batch(ldef, batch)
    return ELResult(
        residual=residual[:, 0],
        tangential=float(tangential[0]),
        normal=normal[:, 0],
        scale=float(scale[0]),
    )


# -- quadrature -----------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def adaptive_quadrature(integrand, rel_tol=QUAD_REL_TOL, max_depth=QUAD_MAX_DEPTH) -> float:
    """Bisection-adaptive 15-point Gauss-Legendre on [0,1].

    ``integrand`` maps an array of s values to an array of densities; the
    per-interval budget is rel_tol * scale * length with scale from the
    first whole-interval estimate.
    """

    def panels(a, b):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        vals = np.asarray(integrand(nodes.ravel())).reshape(nodes.shape)
        return half * (vals @ _GL_WEIGHTS)

    whole = panels(np.array([0.0]), np.array([1.0]))[0]
    scale = max(1.0, abs(whole))
    total = 0.0
    work = [(0.0, 1.0, whole, 0)]
    while work:
        a = np.array([w[0] for w in work])
        b = np.array([w[1] for w in work])
        coarse = np.array([w[2] for w in work])
        depth = [w[3] for w in work]
        mid = 0.5 * (a + b)
        left = panels(a, mid)
        right = panels(mid, b)
        fine = left + right
        err = np.abs(fine - coarse)
        budget = rel_tol * scale * (b - a)
        nxt = []
        for j in range(len(work)):
            if err[j] <= budget[j]:
                total += fine[j]
            elif depth[j] + 1 >= max_depth:
                raise QuadratureNonConvergence(
                    f"interval [{a[j]:.6g}, {b[j]:.6g}] did not converge "
                    f"(error {err[j]:.3e} > budget {budget[j]:.3e})",
                    worst_interval=(float(a[j]), float(b[j])),
                )
            else:
                nxt.append((float(a[j]), float(mid[j]), float(left[j]), depth[j] + 1))
                nxt.append((float(mid[j]), float(b[j]), float(right[j]), depth[j] + 1))
        work = nxt
    return float(total)


def density_batch(ldef: LagrangianDef, curve: CurveSpec, s: np.ndarray) -> np.ndarray:
    jets = curve.jet_batch(np.asarray(s, dtype=float))
    q = jets.d2u if ldef.order == 2 else None
    return np.asarray(ldef.eval(jets.s, jets.u, jets.du, q)) + np.zeros(jets.size)


def functional_value(
    ldef: LagrangianDef,
    curve: CurveSpec,
    rel_tol: float = QUAD_REL_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """Energy of the curve: adaptive Gauss-Legendre quadrature of the density."""
    return adaptive_quadrature(
        lambda s: density_batch(ldef, curve, s), rel_tol, max_depth
    )


# -- first variation --------------------------------------------------------------

VARIATION_BOUNDARY_TOL = 1e-12


def _check_variation_boundary(variation: CurveSpec, order: int):
    for s in (0.0, 1.0):
        b = variation.jet_batch(np.asarray([s]))
        if np.max(np.abs(b.u)) > VARIATION_BOUNDARY_TOL:
            raise BoundaryViolation(f"variation does not vanish at s={s}")
        if order == 2 and np.max(np.abs(b.du)) > VARIATION_BOUNDARY_TOL:
            raise BoundaryViolation(f"variation derivative does not vanish at s={s}")


def gradient_batch(ldef: LagrangianDef, jets: JetBatch):
    """(L_u, L_p, L_q) arrays of shape (n, B) at the jets."""
    n, B = ldef.n, jets.size
    env = {"s": jets.s}
    for i in range(n):
        env[f"u{i + 1}"] = jets.u[i]
        env[f"p{i + 1}"] = jets.du[i]
        if ldef.order == 2:
            env[f"q{i + 1}"] = jets.d2u[i]
    ones = np.ones(B)
    grads = {"u": np.zeros((n, B)), "p": np.zeros((n, B)), "q": np.zeros((n, B))}
    kinds = ("u", "p", "q") if ldef.order == 2 else ("u", "p")
    for kind in kinds:
        for i in range(n):
            name = f"{kind}{i + 1}"
            penv = dict(env)
            penv[name] = DualDirection(env[name], ones)
            out = evaluate(ldef.body, penv)
            if isinstance(out, DualDirection):
                grads[kind][i] = out.perturbation
    return grads["u"], grads["p"], grads["q"]


def first_variation(
    ldef: LagrangianDef,
    curve: CurveSpec,
    variation: CurveSpec,
    rel_tol: float = QUAD_REL_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """delta E[delta u] = integral of L_u.du + L_p.du' (+ L_q.du'')."""
    _check_variation_boundary(variation, ldef.order)

    def integrand(s):
        jets = curve.jet_batch(s)
        var_jets = variation.jet_batch(s)
        lu, lp, lq = gradient_batch(ldef, jets)
        out = np.sum(lu * var_jets.u, axis=0) + np.sum(lp * var_jets.du, axis=0)
        if ldef.order == 2:
            out = out + np.sum(lq * var_jets.d2u, axis=0)
        return out

    return adaptive_quadrature(integrand, rel_tol, max_depth)


def el_pairing(
    ldef: LagrangianDef,
    curve: CurveSpec,
    variation: CurveSpec,
    rel_tol: float = QUAD_REL_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """integral of E_L . delta_u ds, the integrated-by-parts counterpart."""

    def integrand(s):
        residual, _, _, _ = euler_lagrange_batch(ldef, curve.jet_batch(s))
        return np.sum(residual * variation.jet_batch(s).u, axis=0)

    return adaptive_quadrature(integrand, rel_tol, max_depth)


def residual_profile_rows(ldef: LagrangianDef, curve: CurveSpec, count: int = 101):
    """(header, rows) for the residual-profile CSV: s, residual, tangential, |normal|."""
    s = np.linspace(0.0, 1.0, count)
    jets = curve.jet_batch(s)
    residual, tangential, normal, scale = euler_lagrange_batch(ldef, jets)
    header = (
        ["s"]
        + [f"residual{i + 1}" for i in range(ldef.n)]
        + ["tangential", "normal_norm", "scale"]
    )
    normal_norm = np.linalg.norm(normal, axis=0)
    rows = np.column_stack([s, residual.T, tangential, normal_norm, scale])
    return header, rows
