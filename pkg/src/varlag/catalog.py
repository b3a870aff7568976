"""Built-in parameterized Lagrangians: curve energies and controls.

Second-order geometric quantities (turning rate, mean and Gaussian curvature,
surface divergence/curl of a director field) are pre-expanded into rational
expressions of (u, p, q) at construction time, so evaluation is a single
expression-tree pass.  The axisymmetric 2*pi prefactor stays inside each
density, making functional values equal to total surface energies.

Planar dictionary used throughout the docstrings: u1 = x (radial), u2 = y.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CurveJet, FourierCurve, AnalyticCurve, random_regular_curve
from .dsl import LagrangianDef, parse
from .errors import VarlagError
from .expr import PI, add, call, div, mul, num, pown, sub, var
from .taylor import TaylorScalar

_FACT = [1.0, 1.0, 2.0, 6.0, 24.0]


def minimal_surface_axi() -> LagrangianDef:
    """Area of the surface of revolution swept by the planar curve (u1, u2)."""
    return parse("2*pi*u1*sqrt(p1^2+p2^2)", 2, name="minimal-surface-axi")


def helfrich_canham_axi(kappa: float = 1.0, kappa_g: float = 0.5) -> LagrangianDef:
    """Bending energy kappa*H^2 + kappa_g*K of the surface of revolution.

    Built from the meridian quantities: turning rate tp = (p1 q2 - p2 q1)/|p|^2,
    sin(theta) = p2/|p|, H = (tp/|p| + sin(theta)/u1)/2, K = tp*p2/(u1*|p|^2).
    """
    p1, p2, q1, q2, u1 = var("p1"), var("p2"), var("q1"), var("q2"), var("u1")
    w2 = add(pown(p1, 2), pown(p2, 2))
    w = call("sqrt", w2)
    tp = div(sub(mul(p1, q2), mul(p2, q1)), w2)
    sth = div(p2, w)
    h = mul(num(0.5), add(div(tp, w), div(sth, u1)))
    gauss = div(mul(tp, p2), mul(u1, w2))
    body = mul(
        num(2.0), PI,
        add(mul(num(kappa), pown(h, 2)), mul(num(kappa_g), gauss)),
        u1, w,
    )
    return LagrangianDef(
        name="helfrich-canham-axi", n=2, order=2, body=body,
        parameters={"kappa": kappa, "kappa_g": kappa_g},
    )


def euler_elastica() -> LagrangianDef:
    """Squared-curvature density times speed for a planar curve."""
    return parse(
        "(p1*q2 - p2*q1)^2 / ((p1^2 + p2^2)^2 * sqrt(p1^2 + p2^2))",
        2, name="euler-elastica",
    )


def cahn_hilliard_axi(epsilon: float = 0.1) -> LagrangianDef:
    """Two-well phase energy on the surface of revolution; u = (psi, x, y)."""
    src = (
        "2*pi*(epsilon/2 * p1^2/(p2^2+p3^2) + (u1^2 - 1)^2)"
        " * u2 * sqrt(p2^2+p3^2)"
    )
    return parse(src, 3, {"epsilon": epsilon}, name="cahn-hilliard-axi")


def frank_oseen_axi(K: float = 1.0) -> LagrangianDef:
    """One-constant director energy on a surface of revolution.

    u = (alpha, beta, gamma, x, y) with the unit director (alpha, beta, gamma);
    callers must supply samples with alpha^2 + beta^2 + gamma^2 = 1 (checked
    to 1e-8 by the catalog entry's jet validator).  The surface divergence
    hides a total s-derivative, expanded here into (u, p, q) variables.
    """
    u1, u2, u3, u4 = var("u1"), var("u2"), var("u3"), var("u4")
    p1, p2, p3, p4, p5 = (var(f"p{i}") for i in range(1, 6))
    q4, q5 = var("q4"), var("q5")
    w2 = add(pown(p4, 2), pown(p5, 2))
    w = call("sqrt", w2)
    mnum = add(mul(p4, u1), mul(p5, u3))
    m = div(mnum, w)
    ds_m = sub(
        div(add(mul(q4, u1), mul(p4, p1), mul(q5, u3), mul(p5, p3)), w),
        div(mul(mnum, add(mul(p4, q4), mul(p5, q5))), mul(w2, w)),
    )
    ds_g = add(mul(p4, m), mul(u4, ds_m))
    div_n = div(ds_g, mul(u4, w))
    rot_n = div(add(mul(u4, p2), mul(u2, p4)), mul(u4, w))
    body = mul(
        num(2.0), PI, num(0.5 * K),
        add(pown(div_n, 2), pown(rot_n, 2)),
        u4, w,
    )
    return LagrangianDef(
        name="frank-oseen-axi", n=5, order=2, body=body, parameters={"K": K},
    )


_NULL_CHOICES = {
    "product": ("p1*u2 + u1*p2", "exact derivative of u1*u2"),
    "time-weighted": ("u1^2 + 2*s*u1*p1", "exact derivative of s*u1^2"),
}

_NONINVARIANT_CHOICES = {
    "dirichlet": ("(p1^2 + p2^2)/2", "quadratic gradient energy"),
    "sq-accel": ("q1^2", "squared second derivative of the first component"),
    "s-weighted-length": ("s*sqrt(p1^2 + p2^2)", "parameter-weighted arc length"),
}


def named_null(choice: str = "product") -> LagrangianDef:
    """Null controls: exact s-derivatives whose residual vanishes identically."""
    try:
        src, _ = _NULL_CHOICES[choice]
    except KeyError:
        raise VarlagError(f"unknown null control {choice!r}; "
                          f"choices: {sorted(_NULL_CHOICES)}") from None
    return parse(src, 2, name=f"null-{choice}")


def named_noninvariant(choice: str = "dirichlet") -> LagrangianDef:
    """Negative controls that fail the invariance tests."""
    try:
        src, _ = _NONINVARIANT_CHOICES[choice]
    except KeyError:
        raise VarlagError(f"unknown control {choice!r}; "
                          f"choices: {sorted(_NONINVARIANT_CHOICES)}") from None
    return parse(src, 2, name=choice)


# -- samplers ---------------------------------------------------------------------


def bounded_components(rng, size, lo: float = 0.3, hi: float = 1.2) -> np.ndarray:
    """Random magnitudes in [lo, hi] with random signs: generic but away from
    coordinate degeneracies, mirroring the pole-rejection rule for angles."""
    return rng.uniform(lo, hi, size=size) * rng.choice([-1.0, 1.0], size=size)


def generic_jet(rng, n: int, positive: tuple = ()) -> CurveJet:
    u = rng.uniform(-1.5, 1.5, size=n)
    for k in positive:
        u[k] = rng.uniform(0.5, 2.0)
    return CurveJet(
        s=float(rng.uniform(0.05, 0.95)),
        u=u,
        du=bounded_components(rng, n),
        d2u=bounded_components(rng, n),
        d3u=bounded_components(rng, n),
        d4u=bounded_components(rng, n),
    )


def _generic_curve(seed, n):
    return random_regular_curve(seed, n)


def _positive_component_curve(seed, n, k, floor_range=(0.4, 0.9)):
    """Random regular curve with component k shifted to stay positive."""
    rng = np.random.default_rng(seed)
    curve = random_regular_curve(rng, n)
    grid = curve.jet_batch(np.linspace(0.0, 1.0, 257))
    target = rng.uniform(*floor_range)
    shift = target - float(grid.u[k].min())
    a = curve.a.copy()
    a[k] += shift
    return FourierCurve(a, curve.b, curve.modes)


def _director_curve(seed):
    """n=5 curve with (u1,u2,u3) on the unit sphere and a positive-x meridian."""
    rng = np.random.default_rng(seed)
    planar = _positive_component_curve(rng, 2, 0)
    decay = 0.3 / np.arange(1, 4) ** 2
    angles = FourierCurve(
        rng.uniform(-1.0, 1.0, 2),
        rng.uniform(-1.0, 1.0, 2),
        rng.normal(size=(2, 3)) * decay[None, :],
    )

    def fn(s):
        ang = angles.jet_batch(s)
        pl = planar.jet_batch(s)
        a_jet = TaylorScalar(tuple(
            [ang.u[0], ang.du[0], ang.d2u[0] / 2, ang.d3u[0] / 6, ang.d4u[0] / 24]
        ))
        b_jet = TaylorScalar(tuple(
            [ang.u[1], ang.du[1], ang.d2u[1] / 2, ang.d3u[1] / 6, ang.d4u[1] / 24]
        ))
        sin_a, cos_a = a_jet.sin(), a_jet.cos()
        sin_b, cos_b = b_jet.sin(), b_jet.cos()
        director = [sin_a * cos_b, sin_a * sin_b, cos_a]
        rows = [np.empty((5, s.size)) for _ in range(5)]
        for i, comp in enumerate(director):
            for j in range(5):
                rows[j][i] = comp.coeffs[j] * _FACT[j]
        planar_rows = [pl.u, pl.du, pl.d2u, pl.d3u, pl.d4u]
        for j in range(5):
            rows[j][3] = planar_rows[j][0]
            rows[j][4] = planar_rows[j][1]
        return rows

    return AnalyticCurve(5, fn, label="director-curve")


def _director_jet(rng) -> CurveJet:
    jet = generic_jet(rng, 5, positive=(3,))
    director = rng.normal(size=3)
    jet.u[:3] = director / np.linalg.norm(director)
    return jet


def _check_director(jet: CurveJet, tol: float = 1e-8):
    gap = abs(float(np.sum(jet.u[:3] ** 2)) - 1.0)
    if gap > tol:
        raise VarlagError(
            f"frank-oseen-axi needs a unit director: |alpha^2+beta^2+gamma^2 - 1| "
            f"= {gap:.3e} > {tol}"
        )


@dataclass(frozen=True)
class CatalogEntry:
    """A built-in Lagrangian with its expected classification flags."""

    id: str
    n: int
    order: int
    summary: str
    expected: dict          # keys: null, T, N, param_invariant
    params: dict = field(default_factory=dict)
    factory: object = None
    curve_sampler: object = None
    jet_sampler: object = None
    jet_validator: object = None

    def __post_init__(self):
        # flag consistency: null implies T and N; param-invariant implies T
        e = self.expected
        if e["null"] and not (e["T"] and e["N"]):
            raise VarlagError(f"{self.id}: null entries must be flagged T and N")
        if e["param_invariant"] and not e["T"]:
            raise VarlagError(f"{self.id}: invariant entries must be flagged T")

    def make(self, **overrides) -> LagrangianDef:
        params = {**self.params, **overrides}
        return self.factory(**params) if params else self.factory()

    def random_curve(self, seed):
        return self.curve_sampler(seed)

    def random_jet(self, rng) -> CurveJet:
        return self.jet_sampler(rng)

    def validate_jet(self, jet: CurveJet):
        if self.jet_validator is not None:
            self.jet_validator(jet)


def _entry(id, summary, n, order, expected, factory, params=None,
           curve_sampler=None, jet_sampler=None, jet_validator=None):
    return CatalogEntry(
        id=id, n=n, order=order, summary=summary,
        expected=dict(zip(("null", "T", "N", "param_invariant"), expected)),
        params=params or {},
        factory=factory,
        curve_sampler=curve_sampler or (lambda seed: _generic_curve(seed, n)),
        jet_sampler=jet_sampler or (lambda rng: generic_jet(rng, n)),
        jet_validator=jet_validator,
    )


ENTRIES = [
    _entry(
        "minimal-surface-axi", "area of the surface of revolution",
        2, 1, (False, True, False, True), minimal_surface_axi,
        curve_sampler=lambda seed: _positive_component_curve(seed, 2, 0),
        jet_sampler=lambda rng: generic_jet(rng, 2, positive=(0,)),
    ),
    _entry(
        "helfrich-canham-axi", "bending energy kappa*H^2 + kappa_g*K",
        2, 2, (False, True, False, True), helfrich_canham_axi,
        params={"kappa": 1.0, "kappa_g": 0.5},
        curve_sampler=lambda seed: _positive_component_curve(seed, 2, 0),
        jet_sampler=lambda rng: generic_jet(rng, 2, positive=(0,)),
    ),
    _entry(
        "euler-elastica", "squared curvature times speed",
        2, 2, (False, True, False, True), euler_elastica,
    ),
    _entry(
        "cahn-hilliard-axi", "two-well phase energy on a revolved surface",
        3, 1, (False, True, False, True), cahn_hilliard_axi,
        params={"epsilon": 0.1},
        curve_sampler=lambda seed: _positive_component_curve(seed, 3, 1),
        jet_sampler=lambda rng: generic_jet(rng, 3, positive=(1,)),
    ),
    _entry(
        "frank-oseen-axi", "one-constant director energy on a revolved surface",
        5, 2, (False, True, False, True), frank_oseen_axi,
        params={"K": 1.0},
        curve_sampler=_director_curve,
        jet_sampler=_director_jet,
        jet_validator=_check_director,
    ),
    _entry(
        "null-product", "exact derivative of u1*u2",
        2, 1, (True, True, True, True), lambda: named_null("product"),
    ),
    _entry(
        "null-time-weighted", "exact derivative of s*u1^2",
        2, 1, (True, True, True, True), lambda: named_null("time-weighted"),
    ),
    _entry(
        "dirichlet", "quadratic gradient energy",
        2, 1, (False, False, False, False), lambda: named_noninvariant("dirichlet"),
    ),
    _entry(
        "sq-accel", "squared second derivative",
        2, 2, (False, False, False, False), lambda: named_noninvariant("sq-accel"),
    ),
    _entry(
        "s-weighted-length", "parameter-weighted arc length",
        2, 1, (False, False, False, False),
        lambda: named_noninvariant("s-weighted-length"),
    ),
]

REGISTRY = {entry.id: entry for entry in ENTRIES}


def get(entry_id: str) -> CatalogEntry:
    try:
        return REGISTRY[entry_id]
    except KeyError:
        raise VarlagError(
            f"unknown catalog id {entry_id!r}; available: {sorted(REGISTRY)}"
        ) from None
