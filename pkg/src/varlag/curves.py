"""Curves on [0,1], their jets, and samplers for randomized testing.

A CurveSpec produces jets (u, u', ..., u'''') at any s in [0,1], either one
point at a time (CurveJet) or batched into (n, B) arrays for vectorized
evaluation.  Kinds: analytic closures, affine + sine-mode Fourier tables,
and grid samples reconstructed with a quintic spline.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import RegularityError, SamplerExhausted
from .taylor import TaylorScalar

SPEED_FLOOR = 1e-8


@dataclass(frozen=True)
class CurveJet:
    """Point evaluation of a curve: s, u(s), and derivatives up to fourth."""

    s: float
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    d3u: np.ndarray = None
    d4u: np.ndarray = None

    def __post_init__(self):
        n = len(self.u)
        for name in ("u", "du", "d2u", "d3u", "d4u"):
            val = getattr(self, name)
            if val is None:
                val = np.zeros(n)
            object.__setattr__(self, name, np.asarray(val, dtype=float))
        speed = float(np.linalg.norm(self.du))
        if speed < SPEED_FLOOR:
            raise RegularityError(
                f"|u'| = {speed:.3e} below the floor {SPEED_FLOOR} at s={self.s}"
            )

    @property
    def n(self) -> int:
        return len(self.u)


@dataclass
class JetBatch:
    """Jets at B sample points, components stacked as (n, B) arrays."""

    s: np.ndarray
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    d3u: np.ndarray
    d4u: np.ndarray

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def size(self) -> int:
        return self.u.shape[1]

    def speed(self) -> np.ndarray:
        return np.sqrt(np.sum(self.du**2, axis=0))

    def at(self, j: int) -> CurveJet:
        return CurveJet(
            float(self.s[j]), self.u[:, j], self.du[:, j],
            self.d2u[:, j], self.d3u[:, j], self.d4u[:, j],
        )

    @classmethod
    def from_jets(cls, jets) -> "JetBatch":
        return cls(
            s=np.array([j.s for j in jets]),
            u=np.stack([j.u for j in jets], axis=1),
            du=np.stack([j.du for j in jets], axis=1),
            d2u=np.stack([j.d2u for j in jets], axis=1),
            d3u=np.stack([j.d3u for j in jets], axis=1),
            d4u=np.stack([j.d4u for j in jets], axis=1),
        )


class CurveSpec:
    """Base class: evaluable at any s in [0,1] with four derivatives."""

    n: int

    def jet_batch(self, s: np.ndarray) -> JetBatch:
        raise NotImplementedError

    def jet(self, s: float) -> CurveJet:
        b = self.jet_batch(np.asarray([float(s)]))
        return CurveJet(
            float(s), b.u[:, 0], b.du[:, 0], b.d2u[:, 0], b.d3u[:, 0], b.d4u[:, 0]
        )

    def min_speed(self, samples: int = 257) -> float:
        s = np.linspace(0.0, 1.0, samples)
        return float(np.min(self.jet_batch(s).speed()))


class AnalyticCurve(CurveSpec):
    """Closure-backed curve: fn(s_array) -> list of n arrays per derivative order."""

    def __init__(self, n, fn, label="analytic"):
        self.n = n
        self._fn = fn
        self.label = label

    def jet_batch(self, s):
        s = np.asarray(s, dtype=float)
        rows = self._fn(s)  # (5, n, B)
        u, du, d2u, d3u, d4u = (np.asarray(r, dtype=float) for r in rows)
        return JetBatch(s, u, du, d2u, d3u, d4u)


class FourierCurve(CurveSpec):
    """Affine base plus sine modes: u_i(s) = a_i + b_i s + sum_k c_ik sin(k pi s)."""

    def __init__(self, a, b, modes):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.modes = np.asarray(modes, dtype=float)  # (n, M)
        self.n = len(self.a)

    def jet_batch(self, s):
        s = np.asarray(s, dtype=float)
        n, m = self.modes.shape
        k = np.arange(1, m + 1)
        w = k * np.pi
        phase = w[:, None] * s[None, :]  # (M, B)
        sin, cos = np.sin(phase), np.cos(phase)
        c = self.modes
        u = self.a[:, None] + self.b[:, None] * s[None, :] + c @ sin
        du = self.b[:, None] + (c * w) @ cos
        d2u = -(c * w**2) @ sin
        d3u = -(c * w**3) @ cos
        d4u = (c * w**4) @ sin
        return JetBatch(s, u, du, d2u, d3u, d4u)


class GridCurve(CurveSpec):
    """Sampled values with quintic-spline reconstruction."""

    def __init__(self, s_samples, u_samples):
        from scipy.interpolate import make_interp_spline

        s_samples = np.asarray(s_samples, dtype=float)
        u_samples = np.asarray(u_samples, dtype=float)  # (m, n)
        if u_samples.ndim == 1:
            u_samples = u_samples[:, None]
        self.n = u_samples.shape[1]
        spline = make_interp_spline(s_samples, u_samples, k=5)
        self._splines = [spline.derivative(nu) if nu else spline for nu in range(5)]

    def jet_batch(self, s):
        s = np.asarray(s, dtype=float)
        rows = [sp(s).T for sp in self._splines]  # each (n, B)
        return JetBatch(s, *rows)


class ReparametrizedCurve(CurveSpec):
    """base o diffeo, with jets composed exactly through order-4 Taylor arithmetic."""

    def __init__(self, base: CurveSpec, diffeo):
        self.base = base
        self.diffeo = diffeo
        self.n = base.n

    def jet_batch(self, t):
        t = np.asarray(t, dtype=float)
        w = self.diffeo.jet_batch_scalar(t)  # (5, B): value and 4 derivatives
        inner = TaylorScalar(tuple(w[j] / _FACT[j] for j in range(5)))
        base_jets = self.base.jet_batch(w[0])
        out = [np.empty((self.n, t.size)) for _ in range(5)]
        zero = np.zeros(t.size)
        shifted = TaylorScalar((zero,) + inner.coeffs[1:])
        for i in range(self.n):
            coeffs = [
                base_jets.u[i], base_jets.du[i], base_jets.d2u[i] / 2.0,
                base_jets.d3u[i] / 6.0, base_jets.d4u[i] / 24.0,
            ]
            # Horner composition of the component's jet with the diffeo's jet
            acc = TaylorScalar.constant(coeffs[4], 4)
            for j in range(3, -1, -1):
                acc = acc * shifted + coeffs[j]
            for j in range(5):
                out[j][i] = acc.coeffs[j] * _FACT[j]
        return JetBatch(t, *out)


_FACT = [1.0, 1.0, 2.0, 6.0, 24.0]


class SineDiffeo:
    """Boundary-fixing diffeomorphism t + a sin(pi k t)/(pi k), |a| < 1."""

    def __init__(self, a: float, k: int):
        if not abs(a) < 1.0:
            raise ValueError("amplitude must satisfy |a| < 1 for monotonicity")
        self.a = float(a)
        self.k = int(k)

    def jet_batch_scalar(self, t):
        t = np.asarray(t, dtype=float)
        w = np.pi * self.k
        a = self.a
        return np.stack([
            t + a * np.sin(w * t) / w,
            1.0 + a * np.cos(w * t),
            -a * w * np.sin(w * t),
            -a * w**2 * np.cos(w * t),
            a * w**3 * np.sin(w * t),
        ])


def line(u0, u1) -> AnalyticCurve:
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    d = u1 - u0

    def fn(s):
        B = s.size
        z = np.zeros((len(u0), B))
        return [u0[:, None] + d[:, None] * s[None, :], np.tile(d[:, None], (1, B)), z, z, z]

    return AnalyticCurve(len(u0), fn, label="line")


def unit_circle() -> AnalyticCurve:
    """(cos 2 pi s, sin 2 pi s), one full turn."""

    def fn(s):
        w = 2.0 * np.pi
        c, si = np.cos(w * s), np.sin(w * s)
        return [
            np.stack([c, si]),
            np.stack([-w * si, w * c]),
            np.stack([-w**2 * c, -w**2 * si]),
            np.stack([w**3 * si, -w**3 * c]),
            np.stack([w**4 * c, w**4 * si]),
        ]

    return AnalyticCurve(2, fn, label="circle")


def catenoid_profile() -> AnalyticCurve:
    """(cosh t, t) with t = 2s - 1: the catenoid's meridian."""

    def fn(s):
        t = 2.0 * s - 1.0
        ch, sh = np.cosh(t), np.sinh(t)
        zero, one = np.zeros_like(t), np.ones_like(t)
        return [
            np.stack([ch, t]),
            np.stack([2.0 * sh, 2.0 * one]),
            np.stack([4.0 * ch, zero]),
            np.stack([8.0 * sh, zero]),
            np.stack([16.0 * ch, zero]),
        ]

    return AnalyticCurve(2, fn, label="catenoid")


def sphere_profile() -> AnalyticCurve:
    """(sin pi t, -cos pi t): meridian of the unit sphere, poles at the ends."""

    def fn(s):
        w = np.pi
        si, c = np.sin(w * s), np.cos(w * s)
        return [
            np.stack([si, -c]),
            np.stack([w * c, w * si]),
            np.stack([-w**2 * si, w**2 * c]),
            np.stack([-w**3 * c, -w**3 * si]),
            np.stack([w**4 * si, -w**4 * c]),
        ]

    return AnalyticCurve(2, fn, label="sphere")


def random_regular_curve(
    seed,
    n: int,
    smoothness_budget: int = 4,
    *,
    endpoint_box=(-1.0, 1.0),
    amplitude: float = 0.35,
    speed_ratio: float = 0.1,
    max_rejections: int = 100,
    accept=None,
) -> FourierCurve:
    """Random curve in C^4 with min-speed >= speed_ratio * max-speed.

    Deterministic per seed; resamples on rejection, raising SamplerExhausted
    after max_rejections attempts.  ``accept`` may add an extra predicate.
    """
    rng = np.random.default_rng(seed)
    m = min(int(smoothness_budget), 6)
    lo, hi = endpoint_box
    for _ in range(max_rejections):
        a = rng.uniform(lo, hi, size=n)
        b = rng.uniform(lo, hi, size=n) - a
        if m > 0:
            decay = amplitude / np.arange(1, m + 1) ** 2
            modes = rng.normal(size=(n, m)) * decay[None, :]
        else:
            modes = np.zeros((n, 0))
        curve = FourierCurve(a, b, modes)
        speeds = curve.jet_batch(np.linspace(0.0, 1.0, 257)).speed()
        if speeds.min() < max(speed_ratio * speeds.max(), SPEED_FLOOR):
            continue
        if accept is not None and not accept(curve):
            continue
        return curve
    raise SamplerExhausted(
        f"no admissible curve after {max_rejections} rejections (seed={seed}, n={n})"
    )


def chebyshev_samples(count: int = 17, lo: float = 0.05, hi: float = 0.95) -> np.ndarray:
    """Chebyshev nodes on (lo, hi), avoiding the endpoints."""
    j = np.arange(count)
    x = np.cos((2 * j + 1) * np.pi / (2 * count))
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return np.sort(mid + half * x)


# -- CSV emitters ---------------------------------------------------------------


def curve_samples_rows(curve: CurveSpec, count: int = 101):
    s = np.linspace(0.0, 1.0, count)
    batch = curve.jet_batch(s)
    header = (
        ["s"]
        + [f"u{i + 1}" for i in range(curve.n)]
        + [f"du{i + 1}" for i in range(curve.n)]
        + [f"d2u{i + 1}" for i in range(curve.n)]
    )
    rows = np.column_stack([s, batch.u.T, batch.du.T, batch.d2u.T])
    return header, rows


def write_csv(path_or_buffer, header, rows):
    def emit(fh):
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])

    if hasattr(path_or_buffer, "write"):
        emit(path_or_buffer)
    else:
        buf = io.StringIO()
        emit(buf)
        from .cliio import atomic_write_text

        atomic_write_text(path_or_buffer, buf.getvalue())
