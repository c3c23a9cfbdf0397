"""Regularized distance weights and their exact derivatives.

Every weight here has the form

    a(x) = sqrt(q(x)),   q(x) = (x - o)^T Q (x - o) + eps^2

with ``Q`` symmetric positive semi-definite and ``Q @ Q = c Q``. For the
distance to a subspace ``Q`` is the orthogonal projector (``c = 1``); the pair
weight ``|y - z|`` has ``c = 2``. Writing ``T = tr Q`` and ``v = Q (x - o)``:

    X        = v / a
    grad X   = Q / a - v v^T / a^3
    div X    = (T - c) / a + c eps^2 / a^3
    -Lap div X = -(T - c) [(3c - T) / a^3 - 3 c eps^2 / a^5]
                 - c eps^2 [(15c - 3T) / a^5 - 15 c eps^2 / a^7]

All quantities are derivatives of the same regularized ``a``, so symmetry and
``trace(grad X) == div X`` hold exactly at every ``eps``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sint


class SingularEvaluationError(ValueError):
    """A singular quantity was requested on the singular set with ``eps == 0``."""


@dataclass(frozen=True)
class Line2D:
    point: tuple[float, float] = (0.0, 0.0)
    angle: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return np.array([np.cos(self.angle), np.sin(self.angle)])

    @property
    def normal(self) -> np.ndarray:
        return np.array([-np.sin(self.angle), np.cos(self.angle)])


@dataclass(frozen=True, eq=False)
class VectorFieldSpec:
    kind: str
    ambient_dim: int
    epsilon: float
    Q: np.ndarray
    c: float
    origin: np.ndarray
    # Columns map the reduced 3-variable z to ambient points with q = |z|^2 + eps^2.
    reduced_embedding: np.ndarray
    delta_constant: float
    meta: dict = field(default_factory=dict)

    @property
    def trace_q(self) -> float:
        return float(np.trace(self.Q))

    def with_epsilon(self, epsilon: float) -> VectorFieldSpec:
        return VectorFieldSpec(
            self.kind, self.ambient_dim, float(epsilon), self.Q, self.c, self.origin,
            self.reduced_embedding, self.delta_constant, self.meta,
        )

    def _prep(self, x, singular: bool):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise ValueError(f"points must have trailing dimension {self.ambient_dim}")
        v = (x - self.origin) @ self.Q  # Q symmetric
        d2 = np.einsum("...i,...i->...", x - self.origin, v)
        d2 = np.maximum(d2, 0.0)
        # On the singular set d^2 is zero up to rounding of the projection.
        floor = 1e-14 * (1.0 + np.einsum("...i,...i->...", x - self.origin, x - self.origin))
        if singular and self.epsilon == 0 and np.any(d2 <= floor):
            raise SingularEvaluationError(
                f"{self.kind}: singular quantity evaluated on the singular set with eps=0"
            )
        a = np.sqrt(d2 + self.epsilon**2)
        return v, d2, a

    def distance(self, x) -> np.ndarray:
        _, d2, _ = self._prep(x, singular=False)
        return np.sqrt(d2)

    def weight(self, x) -> np.ndarray:
        return self._prep(x, singular=False)[2]

    def vector(self, x) -> np.ndarray:
        v, _, a = self._prep(x, singular=True)
        return v / a[..., None]

    def jacobian(self, x) -> np.ndarray:
        v, _, a = self._prep(x, singular=True)
        a = a[..., None, None]
        return self.Q / a - v[..., :, None] * v[..., None, :] / a**3

    def div(self, x) -> np.ndarray:
        _, _, a = self._prep(x, singular=True)
        return self.div_from_a(a)

    def neg_lap_div(self, x) -> np.ndarray:
        _, _, a = self._prep(x, singular=True)
        return self.neg_lap_div_from_a(a)

    def div_from_a(self, a):
        T, c, e2 = self.trace_q, self.c, self.epsilon**2
        return (T - c) / a + c * e2 / a**3

    def neg_lap_div_from_a(self, a):
        T, c, e2 = self.trace_q, self.c, self.epsilon**2
        lap = (T - c) * ((3 * c - T) / a**3 - 3 * c * e2 / a**5) + c * e2 * (
            (15 * c - 3 * T) / a**5 - 15 * c * e2 / a**7
        )
        return -lap

    def embed_reduced(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return self.origin + z @ self.reduced_embedding.T


def _orthonormal_complement(vec: np.ndarray) -> np.ndarray:
    vec = vec / np.linalg.norm(vec)
    basis, _ = np.linalg.qr(np.column_stack([vec, np.eye(len(vec))]))
    return basis[:, 1:len(vec)]


def radial_weight(n: int, epsilon: float, center=None) -> VectorFieldSpec:
    """``a = sqrt(|x - center|^2 + eps^2)`` in ``R^n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    origin = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    return VectorFieldSpec(
        "radial", n, float(epsilon), np.eye(n), 1.0, origin, np.eye(n, 3),
        8 * np.pi if n == 3 else float("nan"), {"n": n},
    )


def pair_weight_3d(epsilon: float) -> VectorFieldSpec:
    """``a = sqrt(|y - z|^2 + eps^2)`` on ``R^3 x R^3``; the Jacobian has blocks ``[[b, -b], [-b, b]]``."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    eye = np.eye(3)
    Q = np.block([[eye, -eye], [-eye, eye]])
    emb = np.vstack([eye, np.zeros((3, 3))])
    return VectorFieldSpec("pair3d", 6, float(epsilon), Q, 2.0, np.zeros(6), emb, 32 * np.pi)


def line_diagonal_weight_2d(line: Line2D, epsilon: float) -> VectorFieldSpec:
    """Distance in ``R^2 x R^2`` to the lifted diagonal ``{x1 = x2 = x(l)}`` of a straight line.

    In the frame where the line is the x-axis through the origin,
    ``d^2 = (y1 - y3)^2 / 2 + y2^2 + y4^2``.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    w, n = line.direction, line.normal
    rot = np.vstack([w, n])  # frame coordinates (along, across) = rot @ (x - x0)
    J = np.zeros((4, 4))
    J[:2, :2] = rot
    J[2:, 2:] = rot
    e = np.array([1.0, 0.0, 1.0, 0.0]) / np.sqrt(2)
    P = np.eye(4) - np.outer(e, e)
    Q = J.T @ P @ J
    x0 = np.asarray(line.point, dtype=float)
    origin = np.concatenate([x0, x0])
    r2 = 1 / np.sqrt(2)
    # (s, y2, y4) -> frame coordinates (s/sqrt2, y2, -s/sqrt2, y4)
    frame = np.array([[r2, 0, 0], [0, 1, 0], [-r2, 0, 0], [0, 0, 1]])
    return VectorFieldSpec(
        "line_diag_2d", 4, float(epsilon), Q, 1.0, origin, J.T @ frame, 8 * np.pi,
        {"line": line},
    )


def diag_1d_weight(epsilon: float) -> VectorFieldSpec:
    """Distance in ``R^4`` to the diagonal ``span{(1,1,1,1)}``."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    ones = np.ones(4)
    Q = np.eye(4) - np.outer(ones, ones) / 4
    return VectorFieldSpec(
        "diag_1d", 4, float(epsilon), Q, 1.0, np.zeros(4), _orthonormal_complement(ones), 8 * np.pi
    )


# ---------------------------------------------------------------------------
# verification


@dataclass
class IdentityReport:
    kind: str
    epsilon: float
    n_points: int
    jacobian_symmetry: float
    trace_vs_div: float
    fd_gradient: float
    fd_jacobian: float
    fd_neg_lap_div: float
    psd_min_eigenvalue: float
    max_norm_x: float
    norm_bound: float
    thresholds: dict = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        t = self.thresholds
        out = []
        if self.jacobian_symmetry > t["symmetry"]:
            out.append("jacobian_symmetry")
        if self.trace_vs_div > t["trace"]:
            out.append("trace_vs_div")
        if self.fd_gradient > t["fd"]:
            out.append("fd_gradient")
        if self.fd_jacobian > t["fd"]:
            out.append("fd_jacobian")
        if self.fd_neg_lap_div > t["fd_lap"]:
            out.append("fd_neg_lap_div")
        if self.psd_min_eigenvalue < -t["psd"]:
            out.append("psd")
        if self.max_norm_x > self.norm_bound + t["norm_rounding"]:
            out.append("norm_bound")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures

    def checks(self) -> list[tuple[str, float, float]]:
        """``(name, value, bound)`` triples, each passing iff ``value <= bound``."""
        t = self.thresholds
        return [
            ("symmetry", self.jacobian_symmetry, t["symmetry"]),
            ("trace", self.trace_vs_div, t["trace"]),
            ("fd-gradient", self.fd_gradient, t["fd"]),
            ("fd-jacobian", self.fd_jacobian, t["fd"]),
            ("fd-neg-lap-div", self.fd_neg_lap_div, t["fd_lap"]),
            ("psd", -self.psd_min_eigenvalue, t["psd"]),
            ("norm", self.max_norm_x, self.norm_bound + t["norm_rounding"]),
        ]


def sample_points(spec: VectorFieldSpec, count: int, seed: int = 0, scale: float = 1.5,
                  min_distance: float = 0.0) -> np.ndarray:
    """Gaussian sample points, rejecting those closer than ``min_distance`` to the singular set."""
    rng = np.random.default_rng(seed)
    out = []
    while sum(len(o) for o in out) < count:
        pts = spec.origin + scale * rng.standard_normal((2 * count, spec.ambient_dim))
        keep = spec.distance(pts) > min_distance
        out.append(pts[keep])
    return np.concatenate(out)[:count]


def _central_diff(fn, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences of ``fn`` along every ambient axis; result ``(..., *out, D)``."""
    cols = []
    for i in range(x.shape[-1]):
        step = np.zeros(x.shape[-1])
        step[i] = h
        cols.append((fn(x + step) - fn(x - step)) / (2 * h))
    return np.stack(cols, axis=-1)


def verify_field_identities(
    spec: VectorFieldSpec,
    sample_points: np.ndarray,
    h_fd: float = 1e-5,
    h_lap: float = 1e-3,
) -> IdentityReport:
    """Residuals of the structural identities of ``spec`` at the given points.

    The finite-difference checks are an independent route: they only use
    ``weight`` (for the gradient), ``vector`` (for the Jacobian) and ``div``
    (for ``-Lap div X``, reported relative to its local magnitude).
    """
    x = np.asarray(sample_points, dtype=float)
    X = spec.vector(x)
    jac = spec.jacobian(x)
    div = spec.div(x)

    sym = float(np.max(np.abs(jac - np.swapaxes(jac, -1, -2)))) if len(x) else 0.0
    tr = float(np.max(np.abs(np.trace(jac, axis1=-2, axis2=-1) - div)))
    fd_grad = float(np.max(np.abs(_central_diff(spec.weight, x, h_fd) - X)))
    # d X^k / d x_j  ->  jac[..., j, k]
    fd_j = np.swapaxes(_central_diff(spec.vector, x, h_fd), -1, -2)
    fd_jac = float(np.max(np.abs(fd_j - jac)))

    lap = np.zeros(len(x))
    f0 = spec.div(x)
    for i in range(spec.ambient_dim):
        step = np.zeros(spec.ambient_dim)
        step[i] = h_lap
        lap += (spec.div(x + step) - 2 * f0 + spec.div(x - step)) / h_lap**2
    nld = spec.neg_lap_div(x)
    scale = np.abs(nld) + np.abs(f0) / np.maximum(spec.weight(x), 1e-300) ** 2
    fd_lap = float(np.max(np.abs(-lap - nld) / scale))

    eig = np.linalg.eigvalsh(0.5 * (jac + np.swapaxes(jac, -1, -2)))
    norm_x = float(np.max(np.linalg.norm(X, axis=-1)))
    return IdentityReport(
        kind=spec.kind,
        epsilon=spec.epsilon,
        n_points=len(x),
        jacobian_symmetry=sym,
        trace_vs_div=tr,
        fd_gradient=fd_grad,
        fd_jacobian=fd_jac,
        fd_neg_lap_div=fd_lap,
        psd_min_eigenvalue=float(eig.min()),
        max_norm_x=norm_x,
        norm_bound=1 + 3 * spec.epsilon,
        thresholds={"symmetry": 1e-12, "trace": 1e-12, "fd": 1e-6, "fd_lap": 1e-3, "psd": 1e-12,
                    "norm_rounding": 1e-12},
    )


def contraction_residual(spec: VectorFieldSpec, points: np.ndarray, seed: int = 0) -> float:
    """Max relative gap between ``grad X : sigma`` and its reduced closed form.

    ``sigma = 2 Re(v conj(v)^T)`` for random complex ``v``; the closed form is
    ``(2/a) (|v_z|^2 - |z . v_z|^2 / a^2)`` with ``v_z`` the reduced components.
    """
    x = np.asarray(points, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    sigma = 2 * np.real(v[..., :, None] * np.conj(v)[..., None, :])
    jac = spec.jacobian(x)
    lhs = np.einsum("...jk,...jk->...", jac, sigma)
    E = spec.reduced_embedding
    # Reduced coordinates: Q (x - o) = E z for projector weights.
    z = (x - spec.origin) @ E
    vz = v @ E
    a = spec.weight(x)
    zv = np.einsum("...i,...i->...", z, vz)
    rhs = (2 / a) * (np.sum(np.abs(vz) ** 2, axis=-1) - np.abs(zv) ** 2 / a**2)
    return float(np.max(np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs) + 1e-300)))


@dataclass
class DeltaLimitRow:
    epsilon: float
    value: float
    target: float

    @property
    def rel_error(self) -> float:
        return abs(self.value - self.target) / abs(self.target)


@dataclass
class DeltaLimitTable:
    kind: str
    rows: list[DeltaLimitRow]

    @property
    def monotone(self) -> bool:
        errs = [r.rel_error for r in self.rows]
        # Quadrature noise floor ~1e-10: ignore wiggles below it.
        return all(b <= a + 1e-10 for a, b in zip(errs, errs[1:]))


def delta_limit_check(
    spec: VectorFieldSpec, test_gaussian_width: float, epsilons
) -> DeltaLimitTable:
    """Integrate ``-Lap div X`` against ``exp(-|z|^2 / w^2)`` over the reduced variable.

    The integrand depends only on ``|z|``, so the 3-d integral reduces to an
    adaptive radial quadrature, split where the kernel changes scale.
    """
    eps_list = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilons must be positive and strictly decreasing")
    w = float(test_gaussian_width)
    rows = []
    for eps in eps_list:
        s = spec.with_epsilon(eps)
        direction = np.array([1.0, 0.0, 0.0])

        def integrand(r, s=s):
            x = s.embed_reduced(r * direction)
            return float(s.neg_lap_div(x)) * np.exp(-(r / w) ** 2) * 4 * np.pi * r**2

        # Beyond 12 w the Gaussian factor is below e^-144.
        breaks = sorted({0.0, eps, 10 * eps, 100 * eps, 1000 * eps, 12 * w})
        total = 0.0
        for lo, hi in zip(breaks, breaks[1:]):
            total += sint.quad(integrand, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
        rows.append(DeltaLimitRow(eps, total, spec.delta_constant))
    return DeltaLimitTable(spec.kind, rows)
