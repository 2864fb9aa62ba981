"""Jump kernels K(y) = a(y) / |y|^(d + sigma) on a polar mesh.

Conventions
-----------
- The density table ``a`` stores the full factor including the (2 - sigma)
  gap, so the admissible ellipticity band is
  [(2 - sigma) * nu, (2 - sigma) * lambda_up].
- Mesh: log-spaced radial shells on [r_min, r_max] times angular cells;
  ``a`` extends constantly along rays below r_min and above r_max, which
  keeps every radial moment integral in closed form.
- Angular cells: d=1 -> the two directions {+1, -1} (cell 0 is +1);
  d=2 -> equal sectors of the circle; d=3 -> equal-area bands in
  cos(polar angle) times azimuthal sectors, indexed band-major.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from ._oscillatory import power_integral
from .errors import CancellationError, KernelError

DEFAULT_R_MIN = 1e-6
DEFAULT_R_MAX = 1e3
_BAND_SLACK = 1e-12

__all__ = [
    "Chi",
    "ChiKind",
    "DecompositionMode",
    "EllipticityReport",
    "KernelSpec",
    "SignedDensity",
    "cancellation_defect",
    "check_ellipticity",
    "decompose",
    "drift_vector",
    "enforce_cancellation",
    "eval_kernel",
    "first_moment_integral",
    "kernel_from_json",
    "kernel_mass",
    "kernel_to_json",
    "load_kernel",
    "make_random_kernel",
    "save_kernel",
    "scale_kernel",
    "second_moment_integral",
    "shell_first_moments",
    "sphere_measure",
]


class ChiKind(Enum):
    ZERO = "zero"
    BALL_INDICATOR = "ball"
    ONE = "one"


@dataclass(frozen=True)
class Chi:
    """Gradient compensator: 0 for sigma < 1, ball indicator for sigma = 1,
    identically 1 for sigma > 1."""

    kind: ChiKind
    radius: float = 1.0

    @classmethod
    def for_sigma(cls, sigma: float, radius: float = 1.0) -> "Chi":
        if sigma < 1.0:
            return cls(ChiKind.ZERO)
        if sigma == 1.0:
            if radius <= 0:
                raise ValueError("ball compensator needs radius > 0")
            return cls(ChiKind.BALL_INDICATOR, radius)
        return cls(ChiKind.ONE)


class DecompositionMode(Enum):
    EVEN_ODD = "even_odd"
    MIN_RESIDUAL = "min_residual"


def sphere_measure(d: int) -> float:
    """Surface measure of the unit sphere (counting measure when d = 1)."""
    return {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[d]


def _normalize_theta_cells(d, theta_cells):
    if d == 1:
        if theta_cells in (None, 2):
            return 2
        raise KernelError("d=1 mesh has exactly the two direction cells")
    if d == 2:
        n = int(theta_cells)
        if n < 2:
            raise KernelError("need at least 2 angular sectors")
        return n
    if d == 3:
        if isinstance(theta_cells, (int, np.integer)):
            return (int(theta_cells), int(theta_cells))
        n_mu, n_phi = theta_cells
        return (int(n_mu), int(n_phi))
    raise KernelError("dimension must be 1, 2, or 3")


def n_cells(d, theta_cells) -> int:
    tc = _normalize_theta_cells(d, theta_cells)
    if d == 1:
        return 2
    if d == 2:
        return tc
    return tc[0] * tc[1]


def _arc_first_moment(a0, a1):
    return np.stack([np.sin(a1) - np.sin(a0), np.cos(a0) - np.cos(a1)], axis=-1)


@lru_cache(maxsize=32)
def cell_geometry(d: int, theta_cells):
    """Closed-form angular cell data: measures A_c, first moments
    m_c = int_cell unit_vector, second moments S_c = int_cell v v^T, and
    the antipodal cell permutation (None when the mesh is not antipodally
    aligned)."""
    tc = theta_cells
    if d == 1:
        measures = np.array([1.0, 1.0])
        moments = np.array([[1.0], [-1.0]])
        second = np.array([[[1.0]], [[1.0]]])
        antipode = np.array([1, 0])
        return measures, moments, second, antipode
    if d == 2:
        n = tc
        a0 = 2.0 * np.pi * np.arange(n) / n
        a1 = a0 + 2.0 * np.pi / n
        measures = np.full(n, 2.0 * np.pi / n)
        moments = _arc_first_moment(a0, a1)
        cos2 = 0.25 * (np.sin(2 * a1) - np.sin(2 * a0))
        sincos = 0.25 * (np.cos(2 * a0) - np.cos(2 * a1))
        half = np.pi / n
        second = np.empty((n, 2, 2))
        second[:, 0, 0] = half + cos2
        second[:, 1, 1] = half - cos2
        second[:, 0, 1] = second[:, 1, 0] = sincos
        antipode = (np.arange(n) + n // 2) % n if n % 2 == 0 else None
        return measures, moments, second, antipode
    n_mu, n_phi = tc
    mu = -1.0 + 2.0 * np.arange(n_mu + 1) / n_mu
    phi = 2.0 * np.pi * np.arange(n_phi + 1) / n_phi
    mu0, mu1 = mu[:-1], mu[1:]
    p0, p1 = phi[:-1], phi[1:]
    dmu = mu1 - mu0
    dphi = 2.0 * np.pi / n_phi

    def asin_term(m):
        return 0.5 * (m * np.sqrt(np.maximum(1.0 - m * m, 0.0)) + np.arcsin(m))

    i_s = asin_term(mu1) - asin_term(mu0)  # int sqrt(1-mu^2) dmu
    k2 = (mu1 - mu1**3 / 3.0) - (mu0 - mu0**3 / 3.0)  # int (1-mu^2) dmu
    kmu2 = (mu1**3 - mu0**3) / 3.0
    kmus = ((1.0 - mu0**2) ** 1.5 - (1.0 - mu1**2) ** 1.5) / 3.0
    jc = np.sin(p1) - np.sin(p0)
    js = np.cos(p0) - np.cos(p1)
    jc2 = 0.5 * dphi + 0.25 * (np.sin(2 * p1) - np.sin(2 * p0))
    js2 = 0.5 * dphi - 0.25 * (np.sin(2 * p1) - np.sin(2 * p0))
    jsc = 0.5 * (np.sin(p1) ** 2 - np.sin(p0) ** 2)

    nc = n_mu * n_phi
    measures = np.repeat(dmu, n_phi) * dphi
    moments = np.empty((nc, 3))
    second = np.empty((nc, 3, 3))
    for i in range(n_mu):
        sl = slice(i * n_phi, (i + 1) * n_phi)
        moments[sl, 0] = i_s[i] * jc
        moments[sl, 1] = i_s[i] * js
        moments[sl, 2] = 0.5 * (mu1[i] ** 2 - mu0[i] ** 2) * dphi
        second[sl, 0, 0] = k2[i] * jc2
        second[sl, 1, 1] = k2[i] * js2
        second[sl, 0, 1] = second[sl, 1, 0] = k2[i] * jsc
        second[sl, 2, 2] = kmu2[i] * dphi
        second[sl, 0, 2] = second[sl, 2, 0] = kmus[i] * jc
        second[sl, 1, 2] = second[sl, 2, 1] = kmus[i] * js
    if n_phi % 2 == 0:
        band = np.arange(n_mu)[::-1]
        sect = (np.arange(n_phi) + n_phi // 2) % n_phi
        antipode = (band[:, None] * n_phi + sect[None, :]).ravel()
    else:
        antipode = None
    return measures, moments, second, antipode


def cell_of_direction(d, theta_cells, vec):
    """Angular cell indices for unit direction(s) vec of shape (..., d)."""
    tc = _normalize_theta_cells(d, theta_cells)
    vec = np.asarray(vec, dtype=float)
    if d == 1:
        return np.where(vec[..., 0] > 0, 0, 1).astype(np.intp)
    if d == 2:
        ang = np.mod(np.arctan2(vec[..., 1], vec[..., 0]), 2.0 * np.pi)
        return np.minimum((ang / (2.0 * np.pi / tc)).astype(np.intp), tc - 1)
    n_mu, n_phi = tc
    r = np.linalg.norm(vec, axis=-1)
    mu = np.clip(vec[..., 2] / r, -1.0, 1.0)
    band = np.minimum(((mu + 1.0) * 0.5 * n_mu).astype(np.intp), n_mu - 1)
    ang = np.mod(np.arctan2(vec[..., 1], vec[..., 0]), 2.0 * np.pi)
    sect = np.minimum((ang / (2.0 * np.pi / n_phi)).astype(np.intp), n_phi - 1)
    return band * n_phi + sect


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Immutable description of K(y) = a(y) / |y|^(d + sigma).

    values[i, c] is the density a on radial shell i (between r_edges[i]
    and r_edges[i+1]) and angular cell c; it must lie in the ellipticity
    band [(2 - sigma) nu, (2 - sigma) lambda_up].
    """

    d: int
    sigma: float
    nu: float
    lambda_up: float
    r_edges: np.ndarray
    theta_cells: object
    values: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise KernelError("dimension must be 1, 2, or 3")
        if not 0.0 < self.sigma < 2.0:
            raise KernelError("sigma must lie in (0, 2)")
        if self.nu < 0 or self.lambda_up < self.nu:
            raise KernelError("need 0 <= nu <= lambda_up")
        tc = _normalize_theta_cells(self.d, self.theta_cells)
        object.__setattr__(self, "theta_cells", tc)
        edges = np.array(self.r_edges, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or (np.diff(edges) <= 0).any():
            raise KernelError("r_edges must be strictly increasing")
        if edges[0] <= 0:
            raise KernelError("innermost shell edge must be positive")
        vals = np.array(self.values, dtype=float)
        if vals.shape != (len(edges) - 1, n_cells(self.d, tc)):
            raise KernelError(
                f"values must have shape (n_r, n_cells) = "
                f"({len(edges) - 1}, {n_cells(self.d, tc)}), got {vals.shape}"
            )
        slack = _BAND_SLACK * max(1.0, self.band_hi)
        if (vals < self.band_lo - slack).any() or (vals > self.band_hi + slack).any():
            raise KernelError("density values leave the ellipticity band")
        edges.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "r_edges", edges)
        object.__setattr__(self, "values", vals)
        if self.symmetric:
            anti = cell_geometry(self.d, tc)[3]
            if anti is None:
                raise KernelError("mesh is not antipodally aligned")
            if not np.array_equal(vals, vals[:, anti]):
                raise KernelError("symmetric flag set but a(y) != a(-y)")

    @property
    def band_lo(self) -> float:
        return (2.0 - self.sigma) * self.nu

    @property
    def band_hi(self) -> float:
        return (2.0 - self.sigma) * self.lambda_up

    @property
    def n_r(self) -> int:
        return len(self.r_edges) - 1

    @property
    def r_min(self) -> float:
        return float(self.r_edges[0])

    @property
    def r_max(self) -> float:
        return float(self.r_edges[-1])

    def geometry(self):
        return cell_geometry(self.d, self.theta_cells)

    def shell_row(self, r):
        """Shell index supplying a at radius r (constant extension)."""
        idx = np.searchsorted(self.r_edges, r, side="right") - 1
        return np.clip(idx, 0, self.n_r - 1)

    def density(self, y):
        """a(y) for points y of shape (..., d)."""
        y = np.asarray(y, dtype=float)
        r = np.linalg.norm(y, axis=-1)
        cells = cell_of_direction(self.d, self.theta_cells, y)
        return self.values[self.shell_row(r), cells]


def log_shell_edges(n_r, r_min=DEFAULT_R_MIN, r_max=DEFAULT_R_MAX):
    return np.geomspace(r_min, r_max, n_r + 1)


def uniform_kernel(
    d,
    sigma,
    a_value,
    nu=None,
    lambda_up=None,
    n_r=24,
    r_min=DEFAULT_R_MIN,
    r_max=DEFAULT_R_MAX,
) -> KernelSpec:
    """Kernel with constant density a(y) = a_value (symmetric, isotropic)."""
    gap = 2.0 - sigma
    nu = a_value / gap if nu is None else nu
    lambda_up = a_value / gap if lambda_up is None else lambda_up
    tc = 2 if d == 1 else (16 if d == 2 else (8, 8))
    vals = np.full((n_r, n_cells(d, tc)), float(a_value))
    return KernelSpec(
        d, sigma, nu, lambda_up, log_shell_edges(n_r, r_min, r_max), tc, vals,
        symmetric=True,
    )


def cell_centers(d, theta_cells) -> np.ndarray:
    """Unit direction at the centre of each angular cell, shape (nc, d)."""
    tc = _normalize_theta_cells(d, theta_cells)
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        ang = 2.0 * np.pi * (np.arange(tc) + 0.5) / tc
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    n_mu, n_phi = tc
    mu = -1.0 + 2.0 * (np.arange(n_mu) + 0.5) / n_mu
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    s = np.sqrt(1.0 - mu**2)
    out = np.empty((n_mu * n_phi, 3))
    for i in range(n_mu):
        sl = slice(i * n_phi, (i + 1) * n_phi)
        out[sl, 0] = s[i] * np.cos(phi)
        out[sl, 1] = s[i] * np.sin(phi)
        out[sl, 2] = mu[i]
    return out


def kernel_from_function(
    fn,
    d,
    sigma,
    nu,
    lambda_up,
    n_r=24,
    n_theta=None,
    r_min=DEFAULT_R_MIN,
    r_max=DEFAULT_R_MAX,
    symmetric=False,
) -> KernelSpec:
    """Tabulate a procedural density y -> a(y) onto the polar mesh.

    The mesh table (sampled at cell centres and geometric-mean radii) is
    the single source of truth afterwards; fn is not retained.
    """
    tc = _normalize_theta_cells(d, 2 if d == 1 else (n_theta or (16 if d == 2 else 8)))
    edges = log_shell_edges(n_r, r_min, r_max)
    radii = np.sqrt(edges[:-1] * edges[1:])
    dirs = cell_centers(d, tc)
    vals = np.empty((n_r, dirs.shape[0]))
    for i, r in enumerate(radii):
        vals[i] = np.array([float(fn(r * v)) for v in dirs])
    return KernelSpec(d, sigma, nu, lambda_up, edges, tc, vals, symmetric=symmetric)


def eval_kernel(spec: KernelSpec, y):
    """K(y) = a(y) / |y|^(d + sigma); y has shape (..., d) (scalars allowed
    when d = 1).  Raises at y = 0 where the kernel is singular."""
    y = np.asarray(y, dtype=float)
    if spec.d == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., None]
    r = np.linalg.norm(y, axis=-1)
    if np.any(r == 0.0):
        raise ValueError("kernel is singular at y = 0")
    return spec.density(y) * r ** (-(spec.d + spec.sigma))


def _radial_cover(spec: KernelSpec, lo: float, hi: float):
    """Break [lo, hi] into intervals of constant shell row, honouring the
    constant extensions below r_min and above r_max.  Yields (row, a, b)."""
    if hi <= lo:
        return
    cuts = [lo] + [float(e) for e in spec.r_edges if lo < e < hi] + [hi]
    for a, b in zip(cuts[:-1], cuts[1:]):
        if np.isinf(b):
            probe = max(2.0 * a, a + 1.0)
        elif a == 0.0:
            probe = 0.5 * b
        else:
            probe = 0.5 * (a + b)
        yield int(spec.shell_row(probe)), a, b


def kernel_mass(spec: KernelSpec, lo: float, hi: float) -> float:
    """int_{lo < |y| < hi} K(y) dy (closed form on the mesh)."""
    measures = spec.geometry()[0]
    total = 0.0
    for row, a, b in _radial_cover(spec, lo, hi):
        total += float(spec.values[row] @ measures) * float(
            power_integral(a, b, -1.0 - spec.sigma)
        )
    return total


def first_moment_integral(spec: KernelSpec, lo: float, hi: float) -> np.ndarray:
    """int_{lo < |y| < hi} y K(y) dy as a d-vector."""
    moments = spec.geometry()[1]
    out = np.zeros(spec.d)
    for row, a, b in _radial_cover(spec, lo, hi):
        out += (spec.values[row] @ moments) * float(
            power_integral(a, b, -spec.sigma)
        )
    return out


def second_moment_integral(spec: KernelSpec, lo: float, hi: float) -> np.ndarray:
    """int_{lo < |y| < hi} y y^T K(y) dy as a (d, d) matrix."""
    second = spec.geometry()[2]
    out = np.zeros((spec.d, spec.d))
    for row, a, b in _radial_cover(spec, lo, hi):
        out += np.einsum("c,cij->ij", spec.values[row], second) * float(
            power_integral(a, b, 1.0 - spec.sigma)
        )
    return out


def _paired_moment(vals_row, moments, antipode):
    """First angular moment of one shell, summed over antipodal pairs so a
    symmetric row gives exactly zero in floating point."""
    if antipode is None:
        return vals_row @ moments
    nc = len(vals_row)
    out = np.zeros(moments.shape[1])
    seen = np.zeros(nc, dtype=bool)
    for c in range(nc):
        if seen[c]:
            continue
        cb = antipode[c]
        seen[c] = seen[cb] = True
        out += (vals_row[c] - vals_row[cb]) * moments[c]
    return out


def shell_first_moments(spec: KernelSpec) -> np.ndarray:
    """Per-shell first angular moments sum_c a_c m_c, shape (n_r, d); the
    surface-integral cancellation defect at radius r is this divided by r."""
    _, moments, _, antipode = spec.geometry()
    return np.array(
        [_paired_moment(spec.values[i], moments, antipode) for i in range(spec.n_r)]
    )


def cancellation_defect(spec: KernelSpec, r: float) -> np.ndarray:
    """Surface integral int_{|y| = r} y K(y) dS_r(y) as a d-vector."""
    if r <= 0:
        raise ValueError("radius must be positive")
    _, moments, _, antipode = spec.geometry()
    row = int(spec.shell_row(r))
    return _paired_moment(spec.values[row], moments, antipode) / r


@dataclass(frozen=True)
class EllipticityReport:
    min_ratio: float
    max_ratio: float
    passed: bool
    a_min: float
    a_max: float


def check_ellipticity(spec: KernelSpec, n_samples: int, seed: int = 0):
    """Report where sampled/table density values sit inside the band.

    Ratios are normalized band positions: 0 at (2-sigma) nu, 1 at
    (2-sigma) lambda_up.  Report-only; never raises.
    """
    rng = np.random.default_rng(seed)
    vals = [spec.values.ravel()]
    if n_samples >= 1:
        r = np.exp(
            rng.uniform(np.log(spec.r_min / 10), np.log(spec.r_max * 10), n_samples)
        )
        if spec.d == 1:
            vec = np.where(rng.random(n_samples) < 0.5, -1.0, 1.0)[:, None]
        else:
            vec = rng.normal(size=(n_samples, spec.d))
            vec /= np.linalg.norm(vec, axis=1, keepdims=True)
        vals.append(spec.density(vec * r[:, None]))
    allv = np.concatenate(vals)
    a_min, a_max = float(allv.min()), float(allv.max())
    width = spec.band_hi - spec.band_lo
    if width < 1e-300:
        mid_ok = max(abs(a_min - spec.band_lo), abs(a_max - spec.band_lo))
        ok = mid_ok <= _BAND_SLACK * max(1.0, spec.band_hi)
        ratio = 0.5 if ok else np.inf
        return EllipticityReport(ratio, ratio, ok, a_min, a_max)
    lo_ratio = (a_min - spec.band_lo) / width
    hi_ratio = (a_max - spec.band_lo) / width
    tol = _BAND_SLACK * max(1.0, spec.band_hi) / width
    passed = (lo_ratio >= -tol) and (hi_ratio <= 1.0 + tol)
    return EllipticityReport(float(lo_ratio), float(hi_ratio), passed, a_min, a_max)


@dataclass(frozen=True, eq=False)
class SignedDensity:
    """Mesh-aligned density table that may leave the band or change sign
    (the residual part of a kernel decomposition)."""

    d: int
    sigma: float
    r_edges: np.ndarray
    theta_cells: object
    values: np.ndarray

    def eval(self, y):
        y = np.asarray(y, dtype=float)
        if self.d == 1 and (y.ndim == 0 or y.shape[-1] != 1):
            y = y[..., None]
        r = np.linalg.norm(y, axis=-1)
        idx = np.clip(
            np.searchsorted(self.r_edges, r, side="right") - 1,
            0,
            self.values.shape[0] - 1,
        )
        cells = cell_of_direction(self.d, self.theta_cells, y)
        return self.values[idx, cells] * r ** (-(self.d + self.sigma))


def decompose(spec: KernelSpec, mode: DecompositionMode):
    """Split K into a symmetric kernel plus a residual density table.

    EVEN_ODD: K_e = (K(y) + K(-y)) / 2 and the skew part K - K_e.
    MIN_RESIDUAL: K_1 = min(K(y), K(-y)) (keeps both ellipticity bounds)
    and the nonnegative remainder K_2 = K - K_1.
    """
    anti = spec.geometry()[3]
    if anti is None:
        raise KernelError("decomposition needs an antipodally aligned mesh")
    v = spec.values
    va = v[:, anti]
    if mode is DecompositionMode.EVEN_ODD:
        sym = 0.5 * (v + va)
    elif mode is DecompositionMode.MIN_RESIDUAL:
        sym = np.minimum(v, va)
    else:
        raise ValueError(f"unknown decomposition mode {mode!r}")
    part1 = KernelSpec(
        spec.d,
        spec.sigma,
        spec.nu,
        spec.lambda_up,
        spec.r_edges,
        spec.theta_cells,
        sym,
        symmetric=True,
    )
    rest = SignedDensity(spec.d, spec.sigma, spec.r_edges, spec.theta_cells, v - sym)
    return part1, rest


def drift_vector(spec: KernelSpec) -> np.ndarray:
    """Constant drift turning the unified ball compensator into the
    sigma-adapted one: b = -int_{B_1} y K dy for sigma < 1 and
    b = int_{|y| > 1} y K dy for sigma > 1.  Undefined at sigma = 1."""
    if spec.sigma == 1.0:
        raise ValueError("drift vector is defined only for sigma != 1")
    if spec.sigma < 1.0:
        return -first_moment_integral(spec, 0.0, 1.0)
    return first_moment_integral(spec, 1.0, np.inf)


def enforce_cancellation(
    spec: KernelSpec, tol: float = 1e-13, max_iter: int = 100
) -> KernelSpec:
    """Project out per-shell first angular moments, clamping to the band.

    Raises CancellationError if clamping keeps re-introducing a moment
    (band too narrow for the requested correction).
    """
    measures, moments, _, antipode = spec.geometry()
    q = (moments[:, :, None] * moments[:, None, :] / measures[:, None, None]).sum(0)
    vals = spec.values.copy()
    scale = max(1.0, float(np.abs(vals).max()))
    for i in range(spec.n_r):
        row = vals[i]
        for _ in range(max_iter):
            m1 = _paired_moment(row, moments, antipode)
            if np.linalg.norm(m1) <= tol * scale:
                break
            beta = np.linalg.solve(q, m1)
            row = row - (moments / measures[:, None]) @ beta
            np.clip(row, spec.band_lo, spec.band_hi, out=row)
        else:
            raise CancellationError(
                f"shell {i}: residual moment "
                f"{np.linalg.norm(_paired_moment(row, moments, antipode)):.2e} "
                f"after {max_iter} projections"
            )
        vals[i] = row
    return KernelSpec(
        spec.d,
        spec.sigma,
        spec.nu,
        spec.lambda_up,
        spec.r_edges,
        spec.theta_cells,
        vals,
        symmetric=spec.symmetric and bool(np.array_equal(vals, spec.values)),
    )


def make_random_kernel(
    d,
    sigma,
    nu,
    lambda_up,
    seed,
    n_r=24,
    n_theta=None,
    r_min=DEFAULT_R_MIN,
    r_max=DEFAULT_R_MAX,
) -> KernelSpec:
    """Merely-measurable kernel: i.i.d. uniform cell values in the band,
    deterministic in seed; sigma = 1 output is cancellation-projected."""
    tc = _normalize_theta_cells(d, 2 if d == 1 else (n_theta or (16 if d == 2 else 8)))
    rng = np.random.default_rng(int(seed))
    gap = 2.0 - sigma
    vals = rng.uniform(gap * nu, gap * lambda_up, size=(n_r, n_cells(d, tc)))
    spec = KernelSpec(
        d,
        sigma,
        nu,
        lambda_up,
        log_shell_edges(n_r, r_min, r_max),
        tc,
        vals,
        symmetric=bool(nu == lambda_up),
    )
    if sigma == 1.0:
        spec = enforce_cancellation(spec)
    return spec


def scale_kernel(spec: KernelSpec, r_scale: float) -> KernelSpec:
    """The kernel K_R(z) = R^(d+sigma) K(R z), i.e. a_R(z) = a(R z)."""
    return KernelSpec(
        spec.d,
        spec.sigma,
        spec.nu,
        spec.lambda_up,
        spec.r_edges / r_scale,
        spec.theta_cells,
        spec.values,
        symmetric=spec.symmetric,
    )


def validate(spec: KernelSpec, cancel_tol: float = 1e-10) -> list:
    """Non-constructor invariants; returns a list of violation strings."""
    problems = []
    rep = check_ellipticity(spec, 0)
    if not rep.passed:
        problems.append("density leaves the ellipticity band")
    if spec.sigma == 1.0:
        worst = float(np.abs(shell_first_moments(spec)).max())
        if worst > cancel_tol:
            problems.append(f"sigma=1 cancellation violated (moment {worst:.2e})")
    return problems


def kernel_to_json(spec: KernelSpec) -> str:
    tc = spec.theta_cells
    doc = {
        "d": spec.d,
        "sigma": spec.sigma,
        "nu": spec.nu,
        "lambda": spec.lambda_up,
        "r_grid": spec.r_edges.tolist(),
        "theta_cells": list(tc) if isinstance(tc, tuple) else tc,
        "values": spec.values.tolist(),
    }
    if spec.symmetric:
        doc["symmetric"] = True
    return json.dumps(doc)


def kernel_from_json(text: str) -> KernelSpec:
    doc = json.loads(text)
    tc = doc["theta_cells"]
    return KernelSpec(
        int(doc["d"]),
        float(doc["sigma"]),
        float(doc["nu"]),
        float(doc["lambda"]),
        np.array(doc["r_grid"], dtype=float),
        tuple(tc) if isinstance(tc, list) else tc,
        np.array(doc["values"], dtype=float),
        symmetric=bool(doc.get("symmetric", False)),
    )


def save_kernel(spec: KernelSpec, path):
    with open(path, "w") as fh:
        fh.write(kernel_to_json(spec))


def load_kernel(path) -> KernelSpec:
    with open(path) as fh:
        return kernel_from_json(fh.read())
