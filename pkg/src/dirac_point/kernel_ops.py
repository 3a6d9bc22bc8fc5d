"""Potential profiles and the Nystrom toolkit for the operator K.

K is the integral operator with kernel (i/2) u(x) sgn(x - y) v(y) where
u = sqrt(|h|) and v = sgn(h) sqrt(|h|) for a profile h.  Its spectrum is
{0} union {c / ((2k+1) pi)} with c = integral of h, its eigenfunctions
are u e^{i (2k+1) pi Theta(x)}, and the renormalized coupling
eta = <v, (I - nu^2 K^2)^{-1} u> has the closed form (2/nu) tan(nu c / 2).
Everything here is discretized by quadrature (composite midpoint by
default) and validated against those closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import linalg as sla
from scipy.special import erf

from .errors import (
    GridMismatch,
    NearPole,
    NotNormalized,
    Overflow,
    SingularSystem,
    ValidationError,
)
from .lambda_bridge import tan_coupling
from .matrix_core import NuBranch

INDICATOR01 = "indicator01"
TRUNCATED_GAUSSIAN = "truncated_gaussian"
TABLE = "table"

MIDPOINT = "midpoint"
TRAPEZOID = "trapezoid"

# distance in nu^2 from the scaled pole set below which solves are refused
_POLE_GUARD = 1e-6
_MAX_MOMENT_ORDER = 8


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PotentialProfile:
    """A real profile h with exact integral data and derived factors.

    ``integral_c`` and ``l1_norm`` are the analytic values of int h and
    int |h| for the stored kind (exact also for table profiles, which are
    piecewise linear).  ``theta`` is the cumulative integral of h from the
    left, so theta(s_lo) = 0 and theta(s_hi) = integral_c.
    """

    kind: str
    support: tuple[float, float]
    integral_c: float
    l1_norm: float
    sign_changing: bool
    label: str
    _h: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _theta: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def h(self, x) -> np.ndarray:
        return self._h(np.asarray(x, dtype=float))

    def u(self, x) -> np.ndarray:
        """sqrt(|h|)."""
        return np.sqrt(np.abs(self.h(x)))

    def v(self, x) -> np.ndarray:
        """sgn(h) sqrt(|h|)."""
        hx = self.h(x)
        return np.sign(hx) * np.sqrt(np.abs(hx))

    def theta(self, x) -> np.ndarray:
        return self._theta(np.asarray(x, dtype=float))

    def h_eps(self, x, eps: float) -> np.ndarray:
        """Rescaled profile h_eps(x) = h(x / eps) / eps."""
        if eps <= 0:
            raise ValidationError("h_eps needs eps > 0")
        return self.h(np.asarray(x, dtype=float) / eps) / eps


def indicator01(scale: float = 1.0) -> PotentialProfile:
    """h = scale * chi_(0,1)."""
    scale = float(scale)

    def h(x):
        return np.where((x > 0.0) & (x < 1.0), scale, 0.0)

    def theta(x):
        return scale * np.clip(x, 0.0, 1.0)

    return PotentialProfile(
        kind=INDICATOR01,
        support=(0.0, 1.0),
        integral_c=scale,
        l1_norm=abs(scale),
        sign_changing=False,
        label=f"indicator01(scale={scale:g})",
        _h=h,
        _theta=theta,
    )


def truncated_gaussian(
    center: float = 0.5, width: float = 0.15, cutoff: float = 3.0, scale: float = 1.0
) -> PotentialProfile:
    """Gaussian bump truncated at |x - center| = cutoff * width.

    Renormalized on the truncation window so that int h = scale exactly.
    """
    center, width, cutoff, scale = map(float, (center, width, cutoff, scale))
    if width <= 0 or cutoff <= 0:
        raise ValidationError("truncated gaussian needs width > 0 and cutoff > 0")
    lo = center - cutoff * width
    hi = center + cutoff * width
    mass = erf(cutoff / math.sqrt(2.0))  # untruncated mass inside the window
    amp = scale / (mass * width * math.sqrt(2.0 * math.pi))

    def h(x):
        t = (x - center) / width
        return np.where(np.abs(t) <= cutoff, amp * np.exp(-0.5 * t * t), 0.0)

    def theta(x):
        t = np.clip((x - center) / width, -cutoff, cutoff)
        cdf = 0.5 * (erf(t / math.sqrt(2.0)) + erf(cutoff / math.sqrt(2.0)))
        return scale * cdf / mass

    return PotentialProfile(
        kind=TRUNCATED_GAUSSIAN,
        support=(lo, hi),
        integral_c=scale,
        l1_norm=abs(scale),
        sign_changing=False,
        label=f"gaussian(center={center:g},width={width:g},cutoff={cutoff:g},scale={scale:g})",
        _h=h,
        _theta=theta,
    )


def _segment_abs_integral(y0: float, y1: float, dx: float) -> float:
    """Exact integral of |linear segment| over a cell of width dx."""
    if y0 * y1 >= 0.0:
        return abs(y0 + y1) / 2.0 * dx
    t = y0 / (y0 - y1) * dx  # zero crossing
    return (abs(y0) * t + abs(y1) * (dx - t)) / 2.0


def table_profile(xs, hs, label: str = "table") -> PotentialProfile:
    """Piecewise-linear profile through the samples (xs, hs), zero outside.

    xs must be strictly increasing and free of NaN; integral and L1 norm
    are the exact values for the interpolant.
    """
    xs = np.asarray(xs, dtype=float)
    hs = np.asarray(hs, dtype=float)
    if xs.ndim != 1 or xs.shape != hs.shape or xs.size < 2:
        raise ValidationError("table profile needs two equal-length 1d columns")
    if np.any(np.isnan(xs)) or np.any(np.isnan(hs)):
        raise ValidationError("table profile contains NaN")
    if np.any(np.diff(xs) <= 0.0):
        raise ValidationError("table abscissae must be strictly increasing")
    dx = np.diff(xs)
    cum = np.concatenate(([0.0], np.cumsum((hs[1:] + hs[:-1]) / 2.0 * dx)))
    total = float(cum[-1])
    l1 = float(
        sum(_segment_abs_integral(hs[i], hs[i + 1], dx[i]) for i in range(len(dx)))
    )

    def h(x):
        inside = (x >= xs[0]) & (x <= xs[-1])
        return np.where(inside, np.interp(x, xs, hs), 0.0)

    def theta(x):
        xc = np.clip(x, xs[0], xs[-1])
        idx = np.clip(np.searchsorted(xs, xc, side="right") - 1, 0, len(xs) - 2)
        x0 = xs[idx]
        h0 = hs[idx]
        hx = np.interp(xc, xs, hs)
        return cum[idx] + (h0 + hx) / 2.0 * (xc - x0)

    return PotentialProfile(
        kind=TABLE,
        support=(float(xs[0]), float(xs[-1])),
        integral_c=total,
        l1_norm=l1,
        sign_changing=bool(hs.min() < 0.0 < hs.max()),
        label=label,
        _h=h,
        _theta=theta,
    )


def profile_from_csv(path) -> PotentialProfile:
    """Load a two-column CSV of (x, h(x)) samples as a table profile."""
    try:
        data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    except ValueError as exc:
        raise ValidationError(f"cannot parse profile CSV: {exc}") from exc
    if data.shape[1] != 2:
        raise ValidationError("profile CSV must have exactly two columns")
    return table_profile(data[:, 0], data[:, 1], label=f"table({path})")


# ---------------------------------------------------------------------------
# quadrature and discrete operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Quadrature nodes and positive weights on [lo, hi]."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    rule: str
    lo: float
    hi: float

    @property
    def size(self) -> int:
        return self.nodes.size


def midpoint_grid(lo: float, hi: float, n: int) -> QuadratureGrid:
    """Composite midpoint rule with n uniform cells."""
    if n < 1 or hi <= lo:
        raise ValidationError("midpoint grid needs n >= 1 and hi > lo")
    step = (hi - lo) / n
    nodes = lo + (np.arange(n) + 0.5) * step
    return QuadratureGrid(nodes, np.full(n, step), MIDPOINT, float(lo), float(hi))


def trapezoid_grid(lo: float, hi: float, n: int) -> QuadratureGrid:
    """Composite trapezoid rule with n cells (n + 1 nodes)."""
    if n < 1 or hi <= lo:
        raise ValidationError("trapezoid grid needs n >= 1 and hi > lo")
    step = (hi - lo) / n
    nodes = lo + np.arange(n + 1) * step
    weights = np.full(n + 1, step)
    weights[0] = weights[-1] = step / 2.0
    return QuadratureGrid(nodes, weights, TRAPEZOID, float(lo), float(hi))


def grid_for(prof: PotentialProfile, n: int, rule: str = MIDPOINT) -> QuadratureGrid:
    """Grid spanning exactly the profile support."""
    lo, hi = prof.support
    if rule == MIDPOINT:
        return midpoint_grid(lo, hi, n)
    if rule == TRAPEZOID:
        return trapezoid_grid(lo, hi, n)
    raise ValidationError(f"unknown quadrature rule {rule!r}")


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Nystrom matrix kernel(x_j, x_l) * w_l, scalar or 2x2-block."""

    matrix: np.ndarray = field(repr=False)
    grid: QuadratureGrid
    block_size: int = 1

    def hs_norm(self) -> float:
        """Discrete Hilbert-Schmidt norm sqrt(sum |kernel|^2 w_j w_l)."""
        w = self.grid.weights
        if self.block_size == 2:
            w = np.repeat(w, 2)
        # matrix carries w_l on columns; unfold to kernel values
        scaled = np.abs(self.matrix) ** 2 * (w[:, None] / w[None, :])
        return float(math.sqrt(np.sum(scaled)))


def build_k(prof: PotentialProfile, grid: QuadratureGrid) -> DiscreteOperator:
    """Nystrom discretization of the kernel (i/2) u(x) sgn(x - y) v(y)."""
    lo, hi = prof.support
    if grid.lo > lo + 1e-12 or grid.hi < hi - 1e-12:
        raise GridMismatch(
            f"grid [{grid.lo}, {grid.hi}] does not cover support [{lo}, {hi}]"
        )
    x = grid.nodes
    sgn = np.sign(x[:, None] - x[None, :])
    mat = 0.5j * prof.u(x)[:, None] * sgn * (prof.v(x) * grid.weights)[None, :]
    return DiscreteOperator(mat, grid, block_size=1)


def k_spectrum(op: DiscreteOperator, count: int) -> np.ndarray:
    """The count largest-modulus eigenvalues, ties broken by ascending argument.

    The weight-symmetrized matrix sqrt(w_j) kernel sqrt(w_l) is similar to
    the Nystrom matrix; when it is hermitian (h >= 0) the hermitian solver
    is used, otherwise a dense general complex solver.
    """
    if op.block_size != 1:
        raise ValidationError("spectrum is computed for scalar-block operators")
    w = op.grid.weights
    sym = op.matrix * np.sqrt(w[:, None] / w[None, :])
    herm_dev = float(np.max(np.abs(sym - sym.conj().T)))
    if herm_dev <= 1e-12 * max(1.0, float(np.max(np.abs(sym)))):
        vals = np.linalg.eigvalsh(sym).astype(complex)
    else:
        vals = np.linalg.eigvals(op.matrix)
    vals = vals[np.argsort(-np.abs(vals), kind="stable")]
    # +-pairs agree in modulus only to discretization accuracy; group such
    # ties and order each group by ascending argument in [0, 2 pi)
    def _arg(v: complex) -> float:
        ang = float(np.angle(v)) % (2.0 * math.pi)
        return 0.0 if ang > 2.0 * math.pi - 1e-9 else ang

    out: list[complex] = []
    i = 0
    while i < vals.size:
        j = i + 1
        head = abs(vals[i])
        while j < vals.size and abs(abs(vals[j]) - head) <= 1e-6 * max(head, 1e-30):
            j += 1
        out.extend(sorted(vals[i:j], key=_arg))
        i = j
    return np.asarray(out[: int(count)], dtype=complex)


def k_eigenvalue_targets(c: float, count: int) -> np.ndarray:
    """First count members of {+-c/((2k+1) pi)} ordered like k_spectrum."""
    out = []
    k = 0
    while len(out) < count:
        lam = c / ((2 * k + 1) * math.pi)
        out.extend([lam, -lam])
        k += 1
    return np.asarray(out[:count], dtype=float)


def psi_k(prof: PotentialProfile, k: int, x) -> np.ndarray:
    """Eigenfunction u(x) e^{i (2k+1) pi Theta(x)} / sqrt(||h||_L1).

    Requires int h = 1 to 1e-10 (the normalization under which the
    eigenvalue law is stated); raises NotNormalized otherwise.
    """
    if abs(prof.integral_c - 1.0) > 1e-10:
        raise NotNormalized(f"int h = {prof.integral_c:.12g}, expected 1")
    phase = np.exp(1j * (2 * k + 1) * math.pi * prof.theta(x))
    return prof.u(x) * phase / math.sqrt(prof.l1_norm)


# ---------------------------------------------------------------------------
# eta, the odd term, and moments
# ---------------------------------------------------------------------------

def _nu_value(nu) -> complex:
    return complex(nu.nu) if isinstance(nu, NuBranch) else complex(nu)


def _guard_near_pole(nusq: complex, c: float) -> None:
    """Refuse nu^2 within 1e-6 of the scaled pole set {((2k+1) pi / c)^2}."""
    if abs(nusq.imag) > 1e-12 or nusq.real <= 0.0 or abs(c) < 1e-12:
        return
    nu = math.sqrt(nusq.real)
    k = max(0, round((nu * abs(c) / math.pi - 1.0) / 2.0))
    for kk in (k - 1, k, k + 1):
        if kk < 0:
            continue
        pole = ((2 * kk + 1) * math.pi / c) ** 2
        if abs(nusq.real - pole) < _POLE_GUARD:
            raise NearPole(
                f"nu^2 = {nusq.real:.12g} within {_POLE_GUARD} of pole {pole:.12g}"
            )


@lru_cache(maxsize=2)
def _k_matrices(prof: PotentialProfile, grid: QuadratureGrid):
    """K and K^2 Nystrom matrices, cached by object identity (profiles and
    grids are immutable)."""
    kmat = build_k(prof, grid).matrix
    return kmat, kmat @ kmat


def _resolvent_apply(
    prof: PotentialProfile, nu, grid: QuadratureGrid
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Solve (I - nu^2 K^2) f = u; returns (f, K f, v, w)."""
    nu_c = _nu_value(nu)
    _guard_near_pole(nu_c * nu_c, prof.integral_c)
    kmat, ksq = _k_matrices(prof, grid)
    x = grid.nodes
    u = prof.u(x).astype(complex)
    sys = ksq * (-(nu_c * nu_c))
    idx = np.arange(grid.size)
    sys[idx, idx] += 1.0
    # K^2 is hermitian for single-signed h, and so is the system for real nu^2
    kind = "her" if (not prof.sign_changing and nu_c.imag * nu_c.real == 0.0) else "gen"
    try:
        f = sla.solve(sys, u, assume_a=kind, overwrite_a=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"(I - nu^2 K^2) solve failed: {exc}") from exc
    if not np.all(np.isfinite(f.view(float))):
        raise SingularSystem("(I - nu^2 K^2) solve produced non-finite values")
    return f, kmat @ f, prof.v(x), grid.weights


def eta_odd_pair(prof: PotentialProfile, nu, grid: QuadratureGrid) -> tuple[complex, complex]:
    """(eta, odd term) from a single linear solve.

    eta = <v, (I - nu^2 K^2)^{-1} u> and the odd pairing
    <v, K (I - nu^2 K^2)^{-1} u>, which vanishes identically.
    """
    f, kf, v, w = _resolvent_apply(prof, nu, grid)
    vw = v * w
    return complex(vw @ f), complex(vw @ kf)


def eta_numeric(prof: PotentialProfile, nu, grid: QuadratureGrid) -> complex:
    """Nystrom value of eta = <v, (I - nu^2 K^2)^{-1} u>."""
    return eta_odd_pair(prof, nu, grid)[0]


def odd_term(prof: PotentialProfile, nu, grid: QuadratureGrid) -> complex:
    """Nystrom value of <v, K (I - nu^2 K^2)^{-1} u>; zero up to roundoff."""
    return eta_odd_pair(prof, nu, grid)[1]


def eta_closed(nu, c: float = 1.0) -> complex:
    """Closed form eta = (2/nu) tan(nu c / 2), with limit c at nu = 0."""
    return tan_coupling(_nu_value(nu), c)


def moment(prof: PotentialProfile, n: int, grid: QuadratureGrid) -> complex:
    """<v, K^{2n} u> by repeated Nystrom application (n <= 8)."""
    if n < 0 or n > _MAX_MOMENT_ORDER:
        raise Overflow(f"moment order must be in 0..{_MAX_MOMENT_ORDER}")
    kmat = _k_matrices(prof, grid)[0]
    x = grid.nodes
    f = prof.u(x).astype(complex)
    for _ in range(2 * n):
        f = kmat @ f
    return complex((prof.v(x) * grid.weights) @ f)


def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n by the Akiyama-Tanigawa recurrence.

    Convention B_1 = +1/2; even indices, the only ones used here, agree
    across conventions.
    """
    if n < 0:
        raise ValidationError("Bernoulli index must be >= 0")
    row = [Fraction(0)] * (n + 1)
    b = Fraction(0)
    for m in range(n + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        b = row[0]
    return b


def moment_closed(n: int) -> Fraction:
    """Exact rational <v, K^{2n} u> for a unit-integral profile.

    (-1)^n 4 (2^{2n+2} - 1) B_{2n+2} / (2n+2)!; these are the Taylor
    coefficients of (2/nu) tan(nu/2) in nu^2.
    """
    if n < 0 or n > _MAX_MOMENT_ORDER:
        raise Overflow(f"moment order must be in 0..{_MAX_MOMENT_ORDER}")
    sign = -1 if n % 2 else 1
    num = Fraction(sign * 4 * (2 ** (2 * n + 2) - 1), math.factorial(2 * n + 2))
    return num * bernoulli_number(2 * n + 2)


__all__ = [
    "DiscreteOperator",
    "INDICATOR01",
    "MIDPOINT",
    "PotentialProfile",
    "QuadratureGrid",
    "TABLE",
    "TRAPEZOID",
    "TRUNCATED_GAUSSIAN",
    "bernoulli_number",
    "build_k",
    "eta_closed",
    "eta_numeric",
    "eta_odd_pair",
    "grid_for",
    "indicator01",
    "k_eigenvalue_targets",
    "k_spectrum",
    "midpoint_grid",
    "moment",
    "moment_closed",
    "odd_term",
    "profile_from_csv",
    "psi_k",
    "table_profile",
    "trapezoid_grid",
    "truncated_gaussian",
]
