"""Resolvent of the regularized operator and its small-support limit.

The operator with potential i h_eps(x) sigma1 A has resolvent
(H_eps - z)^{-1} = (H - z)^{-1} - C_eps (I + Q_eps)^{-1} D_eps with
kernels, written in base coordinates of the profile,

    C_eps(x, y) = G_z(x, eps y) v(y)
    Q_eps(x, y) = i u(x) sigma1 A G_{eps z}(x, y) v(y)
    D_eps(x, y) = i u(x) sigma1 A G_z(eps x, y)

eps = 0 is accepted as a sentinel selecting the pointwise-limit kernels
(G at spectral parameter 0+ keeps only zeta).  The finite-rank correction
converges to G_z(x, 0) M(z) G_z(0, y), which is what the distance sweeps
measure against the exact point kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy.linalg import lapack

from .errors import NearPole, SingularSystem, UnsupportedClass, ValidationError
from .exact_resolvent import (
    ResolventKernelField,
    SpectralPoint,
    free_kernel,
    m_lambda,
)
from .kernel_ops import (
    DiscreteOperator,
    PotentialProfile,
    QuadratureGrid,
    build_k,
    eta_closed,
    grid_for,
    midpoint_grid,
)
from .lambda_bridge import PHASE, TRACELESS, GeneratorA, check_admissible
from .matrix_core import IDENT2, PI_MULTIPLE, SIGMA1, Mat2, exp2, tilde

# distance of nu * c from odd multiples of pi below which the method is refused
_METHOD_POLE_TOL = 1e-6
_RCOND_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class BSAssembly:
    """Discretized Kato formula pieces at one (z, A, profile, eps)."""

    z: SpectralPoint
    gen: GeneratorA
    prof: PotentialProfile
    eps: float
    grid: QuadratureGrid
    q_op: DiscreteOperator
    _lu: tuple = field(repr=False)
    _u: np.ndarray = field(repr=False)
    _v: np.ndarray = field(repr=False)
    _s1a: np.ndarray = field(repr=False)

    def c_kernel(self, xs) -> np.ndarray:
        """Raw C_eps(x, node_j) blocks, shape (2 nx, 2 N), no weights."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        z, zeta = self.z.z, self.z.zeta
        t = self.eps * self.grid.nodes
        diff = xs[:, None] - t[None, :]
        e = np.exp(1j * z * zeta * np.abs(diff)) * self._v[None, :]
        s = np.sign(diff)
        return 0.5j * (zeta * np.kron(e, IDENT2) + np.kron(e * s, SIGMA1))

    def c_weighted(self, xs) -> np.ndarray:
        """C_eps blocks with quadrature weights folded on the node columns."""
        w = np.repeat(self.grid.weights, 2)
        return self.c_kernel(xs) * w[None, :]

    def d_kernel(self, ys) -> np.ndarray:
        """Raw D_eps(node_j, y) blocks, shape (2 N, 2 ny)."""
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        z, zeta = self.z.z, self.z.zeta
        t = self.eps * self.grid.nodes
        diff = t[:, None] - ys[None, :]
        e = np.exp(1j * z * zeta * np.abs(diff)) * self._u[:, None]
        s = np.sign(diff)
        s1as1 = self._s1a @ SIGMA1
        return -0.5 * (zeta * np.kron(e, self._s1a) + np.kron(e * s, s1as1))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """(I + Q_eps)^{-1} rhs via the cached LU factorization."""
        return sla.lu_solve(self._lu, rhs)

    def correction(self, xs, ys) -> np.ndarray:
        """Block matrix of (C_eps (I + Q_eps)^{-1} D_eps)(x, y) values."""
        return self.c_weighted(xs) @ self.solve(self.d_kernel(ys))

    def spectral_margin(self) -> float:
        """min |lambda + 1| over the spectrum of the discrete Q_eps (dense solve)."""
        vals = np.linalg.eigvals(self.q_op.matrix)
        return float(np.min(np.abs(vals + 1.0)))

    def kernel_field(self) -> ResolventKernelField:
        """(x, y) -> approximate resolvent kernel as a field object."""

        def evaluate(x: float, y: float) -> Mat2:
            return approx_kernel(self, x, y)

        return ResolventKernelField(
            z=complex(self.z.z),
            kind="approx",
            evaluator=evaluate,
            detail=f"A=({self.gen.a:g},{self.gen.b:g},{self.gen.c:g}), "
            f"{self.prof.label}, eps={self.eps:g}",
        )


def _check_method_pole(gen: GeneratorA, c: float) -> None:
    """Refuse generators whose effective nu c hits odd multiples of pi."""
    base = gen.a.imag if gen.klass == PHASE else gen.nu.nu
    base = complex(base)
    if abs(base.imag) > 1e-12:
        return
    x = abs(base.real * c)
    k = round((x / math.pi - 1.0) / 2.0)
    for kk in (k - 1, k, k + 1):
        if kk < 0:
            continue
        if abs(x - (2 * kk + 1) * math.pi) < _METHOD_POLE_TOL:
            raise NearPole(
                f"nu c = {x:.12g} is at an odd multiple of pi; the inverse "
                "of (I + Q) does not exist there"
            )


def assemble(
    z: SpectralPoint,
    gen: GeneratorA,
    prof: PotentialProfile,
    eps: float,
    grid: QuadratureGrid,
) -> BSAssembly:
    """Build the discrete Kato pieces; eps = 0 selects the limit kernels.

    Raises NearPole if the generator sits on the excluded pole set
    (nu c at odd multiples of pi; nu = 2k pi is allowed) or if
    (I + Q_eps) is numerically singular.
    """
    if eps < 0:
        raise ValidationError("eps must be >= 0 (0 selects the limit kernels)")
    if gen.nu.kind == PI_MULTIPLE and gen.nu.m is not None and gen.nu.m % 2 == 1:
        raise NearPole(f"nu = {gen.nu.m} pi is excluded (odd pi multiple)")
    _check_method_pole(gen, prof.integral_c)

    x = grid.nodes
    u = prof.u(x)
    v = prof.v(x)
    s1a = SIGMA1 @ gen.matrix()
    s1as1 = s1a @ SIGMA1
    zeta = z.zeta
    diff = x[:, None] - x[None, :]
    phase = np.exp(1j * (eps * z.z) * zeta * np.abs(diff))
    e = u[:, None] * phase * (v * grid.weights)[None, :]
    q = -0.5 * (zeta * np.kron(e, s1a) + np.kron(e * np.sign(diff), s1as1))
    ipq = np.eye(2 * grid.size, dtype=complex) + q

    anorm = float(np.linalg.norm(ipq, 1))
    try:
        lu = sla.lu_factor(ipq)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"LU of (I + Q_eps) failed: {exc}") from exc
    rcond, info = lapack.zgecon(lu[0], anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < _RCOND_FLOOR:
        raise NearPole(
            f"(I + Q_eps) is numerically singular (rcond = {rcond:.3e}); "
            "-1 is too close to the spectrum of Q_eps"
        )
    return BSAssembly(
        z=z,
        gen=gen,
        prof=prof,
        eps=float(eps),
        grid=grid,
        q_op=DiscreteOperator(q, grid, block_size=2),
        _lu=lu,
        _u=u,
        _v=v,
        _s1a=s1a,
    )


def approx_kernel(asm: BSAssembly, x: float, y: float) -> Mat2:
    """Approximate resolvent kernel G_z(x, y) - (C (I+Q)^{-1} D)(x, y)."""
    return free_kernel(asm.z, x, y) - asm.correction([x], [y])


def vq_identity(asm: BSAssembly) -> Mat2:
    """<v, (I + Q)^{-1} u> as a 2x2 matrix, at the limit assembly.

    Equals eta (I - (zeta eta / 2) sigma1 A)^{-1} with eta the closed-form
    coupling; see ``vq_closed_form``.
    """
    if asm.eps != 0.0:
        raise ValidationError("vq_identity needs the eps = 0 limit assembly")
    n = asm.grid.size
    rhs = np.zeros((2 * n, 2), dtype=complex)
    rhs[0::2, 0] = asm._u
    rhs[1::2, 1] = asm._u
    f = asm.solve(rhs).reshape(n, 2, 2)
    vw = asm._v * asm.grid.weights
    return np.einsum("j,jrc->rc", vw, f)


def vq_closed_form(gen: GeneratorA, z: SpectralPoint, c: float = 1.0) -> Mat2:
    """Right side eta (I - (zeta eta / 2) sigma1 A)^{-1} of the pairing identity.

    eta is (2/nu) tan(nu c / 2) for the traceless class and
    (2/phi) tan(phi c / 2) for the phase class.
    """
    if gen.klass == PHASE:
        eta = eta_closed(complex(gen.a.imag), c)
    elif gen.klass == TRACELESS:
        eta = eta_closed(gen.nu, c)
    else:
        raise UnsupportedClass("closed-form pairing needs a phase or traceless generator")
    s1a = SIGMA1 @ gen.matrix()
    return eta * np.linalg.inv(IDENT2 - (z.zeta * eta / 2.0) * s1a)


def factorized_correction(asm: BSAssembly, x: float, y: float) -> Mat2:
    """Limit correction via the factorized inverse, as an independent path.

    Uses (I + Q2)^{-1} = (I - nu^2 K^2)^{-1} x I - K (I - nu^2 K^2)^{-1} x A~
    and the rank-two inversion formula instead of the dense block solve.
    Traceless generators only (the factorization needs A~^2 = nu^2 I).
    """
    if asm.eps != 0.0:
        raise ValidationError("factorized correction is defined at eps = 0")
    if asm.gen.klass != TRACELESS:
        raise UnsupportedClass("factorized inverse needs a traceless generator")
    z, zeta = asm.z, asm.z.zeta
    a_mat = asm.gen.matrix()
    a_til = tilde(a_mat)
    s1a = asm._s1a
    nusq = asm.gen.nu.nu_squared

    kmat = build_k(asm.prof, asm.grid).matrix
    sys = np.eye(asm.grid.size, dtype=complex) - nusq * (kmat @ kmat)
    h1 = sla.solve(sys, asm._u.astype(complex))  # (I - nu^2 K^2)^{-1} u
    h2 = kmat @ h1
    vw = asm._v * asm.grid.weights
    eta_d = complex(vw @ h1)
    odd_d = complex(vw @ h2)

    n_y = 1j * s1a @ free_kernel(z, 0.0, y)
    b_inv = np.linalg.inv(IDENT2 - (zeta * eta_d / 2.0) * s1a)
    w2 = eta_d * n_y - odd_d * (a_til @ n_y)
    pair = w2 + (zeta / 2.0) * (
        eta_d * (s1a @ b_inv @ w2) - 1j * odd_d * (s1a @ a_mat @ b_inv @ w2)
    )
    return free_kernel(z, x, 0.0) @ pair


def _g_x0_blocks(z: SpectralPoint, xs: np.ndarray) -> np.ndarray:
    """Stacked G_z(x_i, 0) blocks, shape (2 nx, 2)."""
    e = np.exp(1j * z.z * z.zeta * np.abs(xs))
    s = np.sign(xs)
    return 0.5j * (
        z.zeta * np.kron(e[:, None], IDENT2) + np.kron((e * s)[:, None], SIGMA1)
    )


def _g_0y_blocks(z: SpectralPoint, ys: np.ndarray) -> np.ndarray:
    """Stacked G_z(0, y_j) blocks, shape (2, 2 ny)."""
    e = np.exp(1j * z.z * z.zeta * np.abs(ys))
    s = np.sign(-ys)
    return 0.5j * (
        z.zeta * np.kron(e[None, :], IDENT2) + np.kron((e * s)[None, :], SIGMA1)
    )


def box_tail_estimate(z: SpectralPoint, box_l: float) -> float:
    """Size estimate e^{-2 |Im z| L} of the kernel mass outside the box."""
    return math.exp(-2.0 * abs(complex(z.z).imag) * box_l)


def hs_distance(
    z: SpectralPoint,
    gen: GeneratorA,
    prof: PotentialProfile,
    eps: float,
    box_l: float,
    n_box: int,
    grid: QuadratureGrid,
) -> float:
    """Hilbert-Schmidt distance between approximate and exact kernels.

    sqrt(int int ||R_eps - R_Lambda||_F^2) over [-L, L]^2 on an
    n_box x n_box midpoint tensor grid, with Lambda = exp(A).  The free
    parts cancel exactly, so only the two corrections are compared.
    """
    asm = assemble(z, gen, prof, eps, grid)
    lam = check_admissible(exp2(gen.matrix()))
    m = m_lambda(z, lam)
    box = midpoint_grid(-box_l, box_l, n_box)
    xs = box.nodes
    exact = (_g_x0_blocks(z, xs) @ m) @ _g_0y_blocks(z, xs)
    delta = exact - asm.correction(xs, xs)
    return float(np.linalg.norm(delta) * (2.0 * box_l / n_box))


@dataclass(frozen=True)
class ConvergenceRow:
    """One eps of a convergence sweep; error marks a refused row."""

    eps: float
    hs_distance: float
    box_half_width: float
    n_box: int
    n_grid: int
    z: complex
    error: str | None = None


def converge_table(
    z: SpectralPoint,
    gen: GeneratorA,
    prof: PotentialProfile,
    eps_list,
    box_l: float,
    n_box: int,
    n_grid: int,
    max_workers: int = 1,
) -> list[ConvergenceRow]:
    """hs_distance over a decreasing eps sweep with shared box and grids.

    The excluded pole set is rejected up front with NearPole; per-eps
    numerical failures are recorded on the row instead of aborting.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ValidationError("eps sweep must contain positive values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError("eps sweep must be strictly decreasing")
    if gen.nu.kind == PI_MULTIPLE and gen.nu.m is not None and gen.nu.m % 2 == 1:
        raise NearPole(f"nu = {gen.nu.m} pi is excluded (odd pi multiple)")
    _check_method_pole(gen, prof.integral_c)
    grid = grid_for(prof, n_grid)

    def run(eps: float) -> ConvergenceRow:
        try:
            d = hs_distance(z, gen, prof, eps, box_l, n_box, grid)
            return ConvergenceRow(eps, d, box_l, n_box, n_grid, complex(z.z))
        except (NearPole, SingularSystem) as exc:
            return ConvergenceRow(
                eps, math.nan, box_l, n_box, n_grid, complex(z.z),
                error=type(exc).__name__,
            )

    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, eps_list))
    return [run(e) for e in eps_list]


__all__ = [
    "BSAssembly",
    "ConvergenceRow",
    "approx_kernel",
    "assemble",
    "box_tail_estimate",
    "converge_table",
    "factorized_correction",
    "hs_distance",
    "vq_closed_form",
    "vq_identity",
]
