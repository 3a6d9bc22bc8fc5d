"""Exact 2x2 complex matrix algebra.

Everything downstream lives in the algebra of 2x2 complex matrices: Pauli
matrices, the closed-form exponential through the invariant
nu = sqrt(det A - (tr A / 2)^2), the generator condition
sigma1 A sigma1 = -A^dagger, and extraction of the boundary-matrix
parameters (phi, alpha, beta, gamma, delta).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonRealNuSquared, NotAdmissible

Mat2 = np.ndarray

IDENT2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# nu classifications
REAL_NON_PI = "real_non_pi"
PI_MULTIPLE = "pi_multiple"
IMAGINARY = "imaginary"

# |nu| below which sin(nu)/nu switches to its series
_SINC_SERIES_CUT = 1e-4
# absolute distance from pi*Z that still counts as a pi multiple
_PI_CLASS_TOL = 1e-9


def as_mat2(a) -> Mat2:
    """Coerce to a finite 2x2 complex array."""
    m = np.asarray(a, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    return m


def mats_close(a, b, tol: float) -> bool:
    """Entrywise comparison: absolute up to magnitude 1e3, relative beyond."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 0.0)
    eff = tol * scale if scale > 1e3 else tol
    return float(np.max(np.abs(a - b))) <= eff


@dataclass(frozen=True)
class NuBranch:
    """The invariant nu of a generator matrix.

    ``nu_squared`` is real by construction, ``nu`` its principal square
    root (nu >= 0 when nu_squared >= 0, nu = i g with g > 0 otherwise),
    and ``kind`` one of REAL_NON_PI / PI_MULTIPLE / IMAGINARY with ``m``
    the integer multiple in the PI_MULTIPLE case.
    """

    nu_squared: float
    nu: complex
    kind: str
    m: int | None = None


def nu_branch_from_squared(nu_squared: float) -> NuBranch:
    """Classify a real nu^2 and take the principal square root."""
    if nu_squared < 0.0:
        return NuBranch(nu_squared, 1j * math.sqrt(-nu_squared), IMAGINARY)
    nu = math.sqrt(nu_squared)
    m = round(nu / math.pi)
    if abs(nu - m * math.pi) < _PI_CLASS_TOL:
        return NuBranch(nu_squared, complex(nu), PI_MULTIPLE, m=m)
    return NuBranch(nu_squared, complex(nu), REAL_NON_PI)


def nu_of(a) -> NuBranch:
    """nu branch of a matrix, nu^2 = det A - (tr A / 2)^2.

    Raises NonRealNuSquared unless nu^2 is real to 1e-12; generator-form
    matrices always satisfy this (nu^2 = bc - (Re a)^2).
    """
    m = as_mat2(a)
    half_tr = (m[0, 0] + m[1, 1]) / 2.0
    nusq = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] - half_tr * half_tr
    if abs(nusq.imag) > 1e-12:
        raise NonRealNuSquared(f"Im(nu^2) = {nusq.imag:.3e} exceeds 1e-12")
    return nu_branch_from_squared(nusq.real)


def sinc_nu(nu: complex) -> complex:
    """sin(nu)/nu with the value 1 at nu = 0 (series below |nu| = 1e-4)."""
    nu = complex(nu)
    if abs(nu) < _SINC_SERIES_CUT:
        nusq = nu * nu
        return 1.0 - nusq / 6.0 + nusq * nusq / 120.0
    return cmath.sin(nu) / nu


def exp2(a) -> Mat2:
    """Closed-form exponential of a 2x2 complex matrix.

    exp(A) = e^{tr A / 2} (cos(nu) I + sin(nu)/nu (A - tr A / 2 I)) with
    nu = sqrt(det A - (tr A / 2)^2); both square-root branches give the
    same value, and sin(nu)/nu is read as 1 at nu = 0.
    """
    m = as_mat2(a)
    half_tr = (m[0, 0] + m[1, 1]) / 2.0
    dev = m - half_tr * IDENT2
    nusq = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] - half_tr * half_tr
    nu = cmath.sqrt(nusq)
    return cmath.exp(half_tr) * (cmath.cos(nu) * IDENT2 + sinc_nu(nu) * dev)


def check_generator(a) -> bool:
    """True iff sigma1 A sigma1 = -A^dagger to 1e-12 entrywise.

    Equivalently A = [[a, ib], [ic, -conj(a)]] with b, c real.
    """
    m = as_mat2(a)
    lhs = SIGMA1 @ m @ SIGMA1
    return mats_close(lhs, -m.conj().T, 1e-12)


def tilde(a) -> Mat2:
    """A~ = i sigma1 A sigma1; an involution up to sign (A~~ = -A)."""
    m = as_mat2(a)
    return 1j * (SIGMA1 @ m @ SIGMA1)


@dataclass(frozen=True)
class AdmissibleLambda:
    """Boundary matrix e^{i phi} [[alpha, i beta], [-i gamma, delta]].

    phi lies in [0, pi) and the real parameters satisfy
    alpha delta - beta gamma = 1.
    """

    phi: float
    alpha: float
    beta: float
    gamma: float
    delta: float

    def matrix(self) -> Mat2:
        core = np.array(
            [[self.alpha, 1j * self.beta], [-1j * self.gamma, self.delta]],
            dtype=complex,
        )
        return cmath.exp(1j * self.phi) * core

    @property
    def half_trace(self) -> float:
        return (self.alpha + self.delta) / 2.0


def check_admissible(L) -> AdmissibleLambda:
    """Verify the sigma1 isometry and extract (phi, alpha, beta, gamma, delta).

    Checks Lambda^dagger sigma1 Lambda = sigma1 to 1e-12, pulls phi into
    [0, pi) (values within 1e-12 of pi are mapped to 0 with a global sign
    flip), and requires the extracted parameters to be real and to satisfy
    alpha delta - beta gamma = 1, both to 1e-10.  Raises NotAdmissible
    naming the violated identity.
    """
    m = as_mat2(L)
    if not mats_close(m.conj().T @ SIGMA1 @ m, SIGMA1, 1e-12):
        raise NotAdmissible("Lambda^dagger sigma1 Lambda != sigma1")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(abs(det) - 1.0) > 1e-10:
        raise NotAdmissible(f"|det Lambda| = {abs(det):.12g} != 1")
    phi = cmath.phase(det) / 2.0  # in (-pi/2, pi/2]
    if phi < -1e-12:
        phi += math.pi
    elif phi < 0.0:
        phi = 0.0
    if phi >= math.pi - 1e-12:
        phi -= math.pi  # keep [0, pi) half-open; sign flip is absorbed below
    core = cmath.exp(-1j * phi) * m
    alpha_c = core[0, 0]
    beta_c = core[0, 1] / 1j
    gamma_c = -core[1, 0] / 1j
    delta_c = core[1, 1]
    resid = max(abs(x.imag) for x in (alpha_c, beta_c, gamma_c, delta_c))
    if resid > 1e-10:
        raise NotAdmissible(
            f"parameter extraction leaves imaginary residue {resid:.3e}"
        )
    lam = AdmissibleLambda(
        phi, alpha_c.real, beta_c.real, gamma_c.real, delta_c.real
    )
    det_resid = abs(lam.alpha * lam.delta - lam.beta * lam.gamma - 1.0)
    if det_resid > 1e-10:
        raise NotAdmissible(
            f"alpha delta - beta gamma = 1 violated by {det_resid:.3e}"
        )
    return lam
