"""Exact resolvent kernels of the free and point-perturbed Dirac operator.

The free kernel (massless line) is
G_z(x, y) = (i/2)(zeta I + sgn(x - y) sigma1) e^{i z zeta |x - y|}
with zeta = sgn(Im z), and the point interaction enters through the
rank-two Krein correction G_z(x, 0) M G_z(0, y).  M is available in two
closed forms, from the boundary-matrix parameters (``m_lambda``) and from
the generator parameters plus the renormalized coupling eta (``m_closed``);
the two agree whenever Lambda = exp(A).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import SingularDenominator, UnsupportedClass, ValidationError
from .lambda_bridge import PHASE, TRACELESS, GeneratorA
from .matrix_core import IDENT2, SIGMA1, AdmissibleLambda, Mat2

# smallest |Im z| accepted; kernel decay at rate |Im z| is needed downstream
_MIN_IM_Z = 1e-3


@dataclass(frozen=True)
class SpectralPoint:
    """Non-real spectral parameter z together with zeta = sgn(Im z)."""

    z: complex

    def __post_init__(self):
        if abs(complex(self.z).imag) < _MIN_IM_Z:
            raise ValidationError(
                f"spectral point needs |Im z| >= {_MIN_IM_Z}, got z = {self.z}"
            )

    @property
    def zeta(self) -> int:
        return 1 if complex(self.z).imag > 0 else -1


def free_kernel(p: SpectralPoint, x: float, y: float) -> Mat2:
    """Free resolvent kernel G_z(x, y); sgn(0) = 0 on the diagonal."""
    s = float(np.sign(x - y))
    phase = cmath.exp(1j * p.z * p.zeta * abs(x - y))
    return 0.5j * phase * (p.zeta * IDENT2 + s * SIGMA1)


def _half_kernel(p: SpectralPoint, side: int) -> Mat2:
    """One-sided value of x -> G_z(x, 0) as x -> 0 from the given side."""
    return 0.5j * (p.zeta * IDENT2 + side * SIGMA1)


def m_lambda(p: SpectralPoint, lam: AdmissibleLambda) -> Mat2:
    """Krein matrix M^Lambda(z) of the point interaction from (phi, alpha..delta)."""
    zeta = p.zeta
    den = zeta * (lam.beta - lam.gamma) + 1j * (lam.alpha + lam.delta)
    if abs(den) <= 1e-12:
        raise SingularDenominator("zeta (beta - gamma) + i (alpha + delta) = 0")
    diag = zeta * (lam.alpha + lam.delta - 2.0 * math.cos(lam.phi))
    off = -2j * math.sin(lam.phi)
    mat = np.array(
        [
            [2j * lam.gamma + diag, lam.alpha - lam.delta + off],
            [lam.delta - lam.alpha + off, -2j * lam.beta + diag],
        ],
        dtype=complex,
    )
    return mat / den


def m_closed(p: SpectralPoint, gen: GeneratorA, eta: complex) -> Mat2:
    """Krein matrix M(z) from the generator parameters and the coupling eta.

    Traceless class: the closed form in (a, b, c, nu, eta).  Phase class:
    M(z) = -sin(phi) [[i zeta tan(phi/2), 1], [1, i zeta tan(phi/2)]],
    independent of eta.
    """
    zeta = p.zeta
    if gen.klass == PHASE:
        phi = gen.a.imag
        t = math.tan(phi / 2.0)
        return -math.sin(phi) * np.array(
            [[1j * zeta * t, 1.0], [1.0, 1j * zeta * t]], dtype=complex
        )
    if gen.klass != TRACELESS:
        raise UnsupportedClass("M(z) closed form needs a phase or traceless generator")
    eta = complex(eta)
    nusq = gen.nu.nu_squared
    a = gen.a.real
    den = 0.5 * zeta * eta * (gen.b + gen.c) + 1j * (1.0 - 0.25 * eta * eta * nusq)
    if abs(den) <= 1e-12:
        raise SingularDenominator(
            "zeta eta (b + c)/2 + i (1 - eta^2 nu^2 / 4) = 0"
        )
    quad = 0.5 * zeta * eta * eta * nusq
    mat = np.array(
        [
            [1j * eta * gen.c + quad, -a * eta],
            [a * eta, 1j * eta * gen.b + quad],
        ],
        dtype=complex,
    )
    return -mat / den


@dataclass(frozen=True, eq=False)
class ResolventKernelField:
    """Immutable (x, y) -> Mat2 evaluator with its defining data.

    ``kind`` is "free", "point", or "approx"; point fields carry the
    boundary matrix and its Krein matrix so one-sided limits at the
    interaction point can be taken analytically.
    """

    z: complex
    kind: str
    evaluator: Callable[[float, float], Mat2] = field(repr=False)
    lam: AdmissibleLambda | None = None
    m: Mat2 | None = None
    detail: str = ""

    def __call__(self, x: float, y: float) -> Mat2:
        return self.evaluator(x, y)

    def limit_at_zero(self, side: int, y: float) -> Mat2:
        """Analytic one-sided limit of x -> R(x, y) as x -> 0+-, y != 0."""
        if self.m is None:
            raise ValidationError("one-sided limits need an exact kernel field")
        if y == 0.0:
            raise ValidationError("one-sided limit requires y != 0")
        if side not in (1, -1):
            raise ValidationError("side must be +1 or -1")
        p = SpectralPoint(self.z)
        g0y = free_kernel(p, 0.0, y)
        return g0y - _half_kernel(p, side) @ self.m @ g0y


def point_kernel(p: SpectralPoint, lam: AdmissibleLambda) -> ResolventKernelField:
    """Resolvent kernel field of the point-perturbed operator.

    R(x, y) = G_z(x, y) - G_z(x, 0) M^Lambda(z) G_z(0, y); the column map
    x -> R(x, y) satisfies R(0+, y) = Lambda R(0-, y) for every y != 0.
    """
    m = m_lambda(p, lam)

    def evaluate(x: float, y: float) -> Mat2:
        return free_kernel(p, x, y) - free_kernel(p, x, 0.0) @ m @ free_kernel(p, 0.0, y)

    return ResolventKernelField(
        z=complex(p.z), kind="point", evaluator=evaluate, lam=lam, m=m
    )


__all__ = [
    "ResolventKernelField",
    "SpectralPoint",
    "free_kernel",
    "m_closed",
    "m_lambda",
    "point_kernel",
]
