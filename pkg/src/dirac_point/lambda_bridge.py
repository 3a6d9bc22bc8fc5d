"""Transitions between boundary matrices Lambda and generators A.

A generator is any A with sigma1 A sigma1 = -A^dagger, i.e.
A = [[a, ib], [ic, -conj(a)]] with b, c real.  For every admissible
Lambda there is a family of such A with exp(A) = Lambda; ``log_branches``
produces one member per branch selector, dispatching on whether
(alpha + delta)/2 lies inside (-1, 1), on the boundary, or outside.

Also here: the electrostatic boundary matrix Lambda(eta), the coupling
renormalization matrix W^A = 2 (e^A - I)(e^A + I)^{-1} in closed form,
and the scaling law (2/nu) tan(t nu / 2) for a rescaled potential.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NonIdentityWithNonzeroM,
    ParityMismatch,
    PoleOfTan,
    PoleOfW,
    UnsupportedClass,
)
from .matrix_core import (
    IDENT2,
    SIGMA1,
    AdmissibleLambda,
    Mat2,
    NuBranch,
    as_mat2,
    check_admissible,
    exp2,
    mats_close,
    nu_branch_from_squared,
    sinc_nu,
)

PHASE = "phase"  # A = i phi I
TRACELESS = "traceless"  # A = [[a, ib], [ic, -a]], a real
GENERAL = "general"

_CLASS_TOL = 1e-12
# width of the interval around |alpha + delta|/2 = 1 treated as the pi-multiple case
_TRACE_CASE_TOL = 1e-12


@dataclass(frozen=True)
class GeneratorA:
    """Generator matrix [[a, ib], [ic, -conj(a)]] plus its nu branch."""

    a: complex
    b: float
    c: float
    nu: NuBranch
    klass: str

    def matrix(self) -> Mat2:
        return np.array(
            [[self.a, 1j * self.b], [1j * self.c, -self.a.conjugate()]],
            dtype=complex,
        )

    @property
    def phi(self) -> float:
        """Im a; the phase angle for the phase class."""
        return self.a.imag


def generator_a(a: complex, b: float, c: float) -> GeneratorA:
    """Build a GeneratorA from the three parameters, classifying it."""
    a = complex(a)
    a = complex(a.real + 0.0, a.imag + 0.0)  # normalize -0.0
    b = float(b) + 0.0
    c = float(c) + 0.0
    nu = nu_branch_from_squared(b * c - a.real * a.real)
    if (
        abs(b) <= _CLASS_TOL
        and abs(c) <= _CLASS_TOL
        and abs(a.real) <= _CLASS_TOL
        and abs(a.imag) > _CLASS_TOL
    ):
        klass = PHASE
    elif abs(a.imag) <= _CLASS_TOL:
        klass = TRACELESS
    else:
        klass = GENERAL
    return GeneratorA(a, b, c, nu, klass)


def generator_from_matrix(m) -> GeneratorA:
    """Read off (a, b, c) from a generator-form matrix."""
    m = as_mat2(m)
    a = m[0, 0]
    b = (m[0, 1] / 1j).real
    c = (m[1, 0] / 1j).real
    rebuilt = np.array([[a, 1j * b], [1j * c, -a.conjugate()]], dtype=complex)
    if not mats_close(rebuilt, m, 1e-12):
        raise UnsupportedClass("matrix is not of generator form")
    return generator_a(a, b, c)


@dataclass(frozen=True)
class BranchSelector:
    """Which logarithm branch to take.

    ``n`` fixes Im a = phi + n pi.  In the interior trace case the cosine
    equation has two roots per half-open period; the root in [0, pi] is
    taken for even n and the one in (pi, 2 pi) for odd n.  ``m`` selects
    the nu = m pi family available when Lambda is a multiple of the
    identity, parameterized by ``family_param`` (s in b = m pi e^s,
    c = m pi e^{-s}).
    """

    n: int = 0
    m: int = 0
    family_param: float | None = None


def _require_parity(n: int, required: int, context: str) -> None:
    if n % 2 != required % 2:
        raise ParityMismatch(
            f"branch n = {n} has the wrong parity for {context}"
        )


def log_branches(lam: AdmissibleLambda, sel: BranchSelector = BranchSelector()) -> GeneratorA:
    """Generator A with exp(A) = Lambda on the selected branch.

    Dispatches on w = (alpha + delta)/2: for w in (-1, 1) solve
    (-1)^n cos(nu) = w and scale (Re a, b, c) by nu / ((-1)^n sin nu);
    for |w| = 1 use the direct nu = 0 formulas (or the nu = m pi family
    when Lambda is a multiple of the identity); for |w| > 1 solve the
    hyperbolic analogue with nu = i g.  Raises ParityMismatch when n has
    the wrong parity for the case and NonIdentityWithNonzeroM when the
    m != 0 family is requested for a Lambda that is not a multiple of I.
    """
    w = lam.half_trace
    half_diff = (lam.alpha - lam.delta) / 2.0
    n = sel.n

    if abs(abs(w) - 1.0) <= _TRACE_CASE_TOL:
        sign = 1.0 if w > 0 else -1.0
        offset = 0 if sign > 0 else 1
        if sel.m != 0:
            is_identity_multiple = (
                abs(half_diff) <= 1e-12
                and abs(lam.beta) <= 1e-12
                and abs(lam.gamma) <= 1e-12
            )
            if not is_identity_multiple:
                raise NonIdentityWithNonzeroM(
                    "nu = m pi branches with m != 0 exist only when Lambda "
                    "is a multiple of the identity"
                )
            _require_parity(n, sel.m + offset, "the nu = m pi family")
            s = sel.family_param if sel.family_param is not None else 0.0
            b = sel.m * math.pi * math.exp(s)
            c = sel.m * math.pi * math.exp(-s)
            a = complex(0.0, lam.phi + n * math.pi)
            return generator_a(a, b, c)
        _require_parity(n, offset, "the (alpha + delta)/2 = +-1 case")
        re_a = sign * half_diff
        b = sign * lam.beta
        c = -sign * lam.gamma
        a = complex(re_a, lam.phi + n * math.pi)
        return generator_a(a, b, c)

    if sel.m != 0:
        raise NonIdentityWithNonzeroM(
            "nu = m pi branches with m != 0 exist only when Lambda is a "
            "multiple of the identity"
        )

    if abs(w) < 1.0:
        parity = (-1.0) ** n
        nu0 = math.acos(parity * w)  # in (0, pi)
        nu = nu0 if n % 2 == 0 else 2.0 * math.pi - nu0
        k = parity * math.sin(nu) / nu
        re_a = half_diff / k
        b = lam.beta / k
        c = -lam.gamma / k
        a = complex(re_a, lam.phi + n * math.pi)
        return generator_a(a, b, c)

    # |w| > 1: nu = i g, cosh g = (-1)^n w
    _require_parity(n, 0 if w > 0 else 1, "the hyperbolic trace case")
    g = math.acosh(abs(w))
    k = ((-1.0) ** n) * math.sinh(g) / g
    re_a = half_diff / k
    b = lam.beta / k
    c = -lam.gamma / k
    a = complex(re_a, lam.phi + n * math.pi)
    return generator_a(a, b, c)


def electrostatic_lambda(eta: float) -> AdmissibleLambda:
    """Boundary matrix of the electrostatic interaction of strength eta.

    Lambda = 1/(1 + eta^2/4) [[1 - eta^2/4, -i eta], [-i eta, 1 - eta^2/4]];
    with eta = 2 tan(theta/2) this is [[cos th, -i sin th], [-i sin th, cos th]].
    """
    eta = float(eta)
    den = 1.0 + eta * eta / 4.0
    diag = (1.0 - eta * eta / 4.0) / den
    return AdmissibleLambda(
        phi=0.0, alpha=diag, beta=-eta / den, gamma=eta / den, delta=diag
    )


def tan_coupling(nu: complex, s: float) -> complex:
    """(2/nu) tan(nu s / 2) with the limit s at nu = 0.

    Raises PoleOfTan when the (real) tan argument is within 1e-9 of
    pi/2 + pi Z.  Analytic continuation handles imaginary nu, where the
    value is (2/g) tanh(g s / 2), real.
    """
    nu = complex(nu)
    s = float(s)
    x = nu * s / 2.0
    if abs(x.imag) < 1e-12:
        r = (x.real - math.pi / 2.0) % math.pi
        if min(r, math.pi - r) < 1e-9:
            raise PoleOfTan(f"tan argument {x.real:.12g} is near pi/2 + pi k")
    if abs(x) < 1e-4:
        x2 = x * x
        return s * (1.0 + x2 / 3.0 + 2.0 * x2 * x2 / 15.0)
    return (2.0 / nu) * cmath.tan(x)


def w_matrix(gen: GeneratorA) -> Mat2:
    """Renormalization matrix W^A = 2 (e^A - I)(e^A + I)^{-1} in closed form.

    W^A = 2/(cos nu + cos phi) [[Re a sinc nu + i sin phi, i b sinc nu],
    [i c sinc nu, -Re a sinc nu + i sin phi]] with phi = Im a; the direct
    route through exp2 and a dense inverse is evaluated as a built-in
    cross-check.  Raises PoleOfW when cos nu + cos phi vanishes.
    """
    phi = gen.a.imag
    re_a = gen.a.real
    nu = gen.nu.nu
    cos_nu = cmath.cos(nu).real  # real for real or imaginary nu
    den = cos_nu + math.cos(phi)
    if abs(den) <= 1e-10:
        raise PoleOfW(f"cos(nu) + cos(phi) = {den:.3e}")
    sc = sinc_nu(nu)
    w = (2.0 / den) * np.array(
        [
            [re_a * sc + 1j * math.sin(phi), 1j * gen.b * sc],
            [1j * gen.c * sc, -re_a * sc + 1j * math.sin(phi)],
        ],
        dtype=complex,
    )
    e = exp2(gen.matrix())
    direct = 2.0 * np.linalg.solve((e + IDENT2).T, (e - IDENT2).T).T
    assert mats_close(w, direct, 1e-10), "closed-form W^A disagrees with 2(e^A-I)(e^A+I)^{-1}"
    return w


def coupling_scale(gen: GeneratorA, t: float) -> float:
    """Effective interaction strength multiplier for a potential scaled by t.

    (2/phi) tan(t phi / 2) for the phase class and (2/nu) tan(t nu / 2)
    for the traceless class; other generators are unsupported.
    """
    if gen.klass == PHASE:
        base = complex(gen.a.imag)
    elif gen.klass == TRACELESS:
        base = gen.nu.nu
    else:
        raise UnsupportedClass(
            "coupling scale is defined for phase and traceless generators"
        )
    val = tan_coupling(base, t)
    return float(val.real)


def scalar_multiple(gen: GeneratorA, w: Mat2) -> tuple[complex, float]:
    """Least-squares scalar c with w ~ c A, and the residual ||w - c A||."""
    a = gen.matrix()
    denom = float(np.sum(np.abs(a) ** 2))
    if denom == 0.0:
        return 0.0 + 0.0j, float(np.max(np.abs(w)))
    c = complex(np.sum(a.conj() * w) / denom)
    return c, float(np.max(np.abs(w - c * a)))


__all__ = [
    "PHASE",
    "TRACELESS",
    "GENERAL",
    "AdmissibleLambda",
    "BranchSelector",
    "GeneratorA",
    "check_admissible",
    "coupling_scale",
    "electrostatic_lambda",
    "generator_a",
    "generator_from_matrix",
    "log_branches",
    "scalar_multiple",
    "tan_coupling",
    "w_matrix",
]
