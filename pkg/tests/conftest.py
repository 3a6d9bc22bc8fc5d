"""Shared oracles and random generators for the test suite.

The oracles here are deliberately independent of the library code paths
they check: the exponential is summed termwise with scaling and squaring,
and boundary matrices are sampled from the defining parameter constraint
rather than through any exp/log machinery.
"""

import math

import numpy as np

from dirac_point import AdmissibleLambda, BranchSelector, check_admissible


def taylor_exp2(m, terms: int = 30) -> np.ndarray:
    """Scaled-and-squared 30-term Taylor exponential of a 2x2 matrix."""
    m = np.asarray(m, dtype=complex)
    norm = float(np.max(np.abs(m)))
    squarings = 0
    while norm / 2**squarings > 0.5:
        squarings += 1
    b = m / 2**squarings
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def rand_unit_disc_mat(rng) -> np.ndarray:
    """2x2 matrix with entries drawn uniformly from the complex unit disc."""
    r = np.sqrt(rng.uniform(0.0, 1.0, (2, 2)))
    ang = rng.uniform(0.0, 2.0 * math.pi, (2, 2))
    return r * np.exp(1j * ang)


def rand_generator_params(rng, span: float = 2.0) -> tuple[complex, float, float]:
    """Random (a, b, c) of a generator matrix, a complex."""
    re_a, im_a, b, c = rng.uniform(-span, span, 4)
    return complex(re_a, im_a), float(b), float(c)


def rand_admissible(rng, span: float = 1.5) -> AdmissibleLambda:
    """Random admissible matrix via delta = (1 + beta gamma) / alpha.

    Samples are kept away from the |alpha + delta| / 2 = 1 case boundary;
    that case is exercised by explicit constructions.
    """
    while True:
        phi = rng.uniform(0.0, math.pi * 0.999)
        alpha = float(rng.choice([-1.0, 1.0])) * rng.uniform(0.3, 2.0)
        beta = rng.uniform(-span, span)
        gamma = rng.uniform(-span, span)
        delta = (1.0 + beta * gamma) / alpha
        if abs(abs((alpha + delta) / 2.0) - 1.0) > 1e-3:
            return check_admissible(
                AdmissibleLambda(phi, alpha, beta, gamma, delta).matrix()
            )


def boundary_case_lambda(rng) -> AdmissibleLambda:
    """Admissible matrix with (alpha + delta)/2 exactly +-1 (nu = 0 case)."""
    sign = float(rng.choice([-1.0, 1.0]))
    alpha = rng.uniform(0.2, 1.8)
    delta = 2.0 - alpha
    t = rng.uniform(0.5, 2.0)
    beta = t * (alpha - 1.0)
    gamma = -(alpha - 1.0) / t  # beta gamma = -(alpha - 1)^2 => det = 1
    phi = rng.uniform(0.0, math.pi * 0.999)
    return check_admissible(
        (sign * AdmissibleLambda(phi, alpha, beta, gamma, delta).matrix())
    )


def selectors_for(lam: AdmissibleLambda) -> list[BranchSelector]:
    """Two valid branch selectors for the trace case of lam."""
    w = (lam.alpha + lam.delta) / 2.0
    if abs(abs(w) - 1.0) <= 1e-12:
        base = 0 if w > 0 else 1
        return [BranchSelector(n=base), BranchSelector(n=base + 2)]
    if abs(w) < 1.0:
        return [BranchSelector(n=0), BranchSelector(n=1)]
    base = 0 if w > 0 else 1
    return [BranchSelector(n=base), BranchSelector(n=base + 2)]


def sign_changing_table():
    """Piecewise-linear sign-changing profile with int h = 1 exactly."""
    from dirac_point import table_profile

    xs = [-1.0, 0.0, 1.0]
    hs = [-0.5, 1.5, -0.5]  # trapezoid integral = 1
    return table_profile(xs, hs, label="sign-changing test table")
