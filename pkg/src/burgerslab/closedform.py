"""Closed-form quantities of the two-peak exponential initial datum.

The datum is

    u0(x) = p0 * (exp(-|x + q0|) - exp(-|x - q0|)),   p0 > 0,  0 < q0 < 1.

It is odd, Lipschitz, and piecewise smooth with derivative jumps at
x = +-q0.  Every branch is a linear combination of e^x and e^-x, so all
derived quantities (one-sided slopes, Fourier transform, the squared-slope
integral over the core interval, the gradient blow-up time, and a
two-sided Sobolev-norm bracket) are available in closed form.  The rest of
the package builds on these formulas; everything here is a pure function.

Evaluations use expm1/sinh-style forms so the q0 -> 0 regime, where the
norm-inflation parameter recipe lives, does not lose accuracy to
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError, KinkPointError

ArrayOrFloat = Union[float, np.ndarray]

#: Sides for one-sided evaluation at the derivative jumps.
LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class PeakonPair:
    """Two-peak initial datum parameters: amplitude p0 and half-separation q0."""

    p0: float
    q0: float

    def __post_init__(self):
        if not (isinstance(self.p0, (int, float)) and self.p0 > 0):
            raise DomainError(f"p0 must be a positive real, got p0={self.p0!r}")
        if not (isinstance(self.q0, (int, float)) and 0.0 < self.q0 < 1.0):
            raise DomainError(f"q0 must lie in the open interval (0, 1), got q0={self.q0!r}")


@dataclass(frozen=True)
class SobolevIndex:
    """Regularity exponent s of the frequency-weighted norm, valid on (1/2, 3/2)."""

    s: float

    def __post_init__(self):
        if not (isinstance(self.s, (int, float)) and 0.5 < self.s < 1.5):
            raise DomainError(
                f"Sobolev index must lie in the open interval (1/2, 3/2), got s={self.s!r}"
            )


def as_sobolev(s) -> SobolevIndex:
    """Coerce a float (or SobolevIndex) to a validated SobolevIndex."""
    if isinstance(s, SobolevIndex):
        return s
    return SobolevIndex(float(s))


def make_peakon_pair(p0: float, q0: float) -> PeakonPair:
    """Validate and build a PeakonPair (raises DomainError naming the bad field)."""
    return PeakonPair(float(p0), float(q0))


class Bracket(NamedTuple):
    lower: float
    upper: float


def _match(x, out):
    """Return a Python float for scalar input, ndarray otherwise."""
    if np.ndim(x) == 0:
        return float(out)
    return out


def _side_is_inner_mask(x: np.ndarray, q0: float, side: str) -> np.ndarray:
    """Points classified onto the middle branch, using `side` exactly at +-q0."""
    if side not in (LEFT, RIGHT):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    inner = np.abs(x) < q0
    if side == LEFT:
        return inner | (x == q0)
    return inner | (x == -q0)


def eval_u0(d: PeakonPair, x: ArrayOrFloat) -> ArrayOrFloat:
    """Evaluate the initial datum u0 at x.

    Branch forms: -2*p0*e^-q0*sinh(x) on |x| <= q0 and
    -sign(x)*2*p0*sinh(q0)*e^-|x| outside.  Both agree at |x| = q0, and the
    sinh forms make u0 exactly odd in floating point.
    """
    xa = np.asarray(x, dtype=float)
    inner = -2.0 * d.p0 * math.exp(-d.q0) * np.sinh(xa)
    outer = -np.sign(xa) * (2.0 * d.p0 * math.sinh(d.q0)) * np.exp(-np.abs(xa))
    return _match(x, np.where(np.abs(xa) <= d.q0, inner, outer))


def eval_du0(d: PeakonPair, x: ArrayOrFloat, side: str = LEFT) -> ArrayOrFloat:
    """One-sided derivative of u0.

    Piecewise values: -2*p0*e^-q0*cosh(x) strictly between the kinks
    (negative) and 2*p0*sinh(q0)*e^-|x| outside (positive).  `side` only
    matters at x = +-q0 where the two limits differ.
    """
    xa = np.asarray(x, dtype=float)
    inner = -2.0 * d.p0 * math.exp(-d.q0) * np.cosh(xa)
    outer = (2.0 * d.p0 * math.sinh(d.q0)) * np.exp(-np.abs(xa))
    return _match(x, np.where(_side_is_inner_mask(xa, d.q0, side), inner, outer))


def eval_ddu0(d: PeakonPair, x: ArrayOrFloat) -> ArrayOrFloat:
    """Branchwise second derivative of u0.

    Each branch is a combination of e^x and e^-x, so u0'' = u0 away from
    the kinks.  Raises KinkPointError at x = +-q0 exactly, where the
    classical second derivative does not exist.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) == d.q0):
        raise KinkPointError(
            f"second derivative undefined at the kink points x = +-q0 = +-{d.q0}"
        )
    return eval_u0(d, x)


def fourier_u0(d: PeakonPair, xi: ArrayOrFloat) -> Union[complex, np.ndarray]:
    """Fourier transform of u0 under the convention F(f)(xi) = int e^{-i x xi} f dx.

    Each exponential peak transforms to 2/(1+xi^2); the odd difference of
    the two shifted peaks gives 4i * p0 * sin(q0*xi) / (1 + xi^2).
    """
    xia = np.asarray(xi, dtype=float)
    out = 4.0j * d.p0 * np.sin(d.q0 * xia) / (1.0 + xia * xia)
    if np.ndim(xi) == 0:
        return complex(out)
    return out


def lemma1_bracket(s) -> Bracket:
    """Constants (L, U), independent of q0, with
    L * q0^(3-2s) <= ||f||_{H^s}^2 <= U * q0^(3-2s) for the unit-amplitude datum.

    The squared norm equals 32 * int_0^inf (1+xi^2)^(s-2) sin^2(q0 xi) dxi.
    Lower: restrict to [0, pi/q0], bound the weight below by its endpoint
    value, and use q0 < 1; this gives 16*pi*(1+pi^2)^(-3/2).  Upper: split
    at 1/q0 and use sin^2(q0 xi) <= min((q0 xi)^2, 1) with
    (1+xi^2)^(s-2) <= xi^(2s-4), giving 32*(1/(2s-1) + 1/(3-2s)).
    """
    sv = as_sobolev(s).s
    lower = 16.0 * math.pi * (1.0 + math.pi**2) ** (-1.5)
    upper = 32.0 * (1.0 / (2.0 * sv - 1.0) + 1.0 / (3.0 - 2.0 * sv))
    return Bracket(lower, upper)


def lip_seminorm_u0(d: PeakonPair) -> float:
    """sup_x |u0'(x)| = p0*(1 + e^{-2 q0}), the inner one-sided limit at +-q0."""
    return d.p0 * (1.0 + math.exp(-2.0 * d.q0))


def max_abs_u0(d: PeakonPair) -> float:
    """sup_x |u0(x)| = p0*(1 - e^{-2 q0}), attained at the kinks x = -+q0."""
    return -d.p0 * math.expm1(-2.0 * d.q0)


def a0_closed_form(d: PeakonPair) -> float:
    """Exact integral of (u0')^2 over the core interval [-q0, q0].

    Integrating p0^2 e^{-2 q0} (e^x + e^-x)^2 gives
    p0^2 * (1 - e^{-4 q0} + 4 q0 e^{-2 q0}), which tends to 8 p0^2 q0 as
    q0 -> 0.
    """
    return d.p0**2 * (-math.expm1(-4.0 * d.q0) + 4.0 * d.q0 * math.exp(-2.0 * d.q0))


def blowup_time(d: PeakonPair) -> float:
    """First time the flow map loses invertibility.

    Equal to -1/min u0' = 1/(p0*(1 + e^{-2 q0})), which lies strictly
    between 1/(2 p0) and 1/p0.
    """
    return 1.0 / lip_seminorm_u0(d)
