"""Smooth surrogates for the step function ``I(v > 0)``.

Two families are provided:

``gaussian-cdf``
    ``K = Phi``, the standard normal distribution function (order 2).
``polynomial-7``
    The compactly supported degree-7 polynomial on ``[-5, 5]`` of order 4,
    constant 0 below and 1 above its support.

Each kernel evaluates ``K``, ``K'`` and ``K''`` elementwise on scalars or
arrays.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from .errors import NumericalError, ValidationError

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
# tail mass of the normal density beyond 12 is below 1e-30
GAUSSIAN_SUPPORT = 12.0
POLY_SUPPORT = 5.0
_C1 = 105.0 / 320.0   # K'(0) for polynomial-7
_C2 = 105.0 / 1600.0  # (105/320) * (1/5)


def _as_finite(v):
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("kernel argument must be finite", module="kernels")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class SmoothingKernel:
    """Kernel family descriptor.

    Parameters
    ----------
    family : {"gaussian-cdf", "polynomial-7"}
    order_b : int
        Order of the kernel: moments ``1..b-1`` of ``K'`` vanish, moment ``b``
        does not.
    bandwidth_exponent : Fraction
        Exponent of ``n`` in the rule-of-thumb bandwidth (-1/5 or -1/9).
    """

    family: str
    order_b: int
    bandwidth_exponent: Fraction

    def __post_init__(self):
        if self.family not in ("gaussian-cdf", "polynomial-7"):
            raise ValidationError(f"unknown kernel family {self.family!r}", module="kernels")

    @property
    def support(self):
        """Half-width of the interval outside which ``K'`` is (numerically) zero."""
        return GAUSSIAN_SUPPORT if self.family == "gaussian-cdf" else POLY_SUPPORT

    def evaluate(self, v):
        x = _as_finite(v)
        if self.family == "gaussian-cdf":
            return _out(special.ndtr(x), v)
        u = np.clip(x / POLY_SUPPORT, -1.0, 1.0)
        u2 = u * u
        val = 0.5 + (105.0 / 64.0) * u * (1.0 - u2 * (5.0 / 3.0 - u2 * (7.0 / 5.0 - u2 * (3.0 / 7.0))))
        # clipping makes the polynomial hit 0 / 1 at the ends up to rounding; pin them exactly
        val = np.where(x <= -POLY_SUPPORT, 0.0, np.where(x >= POLY_SUPPORT, 1.0, val))
        return _out(val, v)

    def derivative1(self, v):
        x = _as_finite(v)
        if self.family == "gaussian-cdf":
            return _out(_INV_SQRT_2PI * np.exp(-0.5 * x * x), v)
        u = x / POLY_SUPPORT
        u2 = u * u
        val = _C1 * (1.0 - u2) ** 2 * (1.0 - 3.0 * u2)
        return _out(np.where(np.abs(x) <= POLY_SUPPORT, val, 0.0), v)

    def derivative2(self, v):
        x = _as_finite(v)
        if self.family == "gaussian-cdf":
            return _out(-x * _INV_SQRT_2PI * np.exp(-0.5 * x * x), v)
        u = x / POLY_SUPPORT
        u2 = u * u
        val = _C2 * u * (-10.0 + u2 * (28.0 - 18.0 * u2))
        return _out(np.where(np.abs(x) <= POLY_SUPPORT, val, 0.0), v)

    def moment_integral(self, i):
        """Quadrature of ``int v**i K'(v) dv`` over the kernel's effective support."""
        i = int(i)
        if i < 0 or i > 2 * self.order_b:
            raise ValidationError(f"moment order {i} outside [0, {2 * self.order_b}]", module="kernels")
        s = self.support
        val, err = integrate.quad(lambda v: v**i * self.derivative1(v), -s, s,
                                  epsabs=1e-13, epsrel=1e-12, limit=200)
        if not np.isfinite(val) or err > 1e-9:
            raise NumericalError(f"moment {i} quadrature did not converge (err={err:.2e})",
                                 module="kernels")
        return val

    @property
    def a1(self):
        """``2 * int K'(v)^2 dv``."""
        s = self.support
        return 2.0 * integrate.quad(lambda v: self.derivative1(v) ** 2, -s, s, epsabs=1e-13)[0]

    @property
    def a2(self):
        """``int v K''(v) dv``."""
        s = self.support
        return integrate.quad(lambda v: v * self.derivative2(v), -s, s, epsabs=1e-13)[0]

    def to_dict(self):
        return {"family": self.family, "order": self.order_b,
                "bandwidth_exponent": str(self.bandwidth_exponent)}


GAUSSIAN_CDF = SmoothingKernel("gaussian-cdf", 2, Fraction(-1, 5))
POLYNOMIAL_7 = SmoothingKernel("polynomial-7", 4, Fraction(-1, 9))

_ALIASES = {
    "gaussian": GAUSSIAN_CDF,
    "gaussian-cdf": GAUSSIAN_CDF,
    "poly7": POLYNOMIAL_7,
    "polynomial-7": POLYNOMIAL_7,
}


def get_kernel(name):
    """Look up a kernel by CLI name (``gaussian``/``poly7``) or family name."""
    if isinstance(name, SmoothingKernel):
        return name
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValidationError(f"unknown kernel {name!r}; choose gaussian or poly7",
                              module="kernels") from None
