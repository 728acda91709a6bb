"""Standard normal CDF, density and quantile function (scalar or array)."""
import math

import numpy as np
from scipy import special

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def cdf(x):
    # ndtr is erfc-based, so the lower tail keeps full relative accuracy
    return special.ndtr(x)


def pdf(x):
    x = np.asarray(x, dtype=float)
    out = INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out


def ppf(p):
    return special.ndtri(p)
