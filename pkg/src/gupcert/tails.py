"""Power-law tail models for densities tabulated on finite windows.

A tabulated density only covers a window of its axis.  Physical-wavenumber
densities can decay as slowly as 1/k^2 (sharp features of the auxiliary
density at the interval edge map onto Cauchy-type tails) and position
densities of edge-supported states decay as oscillatory sin^2(ax+phi)/x^2.
Mass, Shannon entropy, alpha-norm and moment integrals all pick up material
contributions from such tails, so each side of a window carries a fitted
model

    density(t) ~ c / |t|**p            (mean envelope, non-oscillatory)
    density(t) ~ 2 c sin^2(a t + phi) / |t|**p   (oscillatory; mean c/|t|**p)

where `c` is always the mean-envelope coefficient.  Oscillatory models use
period averages of the sin^2 factor: <s^2> = 1/2, <-s^2 ln s^2> = ln 2 - 1/2,
and <s^(2g)> = Gamma(g + 1/2) / (sqrt(pi) Gamma(g + 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# <-sin^2 ln sin^2> over one period
_OSC_ENTROPY_MEAN = math.log(2.0) - 0.5


def _osc_power_mean(g: float) -> float:
    """Period average of |sin|**(2 g)."""
    return math.exp(math.lgamma(g + 0.5) - math.lgamma(g + 1.0)) / math.sqrt(math.pi)


@dataclass(frozen=True)
class TailSide:
    """Fitted tail on one side of a window, valid for |t| >= valid_from."""

    coeff: float        # mean-envelope coefficient c
    exponent: float     # decay exponent p
    oscillatory: bool
    valid_from: float

    def mass_beyond(self, t: float) -> float:
        p = self.exponent
        return self.coeff * t ** (1.0 - p) / (p - 1.0)

    def entropy_beyond(self, t: float) -> float:
        """Integral of -w ln w over the tail, by period-averaged closed form."""
        c, p = self.coeff, self.exponent
        if c <= 0.0:
            return 0.0
        base = c * t ** (1.0 - p) / (p - 1.0)
        term = p * math.log(t) + p / (p - 1.0) - math.log(c)
        if self.oscillatory:
            term += 2.0 * _OSC_ENTROPY_MEAN - math.log(2.0)
        return base * term

    def alpha_converges(self, alpha: float) -> bool:
        return self.exponent * alpha > 1.0 + 1e-2

    def alpha_mass_beyond(self, alpha: float, t: float) -> float:
        c, p = self.coeff, self.exponent
        expo = p * alpha - 1.0
        if self.oscillatory:
            return (2.0 * c) ** alpha * _osc_power_mean(alpha) * t ** (-expo) / expo
        return c ** alpha * t ** (-expo) / expo

    def moment_converges(self, n: int) -> bool:
        return self.exponent - n > 1.0 + 1e-2

    def moment_beyond(self, n: int, t: float) -> float:
        """Integral of t^n * density over the tail (absolute value of abscissa)."""
        c, p = self.coeff, self.exponent
        return c * t ** (n + 1.0 - p) / (p - n - 1.0)

    def divergent_scale(self, n: int, t_lo: float, t_hi: float) -> float:
        """Magnitude of the (divergent or near-divergent) n-th moment tail.

        Used to decide whether a formally divergent tail is numerically
        material: coefficients can underflow to the point where the
        divergence is invisible at any representable scale.
        """
        c, p = self.coeff, self.exponent
        expo = n + 1.0 - p
        if abs(expo) < 1e-9:
            return c * math.log(t_hi / t_lo)
        return abs(c * (t_hi ** expo - t_lo ** expo) / expo)


def fit_power_tail(abscissa: np.ndarray, values: np.ndarray,
                   snap_to=(2.0, 4.0), snap_window: float = 0.5,
                   min_points: int = 8) -> TailSide | None:
    """Least-squares power-law fit values ~ c * t**(-p) on a positive abscissa.

    Returns None when there are too few usable points or the fitted tail is
    numerically absent.  The exponent snaps to the nearest entry of `snap_to`
    when within `snap_window`, since the change-of-variables structure only
    produces even integer decay rates.
    """
    t = np.asarray(abscissa, dtype=float)
    y = np.asarray(values, dtype=float)
    keep = (y > 0.0) & np.isfinite(y) & (t > 0.0)
    t, y = t[keep], y[keep]
    if t.size < min_points:
        return None
    lt, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lt, ly, 1)
    p = -slope
    for target in snap_to:
        if abs(p - target) < snap_window:
            p = target
            break
    if p <= 1.05:
        return None
    c = float(np.exp(np.mean(ly + p * lt)))
    # tiny-mass tails are still kept: their exponent is what detects
    # divergent moments, and consumers weigh the coefficient themselves
    return TailSide(coeff=c, exponent=float(p), oscillatory=False,
                    valid_from=float(t[0]))
