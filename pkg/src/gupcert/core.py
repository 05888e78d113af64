"""Domain types, minimal-length parameters, and the reference state catalog.

Conventions: hbar = 1 and all momenta are wavenumbers.  A strictly positive
deformation parameter `beta` confines the auxiliary wavenumber q to the open
interval (-q0, +q0) with q0 = pi / (2 sqrt(beta)); `beta = 0` reproduces
ordinary quantum mechanics and is represented by an infinite q0 sentinel so
that downstream formulas can branch to the undeformed limit without
cancellation near beta -> 0.

All types are immutable after construction and all operations are pure, so
states and densities can safely be evaluated in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (ContractError, DegenerateStateError,
                     InvalidParameterError, MomentDivergenceError)
from .quadrature import symmetric_rule
from .tails import TailSide

NORM_TOL = 1e-8          # DensityFn normalization defect tolerance
_GAUSSIAN_SUPPORT = 30.0  # effective support of exp(-q^2/(2 s^2)) in units of s


class Domain(Enum):
    Q = "Q"        # auxiliary wavenumber
    X = "X"        # position
    K = "K"        # physical wavenumber
    ZETA = "ZETA"  # smeared physical wavenumber
    XI = "XI"      # smeared position


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinLengthParams:
    """Deformation parameter and the half-width of the auxiliary interval."""

    beta: float
    q0: float

    @property
    def deformed(self) -> bool:
        return self.beta > 0.0


def make_params(beta: float) -> MinLengthParams:
    """Validate beta and derive q0 = pi / (2 sqrt(beta)), infinite for beta = 0."""
    if not (isinstance(beta, (int, float)) and math.isfinite(beta)):
        raise InvalidParameterError(f"beta must be finite, got {beta!r}")
    if beta < 0.0:
        raise InvalidParameterError(f"beta must be nonnegative, got {beta}")
    q0 = math.inf if beta == 0.0 else math.pi / (2.0 * math.sqrt(beta))
    return MinLengthParams(beta=float(beta), q0=q0)


# ---------------------------------------------------------------------------
# grids and densities
# ---------------------------------------------------------------------------

def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Quadrature nodes and weights on one of the tagged axes."""

    nodes: np.ndarray
    weights: np.ndarray
    domain_tag: Domain

    def __post_init__(self):
        object.__setattr__(self, "nodes", _freeze(np.asarray(self.nodes, float)))
        object.__setattr__(self, "weights", _freeze(np.asarray(self.weights, float)))
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise ContractError("grid nodes and weights must be matching 1-d vectors")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ContractError("grid nodes must be strictly increasing")
        if np.any(self.weights <= 0.0):
            raise ContractError("grid weights must be positive")

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def __len__(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class DensityFn:
    """A probability density tabulated on a grid, with tail metadata.

    `tail_mass_bound` accounts for mass outside the grid window so that
    quadrature + tail stays within NORM_TOL of one.  `tail_left/right` carry
    the fitted power-law models used to extend entropy, alpha-norm and moment
    integrals past the window; they may be None when the window covers the
    axis (compact support, or an image grid whose measure is complete).
    """

    grid: Grid
    values: np.ndarray
    tail_mass_bound: float = 0.0
    tail_left: Optional[TailSide] = None
    tail_right: Optional[TailSide] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(np.asarray(self.values, float)))
        if self.values.shape != self.grid.nodes.shape:
            raise ContractError("density values must match the grid")
        if np.any(self.values < -1e-12):
            raise ContractError("density values must be nonnegative")
        if self.tail_mass_bound < 0.0:
            raise ContractError("tail_mass_bound must be nonnegative")
        defect = abs(self.grid.integrate(self.values) + self.tail_mass_bound - 1.0)
        if defect > NORM_TOL:
            raise ContractError(
                f"density not normalized: quadrature + tail misses 1 by {defect:.3e}")

    @property
    def window(self) -> tuple[float, float]:
        return float(self.grid.nodes[0]), float(self.grid.nodes[-1])

    def tail_sides(self) -> list[tuple[TailSide, float]]:
        """Usable tail models with the |abscissa| where each one starts."""
        lo, hi = self.window
        out = []
        if self.tail_left is not None:
            out.append((self.tail_left, abs(lo)))
        if self.tail_right is not None:
            out.append((self.tail_right, abs(hi)))
        return out


@dataclass(frozen=True)
class DiscreteDist:
    """Binned probabilities with their edges and maximal bin width."""

    edges: np.ndarray
    probs: np.ndarray
    delta_max: float

    def __post_init__(self):
        object.__setattr__(self, "edges", _freeze(np.asarray(self.edges, float)))
        object.__setattr__(self, "probs", _freeze(np.asarray(self.probs, float)))
        if self.edges.size != self.probs.size + 1:
            raise ContractError("need len(edges) = len(probs) + 1")
        if np.any(np.diff(self.edges) <= 0.0):
            raise ContractError("bin edges must be strictly increasing")
        if np.any(self.probs < 0.0):
            raise ContractError("bin probabilities must be nonnegative")
        if abs(float(np.sum(self.probs)) - 1.0) > 1e-10:
            raise ContractError("bin probabilities must sum to one")
        widest = float(np.max(np.diff(self.edges)))
        if not math.isclose(self.delta_max, widest, rel_tol=1e-12, abs_tol=1e-15):
            raise ContractError("delta_max inconsistent with edges")


@dataclass(frozen=True)
class OrderPair:
    """Conjugate entropic orders with 1/alpha + 1/gamma = 2 (or the 1,1 pair)."""

    alpha: float
    gamma: float

    def __post_init__(self):
        if self.alpha == 1.0 and self.gamma == 1.0:
            return
        if not self.alpha > 1.0:
            raise InvalidParameterError("need alpha > 1 (or the degenerate 1,1 pair)")
        if not 0.5 <= self.gamma < 1.0:
            raise InvalidParameterError("need gamma in [1/2, 1)")
        if abs(1.0 / self.alpha + 1.0 / self.gamma - 2.0) > 1e-12:
            raise InvalidParameterError("orders must satisfy 1/alpha + 1/gamma = 2")

    @property
    def degenerate(self) -> bool:
        return self.alpha == 1.0


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

# profile signature: profile(q, params) -> complex amplitudes (unnormalized)
Profile = Callable[[np.ndarray, MinLengthParams], np.ndarray]


@dataclass(frozen=True)
class PureState:
    """Auxiliary-space amplitudes phi(q) on a Q grid.

    phi is treated as zero outside (-q0, q0).  `profile` optionally retains
    the generating closure so the state can be re-evaluated on refined grids
    or at a different deformation parameter.
    """

    grid: Grid
    amplitudes: np.ndarray
    params: MinLengthParams
    profile: Optional[Profile] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "amplitudes",
                           _freeze(np.asarray(self.amplitudes, complex)))
        if self.amplitudes.shape != self.grid.nodes.shape:
            raise ContractError("amplitudes must match the grid")
        if math.isfinite(self.params.q0):
            if abs(self.grid.nodes[0]) >= self.params.q0 or self.grid.nodes[-1] >= self.params.q0:
                raise ContractError("Q grid must lie strictly inside (-q0, q0)")

    def density_values(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_sq(self) -> float:
        return self.grid.integrate(self.density_values())


@dataclass(frozen=True)
class MixedState:
    """Finite convex combination of pure states sharing params and grid."""

    components: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        if not self.components:
            raise ContractError("mixed state needs at least one component")
        weights = [w for w, _ in self.components]
        if any(not 0.0 < w <= 1.0 for w in weights):
            raise ContractError("component weights must lie in (0, 1]")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ContractError("component weights must sum to one")
        first = self.components[0][1]
        for _, st in self.components[1:]:
            if st.params != first.params:
                raise ContractError("components must share MinLengthParams")
            if len(st.grid) != len(first.grid) or not np.array_equal(
                    st.grid.nodes, first.grid.nodes):
                raise ContractError("components must share the Q grid")

    @property
    def params(self) -> MinLengthParams:
        return self.components[0][1].params

    @property
    def grid(self) -> Grid:
        return self.components[0][1].grid

    def density_values(self) -> np.ndarray:
        out = np.zeros(len(self.grid))
        for w, st in self.components:
            out += w * st.density_values()
        return out


def as_mixed(state: PureState | MixedState) -> MixedState:
    if isinstance(state, MixedState):
        return state
    return MixedState(components=((1.0, state),))


def normalize(state: PureState) -> PureState:
    """Rescale amplitudes to unit norm; zero-norm input is degenerate."""
    nsq = state.norm_sq()
    if nsq <= 1e-280:
        raise DegenerateStateError("state has numerically zero norm")
    return PureState(grid=state.grid,
                     amplitudes=state.amplitudes / math.sqrt(nsq),
                     params=state.params,
                     profile=state.profile)


def mix_states(weights: Sequence[float], states: Sequence[PureState]) -> MixedState:
    """Convex mixture; re-evaluates profiles on a common grid if needed."""
    if len(weights) != len(states) or not states:
        raise ContractError("need matching, nonempty weights and states")
    base = states[0]
    rebuilt = [base]
    for st in states[1:]:
        if np.array_equal(st.grid.nodes, base.grid.nodes):
            rebuilt.append(st)
        elif st.profile is not None:
            amp = st.profile(base.grid.nodes, st.params)
            rebuilt.append(normalize(PureState(grid=base.grid, amplitudes=amp,
                                               params=st.params, profile=st.profile)))
        else:
            raise ContractError("cannot mix states on different grids without profiles")
    return MixedState(components=tuple((float(w), s) for w, s in zip(weights, rebuilt)))


# ---------------------------------------------------------------------------
# state catalog
# ---------------------------------------------------------------------------

CATALOG_NAMES = ("uniform_q", "raised_cosine_q", "truncated_gaussian_q",
                 "random_fourier_q")

_BASE_PANEL_NODES = 24
_MAX_PANEL_NODES = 96


def _finite_q0(params: MinLengthParams, name: str) -> float:
    if not math.isfinite(params.q0):
        raise InvalidParameterError(
            f"{name} needs beta > 0: it is not normalizable on an infinite interval")
    return params.q0


def _uniform_profile(q, params):
    return np.ones_like(q, dtype=complex)


def _raised_cosine_profile(q, params):
    return np.cos(math.pi * q / (2.0 * params.q0)).astype(complex)


def _make_gaussian_profile(s: float) -> Profile:
    def profile(q, params):
        return np.exp(-q * q / (4.0 * s * s)).astype(complex)
    return profile


def _make_random_fourier_profile(n_modes: int, seed: int) -> Profile:
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)

    def profile(q, params):
        q0 = params.q0
        out = np.zeros(q.shape, dtype=complex)
        for n in range(1, n_modes + 1):
            out += coeff[n - 1] * np.sin(n * math.pi * (q + q0) / (2.0 * q0))
        return out
    return profile


def _state_grid(params: MinLengthParams, scale: float, graded: bool,
                n_per_panel: int) -> Grid:
    if math.isfinite(params.q0):
        half, sc = params.q0, min(scale, params.q0)
    else:
        half, sc = _GAUSSIAN_SUPPORT * scale, scale
    nodes, weights = symmetric_rule(half, sc, n_per_panel, graded=graded)
    return Grid(nodes=nodes, weights=weights, domain_tag=Domain.Q)


def _entropy_probe(state: PureState) -> float:
    """H(Q) + H(K) pulled back to the Q grid; drives resolution doubling."""
    v = state.density_values()
    w = state.grid.weights
    mask = v > 1e-300
    hq = -np.sum(w[mask] * v[mask] * np.log(v[mask]))
    beta = state.params.beta
    if beta == 0.0:
        return 2.0 * float(hq)
    ln_jac = -2.0 * np.log(np.cos(math.sqrt(beta) * state.grid.nodes))
    return float(2.0 * hq + np.sum(w * v * ln_jac))


def _build_catalog_state(profile: Profile, params: MinLengthParams, scale: float,
                         graded: bool) -> PureState:
    n = _BASE_PANEL_NODES
    state = None
    probe = None
    while True:
        grid = _state_grid(params, scale, graded, n)
        cand = normalize(PureState(grid=grid, amplitudes=profile(grid.nodes, params),
                                   params=params, profile=profile))
        new_probe = _entropy_probe(cand)
        if probe is not None and abs(new_probe - probe) < 1e-9:
            return cand
        if n >= _MAX_PANEL_NODES:
            return cand
        state, probe = cand, new_probe
        n *= 2


def catalog_state(name: str, params: MinLengthParams,
                  shape_args: Sequence[float] = (),
                  seed: Optional[int] = None) -> PureState:
    """Build a normalized reference state supported on (-q0, q0).

    uniform_q            flat amplitude 1/sqrt(2 q0)
    raised_cosine_q      phi ~ cos(pi q / (2 q0))
    truncated_gaussian_q phi ~ exp(-q^2 / (4 s^2)), s = shape_args[0]
    random_fourier_q     seeded complex combination of the first m box modes
                         vanishing at +-q0, m = shape_args[0] (default 8)
    """
    if name == "uniform_q":
        q0 = _finite_q0(params, name)
        return _build_catalog_state(_uniform_profile, params, q0, graded=True)
    if name == "raised_cosine_q":
        q0 = _finite_q0(params, name)
        return _build_catalog_state(_raised_cosine_profile, params, q0, graded=True)
    if name == "truncated_gaussian_q":
        if not shape_args or shape_args[0] <= 0.0:
            raise InvalidParameterError("truncated_gaussian_q needs a width s > 0")
        s = float(shape_args[0])
        return _build_catalog_state(_make_gaussian_profile(s), params, s,
                                    graded=params.deformed)
    if name == "random_fourier_q":
        q0 = _finite_q0(params, name)
        if seed is None:
            raise InvalidParameterError("random_fourier_q needs a seed")
        m = int(shape_args[0]) if shape_args else 8
        if m < 1:
            raise InvalidParameterError("random_fourier_q needs at least one mode")
        profile = _make_random_fourier_profile(m, seed)
        return _build_catalog_state(profile, params, q0 / m, graded=True)
    raise InvalidParameterError(f"unknown catalog state {name!r}")


def rebuild_state(state: PureState, beta: float) -> PureState:
    """Re-evaluate a profiled state at a different deformation parameter."""
    if state.profile is None:
        raise ContractError("state has no profile; cannot rebuild at a new beta")
    params = make_params(beta)
    scale = _probe_scale(state)
    graded = params.deformed
    return _build_catalog_state(state.profile, params, scale, graded)


def _probe_scale(state: PureState) -> float:
    v = state.density_values()
    mean = state.grid.integrate(state.grid.nodes * v)
    var = state.grid.integrate((state.grid.nodes - mean) ** 2 * v)
    return max(math.sqrt(max(var, 1e-30)), 1e-6)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

class MomentEstimate(NamedTuple):
    value: float
    est_error: float


def moment(density: DensityFn, n: int) -> MomentEstimate:
    """Integral of t^n against the density, with a tail-aware error estimate.

    Heavy tails are extended by the fitted power-law model; when the model
    says the integral diverges at a numerically material scale, a
    MomentDivergenceError carrying the partial grid value is raised instead
    of returning an arbitrarily grid-dependent number.
    """
    if not (isinstance(n, int) and n >= 1):
        raise ContractError("moment order must be a positive integer")
    t = density.grid.nodes
    grid_part = density.grid.integrate(t ** n * density.values)

    tail_part = 0.0
    tail_err = 0.0
    lo, hi = density.window
    for side, start in density.tail_sides():
        if not side.moment_converges(n):
            # divergent in principle; material only when the coefficient can
            # move the value within several decades of where the power law
            # demonstrably starts
            ref = max(side.valid_from, 1.0)
            scale = side.divergent_scale(n, ref, ref * 1e6)
            if scale > 1e-6 * (1.0 + abs(grid_part)):
                raise MomentDivergenceError(
                    f"moment of order {n} diverges (tail exponent {side.exponent:g})",
                    partial=float(grid_part), tail_exponent=side.exponent)
            tail_err += scale
            continue
        add = side.moment_beyond(n, start)
        sign = (-1.0) ** n if start == abs(lo) else 1.0
        tail_part += sign * add
        tail_err += 0.3 * abs(add)

    interp_err = _refinement_delta(density, lambda p, x: p * x ** n)
    return MomentEstimate(value=float(grid_part + tail_part),
                          est_error=float(interp_err + tail_err))


def _refinement_delta(density: DensityFn, integrand) -> float:
    """Difference between the grid rule and a monotone-interpolant integral.

    Serves as an honest resolution-error proxy for integrals of tabulated
    densities: both estimates converge to the same limit, so their gap bounds
    the grid contribution at the achieved resolution.
    """
    x = density.grid.nodes
    p = np.clip(density.values, 0.0, None)
    f = integrand(p, x)
    try:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            interp = PchipInterpolator(x, f, extrapolate=False)
        anti = interp.antiderivative()
        alt = float(anti(x[-1]) - anti(x[0]))
    except ValueError:
        return 0.0
    return abs(alt - float(density.grid.integrate(f)))
