"""Built-in experiments: manufactured smooth cases and random-data runs.

The smooth cases use the separable profile ``exp(-t) * prod x^4 (1-x)^4``
whose fractional diffusion has a closed form, so a source term makes it an
exact solution of the forced equation; they drive the convergence studies.
The random cases seed phase separation for the maximum-principle experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .kernel import averaging_weights
from .stepper import Field

__all__ = [
    "ManufacturedCase",
    "ManufacturedSource",
    "RandomInitial",
    "axis_profile",
    "riesz_bracket",
    "manufactured_case",
    "source_term_2d",
    "source_term_3d",
    "random_initial",
]

# x^4 (1-x)^4 expanded: coefficient of x^p for p = 4..8.
_EXPANSION = ((4, 1.0), (5, -4.0), (6, 6.0), (7, -4.0), (8, 1.0))


def axis_profile(x):
    """The per-axis factor ``x^4 (1-x)^4`` of the manufactured solution."""
    return x ** 4 * (1.0 - x) ** 4


def riesz_bracket(alpha: float, x):
    """Two-sided Riemann-Liouville derivative of the axis profile.

    ``sum_p a_p Gamma(p+1)/Gamma(p+1-alpha) (x^{p-alpha} + (1-x)^{p-alpha})``
    over the monomial expansion of the profile; the gamma ratios are taken in
    log space (all arguments positive).
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for p, a in _EXPANSION:
        ratio = math.exp(gammaln(p + 1.0) - gammaln(p + 1.0 - alpha))
        q = p - alpha
        out += (a * ratio) * (x ** q + (1.0 - x) ** q)
    return out


def _separable_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for k, f in enumerate(factors[1:], start=1):
        out = out[..., None] * f
    return out


@dataclass(frozen=True)
class ManufacturedSource:
    """Source making the separable profile an exact solution of the equation.

    Pointwise, ``g = u^3 - 2u - eps^2 L_alpha u`` for
    ``u = exp(-t) prod_axes x^4(1-x)^4``.  The time dependence separates into
    an ``exp(-3t)`` cubic part and an ``exp(-t)`` linear-plus-diffusion part,
    so grid sampling precomputes two static fields; at fourth order the
    compact average is folded into the per-axis factors (using their boundary
    samples, where the source does not vanish).
    """

    dims: int
    alpha: float
    eps: float

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")
        if self.dims not in (2, 3):
            raise ValueError(f"dims must be 2 or 3, got {self.dims}")

    @property
    def _q(self) -> float:
        # eps^2 / (2 cos(alpha pi/2)); negative on (1,2), equals -eps^2/2 at 2.
        return self.eps ** 2 / (2.0 * math.cos(self.alpha * math.pi / 2.0))

    def __call__(self, *coords_and_t):
        """Vectorized pointwise evaluation ``g(x, y[, z], t)``."""
        if len(coords_and_t) != self.dims + 1:
            raise ValueError(f"expected {self.dims} coordinates plus t")
        coords = [np.asarray(c, dtype=float) for c in coords_and_t[:-1]]
        t = coords_and_t[-1]
        profiles = [axis_profile(c) for c in coords]
        brackets = [riesz_bracket(self.alpha, c) for c in coords]
        u_space = profiles[0]
        for f in profiles[1:]:
            u_space = u_space * f
        cross = 0.0
        for a in range(self.dims):
            term = brackets[a]
            for b in range(self.dims):
                if b != a:
                    term = term * profiles[b]
            cross = cross + term
        return (
            np.exp(-3.0 * np.asarray(t)) * u_space ** 3
            + np.exp(-np.asarray(t)) * (self._q * cross - 2.0 * u_space)
        )

    def bind_grid(
        self, axes: Sequence[np.ndarray], spatial_order: int
    ) -> Callable[[float], np.ndarray]:
        """Precompute static fields for a grid; returns ``t -> interior sample``.

        The returned samples are scheme-ready: compact-averaged at order 4,
        plain interior values at order 2.
        """
        if len(axes) != self.dims:
            raise ValueError(f"expected {self.dims} axes, got {len(axes)}")
        w0, w1 = averaging_weights(self.alpha)

        def ready(values: np.ndarray) -> np.ndarray:
            if spatial_order == 2:
                return values[1:-1].copy()
            return w1 * values[:-2] + w0 * values[1:-1] + w1 * values[2:]

        p = [np.asarray(axis_profile(ax)) for ax in axes]
        b = [riesz_bracket(self.alpha, ax) for ax in axes]
        p_avg = [ready(f) for f in p]
        cubic = _separable_product([ready(f ** 3) for f in p])
        linear = -2.0 * _separable_product(p_avg)
        for a in range(self.dims):
            factors = [ready(b[a]) if k == a else p_avg[k] for k in range(self.dims)]
            linear = linear + self._q * _separable_product(factors)

        def sample(t: float) -> np.ndarray:
            return math.exp(-3.0 * t) * cubic + math.exp(-t) * linear

        return sample


@dataclass(frozen=True)
class ManufacturedCase:
    """Smooth forced problem with the known separable solution (eps = 0.1)."""

    dims: int
    eps: float = 0.1

    def __post_init__(self) -> None:
        if self.dims not in (2, 3):
            raise ValueError(f"dims must be 2 or 3, got {self.dims}")

    def exact(self, coords: Sequence, t) -> np.ndarray:
        """Exact solution at coordinates (scalars or broadcastable arrays)."""
        if len(coords) != self.dims:
            raise ValueError(f"expected {self.dims} coordinates, got {len(coords)}")
        value = np.exp(-np.asarray(t, dtype=float))
        for c in coords:
            value = value * axis_profile(np.asarray(c, dtype=float))
        return value

    def exact_field(self, sizes: Sequence[int], t: float) -> Field:
        axes = [np.arange(m + 1) / m for m in sizes]
        values = math.exp(-t) * _separable_product([axis_profile(ax) for ax in axes])
        return Field(values, t)

    def initial_field(self, sizes: Sequence[int]) -> Field:
        return self.exact_field(sizes, 0.0)

    def source(self, alpha: float) -> ManufacturedSource:
        return ManufacturedSource(dims=self.dims, alpha=alpha, eps=self.eps)


def manufactured_case(dims: int, eps: float = 0.1) -> ManufacturedCase:
    return ManufacturedCase(dims=dims, eps=eps)


def source_term_2d(alpha: float, eps: float, x, y, t):
    """Pointwise 2D source ``g(x, y, t)`` of the smooth forced problem."""
    return ManufacturedSource(dims=2, alpha=alpha, eps=eps)(x, y, t)


def source_term_3d(alpha: float, eps: float, x, y, z, t):
    """Pointwise 3D source ``g(x, y, z, t)`` of the smooth forced problem."""
    return ManufacturedSource(dims=3, alpha=alpha, eps=eps)(x, y, z, t)


@dataclass(frozen=True)
class RandomInitial:
    """Seeded uniform initial data ``u0 = scale * rand + offset`` (zero frame)."""

    seed: int
    scale: float
    offset: float


def random_initial(spec: RandomInitial, sizes: Sequence[int]) -> Field:
    """Deterministic random interior values via the seeded PCG64 generator.

    Interior values are i.i.d. uniform on ``[offset, offset + scale)``; the
    boundary frame is zero.  The same seed always reproduces the same field.
    """
    rng = np.random.default_rng(spec.seed)
    field = Field.zeros(sizes)
    interior_shape = tuple(int(m) - 1 for m in sizes)
    field.interior[...] = spec.scale * rng.random(interior_shape) + spec.offset
    return field
