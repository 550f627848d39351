"""Optimal transmit schedules for a scalar effective channel.

For an effective channel z (watts; lower is better) the source's cost of
moving D bits/Hz in time t at the break-even power (2^(D/t)-1)*z is

    g(t) = t * (lambda_w + (2^(D/t) - 1) * z),

convex in t. ``optimal_schedule`` returns its closed-form minimizer subject
to the transmit-power cap, ``value_of_z`` the optimal cost (strictly
increasing in z), and ``z_of_value`` the numerical inverse of that map.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel
from .numerics import DEFAULT_TOL, ToleranceSpec


@dataclass(frozen=True)
class SystemParams:
    """Global constants shared by every computation.

    d_bits_per_hz: bandwidth-normalized data volume.
    lambda_w: delay power, the weight converting duration into cost.
    p_max_w: transmit power cap for the source and every candidate.
    sigma2_w: receiver noise power.
    a_r_m2: receiver effective aperture.
    alpha: energy-harvesting circuit efficiency, in (0, 1].
    """

    d_bits_per_hz: float = 8.0
    lambda_w: float = 1.0
    p_max_w: float = 1.0
    sigma2_w: float = 1e-9
    a_r_m2: float = 1e-4
    alpha: float = 0.2

    def __post_init__(self):
        for name in ("d_bits_per_hz", "lambda_w", "p_max_w", "sigma2_w", "a_r_m2", "alpha"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"SystemParams.{name} must be strictly positive")
        if self.alpha > 1.0:
            raise ValueError("SystemParams.alpha must not exceed 1")


@dataclass(frozen=True)
class ScheduleSolution:
    """Optimal (duration, power) pair for one effective channel.

    cost_ws equals t_star_s * (lambda_w + p_star_w) exactly;
    constraint_active flags solutions pinned at the power cap.
    """

    t_star_s: float
    p_star_w: float
    cost_ws: float
    constraint_active: bool


def cost_function(t: float, z: float, params: SystemParams) -> float:
    """Source cost g(t) of transmitting over channel z for a duration t > 0."""
    if not t > 0.0:
        raise ValueError(f"duration must be strictly positive, got {t!r}")
    _check_z(z)
    return kernel.cost(t, z, params.d_bits_per_hz, params.lambda_w)


def min_total_power(t: float, z: float, params: SystemParams) -> float:
    """Break-even source power (2^(D/t)-1)*z: the winner harvests exactly
    its own retransmission energy when paid this power for duration t."""
    if not t > 0.0:
        raise ValueError(f"duration must be strictly positive, got {t!r}")
    _check_z(z)
    return kernel.min_power(t, z, params.d_bits_per_hz)


def optimal_schedule(
    z: float, params: SystemParams, tol: ToleranceSpec = DEFAULT_TOL
) -> ScheduleSolution:
    """Closed-form minimizer of ``cost_function`` over t, subject to the cap.

    The unconstrained optimum is D*ln2 / (W0((lambda/z - 1)/e) + 1); the cap
    branch D / log2(1 + p_max/z) takes over for bad channels. Uniqueness
    follows from convexity.
    """
    _check_z(z)
    t, p, c, active = kernel.schedule(
        z,
        params.d_bits_per_hz,
        params.lambda_w,
        params.p_max_w,
        tol.abs_tol,
        tol.rel_tol,
        tol.max_iter,
    )
    return ScheduleSolution(t, p, c, bool(active))


def value_of_z(z: float, params: SystemParams, tol: ToleranceSpec = DEFAULT_TOL) -> float:
    """Optimal source cost v(z); strictly increasing in z."""
    _check_z(z)
    return kernel.value(
        z,
        params.d_bits_per_hz,
        params.lambda_w,
        params.p_max_w,
        tol.abs_tol,
        tol.rel_tol,
        tol.max_iter,
    )


def z_of_value(u: float, params: SystemParams, tol: ToleranceSpec = DEFAULT_TOL) -> float:
    """Inverse of ``value_of_z``: the z whose optimal cost equals u.

    Solved by monotone bracketing/bisection on value_of_z, to
    ``|value_of_z(z) - u| <= max(abs_tol, rel_tol*u)``.
    """
    if not u > 0.0:
        raise ValueError(f"value must be strictly positive, got {u!r}")
    return kernel.invert_value(
        u,
        params.d_bits_per_hz,
        params.lambda_w,
        params.p_max_w,
        tol.abs_tol,
        tol.rel_tol,
        tol.max_iter,
    )


def _check_z(z: float) -> None:
    if not z > 0.0:
        raise ValueError(f"effective channel must be strictly positive, got {z!r}")
