"""Restart strategies for Las Vegas algorithms.

Thin wrapper over the C++ core: cutoff sequences (Luby, geometric quantile,
constant), simulated-parallel schedules (SPRS, symmetric SPRS), exact and
Monte Carlo evaluation of expected running times, and oracle computations of
optimal restart baselines and quantile bounds.
"""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    Distribution as _Distribution,
    bound_quantile as _bound_quantile,
    bound_sprs as _bound_sprs,
    bound_ssprs as _bound_ssprs,
    c_general,
    c_power,
    curvature_classify,
    curvature_ratio,
    exact_expected_time as _exact_expected_time,
    geometric_quantile,
    lb_sandwich as _lb_sandwich,
    lstar as _lstar,
    luby,
    monte_carlo as _monte_carlo,
    mu_phi as _mu_phi,
    optimal_constant as _optimal_constant,
    oracle_report as _oracle_report,
    psi,
    sequence_values as _sequence_values,
)

__all__ = [
    "ConfigError",
    "Distribution",
    "bound_quantile",
    "bound_sprs",
    "bound_ssprs",
    "c_general",
    "c_power",
    "curvature_classify",
    "curvature_ratio",
    "exact_expected_time",
    "geometric_quantile",
    "lb_sandwich",
    "lstar",
    "luby",
    "monte_carlo",
    "mu_phi",
    "optimal_constant",
    "oracle_report",
    "psi",
    "sequence_values",
]


def _spec(obj):
    """Accept dicts or already-encoded JSON strings."""
    if isinstance(obj, str):
        return obj
    return _json.dumps(obj)


class Distribution(_Distribution):
    """Running-time distribution over [1, +inf] with an optional mass at +inf."""

    @staticmethod
    def from_spec(spec):
        return _Distribution.from_spec(_spec(spec))


def sequence_values(strategy, n, seed=1):
    return _sequence_values(_spec(strategy), n, seed)


def monte_carlo(strategy, dist, n, seed=1, horizon=1e9, threads=1):
    return _monte_carlo(_spec(strategy), _spec(dist), n, seed, horizon, threads)


def exact_expected_time(strategy, dist, tol=1e-12):
    return _exact_expected_time(_spec(strategy), _spec(dist), tol)


def optimal_constant(dist):
    return _optimal_constant(_spec(dist))


def lstar(dist):
    return _lstar(_spec(dist))


def mu_phi(dist, transform):
    return _mu_phi(_spec(dist), transform)


def bound_quantile(dist, q):
    return _bound_quantile(_spec(dist), q)


def bound_sprs(dist, i_max=64):
    return _bound_sprs(_spec(dist), i_max)


def bound_ssprs(dist, i_max=64):
    return _bound_ssprs(_spec(dist), i_max)


def lb_sandwich(dist):
    return _lb_sandwich(_spec(dist))


def oracle_report(dist):
    return _json.loads(_oracle_report(_spec(dist)))
