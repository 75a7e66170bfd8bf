"""Catalog of location-scale families.

Each family bundles the standard-form (mu=0, sigma=1) density, distribution
function, quantile function, support, and the standardized Fisher
information.  General-parameter versions follow from

    f(x) = f0((x - mu)/sigma)/sigma,   F(x) = F0((x - mu)/sigma),
    Finv(u) = mu + sigma * Q0(u),

so everything downstream works with the standard forms plus (mu, sigma).

Folded and log-location-scale variants are handled by transforming the data
first (e.g. fit log(x) for a log-location-scale model); they get no
dedicated types here.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError, Unavailable

__all__ = [
    "EULER_GAMMA",
    "Family",
    "ParamMode",
    "Params",
    "FAMILIES",
    "family_names",
    "get_family",
]

EULER_GAMMA = float(np.euler_gamma)

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_U_FLOOR = float(np.finfo(float).tiny)
_U_CEIL = 1.0 - 1e-16


class ParamMode(enum.Enum):
    """Which parameters are estimated; the other one is treated as known."""

    LOCATION_SCALE = "loc-scale"
    LOCATION_ONLY = "location"
    SCALE_ONLY = "scale"

    @property
    def n_params(self) -> int:
        return 2 if self is ParamMode.LOCATION_SCALE else 1


def parse_mode(text: str) -> ParamMode:
    key = text.strip().lower()
    for mode in ParamMode:
        if key == mode.value:
            return mode
    aliases = {"locscale": ParamMode.LOCATION_SCALE, "ls": ParamMode.LOCATION_SCALE,
               "loc": ParamMode.LOCATION_ONLY, "mu": ParamMode.LOCATION_ONLY,
               "sigma": ParamMode.SCALE_ONLY}
    if key in aliases:
        return aliases[key]
    raise DomainError(f"unknown parameter mode {text!r}")


@dataclass(frozen=True)
class Params:
    """Location-scale parameter pair; sigma must be positive for use as a
    distribution parameter (fits may carry a non-positive estimate, tagged
    with a warning, which downstream consumers refuse)."""

    mu: float = 0.0
    sigma: float = 1.0

    def as_tuple(self) -> tuple[float, float]:
        return (self.mu, self.sigma)


def _vectorized(fn: Callable[[np.ndarray], np.ndarray]):
    """Run a piecewise kernel on atleast-1d input, unwrap scalar results."""

    @functools.wraps(fn)
    def wrapper(z):
        arr = np.asarray(z, dtype=float)
        out = fn(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    return wrapper


# ---------------------------------------------------------------------------
# standard-form kernels
# ---------------------------------------------------------------------------

def _cauchy_pdf(z):
    z = np.asarray(z, dtype=float)
    return 1.0 / (math.pi * (1.0 + z * z))


def _cauchy_cdf(z):
    z = np.asarray(z, dtype=float)
    return 0.5 + np.arctan(z) / math.pi


def _cauchy_qf(u):
    return np.tan(math.pi * (np.asarray(u, dtype=float) - 0.5))


@_vectorized
def _laplace_pdf(z):
    return 0.5 * np.exp(-np.abs(z))


@_vectorized
def _laplace_cdf(z):
    out = np.empty_like(z)
    neg = z <= 0
    out[neg] = 0.5 * np.exp(z[neg])
    out[~neg] = 1.0 - 0.5 * np.exp(-z[~neg])
    return out


@_vectorized
def _laplace_qf(u):
    # piecewise exactly; avoids cancellation near u = 0.5
    out = np.empty_like(u)
    lo = u <= 0.5
    out[lo] = np.log(2.0 * u[lo])
    out[~lo] = -np.log(2.0 * (1.0 - u[~lo]))
    return out


def _logistic_pdf(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        return 0.25 / np.cosh(0.5 * z) ** 2


def _logistic_cdf(z):
    return special.expit(np.asarray(z, dtype=float))


def _logistic_qf(u):
    return special.logit(np.asarray(u, dtype=float))


def _normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z) / _SQRT_2PI


def _normal_cdf(z):
    return special.ndtr(np.asarray(z, dtype=float))


def _normal_qf(u):
    return special.ndtri(np.asarray(u, dtype=float))


@_vectorized
def _exponential_pdf(z):
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = np.exp(-z[pos])
    return out


@_vectorized
def _exponential_cdf(z):
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = -np.expm1(-z[pos])
    return out


def _exponential_qf(u):
    return -np.log1p(-np.asarray(u, dtype=float))


def _gumbel_pdf(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        return np.exp(-z - np.exp(-z))


def _gumbel_cdf(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        return np.exp(-np.exp(-z))


def _gumbel_qf(u):
    return -np.log(-np.log(np.asarray(u, dtype=float)))


@_vectorized
def _levy_pdf(z):
    out = np.zeros_like(z)
    pos = z > 0
    zp = z[pos]
    out[pos] = np.exp(-0.5 / zp) / (_SQRT_2PI * zp ** 1.5)
    return out


@_vectorized
def _levy_cdf(z):
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = special.erfc(1.0 / np.sqrt(2.0 * z[pos]))
    return out


def _levy_qf(u):
    return special.ndtri(1.0 - 0.5 * np.asarray(u, dtype=float)) ** -2.0


# ---------------------------------------------------------------------------
# family descriptor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """Descriptor for one location-scale family in standard form."""

    name: str
    support: tuple[float, float]
    symmetric: bool
    _pdf: Callable = field(repr=False)
    _cdf: Callable = field(repr=False)
    _qf: Callable = field(repr=False)
    # standardized information: 2x2 for full location-scale families, or a
    # scale-only scalar when regularity fails for the joint model
    _info: tuple[tuple[float, float], tuple[float, float]] | None = field(repr=False, default=None)
    _scale_info: float = field(repr=False, default=float("nan"))

    def pdf(self, z):
        """Standard density; zero outside the support."""
        return self._pdf(z)

    def cdf(self, z):
        """Standard distribution function."""
        return self._cdf(z)

    def qf(self, u):
        """Standard quantile function on the open interval (0, 1)."""
        arr = np.asarray(u, dtype=float)
        if np.any((arr <= 0.0) | (arr >= 1.0)):
            raise DomainError(f"{self.name}: quantile level must lie in (0, 1)")
        return self._qf(u)

    def fisher_info(self, mode: ParamMode = ParamMode.LOCATION_SCALE) -> np.ndarray:
        """Standardized Fisher information for the estimated parameters.

        Returns a 2x2 matrix in joint mode, else 1x1.  Raises Unavailable
        where the standard regularity conditions fail (exponential and
        levy involve the location parameter as a support boundary, so only
        their scale-only information exists).
        """
        if mode is ParamMode.SCALE_ONLY:
            return np.array([[self._scale_info]])
        if self._info is None:
            raise Unavailable(
                f"{self.name}: Fisher information is only available in "
                "scale-only mode (location is a support boundary)"
            )
        info = np.asarray(self._info, dtype=float)
        if mode is ParamMode.LOCATION_SCALE:
            return info
        return info[:1, :1]

    def sample(self, params: Params, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. draws by inversion: mu + sigma * Q0(U), U uniform(0,1)."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        if not params.sigma > 0:
            raise DomainError("sigma must be positive to sample")
        u = rng.random(n)
        # keep the quantile function finite at the edges
        np.clip(u, _U_FLOOR, _U_CEIL, out=u)
        return params.mu + params.sigma * self._qf(u)


_INF = float("inf")

FAMILIES: dict[str, Family] = {
    "cauchy": Family(
        name="cauchy", support=(-_INF, _INF), symmetric=True,
        _pdf=_cauchy_pdf, _cdf=_cauchy_cdf, _qf=_cauchy_qf,
        _info=((0.5, 0.0), (0.0, 0.5)), _scale_info=0.5,
    ),
    "laplace": Family(
        name="laplace", support=(-_INF, _INF), symmetric=True,
        _pdf=_laplace_pdf, _cdf=_laplace_cdf, _qf=_laplace_qf,
        _info=((1.0, 0.0), (0.0, 1.0)), _scale_info=1.0,
    ),
    "logistic": Family(
        name="logistic", support=(-_INF, _INF), symmetric=True,
        _pdf=_logistic_pdf, _cdf=_logistic_cdf, _qf=_logistic_qf,
        _info=((1.0 / 3.0, 0.0), (0.0, (3.0 + math.pi ** 2) / 9.0)),
        _scale_info=(3.0 + math.pi ** 2) / 9.0,
    ),
    "normal": Family(
        name="normal", support=(-_INF, _INF), symmetric=True,
        _pdf=_normal_pdf, _cdf=_normal_cdf, _qf=_normal_qf,
        _info=((1.0, 0.0), (0.0, 2.0)), _scale_info=2.0,
    ),
    "exponential": Family(
        name="exponential", support=(0.0, _INF), symmetric=False,
        _pdf=_exponential_pdf, _cdf=_exponential_cdf, _qf=_exponential_qf,
        _info=None, _scale_info=1.0,
    ),
    "gumbel": Family(
        name="gumbel", support=(-_INF, _INF), symmetric=False,
        _pdf=_gumbel_pdf, _cdf=_gumbel_cdf, _qf=_gumbel_qf,
        _info=(
            (1.0, EULER_GAMMA - 1.0),
            (EULER_GAMMA - 1.0, math.pi ** 2 / 6.0 + (EULER_GAMMA - 1.0) ** 2),
        ),
        _scale_info=math.pi ** 2 / 6.0 + (EULER_GAMMA - 1.0) ** 2,
    ),
    "levy": Family(
        name="levy", support=(0.0, _INF), symmetric=False,
        _pdf=_levy_pdf, _cdf=_levy_cdf, _qf=_levy_qf,
        _info=None, _scale_info=0.5,
    ),
}


def family_names() -> list[str]:
    return list(FAMILIES)


def get_family(name: str) -> Family:
    """Case-insensitive family lookup (accepts 'Lévy' for 'levy')."""
    key = name.strip().lower().replace("é", "e")
    try:
        return FAMILIES[key]
    except KeyError:
        raise DomainError(
            f"unknown family {name!r}; choose from {'|'.join(FAMILIES)}"
        ) from None
