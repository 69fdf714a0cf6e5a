"""
True parameters of the simulated models, used to score coverage.

ARMA(1,1) truths are analytic where the stationary law allows it: the mean is mu for
any innovation law, location functionals equal mu under Gaussian innovations, the
marginal is N(mu, sigma^2) under Gaussian innovations and the spectral distribution
follows from the ARMA autocovariances. The nonlinear sine model with Gaussian
innovations is symmetric about 0. Everything else is read off one long simulation
of ``draws`` observations, computed once per model and cached.
"""

import functools
import logging

import numpy as np
from scipy.stats import norm

from .estimators import Stat
from .series_gen import ErrorDist, Family, gen_series
from .streams import ORACLE_STREAM, derive_seed

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_DRAWS = 10_000_000
ORACLE_MAX_LAG = 200


@functools.lru_cache(maxsize=16)
def oracle_sample(model, draws=DEFAULT_ORACLE_DRAWS):
    logger.info("🔄 Simulating %d draws of %s for the truth oracle", draws, model.label)
    values = np.sort(gen_series(model, draws, derive_seed(0, ORACLE_STREAM)).values)
    values.setflags(write=False)
    return values


def _symmetric_about(model):
    """Center of symmetry of the stationary law, or None."""
    if model.err_dist is not ErrorDist.GAUSSIAN:
        return None
    if model.family is Family.ARMA11:
        return model.mu
    if model.family is Family.NONLINEAR_SINE:
        return 0.0
    return None


def true_parameter(model, est, draws=DEFAULT_ORACLE_DRAWS):
    """The population value of each estimator component, shape (k,)."""
    center = _symmetric_about(model)
    out = []
    for component in est.components:
        if center is not None:
            out.append(center)
        elif component.kind is Stat.MEAN and model.family is Family.ARMA11:
            out.append(model.mu)
        else:
            out.append(float(component.apply(oracle_sample(model, draws))))
    return np.asarray(out, dtype=float)


def arma_variance(rho, theta):
    return (1 + 2 * rho * theta + theta ** 2) / (1 - rho ** 2)


def arma_autocovariances(rho, theta, max_lag):
    """gamma_0..gamma_max_lag of u_t = rho u_{t-1} + e_t + theta e_{t-1}, var(e) = 1."""
    gamma = np.empty(max_lag + 1)
    gamma[0] = arma_variance(rho, theta)
    if max_lag >= 1:
        gamma1 = (1 + rho * theta) * (rho + theta) / (1 - rho ** 2)
        gamma[1:] = gamma1 * rho ** np.arange(max_lag)
    return gamma


def sample_autocovariances(values, max_lag):
    x = np.asarray(values, dtype=float) - np.mean(values)
    n = x.size
    return np.array([x[:n - k] @ x[k:] / n for k in range(max_lag + 1)])


@functools.lru_cache(maxsize=16)
def _oracle_autocovariances(model, draws):
    # autocovariances need the series in time order, not the sorted sample
    values = gen_series(model, draws, derive_seed(0, ORACLE_STREAM)).values
    return sample_autocovariances(values, ORACLE_MAX_LAG)


def true_autocovariances(model, max_lag=ORACLE_MAX_LAG, draws=DEFAULT_ORACLE_DRAWS):
    if model.family is Family.ARMA11:
        return arma_autocovariances(model.rho, model.theta, max_lag)
    return _oracle_autocovariances(model, draws)[:max_lag + 1]


def normalized_spectral_cdf(gamma, grid):
    """F~(λ) = (γ0 λ + 2 Σ_k γ_k sin(kλ)/k) / (π γ0)."""
    grid = np.asarray(grid, dtype=float)
    lags = np.arange(1, gamma.size)
    series = np.sin(np.outer(grid, lags)) @ (gamma[1:] / lags)
    return (gamma[0] * grid + 2 * series) / (np.pi * gamma[0])


def true_spectral(model, grid, draws=DEFAULT_ORACLE_DRAWS):
    max_lag = 2000 if model.family is Family.ARMA11 else ORACLE_MAX_LAG
    return normalized_spectral_cdf(true_autocovariances(model, max_lag, draws), grid)


def true_cdf(model, draws=DEFAULT_ORACLE_DRAWS):
    """Marginal distribution function as a vectorized callable."""
    if model.family is Family.ARMA11 and model.err_dist is ErrorDist.GAUSSIAN:
        scale = np.sqrt(arma_variance(model.rho, model.theta))
        return functools.partial(norm.cdf, loc=model.mu, scale=scale)
    sample = oracle_sample(model, draws)
    return lambda x: np.searchsorted(sample, np.asarray(x, dtype=float), side="right") / sample.size


def cdf_sup_distance(values, cdf):
    """sup_s |m_n(s) - F(s)| for a continuous F, using both one-sided limits of m_n."""
    atoms, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
    above = np.cumsum(counts) / counts.sum()
    below = above - counts / counts.sum()
    at = cdf(atoms)
    return float(max(np.max(np.abs(above - at)), np.max(np.abs(at - below))))
