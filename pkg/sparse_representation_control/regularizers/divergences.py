"""
KL and Set-KL divergences between a target activation distribution p_beta and
the empirical one p_beta_hat, for exponential and Bernoulli distributions.

All functions accept scalars or arrays of beta_hat (one entry per hidden unit)
and return floats for scalar input.
"""
from math import inf

import numpy as np
from scipy import integrate
from scipy.special import expit, logit, xlogy


def _output(value: np.ndarray, scalar_input: bool):
    return float(value) if scalar_input else value


def _check_positive(name: str, value) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if np.any(value <= 0) or not np.all(np.isfinite(value)):
        raise ValueError(f"{name} needs to be positive and finite.")
    return value


def _check_unit_interval(name: str, value) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if np.any(value <= 0) or np.any(value >= 1):
        raise ValueError(f"{name} needs to be in the open interval (0, 1).")
    return value


def _check_nonnegative(name: str, value) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if np.any(value < 0) or not np.all(np.isfinite(value)):
        raise ValueError(f"{name} needs to be nonnegative and finite.")
    return value


def kl_exponential(beta_hat, beta):
    """KL(p_beta || p_beta_hat) of exponential distributions with means beta / beta_hat."""
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_positive("beta_hat", beta_hat)
    beta = float(_check_positive("beta", beta))
    value = np.log(beta_hat) + beta / beta_hat - np.log(beta) - 1
    return _output(value, scalar)


def kl_exponential_grad(beta_hat, beta):
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_positive("beta_hat", beta_hat)
    beta = float(_check_positive("beta", beta))
    return _output(1.0 / beta_hat - beta / beta_hat**2, scalar)


def skl_exponential(beta_hat, beta):
    """Set KL to the exponential distributions with mean at most beta.

    Zero when beta_hat <= beta (the unit is at least as sparse as the target),
    the unclipped KL otherwise. A dead unit (beta_hat = 0) is inside the set."""
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_nonnegative("beta_hat", beta_hat)
    beta = float(_check_positive("beta", beta))

    value = np.zeros(beta_hat.shape)
    outside = beta_hat > beta
    bh = beta_hat[outside]
    value[outside] = np.log(bh) + beta / bh - np.log(beta) - 1
    return _output(value, scalar)


def skl_exponential_grad(beta_hat, beta):
    """(1 / beta_hat - beta / beta_hat^2) * 1[beta_hat > beta]"""
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_nonnegative("beta_hat", beta_hat)
    beta = float(_check_positive("beta", beta))

    grad = np.zeros(beta_hat.shape)
    outside = beta_hat > beta
    bh = beta_hat[outside]
    grad[outside] = 1.0 / bh - beta / bh**2
    return _output(grad, scalar)


def kl_bernoulli(beta_hat, beta):
    """KL(Bernoulli(beta) || Bernoulli(beta_hat))"""
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_unit_interval("beta_hat", beta_hat)
    beta = float(_check_unit_interval("beta", beta))
    value = xlogy(beta, beta / beta_hat) + xlogy(1 - beta, (1 - beta) / (1 - beta_hat))
    return _output(value, scalar)


def kl_bernoulli_grad(beta_hat, beta):
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_unit_interval("beta_hat", beta_hat)
    beta = float(_check_unit_interval("beta", beta))
    return _output(-beta / beta_hat + (1 - beta) / (1 - beta_hat), scalar)


def skl_bernoulli(beta_hat, beta):
    """Set KL to the Bernoulli distributions with mean at most beta."""
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_unit_interval("beta_hat", beta_hat)
    value = np.where(beta_hat > beta, kl_bernoulli(beta_hat, beta), 0.0)
    return _output(value, scalar)


def skl_bernoulli_grad(beta_hat, beta):
    scalar = np.isscalar(beta_hat)
    beta_hat = _check_unit_interval("beta_hat", beta_hat)
    grad = np.where(beta_hat > beta, kl_bernoulli_grad(beta_hat, beta), 0.0)
    return _output(grad, scalar)


def kl_exponential_quadrature(beta_hat: float, beta: float) -> float:
    """Reference value of KL(p_beta || p_beta_hat) by adaptive quadrature of
    the defining integral over [0, inf)."""
    beta_hat = float(_check_positive("beta_hat", beta_hat))
    beta = float(_check_positive("beta", beta))

    def integrand(yy):
        log_ratio = -np.log(beta) - yy / beta + np.log(beta_hat) + yy / beta_hat
        return np.exp(-yy / beta) / beta * log_ratio

    # The mass of p_beta is concentrated on a few multiples of beta
    split = 50 * beta
    head, _ = integrate.quad(integrand, 0.0, split, epsabs=1e-13, epsrel=1e-12, limit=200)
    tail, _ = integrate.quad(integrand, split, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return head + tail


class ExponentialFamily:
    """One-dimensional exponential family described by its log-partition F(eta).

    The KL divergence between members is the Bregman divergence of F:
    KL(p_eta_t || p_eta) = F(eta) - F(eta_t) - (eta - eta_t) F'(eta_t)
    """

    def __init__(self, name, log_partition, mean, natural_from_mean, eta_bounds):
        self.name = name
        self.log_partition = log_partition
        self.mean = mean
        self.natural_from_mean = natural_from_mean
        self.eta_bounds = eta_bounds

    def __repr__(self):
        return f"ExponentialFamily({self.name})"

    def kl(self, eta_target, eta):
        eta_target = np.asarray(eta_target, dtype=float)
        eta = np.asarray(eta, dtype=float)
        return (
            self.log_partition(eta)
            - self.log_partition(eta_target)
            - (eta - eta_target) * self.mean(eta_target)
        )


# Exponential distribution with mean beta: eta = -1 / beta < 0
EXPONENTIAL = ExponentialFamily(
    name="exponential",
    log_partition=lambda eta: -np.log(-eta),
    mean=lambda eta: -1.0 / eta,
    natural_from_mean=lambda beta: -1.0 / np.asarray(beta, dtype=float),
    eta_bounds=(-inf, 0.0),
)

# Bernoulli with mean beta: eta = logit(beta)
BERNOULLI = ExponentialFamily(
    name="bernoulli",
    log_partition=lambda eta: np.logaddexp(0.0, eta),
    mean=expit,
    natural_from_mean=logit,
    eta_bounds=(-inf, inf),
)


def bregman_kl(family: ExponentialFamily, eta_target, eta):
    """KL(p_eta_target || p_eta) through the Bregman divergence of the family."""
    scalar = np.isscalar(eta)
    return _output(family.kl(eta_target, eta), scalar)


def set_kl(family: ExponentialFamily, eta, lower: float = -inf, upper: float = inf):
    """Set KL min_{eta_t in [lower, upper]} KL(p_eta_t || p_eta).

    The minimum lies at the interval boundary closest to eta, hence the
    clipped form: KL to `upper` above the interval, KL to `lower` below it,
    and zero inside."""
    if lower > upper:
        raise ValueError("Empty natural-parameter interval.")
    scalar = np.isscalar(eta)
    eta = np.asarray(eta, dtype=float)

    value = np.zeros(eta.shape)
    above = eta > upper
    below = eta < lower
    if np.any(above):
        value[above] = family.kl(upper, eta[above])
    if np.any(below):
        value[below] = family.kl(lower, eta[below])
    return _output(value, scalar)
