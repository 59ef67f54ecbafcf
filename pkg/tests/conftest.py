import numpy as np
import pytest

from gof_lab import (
    Scenario,
    fit_logistic,
    gen_covariates,
    gen_responses,
    group_by_balanced_variance,
    make_dataset,
    substream,
    true_beta,
)


def simulated_fit(n=500, m=50, d=5, seed=11, rep=0, sigma2_e=0.0):
    """One generated dataset with its fitted model (no grouping)."""
    cell = Scenario(n=n, m=m, d=d, G=10, reps=1, seed=seed, sigma2_e=sigma2_e)
    X = gen_covariates(cell, substream(seed, rep, "covariates"))
    y = gen_responses(X, true_beta(d), substream(seed, rep, "responses"))
    data = make_dataset(y, X)
    return data, fit_logistic(data)


def simulated_pipeline(n=500, m=50, d=5, G=10, seed=11, rep=0):
    """Dataset, fit, and a balanced grouping, all from one seed."""
    data, model = simulated_fit(n=n, m=m, d=d, seed=seed, rep=rep)
    grouping = group_by_balanced_variance(model, G, substream(seed, rep, "grouping"))
    return data, model, grouping


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
