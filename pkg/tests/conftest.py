import numpy as np
import pytest

from ordertail import (
    Beta,
    Degenerate,
    LogNormal,
    Pareto,
    Scenario,
    Uniform,
    WeightVectorSpec,
    load_template,
)


@pytest.fixture(scope="session")
def frechet_template():
    scenario, diag = load_template("frechet_pareto")
    return scenario, diag


@pytest.fixture(scope="session")
def lcr_template():
    scenario, diag = load_template("lcr_lognormal")
    return scenario, diag


@pytest.fixture
def single_pareto_uniform():
    """n = k = 1, Pareto(2, 1) risk, Uniform(0, 1) weight."""
    return Scenario(n=1, k=1, marginals=(Pareto(2.0, 1.0),), corr=None,
                    weights=WeightVectorSpec((Uniform(1.0),)))


def equicorrelated(n, rho):
    corr = np.full((n, n), rho)
    np.fill_diagonal(corr, 1.0)
    return corr


@pytest.fixture
def lognormal_pair_and_beta():
    """Two standard log-normal risks at rho = 0.3 with Beta(2, 3) weights."""
    return Scenario(
        n=2, k=2,
        marginals=(LogNormal(0.0, 1.0), LogNormal(0.0, 1.0)),
        corr=equicorrelated(2, 0.3),
        weights=WeightVectorSpec((Beta(2.0, 3.0), Beta(2.0, 3.0))),
    )


@pytest.fixture
def degenerate_max_scenario():
    """Three Pareto risks, weights (1, 0, 0): the aggregate is the maximum."""
    return Scenario(
        n=3, k=3,
        marginals=(Pareto(2.0, 1.0),) * 3, corr=None,
        weights=WeightVectorSpec(
            (Degenerate(1.0), Degenerate(0.0), Degenerate(0.0))),
    )
