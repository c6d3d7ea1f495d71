import numpy as np
import pytest

from dffr import harness, network
from dffr.harness import ExperimentConfig
from dffr.objectives import paper_tracking_stream


@pytest.fixture(scope="session")
def paper_stream():
    return paper_tracking_stream(horizon=1000)


@pytest.fixture(scope="session")
def paper_wm():
    return network.validate_weight_matrix(network.paper4_matrix(), B=1)


@pytest.fixture(scope="session")
def paper_mc(paper_wm):
    return network.mixing_constants(paper_wm)


def _preset_without_bounds(name: str, **overrides) -> ExperimentConfig:
    raw = harness.preset(name).to_dict()
    raw["bounds"] = False
    raw.update(overrides)
    return ExperimentConfig.from_dict(raw)


@pytest.fixture(scope="session")
def alg1_traces():
    """The 20-seed gradient-free benchmark runs (shared across acceptance tests)."""
    cfg = _preset_without_bounds("paper-tracking-alg1")
    return [harness.run_single(cfg, seed) for seed in cfg.seeds]


@pytest.fixture(scope="session")
def alg2_fixed_trace():
    """The deterministic projection-free benchmark run, fixed step 0.002."""
    cfg = _preset_without_bounds("paper-tracking-alg2")
    return harness.run_single(cfg, 0)


@pytest.fixture(scope="session")
def alg2_exact_trace():
    """The projection-free run with the exact per-round line search."""
    cfg = _preset_without_bounds("paper-tracking-alg2-linesearch")
    return harness.run_single(cfg, 0)


@pytest.fixture(scope="session")
def dogd_trace():
    """The projected-gradient baseline run."""
    cfg = _preset_without_bounds("paper-tracking-dogd")
    return harness.run_single(cfg, 0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
