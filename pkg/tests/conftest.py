import functools

import pytest

from chtails.config import parse_config
from chtails.convergence import (conservation_check, flow_conservation_study,
                                 kernel_bound_study, operator_identity_check,
                                 spatial_order_study, temporal_order_study)
from chtails.scenarios import run_experiment

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def reference_config(experiment: str, **scenario):
    import json
    sc = {"experiment": experiment, **scenario}
    return parse_config(json.dumps({"scenario": sc}))


@functools.lru_cache(maxsize=None)
def cached_experiment(experiment: str, items: tuple = ()):
    return run_experiment(reference_config(experiment, **dict(items)))


@functools.lru_cache(maxsize=None)
def cached_study(name: str):
    cfg = reference_config("compact_support")
    return {
        "operator": operator_identity_check,
        "temporal": temporal_order_study,
        "spatial": spatial_order_study,
        "conservation": conservation_check,
        "flow": flow_conservation_study,
        "kernel": kernel_bound_study,
    }[name](cfg)


@pytest.fixture
def ref_cfg():
    return reference_config("compact_support")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
