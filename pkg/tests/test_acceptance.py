"""Acceptance suite: every criterion at its stated tolerance, reference resolution.

Run with ``pytest tests/test_acceptance.py -v`` (a summary line per
criterion is printed at the end) or directly with ``python tests/test_acceptance.py``.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, cached_experiment, cached_study, reference_config  # noqa: E402
from chtails.diagnostics import tail_coefficients  # noqa: E402
from chtails.greens import apply_helmholtz  # noqa: E402


def _judge(criterion: str, title: str, verdicts) -> None:
    verdicts = list(verdicts)
    assert verdicts, f"{criterion}: no verdicts produced"
    failed = [v for v in verdicts if not v.passed]
    status = "PASS" if not failed else "FAIL"
    detail = "; ".join(f"{v.name}={v.measured:.4g} (tol {v.tolerance:.3g})" for v in failed[:4])
    line = f"{criterion:5s} {status}  {title}" + (f"  [{detail}]" if failed else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failed, line


def _of(report, criterion):
    return [v for v in report.verdicts if v.criterion == criterion]


def test_ac01_operator_identity():
    _judge("AC1", "Helmholtz/convolution inverse pair and exponential oracle",
           _of(cached_study("operator"), "AC1"))


def test_ac02_solver_order():
    _judge("AC2", "RK4 temporal order 4 +- 0.2, spatial order >= 1.8",
           _of(cached_study("temporal"), "AC2") + _of(cached_study("spatial"), "AC2"))


def test_ac03_conservation():
    _judge("AC3", "H1 and momentum-mass drift < 1e-6, flow residual converges",
           _of(cached_study("conservation"), "AC3") + _of(cached_study("flow"), "AC3"))


def test_ac04_initial_tail_coefficient():
    rep = cached_experiment("compact_support")
    verdicts = _of(rep, "AC4")
    # negative control: a (smoothed) point mass of weight 2c at q has E+(0) = c e^q
    from chtails.initial_data import InitialData
    from chtails.scenarios import Verdict
    cfg = reference_config("peakon")
    for c, q in ((1.0, 0.0), (0.5, 1.5)):
        u0 = InitialData("smoothed_peakon", c=c, center=q, epsilon=0.1).field(cfg.grid)
        E = tail_coefficients(apply_helmholtz(u0), 0.0, u0).E_plus
        rel = abs(E - c * math.exp(q)) / (c * math.exp(q))
        verdicts.append(Verdict("AC4", f"peakon_control_c={c}_q={q}", rel, 0.01, rel < 0.01))
    _judge("AC4", "E+(0) vanishes for compact data; peakon control E+(0) = c e^q", verdicts)


def test_ac05_monotone_tail_coefficients():
    _judge("AC5", "E+ increasing, E- decreasing, dE+/dt matches prediction",
           _of(cached_experiment("compact_support"), "AC5"))


def test_ac06_exact_exponential_tails():
    rep = cached_experiment("compact_support")
    verdicts = [v for v in _of(rep, "AC6") if "t=" in v.name or "minus" in v.name]
    _judge("AC6", "tail slopes -1, r2 > 0.999, c+- = E+- within 0.5%, c- < 0", verdicts)


def test_ac07_unique_continuation_cross_check():
    _judge("AC7", "c+(t1) equals the accumulated source integral and is positive",
           _of(cached_experiment("unique_continuation"), "AC7"))


def test_ac08_persistence_of_decay():
    verdicts = []
    for theta in (0.5, 0.75):
        rep = cached_experiment("persistence", (("theta", theta),))
        verdicts += _of(rep, "AC8")
        ratios = [v.measured for v in _of(rep, "AC8") if "ratio" in v.name]
        assert all(math.isfinite(r) for r in ratios)
    _judge("AC8", "weighted norms stay bounded, tail slopes <= -theta + 0.02", verdicts)


def test_ac09_momentum_support():
    _judge("AC9", "momentum stays inside the transported support",
           [v for v in _of(cached_experiment("compact_support"), "AC9")
            if v.name == "momentum_support"])


def test_ac10_peakon_validation():
    _judge("AC10", "smoothed peakon travels 1.0 +- 0.02 with shape error < 2%",
           [v for v in _of(cached_experiment("peakon"), "AC10") if v.name != "right_tail_slope"])


def test_ac11_kernel_weight_bound():
    _judge("AC11", "kernel-weight bound finite and stable (<5%) over N in {8,16,32}",
           _of(cached_study("kernel"), "AC11"))


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac") and callable(fn):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
