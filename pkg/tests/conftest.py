from __future__ import annotations

import pytest

from fcmeval.metrics import EdgeMetricConfig
from fcmeval.textsim import MeasureConfig, MeasureKind, build_measure


@pytest.fixture
def exact_measure():
    return build_measure(MeasureConfig(kind=MeasureKind.EXACT))


@pytest.fixture
def exact_t1_pp(exact_measure):
    return EdgeMetricConfig(measure=exact_measure, threshold=1.0, allow_partial_positives=True)


@pytest.fixture
def exact_t1_nopp(exact_measure):
    return EdgeMetricConfig(measure=exact_measure, threshold=1.0, allow_partial_positives=False)


def make_config(kind: str, threshold: float, *, partial_positives: bool = True) -> EdgeMetricConfig:
    return EdgeMetricConfig(
        measure=build_measure(MeasureConfig(kind=MeasureKind(kind))),
        threshold=threshold,
        allow_partial_positives=partial_positives,
    )
