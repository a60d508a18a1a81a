# -*- coding: utf-8 -*-
"""
测试公共夹具
"""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.halfline import DecayTag, build_grid, sample
from harness.corpus import Corpus

SMALL_SPATIAL = {"L": 12.0, "nodes_per_axis": {1: 128, 2: 32, 3: 16}}


@pytest.fixture(scope="session")
def grid():
    """套件默认网格：Gregory，1024 点，t_max = 40"""
    return build_grid(1024, 40.0, "gregory")


@pytest.fixture(scope="session")
def coarse_grid():
    return build_grid(257, 32.0, "gregory")


@pytest.fixture(scope="session")
def corpus(grid):
    return Corpus(grid)


@pytest.fixture(scope="session")
def exp_fn(grid):
    return sample(lambda t: np.exp(-t), grid, DecayTag.EXPONENTIAL)


@pytest.fixture(scope="session")
def t_exp_fn(grid):
    return sample(lambda t: t * np.exp(-t), grid, DecayTag.EXPONENTIAL)


@pytest.fixture(scope="session")
def gauss_fn(grid):
    return sample(lambda t: np.exp(-t ** 2), grid, DecayTag.GAUSSIAN)


@pytest.fixture
def spatial():
    return {"L": SMALL_SPATIAL["L"], "nodes_per_axis": dict(SMALL_SPATIAL["nodes_per_axis"])}
