import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable

from draftlab.model import AvatarRegistry, ModelParams


def make_registry(n: int) -> AvatarRegistry:
    return AvatarRegistry([f"av{i:02d}" for i in range(n)])


def random_params(n: int = 10, k: int = 4, seed: int = 0,
                  scale: float = 0.5) -> ModelParams:
    rng = np.random.default_rng(seed)
    return ModelParams(embeddings=rng.normal(0, scale, size=(n, k)),
                       synergy=rng.normal(0, scale / k, size=(k, k)),
                       opposition=rng.normal(0, scale / k, size=(k, k)),
                       bias=rng.normal(0, scale / 4, size=n),
                       registry=make_registry(n))


def zero_params(n: int, k: int) -> ModelParams:
    return ModelParams(embeddings=np.zeros((n, k)), synergy=np.zeros((k, k)),
                       opposition=np.zeros((k, k)), bias=np.zeros(n),
                       registry=make_registry(n))


@pytest.fixture
def small_params():
    return random_params(n=12, k=3, seed=7)
