import numpy as np
import pytest

from flashtune.space import (
    BOOLEAN,
    INTEGER,
    MINIMIZE,
    Dataset,
    ObjectiveSchema,
    OptionSchema,
)


def bool_options(n):
    return [OptionSchema(f"o{j:02d}", BOOLEAN) for j in range(n)]


def make_dataset(configs, values, directions=None, kinds=None):
    """Small in-memory dataset; option kinds inferred as integer by default."""
    configs = np.asarray(configs, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    d = configs.shape[1]
    m = values.shape[1]
    if directions is None:
        directions = [MINIMIZE] * m
    if kinds is None:
        kinds = [INTEGER] * d
    options = []
    for j in range(d):
        if kinds[j] == BOOLEAN:
            options.append(OptionSchema(f"o{j:02d}", BOOLEAN))
        else:
            lo = int(configs[:, j].min())
            hi = int(configs[:, j].max())
            options.append(OptionSchema(f"o{j:02d}", INTEGER, lo, hi))
    objectives = [ObjectiveSchema(f"y{k}", directions[k]) for k in range(m)]
    return Dataset(options, objectives, configs, values)


@pytest.fixture
def two_bool_dataset():
    """Exhaustive 2-option boolean space with one minimized objective."""
    configs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    values = [3.0, 2.0, 4.0, 1.0]
    return make_dataset(configs, values, kinds=[BOOLEAN, BOOLEAN])
