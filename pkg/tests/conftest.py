"""Shared fixtures"""
import json

import numpy as np
import pytest

from config.verification_config import VerificationConfig
from flowlab.catalog import GroupCatalog, _cached
from flowlab.groups import make_subgroup


# A loop of order 5 with identity 0: Latin, every x*x = 0, hence not a group
NON_ASSOCIATIVE_LOOP = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]


@pytest.fixture
def s3():
    return GroupCatalog.create('S3')


@pytest.fixture
def a3(s3):
    # lexicographic ranks: 3 = (1 2 0), 4 = (2 0 1)
    return make_subgroup(s3, [0, 3, 4])


@pytest.fixture
def caps():
    return VerificationConfig.get_caps()


@pytest.fixture
def catalog_snapshot():
    """Restore the group registry after a test registers groups"""
    builders = dict(GroupCatalog._builders)
    descriptions = dict(GroupCatalog._descriptions)
    yield GroupCatalog
    GroupCatalog._builders.clear()
    GroupCatalog._builders.update(builders)
    GroupCatalog._descriptions.clear()
    GroupCatalog._descriptions.update(descriptions)
    _cached.cache_clear()


@pytest.fixture
def write_json(tmp_path):
    def write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding='utf-8')
        return str(path)
    return write


def trivial_action_flow_table(order: int) -> np.ndarray:
    """Every element fixes every one of `order` points"""
    return np.tile(np.arange(order), (order, 1))
