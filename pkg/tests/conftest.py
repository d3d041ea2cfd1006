import pytest

from mwlab.attractor import invariant_list
from mwlab.datasets import load_bundled

_SPEC_CACHE = {}
_APPROX_CACHE = {}


def bundled(name):
    if name not in _SPEC_CACHE:
        _SPEC_CACHE[name] = load_bundled(name)
    return _SPEC_CACHE[name]


def approx_for(name, depth):
    key = (name, depth)
    if key not in _APPROX_CACHE:
        _APPROX_CACHE[key] = invariant_list(bundled(name), depth)
    return _APPROX_CACHE[key]


@pytest.fixture
def squares_spec():
    return bundled("squares_z2")


@pytest.fixture
def dust_spec():
    return bundled("two_part_dust")


@pytest.fixture
def penrose_spec():
    return bundled("penrose")
