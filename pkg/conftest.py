"""
Global pytest configuration for the lcpoly project.

This conftest.py provides fixtures that are available to all tests in
the project: seeded generators, a few standard measures and sample sets,
and a throwaway artifact directory.
"""
import shutil
import tempfile

import pytest

from measure_app.measures import product_exponential, standard_gaussian, uniform_box
from measure_app.random_streams import stream
from measure_app.sampling import sample


@pytest.fixture
def rng():
    """
    Provide a seeded generator keyed on the test suite.

    Returns:
        numpy.random.Generator: Philox-backed generator for (seed 12345, 'tests').
    """
    return stream(12345, 'tests')


@pytest.fixture
def gaussian_1d():
    return standard_gaussian(1)


@pytest.fixture
def gaussian_2d():
    return standard_gaussian(2)


@pytest.fixture
def unit_box_1d():
    return uniform_box([0.0], [1.0])


@pytest.fixture
def laplace_1d():
    return product_exponential([1.0])


@pytest.fixture
def gaussian_samples(gaussian_2d):
    """
    Provide 20 000 exact standard Gaussian points in dim 2.

    Returns:
        SampleSet: Deterministic sample for seed 7.
    """
    return sample(gaussian_2d, 20_000, seed=7)


@pytest.fixture
def output_dir(settings):
    """
    Create a temporary artifact directory and point LCPOLY_OUTPUT_DIR at it.

    The directory is removed after the test completes.
    """
    from pathlib import Path

    temp_dir = Path(tempfile.mkdtemp(prefix='lcpoly_test_'))
    settings.LCPOLY_OUTPUT_DIR = temp_dir
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)
