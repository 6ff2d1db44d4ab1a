import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import strategies as st

from qcorr.correlations import SettingPair
from qcorr.qlinalg import BlochObservable, random_density_matrix, random_unit_vector

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_settings(rng: np.random.Generator, n: int) -> SettingPair:
    alice = tuple(BlochObservable(random_unit_vector(rng)) for _ in range(n))
    bob = tuple(BlochObservable(random_unit_vector(rng)) for _ in range(n))
    return SettingPair(alice, bob)


def random_state_and_settings(seed: int, n: int = 3):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, 5))
    return random_density_matrix(rng, 4, rank), random_settings(rng, n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def schema_validator():
    import jsonschema
    from referencing import Registry, Resource

    schemas = {}
    for entry in resources.files("qcorr").joinpath("schemas").iterdir():
        if entry.name.endswith(".schema.json"):
            schemas[entry.name.removesuffix(".schema.json")] = json.loads(entry.read_text())
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s)) for s in schemas.values()
    )

    def validate(name: str, instance) -> None:
        jsonschema.Draft202012Validator(schemas[name], registry=registry).validate(instance)

    return validate


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
