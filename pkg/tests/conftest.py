import json
from importlib import resources

import pytest

from ccc.stackyfan import parse_contraction, parse_stacky_fan


def load_data(name: str) -> dict:
    return json.loads(resources.files("ccc.data").joinpath(name).read_text())


@pytest.fixture(scope="session")
def p1():
    return parse_stacky_fan(load_data("p1.json"))


@pytest.fixture(scope="session")
def p13():
    return parse_stacky_fan(load_data("p13.json"))


@pytest.fixture(scope="session")
def p112():
    return parse_stacky_fan(load_data("p112.json"))


@pytest.fixture(scope="session")
def a1_resolution():
    return parse_stacky_fan(load_data("a1_resolution.json"))


@pytest.fixture(scope="session")
def crepant_a1():
    return parse_contraction(load_data("contract_crepant_a1.json"))


@pytest.fixture(scope="session")
def discrepancy_setup():
    return parse_contraction(load_data("contract_discrepancy.json"))


@pytest.fixture(scope="session")
def om3():
    return parse_contraction(load_data("contract_om3.json"))
