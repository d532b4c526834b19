import pytest

from causalspec import Dag
from causalspec.fixtures import motor_document, motor_source


@pytest.fixture(scope="session")
def motor_doc():
    return motor_document()


@pytest.fixture(scope="session")
def motor_dag(motor_doc):
    return Dag.from_document(motor_doc)


@pytest.fixture(scope="session")
def motor_text():
    return motor_source()
