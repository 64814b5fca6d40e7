import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from clust_splitter.data import DataSet  # noqa: E402


@pytest.fixture(scope="session")
def iris():
    from sklearn.datasets import load_iris
    X, y = load_iris(return_X_y=True)
    return DataSet(X), y


@pytest.fixture
def four_points():
    return DataSet(np.array([[0.0], [1.0], [4.0], [5.0]]))



def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES):
            terminalreporter.write_line(line)
