"""Test configuration and shared fixtures for fermicolor tests."""

import logging
import os

import pytest

from fermicolor.config import RunConfig
from fermicolor.harness import Problem, prepare_problem
from fermicolor.system_graph import SystemGraph, default_enumeration, gen_star, set_enumeration


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch):
    """Keep FERMICOLOR_* variables from the outer shell out of every test."""
    for key in list(os.environ):
        if key.startswith("FERMICOLOR_"):
            monkeypatch.delenv(key)


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Undo handlers and levels installed by configure_logging."""
    yield
    root = logging.getLogger("fermicolor")
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.setLevel(logging.NOTSET)


@pytest.fixture
def paired_star() -> SystemGraph:
    """S4 whose hub pairs leaves (0, 3) and (1, 2) on its two qubits."""
    return default_enumeration(set_enumeration(gen_star(4), {4: {0: 1, 3: 2, 1: 3, 2: 4}}))


@pytest.fixture
def star4_problem() -> Problem:
    """All-to-all model on S4 with identity placement."""
    return prepare_problem(RunConfig())
