from pathlib import Path

import pytest
import structlog
import yaml

from diagcount.counting import DiagonalEquation
from diagcount.gf import build_field

GOLDEN = Path(__file__).with_name("golden.yaml")


@pytest.fixture(autouse=True)
def _reset_structlog():
    yield
    structlog.reset_defaults()


@pytest.fixture(scope="session")
def golden():
    return yaml.safe_load(GOLDEN.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def f9():
    return build_field(3, 2)


@pytest.fixture(scope="session")
def f81():
    return build_field(3, 4)


@pytest.fixture(scope="session")
def f25():
    return build_field(5, 2)


@pytest.fixture(scope="session")
def f7():
    return build_field(7, 1)


@pytest.fixture
def equation_from():
    """Build a DiagonalEquation from a golden entry: a and b are alpha exponents, ``zero`` is 0."""

    def build(entry):
        ctx = build_field(entry["p"], entry["n"])
        b = entry.get("b", "zero")
        rhs = ctx.zero() if b == "zero" else ctx.element(b)
        return DiagonalEquation.create(ctx, [ctx.element(k) for k in entry["a"]], entry["d"], rhs)

    return build


@pytest.fixture(scope="session")
def f49():
    return build_field(7, 2)


@pytest.fixture(scope="session")
def f121():
    return build_field(11, 2)
