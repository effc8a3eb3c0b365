import asyncio
import io
import math

import pytest

from CKNKit.exponents import OperatorParams
from CKNKit.quadrature import QuadratureSpec
from CKNKit.cli import app


@pytest.fixture
def newtonian():
    """N=3, mu1=mu2=0: the Laplacian in three dimensions"""
    return OperatorParams(3, 0.0, 0.0)


@pytest.fixture
def planar():
    """N=2, mu1=mu2=0: critical, logarithmic fundamental solution"""
    return OperatorParams(2, 0.0, 0.0)


@pytest.fixture
def serrin():
    """N=3, mu1=0, mu2=-0.2: the running Liouville example"""
    return OperatorParams(3, 0.0, -0.2)


@pytest.fixture
def hardy_critical():
    """N=3, mu1=0, mu2=-1/4: zero discriminant"""
    return OperatorParams(3, 0.0, -0.25)


@pytest.fixture
def spec():
    return QuadratureSpec()


@pytest.fixture
def tau_plus_serrin():
    return (-1.0 + math.sqrt(0.2)) / 2.0


class CliRun:
    def __init__(self, code, stdout, stderr):
        self.code = code
        self.stdout = stdout
        self.stderr = stderr


@pytest.fixture
def cli():
    """Run the cknkit application synchronously and capture its streams."""
    def run(*argv):
        out, err = io.StringIO(), io.StringIO()
        code = asyncio.run(app.run(list(argv), stdout=out, stderr=err))
        return CliRun(code, out.getvalue(), err.getvalue())

    return run
