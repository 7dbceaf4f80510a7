import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hotspots.grid import parse_generator  # noqa: E402
from hotspots.pde_verify import dirichlet_eigenvalue, neumann_eigenpair  # noqa: E402


@lru_cache(maxsize=None)
def domain(spec, h):
    return parse_generator(spec, h)


@lru_cache(maxsize=None)
def neumann(spec, h):
    return neumann_eigenpair(domain(spec, h))


@lru_cache(maxsize=None)
def dirichlet(spec, h):
    return dirichlet_eigenvalue(domain(spec, h))


@pytest.fixture
def solved():
    """Cached (domain, neumann, dirichlet) lookups shared across test modules."""

    class Solved:
        domain = staticmethod(domain)
        neumann = staticmethod(neumann)
        dirichlet = staticmethod(dirichlet)

    return Solved
