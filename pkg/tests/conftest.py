import numpy as np
import pytest

from riemext.hypersurface import HypersurfaceSpec, project_omega
from riemext.manifold import LocalForm, LocalVector, ScalarFieldSpec, catalog
from riemext.rext import RExtParams
from riemext.sampling import make_rng, sample_points

EXAMPLES = ("FLAT2", "POLY2", "PROD3")

ACCEPTANCE_LINES = []


def random_points(name, count=20, seed=0):
    ex = catalog(name)
    rng = make_rng(seed)
    return sample_points(rng, count, [[-1, 1]] * ex.n, [[-2, 2]] * ex.n)[0]


def hypersurface(name, a=1.0, b=4.0, f="0", t=None):
    ex = catalog(name)
    if t is None:
        t = 3.0 if f != "0" else 2.0
    return HypersurfaceSpec(ex.connection, RExtParams(a, b), ex.xi, ScalarFieldSpec.parse(f, ex.n), t)


def surface_points(spec, count=20, seed=0):
    rng = make_rng(seed)

    def make(x, w):
        p = project_omega(spec, x, w)
        if not p.omega @ spec.xi.at(x).val > 0:
            raise ValueError("omega(xi) <= 0")
        return p

    return sample_points(rng, count, [[-1, 1]] * spec.n, [[-2, 2]] * spec.n, make)[0]


def random_vector(rng, n):
    d2 = rng.uniform(-1, 1, (n, n, n))
    return LocalVector(rng.uniform(-1, 1, n), rng.uniform(-1, 1, (n, n)), d2 + d2.transpose(0, 2, 1))


def random_form(rng, n):
    d2 = rng.uniform(-1, 1, (n, n, n))
    return LocalForm(rng.uniform(-1, 1, n), rng.uniform(-1, 1, (n, n)), d2 + d2.transpose(0, 2, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
