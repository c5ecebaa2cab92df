import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from icregion import _backend
from icregion.det_capacity import outer_bound
from icregion.det_channel import ManyToOneGains
from icregion.region import _integer_system

needs_kernel = pytest.mark.skipif(_backend._compiled is None, reason="compiled kernel not built")

systems = st.integers(1, 3).flatmap(lambda d: st.tuples(
    st.lists(st.lists(st.integers(-4, 4), min_size=d, max_size=d).filter(any), min_size=d, max_size=7),
    st.data()))


@needs_kernel
@given(systems)
def test_compiled_matches_python_on_random_systems(sys_):
    A, data = sys_
    b = data.draw(st.lists(st.integers(0, 20), min_size=len(A), max_size=len(A)))
    py = sorted(_backend.basic_feasible_points(A, b, backend="python"))
    c = sorted(_backend.basic_feasible_points(A, b, backend="compiled"))
    assert py == c


@needs_kernel
@given(st.integers(1, 3).flatmap(lambda k: st.builds(
    ManyToOneGains, st.just(k),
    st.lists(st.integers(0, 6), min_size=k + 1, max_size=k + 1),
    st.lists(st.integers(0, 6), min_size=k, max_size=k))))
def test_compiled_matches_python_on_outer_bounds(g):
    p = outer_bound(g)
    A, b, _ = _integer_system(p.dim, p.halfspaces)
    assert sorted(_backend.basic_feasible_points(A, b, backend="python")) == \
        sorted(_backend.basic_feasible_points(A, b, backend="compiled"))


def test_overflow_guard():
    assert _backend.fits_machine([[1, 2], [3, 4]], [5, 6])
    assert not _backend.fits_machine([[2**40, 1], [1, 2**40]], [2**40, 2**40])


def test_huge_entries_fall_back_to_python():
    A, b = [[2**40, 0], [0, 2**40]], [2**41, 2**41]
    pts = _backend.basic_feasible_points(A, b)
    assert pts == _backend.basic_feasible_points(A, b, backend="python")
    (x, den), = pts
    assert tuple(v / den for v in x) == (2, 2)


def test_pure_env_selects_python():
    env = dict(os.environ, ICREGION_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from icregion import _backend; print(_backend.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
