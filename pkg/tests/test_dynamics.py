import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from todatype.dynamics import (BlowupError, CompiledPolys, default_x0, integrate, monitor,
                               write_csv)
from todatype.systems import get_system
from conftest import polys


@given(st.lists(polys(), min_size=1, max_size=3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_compiled_matches_exact(ps, x):
    got = CompiledPolys(ps)(np.array(x))
    want = [p.eval_float(x) for p in ps]
    assert np.allclose(got, want, rtol=1e-12, atol=1e-12)


def test_fixed_point_is_constant():
    s = get_system("toda_type:5")
    x0 = np.array([0.3, -0.1, 0.2, 0.0, 0.5] + [0.0] * 7)
    tr = integrate(s, x0, 1.0, 0.01)
    assert np.all(tr.states == x0)
    m = monitor(tr)
    assert m["max"] == 0.0


def test_toda2_h1_conserved():
    s = get_system("toda:2")
    tr = integrate(s, [1.0, -1.0, 0.5], 5.0, 1e-2)
    assert monitor(tr)["H"][0] < 1e-14


def test_km3_initial_velocity():
    s = get_system("km:3")
    f = CompiledPolys(s.field.components)
    assert list(f(np.ones(3))) == [1.0, 0.0, -1.0]


def test_single_sample_has_zero_drift():
    s = get_system("toda:3")
    tr = integrate(s, default_x0(s), 0.0, 1e-3)
    assert len(tr) == 1 and monitor(tr)["max"] == 0.0


def test_rk4_bitwise_deterministic():
    s = get_system("toda_type:5")
    a = integrate(s, default_x0(s), 1.0, 1e-2)
    b = integrate(s, default_x0(s), 1.0, 1e-2)
    assert np.array_equal(a.states, b.states)


def test_rk4_fourth_order_over_a_decade():
    s = get_system("toda_type:5")
    drifts = [max(monitor(integrate(s, default_x0(s), 10.0, dt, kmax=6))["H"][1:])
              for dt in (1e-2, 5e-3, 2.5e-3)]
    for coarse, fine in zip(drifts, drifts[1:]):
        assert 8 <= coarse / fine <= 32


def test_eigenvalues_logged_match_numpy():
    s = get_system("toda:3")
    tr = integrate(s, default_x0(s), 0.5, 0.1)
    L = np.array([[0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]])
    assert np.allclose(tr.eig_log[0], np.linalg.eigvalsh(L))


def test_dopri_agrees_with_rk4():
    s = get_system("toda:4")
    x0 = default_x0(s)
    a = integrate(s, x0, 2.0, 1e-2, method="dopri")
    b = integrate(s, x0, 2.0, 1e-3, stride=10)
    assert np.allclose(a.states[-1], b.states[-1], atol=1e-8)
    assert monitor(a)["max"] < 1e-8


def test_blowup_raises_with_last_time():
    s = get_system("toda:2")
    with pytest.raises(BlowupError) as info:
        integrate(s, [0.0, 0.0, 1e50], 10.0, 1.0)
    assert np.isfinite(info.value.last_time)


def test_invalid_inputs():
    s = get_system("toda:2")
    with pytest.raises(ValueError):
        integrate(s, [0.0, 0.0], 1.0, 0.1)
    with pytest.raises(ValueError):
        integrate(s, [0.0, 0.0, 0.5], 1.0, -0.1)
    with pytest.raises(ValueError):
        integrate(s, [0.0, 0.0, np.nan], 1.0, 0.1)


def test_csv_layout_and_stride():
    s = get_system("toda:3")
    tr = integrate(s, default_x0(s), 1.0, 0.1, stride=3)
    assert list(np.round(tr.times, 12)) == [0.0, 0.3, 0.6, 0.9, 1.0]
    buf = io.StringIO()
    write_csv(tr, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,b1,b2,b3,a1,a2,H1,H2,H3,eig1,eig2,eig3"
    assert len(lines) == 6
