import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adancg import DType, capped_cg, make_quartic_test
from adancg.capped_cg import verify_nc_certificate, verify_sol_certificate
from adancg.cli import parse_seeds
from adancg.estimators import StepCache, holder_estimate_h0, holder_estimate_h1
from adancg.linesearch import nc_transform

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


@st.composite
def cg_problems(draw):
    n = draw(st.integers(2, 8))
    G = draw(arrays(float, (n, n), elements=finite))
    H = 0.5 * (G + G.T)
    g = draw(arrays(float, n, elements=finite))
    assume(np.linalg.norm(g) > 1e-3)
    sigma = draw(st.floats(1e-2, 2.0))
    zeta = draw(st.floats(0.05, 0.5))
    return H, g, sigma, zeta


@settings(max_examples=300, deadline=None)
@given(cg_problems())
def test_capped_cg_certificates(case):
    H, g, sigma, zeta = case
    hv = lambda v: H @ v  # noqa: E731
    out = capped_cg(hv, g, sigma, zeta)
    if out.d_type is DType.SOL:
        assert verify_sol_certificate(hv, g, sigma, zeta, out.d).passed
    else:
        assert verify_nc_certificate(hv, g, sigma, out.d).passed
        assert np.linalg.eigvalsh(H)[0] < -sigma


@settings(max_examples=200, deadline=None)
@given(arrays(float, 4, elements=finite), arrays(float, 4, elements=finite),
       st.floats(-50.0, -1e-3))
def test_nc_transform_postconditions(d_raw, g, q):
    assume(np.linalg.norm(d_raw) > 1e-3)
    d = nc_transform(d_raw, q, g)
    nd = np.linalg.norm(d)
    assert d @ g <= 1e-12 * nd * np.linalg.norm(g)
    # curvature of d along the same line is q / ||d_raw||^2, which equals -||d||
    assert abs(q / (d_raw @ d_raw) + nd) <= 1e-10 * max(1.0, nd)


box = arrays(float, 3, elements=st.floats(-1.0, 1.0))


@settings(max_examples=300, deadline=None)
@given(box, box)
def test_estimators_below_quartic_modulus(x, y):
    # H0 divides by ||s||^3, so rounding dominates on very short steps
    assume(np.linalg.norm(y - x) > 1e-2)
    P = make_quartic_test(3)
    s = y - x
    hs = P.hvp(x, s)
    c = StepCache(x, y, P.f(x), P.f(y), P.grad(x), float(s @ hs), P.grad(y), hs)
    assert 0.0 <= holder_estimate_h0(c, 1.0) <= P.hf_hint * (1 + 1e-9)
    assert 0.0 <= holder_estimate_h1(c, 1.0) <= P.hf_hint * (1 + 1e-9)


@given(st.integers(-1000, 1000), st.integers(0, 50))
def test_seed_range_inclusive(a, k):
    assert parse_seeds(f"{a}..{a + k}") == list(range(a, a + k + 1))


@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=20))
def test_seed_list_roundtrip(seeds):
    assert parse_seeds(",".join(map(str, seeds))) == seeds
