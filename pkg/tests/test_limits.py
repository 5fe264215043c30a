import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from htlab.dist import HeavyTailLaw, frechet_cdf, make_rng, quantile_b_n
from htlab.errors import RegimeError
from htlab.limits import (TheoremId, TheoremParams, check_valid, denormalize_statistic,
                          fluctuation_scale, is_valid, ks_distance, ks_two_sample,
                          normalize_statistic, reference_for)

INF = math.inf
T = TheoremId


def test_gro1_normalization():
    prm = TheoremParams(1.0, r=2)
    assert normalize_statistic(T.GRO1, 7.0 * 3.5, 10, 7.0, prm) == pytest.approx(3.5)
    prm = TheoremParams(1.0, r=1)
    # premultiplier 2^(2/r - 1) = 2 at r = 1
    assert normalize_statistic(T.GRO1, 8.0, 10, 2.0, prm) == pytest.approx(8.0)


def test_gro3_centering_cancels():
    prm = TheoremParams(1.4, r=4, mu=0.7)
    n = 50
    assert normalize_statistic(T.GRO3, n ** 1.5 * 0.7, n, 123.0, prm) == 0.0


def test_rtop3_affine_map():
    prm = TheoremParams(1.4, r=4, p=4 / 3, mu=1.0)
    n, b, c = 2, 6.0, 0.37
    g = 0.5
    raw = 2 ** 1.5 + 6 ** 2 * 2 ** -1.5 * c
    # slope b^(-1/g) n^(1/g - g) = 6^-2 * 2^1.5, centering n^(1+g) = 2^1.5
    assert normalize_statistic(T.RTOP3, raw, n, b, prm) == pytest.approx(c, rel=1e-12)
    assert fluctuation_scale(T.RTOP3, n, b, prm) == pytest.approx(36 * 2 ** -1.5)


VALID = [
    (T.GRO1, TheoremParams(1.0, r=2)),
    (T.GRO1, TheoremParams(0.5, r=1.5)),
    (T.GRO2, TheoremParams(0.8, r=4)),
    (T.GRO2, TheoremParams(0.9, r=INF)),
    (T.GRO2C, TheoremParams(1.5, r=4)),
    (T.GRO3, TheoremParams(1.4, r=4, mu=1)),
    (T.RTOP1, TheoremParams(1.0, r=2, p=2)),
    (T.RTOP2, TheoremParams(0.6, r=4, p=2)),
    (T.RTOP2C, TheoremParams(1.8, r=4, p=2)),
    (T.RTOP3, TheoremParams(1.4, r=4, p=4 / 3, mu=1)),
    (T.GROUND, TheoremParams(0.5)),
]


@pytest.mark.parametrize("tid,prm", VALID)
@given(x=st.floats(-1e6, 1e6), n=st.integers(2, 5000))
@settings(max_examples=30, deadline=None)
def test_affine_round_trip(tid, prm, x, n):
    b = quantile_b_n(HeavyTailLaw(prm.alpha), n)
    raw = denormalize_statistic(tid, x, n, b, prm)
    assert normalize_statistic(tid, raw, n, b, prm) == pytest.approx(x, rel=1e-12, abs=1e-12 * (1 + abs(x)))
    check_valid(tid, prm)


# boundary points: (theorem, params, expected validity)
BOUNDARY = [
    (T.GRO1, TheoremParams(1.0, r=2.0), True),
    (T.GRO1, TheoremParams(1.0, r=2.0001), False),
    (T.GRO2, TheoremParams(4 / 3 - 1e-9, r=4), True),
    (T.GRO2, TheoremParams(4 / 3, r=4), False),
    (T.GRO2, TheoremParams(1.9, r=4), False),
    (T.GRO2C, TheoremParams(4 / 3, r=4), True),
    (T.GRO2C, TheoremParams(2 - 1e-9, r=4), True),
    (T.GRO2C, TheoremParams(1.45, r=6), True),
    (T.GRO2C, TheoremParams(1.5, r=6), False),       # upper edge r/(r-2) = 1.5
    (T.GRO2C, TheoremParams(1.5, r=3), True),        # lower edge r/(r-1) = 1.5 is included
    (T.GRO2C, TheoremParams(1.49, r=3), False),
    (T.GRO2C, TheoremParams(1.2, r=INF), True),
    (T.GRO2, TheoremParams(0.999, r=INF), True),
    (T.GRO2, TheoremParams(1.0, r=INF), False),
    (T.GRO3, TheoremParams(4 / 3, r=4, mu=1), False),
    (T.GRO3, TheoremParams(1.4, r=4, mu=1), True),
    (T.GRO3, TheoremParams(1.5, r=4, mu=1), False),
    (T.GRO3, TheoremParams(1.4, r=4, mu=-1), False),
    (T.RTOP1, TheoremParams(1.0, r=2, p=2), True),
    (T.RTOP1, TheoremParams(1.0, r=3, p=2), False),
    (T.RTOP2, TheoremParams(1.6 - 1e-9, r=4, p=2), True),     # 2 / (1 + 1/4) = 1.6
    (T.RTOP2, TheoremParams(1.6, r=4, p=2), False),
    (T.RTOP2C, TheoremParams(1.6, r=4, p=2), True),
    (T.RTOP2C, TheoremParams(1.5, r=4, p=2), False),
    (T.RTOP2C, TheoremParams(4 / 3 + 1e-9, r=4, p=4 / 3), True),   # gamma = 1/2
    (T.RTOP2C, TheoremParams(1.999, r=INF, p=1.0), False),          # 1/gamma = 1
    (T.RTOP3, TheoremParams(4 / 3, r=4, p=4 / 3, mu=1), False),
    (T.RTOP3, TheoremParams(1.4, r=4, p=4 / 3, mu=1), True),
    (T.RTOP3, TheoremParams(1.4, r=4, p=4 / 3, mu=0), False),
    (T.RTOP3, TheoremParams(1.4, r=INF, p=4 / 3, mu=1), False),
    (T.GROUND, TheoremParams(0.999), True),
    (T.GROUND, TheoremParams(1.0), False),
]


@pytest.mark.parametrize("tid,prm,ok", BOUNDARY)
def test_validity_boundaries(tid, prm, ok):
    assert is_valid(tid, prm) is ok
    if not ok:
        with pytest.raises(RegimeError):
            normalize_statistic(tid, 1.0, 10, 1.0, prm)


def test_rtop3_upper_edge():
    # gamma = 1/2, gamma' = 1/min(2, 4/3) - 1/max(2, 4) = 1/2: upper edge (2 - 1/2) / 1 = 1.5
    assert is_valid(T.RTOP3, TheoremParams(1.5 - 1e-9, r=4, p=4 / 3, mu=1))
    assert not is_valid(T.RTOP3, TheoremParams(1.5, r=4, p=4 / 3, mu=1))
    # gamma = 1/4 (r=4, p=2): gamma' = 1/2 - 1/4 = 1/4, edge (2 - 1/4) / 1 = 1.75
    assert is_valid(T.RTOP3, TheoremParams(1.7, r=4, p=2, mu=1))
    assert not is_valid(T.RTOP3, TheoremParams(1.75, r=4, p=2, mu=1))


def test_frechet_reference():
    ref = reference_for(T.RTOP1, TheoremParams(1.0), HeavyTailLaw(1.0))
    assert ref.cdf(1.0) == pytest.approx(math.exp(-1))
    grid = np.linspace(0.01, 30, 200)
    ref = reference_for(T.GRO1, TheoremParams(0.7, r=1.5), HeavyTailLaw(0.7))
    assert np.array_equal(ref.cdf(grid), frechet_cdf(0.7, grid))


def test_gro2_reference_is_monotone_power():
    ref = reference_for(T.GRO2, TheoremParams(0.8, r=4), HeavyTailLaw(0.8), mc_size=300,
                        rng=make_rng(1), summands=20_000)
    assert ref.tail_index == pytest.approx(0.4) and ref.power == 0.5
    grid = np.linspace(0, ref.sample.max() * 1.1, 500)
    f = ref.cdf(grid)
    assert np.all(np.diff(f) >= 0) and f[0] == 0 and f[-1] == 1


def test_ground_reference_self_consistent():
    prm = TheoremParams(0.5)
    law = HeavyTailLaw(0.5)
    a = reference_for(T.GROUND, prm, law, 5000, make_rng(1))
    b = reference_for(T.GROUND, prm, law, 5000, make_rng(2))
    assert ks_two_sample(a.sample, b.sample) <= 0.02


def test_ground_reference_builds_pass_null_calibration():
    # the same comparison judged against the two-sample Kolmogorov law at level 0.01
    prm = TheoremParams(0.5)
    law = HeavyTailLaw(0.5)
    a = reference_for(T.GROUND, prm, law, 5000, make_rng(1))
    b = reference_for(T.GROUND, prm, law, 5000, make_rng(2))
    d = ks_two_sample(a.sample, b.sample)
    assert stats.kstwobign.sf(d * math.sqrt(2500)) >= 0.01


def test_ks_examples():
    assert ks_distance([0.5], lambda x: np.full_like(x, 0.3)) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        ks_distance([], frechet_cdf)
    assert ks_two_sample([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert ks_two_sample([0.0], [1.0]) == 1.0


def test_ks_matches_scipy():
    rng = make_rng(3)
    x = rng.standard_normal(500)
    y = rng.standard_normal(300) + 0.2
    assert ks_distance(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-12)
    assert ks_two_sample(x, y) == pytest.approx(stats.ks_2samp(x, y).statistic, abs=1e-12)
    assert ks_two_sample(x, y) == ks_two_sample(y, x)


def test_ks_calibration():
    rng = make_rng(4)
    x = stats.expon.ppf(rng.random(10_000))
    assert ks_distance(x, stats.expon.cdf) <= 0.02
    a, b = rng.random(1000), rng.random(1000)
    assert ks_two_sample(a, b) <= 0.1
