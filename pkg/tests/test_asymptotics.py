import io
import math

import numpy as np
import pytest

from oracles import loglog
from primeomega import asymptotics as asy
from primeomega.weights import build_weight_table, mertens_sum, power_sum


def test_hardy_wright_against_oracle(tables, oracle_1e5):
    for t, vals in zip(tables, oracle_1e5):
        s = asy.hardy_wright_drift(t, (16, 10**3, 10**5))
        for K, d in s.as_dict().items():
            expect = (int(vals[1 : K + 1].sum()) - K * loglog(K)) / K
            assert d == pytest.approx(expect, rel=1e-13, abs=1e-15)


def test_hardy_wright_frozen(little, big):
    # Frozen from a sweep over the 2**20 tables.
    lw = asy.hardy_wright_drift(little).as_dict()
    bw = asy.hardy_wright_drift(big).as_dict()
    assert lw[10**5] == pytest.approx(0.220529642318, abs=1e-11)
    assert bw[10**6] == pytest.approx(1.00083, abs=1e-5)
    assert abs(lw[10**6] - lw[10**5]) < 0.05
    for K in lw:
        assert bw[K] > lw[K]


def test_hardy_wright_domain(big):
    assert math.isfinite(asy.hardy_wright_drift(big, [16]).ratios[0])
    with pytest.raises(ValueError):
        asy.hardy_wright_drift(big, [15])
    with pytest.raises(IndexError):
        asy.hardy_wright_drift(big, [big.k_max + 1])


def test_delange_identity(tables):
    for t in tables:
        d = asy.hardy_wright_drift(t).as_dict()
        r = asy.delange_ratio(t, 1).as_dict()
        for K in d:
            assert r[K] == pytest.approx(1 + d[K] / loglog(K), rel=1e-13)


def test_delange_examples(big):
    r1 = asy.delange_ratio(big, 1, [10**6]).ratios[0]
    assert 1 < r1 < 2
    r2 = asy.delange_ratio(big, 2, [10**3, 10**6]).ratios
    assert r2[1] < r2[0]
    with pytest.raises(ValueError):
        asy.delange_ratio(big, 7)
    with pytest.raises(ValueError):
        asy.delange_ratio(big, 0)


def test_mertens_drift(big):
    s = asy.mertens_drift(big, [4, 10**5, 10**6])
    assert s.ratios[0] == pytest.approx(1 / 2 + 1 / 3 - math.log(math.log(4)), rel=1e-14)
    assert s.ratios[0] == pytest.approx(0.5067, abs=1e-4)
    assert abs(s.ratios[2] - s.ratios[1]) < 0.01
    assert s.fitted >= 1
    with pytest.raises(ValueError):
        asy.mertens_drift(big, [3])


def test_norton_examples(little, big):
    r4 = asy.norton_ratio(big, [4]).ratios[0]
    assert r4 == pytest.approx(8.41 / (4 * math.exp(0.9 * (1 / 2 + 1 / 3))), rel=1e-14)
    assert r4 == pytest.approx(0.993, abs=1e-3)
    cps = (10**3, 10**4, 10**5, 10**6)
    lo, hi = asy.norton_ratio(little, cps), asy.norton_ratio(big, cps)
    assert all(a <= b for a, b in zip(lo.ratios, hi.ratios))
    assert hi.ratios[-1] <= 2 * hi.ratios[0]


def test_power_sum_ratio_examples(little, big):
    s = asy.power_sum_ratio(big, [16, 10**6]).ratios
    assert s[0] == big.S(16) / 16
    assert s[1] == pytest.approx(math.sqrt(power_sum(10**6, 2, big) / 10**6) / 2, rel=1e-15)
    assert asy.power_sum_ratio(big).fitted >= asy.power_sum_ratio(little).fitted
    with pytest.raises(ValueError):
        asy.power_sum_ratio(big, [15])


def test_lower_constant(little, big):
    assert asy.s_power_lower_constant(big, [16]).ratios[0] == big.S(16) / 16
    sb, sl = asy.s_power_lower_constant(big), asy.s_power_lower_constant(little)
    assert min(sb.ratios) > 0 and min(sl.ratios) > 0
    assert sb.fitted >= sl.fitted


def test_dyadic_comparability(big, little):
    c = asy.dyadic_comparability(big, 2**14)
    assert 1 <= c.constant <= 4
    l = asy.dyadic_level(c.argmax)
    assert c.constant == big.S(2**l) / big.S(c.argmax)
    # Brute force over the same range.
    brute = max(big.S(2 ** asy.dyadic_level(K)) / big.S(K) for K in range(2, 2**14 + 1))
    assert c.constant == brute
    assert asy.dyadic_comparability(little, 2).constant == 1.0
    with pytest.raises(IndexError):
        asy.dyadic_comparability(build_weight_table(100, "big"))


def test_dyadic_level():
    assert [asy.dyadic_level(K) for K in (2, 3, 4, 5, 8, 9, 1024, 1025)] == [1, 2, 2, 3, 3, 4, 10, 11]


def test_series_validation(big):
    with pytest.raises(ValueError):
        asy.RatioSeries("x", big.kind, (1, 1), (0.0, 0.0))
    with pytest.raises(ValueError):
        asy.RatioSeries("x", big.kind, (1, 2), (0.0,))


def test_csv(big):
    s = asy.hardy_wright_drift(big)
    text = asy.series_to_csv(s)
    lines = text.split("\n")
    assert lines[0] == "label,kind,K,value"
    assert len(lines) == 2 + len(asy.DEFAULT_CHECKPOINTS)
    assert "\r" not in text
    assert lines[1].startswith("hardy_wright_drift,big-omega,16,")
    empty = asy.RatioSeries("e", big.kind, (), ())
    assert asy.series_to_csv(empty) == "label,kind,K,value\n"
    fh = io.StringIO()
    asy.series_to_csv([s, s], fh)
    assert fh.getvalue() == asy.series_to_csv([s, s])


def test_deterministic(big):
    a = asy.series_to_csv([asy.norton_ratio(big), asy.mertens_drift(big)])
    b = asy.series_to_csv([asy.norton_ratio(big), asy.mertens_drift(big)])
    assert a == b


def test_mertens_constant_regression(big):
    # The drift approaches the Meissel-Mertens constant 0.2614972...
    assert mertens_sum(10**6, big) - loglog(10**6) == pytest.approx(0.2614972128, abs=1e-3)
    assert np.isclose(asy.mertens_drift(big, [10**6]).ratios[0], 0.261536, atol=1e-6)
