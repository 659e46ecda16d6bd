import math

import numpy as np
import pytest

from spotvar import OUParams, PriceSeries, VariationSeries, simulate_path

MINUTE_MS = 60_000
EPOCH_MS = 1_504_224_000_000  # 2017-09-01 00:00 UTC


def minute_grid(start_ms, n):
    return start_ms + MINUTE_MS * np.arange(n, dtype=np.int64)


def price_series(symbol, times, closes):
    return PriceSeries(symbol=symbol, times=np.asarray(times), closes=np.asarray(closes))


def quantile_oracle(values, q):
    """Sort-based brute-force quantile with linear interpolation between
    closest order statistics (midpoint-symmetric lerp)."""
    s = sorted(float(v) for v in values)
    n = len(s)
    h = (n - 1) * (q / 100.0)
    lo, hi = math.floor(h), math.ceil(h)
    t = h - lo
    a, b = s[lo], s[hi]
    r = a + (b - a) * t
    if t >= 0.5:
        r = b - (b - a) * (1 - t)
    return r


@pytest.fixture
def ou_legs():
    """Three synthetic price legs (spot/num/den) on a 1000-minute grid whose
    variation is a known OU path."""
    params = OUParams(alpha=0.8, mu=-2e-5, sigma=0.0017)
    n = 1000
    v = simulate_path(params, 0.0, n - 1, 1.0, rng_seed=7)
    rng = np.random.default_rng(11)
    btc = 30_000.0 * np.exp(np.cumsum(rng.normal(0, 1e-3, n)))
    eth_over_btc = 0.07 * np.exp(np.cumsum(rng.normal(0, 1e-3, n)))
    eth = eth_over_btc * btc
    spot = eth_over_btc * np.exp(v)
    times = minute_grid(EPOCH_MS, n)
    return (
        price_series("ETHBTC", times, spot),
        price_series("ETHUSDT", times, eth),
        price_series("BTCUSDT", times, btc),
        VariationSeries(times, v),
        params,
    )


@pytest.fixture
def legs_dir(tmp_path, ou_legs):
    spot, num, den, _, _ = ou_legs
    paths = {}
    for leg, series in (("spot", spot), ("num", num), ("den", den)):
        p = tmp_path / f"{leg}.csv"
        series.to_csv(p)
        paths[leg] = p
    return tmp_path, paths
