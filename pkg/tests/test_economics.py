import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptolab.economics import (
    DEFAULT,
    AlphaPoint,
    DeviceProfile,
    MarketConstants,
    WebsiteProfile,
    block_stats,
    device_table,
    load_devices,
    load_websites,
    loss,
    parse_duration,
    profit,
    time_to_one_xmr,
    website_profit,
    write_device_csv,
    write_website_csv,
)

WINDOWS = DeviceProfile("Windows", W=65, b_n=82, dt_minutes=85, points=(AlphaPoint(0.1, 21, 10),))


class TestProfit:
    def test_session_value(self):
        p = profit(21, 85)
        assert p.xmr == pytest.approx(3.0995e-6, rel=1e-4)
        assert p.usd == pytest.approx(6.199e-4, rel=1e-3)

    def test_zero_rate(self):
        assert profit(0, 85).xmr == 0

    def test_unit_coherence(self):
        p = profit(17, 33)
        assert p.usd == p.xmr * DEFAULT.xmr_price

    @given(st.floats(0, 1e4), st.floats(0, 1e4), st.floats(1.01, 10))
    def test_linear_monotone(self, h, dt, k):
        a, b = profit(h, dt).xmr, profit(h * k, dt).xmr
        assert b >= a
        assert profit(h, dt * k).xmr == pytest.approx(b, rel=1e-12, abs=1e-300)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            profit(-1, 10)

    def test_constants_override(self):
        c = MarketConstants(pay_rate=1e-4, xmr_price=50)
        assert profit(1e6, 1 / 60, c).usd == pytest.approx(1e-4 * 50)

    @pytest.mark.parametrize("kw", [{"pay_rate": 0}, {"xmr_price": -1}])
    def test_constants_positive(self, kw):
        with pytest.raises(ValueError):
            MarketConstants(**kw)


class TestLoss:
    def test_reference_device(self):
        assert loss(WINDOWS, 10) == pytest.approx(6.418e-5 * 65 * 0.015 * 72, rel=1e-12)
        assert round(loss(WINDOWS, 10), 7) == 4.5054e-3

    def test_no_extra_drain(self):
        assert loss(WINDOWS, 82) == 0

    def test_mining_cannot_improve_battery(self):
        with pytest.raises(ValueError, match="exceeds"):
            loss(WINDOWS, 90)

    @given(st.floats(0, 82), st.floats(0, 82))
    def test_linear_in_drain(self, a, b):
        assert loss(WINDOWS, a) - loss(WINDOWS, b) == pytest.approx(6.418e-5 * 65 * 0.015 * (b - a), abs=1e-15)

    def test_linux_row(self):
        linux = DeviceProfile("Linux", W=41, b_n=70, dt_minutes=71)
        # the reference table lists 5.5e-3; the formula gives about half
        assert loss(linux, 3) == pytest.approx(2.645e-3, rel=1e-3)

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            DeviceProfile("x", W=0, b_n=50, dt_minutes=1)
        with pytest.raises(ValueError):
            DeviceProfile("x", W=1, b_n=120, dt_minutes=1)


class TestPayoutTime:
    def test_hashes_per_xmr(self):
        assert time_to_one_xmr(21).hashes_needed == pytest.approx(3.4554e10, rel=1e-4)

    def test_years(self):
        assert time_to_one_xmr(21).years == pytest.approx(52.18, abs=0.01)

    def test_double_rate_halves(self):
        assert time_to_one_xmr(42).years == pytest.approx(time_to_one_xmr(21).years / 2)

    def test_zero_rate(self):
        with pytest.raises(ValueError):
            time_to_one_xmr(0)


class TestDeviceTable:
    def test_shipped_profiles(self):
        devs = load_devices()
        assert [d.name for d in devs] == ["Windows", "Linux", "Android"]
        assert all(d.C == 6.418e-5 and d.t_r == 0.015 for d in devs)
        assert len(device_table(devs)) == 9

    def test_windows_low_throttle(self):
        row = device_table(load_devices()[:1], [0.1])[0]
        assert row.profit.usd == pytest.approx(6.2e-4, rel=0.01)
        assert row.loss == pytest.approx(4.5e-3, rel=0.01)
        assert row.gap == pytest.approx(3.9e-3, rel=0.01)

    def test_android_gap_positive(self):
        android = load_devices()[2]
        row = device_table([android], [0.9])[0]
        assert row.gap > 0

    def test_gap_identity(self):
        for r in device_table(load_devices()):
            assert r.gap == r.loss - r.profit.usd

    def test_missing_alpha(self):
        with pytest.raises(KeyError, match="alpha=0.3"):
            device_table(load_devices(), [0.3])

    def test_csv(self):
        devs = load_devices()
        buf = io.StringIO()
        write_device_csv(device_table(devs), devs, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("Device,dt_min,b_n,alpha,h,b_c,W,")
        assert lines[1].startswith("Windows,85,82,0.1,21,10,65,3.099e-06,0.0006199,0.004505")
        assert len(lines) == 10


class TestWebsites:
    @pytest.mark.parametrize(
        "visits, mmss, usd",
        [(47.09e9, "07:23", 2.415e6), (26.22e9, "20:05", 3.657e6), (87.24e6, "04:32", 2747.0)],
    )
    def test_reference_sites(self, visits, mmss, usd):
        assert website_profit(WebsiteProfile(visits, parse_duration(mmss))) == pytest.approx(usd, rel=1e-3)

    def test_zero_visits(self):
        assert website_profit(WebsiteProfile(0, 100)) == 0

    def test_folds_into_profit(self):
        w = WebsiteProfile(1234.0, 56.0, 20)
        assert website_profit(w) == pytest.approx(profit(20, 1234.0 * 56.0 / 60).usd, rel=1e-12)

    @pytest.mark.parametrize("text, sec", [("07:23", 443), ("0:05", 5), ("02:98", 218), ("120:00", 7200)])
    def test_parse_duration(self, text, sec):
        assert parse_duration(text) == sec

    @pytest.mark.parametrize("text", ["7", "7:3", "a:bc", "", "-1:00"])
    def test_parse_duration_rejects(self, text):
        with pytest.raises(ValueError):
            parse_duration(text)

    def test_reference_dataset(self):
        ds = load_websites()
        assert len(ds.top) == 10 and len(ds.cryptojacking) == 10
        assert ds.top[0].ads_monthly_usd == 7.94e9
        assert ds.top[4].ads_monthly_usd is None
        buf = io.StringIO()
        write_website_csv(ds.top, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "Website,GR,CR,Visits,Time,P_CJ_USD,P_Ads_USD"
        assert lines[1] == "google.com,1,1,4.709e+10,07:23,2.415e+06,7.94e+09"
        assert lines[5].endswith(",")


class TestBlockStats:
    def test_half_space(self):
        b = block_stats(2**255, 1)
        assert (b.P_r, b.H, b.T_B) == (0.5, 2.0, 2.0)

    def test_double_rate(self):
        assert block_stats(2**200, 2e6).T_B == block_stats(2**200, 1e6).T_B / 2

    def test_small_target(self):
        b = block_stats(2**224, 1e6)
        assert b.H == 2**32
        assert b.T_B == pytest.approx(4295, abs=0.5)

    @pytest.mark.parametrize("target", [0, 2**256, -5])
    def test_bad_target(self, target):
        with pytest.raises(ValueError):
            block_stats(target, 1)

    def test_bad_rate(self):
        with pytest.raises(ValueError):
            block_stats(2**200, 0)

    def test_tiny_target_finite(self):
        assert math.isfinite(block_stats(1, 1).H)
