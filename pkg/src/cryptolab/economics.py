"""Closed-form mining economics: session profit, battery loss, payout time,
per-device tables, website revenue and block-time relations.

Session length enters the profit formula in seconds. Money is plain double
precision; CSV output rounds to four significant figures.
"""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Optional, Sequence

SECONDS_PER_YEAR = 365 * 24 * 3600


@dataclass(frozen=True)
class MarketConstants:
    pay_rate: float = 2.894e-5  # XMR per 10^6 hashes
    xmr_price: float = 200.0  # USD per XMR

    def __post_init__(self):
        if not (self.pay_rate > 0 and self.xmr_price > 0):
            raise ValueError("pay_rate and xmr_price must be positive")

    @property
    def hashes_per_xmr(self) -> float:
        return 1e6 / self.pay_rate


DEFAULT = MarketConstants()


@dataclass(frozen=True)
class Profit:
    xmr: float
    usd: float


def _nonneg(**kw):
    for k, v in kw.items():
        if not (isinstance(v, (int, float)) and v >= 0 and math.isfinite(v)):
            raise ValueError(f"{k} must be a finite non-negative number, got {v!r}")


def hashes_to_profit(hashes: float, constants: MarketConstants = DEFAULT) -> Profit:
    xmr = constants.pay_rate * hashes / 1e6
    return Profit(xmr, xmr * constants.xmr_price)


def profit(h: float, dt_minutes: float, constants: MarketConstants = DEFAULT) -> Profit:
    """Payout for ``dt_minutes`` of mining at ``h`` hashes per second."""
    _nonneg(h=h, dt_minutes=dt_minutes)
    return hashes_to_profit(h * dt_minutes * 60.0, constants)


@dataclass(frozen=True)
class AlphaPoint:
    alpha: float
    h: float  # hashes/s at this throttle
    b_c: float  # battery % left after mining


@dataclass(frozen=True)
class DeviceProfile:
    name: str
    W: float  # watts
    b_n: float  # battery % after dt without mining
    dt_minutes: float
    points: tuple = ()
    C: float = 6.418e-5  # USD per watt-hour
    t_r: float = 0.015  # hours to recharge 1%

    def __post_init__(self):
        for k in ("W", "dt_minutes", "C", "t_r"):
            v = getattr(self, k)
            if not v > 0:
                raise ValueError(f"{self.name}: {k} must be positive, got {v}")
        if not 0 <= self.b_n <= 100:
            raise ValueError(f"{self.name}: b_n must be in [0, 100], got {self.b_n}")

    def point(self, alpha: float) -> AlphaPoint:
        for p in self.points:
            if math.isclose(p.alpha, alpha, abs_tol=1e-9):
                return p
        raise KeyError(f"{self.name}: no entry for alpha={alpha}")


def loss(profile: DeviceProfile, b_c: float) -> float:
    """Electricity cost (USD) of recharging the extra battery drain."""
    _nonneg(b_c=b_c)
    if b_c > profile.b_n:
        raise ValueError(f"b_c={b_c} exceeds b_n={profile.b_n}: mining cannot leave more battery")
    return profile.C * profile.W * profile.t_r * (profile.b_n - b_c)


@dataclass(frozen=True)
class PayoutTime:
    hashes_needed: float
    years: float


def time_to_one_xmr(h: float, constants: MarketConstants = DEFAULT) -> PayoutTime:
    if not h > 0:
        raise ValueError("hash rate must be positive")
    n = constants.hashes_per_xmr
    return PayoutTime(n, n / h / SECONDS_PER_YEAR)


@dataclass(frozen=True)
class SessionEconomics:
    device: str
    alpha: float
    h: float
    b_c: float
    profit: Profit
    loss: float
    gap: float
    years: float


def session_economics(profile: DeviceProfile, alpha: float, constants: MarketConstants = DEFAULT) -> SessionEconomics:
    pt = profile.point(alpha)
    p = profit(pt.h, profile.dt_minutes, constants)
    lo = loss(profile, pt.b_c)
    years = time_to_one_xmr(pt.h, constants).years if pt.h > 0 else math.inf
    return SessionEconomics(profile.name, pt.alpha, pt.h, pt.b_c, p, lo, lo - p.usd, years)


def device_table(
    profiles: Iterable[DeviceProfile],
    alphas: Optional[Sequence[float]] = None,
    constants: MarketConstants = DEFAULT,
) -> list[SessionEconomics]:
    """One row per (device, alpha). Without ``alphas`` every listed point is used."""
    rows = []
    for prof in profiles:
        wanted = alphas if alphas is not None else [p.alpha for p in prof.points]
        rows.extend(session_economics(prof, a, constants) for a in wanted)
    return rows


def load_devices(path: Optional[str] = None) -> list[DeviceProfile]:
    if path is None:
        text = resources.files("cryptolab.data").joinpath("devices.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)
    defaults = doc.get("defaults", {})
    out = []
    for d in doc["devices"]:
        pts = tuple(AlphaPoint(float(p["alpha"]), float(p["h"]), float(p["b_c"])) for p in d["points"])
        out.append(
            DeviceProfile(
                d["name"],
                float(d["W"]),
                float(d["b_n"]),
                float(d["dt_minutes"]),
                pts,
                C=float(d.get("C", defaults.get("C", 6.418e-5))),
                t_r=float(d.get("t_r", defaults.get("t_r", 0.015))),
            )
        )
    return out


DEVICE_HEADER = ("Device", "dt_min", "b_n", "alpha", "h", "b_c", "W", "P_XMR", "P_USD", "L_USD", "gap_USD", "T_years")


def _g(x) -> str:
    return f"{x:.4g}"


def write_device_csv(rows: Iterable[SessionEconomics], profiles: Iterable[DeviceProfile], out: IO[str]):
    by_name = {p.name: p for p in profiles}
    w = csv.writer(out, lineterminator="\n")
    w.writerow(DEVICE_HEADER)
    for r in rows:
        p = by_name[r.device]
        w.writerow(
            [r.device, _g(p.dt_minutes), _g(p.b_n), _g(r.alpha), _g(r.h), _g(r.b_c), _g(p.W)]
            + [_g(v) for v in (r.profit.xmr, r.profit.usd, r.loss, r.gap, r.years)]
        )


# websites

_MMSS = re.compile(r"(\d+):(\d{2})\Z")


def parse_duration(text: str) -> int:
    """``MM:SS`` to seconds. A seconds field above 59 is added as-is (``02:98`` is 218 s)."""
    m = _MMSS.match(text.strip())
    if not m:
        raise ValueError(f"duration must look like MM:SS, got {text!r}")
    return int(m.group(1)) * 60 + int(m.group(2))


@dataclass(frozen=True)
class WebsiteProfile:
    monthly_visits: float
    avg_visit_duration: float  # seconds
    visitor_hash_rate: float = 20.0

    def __post_init__(self):
        _nonneg(
            monthly_visits=self.monthly_visits,
            avg_visit_duration=self.avg_visit_duration,
            visitor_hash_rate=self.visitor_hash_rate,
        )


def website_profit(profile: WebsiteProfile, constants: MarketConstants = DEFAULT) -> float:
    """Monthly USD if every visit mines for its whole duration."""
    hashes = profile.monthly_visits * profile.avg_visit_duration * profile.visitor_hash_rate
    return hashes_to_profit(hashes, constants).usd


@dataclass(frozen=True)
class SiteRow:
    site: str
    gr: int
    cr: int
    visits: float
    time: str
    ads_monthly_usd: Optional[float] = None

    def profile(self, hash_rate: float = 20.0) -> WebsiteProfile:
        return WebsiteProfile(self.visits, parse_duration(self.time), hash_rate)


@dataclass(frozen=True)
class SiteDataset:
    hash_rate: float
    top: tuple = field(default=())
    cryptojacking: tuple = field(default=())


def load_websites(path: Optional[str] = None) -> SiteDataset:
    """Reference sites with visit statistics and, where known, monthly ad revenue."""
    if path is None:
        text = resources.files("cryptolab.data").joinpath("websites.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)

    def rows(key):
        return tuple(
            SiteRow(r["site"], int(r["gr"]), int(r["cr"]), float(r["visits"]), r["time"], r.get("ads_monthly_usd"))
            for r in doc.get(key, [])
        )

    return SiteDataset(float(doc.get("hash_rate", 20.0)), rows("top"), rows("cryptojacking"))


WEBSITE_HEADER = ("Website", "GR", "CR", "Visits", "Time", "P_CJ_USD", "P_Ads_USD")


def write_website_csv(rows: Iterable[SiteRow], out: IO[str], hash_rate: float = 20.0, constants=DEFAULT):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(WEBSITE_HEADER)
    for r in rows:
        p = website_profit(r.profile(hash_rate), constants)
        ads = "" if r.ads_monthly_usd is None else _g(r.ads_monthly_usd)
        w.writerow([r.site, r.gr, r.cr, _g(r.visits), r.time, _g(p), ads])


# block time

@dataclass(frozen=True)
class BlockStats:
    P_r: float  # chance one hash meets the target
    H: float  # expected hashes per block
    T_B: float  # expected seconds per block


def block_stats(target_256: int, network_hash_rate: float) -> BlockStats:
    if not isinstance(target_256, int) or not 0 < target_256 < 2**256:
        raise ValueError("target must be an integer in (0, 2^256)")
    if not network_hash_rate > 0:
        raise ValueError("network hash rate must be positive")
    p = target_256 / 2**256
    h = 2**256 / target_256
    return BlockStats(p, h, h / network_hash_rate)
