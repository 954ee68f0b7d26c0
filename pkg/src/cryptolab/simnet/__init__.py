"""Mining scenario simulator: server, throttled miner, relay and detectors."""
from .clock import RealClock, VirtualClock
from .detectors import (
    MINING_SEQUENCE,
    DetectorVerdict,
    blacklist_detector,
    endpoint_matches,
    load_blacklist,
    payload_detector,
)
from .miner import Connect, MinerConfig, MinerSummary, run_miner
from .relay import RelayConfig, RelayHandle, run_relay
from .scenario import SCENARIOS, SITE_KEY, ScenarioError, ScenarioReport, run_scenario
from .server import ServerHandle, run_server
from .transport import InProcessNetwork, StartupError, TcpNetwork, make_network
from .wire import WireRecord, read_frame_log, write_frame_log

__all__ = [
    "MINING_SEQUENCE",
    "SCENARIOS",
    "SITE_KEY",
    "Connect",
    "DetectorVerdict",
    "InProcessNetwork",
    "MinerConfig",
    "MinerSummary",
    "RealClock",
    "RelayConfig",
    "RelayHandle",
    "ScenarioError",
    "ScenarioReport",
    "ServerHandle",
    "StartupError",
    "TcpNetwork",
    "VirtualClock",
    "WireRecord",
    "blacklist_detector",
    "endpoint_matches",
    "load_blacklist",
    "make_network",
    "payload_detector",
    "read_frame_log",
    "run_miner",
    "run_relay",
    "run_scenario",
    "run_server",
    "write_frame_log",
]
