"""INI scenario files with Table I defaults.

Sections ``channel``, ``rake``, ``game`` and ``run``; list-valued keys take
comma-separated values. Units: W for powers, b for packet sizes, kb/s for
the rate and dB for the power delay profile ratio.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .channel import ChannelConfig, db_to_linear
from .game import GameParams


class ScenarioError(ValueError):
    pass


DEFAULTS = {
    "channel": {
        "num_users": "10",
        "num_paths": "200",
        "pdp_ratio_db": "20",
        "distance_min": "3",
        "distance_max": "30",
        "path_gain_scale": "0.3",
    },
    "rake": {
        "finger_fractions": "1.0",
        "chips_per_frame": "1, 50",
        "processing_gains": "256",
        "fractional_frames": "false",
    },
    "game": {
        "total_bits": "100",
        "info_bits": "100",
        "rate_kbps": "100",
        "noise_power": "5e-16",
        "p_max": "1e-6",
    },
    "run": {
        "n_realizations": "2000",
        "seed": "0",
    },
}


@dataclass
class ScenarioFile:
    channel: ChannelConfig
    game: GameParams
    finger_fractions: list[float]
    chips_per_frame: list[int]
    processing_gains: list[int]
    fractional_frames: bool = False
    n_realizations: int = 2000
    seed: int = 0
    pdp_ratio_db: float = 20.0
    source: dict = field(default_factory=dict, repr=False)


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and line.split("=", 1)[0].split(":", 1)[0].strip().lower() == key:
            return no
    return None


def parse_scenario(text: str, name: str = "<scenario>") -> ScenarioFile:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=name)
    except configparser.Error as exc:
        raise ScenarioError(f"{name}: {exc}") from None

    values = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ScenarioError(f"{name}: unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ScenarioError(f"{name}, line {_line_of(text, section, key)}: unknown key {key!r} in [{section}]")
            values[section][key] = value

    def get(section, key, conv):
        raw = values[section][key]
        try:
            return conv(raw)
        except ValueError as exc:
            line = _line_of(text, section, key)
            where = f"line {line}" if line else "default"
            raise ScenarioError(f"{name}, {where}: bad value for {section}.{key}: {raw!r} ({exc})") from None

    def floats(raw):
        return [float(v) for v in raw.split(",") if v.strip()]

    def ints(raw):
        return [int(v) for v in raw.split(",") if v.strip()]

    def boolean(raw):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected true/false")

    lam_db = get("channel", "pdp_ratio_db", float)
    try:
        channel = ChannelConfig(
            num_users=get("channel", "num_users", int),
            num_paths=get("channel", "num_paths", int),
            pdp_ratio=db_to_linear(lam_db),
            distance_range=(get("channel", "distance_min", float), get("channel", "distance_max", float)),
            path_gain_scale=get("channel", "path_gain_scale", float),
        )
        game = GameParams(
            total_bits=get("game", "total_bits", int),
            info_bits=get("game", "info_bits", int),
            rate=get("game", "rate_kbps", float) * 1e3,
            noise_power=get("game", "noise_power", float),
            p_max=get("game", "p_max", float),
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"{name}: {exc}") from None

    scen = ScenarioFile(
        channel=channel,
        game=game,
        finger_fractions=get("rake", "finger_fractions", floats),
        chips_per_frame=get("rake", "chips_per_frame", ints),
        processing_gains=get("rake", "processing_gains", ints),
        fractional_frames=get("rake", "fractional_frames", boolean),
        n_realizations=get("run", "n_realizations", int),
        seed=get("run", "seed", int),
        pdp_ratio_db=lam_db,
        source=values,
    )
    if not scen.finger_fractions or any(not 0 < r <= 1 for r in scen.finger_fractions):
        raise ScenarioError(f"{name}: finger_fractions must be in (0, 1]")
    if not scen.chips_per_frame or any(n < 1 for n in scen.chips_per_frame):
        raise ScenarioError(f"{name}: chips_per_frame must be positive integers")
    if not scen.processing_gains or any(n < 1 for n in scen.processing_gains):
        raise ScenarioError(f"{name}: processing_gains must be positive integers")
    if scen.n_realizations < 1:
        raise ScenarioError(f"{name}: n_realizations must be positive")
    return scen


def load_scenario(path: str) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(str(exc)) from None
    return parse_scenario(text, path)
