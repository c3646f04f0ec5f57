"""Flat, strictly typed ``key = value`` run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

KINDS = ("eigen", "vqu", "evolve", "noise", "bh-profile", "bh-minmass")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Configuration does not satisfy the schema."""


def _choice(*options):
    def parse(raw):
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return raw
    parse.__name__ = "|".join(options)
    return parse


def _bool(raw):
    if isinstance(raw, bool):
        return raw
    low = str(raw).lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError("expected true or false")


def _int(raw):
    if isinstance(raw, bool):
        raise ValueError("expected an integer")
    if isinstance(raw, int):
        return raw
    return int(str(raw), 10)


def _float(raw):
    if isinstance(raw, bool):
        raise ValueError("expected a number")
    return float(raw)


_bool.__name__, _int.__name__, _float.__name__ = "bool", "int", "float"

COMMON = {
    "kind": (_choice(*KINDS), None),
    "output_dir": (str, "qhydro-out"),
    "format": (_choice(*FORMATS), "csv"),
    "gnuplot": (_bool, False),
}

SCHEMAS: Dict[str, Dict[str, tuple]] = {
    "eigen": {
        "potential": (_choice("harmonic", "box"), "harmonic"),
        "mass": (_float, 1.0),
        "omega": (_float, 1.0),
        "hbar": (_float, 1.0),
        "width": (_float, 1.0),
        "x_min": (_float, -10.0),
        "x_max": (_float, 10.0),
        "n_points": (_int, 2001),
        "n_max": (_int, 5),
        "extrapolate": (_bool, True),
        "tolerance": (_float, 1e-6),
    },
    "vqu": {
        "profile": (_choice("gaussian", "cosine", "oscillator"), "gaussian"),
        "convention": (_choice("nonrel", "rel_static"), "nonrel"),
        "mass": (_float, 1.0),
        "hbar": (_float, 1.0),
        "sigma": (_float, 1.0),
        "wavelength": (_float, 1.0),
        "state": (_int, 0),
        "x_min": (_float, -5.0),
        "x_max": (_float, 5.0),
        "n_points": (_int, 1001),
    },
    "evolve": {
        "initial": (_choice("gaussian", "ground"), "gaussian"),
        "mass": (_float, 1.0),
        "hbar": (_float, 1.0),
        "omega": (_float, 1.0),
        "sigma0": (_float, 1.0),
        "x_min": (_float, -60.0),
        "x_max": (_float, 60.0),
        "n_points": (_int, 4096),
        "dt": (_float, 0.005),
        "steps": (_int, 1000),
        "record_every": (_int, 100),
    },
    "noise": {
        "lambda_c": (_float, 1.0),
        "n_samples": (_int, 1000),
        "seed": (_int, 42),
        "x_span": (_float, 40.0),
        "n_points": (_int, 1024),
        "amplitude": (_float, 1.0),
        "width_tolerance": (_float, 0.05),
    },
    "bh-profile": {
        "units": (_choice("natural", "SI"), "natural"),
        "mass": (_float, None),
        "mass_excess": (_float, 0.05),
        "correction": (_bool, True),
        "r_min": (_float, None),
        "r_max": (_float, None),
        "n_points": (_int, 8001),
        "horizon_margin": (_float, 2.0),
    },
    "bh-minmass": {
        "units": (_choice("natural", "SI"), "natural"),
        "tol": (_float, 1e-10),
        "r0_factor": (_float, 2.0),
    },
}


@dataclass
class RunConfig:
    kind: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    output_dir: Path = Path("qhydro-out")
    format: str = "csv"
    gnuplot: bool = False

    def resolved(self) -> Dict[str, Any]:
        """Full configuration echo including defaults."""
        out = {"kind": self.kind, "output_dir": str(self.output_dir), "format": self.format,
               "gnuplot": self.gnuplot}
        out.update(self.parameters)
        return out


def parse_text(text: str) -> Dict[str, str]:
    """Split ``key = value`` lines; ``#`` starts a comment."""
    items: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in items:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        items[key] = value
    return items


def build_config(kind: str, raw: Dict[str, Any]) -> RunConfig:
    """Type-check ``raw`` against the schema for ``kind``; unknown keys are errors."""
    if kind not in SCHEMAS:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    if "kind" in raw and raw["kind"] != kind:
        raise ConfigError(f"config is for kind {raw['kind']!r}, not {kind!r}")
    schema = SCHEMAS[kind]
    unknown = sorted(set(raw) - set(schema) - set(COMMON))
    if unknown:
        raise ConfigError(f"unknown keys for {kind}: {', '.join(unknown)}")

    def convert(key, spec):
        parser, default = spec
        if key not in raw:
            return default
        try:
            return parser(raw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc} (got {raw[key]!r}, want {parser.__name__})") from None

    common = {k: convert(k, spec) for k, spec in COMMON.items()}
    params = {k: convert(k, spec) for k, spec in schema.items()}
    return RunConfig(kind, params, Path(common["output_dir"]), common["format"], common["gnuplot"])


def load_config(kind: str, path: Optional[Path] = None) -> RunConfig:
    raw = parse_text(Path(path).read_text(encoding="utf-8")) if path else {}
    return build_config(kind, raw)
