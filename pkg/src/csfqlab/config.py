"""Device configuration files and observation tables.

Config files are JSON with the unit spelled out in every numeric key. The
numbers are kept exactly as written in the file; conversion to SI happens
only in :meth:`DeviceConfig.to_params`, so load -> save -> load is lossless.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import List, Optional

from csfqlab.constants import GHz, MHz, fF, kHz, uA
from csfqlab.fitting import TransitionObservation
from csfqlab.model import DEFAULT_CUTOFF, CavityParams, DeviceParams, ModelError

CONFIG_ENV = "CSFQLAB_CONFIG"
DEFAULT_CONFIG_NAME = "paper-csfq.json"
DEFAULT_POINTS_NAME = "paper-points.csv"


class ConfigError(ValueError):
    pass


@dataclass
class DeviceSection:
    i0_uA: float
    alpha: float
    cs_fF: float
    cj_fF: float
    ng1: float = 0.0
    ng2: float = 0.0


@dataclass
class CavitySection:
    f_cav_GHz: float
    g_over_2pi_MHz: float
    kappa_over_2pi_kHz: float
    cqr_fF: float = 0.0
    cc_fF: float = 0.0


@dataclass
class DeviceConfig:
    name: str
    device: DeviceSection
    cavity: Optional[CavitySection] = None
    charge_cutoff: int = DEFAULT_CUTOFF
    notes: List[str] = field(default_factory=list)

    def to_params(self) -> DeviceParams:
        d = self.device
        cav = None
        if self.cavity is not None:
            c = self.cavity
            cav = CavityParams(
                omega_cav=2 * math.pi * c.f_cav_GHz * GHz,
                g=2 * math.pi * c.g_over_2pi_MHz * MHz,
                kappa=2 * math.pi * c.kappa_over_2pi_kHz * kHz,
                Cqr=c.cqr_fF * fF,
                Cc=c.cc_fF * fF,
            )
        return DeviceParams(d.i0_uA * uA, d.alpha, d.cs_fF * fF, d.cj_fF * fF, d.ng1, d.ng2, cav)

    def with_params(self, params: DeviceParams, note: Optional[str] = None) -> "DeviceConfig":
        """Copy of this config carrying `params` (cavity section unchanged)."""
        device = DeviceSection(
            params.I0 / uA, params.alpha, params.Cs / fF, params.Cj / fF, params.ng1, params.ng2
        )
        notes = list(self.notes) + ([note] if note else [])
        return DeviceConfig(self.name, device, self.cavity, self.charge_cutoff, notes)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "charge_cutoff": self.charge_cutoff,
            "device": asdict(self.device),
        }
        if self.cavity is not None:
            out["cavity"] = asdict(self.cavity)
        out["notes"] = list(self.notes)
        return out


def _section(cls, raw, where):
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object")
    known = set(cls.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        values = {k: float(v) for k, v in raw.items()}
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{where}: non-numeric value ({exc})") from None


def config_from_dict(raw: dict) -> DeviceConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    if "device" not in raw:
        raise ConfigError("config is missing the 'device' section")
    cfg = DeviceConfig(
        name=str(raw.get("name", "unnamed")),
        device=_section(DeviceSection, raw["device"], "device"),
        cavity=_section(CavitySection, raw["cavity"], "cavity") if raw.get("cavity") is not None else None,
        charge_cutoff=int(raw.get("charge_cutoff", DEFAULT_CUTOFF)),
        notes=[str(n) for n in raw.get("notes", [])],
    )
    if cfg.charge_cutoff < 2:
        raise ConfigError(f"charge_cutoff must be at least 2, got {cfg.charge_cutoff}")
    try:
        cfg.to_params()
    except ModelError as exc:
        raise ConfigError(f"invalid device parameters: {exc}") from None
    return cfg


def load_config(path=None) -> DeviceConfig:
    """Load a config from `path`, the $CSFQLAB_CONFIG file, or the packaged default."""
    text = read_config_text(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(raw)


def read_config_text(path=None) -> str:
    path = path or os.environ.get(CONFIG_ENV)
    if path is None:
        return resources.files("csfqlab.data").joinpath(DEFAULT_CONFIG_NAME).read_text()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return p.read_text()


def config_hash(path=None) -> str:
    return hashlib.sha256(read_config_text(path).encode()).hexdigest()


def dump_config(cfg: DeviceConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def save_config(cfg: DeviceConfig, path) -> None:
    Path(path).write_text(dump_config(cfg))


def default_points_path() -> Path:
    return Path(str(resources.files("csfqlab.data").joinpath(DEFAULT_POINTS_NAME)))


def load_observations(path) -> List[TransitionObservation]:
    """Read observations from CSV with header flux_Phi0,i,j,freq_GHz[,weight]."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"observation file not found: {p}")
    out = []
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        required = ["flux_Phi0", "i", "j", "freq_GHz"]
        if header is None or [h.strip() for h in header[:4]] != required:
            raise ConfigError(f"{p}: line 1: expected header {','.join(required)}[,weight]")
        has_weight = len(header) > 4 and header[4].strip() == "weight"
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                if len(row) < 4 or (len(row) > 4 and not has_weight) or len(row) > 5:
                    raise ValueError(f"expected {5 if has_weight else 4} fields, got {len(row)}")
                weight = float(row[4]) if has_weight and len(row) == 5 else 1.0
                out.append(
                    TransitionObservation(
                        float(row[0]), int(row[1]), int(row[2]), float(row[3]) * GHz, weight
                    )
                )
            except ValueError as exc:
                raise ConfigError(f"{p}: line {lineno}: {exc}") from None
    if not out:
        raise ConfigError(f"{p}: no observations")
    return out
