"""Experiment configuration: strict JSON schema, presets and canonical form."""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..analysis.ber import DEFAULT_SYMBOLS_PER_FRAME, REFERENCE_N_SYMBOLS
from ..analysis.distance import MAX_SEARCH_LENGTH
from ..framing import FrameLayout, make_mux, otdm_mux
from ..receiver import ReceiverConfig
from ..signal_core import DEFAULT_SAMPLES_PER_PERIOD, SequenceSpec


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SequenceSection(_Strict):
    n_lines: int = Field(4, ge=2)
    line_spacing: float = Field(10e9, gt=0)


class MuxSection(_Strict):
    tau: float = Field(0.8, gt=0, le=1)
    n_branches: Optional[int] = Field(None, ge=1)


class ReceiverSection(_Strict):
    response: Literal["identity", "ideal_lowpass"] = "identity"
    cutoff: Optional[float] = Field(None, gt=0)
    window_length: Optional[float] = Field(None, gt=0)
    epsilon: float = Field(0.0, ge=0, lt=1)


class ChannelSection(_Strict):
    ebn0_db: list[float] = Field(default_factory=lambda: [float(x) for x in range(0, 11)])
    master_seed: int = Field(0, ge=0, lt=2**64)


class RunSection(_Strict):
    n_symbols: int = Field(100_000, ge=1)
    samples_per_period: int = Field(DEFAULT_SAMPLES_PER_PERIOD, ge=4)
    symbols_per_frame: int = Field(DEFAULT_SYMBOLS_PER_FRAME, ge=3)
    modes: list[Literal["otdm", "notdm"]] = Field(default_factory=lambda: ["otdm", "notdm"])
    bits_per_symbol: int = Field(1, ge=1)
    n_periods: int = Field(2, ge=1)
    spectrum: bool = True
    dmin_length: int = Field(6, ge=1, le=MAX_SEARCH_LENGTH)
    dmin_taus: list[float] = Field(default_factory=lambda: [1.0, 0.9, 0.8])
    isi_symbols: int = Field(20_000, ge=1000)

    @field_validator("modes")
    @classmethod
    def _unique_modes(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("modes must not repeat")
        return v


class PowerSection(_Strict):
    p_s: float = Field(ge=0)
    p_n: float = Field(gt=0)
    p_isi: Optional[float] = Field(None, ge=0)
    estimate_isi: bool = False


class ExperimentConfig(_Strict):
    sequence: SequenceSection = SequenceSection()
    mux: MuxSection = MuxSection()
    receiver: ReceiverSection = ReceiverSection()
    channel: ChannelSection = ChannelSection()
    run: RunSection = RunSection()
    power: Optional[PowerSection] = None

    @model_validator(mode="after")
    def _revalidate(self):
        # surface module-level invariants at load time
        spec = self.sequence_spec()
        make_mux(spec, self.mux.tau, self.mux.n_branches)
        self.receiver_config()
        for tau in self.run.dmin_taus:
            make_mux(spec, tau)
        n = self.run.symbols_per_frame
        FrameLayout(spec, otdm_mux(spec), n, self.run.samples_per_period)
        if self.run.n_periods % 2 and spec.n_lines % 2 == 0 and self.run.spectrum:
            raise ValueError("even N needs an even n_periods for the spectrum to resolve its lines")
        return self

    def sequence_spec(self) -> SequenceSpec:
        return SequenceSpec(self.sequence.n_lines, self.sequence.line_spacing)

    def notdm_mux(self):
        return make_mux(self.sequence_spec(), self.mux.tau, self.mux.n_branches)

    def receiver_config(self) -> ReceiverConfig:
        r = self.receiver
        return ReceiverConfig(r.response, r.cutoff, r.window_length, r.epsilon)

    def canonical(self) -> dict:
        return self.model_dump(mode="json")

    def canonical_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True, indent=2) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


PRESETS: dict[str, dict] = {
    "paper": {
        "sequence": {"n_lines": 4, "line_spacing": 10e9},
        "mux": {"tau": 0.8, "n_branches": 5},
        "channel": {"ebn0_db": [float(x) for x in range(0, 15)], "master_seed": 1975},
        "run": {"n_symbols": REFERENCE_N_SYMBOLS, "modes": ["otdm", "notdm"]},
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"  {loc}: {e['msg']}")
    return "invalid configuration:\n" + "\n".join(lines)


def build_config(data: dict | None = None, preset: str | None = None) -> ExperimentConfig:
    """Validate ``data`` (layered over ``preset`` when given)."""
    raw: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        raw = copy.deepcopy(PRESETS[preset])
    if data is not None:
        if not isinstance(data, dict):
            raise ConfigError("configuration root must be a JSON object")
        raw = _merge(raw, data)
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as err:
        raise ConfigError(_format_errors(err)) from None
    except ValueError as err:
        raise ConfigError(f"invalid configuration: {err}") from None


def load_config(path: str | Path | None = None, preset: str | None = None) -> ExperimentConfig:
    if path is None and preset is None:
        raise ConfigError("give --config and/or --preset")
    data = None
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"config {path} is not valid JSON: {err}") from None
    return build_config(data, preset)
