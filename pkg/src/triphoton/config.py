"""Flat key=value configuration with explicit unit suffixes.

Frequencies are written in linear units (MHz, GHz, ...) and converted to
angular rad/s at parse time; temperatures in C are converted to kelvin;
lengths, powers and times accept metric suffixes.  Unknown keys are a hard
error.  An empty file resolves to the full default parameter set (the
reference triphoton configuration).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from math import pi

from .errors import ConfigError
from .params import (DecayRates, DriveFields, VaporCell, ExperimentParams)
from .susceptibility import VelocityQuadrature
from .eventsim import SourceConfig

TWO_PI = 2.0 * pi

_FREQ = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
_TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12,
         "min": 60.0, "h": 3600.0}
_LENGTH = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}
_POWER = {"W": 1.0, "mW": 1e-3, "uW": 1e-6}
_RATE = {"/s": 1.0, "/min": 1.0 / 60.0, "/h": 1.0 / 3600.0, "Hz": 1.0}
_DENSITY = {"m^-3": 1.0, "cm^-3": 1e6}


def _with_unit(text, table, key):
    parts = text.split()
    if len(parts) != 2 or parts[1] not in table:
        raise ConfigError(
            f"expected '<number> <unit>' with unit in {sorted(table)}", key=key)
    try:
        return float(parts[0]) * table[parts[1]]
    except ValueError:
        raise ConfigError(f"bad number {parts[0]!r}", key=key)


def _parse_freq(text, key):
    """Linear frequency with unit -> angular rad/s (the x2pi convention)."""
    return TWO_PI * _with_unit(text, _FREQ, key)


def _parse_time(text, key):
    return _with_unit(text, _TIME, key)


def _parse_length(text, key):
    return _with_unit(text, _LENGTH, key)


def _parse_power(text, key):
    if text.lower() == "none":
        return None
    return _with_unit(text, _POWER, key)


def _parse_rate(text, key):
    return _with_unit(text, _RATE, key)


def _parse_density(text, key):
    return _with_unit(text, _DENSITY, key)


def _parse_temperature(text, key):
    parts = text.split()
    if len(parts) != 2 or parts[1] not in ("C", "K"):
        raise ConfigError("expected '<number> C' or '<number> K'", key=key)
    try:
        val = float(parts[0])
    except ValueError:
        raise ConfigError(f"bad number {parts[0]!r}", key=key)
    return val + 273.15 if parts[1] == "C" else val


def _parse_int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected integer, got {text!r}", key=key)


def _parse_float(text, key):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected number, got {text!r}", key=key)


def _choice(*options):
    def parse(text, key):
        if text not in options:
            raise ConfigError(f"expected one of {options}, got {text!r}", key=key)
        return text
    return parse


# key -> (parser, default-as-written).  The written defaults are the
# documented configuration; print-defaults dumps exactly this table.
REGISTRY = {
    # vapor cell
    "temperature": (_parse_temperature, "80 C"),
    "cell_length": (_parse_length, "7 cm"),
    "density": (_parse_density, "1.2e11 cm^-3"),
    # decay rates (linear frequency; x2pi applied on parse)
    "gamma31": (_parse_freq, "6 MHz"),
    "gamma41": (_parse_freq, "6 MHz"),
    "gamma21": (_parse_freq, "1.2 MHz"),
    "gamma11": (_parse_freq, "2.4 MHz"),
    "gamma22": (_parse_freq, "2.4 MHz"),
    "gamma42": (_parse_freq, "6 MHz"),
    # drive fields
    "delta1": (_parse_freq, "-2 GHz"),
    "delta2": (_parse_freq, "-150 MHz"),
    "delta3": (_parse_freq, "50 MHz"),
    "omega1": (_parse_freq, "300 MHz"),
    "omega2": (_parse_freq, "870 MHz"),
    "omega3": (_parse_freq, "533 MHz"),
    "power1": (_parse_power, "none"),
    "power2": (_parse_power, "none"),
    "power3": (_parse_power, "none"),
    # numerics
    "quad_scheme": (_choice("uniform-riemann", "gauss-hermite"), "uniform-riemann"),
    "quad_nodes": (_parse_int, "2001"),
    "quad_range_sigmas": (_parse_float, "6.0"),
    "spectral_n2": (_parse_int, "512"),
    "spectral_n3": (_parse_int, "512"),
    "spectral_linewidth_multiple": (_parse_float, "8.0"),
    "spectral_pad_fraction": (_parse_float, "0.25"),
    "tau_max": (_parse_time, "20 ns"),
    "tau_points": (_parse_int, "128"),
    "map_range": (_parse_freq, "3 GHz"),
    "map_n2": (_parse_int, "256"),
    "map_n3": (_parse_int, "256"),
    "phase_convention": (_choice("si-eq-s8", "main-text"), "si-eq-s8"),
    "group_delay_mode": (_choice("local", "central"), "local"),
    "dispersion": (_choice("on", "off"), "off"),
    "taper_fraction": (_parse_float, "0"),
    # simulation
    "triplet_rate": (_parse_rate, "102 /min"),
    "singles_rate_ch1": (_parse_rate, "800 /s"),
    "singles_rate_ch2": (_parse_rate, "800 /s"),
    "singles_rate_ch3": (_parse_rate, "800 /s"),
    "singles_rate_ch4": (_parse_rate, "800 /s"),
    "dark_rate_ch1": (_parse_rate, "200 /s"),
    "dark_rate_ch2": (_parse_rate, "200 /s"),
    "dark_rate_ch3": (_parse_rate, "200 /s"),
    "dark_rate_ch4": (_parse_rate, "200 /s"),
    "dual_pair_rate": (_parse_rate, "1000 /s"),
    "dual_pair_delay": (_parse_time, "1 us"),
    "efficiency_ch1": (_parse_float, "1.0"),
    "efficiency_ch2": (_parse_float, "1.0"),
    "efficiency_ch3": (_parse_float, "1.0"),
    "efficiency_ch4": (_parse_float, "1.0"),
    "fiber_coupling": (_parse_float, "1.0"),
    "jitter_sigma": (_parse_time, "0 ps"),
    "duration": (_parse_time, "3600 s"),
    "seed": (_parse_int, "20240817"),
    # analysis
    "window": (_parse_time, "195 ns"),
    "bin": (_parse_time, "0.25 ns"),
    "delay_offset": (_parse_time, "150 ns"),
    "method": (_choice("direct", "delayed"), "direct"),
    "peak_rebin": (_parse_int, "8"),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration (SI values, angular frequencies)."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def experiment_params(self) -> ExperimentParams:
        v = self.values
        rates = DecayRates(gamma31=v["gamma31"], gamma41=v["gamma41"],
                           gamma21=v["gamma21"], gamma11=v["gamma11"],
                           gamma22=v["gamma22"], gamma42=v["gamma42"])
        drive = DriveFields(delta1=v["delta1"], delta2=v["delta2"],
                            delta3=v["delta3"], omega1=v["omega1"],
                            omega2=v["omega2"], omega3=v["omega3"],
                            power1=v["power1"], power2=v["power2"],
                            power3=v["power3"])
        cell = VaporCell(temperature=v["temperature"], length_L=v["cell_length"],
                         density_N=v["density"])
        return ExperimentParams(cell=cell, rates=rates, drive=drive)

    def quadrature(self) -> VelocityQuadrature:
        v = self.values
        return VelocityQuadrature(scheme=v["quad_scheme"],
                                  node_count=v["quad_nodes"],
                                  range_sigmas=v["quad_range_sigmas"])

    def source_config(self, duration=None, seed=None) -> SourceConfig:
        v = self.values
        dual = ()
        if v["dual_pair_rate"] > 0:
            dual = (((1, 2), (2, 3), v["dual_pair_rate"], v["dual_pair_delay"]),)
        return SourceConfig(
            triplet_rate=v["triplet_rate"],
            singles_rate=tuple(v[f"singles_rate_ch{c}"] for c in (1, 2, 3, 4)),
            dual_pair_rates=dual,
            dark_rate=tuple(v[f"dark_rate_ch{c}"] for c in (1, 2, 3, 4)),
            detector_efficiency=tuple(v[f"efficiency_ch{c}"] for c in (1, 2, 3, 4)),
            fiber_coupling=v["fiber_coupling"],
            jitter_sigma=v["jitter_sigma"],
            duration=v["duration"] if duration is None else duration,
            seed=v["seed"] if seed is None else seed,
        )


def default_config() -> RunConfig:
    values = {k: parser(text, k) for k, (parser, text) in REGISTRY.items()}
    return RunConfig(values=values)


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    values = {k: parser(default, k) for k, (parser, default) in REGISTRY.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' in {source}",
                              key=line, line=lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in REGISTRY:
            raise ConfigError(f"unknown key in {source}", key=key, line=lineno)
        parser, _ = REGISTRY[key]
        try:
            values[key] = parser(val, key)
        except ConfigError as exc:
            raise ConfigError(f"{exc.args[0]} in {source}", key=key,
                              line=lineno) from None
    return RunConfig(values=values)


def parse_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config_text(fh.read(), source=str(path))


def dump_defaults() -> str:
    lines = ["# fully resolved default configuration",
             "# frequencies are linear and multiplied by 2*pi on parse; "
             "temperatures in C are converted to K"]
    lines += [f"{k} = {default}" for k, (_, default) in REGISTRY.items()]
    return "\n".join(lines) + "\n"
