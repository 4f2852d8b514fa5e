"""Run configuration: INI-style text parsed into validated run descriptions.

One section per command (``[potential]``, ``[groundstate]``, ``[dynamics]``,
``[reproduce-table]``) with ``key = value`` lines.  Parsing applies module
defaults, rejects unknown keys, and names the offending key in every error.
Grid and kernel objects are constructed eagerly so their own invariants
(even point counts, epsilon requirements) are enforced before any compute
starts.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

from .grid import UniformGrid, make_grid
from .kernels import FAMILIES, KernelSpec

__all__ = ["RunConfig", "parse_config", "ConfigError"]


class ConfigError(ValueError):
    """Invalid run configuration text."""


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text):
    return tuple(float(t) for t in text.replace(",", " ").split())


_REQUIRED = object()

# key -> (converter, default); _REQUIRED marks keys the section must set.
_COMMON = {
    "kernel": (str, _REQUIRED),
    "epsilon": (float, None),
    "L": (float, _REQUIRED),
    "N": (int, _REQUIRED),
    "gamma": (float, 1.0),
    "method": (str, "nufft"),
    "tol": (float, None),
}

_SCHEMAS = {
    "potential": dict(_COMMON, sigma=(float, _REQUIRED)),
    "groundstate": dict(
        _COMMON,
        beta=(float, _REQUIRED),
        trap=(str, "harmonic"),
        trap_omegas=(_parse_floats, None),
        tau=(float, 1e-2),
        eps0=(float, 1e-10),
        ladder=(_parse_bool, True),
    ),
    "dynamics": dict(
        _COMMON,
        kernel=(str, None),
        beta=(float, 0.0),
        tau=(float, _REQUIRED),
        t_end=(float, _REQUIRED),
        order=(int, 2),
        trap=(str, "none"),
        trap_omegas=(_parse_floats, None),
        psi0_width=(float, 1.0),
        sample_every=(int, 0),
        snapshots=(_parse_floats, ()),
    ),
    "reproduce-table": {
        "table": (int, _REQUIRED),
        "full": (_parse_bool, False),
    },
}

_DEFAULT_TOL = {"potential": 1e-14, "groundstate": 1e-12, "dynamics": 1e-12}

_METHODS = {
    "potential": ("nufft", "nufft-full", "nufft-patch", "nufft-cached",
                  "dst", "fft", "fdm"),
    "groundstate": ("nufft", "dst", "fft"),
    "dynamics": ("nufft", "dst", "fft"),
}


@dataclass
class RunConfig:
    """A validated run: the command, its typed options, and built objects."""

    command: str
    options: dict
    grid: UniformGrid | None = None
    kernel: KernelSpec | None = None
    text: str = ""

    def echo(self):
        """Configuration echo for the run manifest."""
        lines = [f"[{self.command}]"]
        for key, val in sorted(self.options.items()):
            if isinstance(val, tuple):
                val = " ".join(repr(v) for v in val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines)


def _convert(section, key, conv, raw):
    try:
        return conv(raw)
    except (TypeError, ValueError):
        wanted = {float: "float", int: "int", str: "string",
                  _parse_bool: "boolean",
                  _parse_floats: "list of floats"}.get(conv, "value")
        raise ConfigError(
            f"key '{key}' in [{section}]: expected {wanted}, got {raw!r}"
        ) from None


def _build_grid(command, opts, dim):
    gamma = opts.get("gamma", 1.0)
    if not gamma >= 1.0:
        raise ConfigError(f"key 'gamma' in [{command}]: must be >= 1")
    L, N = opts["L"], opts["N"]
    halfwidth = (L,) * (dim - 1) + (L / gamma,)
    try:
        return make_grid(dim, halfwidth, (N,) * dim)
    except ValueError as exc:
        raise ConfigError(f"in [{command}]: {exc}") from None


def parse_config(text):
    """Parse configuration text into a RunConfig.

    Raises ConfigError naming the section and key for every problem:
    unknown section or key, type mismatch, or missing required key.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    sections = parser.sections()
    known = sorted(_SCHEMAS)
    if len(sections) != 1:
        raise ConfigError(
            f"config must have exactly one of the sections {known}, "
            f"found {sections or 'none'}")
    command = sections[0]
    if command not in _SCHEMAS:
        raise ConfigError(f"unknown section [{command}]; expected one of {known}")
    schema = _SCHEMAS[command]

    opts = {}
    for key, raw in parser.items(command):
        if key not in schema:
            raise ConfigError(f"unknown key '{key}' in [{command}]")
        conv, _ = schema[key]
        opts[key] = _convert(command, key, conv, raw)
    for key, (_, default) in schema.items():
        if key in opts:
            continue
        if default is _REQUIRED:
            raise ConfigError(f"missing required key '{key}' in [{command}]")
        opts[key] = default

    grid = kernel = None
    if command == "reproduce-table":
        from . import tables
        if opts["table"] not in tables.TABLE_IDS:
            raise ConfigError(
                f"key 'table' in [reproduce-table]: unknown table "
                f"{opts['table']}; known ids {sorted(tables.TABLE_IDS)}")
    else:
        if opts.get("tol") is None:
            opts["tol"] = _DEFAULT_TOL[command]
        if opts["method"] not in _METHODS[command]:
            raise ConfigError(
                f"key 'method' in [{command}]: unknown method "
                f"{opts['method']!r}; choices {_METHODS[command]}")
        if opts.get("kernel") is not None:
            if opts["kernel"] not in FAMILIES:
                raise ConfigError(
                    f"key 'kernel' in [{command}]: unknown kernel family "
                    f"{opts['kernel']!r}")
            try:
                kernel = KernelSpec(opts["kernel"], opts.get("epsilon"))
            except ValueError as exc:
                raise ConfigError(f"in [{command}]: {exc}") from None
        elif command != "dynamics":
            raise ConfigError(f"missing required key 'kernel' in [{command}]")
        elif opts["beta"] != 0.0:
            raise ConfigError(
                f"in [dynamics]: beta != 0 requires an interaction kernel")
        if kernel is not None:
            grid = _build_grid(command, opts, kernel.dim)
        else:
            grid = _build_grid(command, opts, 2)
        if command == "groundstate" and opts["trap"] != "harmonic":
            raise ConfigError(
                f"key 'trap' in [groundstate]: only 'harmonic' is supported")
        if command == "dynamics" and opts["trap"] not in ("none", "harmonic",
                                                          "honeycomb"):
            raise ConfigError(
                f"key 'trap' in [dynamics]: choices are none, harmonic, "
                f"honeycomb")
        omegas = opts.get("trap_omegas")
        if omegas is not None and len(omegas) != grid.dim:
            raise ConfigError(
                f"key 'trap_omegas' in [{command}]: expected {grid.dim} "
                f"values, got {len(omegas)}")
    return RunConfig(command=command, options=opts, grid=grid, kernel=kernel,
                     text=text)
