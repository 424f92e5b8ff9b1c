"""Plain-text experiment configuration files.

Schema: one ``key = value`` pair per line, ``#`` starts a comment (full-line
or trailing), keys are case-insensitive and may appear at most once.

====================  =======================================================
key                   value
====================  =======================================================
flux                  burgers | exp
profile               comma-separated pieces, each width:value for a constant
                      piece or width:left:right for a linear one, widths
                      summing to the period, mean zero
period                positive real
ul, ur                mean states left/right of the jump
ubar                  single mean state, shorthand for ul = ur (periodic
                      mode); mutually exclusive with ul/ur
delta                 front-tracking flux resolution, positive real
solver                oracle | fronttrack | both
t_min, t_max          geometric time sweep endpoints, 0 < t_min < t_max
t_count               number of sweep samples, >= 2
out                   output directory for emitted reports
====================  =======================================================

Keys left out fall back to the ExperimentConfig defaults.
"""

from __future__ import annotations

from .experiments import ExperimentConfig, ExperimentError


class ConfigError(ExperimentError):
    pass


_SCALARS = {"period", "ul", "ur", "ubar", "delta", "t_min", "t_max"}


def parse_pieces(text: str) -> tuple:
    pieces = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ConfigError("empty profile piece")
        parts = chunk.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(
                f"profile piece {chunk!r}: expected width:value or width:left:right"
            )
        try:
            pieces.append(tuple(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"profile piece {chunk!r}: {exc}") from exc
    if not pieces:
        raise ConfigError("profile must list at least one piece")
    return tuple(pieces)


def parse_config_text(text: str) -> dict:
    """Raw key -> string mapping with syntax and duplicate checks."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def config_from_mapping(raw: dict) -> ExperimentConfig:
    known = {"flux", "profile", "solver", "out", "t_count"} | _SCALARS
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}")
    if "ubar" in raw and ("ul" in raw or "ur" in raw):
        raise ConfigError("ubar is mutually exclusive with ul/ur")
    kwargs: dict = {}
    if "flux" in raw:
        kwargs["flux_name"] = raw["flux"]
    if "profile" in raw:
        kwargs["pieces"] = parse_pieces(raw["profile"])
    if "solver" in raw:
        kwargs["solver"] = raw["solver"]
    if "out" in raw:
        kwargs["out_dir"] = raw["out"]
    for key in _SCALARS & raw.keys():
        try:
            val = float(raw[key])
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from exc
        if key == "ubar":
            kwargs["ul"] = kwargs["ur"] = val
        else:
            kwargs[key] = val
    if "t_count" in raw:
        try:
            kwargs["t_count"] = int(raw["t_count"])
        except ValueError as exc:
            raise ConfigError(f"key 't_count': {exc}") from exc
    try:
        return ExperimentConfig(**kwargs)
    except ExperimentError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(
    path: str,
    solver: str | None = None,
    delta: float | None = None,
    out_dir: str | None = None,
) -> ExperimentConfig:
    """Parse a config file, applying CLI-style overrides on top."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    raw = parse_config_text(text)
    if solver is not None:
        raw["solver"] = solver
    if delta is not None:
        raw["delta"] = repr(float(delta))
    if out_dir is not None:
        raw["out"] = out_dir
    return config_from_mapping(raw)
