"""Result envelopes and their JSON / CSV serialisation.

JSON envelopes have the top-level keys ``config``, ``meta``, ``payload`` and
``validation``. Spectrum CSV files start with a block of ``# key: value``
metadata lines followed by the header ``axis_name,axis_value,rate`` (plus
``std_error`` for Monte-Carlo sweeps). A sweep over several beta values
numbers the columns ``rate_0, rate_1, ...`` (and ``std_error_0, ...``) in the
order listed by the ``# betas:`` metadata line.
"""
from __future__ import annotations

import datetime as _dt
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .config import RunConfig
from .core import ValidationReport

FORMATS = ("json", "csv")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class ResultEnvelope:
    command: str
    config: RunConfig
    payload: dict
    validation: ValidationReport
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    )

    def meta(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "timestamp": self.timestamp,
            "config_hash": self.config.config_hash(),
            "seed": self.config.mc.seed,
            "override_validation": self.config.validation.override,
        }

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "meta": self.meta(),
            "payload": self.payload,
            "validation": self.validation.to_dict(),
        }


def envelope_json(env: ResultEnvelope) -> str:
    return json.dumps(env.to_dict(), indent=2, allow_nan=False) + "\n"


def _meta_lines(env: ResultEnvelope, extra: dict) -> list[str]:
    meta = {
        "command": env.command,
        "version": __version__,
        "config_hash": env.config.config_hash(),
        "seed": env.config.mc.seed,
        **extra,
    }
    if not env.validation.ok:
        meta["validation"] = "failed: " + ",".join(env.validation.codes())
    return [f"# {k}: {v}" for k, v in meta.items()]


def spectrum_csv(env: ResultEnvelope) -> str:
    p = env.payload
    betas = p["betas"]
    has_err = p.get("std_errors") is not None
    multi = len(betas) > 1
    lines = _meta_lines(env, {
        "mode": p["mode"],
        "betas": ", ".join(fmt_float(b) for b in betas),
    })
    if multi:
        header = ["axis_name", "axis_value"] + [f"rate_{k}" for k in range(len(betas))]
        if has_err:
            header += [f"std_error_{k}" for k in range(len(betas))]
    else:
        header = ["axis_name", "axis_value", "rate"] + (["std_error"] if has_err else [])
    lines.append(",".join(header))
    for row, value in enumerate(p["values"]):
        cells = [p["axis"], fmt_float(value)]
        cells += [fmt_float(r[row]) for r in p["rates"]]
        if has_err:
            cells += [fmt_float(e[row]) for e in p["std_errors"]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _flatten(prefix: str, value, out: list) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(value, (list, tuple)):
        for k, v in enumerate(value):
            _flatten(f"{prefix}[{k}]", v, out)
    elif isinstance(value, float):
        out.append((prefix, fmt_float(value)))
    else:
        out.append((prefix, str(value)))


def record_csv(env: ResultEnvelope) -> str:
    """Two-column ``key,value`` dump for non-spectrum payloads."""
    rows: list = []
    _flatten("", env.payload, rows)
    lines = _meta_lines(env, {})
    lines.append("key,value")
    lines += [f"{k},{v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def render(env: ResultEnvelope, fmt: str) -> str:
    if fmt == "json":
        return envelope_json(env)
    if fmt == "csv":
        if env.command == "sweep" and env.payload:
            return spectrum_csv(env)
        return record_csv(env)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def write_envelope(env: ResultEnvelope, path: Optional[str | Path], fmt: str) -> str:
    """Serialise ``env``; write it to ``path`` (or return it only when path is None)."""
    text = render(env, fmt)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def csv_payload(text: str) -> str:
    """The CSV body without the ``#`` metadata block."""
    buf = io.StringIO(text)
    return "".join(line for line in buf if not line.startswith("#"))
