"""Flat ``key = value`` configuration files.

Keys are the :class:`FdbParams` field names plus ``truth_pattern`` (how a
ground-truth file is named from an image, e.g. ``{stem}.png``) and
``resize`` (uniform rescale factor applied before filtering).  Blank lines
and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from fdbseg.evaluation import DEFAULT_TRUTH_PATTERN
from fdbseg.params import FdbParams

EXTRA_KEYS = ("truth_pattern", "resize")


@dataclass(frozen=True)
class RunSettings:
    params: FdbParams = FdbParams()
    truth_pattern: str = DEFAULT_TRUTH_PATTERN
    resize: float = 1.0

    def __post_init__(self):
        if not self.resize > 0:
            raise ValueError(f"resize must be positive, got {self.resize}")


def parse_pairs(lines, source: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"{source}:{lineno}: empty key")
        values[key] = value
    return values


def read_config(path) -> dict[str, str]:
    with open(path) as fh:
        return parse_pairs(fh, str(path))


def resolve(values: dict[str, str], base: RunSettings | None = None) -> RunSettings:
    """Overlay string values on ``base`` and validate the result."""
    base = base or RunSettings()
    values = dict(values)
    truth_pattern = values.pop("truth_pattern", base.truth_pattern)
    resize = float(values.pop("resize", base.resize))
    params = FdbParams.from_mapping(values, base.params)
    return RunSettings(params, truth_pattern, resize)


def format_config(settings: RunSettings) -> str:
    lines = []
    for f in fields(FdbParams):
        lines.append(f"{f.name} = {getattr(settings.params, f.name)}")
    lines.append(f"truth_pattern = {settings.truth_pattern}")
    lines.append(f"resize = {settings.resize}")
    return "\n".join(lines) + "\n"


def write_config(settings: RunSettings, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_config(settings))
