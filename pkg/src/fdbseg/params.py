"""Tunable parameters of the segmentation pipeline."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from fdbseg.filterbank import BandpassSpec, DirectionalSpec


@dataclass(frozen=True)
class FdbParams:
    """All pipeline parameters.

    Defaults are the values shared by every trained database (n=20, L=16,
    s=9, b=6, cutoffs 0.3 and 1, 15 px mirror margin) together with C=0.06,
    gamma=1, t=5.
    """

    C: float = 0.06
    n: int = 20
    L: int = 16
    gamma: int = 1
    s: int = 9
    t: float = 5.0
    b: int = 6
    omega_low: float = 0.3
    omega_high: float = 1.0
    pad_margin: int = 15

    def __post_init__(self):
        if not self.C >= 0:
            raise ValueError(f"C must be nonnegative, got {self.C}")
        if self.pad_margin < 0:
            raise ValueError("pad_margin must be nonnegative")
        # delegate the remaining checks to the component specs
        self.bandpass
        self.directional
        self.morphology

    @property
    def bandpass(self) -> BandpassSpec:
        return BandpassSpec(self.omega_low, self.omega_high, self.gamma)

    @property
    def directional(self) -> DirectionalSpec:
        return DirectionalSpec(self.L, self.n)

    @property
    def morphology(self):
        from fdbseg.segmentation import MorphologySpec
        return MorphologySpec(self.s, self.t, self.b)

    def replace(self, **changes) -> "FdbParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_types(cls) -> dict:
        casts = {"int": int, "float": float}
        return {f.name: casts[f.type] for f in fields(cls)}

    @classmethod
    def from_mapping(cls, values: dict, base: "FdbParams | None" = None) -> "FdbParams":
        """Build from string or numeric values, unknown keys rejected."""
        types = cls.field_types()
        unknown = set(values) - set(types)
        if unknown:
            raise KeyError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        parsed = {}
        for key, raw in values.items():
            cast = types[key]
            if cast is int:
                number = float(raw)
                if number != int(number):
                    raise ValueError(f"{key} must be an integer, got {raw!r}")
                parsed[key] = int(number)
            else:
                parsed[key] = float(raw)
        return replace(base or cls(), **parsed)
