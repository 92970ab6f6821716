"""Complex electrical quantities that carry their unit explicitly."""
from __future__ import annotations

from dataclasses import dataclass

OHM = "ohm"
PER_UNIT = "pu"
KILOAMPERE = "kA"


@dataclass(frozen=True)
class ComplexImpedance:
    z: complex
    unit: str = OHM

    @property
    def r(self) -> float:
        return self.z.real

    @property
    def x(self) -> float:
        return self.z.imag

    @property
    def magnitude(self) -> float:
        return abs(self.z)


@dataclass(frozen=True)
class ComplexCurrent:
    i: complex
    unit: str = KILOAMPERE

    @property
    def magnitude(self) -> float:
        return abs(self.i)
