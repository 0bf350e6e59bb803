# SPDX-License-Identifier: GPL-3.0+

""" Evaluated values of the survival amplitude G(t), shared by every evaluator. """

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError


class Method(str, Enum):
    SERIES = "series"
    STAR_SERIES = "star_series"
    RATIONAL = "rational"
    ASYMPTOTIC = "asymptotic"
    VOLTERRA = "volterra"
    LAPLACE = "laplace"

    @classmethod
    def parse(cls, name: str) -> "Method":
        # "star" is accepted as a short form in config files
        name = name.strip().lower()
        if name == "star":
            return cls.STAR_SERIES
        try:
            return cls(name)
        except ValueError:
            raise ConfigError(f"unknown method {name!r} (choose from {', '.join(m.value for m in cls)})") from None


@dataclass(frozen=True)
class GSample:
    """ One evaluation of G at time t (physical units) with its error estimate. """
    t: float
    value: complex
    error_bound: float
    method: Method

    def __post_init__(self):
        if not self.error_bound >= 0 or math.isnan(self.error_bound):
            raise ValueError(f"error bound must be >= 0 (got {self.error_bound})")

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def contractive(self) -> bool:
        return abs(self.value) <= 1 + self.error_bound

    def shifted(self, delta: complex) -> "GSample":
        return GSample(self.t, self.value + delta, self.error_bound, self.method)
