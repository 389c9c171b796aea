"""Run configuration shared by the command line and the scripts."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_PRECISION = "HEEGNER6_PRECISION"
FORMATS = ("json-lines", "csv", "pretty")


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 384
    guard_bits: int = 16
    max_digits: int = 80
    thread_count: int = 0          # 0 picks os.cpu_count()
    output_format: str = "json-lines"
    max_precision_bits: int = 3072
    reproducible: bool = False     # zero out wall-clock fields for byte-identical output

    def __post_init__(self):
        if self.precision_bits < 128:
            raise ValueError("precision_bits must be at least 128")
        if self.guard_bits < 8:
            raise ValueError("guard_bits must be at least 8")
        if self.max_digits < 1:
            raise ValueError("max_digits must be positive")
        if self.thread_count < 0:
            raise ValueError("thread_count must be >= 0")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")
        if self.max_precision_bits < self.precision_bits:
            raise ValueError("max_precision_bits must be >= precision_bits")

    @property
    def workers(self) -> int:
        return self.thread_count or (os.cpu_count() or 1)

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Defaults, then HEEGNER6_PRECISION, then explicit overrides (None values ignored)."""
        cfg = cls()
        env = os.environ.get(ENV_PRECISION)
        if env:
            bits = int(env)
            cfg = replace(cfg, precision_bits=bits, max_precision_bits=max(cfg.max_precision_bits, bits))
        kw = {k: v for k, v in overrides.items() if v is not None}
        if "precision_bits" in kw and "max_precision_bits" not in kw:
            kw["max_precision_bits"] = max(cfg.max_precision_bits, kw["precision_bits"])
        return replace(cfg, **kw)
