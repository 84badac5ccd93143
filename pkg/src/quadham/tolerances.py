"""Default numerical tolerances and the QUADHAM_TOL override."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "QUADHAM_TOL"


@dataclass(frozen=True)
class Tolerances:
    reality: float = 1e-9
    ep: float = 1e-7
    pairing: float = 1e-8
    structural: float = 1e-10  # pseudo-Hermiticity residuals
    oracle: float = 1e-12  # formula vs commutator route
    orthogonality: float = 1e-9
    residual: float = 1e-10  # ladder and constant-of-motion residuals

    def override(self, text: str | None) -> "Tolerances":
        """Apply ``"1e-8"`` (structural and residual) or ``"key=value,..."``."""
        if not text:
            return self
        text = text.strip()
        if "=" not in text:
            v = float(text)
            return replace(self, structural=v, residual=v)
        names = {f.name for f in fields(self)}
        changes = {}
        for item in text.split(","):
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in names:
                raise ValueError(f"unknown tolerance {key!r} in {text!r}; known: {sorted(names)}")
            changes[key] = float(val)
        return replace(self, **changes)

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        return cls().override(environ.get(ENV_VAR))
