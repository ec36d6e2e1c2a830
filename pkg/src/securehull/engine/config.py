"""Session parameters shared (and checked) by both parties."""

import json
from dataclasses import asdict, dataclass

from ..errors import ParameterMismatch
from ..he import DEFAULT_FRAC_BITS, DEFAULT_KEY_BITS, SUPPORTED_KEY_BITS


@dataclass(frozen=True)
class SessionConfig:
    key_bits: int = DEFAULT_KEY_BITS
    frac_bits: int = DEFAULT_FRAC_BITS
    max_iter: int | None = None  # None: 16*(|A|+|B|) + 64, fixed after the handshake
    seed: int | None = None
    timeout_ms: int = 30_000

    def __post_init__(self):
        if self.key_bits not in SUPPORTED_KEY_BITS:
            raise ParameterMismatch(f"key_bits must be one of {SUPPORTED_KEY_BITS}")
        if not 8 <= self.frac_bits <= 64:
            raise ParameterMismatch("frac_bits must lie in [8, 64]")
        if self.max_iter is not None and self.max_iter < 1:
            raise ParameterMismatch("max_iter must be positive")
        if self.timeout_ms <= 0:
            raise ParameterMismatch("timeout_ms must be positive")

    @property
    def timeout(self):
        return self.timeout_ms / 1000

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, data):
        known = {k: data[k] for k in ("key_bits", "frac_bits", "max_iter", "seed", "timeout_ms") if k in data}
        unknown = set(data) - set(known)
        if unknown:
            raise ParameterMismatch(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def replace(self, **changes):
        data = self.to_json()
        data.update(changes)
        return SessionConfig(**data)
