"""Central experiment parameterization.

All other modules consume a :class:`ScenarioConfig`. SNRs are expressed in
dB at the interface; internally the per-subcarrier noise variance follows
the convention sigma_v^2 = 1 / (U * snr_linear), where U is the back-off
rate (BOR). An infinite eavesdropper SNR is a first-class value
(``float("inf")``) so that sigma_v^2 = 0 holds exactly.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace

from .exceptions import ParameterError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DECODERS = ("sds", "mf", "oc")

_INF_STRINGS = {"inf", "+inf", "infinite", "infinity"}


def db_to_linear(x_db: float) -> float:
    """Convert dB to a linear power ratio; +inf maps to +inf."""
    if math.isinf(x_db):
        return math.inf if x_db > 0 else 0.0
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a linear power ratio to dB. Inverse of :func:`db_to_linear`."""
    if x < 0:
        raise ParameterError(f"negative linear value {x} has no dB representation")
    if x == 0:
        return -math.inf
    if math.isinf(x):
        return math.inf
    return 10.0 * math.log10(x)


def noise_variance_from_snr(snr_linear: float, bor: int) -> float:
    """Per-subcarrier noise variance for a given linear SNR and BOR.

    Returns 1 / (bor * snr_linear); exactly 0.0 for infinite SNR.
    """
    if bor < 1:
        raise ParameterError(f"bor must be >= 1, got {bor}")
    if math.isinf(snr_linear) and snr_linear > 0:
        return 0.0
    if not snr_linear > 0:
        raise ParameterError(f"snr_linear must be positive, got {snr_linear}")
    return 1.0 / (bor * snr_linear)


def parse_snr_db(value) -> float:
    """Parse an SNR-in-dB value, accepting 'inf' style strings."""
    if isinstance(value, str):
        if value.strip().lower() in _INF_STRINGS:
            return math.inf
        try:
            return float(value)
        except ValueError as exc:
            raise ParameterError(f"cannot parse SNR value {value!r}") from exc
    return float(value)


def normalize_decoder(name: str) -> str:
    low = str(name).strip().lower()
    if low not in DECODERS:
        raise ParameterError(f"unknown decoder {name!r}; expected one of {DECODERS}")
    return low


@dataclass(frozen=True)
class ScenarioConfig:
    """Immutable communication-scenario parameters.

    Attributes
    ----------
    n_symbols : data symbols per block (N).
    bor : back-off rate U = Q/N, the frequency spreading factor.
    alpha : fraction of transmit power carrying data (1 - alpha goes to AN).
    snr_bob_db : legitimate-link SNR in dB.
    snr_eve_db : eavesdropper SNR in dB; may be +inf.
    decoder : eavesdropper decoding structure, one of {sds, mf, oc}.
    n_trials : Monte Carlo channel realizations.
    rng_seed : master seed; trial i derives its generator from (seed, i).
    """

    n_symbols: int = 64
    bor: int = 4
    alpha: float = 0.5
    snr_bob_db: float = 10.0
    snr_eve_db: float = 10.0
    decoder: str = "sds"
    n_trials: int = 1000
    rng_seed: int = 12345

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ParameterError(f"n_symbols must be >= 1, got {self.n_symbols}")
        if self.bor < 1:
            raise ParameterError(f"bor must be >= 1, got {self.bor}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.n_trials < 1:
            raise ParameterError(f"n_trials must be >= 1, got {self.n_trials}")
        object.__setattr__(self, "decoder", normalize_decoder(self.decoder))
        object.__setattr__(self, "snr_bob_db", parse_snr_db(self.snr_bob_db))
        object.__setattr__(self, "snr_eve_db", parse_snr_db(self.snr_eve_db))

    @property
    def n_subcarriers(self) -> int:
        """Q = N * U, exactly."""
        return self.n_symbols * self.bor

    @property
    def noise_var_bob(self) -> float:
        return noise_variance_from_snr(db_to_linear(self.snr_bob_db), self.bor)

    @property
    def noise_var_eve(self) -> float:
        return noise_variance_from_snr(db_to_linear(self.snr_eve_db), self.bor)

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


_CONFIG_KEYS = {f.name for f in fields(ScenarioConfig)}


def config_from_mapping(mapping: dict, **overrides) -> ScenarioConfig:
    """Build a ScenarioConfig from a key/value mapping plus overrides.

    Unknown keys are rejected so typos in configuration files fail loudly.
    Override values of None are ignored (unset CLI flags).
    """
    merged = dict(mapping)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    unknown = set(merged) - _CONFIG_KEYS
    if unknown:
        raise ParameterError(f"unknown configuration keys: {sorted(unknown)}")
    return ScenarioConfig(**merged)


def load_config(path: str, **overrides) -> ScenarioConfig:
    """Load a TOML scenario file; keyword overrides win over file values."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return config_from_mapping(data, **overrides)
