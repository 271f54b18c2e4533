"""Frequency-domain Rayleigh channels and the trial seeding contract.

Channels are diagonal in the frequency domain: Q i.i.d. per-subcarrier
gains h_q = (g1 + j*g2)/sqrt(2) with g1, g2 standard normal, so
E|h_q|^2 = 1 and |h_q| is Rayleigh. Subcarriers are uncorrelated (white
across frequency); there is no coherence-bandwidth model, matching the
analytic assumptions of the secrecy models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError


@dataclass(frozen=True)
class DiagonalChannel:
    """Diagonal frequency-domain channel: one complex gain per subcarrier."""

    gains: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=np.complex128)
        if g.ndim != 1 or g.size < 1:
            raise ParameterError("channel gains must be a nonempty 1-D sequence")
        object.__setattr__(self, "gains", g)

    def __len__(self) -> int:
        return self.gains.size


def crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    """Zero-mean circularly-symmetric complex normal samples, unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_channel(n_subcarriers: int, rng: np.random.Generator) -> DiagonalChannel:
    """Draw a fresh channel realization with Q independent unit-variance gains."""
    if n_subcarriers < 1:
        raise ParameterError(f"n_subcarriers must be >= 1, got {n_subcarriers}")
    return DiagonalChannel(crandn(rng, n_subcarriers))


def conjugate(ch: DiagonalChannel) -> DiagonalChannel:
    """Element-wise complex conjugate (the transmit precoder of the legitimate link)."""
    return DiagonalChannel(np.conj(ch.gains))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Deterministic per-trial generator.

    Trial i seeds from (master_seed, i), so trials are reproducible and
    independent of execution order; generators are never shared between
    trials.
    """
    return np.random.default_rng([int(master_seed), int(trial_index)])
