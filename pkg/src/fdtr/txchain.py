"""Transmit chain: spreading, time-reversal precoding, artificial noise.

The transmit vector for one block is

    x_tr = sqrt(alpha) * conj(H_B) S x + sqrt(1 - alpha) * w

where S is a Q x N spreading matrix replicating each data symbol onto U
subcarriers spaced N apart with +-1/sqrt(U) entries (disjoint column
supports, so S^H S = I_N and S^H D S is diagonal for any diagonal D), and
w is an artificial-noise vector drawn in the right null space of
S^H H_B so it vanishes after despreading at the legitimate receiver.

With the AN scaled by 1/sqrt(U - 1), every data symbol carries unit mean
transmit energy for any alpha: the data part contributes alpha and the AN
part (1 - alpha) per symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import DiagonalChannel, crandn
from .exceptions import DegenerateTrialError, ParameterError

# A singular value of S^H H_B counts as zero below this fraction of the largest.
_RANK_RTOL = 1e-9


@dataclass(frozen=True)
class SpreadingMatrix:
    """Structured +-1/sqrt(U) spreading matrix.

    Column n has its nonzeros exactly at rows {n, n+N, ..., n+(U-1)N};
    entry (n + i*N, n) equals signs[n + i*N] / sqrt(U). The sign pattern
    keeps the PAPR low and is shared by the transmitter and both
    receivers. Only the Q sign values are stored; products with S and S^H
    use the structure directly.
    """

    signs: np.ndarray
    n_symbols: int
    bor: int

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.float64)
        if s.shape != (self.n_symbols * self.bor,):
            raise ParameterError(
                f"signs must have length N*U = {self.n_symbols * self.bor}, got {s.shape}"
            )
        if not np.all(np.abs(s) == 1.0):
            raise ParameterError("spreading signs must all be +1 or -1")
        object.__setattr__(self, "signs", s)

    @property
    def n_subcarriers(self) -> int:
        return self.n_symbols * self.bor

    def as_dense(self) -> np.ndarray:
        """Explicit Q x N matrix, for tests and small-size checks."""
        n, u = self.n_symbols, self.bor
        dense = np.zeros((n * u, n))
        rows = np.arange(n * u)
        dense[rows, rows % n] = self.signs / np.sqrt(u)
        return dense

    def spread(self, x: np.ndarray) -> np.ndarray:
        """y = S x: replicate each symbol on U subcarriers, scaled +-1/sqrt(U)."""
        x = np.asarray(x)
        if x.shape != (self.n_symbols,):
            raise ParameterError(f"expected {self.n_symbols} symbols, got {x.shape}")
        return self.signs * np.tile(x, self.bor) / np.sqrt(self.bor)

    def despread(self, y: np.ndarray) -> np.ndarray:
        """z = S^H y."""
        y = np.asarray(y)
        if y.shape != (self.n_subcarriers,):
            raise ParameterError(f"expected {self.n_subcarriers} values, got {y.shape}")
        contributions = (self.signs * y).reshape(self.bor, self.n_symbols)
        return contributions.sum(axis=0) / np.sqrt(self.bor)

    def group_mean(self, values: np.ndarray) -> np.ndarray:
        """Diagonal of S^H diag(values) S: per-symbol mean over the U
        subcarriers carrying that symbol (signs square away)."""
        values = np.asarray(values)
        return values.reshape(self.bor, self.n_symbols).mean(axis=0)


def build_spreading_matrix(n_symbols: int, bor: int, sign_seed: int) -> SpreadingMatrix:
    """Draw an equiprobable +-1 sign pattern from a dedicated seed."""
    if n_symbols < 1 or bor < 1:
        raise ParameterError("n_symbols and bor must both be >= 1")
    rng = np.random.default_rng(sign_seed)
    signs = rng.integers(0, 2, size=n_symbols * bor) * 2.0 - 1.0
    return SpreadingMatrix(signs=signs, n_symbols=n_symbols, bor=bor)


def spread(x: np.ndarray, spreading: SpreadingMatrix) -> np.ndarray:
    return spreading.spread(x)


def despread(y: np.ndarray, spreading: SpreadingMatrix) -> np.ndarray:
    return spreading.despread(y)


def tr_precode(y: np.ndarray, h_bob: DiagonalChannel) -> np.ndarray:
    """Element-wise multiplication by the conjugate of the legitimate channel."""
    y = np.asarray(y)
    if y.shape != h_bob.gains.shape:
        raise ParameterError(
            f"length mismatch: signal {y.shape} vs channel {h_bob.gains.shape}"
        )
    return np.conj(h_bob.gains) * y


def despread_channel_matrix(spreading: SpreadingMatrix, h_bob: DiagonalChannel) -> np.ndarray:
    """A = S^H H_B, the N x Q matrix whose right null space hosts the AN."""
    n, u = spreading.n_symbols, spreading.bor
    a = np.zeros((n, n * u), dtype=np.complex128)
    rows = np.arange(n * u) % n
    a[rows, np.arange(n * u)] = spreading.signs * h_bob.gains / np.sqrt(u)
    return a


def null_space_basis(spreading: SpreadingMatrix, h_bob: DiagonalChannel) -> np.ndarray:
    """Orthonormal basis (Q x (Q-N)) of the right null space of S^H H_B via SVD.

    Raises DegenerateTrialError if the despread channel is rank deficient
    (a numerically singular realization).
    """
    a = despread_channel_matrix(spreading, h_bob)
    n, q = a.shape
    _, sv, vh = np.linalg.svd(a, full_matrices=True)
    if sv.size and sv[-1] < _RANK_RTOL * sv[0]:
        raise DegenerateTrialError("despread channel is numerically rank deficient")
    return vh[n:].conj().T


def generate_an(
    h_bob: DiagonalChannel,
    spreading: SpreadingMatrix,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw an artificial-noise vector invisible to the legitimate receiver.

    Procedure: form A = S^H H_B, take the right singular vectors V2
    spanning its null space, draw w_tilde ~ CN(0, I_{Q-N}), and return
    w = V2 w_tilde / sqrt(U - 1). The scaling gives E|w_q|^2 = 1/U, so the
    AN contributes (1 - alpha) per data symbol and the total transmit
    energy per symbol stays 1 for any alpha.
    """
    u = spreading.bor
    if u < 2:
        raise ParameterError("no AN degrees of freedom: the null space is empty for bor < 2")
    basis = null_space_basis(spreading, h_bob)
    w_tilde = crandn(rng, basis.shape[1])
    return basis @ w_tilde / np.sqrt(u - 1)


@dataclass(frozen=True)
class TransmitFrame:
    """One transmitted block: composite vector plus its constituents."""

    composite: np.ndarray          # x_tr, length Q
    an: np.ndarray                 # w, length Q
    alpha: float
    data: Optional[np.ndarray] = None      # x, length N (when tracked)
    precoded: Optional[np.ndarray] = None  # conj(H_B) S x, length Q


def assemble_transmit(
    precoded: np.ndarray,
    an: np.ndarray,
    alpha: float,
    data: Optional[np.ndarray] = None,
) -> TransmitFrame:
    """x_tr = sqrt(alpha) * precoded + sqrt(1 - alpha) * an."""
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    precoded = np.asarray(precoded, dtype=np.complex128)
    an = np.asarray(an, dtype=np.complex128)
    if precoded.shape != an.shape:
        raise ParameterError("precoded and AN vectors must have equal length")
    composite = np.sqrt(alpha) * precoded + np.sqrt(1.0 - alpha) * an
    return TransmitFrame(
        composite=composite, an=an, alpha=alpha, data=data, precoded=precoded
    )


_QPSK = np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * np.arange(4)))


def draw_symbols(n_symbols: int, rng: np.random.Generator, order: int = 4) -> np.ndarray:
    """Unit-energy constellation symbols (QPSK by default).

    The constellation order does not affect the secrecy analytics, which
    depend only on E|x_n|^2 = 1.
    """
    if order == 4:
        return _QPSK[rng.integers(0, 4, size=n_symbols)]
    side = int(np.sqrt(order))
    if side * side != order or side < 2:
        raise ParameterError(f"constellation order must be a square QAM size, got {order}")
    levels = 2 * np.arange(side) - (side - 1)
    scale = np.sqrt(2.0 * (side * side - 1) / 3.0)
    re = levels[rng.integers(0, side, size=n_symbols)]
    im = levels[rng.integers(0, side, size=n_symbols)]
    return (re + 1j * im) / scale
