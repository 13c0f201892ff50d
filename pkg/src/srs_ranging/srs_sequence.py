"""Low-PAPR SRS sequence generation and comb mapping onto the slot grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError
from .nr_config import (
    MIN_SRS_LENGTH,
    SYMBOLS_PER_SLOT,
    CarrierConfig,
    SrsConfig,
    validate_srs,
)


@dataclass(frozen=True, eq=False)
class LowPaprSequence:
    values: np.ndarray
    root_u: int
    n_zc: int
    q: int

    @property
    def m_sc(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class ResourceGrid:
    """Complex symbols ``a[k, l]`` for one slot, subcarriers along axis 0."""

    elements: np.ndarray
    occupied_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        elements = np.asarray(self.elements, dtype=complex)
        if elements.ndim != 2:
            raise ValueError(f"grid must be 2-D, got shape {elements.shape}")
        object.__setattr__(self, "elements", elements)
        if self.occupied_mask is None:
            object.__setattr__(self, "occupied_mask", np.abs(elements) > 0)

    @property
    def shape(self):
        return self.elements.shape

    @property
    def n_subcarriers(self) -> int:
        return self.elements.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.elements.shape[1]

    def occupied_symbols(self) -> np.ndarray:
        return np.flatnonzero(self.occupied_mask.any(axis=0))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.elements) ** 2))


def largest_prime_at_most(n: int) -> int:
    for candidate in range(n, 1, -1):
        if all(candidate % d for d in range(2, math.isqrt(candidate) + 1)):
            return candidate
    raise ValueError(f"no prime <= {n}")


def zc_root_index(root_u: int, n_zc: int) -> int:
    """Root ``q`` for sequence group ``root_u`` (group mapping with v = 0)."""
    q_bar = n_zc * (root_u + 1) / 31
    return math.floor(q_bar + 0.5) % n_zc


def zadoff_chu_base(root_u: int, length_m: int) -> LowPaprSequence:
    """Cyclically extended Zadoff-Chu sequence of length ``length_m``.

    The prime length ``N_zc`` is the largest prime not exceeding
    ``length_m``; elements are ``exp(-j*pi*q*m*(m+1)/N_zc)`` with
    ``m = n mod N_zc``. Cyclic shift and hopping are not applied.
    """
    if length_m < MIN_SRS_LENGTH:
        raise ConfigError([("sequence length out of range",
                            f"length_m must be >= {MIN_SRS_LENGTH}, got {length_m}")])
    if root_u < 0:
        raise ConfigError([("invalid root", f"root_u must be >= 0, got {root_u}")])
    n_zc = largest_prime_at_most(length_m)
    q = zc_root_index(root_u, n_zc)
    if q == 0:
        raise ConfigError([("invalid root", f"root_u={root_u} maps to q = 0 mod {n_zc}")])
    m = np.arange(length_m) % n_zc
    # reduce the quadratic phase modulo 2*N_zc before scaling to keep it exact
    phase_num = (q * m * (m + 1)) % (2 * n_zc)
    values = np.exp(-1j * np.pi * phase_num / n_zc)
    return LowPaprSequence(values=values, root_u=root_u, n_zc=n_zc, q=q)


def generate_srs_grid(srs: SrsConfig, carrier: CarrierConfig, root_u: int = 0) -> ResourceGrid:
    """Map the SRS sequence onto a ``n_grid_subcarriers x 14`` slot grid.

    Every ``k_tc``-th subcarrier starting at ``comb_offset`` is filled in each
    symbol ``start_symbol .. start_symbol + n_symb_srs - 1``; the same
    sequence is repeated in every occupied symbol.
    """
    validate_srs(srs, carrier)
    seq = zadoff_chu_base(root_u, srs.m_sc)
    elements = np.zeros((carrier.n_grid_subcarriers, SYMBOLS_PER_SLOT), dtype=complex)
    rows = np.asarray(srs.occupied_subcarriers)
    for l in srs.occupied_symbols:
        elements[rows, l] = seq.values
    return ResourceGrid(elements)


def papr_db(waveform) -> float:
    """Peak-to-average power ratio in dB of a sample stream or waveform."""
    x = np.asarray(getattr(waveform, "samples", waveform))
    if x.size == 0:
        raise ValueError("PAPR of an empty waveform is undefined")
    power = np.abs(x) ** 2
    mean = power.mean()
    if mean == 0:
        raise ValueError("PAPR of an all-zero waveform is undefined")
    return float(10 * np.log10(power.max() / mean))


def write_grid_dump(grid: ResourceGrid, path) -> None:
    """Write occupied elements as ``k l re im`` text rows."""
    k, l = np.nonzero(grid.occupied_mask)
    vals = grid.elements[k, l]
    table = np.column_stack([k, l, vals.real, vals.imag])
    np.savetxt(path, table, fmt=["%d", "%d", "%.17g", "%.17g"],
               header="subcarrier symbol re im")


def read_grid_dump(path, n_subcarriers: int, n_symbols: int = SYMBOLS_PER_SLOT) -> ResourceGrid:
    table = np.loadtxt(path, ndmin=2)
    elements = np.zeros((n_subcarriers, n_symbols), dtype=complex)
    if table.size:
        k = table[:, 0].astype(int)
        l = table[:, 1].astype(int)
        elements[k, l] = table[:, 2] + 1j * table[:, 3]
    return ResourceGrid(elements)
