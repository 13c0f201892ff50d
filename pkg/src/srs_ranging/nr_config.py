"""Numerology, slot timing and SRS allocation parameters for 5G NR.

All containers are frozen dataclasses. Construction does not validate;
call :func:`validate_carrier` / :func:`validate_srs` before generating
signals (the harness does this for every trial).
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import ConfigError

SPEED_OF_LIGHT = 299_792_458.0

VALID_MU = (0, 1, 2, 3, 4)
VALID_COMB = (2, 4, 8)
VALID_SRS_SYMBOLS = (1, 2, 4, 8, 10, 12, 14)
MIN_SRS_LENGTH = 24
MAX_SRS_LENGTH = 1584
SYMBOLS_PER_SLOT = 14
MAX_GRID_SUBCARRIERS = 4096
DEFAULT_GRID_SUBCARRIERS = 3276

# normal cyclic prefix, expressed relative to a 2048-sample symbol
CP_RATIO = 144 / 2048

# simplifications that hold throughout: no subcarrier offset, no time offset,
# single antenna port
K0 = 0
T_START = 0.0
ANTENNA_PORT = 1


@dataclass(frozen=True)
class Numerology:
    mu: int = 3

    @property
    def delta_f(self) -> float:
        return subcarrier_spacing(self.mu)


@dataclass(frozen=True)
class SlotTiming:
    delta_f: float
    t_symb: float
    t_cp: float
    t_s: float
    symbols_per_slot: int = SYMBOLS_PER_SLOT


@dataclass(frozen=True)
class CarrierConfig:
    f0: float = 25e9
    numerology: Numerology = Numerology(3)
    n_grid_subcarriers: int = DEFAULT_GRID_SUBCARRIERS

    @property
    def mu(self) -> int:
        return self.numerology.mu

    @property
    def delta_f(self) -> float:
        return subcarrier_spacing(self.numerology.mu)


@dataclass(frozen=True)
class SrsConfig:
    k_tc: int = 2
    comb_offset: int = 0
    m_sc: int = 833
    n_symb_srs: int = 1
    start_symbol: int = 8

    @property
    def occupied_subcarriers(self) -> range:
        return range(self.comb_offset, self.comb_offset + self.k_tc * self.m_sc, self.k_tc)

    @property
    def occupied_symbols(self) -> range:
        return range(self.start_symbol, self.start_symbol + self.n_symb_srs)


def _check_mu(mu) -> None:
    if isinstance(mu, bool) or not isinstance(mu, int) or mu not in VALID_MU:
        raise ConfigError([("invalid numerology", f"mu must be one of {VALID_MU}, got {mu!r}")])


def subcarrier_spacing(mu: int) -> float:
    """Subcarrier spacing in Hz, ``2**mu * 15 kHz``."""
    _check_mu(mu)
    return float(15_000 * 2**mu)


def slot_timing(mu: int) -> SlotTiming:
    """Symbol, cyclic-prefix and total symbol durations for numerology ``mu``.

    A uniform normal cyclic prefix is used for every symbol of the slot.
    """
    delta_f = subcarrier_spacing(mu)
    t_symb = 1.0 / delta_f
    t_cp = t_symb * CP_RATIO
    return SlotTiming(delta_f=delta_f, t_symb=t_symb, t_cp=t_cp, t_s=t_symb + t_cp)


def carrier_violations(carrier: CarrierConfig) -> list[tuple[str, str]]:
    out = []
    mu = carrier.numerology.mu
    if isinstance(mu, bool) or not isinstance(mu, int) or mu not in VALID_MU:
        out.append(("invalid numerology", f"mu must be one of {VALID_MU}, got {mu!r}"))
    if not carrier.f0 > 0:
        out.append(("invalid carrier frequency", f"f0 must be positive, got {carrier.f0!r}"))
    n = carrier.n_grid_subcarriers
    if not (0 < n <= MAX_GRID_SUBCARRIERS):
        out.append(("grid size out of range", f"n_grid_subcarriers must be in (0, {MAX_GRID_SUBCARRIERS}], got {n}"))
    if n % 2:
        out.append(("odd grid size", f"n_grid_subcarriers must be even, got {n}"))
    return out


def validate_carrier(carrier: CarrierConfig) -> CarrierConfig:
    violations = carrier_violations(carrier)
    if violations:
        raise ConfigError(violations)
    return carrier


def srs_violations(cfg: SrsConfig, carrier: CarrierConfig) -> list[tuple[str, str]]:
    """Every rule ``cfg`` breaks when paired with ``carrier``; empty if valid."""
    out = []
    if cfg.k_tc not in VALID_COMB:
        out.append(("invalid comb number", f"k_tc must be one of {VALID_COMB}, got {cfg.k_tc}"))
    if cfg.n_symb_srs not in VALID_SRS_SYMBOLS:
        out.append(("invalid symbol count", f"n_symb_srs must be one of {VALID_SRS_SYMBOLS}, got {cfg.n_symb_srs}"))
    if not MIN_SRS_LENGTH <= cfg.m_sc <= MAX_SRS_LENGTH:
        out.append(("sequence length out of range",
                    f"m_sc must be in [{MIN_SRS_LENGTH}, {MAX_SRS_LENGTH}], got {cfg.m_sc}"))
    if cfg.comb_offset < 0:
        out.append(("negative comb offset", f"comb_offset must be >= 0, got {cfg.comb_offset}"))
    top = cfg.comb_offset + cfg.k_tc * (cfg.m_sc - 1)
    if top >= carrier.n_grid_subcarriers:
        out.append(("allocation exceeds grid",
                    f"highest occupied subcarrier {top} >= n_grid_subcarriers {carrier.n_grid_subcarriers}"))
    if cfg.start_symbol < 0:
        out.append(("negative start symbol", f"start_symbol must be >= 0, got {cfg.start_symbol}"))
    if cfg.start_symbol + cfg.n_symb_srs > SYMBOLS_PER_SLOT:
        out.append(("allocation exceeds slot",
                    f"start_symbol + n_symb_srs = {cfg.start_symbol + cfg.n_symb_srs} > {SYMBOLS_PER_SLOT}"))
    return out


def validate_srs(cfg: SrsConfig, carrier: CarrierConfig) -> SrsConfig:
    """Return ``cfg`` unchanged if valid, else raise :class:`ConfigError`
    carrying every violated constraint (carrier problems included)."""
    violations = carrier_violations(carrier) + srs_violations(cfg, carrier)
    if violations:
        raise ConfigError(violations)
    return cfg


def occupied_bandwidth(cfg: SrsConfig, mu: int) -> float:
    """Frequency span of the comb, ``k_tc * m_sc * delta_f`` in Hz."""
    return cfg.k_tc * cfg.m_sc * subcarrier_spacing(mu)


def centered_comb_offset(k_tc: int, m_sc: int, n_grid_subcarriers: int) -> int:
    """Comb offset that places the allocation's midpoint on the DC subcarrier.

    The result is rounded down to a multiple of ``k_tc`` and clipped at 0.
    """
    offset = n_grid_subcarriers // 2 - (k_tc * (m_sc - 1)) // 2
    offset -= offset % k_tc
    return max(offset, 0)
