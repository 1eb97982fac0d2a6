"""CCE-to-REG mapping: bundle interleaving, RE ordering, DMRS placement.

REG numbering is time-first: REG r sits on symbol (r mod duration) of the
PRB at position r // duration in ascending frequency order. That is the
only numbering under which consecutive-REG bundles span all symbols of
the CORESET, which interleaving assumes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core_model import (
    INTERLEAVED,
    NON_INTERLEAVED,
    SUBCARRIERS_PER_PRB,
    WIDEBAND,
    CoresetConfig,
)
from .errors import ConfigurationError, DomainError

# Within a REG, three subcarriers carry DMRS and nine carry payload.
DMRS_SUBCARRIERS = (1, 5, 9)
PAYLOAD_SUBCARRIERS = tuple(k for k in range(SUBCARRIERS_PER_PRB) if k not in DMRS_SUBCARRIERS)
PAYLOAD_RES_PER_CCE = 54

RE_PAYLOAD = "payload"
RE_DMRS = "dmrs"


@dataclass(frozen=True)
class RegBundle:
    index: int
    regs: tuple[int, ...]


@dataclass(frozen=True)
class ReLocation:
    prb: int
    symbol: int
    subcarrier: int
    kind: str


def reg_bundles(c: CoresetConfig) -> list[RegBundle]:
    """Physical bundles: bundle b holds REGs [b*size, (b+1)*size)."""
    size = c.bundle_size
    return [RegBundle(b, tuple(range(b * size, (b + 1) * size))) for b in range(c.num_bundles)]


def interleave_bundles(c: CoresetConfig) -> tuple[int, ...]:
    """Permutation f with f[j] = physical bundle at logical position j.

    Interleaved mapping writes bundle indices row-wise into an R x (N/R)
    array, reads them column-wise, then adds the cyclic shift mod N.
    Non-interleaved mapping is the identity.
    """
    n = c.num_bundles
    if c.mapping == NON_INTERLEAVED:
        return tuple(range(n))
    if c.mapping != INTERLEAVED:
        raise ConfigurationError(f"unknown mapping {c.mapping!r}")
    rows = c.interleaver_rows
    if rows < 1 or n % rows != 0:
        raise ConfigurationError(f"bundle count {n} not divisible by {rows} interleaver rows")
    cols = n // rows
    order = []
    for col in range(cols):
        for row in range(rows):
            order.append((row * cols + col + c.shift) % n)
    return tuple(order)


def cce_to_regs(c: CoresetConfig, cce: int) -> list[int]:
    """The six REGs of one CCE, in ascending physical REG order.

    CCE k walks logical bundles [k*6/size, (k+1)*6/size); each logical
    bundle resolves to a physical bundle through the interleaver.
    """
    if not 0 <= cce < c.num_cces:
        raise DomainError(f"cce must be in 0..{c.num_cces - 1}, got {cce}")
    if c.bundle_size <= 0 or 6 % c.bundle_size != 0:
        raise ConfigurationError(f"bundle size {c.bundle_size} does not divide a 6-REG CCE")
    per_cce = 6 // c.bundle_size
    f = interleave_bundles(c)
    regs: list[int] = []
    for j in range(cce * per_cce, (cce + 1) * per_cce):
        b = f[j]
        regs.extend(range(b * c.bundle_size, (b + 1) * c.bundle_size))
    return sorted(regs)


def cces_to_regs(c: CoresetConfig, cces: list[int]) -> list[int]:
    if len(set(cces)) != len(cces):
        raise DomainError("duplicate CCE indices")
    regs: list[int] = []
    for cce in cces:
        regs.extend(cce_to_regs(c, cce))
    return sorted(regs)


def reg_location(c: CoresetConfig, reg: int, ssb_start_prb: int = 0) -> tuple[int, int]:
    """(absolute prb, symbol) of a REG under time-first numbering."""
    if not 0 <= reg < c.num_regs:
        raise DomainError(f"reg must be in 0..{c.num_regs - 1}, got {reg}")
    prbs = c.prb_positions(ssb_start_prb)
    return prbs[reg // c.duration_symbols], reg % c.duration_symbols


def reg_res(c: CoresetConfig, reg: int, ssb_start_prb: int = 0) -> list[ReLocation]:
    """All 12 REs of one REG: 9 payload, 3 DMRS."""
    prb, symbol = reg_location(c, reg, ssb_start_prb)
    return [
        ReLocation(prb, symbol, k, RE_DMRS if k in DMRS_SUBCARRIERS else RE_PAYLOAD)
        for k in range(SUBCARRIERS_PER_PRB)
    ]


def candidate_payload_res(c: CoresetConfig, cces: list[int], ssb_start_prb: int = 0) -> list[ReLocation]:
    """Payload REs of a candidate, frequency first within a symbol, then by symbol.

    Output length is exactly 54 * len(cces): nine payload REs per REG, six
    REGs per CCE. DMRS positions are excluded.
    """
    if not cces:
        raise DomainError("candidate needs at least one CCE")
    regs = cces_to_regs(c, cces)
    res = []
    for reg in regs:
        prb, symbol = reg_location(c, reg, ssb_start_prb)
        for k in PAYLOAD_SUBCARRIERS:
            res.append(ReLocation(prb, symbol, k, RE_PAYLOAD))
    res.sort(key=lambda re: (re.symbol, re.prb, re.subcarrier))
    return res


def dmrs_regs(c: CoresetConfig, cces: list[int]) -> set[int]:
    """REGs carrying DMRS for this transmission.

    Wideband precoding fills every REG of the CORESET; narrowband only the
    bundles the candidate actually occupies.
    """
    if c.precoder_granularity == WIDEBAND:
        return set(range(c.num_regs))
    return set(cces_to_regs(c, cces))
