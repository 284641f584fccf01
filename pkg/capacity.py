"""SIB payload budgeting for carrying several TSN domains' reference time."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

from exceptions import TimingDomainError

SIB_MAX_BITS = 2976


@dataclass(frozen=True)
class GptpPayloadLayout:
    """
    Per-domain 802.1AS timing payload.

    Attributes:
        header_bits (int): Common message header (34 octets).
        origin_timestamp_bits (int): originTimestamp (10 octets).
        other_field_bits (int): Any further field carried per domain, e.g. a
            correctionField.
    """
    header_bits: int = 34 * 8
    origin_timestamp_bits: int = 10 * 8
    other_field_bits: int = 0

    def __post_init__(self):
        for name in ("header_bits", "origin_timestamp_bits", "other_field_bits"):
            if getattr(self, name) < 0:
                raise TimingDomainError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def total_bits(self) -> int:
        return self.header_bits + self.origin_timestamp_bits + self.other_field_bits


def sib_domain_capacity(payload_bits: int, sib_max_bits: int = SIB_MAX_BITS) -> int:
    """Number of whole per-domain payloads that fit in one SIB."""
    if payload_bits <= 0:
        raise TimingDomainError(f"payload_bits must be > 0, got {payload_bits}")
    if sib_max_bits < 0:
        raise TimingDomainError(f"sib_max_bits must be >= 0, got {sib_max_bits}")
    return int(sib_max_bits // payload_bits)


def budget_breakdown(layout: GptpPayloadLayout = GptpPayloadLayout(),
                     sib_max_bits: int = SIB_MAX_BITS) -> Dict[str, Any]:
    """Domain count plus the bit budget it is derived from."""
    domains = sib_domain_capacity(layout.total_bits, sib_max_bits)
    used = domains * layout.total_bits
    return {
        "domains": domains,
        "payload_bits": layout.total_bits,
        "header_bits": layout.header_bits,
        "origin_timestamp_bits": layout.origin_timestamp_bits,
        "other_field_bits": layout.other_field_bits,
        "sib_max_bits": sib_max_bits,
        "used_bits": used,
        "unused_bits": sib_max_bits - used,
    }
