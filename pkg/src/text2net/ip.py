"""Small integer helpers for IPv4 arithmetic.

These assume syntactically valid dotted quads; strict user-input checking
(octet ranges, leading zeros) lives in the validator module.
"""

from __future__ import annotations


def parse_ipv4(text: str) -> int:
    parts = text.split(".")
    if len(parts) != 4:
        raise ValueError(f"not a dotted quad: {text!r}")
    value = 0
    for part in parts:
        octet = int(part)
        if not 0 <= octet <= 255:
            raise ValueError(f"octet out of range in {text!r}")
        value = (value << 8) | octet
    return value


def format_ipv4(value: int) -> str:
    return ".".join(str((value >> shift) & 0xFF) for shift in (24, 16, 8, 0))


def prefix_to_mask_int(prefix_len: int) -> int:
    if not 0 <= prefix_len <= 32:
        raise ValueError(f"prefix length out of range: {prefix_len}")
    if prefix_len == 0:
        return 0
    return (0xFFFFFFFF << (32 - prefix_len)) & 0xFFFFFFFF


def prefix_to_mask(prefix_len: int) -> str:
    return format_ipv4(prefix_to_mask_int(prefix_len))


def network_int(addr: int, prefix_len: int) -> int:
    return addr & prefix_to_mask_int(prefix_len)


def in_network(addr: int, network: int, prefix_len: int) -> bool:
    return network_int(addr, prefix_len) == network
