"""Scatter-gather lists and their compact encoding.

A scatter-gather list describes a host buffer spread across memory pages
as (address, length) pairs. Middle elements always span a full page, so
the compact form stores only the first and last lengths plus the address
list; middle lengths are implied by the page size.
"""

from dataclasses import dataclass
from typing import NamedTuple


class SgElement(NamedTuple):
    """One (address, length) pair; the unit of DMA transfer."""

    address: int
    length: int


@dataclass(frozen=True, slots=True)
class CompactSgList:
    """Page-address list with explicit first/last lengths.

    For a single-element list, first_length is the whole transfer and
    last_length is ignored. For longer lists the total is
    first_length + (count - 2) * page_size + last_length.
    """

    first_length: int
    last_length: int
    addresses: tuple[int, ...]
    page_size: int

    def __post_init__(self):
        if not self.addresses:
            raise ValueError("compact SG list needs at least one address")
        if not (1 <= self.first_length <= self.page_size):
            raise ValueError(f"first_length {self.first_length} outside 1..{self.page_size}")
        if len(self.addresses) > 1 and not (1 <= self.last_length <= self.page_size):
            raise ValueError(f"last_length {self.last_length} outside 1..{self.page_size}")


def compact_sg(elements: list[SgElement], page_size: int) -> CompactSgList:
    """Compact an element sequence (middle elements must be full pages)."""
    if not elements:
        raise ValueError("cannot compact an empty element list")
    for elem in elements[1:-1]:
        if elem.length != page_size:
            raise ValueError(
                f"middle element at 0x{elem.address:x} has length {elem.length}, "
                f"expected page size {page_size}"
            )
    for elem in elements:
        if not (1 <= elem.length <= page_size):
            raise ValueError(f"element length {elem.length} outside 1..{page_size}")
    return CompactSgList(
        first_length=elements[0].length,
        last_length=elements[-1].length,
        addresses=tuple(e.address for e in elements),
        page_size=page_size,
    )


def decode_sg(compact: CompactSgList) -> list[SgElement]:
    """Expand a compact list back into (address, length) pairs."""
    addrs = compact.addresses
    if len(addrs) == 1:
        return [SgElement(addrs[0], compact.first_length)]
    out = [SgElement(addrs[0], compact.first_length)]
    page = compact.page_size
    for addr in addrs[1:-1]:
        out.append(SgElement(addr, page))
    out.append(SgElement(addrs[-1], compact.last_length))
    return out


def total_bytes(compact: CompactSgList) -> int:
    """Total transfer size of a compact list, without decoding it."""
    count = len(compact.addresses)
    if count == 1:
        return compact.first_length
    return compact.first_length + (count - 2) * compact.page_size + compact.last_length


def build_sg_list(total: int, page_size: int, base_address: int) -> CompactSgList:
    """Synthesize a page-aligned compact list covering `total` bytes.

    Elements are full pages except a possibly short last one, laid out at
    consecutive page addresses from base_address.
    """
    if total < 1:
        raise ValueError("transfer size must be positive")
    full, rem = divmod(total, page_size)
    count = full + (1 if rem else 0)
    addresses = tuple(base_address + i * page_size for i in range(count))
    if count == 1:
        return CompactSgList(total, total, addresses, page_size)
    return CompactSgList(page_size, rem if rem else page_size, addresses, page_size)
