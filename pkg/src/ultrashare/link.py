"""Shared host-FPGA link with weighted round-robin data-request scheduling.

RX and TX are fully independent channels, each serializing one
scatter-gather element transfer at a time. Arbitration among accelerators
is weighted round-robin: while the scheduler visits accelerator a it may
grant up to weight[a] back-to-back transfers, but the moment a has no
pending request the visit ends and the next accelerator is inspected, so
the channel never idles while anyone has work (work conservation). Unused
weight is thereby redistributed to whoever is still asking.
"""

import math
from dataclasses import dataclass

from .engine import SimulationError
from .sglist import SgElement


@dataclass(frozen=True, slots=True)
class LinkModel:
    rx_bandwidth: float  # bytes per ns
    tx_bandwidth: float
    per_transfer_overhead: int  # ns added to every element transfer

    def __post_init__(self):
        if self.rx_bandwidth <= 0 or self.tx_bandwidth <= 0:
            raise ValueError("link bandwidths must be positive")
        if self.per_transfer_overhead < 0:
            raise ValueError("per-transfer overhead cannot be negative")


class PriorityTable:
    """Per-accelerator scheduling weights, 1..255 as in a one-byte register."""

    def __init__(self, weights: list[int]):
        self._check(weights)
        self.weights = list(weights)

    @staticmethod
    def _check(weights):
        if not weights:
            raise ValueError("priority table cannot be empty")
        for i, w in enumerate(weights):
            if not (1 <= w <= 255):
                raise ValueError(f"weight[{i}] = {w} outside 1..255")

    def replace(self, weights: list[int]) -> None:
        self._check(weights)
        if len(weights) != len(self.weights):
            raise ValueError("weight vector length cannot change at runtime")
        self.weights = list(weights)


class WrrScheduler:
    """Weighted round-robin cursor over k request slots.

    The cursor is (acc, grants already given in this visit). Weight changes
    are deferred to the next visit boundary so an in-progress visit keeps
    its original budget.
    """

    def __init__(self, table: PriorityTable):
        self.table = table
        self.cursor_acc = 0
        self.cursor_used = 0
        self._visit_budget = table.weights[0]

    def _advance(self):
        self.cursor_acc = (self.cursor_acc + 1) % len(self.table.weights)
        self.cursor_used = 0
        self._visit_budget = self.table.weights[self.cursor_acc]

    def grant(self, pending: list[bool]) -> int | None:
        """Pick the next accelerator to serve, or None if nothing is pending."""
        for _ in range(len(pending) + 1):
            if self.cursor_used < self._visit_budget and pending[self.cursor_acc]:
                self.cursor_used += 1
                return self.cursor_acc
            self._advance()
        return None


class LinkChannel:
    """One direction of the link: WRR arbitration plus a serialized transfer slot."""

    def __init__(self, name: str, bandwidth: float, overhead: int, table: PriorityTable, n_accs: int):
        self.name = name
        self.bandwidth = bandwidth
        self.overhead = overhead
        self.scheduler = WrrScheduler(table)
        self.pending: list[SgElement | None] = [None] * n_accs
        self.pending_mask = [False] * n_accs
        self.busy = False
        self.inflight: list[tuple[int, SgElement]] = []  # FIFO of (acc, element)
        self.blocked_until = 0  # test hook: refuse grants before this tick

    def present(self, acc: int, element: SgElement) -> None:
        """An accelerator controller offers its next element for this direction."""
        if self.pending[acc] is not None:
            raise SimulationError(f"{self.name}: accelerator {acc} already has a pending request")
        self.pending[acc] = element
        self.pending_mask[acc] = True

    def transfer_time(self, length: int) -> int:
        return self.overhead + math.ceil(length / self.bandwidth)

    def try_grant(self, now: int) -> tuple[int, SgElement] | None:
        """Grant one pending request if the channel can start it right now."""
        if self.busy or now < self.blocked_until:
            return None
        acc = self.scheduler.grant(self.pending_mask)
        if acc is None:
            return None
        element = self.pending[acc]
        self.pending[acc] = None
        self.pending_mask[acc] = False
        self.busy = True
        self.inflight.append((acc, element))
        return acc, element

    def complete(self, acc: int, element: SgElement) -> None:
        if not self.inflight or self.inflight[0] != (acc, element):
            raise SimulationError(f"{self.name}: completion does not match issue order")
        self.inflight.pop(0)
        self.busy = False
