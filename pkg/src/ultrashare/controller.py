"""Per-accelerator controller: SG queues, page-granular buffers, streaming compute.

Data for the current command flows through two small buffers sized in host
pages. The controller issues one RX element request whenever the element
fits in the free RX buffer space (in-flight bytes count as reserved), and
one TX element request whenever enough produced output is buffered.

Compute is modeled as a stream processor: it starts a fixed startup time
after the first input byte lands, then consumes buffered input at the
accelerator's processing rate, producing output in proportion to the
input/output frame sizes. Consumption advances in "runs": a run claims the
largest contiguous chunk that the input buffer holds and the output buffer
can absorb, and finishes a whole number of nanoseconds later. Buffer
levels therefore change only at event boundaries and stay exact integers,
while a starved or back-pressured stream stalls for exactly the gap the
data path imposes. An accelerator stays allocated from the moment a
command is bound to it until the command's last output byte has left on
the TX channel.
"""

import math
from collections import deque
from dataclasses import dataclass
from typing import Protocol

from .commands import Command
from .engine import SimulationError
from .sglist import SgElement


@dataclass(frozen=True, slots=True)
class AccelParams:
    acc_index: int
    acc_type: int
    startup_latency: int  # ns before the first buffered byte is consumed
    process_rate: float  # bytes consumed per ns once streaming
    input_bytes_per_frame: int
    output_bytes_per_frame: int

    def __post_init__(self):
        if self.process_rate <= 0:
            raise ValueError("process_rate must be positive")
        if self.input_bytes_per_frame <= 0 or self.output_bytes_per_frame <= 0:
            raise ValueError("frame sizes must be positive")
        if self.startup_latency < 0:
            raise ValueError("startup latency cannot be negative")


class ControllerHost(Protocol):
    """Callbacks the controller needs from the simulation around it."""

    def now(self) -> int: ...

    def present_rx(self, acc: int, element: SgElement) -> None: ...

    def present_tx(self, acc: int, element: SgElement) -> None: ...

    def schedule_compute(self, acc: int, delay: int, final: bool) -> None: ...

    def schedule_compute_wakeup(self, acc: int, delay: int) -> None: ...

    def compute_finished(self, acc: int, command: Command) -> None: ...

    def command_finished(self, acc: int, command: Command) -> None: ...


class AcceleratorController:
    """State machine driving one accelerator through one command at a time."""

    def __init__(self, params: AccelParams, buffer_capacity: int, host: ControllerHost):
        if buffer_capacity <= 0:
            raise ValueError("buffer capacity must be positive")
        self.params = params
        self.acc = params.acc_index
        self.buffer_capacity = buffer_capacity
        self.host = host

        self.command: Command | None = None
        self.rx_sg_queue: deque[SgElement] = deque()
        self.tx_sg_queue: deque[SgElement] = deque()
        self.rx_buffer_fill = 0
        self.rx_outstanding = 0
        self.tx_buffer_fill = 0
        self.tx_reserved = 0
        self.tx_inflight = 0
        self.rx_request_open = False
        self.tx_request_open = False
        self._rx_granted: deque[SgElement] = deque()
        self._tx_granted: deque[SgElement] = deque()

        self.in_total = 0
        self.out_total = 0
        self.consumed = 0
        self.produced = 0
        self.tx_elements_left = 0
        self.compute_ready: int | None = None
        self.run_active = False
        self._run_bytes = 0
        self._run_produced = 0
        self._run_started = 0
        self.compute_busy_ns = 0
        self.first_run_start: int | None = None
        self.last_run_end: int | None = None

    # -- command lifecycle ------------------------------------------------

    def assign(self, command: Command) -> None:
        if self.command is not None:
            raise SimulationError(f"acc {self.acc} assigned while still busy")
        self.command = command
        self.in_total = command.rx_bytes()
        self.out_total = command.tx_bytes()
        self.consumed = 0
        self.produced = 0
        self.compute_ready = None
        self.tx_elements_left = 0
        self.compute_busy_ns = 0
        self.first_run_start = None
        self.last_run_end = None

    def deliver_sg(self, rx_elements: list[SgElement], tx_elements: list[SgElement]) -> None:
        """Fetched SG lists land in the controller's element queues."""
        if self.command is None:
            raise SimulationError(f"acc {self.acc} received SG lists with no command bound")
        self.rx_sg_queue.extend(rx_elements)
        self.tx_sg_queue.extend(tx_elements)
        self.tx_elements_left += len(tx_elements)
        self.pump()

    # -- request issue ----------------------------------------------------

    def try_issue_rx(self) -> SgElement | None:
        """Offer the next RX element if it fits in the free buffer space."""
        if self.rx_request_open or not self.rx_sg_queue:
            return None
        head = self.rx_sg_queue[0]
        free = self.buffer_capacity - self.rx_buffer_fill - self.rx_outstanding
        if head.length > free:
            return None
        self.rx_sg_queue.popleft()
        self.rx_outstanding += head.length
        self.rx_request_open = True
        return head

    def try_issue_tx(self) -> SgElement | None:
        """Offer the next TX element once its bytes are produced and not already in flight."""
        if self.tx_request_open or not self.tx_sg_queue:
            return None
        head = self.tx_sg_queue[0]
        if self.tx_buffer_fill - self.tx_inflight < head.length:
            return None
        self.tx_sg_queue.popleft()
        self.tx_request_open = True
        return head

    # -- channel callbacks --------------------------------------------------

    def on_rx_granted(self, element: SgElement) -> None:
        self.rx_request_open = False
        self._rx_granted.append(element)
        self.pump()

    def on_rx_complete(self, element: SgElement) -> None:
        if not self._rx_granted or self._rx_granted[0] != element:
            raise SimulationError(f"acc {self.acc}: RX completion with no matching request")
        self._rx_granted.popleft()
        self.rx_outstanding -= element.length
        self.rx_buffer_fill += element.length
        self._check_bounds()
        if self.compute_ready is None:
            self.compute_ready = self.host.now() + self.params.startup_latency
            if self.params.startup_latency > 0:
                self.host.schedule_compute_wakeup(self.acc, self.params.startup_latency)
        self.pump()

    def on_tx_granted(self, element: SgElement) -> None:
        self.tx_request_open = False
        self.tx_inflight += element.length
        self._tx_granted.append(element)
        self.pump()

    def on_tx_complete(self, element: SgElement) -> None:
        if not self._tx_granted or self._tx_granted[0] != element:
            raise SimulationError(f"acc {self.acc}: TX completion with no matching request")
        self._tx_granted.popleft()
        self.tx_inflight -= element.length
        self.tx_buffer_fill -= element.length
        self.tx_elements_left -= 1
        self._check_bounds()
        if self.tx_elements_left == 0 and self.consumed == self.in_total:
            self._finish_command()
        else:
            self.pump()

    # -- compute ------------------------------------------------------------

    def _production(self, consumed: int) -> int:
        return consumed * self.out_total // self.in_total

    def _maybe_start_run(self) -> None:
        if self.run_active or self.command is None:
            return
        if self.consumed >= self.in_total or self.rx_buffer_fill <= 0:
            return
        if self.compute_ready is None or self.host.now() < self.compute_ready:
            return
        chunk = min(self.rx_buffer_fill, self.in_total - self.consumed)
        base = self._production(self.consumed)
        free_out = self.buffer_capacity - self.tx_buffer_fill - self.tx_reserved
        if self._production(self.consumed + chunk) - base > free_out:
            # largest chunk whose production still fits the free output space
            limit = ((base + free_out + 1) * self.in_total - 1) // self.out_total
            chunk = min(chunk, limit - self.consumed)
            if chunk <= 0:
                return  # output buffer full: stall until a TX transfer drains it
        produced = self._production(self.consumed + chunk) - base
        self.tx_reserved += produced
        self.run_active = True
        self._run_bytes = chunk
        self._run_produced = produced
        self._run_started = self.host.now()
        if self.first_run_start is None:
            self.first_run_start = self._run_started
        duration = max(1, math.ceil(chunk / self.params.process_rate))
        final = self.consumed + chunk == self.in_total
        self.host.schedule_compute(self.acc, duration, final)

    def on_run_end(self) -> None:
        if not self.run_active:
            raise SimulationError(f"acc {self.acc}: compute boundary with no active run")
        self.run_active = False
        self.compute_busy_ns += self.host.now() - self._run_started
        self.last_run_end = self.host.now()
        self.consumed += self._run_bytes
        self.rx_buffer_fill -= self._run_bytes
        self.tx_reserved -= self._run_produced
        self.tx_buffer_fill += self._run_produced
        self.produced += self._run_produced
        self._check_bounds()
        if self.consumed == self.in_total:
            assert self.produced == self.out_total
            self.host.compute_finished(self.acc, self.command)
        self.pump()

    # -- shared -------------------------------------------------------------

    def pump(self) -> None:
        """Fire every action the current state allows (run, RX issue, TX issue)."""
        self._maybe_start_run()
        rx = self.try_issue_rx()
        if rx is not None:
            self.host.present_rx(self.acc, rx)
        tx = self.try_issue_tx()
        if tx is not None:
            self.host.present_tx(self.acc, tx)

    def _finish_command(self) -> None:
        command = self.command
        assert command is not None
        assert not self.rx_sg_queue and not self.tx_sg_queue
        assert self.rx_buffer_fill == 0 and self.rx_outstanding == 0
        assert self.tx_buffer_fill == 0 and self.tx_reserved == 0 and self.tx_inflight == 0
        self.command = None
        self.host.command_finished(self.acc, command)

    def _check_bounds(self) -> None:
        assert 0 <= self.rx_buffer_fill + self.rx_outstanding <= self.buffer_capacity, (
            f"acc {self.acc}: RX buffer accounting out of bounds"
        )
        assert 0 <= self.tx_buffer_fill + self.tx_reserved <= self.buffer_capacity, (
            f"acc {self.acc}: TX buffer accounting out of bounds"
        )
        assert 0 <= self.tx_inflight <= self.tx_buffer_fill
