"""Self-contained accelerator commands, group queues, and the command detector.

A command carries everything needed to service a request without further
host interaction: ids, the requested accelerator type, and the compact
scatter-gather lists for every input and output stream.
"""

from collections import deque
from dataclasses import dataclass

from .sglist import CompactSgList, total_bytes

ACCEPTED = "accepted"
REJECTED_FULL = "rejected-full"
REJECTED_UNMAPPED = "rejected-unmapped"


@dataclass(frozen=True, slots=True)
class Command:
    command_id: int
    core_id: int
    acc_type: int
    rx_lists: tuple[CompactSgList, ...]
    tx_lists: tuple[CompactSgList, ...]
    submit_time: int

    def __post_init__(self):
        if not self.rx_lists or not self.tx_lists:
            raise ValueError("a command needs at least one RX and one TX list")

    def rx_bytes(self) -> int:
        return sum(total_bytes(lst) for lst in self.rx_lists)

    def tx_bytes(self) -> int:
        return sum(total_bytes(lst) for lst in self.tx_lists)


class CommandQueue:
    """Bounded strict-FIFO command queue for one accelerator group."""

    def __init__(self, group_id: int, capacity: int):
        self.group_id = group_id
        self.capacity = capacity
        self.entries: deque[Command] = deque()

    def __len__(self) -> int:
        return len(self.entries)

    def enqueue(self, cmd: Command) -> str:
        """Append at the tail; full queues push back on the submitter."""
        if len(self.entries) >= self.capacity:
            return REJECTED_FULL
        self.entries.append(cmd)
        return ACCEPTED

    def head(self) -> Command | None:
        return self.entries[0] if self.entries else None

    def dequeue(self) -> Command:
        return self.entries.popleft()


def classify_command(acc_type: int, type_to_group: list[int]) -> int | None:
    """Map a command's accelerator type to its group queue index.

    Returns None for types the grouping configuration does not map;
    callers count those as rejected rather than halting the run.
    """
    if 0 <= acc_type < len(type_to_group):
        return type_to_group[acc_type]
    return None
