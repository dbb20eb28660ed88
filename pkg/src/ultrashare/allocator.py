"""Dynamic accelerator allocation and its baseline variants.

The dynamic allocator walks the group command queues round-robin. For the
queue under the cursor it masks the idle vector with that group's row of
the group table; if the mask is non-zero it dequeues the head command and
binds it to the idle accelerator with the smallest index. A queue whose
group has no idle member never blocks the others - the scan simply moves
on, which is the whole point of keeping one queue per group.

Two baselines share the interface: a single shared FIFO whose head blocks
everyone behind it until an accelerator of the head's own type goes idle,
and a static discipline where every submitting thread is pinned to one
accelerator index.
"""

from dataclasses import dataclass

from .commands import REJECTED_UNMAPPED, Command, CommandQueue, classify_command


@dataclass(slots=True)
class Allocation:
    queue_index: int
    command: Command
    acc_index: int


@dataclass(slots=True)
class RequestInfo:
    """Bookkeeping kept between allocation and SG-list arrival."""

    command_id: int
    allocated_acc: int
    rx_list_lengths: tuple[int, ...]
    tx_list_lengths: tuple[int, ...]


class GroupTable:
    """Boolean groups-by-accelerators membership matrix, reconfigurable at runtime."""

    def __init__(self, rows: list[list[bool]]):
        if not rows:
            raise ValueError("group table needs at least one group row")
        width = len(rows[0])
        if width == 0 or any(len(r) != width for r in rows):
            raise ValueError("group table rows must be non-empty and equal length")
        self.rows = [list(r) for r in rows]

    @property
    def n_groups(self) -> int:
        return len(self.rows)

    @property
    def n_accs(self) -> int:
        return len(self.rows[0])

    def set_row(self, group_id: int, row: list[bool]) -> None:
        """Atomic regroup between allocation steps; in-flight work is untouched."""
        if not (0 <= group_id < self.n_groups):
            raise ValueError(f"group id {group_id} out of range 0..{self.n_groups - 1}")
        if len(row) != self.n_accs:
            raise ValueError(f"row length {len(row)} != accelerator count {self.n_accs}")
        self.rows[group_id] = list(row)

    @classmethod
    def by_type(cls, acc_types: list[int], n_types: int) -> "GroupTable":
        """One group per type; accelerator i joins the row of its own type."""
        rows = [[t == g for t in acc_types] for g in range(n_types)]
        return cls(rows)


def rightmost_idle(idle_mask: list[bool]) -> int | None:
    """Smallest index whose flag is set, or None when the mask is all false."""
    for i, idle in enumerate(idle_mask):
        if idle:
            return i
    return None


class DynamicAllocator:
    """Round-robin scan over per-group queues with idle-mask selection."""

    def __init__(self, table: GroupTable, type_to_group: list[int], queue_capacity: int):
        self.table = table
        self.type_to_group = list(type_to_group)
        self.queues = [CommandQueue(g, queue_capacity) for g in range(table.n_groups)]
        self.cursor = 0

    def submit(self, cmd: Command) -> tuple[str, int | None]:
        group = classify_command(cmd.acc_type, self.type_to_group)
        if group is None or not (0 <= group < len(self.queues)):
            return REJECTED_UNMAPPED, None
        return self.queues[group].enqueue(cmd), group

    def allocate_step(self, idle: list[bool]) -> Allocation | None:
        """One allocation attempt: scan at most n_groups queues from the cursor.

        On success the accelerator is marked busy in `idle`, the command is
        dequeued, and the cursor advances past the served queue. When no
        queue can be served the cursor is left where it started.
        """
        n = len(self.queues)
        for step in range(n):
            q = (self.cursor + step) % n
            queue = self.queues[q]
            if not queue.entries:
                continue
            row = self.table.rows[q]
            mask = [idle[i] and row[i] for i in range(len(idle))]
            acc = rightmost_idle(mask)
            if acc is None:
                continue
            cmd = queue.dequeue()
            idle[acc] = False
            self.cursor = (q + 1) % n
            return Allocation(q, cmd, acc)
        return None


class SingleQueueAllocator:
    """Non-grouping baseline: one FIFO whose head can block everything behind it."""

    def __init__(self, acc_types: list[int], n_types: int, queue_capacity: int):
        self.acc_types = list(acc_types)
        self.n_types = n_types
        self.queue = CommandQueue(0, queue_capacity)
        self.queues = [self.queue]

    def submit(self, cmd: Command) -> tuple[str, int | None]:
        if not (0 <= cmd.acc_type < self.n_types):
            return REJECTED_UNMAPPED, None
        return self.queue.enqueue(cmd), 0

    def allocate_step(self, idle: list[bool]) -> Allocation | None:
        head = self.queue.head()
        if head is None:
            return None
        mask = [idle[i] and self.acc_types[i] == head.acc_type for i in range(len(idle))]
        acc = rightmost_idle(mask)
        if acc is None:
            return None  # head waits; everything behind it waits too
        self.queue.dequeue()
        idle[acc] = False
        return Allocation(0, head, acc)


class StaticAllocator:
    """Per-thread pinning baseline: core_id names the only legal accelerator."""

    def __init__(self, core_to_acc: dict[int, int], n_accs: int, queue_capacity: int):
        self.core_to_acc = dict(core_to_acc)
        self.queues = [CommandQueue(a, queue_capacity) for a in range(n_accs)]

    def submit(self, cmd: Command) -> tuple[str, int | None]:
        acc = self.core_to_acc.get(cmd.core_id)
        if acc is None:
            return REJECTED_UNMAPPED, None
        return self.queues[acc].enqueue(cmd), acc

    def allocate_step(self, idle: list[bool]) -> Allocation | None:
        for acc, queue in enumerate(self.queues):
            if queue.entries and idle[acc]:
                idle[acc] = False
                return Allocation(acc, queue.dequeue(), acc)
        return None


def make_request_info(alloc: Allocation) -> RequestInfo:
    cmd = alloc.command
    return RequestInfo(
        command_id=cmd.command_id,
        allocated_acc=alloc.acc_index,
        rx_list_lengths=tuple(len(lst.addresses) for lst in cmd.rx_lists),
        tx_list_lengths=tuple(len(lst.addresses) for lst in cmd.tx_lists),
    )
