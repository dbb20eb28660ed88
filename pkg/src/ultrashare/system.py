"""Wires the controller parts into one simulated machine.

One System owns the event engine, the dispatch discipline for the chosen
mode, one controller per accelerator, the two link channels, and the
metrics collector. Everything metric-relevant is emitted as a trace record
(time, kind, fields) so reports are a pure function of the trace.
"""

from collections import deque

from .allocator import (
    Allocation,
    DynamicAllocator,
    GroupTable,
    RequestInfo,
    SingleQueueAllocator,
    StaticAllocator,
    make_request_info,
)
from .commands import ACCEPTED, REJECTED_FULL, Command
from .controller import AcceleratorController
from .engine import Engine, EventKind, SimulationError
from .link import LinkChannel, PriorityTable
from .metrics import MetricsCollector
from .scenario import ScenarioConfig
from .sglist import decode_sg


class SgDistributor:
    """Routes decoded SG elements to the controller named by the request info queue."""

    def __init__(self, controllers: list[AcceleratorController]):
        self.controllers = controllers
        self.info_queue: deque[RequestInfo] = deque()

    def push_info(self, info: RequestInfo) -> None:
        self.info_queue.append(info)

    def distribute(self, command: Command) -> int:
        """Deliver a fetched command's RX and TX elements; returns the target accelerator."""
        if not self.info_queue or self.info_queue[0].command_id != command.command_id:
            head = self.info_queue[0].command_id if self.info_queue else None
            raise SimulationError(
                f"SG lists for command {command.command_id} arrived but request info head is {head}"
            )
        info = self.info_queue.popleft()
        rx = [e for lst in command.rx_lists for e in decode_sg(lst)]
        tx = [e for lst in command.tx_lists for e in decode_sg(lst)]
        self.controllers[info.allocated_acc].deliver_sg(rx, tx)
        return info.allocated_acc


class System:
    """One simulated controller instance plus its workload hooks."""

    def __init__(self, config: ScenarioConfig, keep_trace: bool = False):
        self.config = config
        self.engine = Engine(config.seed)
        k = config.n_accs

        self.group_table = GroupTable(config.group_rows)
        if config.mode == "ultrashare":
            self.allocator = DynamicAllocator(
                self.group_table, config.type_to_group, config.queue_capacity
            )
            n_queues = self.group_table.n_groups
        elif config.mode == "single-queue":
            acc_types = [a.acc_type for a in config.accelerators]
            self.allocator = SingleQueueAllocator(acc_types, config.n_types, config.queue_capacity)
            n_queues = 1
        elif config.mode == "static":
            core_to_acc: dict[int, int] = {}
            core = 0
            for app in config.apps:
                for tid in range(app.threads):
                    if app.static_accs is not None:
                        core_to_acc[core] = app.static_accs[tid]
                    core += 1
            self.allocator = StaticAllocator(core_to_acc, k, config.queue_capacity)
            n_queues = k
        else:
            raise ValueError(f"unknown mode {config.mode!r}")

        self.idle = [True] * k
        buffer_capacity = config.pages_per_buffer * config.page_size
        self.controllers = [
            AcceleratorController(params, buffer_capacity, self) for params in config.accelerators
        ]
        self.distributor = SgDistributor(self.controllers)

        self.priority_table = PriorityTable(config.priority_weights)
        link = config.link
        self.rx_channel = LinkChannel(
            "rx", link.rx_bandwidth, link.per_transfer_overhead, self.priority_table, k
        )
        self.tx_channel = LinkChannel(
            "tx", link.tx_bandwidth, link.per_transfer_overhead, self.priority_table, k
        )

        self.collector = MetricsCollector(
            k, n_queues, link.rx_bandwidth, link.tx_bandwidth, keep_trace=keep_trace
        )
        self._next_command_id = 0
        self.core_owner: dict[int, object] = {}  # core_id -> AppRuntime, filled by workloads
        self.apps: list = []

        eng = self.engine
        eng.on(EventKind.COMMAND_ARRIVAL, self._on_command_arrival)
        eng.on(EventKind.SG_FETCH_COMPLETE, self._on_sg_fetch_complete)
        eng.on(EventKind.DATA_CHUNK_START, self._on_data_chunk_start)
        eng.on(EventKind.DATA_CHUNK_COMPLETE, self._on_data_chunk_complete)
        eng.on(EventKind.COMPUTE_COMPLETE, self._on_compute_boundary)
        eng.on(EventKind.SCHEDULER_WAKEUP, self._on_wakeup)

        for action in config.timeline:
            eng.schedule(
                action.time_ns,
                EventKind.SCHEDULER_WAKEUP,
                {"unit": action.action, "action": action},
            )

    # -- small helpers -------------------------------------------------------

    def now(self) -> int:
        return self.engine.now()

    def next_command_id(self) -> int:
        cid = self._next_command_id
        self._next_command_id += 1
        return cid

    def emit(self, kind: str, fields: dict) -> None:
        self.collector.record_event(self.engine.now(), kind, fields)

    def run(self) -> None:
        self.engine.run_until(self.config.duration_ns)

    def report(self):
        return self.collector.report(self.config.duration_ns)

    # -- command path ----------------------------------------------------------

    def submit_command(self, command: Command, retry: bool = False) -> None:
        """Called by workload threads; the arrival itself is an engine event."""
        self.engine.schedule(
            self.engine.now(),
            EventKind.COMMAND_ARRIVAL,
            {"command": command, "retry": retry},
        )

    def _app_of(self, command: Command):
        return self.core_owner.get(command.core_id)

    def _on_command_arrival(self, event) -> None:
        command: Command = event.payload["command"]
        retry: bool = event.payload["retry"]
        app = self._app_of(command)
        app_id = app.spec.app_id if app is not None else -1
        self.emit(
            "command-arrival",
            {
                "command_id": command.command_id,
                "app_id": app_id,
                "core_id": command.core_id,
                "acc_type": command.acc_type,
                "rx_lists": command.rx_lists,
                "tx_lists": command.tx_lists,
                "submit_time": command.submit_time,
                "rx_bytes": command.rx_bytes(),
                "tx_bytes": command.tx_bytes(),
                "retry": retry,
            },
        )
        result, queue = self.allocator.submit(command)
        if result == ACCEPTED:
            self.emit(
                "command-enqueued",
                {
                    "command_id": command.command_id,
                    "queue": queue,
                    "depth": len(self.allocator.queues[queue]),
                },
            )
            self.allocator_pump()
        elif result == REJECTED_FULL:
            self.emit(
                "command-rejected",
                {"command_id": command.command_id, "reason": result},
            )
            self.engine.schedule_in(
                self.config.resubmit_delay_ns,
                EventKind.COMMAND_ARRIVAL,
                {"command": command, "retry": True},
            )
        else:
            self.emit(
                "command-rejected",
                {"command_id": command.command_id, "reason": result},
            )
            if app is not None:
                app.on_command_dropped(command)
        self.pump_channels()

    def allocator_pump(self) -> None:
        """Allocate until no queue can be served, requesting an SG fetch per binding."""
        while True:
            alloc = self.allocator.allocate_step(self.idle)
            if alloc is None:
                return
            self.emit(
                "command-allocated",
                {
                    "command_id": alloc.command.command_id,
                    "queue": alloc.queue_index,
                    "acc": alloc.acc_index,
                },
            )
            self.controllers[alloc.acc_index].assign(alloc.command)
            self.request_sg_fetch(alloc)

    def request_sg_fetch(self, alloc: Allocation) -> None:
        self.distributor.push_info(make_request_info(alloc))
        self.engine.schedule_in(
            self.config.sg_fetch_latency_ns,
            EventKind.SG_FETCH_COMPLETE,
            {"command": alloc.command},
        )

    def _on_sg_fetch_complete(self, event) -> None:
        command: Command = event.payload["command"]
        acc = self.distributor.distribute(command)
        self.emit("sg-fetch-complete", {"command_id": command.command_id, "acc": acc})
        self.pump_channels()

    # -- link path ---------------------------------------------------------------

    def _channel(self, name: str) -> LinkChannel:
        return self.rx_channel if name == "rx" else self.tx_channel

    def pump_channels(self) -> None:
        now = self.engine.now()
        for channel in (self.rx_channel, self.tx_channel):
            grant = channel.try_grant(now)
            if grant is None:
                continue
            acc, element = grant
            controller = self.controllers[acc]
            command_id = controller.command.command_id if controller.command else -1
            self.engine.schedule(
                now,
                EventKind.DATA_CHUNK_START,
                {"channel": channel.name, "acc": acc, "element": element, "command_id": command_id},
            )
            if channel.name == "rx":
                controller.on_rx_granted(element)
            else:
                controller.on_tx_granted(element)

    def _on_data_chunk_start(self, event) -> None:
        p = event.payload
        element = p["element"]
        self.emit(
            "data-chunk-start",
            {
                "channel": p["channel"],
                "acc": p["acc"],
                "command_id": p["command_id"],
                "address": element.address,
                "length": element.length,
            },
        )
        duration = self._channel(p["channel"]).transfer_time(element.length)
        self.engine.schedule_in(duration, EventKind.DATA_CHUNK_COMPLETE, dict(p))

    def _on_data_chunk_complete(self, event) -> None:
        p = event.payload
        element = p["element"]
        channel = self._channel(p["channel"])
        acc = p["acc"]
        self.emit(
            "data-chunk-complete",
            {
                "channel": p["channel"],
                "acc": acc,
                "command_id": p["command_id"],
                "address": element.address,
                "length": element.length,
            },
        )
        channel.complete(acc, element)
        if p["channel"] == "rx":
            self.controllers[acc].on_rx_complete(element)
        else:
            self.controllers[acc].on_tx_complete(element)
        self.pump_channels()

    # -- controller host callbacks -------------------------------------------------

    def present_rx(self, acc: int, element) -> None:
        self.rx_channel.present(acc, element)

    def present_tx(self, acc: int, element) -> None:
        self.tx_channel.present(acc, element)

    def schedule_compute(self, acc: int, delay: int, final: bool) -> None:
        if final:
            self.engine.schedule_in(delay, EventKind.COMPUTE_COMPLETE, {"acc": acc})
        else:
            self.engine.schedule_in(
                delay, EventKind.SCHEDULER_WAKEUP, {"unit": "compute-run", "acc": acc}
            )

    def schedule_compute_wakeup(self, acc: int, delay: int) -> None:
        self.engine.schedule_in(
            delay, EventKind.SCHEDULER_WAKEUP, {"unit": "compute-ready", "acc": acc}
        )

    def compute_finished(self, acc: int, command: Command) -> None:
        self.emit("compute-complete", {"acc": acc, "command_id": command.command_id})

    def command_finished(self, acc: int, command: Command) -> None:
        app = self._app_of(command)
        self.emit(
            "command-complete",
            {
                "command_id": command.command_id,
                "acc": acc,
                "app_id": app.spec.app_id if app is not None else -1,
            },
        )
        self.idle[acc] = True
        if app is not None:
            app.on_command_complete(command)
        self.allocator_pump()

    # -- compute / wakeup events ------------------------------------------------------

    def _on_compute_boundary(self, event) -> None:
        acc = event.payload["acc"]
        self.controllers[acc].on_run_end()
        self.pump_channels()

    def _on_wakeup(self, event) -> None:
        p = event.payload
        unit = p["unit"]
        info = {"unit": unit}
        if "acc" in p:
            info["acc"] = p["acc"]
        if "core_id" in p:
            info["core_id"] = p["core_id"]
        self.emit("scheduler-wakeup", info)
        if unit == "compute-run":
            self.controllers[p["acc"]].on_run_end()
        elif unit == "compute-ready":
            self.controllers[p["acc"]].pump()
        elif unit == "app-prep":
            app = self.core_owner.get(p["core_id"])
            if app is not None:
                app.on_prep_done(p["core_id"])
        elif unit == "regroup":
            action = p["action"]
            self.group_table.set_row(action.group, list(action.row))
            self.allocator_pump()
        elif unit == "reweight":
            self.priority_table.replace(list(p["action"].weights))
        elif unit == "hold":
            self._channel(p["channel"]).blocked_until = p["until"]
        self.pump_channels()
