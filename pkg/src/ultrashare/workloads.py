"""Application workload generators and the scenario entry points.

Each application runs one or more submitter threads. A thread loops:
prepare the next request for the app's preparation time, submit it as a
single self-contained command, and keep preparing ahead while earlier
requests are in flight - but never exceed the app's outstanding-request
window. Apps that prepare faster therefore submit more commands per unit
time until the window or the machine pushes back.
"""

from dataclasses import replace

from .commands import Command
from .engine import EventKind
from .metrics import MetricsReport
from .scenario import AppSpec, ScenarioConfig
from .sglist import build_sg_list
from .system import System

_THREAD_ADDRESS_STRIDE = 1 << 44  # keep per-thread synthetic addresses disjoint


class _Thread:
    __slots__ = ("core_id", "static_acc", "page_cursor", "parked")

    def __init__(self, core_id: int, static_acc: int | None):
        self.core_id = core_id
        self.static_acc = static_acc
        self.page_cursor = 0
        self.parked = False


class AppRuntime:
    """Drives one application's submitter threads against a System."""

    def __init__(self, spec: AppSpec, system: System, first_core: int):
        self.spec = spec
        self.system = system
        self.outstanding = 0
        self.submitted = 0
        self.threads: dict[int, _Thread] = {}
        self._parked_order: list[int] = []
        self._jitter_stream = f"app-{spec.app_id}-prep"
        if spec.prep_jitter_ns > 0:
            system.engine.rng.register(self._jitter_stream)
        for tid in range(spec.threads):
            core = first_core + tid
            static_acc = spec.static_accs[tid] if spec.static_accs is not None else None
            self.threads[core] = _Thread(core, static_acc)
            system.core_owner[core] = self

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        for core in self.threads:
            self._schedule_prep(core, self.spec.start_offset_ns + self._prep_duration())

    def _prep_duration(self) -> int:
        prep = self.spec.prep_time_ns
        if self.spec.prep_jitter_ns > 0:
            prep += self.system.engine.rng.uniform_int(
                self._jitter_stream, 0, self.spec.prep_jitter_ns
            )
        return prep

    def _schedule_prep(self, core: int, delay: int) -> None:
        self.system.engine.schedule_in(
            delay, EventKind.SCHEDULER_WAKEUP, {"unit": "app-prep", "core_id": core}
        )

    def _exhausted(self) -> bool:
        total = self.spec.total_requests
        return total is not None and self.submitted >= total

    def on_prep_done(self, core: int) -> None:
        """A thread finished preparing its next request."""
        if self._exhausted():
            return
        if self.outstanding >= self.spec.max_outstanding:
            thread = self.threads[core]
            if not thread.parked:
                thread.parked = True
                self._parked_order.append(core)
            return
        self._submit(core)

    def _submit(self, core: int) -> None:
        thread = self.threads[core]
        spec = self.spec
        system = self.system
        page = system.config.page_size
        base = (core + 1) * _THREAD_ADDRESS_STRIDE + thread.page_cursor * page
        rx = build_sg_list(spec.frame_bytes_in, page, base)
        tx_base = base + len(rx.addresses) * page
        tx = build_sg_list(spec.frame_bytes_out, page, tx_base)
        thread.page_cursor += len(rx.addresses) + len(tx.addresses)
        command = Command(
            command_id=system.next_command_id(),
            core_id=core,
            acc_type=spec.acc_type,
            rx_lists=(rx,),
            tx_lists=(tx,),
            submit_time=system.now(),
        )
        self.outstanding += 1
        self.submitted += 1
        system.submit_command(command)
        if not self._exhausted():
            self._schedule_prep(core, self._prep_duration())

    # -- feedback from the machine -------------------------------------------

    def _release_window(self) -> None:
        self.outstanding -= 1
        while self._parked_order and self.outstanding < self.spec.max_outstanding:
            core = self._parked_order.pop(0)
            self.threads[core].parked = False
            if not self._exhausted():
                self._submit(core)

    def on_command_complete(self, command: Command) -> None:
        self._release_window()

    def on_command_dropped(self, command: Command) -> None:
        self._release_window()


def build_system(config: ScenarioConfig, keep_trace: bool = False) -> System:
    """Construct a ready-to-run System with its applications attached."""
    system = System(config, keep_trace=keep_trace)
    core = 0
    apps = []
    for spec in config.apps:
        apps.append(AppRuntime(spec, system, core))
        core += spec.threads
    system.apps = apps
    for app in apps:
        app.start()
    return system


def run_scenario(config: ScenarioConfig, keep_trace: bool = False) -> MetricsReport:
    """Run a scenario to its configured duration and return the metrics report."""
    system = build_system(config, keep_trace=keep_trace)
    system.run()
    return system.report()


def run_single_queue_mode(config: ScenarioConfig) -> MetricsReport:
    if config.mode != "single-queue":
        raise ValueError("config mode must be 'single-queue'")
    return run_scenario(config)


def run_static_mode(config: ScenarioConfig) -> MetricsReport:
    if config.mode != "static":
        raise ValueError("config mode must be 'static'")
    return run_scenario(config)


def generate_workload(config: ScenarioConfig, app_index: int = 0) -> list[tuple[int, int]]:
    """Dry-run one app against an otherwise idle machine and list its arrival stream.

    Useful for inspecting submission behavior (windowing, preparation pacing)
    without the rest of the scenario; arrivals are returned as
    (arrival_time, command_id) pairs.
    """
    spec = config.apps[app_index]
    probe = replace(
        config,
        apps=[spec],
        mode=config.mode if config.mode != "static" else "ultrashare",
    )
    system = build_system(probe, keep_trace=True)
    system.run()
    out = []
    for time, kind, fields in system.collector.trace:
        if kind == "command-arrival" and not fields["retry"]:
            out.append((time, fields["command_id"]))
    return out
