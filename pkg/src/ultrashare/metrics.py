"""Metrics collection and report emission.

The collector consumes a stream of trace records - plain (time, kind,
fields) tuples emitted by the simulation - and aggregates them into a
MetricsReport. Nothing else feeds the report, so replaying a dumped trace
through a fresh collector reproduces it exactly.
"""

import json
from dataclasses import asdict, dataclass


def percentile(sorted_values: list[int], pct: float) -> int:
    """Nearest-rank percentile of an ascending list (exact, no interpolation)."""
    if not sorted_values:
        return 0
    rank = max(1, -(-len(sorted_values) * pct // 100))  # ceil
    return sorted_values[int(rank) - 1]


@dataclass(slots=True)
class AccStats:
    requests_completed: int = 0
    busy_time: int = 0
    idle_time: int = 0
    rx_bytes: int = 0
    tx_bytes: int = 0
    rx_share: float = 0.0  # fraction of link capacity-time consumed
    tx_share: float = 0.0


@dataclass(slots=True)
class AppStats:
    requests_submitted: int = 0
    requests_completed: int = 0
    requests_rejected: int = 0
    throughput_rps: float = 0.0
    latency_mean_ns: float = 0.0
    latency_p50_ns: int = 0
    latency_p95_ns: int = 0
    latency_p99_ns: int = 0
    busy_time_attributed: int = 0


@dataclass(slots=True)
class QueueStats:
    max_depth: int = 0
    total_wait_time: int = 0
    pending_at_end: int = 0


@dataclass(slots=True)
class MetricsReport:
    duration_ns: int
    per_acc: list[AccStats]
    per_app: dict[int, AppStats]
    per_queue: list[QueueStats]
    rx_link_utilization: float
    tx_link_utilization: float
    completed_total: int
    incomplete_at_cutoff: int
    rejected: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "duration_ns": self.duration_ns,
            "per_acc": [asdict(a) for a in self.per_acc],
            "per_app": {str(k): asdict(v) for k, v in sorted(self.per_app.items())},
            "per_queue": [asdict(q) for q in self.per_queue],
            "rx_link_utilization": self.rx_link_utilization,
            "tx_link_utilization": self.tx_link_utilization,
            "completed_total": self.completed_total,
            "incomplete_at_cutoff": self.incomplete_at_cutoff,
            "rejected": dict(sorted(self.rejected.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            duration_ns=d["duration_ns"],
            per_acc=[AccStats(**a) for a in d["per_acc"]],
            per_app={int(k): AppStats(**v) for k, v in d["per_app"].items()},
            per_queue=[QueueStats(**q) for q in d["per_queue"]],
            rx_link_utilization=d["rx_link_utilization"],
            tx_link_utilization=d["tx_link_utilization"],
            completed_total=d["completed_total"],
            incomplete_at_cutoff=d["incomplete_at_cutoff"],
            rejected=dict(d["rejected"]),
        )


class MetricsCollector:
    """Streams trace records into aggregate counters."""

    def __init__(self, n_accs: int, n_queues: int, rx_bandwidth: float, tx_bandwidth: float,
                 keep_trace: bool = False):
        self.n_accs = n_accs
        self.n_queues = n_queues
        self.rx_bandwidth = rx_bandwidth
        self.tx_bandwidth = tx_bandwidth
        self.keep_trace = keep_trace
        self.trace: list[tuple[int, str, dict]] = []

        self._cmd_app: dict[int, int] = {}
        self._cmd_submit: dict[int, int] = {}
        self._cmd_expected: dict[int, tuple[int, int]] = {}
        self._cmd_delivered: dict[int, list[int]] = {}
        self._cmd_enqueue: dict[int, tuple[int, int]] = {}  # command -> (queue, time)
        self._cmd_alloc: dict[int, tuple[int, int]] = {}  # command -> (acc, time)
        self._open_alloc: dict[int, tuple[int, int]] = {}  # same, removed on completion
        self._latencies: dict[int, list[int]] = {}
        self._submitted: dict[int, int] = {}
        self._rejected_app: dict[int, int] = {}
        self._rejected_reason: dict[str, int] = {}
        self._completed_app: dict[int, int] = {}
        self._busy_acc = [0] * n_accs
        self._completed_acc = [0] * n_accs
        self._rx_bytes = [0] * n_accs
        self._tx_bytes = [0] * n_accs
        self._queue_depth_max = [0] * n_queues
        self._queue_wait = [0] * n_queues
        self._queue_pending = [0] * n_queues
        self._chunk_open: dict[str, int] = {}
        self._link_busy = {"rx": 0, "tx": 0}
        self._app_busy: dict[int, int] = {}
        self.conservation_violations: list[str] = []
        self._dispatch = {
            "command-arrival": self._on_command_arrival,
            "command-rejected": self._on_command_rejected,
            "command-enqueued": self._on_command_enqueued,
            "command-allocated": self._on_command_allocated,
            "data-chunk-start": self._on_data_chunk_start,
            "data-chunk-complete": self._on_data_chunk_complete,
            "command-complete": self._on_command_complete,
        }

    # -- record intake ------------------------------------------------------

    def record_event(self, time: int, kind: str, fields: dict) -> None:
        if self.keep_trace:
            self.trace.append((time, kind, fields))
        handler = self._dispatch.get(kind)
        if handler is not None:
            handler(time, fields)

    def _on_command_arrival(self, time, f):
        if f.get("retry"):
            return
        cmd = f["command_id"]
        app = f["app_id"]
        self._cmd_app[cmd] = app
        self._cmd_submit[cmd] = time
        self._cmd_expected[cmd] = (f["rx_bytes"], f["tx_bytes"])
        self._cmd_delivered[cmd] = [0, 0]
        self._submitted[app] = self._submitted.get(app, 0) + 1

    def _on_command_rejected(self, time, f):
        app = self._cmd_app.get(f["command_id"], -1)
        self._rejected_app[app] = self._rejected_app.get(app, 0) + 1
        reason = f["reason"]
        self._rejected_reason[reason] = self._rejected_reason.get(reason, 0) + 1

    def _on_command_enqueued(self, time, f):
        queue = f["queue"]
        self._cmd_enqueue[f["command_id"]] = (queue, time)
        if queue < self.n_queues:
            self._queue_depth_max[queue] = max(self._queue_depth_max[queue], f["depth"])
            self._queue_pending[queue] += 1

    def _on_command_allocated(self, time, f):
        cmd = f["command_id"]
        acc = f["acc"]
        self._cmd_alloc[cmd] = (acc, time)
        self._open_alloc[cmd] = (acc, time)
        queue, t_enq = self._cmd_enqueue.get(cmd, (None, time))
        if queue is not None and queue < self.n_queues:
            self._queue_wait[queue] += time - t_enq
            self._queue_pending[queue] -= 1

    def _on_data_chunk_start(self, time, f):
        self._chunk_open[f["channel"]] = time

    def _on_data_chunk_complete(self, time, f):
        channel = f["channel"]
        acc = f["acc"]
        started = self._chunk_open.pop(channel, time)
        self._link_busy[channel] += time - started
        length = f["length"]
        cmd = f.get("command_id")
        delivered = self._cmd_delivered.get(cmd)
        if channel == "rx":
            self._rx_bytes[acc] += length
            if delivered is not None:
                delivered[0] += length
        else:
            self._tx_bytes[acc] += length
            if delivered is not None:
                delivered[1] += length

    def _on_command_complete(self, time, f):
        cmd = f["command_id"]
        app = self._cmd_app.get(cmd, -1)
        acc, t_alloc = self._open_alloc.pop(cmd, (f["acc"], time))
        self._busy_acc[acc] += time - t_alloc
        self._completed_acc[acc] += 1
        self._completed_app[app] = self._completed_app.get(app, 0) + 1
        self._app_busy[app] = self._app_busy.get(app, 0) + (time - t_alloc)
        self._latencies.setdefault(app, []).append(time - self._cmd_submit.get(cmd, time))
        expected = self._cmd_expected.get(cmd)
        delivered = self._cmd_delivered.get(cmd)
        if expected is not None and delivered is not None and list(expected) != delivered:
            self.conservation_violations.append(
                f"command {cmd}: moved rx/tx {delivered} != declared {list(expected)}"
            )

    # -- report -------------------------------------------------------------

    def report(self, duration: int) -> MetricsReport:
        busy = list(self._busy_acc)
        app_busy = dict(self._app_busy)
        for cmd, (acc, t_alloc) in self._open_alloc.items():
            busy[acc] += duration - t_alloc
            app = self._cmd_app.get(cmd, -1)
            app_busy[app] = app_busy.get(app, 0) + (duration - t_alloc)

        per_acc = []
        for i in range(self.n_accs):
            per_acc.append(
                AccStats(
                    requests_completed=self._completed_acc[i],
                    busy_time=busy[i],
                    idle_time=duration - busy[i],
                    rx_bytes=self._rx_bytes[i],
                    tx_bytes=self._tx_bytes[i],
                    rx_share=self._rx_bytes[i] / (self.rx_bandwidth * duration),
                    tx_share=self._tx_bytes[i] / (self.tx_bandwidth * duration),
                )
            )

        per_app: dict[int, AppStats] = {}
        for app in sorted(self._submitted):
            lats = sorted(self._latencies.get(app, []))
            n = len(lats)
            per_app[app] = AppStats(
                requests_submitted=self._submitted[app],
                requests_completed=self._completed_app.get(app, 0),
                requests_rejected=self._rejected_app.get(app, 0),
                throughput_rps=self._completed_app.get(app, 0) / (duration * 1e-9),
                latency_mean_ns=sum(lats) / n if n else 0.0,
                latency_p50_ns=percentile(lats, 50),
                latency_p95_ns=percentile(lats, 95),
                latency_p99_ns=percentile(lats, 99),
                busy_time_attributed=app_busy.get(app, 0),
            )

        per_queue = [
            QueueStats(self._queue_depth_max[q], self._queue_wait[q], self._queue_pending[q])
            for q in range(self.n_queues)
        ]
        completed = sum(self._completed_app.values())
        submitted = sum(self._submitted.values())
        unmapped = self._rejected_reason.get("rejected-unmapped", 0)
        return MetricsReport(
            duration_ns=duration,
            per_acc=per_acc,
            per_app=per_app,
            per_queue=per_queue,
            rx_link_utilization=self._link_busy["rx"] / duration,
            tx_link_utilization=self._link_busy["tx"] / duration,
            completed_total=completed,
            incomplete_at_cutoff=submitted - completed - unmapped,
            rejected=dict(self._rejected_reason),
        )


# -- emission ----------------------------------------------------------------


def emit_report(report: MetricsReport, fmt: str = "structured") -> str:
    if fmt == "structured":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if fmt == "table-rows":
        return "\n".join(",".join(str(c) for c in row) for row in report_rows(report))
    if fmt == "summary-text":
        return _summary(report)
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(text: str) -> MetricsReport:
    return MetricsReport.from_dict(json.loads(text))


def report_rows(report: MetricsReport) -> list[tuple]:
    """Flat (scope, id, metric, value) rows for external plotting."""
    rows: list[tuple] = [("scope", "id", "metric", "value")]
    d = report.to_dict()
    for scope, items in (("acc", d["per_acc"]), ("queue", d["per_queue"])):
        for i, stats in enumerate(items):
            for key, value in stats.items():
                rows.append((scope, i, key, value))
    for app, stats in d["per_app"].items():
        for key, value in stats.items():
            rows.append(("app", app, key, value))
    for key in (
        "duration_ns",
        "rx_link_utilization",
        "tx_link_utilization",
        "completed_total",
        "incomplete_at_cutoff",
    ):
        rows.append(("global", "", key, d[key]))
    for reason, count in d["rejected"].items():
        rows.append(("global", "", f"rejected[{reason}]", count))
    return rows


def _summary(r: MetricsReport) -> str:
    lines = [
        f"simulated {r.duration_ns / 1e6:.3f} ms   completed {r.completed_total}"
        f"   incomplete {r.incomplete_at_cutoff}   rejected {sum(r.rejected.values())}",
        f"link utilization: rx {r.rx_link_utilization:6.2%}   tx {r.tx_link_utilization:6.2%}",
        "",
        "acc   done      busy%     rx_bytes       tx_bytes   rx_share  tx_share",
    ]
    for i, a in enumerate(r.per_acc):
        busy_pct = a.busy_time / r.duration_ns if r.duration_ns else 0.0
        lines.append(
            f"{i:3d} {a.requests_completed:6d} {busy_pct:9.2%} {a.rx_bytes:12d} "
            f"{a.tx_bytes:14d} {a.rx_share:9.3f} {a.tx_share:9.3f}"
        )
    lines.append("")
    lines.append("app   done   rejected   req/s        mean_ms    p50_ms    p95_ms    p99_ms")
    for app, s in sorted(r.per_app.items()):
        lines.append(
            f"{app:3d} {s.requests_completed:6d} {s.requests_rejected:10d} "
            f"{s.throughput_rps:9.1f} {s.latency_mean_ns / 1e6:12.4f} "
            f"{s.latency_p50_ns / 1e6:9.4f} {s.latency_p95_ns / 1e6:9.4f} "
            f"{s.latency_p99_ns / 1e6:9.4f}"
        )
    return "\n".join(lines)
