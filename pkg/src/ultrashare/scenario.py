"""Scenario configuration: schema, defaults, validation, JSON loading.

A scenario is a plain JSON document. Validation reports every problem it
finds with the dotted path of the offending field, so a bad config fails
with actionable messages instead of a mid-run crash.
"""

import json
from dataclasses import dataclass, field

from .controller import AccelParams
from .link import LinkModel

MODES = ("ultrashare", "single-queue", "static")

DEFAULT_PAGE_SIZE = 4096
DEFAULT_PAGES_PER_BUFFER = 4
DEFAULT_QUEUE_CAPACITY = 64
DEFAULT_SG_FETCH_LATENCY = 500
DEFAULT_TRANSFER_OVERHEAD = 200
DEFAULT_RESUBMIT_DELAY = 1000
# Default host-side preparation cost when an app does not set one: the
# submitting core touches every frame byte at roughly 16 bytes/ns.
DEFAULT_PREP_BYTES_PER_NS = 16


@dataclass(frozen=True, slots=True)
class AppSpec:
    app_id: int
    acc_type: int
    frame_bytes_in: int
    frame_bytes_out: int
    prep_time_ns: int
    max_outstanding: int
    threads: int = 1
    total_requests: int | None = None
    static_accs: tuple[int, ...] | None = None
    start_offset_ns: int = 0
    prep_jitter_ns: int = 0


@dataclass(frozen=True, slots=True)
class TimelineAction:
    time_ns: int
    action: str  # "regroup" | "reweight"
    group: int | None = None
    row: tuple[bool, ...] | None = None
    weights: tuple[int, ...] | None = None


@dataclass(slots=True)
class ScenarioConfig:
    mode: str
    seed: int
    duration_ns: int
    accelerators: list[AccelParams]
    apps: list[AppSpec]
    link: LinkModel
    priority_weights: list[int]
    group_rows: list[list[bool]]
    type_to_group: list[int]
    page_size: int = DEFAULT_PAGE_SIZE
    pages_per_buffer: int = DEFAULT_PAGES_PER_BUFFER
    queue_capacity: int = DEFAULT_QUEUE_CAPACITY
    sg_fetch_latency_ns: int = DEFAULT_SG_FETCH_LATENCY
    resubmit_delay_ns: int = DEFAULT_RESUBMIT_DELAY
    timeline: list[TimelineAction] = field(default_factory=list)

    @property
    def n_accs(self) -> int:
        return len(self.accelerators)

    @property
    def n_types(self) -> int:
        return max(a.acc_type for a in self.accelerators) + 1


class ScenarioError(ValueError):
    """Carries every validation problem found, each tagged with its field path."""

    def __init__(self, issues: list[tuple[str, str]]):
        self.issues = issues
        lines = "; ".join(f"{path}: {msg}" for path, msg in issues)
        super().__init__(f"invalid scenario: {lines}")


def _get(d, key, default=None):
    return d.get(key, default) if isinstance(d, dict) else default


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed JSON document."""
    issues: list[tuple[str, str]] = []

    def bad(path, msg):
        issues.append((path, msg))

    if not isinstance(raw, dict):
        raise ScenarioError([("", "scenario must be a JSON object")])

    mode = _get(raw, "mode", "ultrashare")
    if mode not in MODES:
        bad("mode", f"{mode!r} is not one of {MODES}")
    seed = _get(raw, "seed", 0)
    if not isinstance(seed, int) or seed < 0:
        bad("seed", "must be a non-negative integer")
    duration = _get(raw, "duration_ns", 0)
    if not isinstance(duration, int) or duration <= 0:
        bad("duration_ns", "must be a positive integer")

    page_size = _get(raw, "page_size", DEFAULT_PAGE_SIZE)
    if not isinstance(page_size, int) or page_size < 1:
        bad("page_size", "must be a positive integer")
        page_size = DEFAULT_PAGE_SIZE
    pages = _get(raw, "pages_per_buffer", DEFAULT_PAGES_PER_BUFFER)
    if not isinstance(pages, int) or pages < 1:
        bad("pages_per_buffer", "must be >= 1")
        pages = DEFAULT_PAGES_PER_BUFFER
    qcap = _get(raw, "queue_capacity", DEFAULT_QUEUE_CAPACITY)
    if not isinstance(qcap, int) or qcap < 1:
        bad("queue_capacity", "must be >= 1")
        qcap = DEFAULT_QUEUE_CAPACITY
    fetch = _get(raw, "sg_fetch_latency_ns", DEFAULT_SG_FETCH_LATENCY)
    if not isinstance(fetch, int) or fetch < 0:
        bad("sg_fetch_latency_ns", "must be >= 0")
        fetch = DEFAULT_SG_FETCH_LATENCY
    resubmit = _get(raw, "resubmit_delay_ns", DEFAULT_RESUBMIT_DELAY)
    if not isinstance(resubmit, int) or resubmit < 1:
        bad("resubmit_delay_ns", "must be >= 1")
        resubmit = DEFAULT_RESUBMIT_DELAY

    raw_accs = _get(raw, "accelerators")
    accelerators: list[AccelParams] = []
    if not isinstance(raw_accs, list) or not raw_accs:
        bad("accelerators", "need at least one accelerator")
        raw_accs = []
    for i, a in enumerate(raw_accs):
        path = f"accelerators[{i}]"
        acc_type = _get(a, "acc_type", 0)
        rate = _get(a, "process_rate")
        startup = _get(a, "startup_latency_ns", 0)
        fin = _get(a, "input_bytes_per_frame", 1)
        fout = _get(a, "output_bytes_per_frame", 1)
        if not isinstance(acc_type, int) or acc_type < 0:
            bad(f"{path}.acc_type", "must be a non-negative integer")
            continue
        if not isinstance(rate, (int, float)) or rate <= 0:
            bad(f"{path}.process_rate", "must be a positive number (bytes/ns)")
            continue
        if not isinstance(startup, int) or startup < 0:
            bad(f"{path}.startup_latency_ns", "must be >= 0")
            continue
        if not isinstance(fin, int) or fin <= 0 or not isinstance(fout, int) or fout <= 0:
            bad(f"{path}.input_bytes_per_frame", "frame byte sizes must be positive integers")
            continue
        accelerators.append(AccelParams(i, acc_type, startup, float(rate), fin, fout))

    n_accs = len(accelerators)
    acc_types = [a.acc_type for a in accelerators]
    n_types = (max(acc_types) + 1) if acc_types else 0

    grouping = _get(raw, "grouping", {}) or {}
    type_to_group = _get(grouping, "type_to_group")
    if type_to_group is None:
        type_to_group = list(range(n_types))
    elif not (
        isinstance(type_to_group, list)
        and all(isinstance(g, int) and g >= 0 for g in type_to_group)
    ):
        bad("grouping.type_to_group", "must be a list of non-negative group indices")
        type_to_group = list(range(n_types))

    group_rows = _get(grouping, "groups")
    if group_rows is None:
        n_groups = (max(type_to_group) + 1) if type_to_group else 1
        group_rows = [
            [acc_types[i] < len(type_to_group) and type_to_group[acc_types[i]] == g for i in range(n_accs)]
            for g in range(n_groups)
        ]
    else:
        ok = isinstance(group_rows, list) and group_rows
        if ok:
            for gi, row in enumerate(group_rows):
                if not isinstance(row, list) or len(row) != n_accs or not all(
                    isinstance(v, bool) for v in row
                ):
                    bad(f"grouping.groups[{gi}]", f"must be a list of {n_accs} booleans")
                    ok = False
        if not ok:
            group_rows = [[True] * max(n_accs, 1)]
        for t, g in enumerate(type_to_group):
            if g >= len(group_rows):
                bad("grouping.type_to_group", f"type {t} maps to missing group {g}")

    weights = _get(raw, "priority_weights")
    if weights is None:
        weights = [1] * n_accs
    if (
        not isinstance(weights, list)
        or len(weights) != n_accs
        or not all(isinstance(w, int) and 1 <= w <= 255 for w in weights)
    ):
        bad("priority_weights", f"must be {n_accs} integers in 1..255")
        weights = [1] * max(n_accs, 1)

    raw_link = _get(raw, "link", {}) or {}
    rx_bw = _get(raw_link, "rx_bandwidth", 4.0)
    tx_bw = _get(raw_link, "tx_bandwidth", 4.0)
    overhead = _get(raw_link, "per_transfer_overhead_ns", DEFAULT_TRANSFER_OVERHEAD)
    link = None
    if not isinstance(rx_bw, (int, float)) or rx_bw <= 0:
        bad("link.rx_bandwidth", "must be a positive number (bytes/ns)")
    elif not isinstance(tx_bw, (int, float)) or tx_bw <= 0:
        bad("link.tx_bandwidth", "must be a positive number (bytes/ns)")
    elif not isinstance(overhead, int) or overhead < 0:
        bad("link.per_transfer_overhead_ns", "must be >= 0")
    else:
        link = LinkModel(float(rx_bw), float(tx_bw), overhead)

    raw_apps = _get(raw, "apps")
    apps: list[AppSpec] = []
    if not isinstance(raw_apps, list):
        bad("apps", "must be a list")
        raw_apps = []
    for i, a in enumerate(raw_apps):
        path = f"apps[{i}]"
        acc_type = _get(a, "acc_type", 0)
        if not isinstance(acc_type, int) or not (0 <= acc_type < max(n_types, 1)):
            bad(f"{path}.acc_type", f"references type {acc_type} but types are 0..{n_types - 1}")
            continue
        fin = _get(a, "frame_bytes_in", 0)
        fout = _get(a, "frame_bytes_out", fin)
        if not isinstance(fin, int) or fin <= 0:
            bad(f"{path}.frame_bytes_in", "must be a positive integer")
            continue
        if not isinstance(fout, int) or fout <= 0:
            bad(f"{path}.frame_bytes_out", "must be a positive integer")
            continue
        prep = _get(a, "prep_time_ns")
        if prep is None:
            prep = fin // DEFAULT_PREP_BYTES_PER_NS
        if not isinstance(prep, int) or prep < 0:
            bad(f"{path}.prep_time_ns", "must be >= 0")
            continue
        window = _get(a, "max_outstanding", 1)
        if not isinstance(window, int) or window < 1:
            bad(f"{path}.max_outstanding", "must be >= 1")
            continue
        threads = _get(a, "threads", 1)
        if not isinstance(threads, int) or threads < 1:
            bad(f"{path}.threads", "must be >= 1")
            continue
        total = _get(a, "total_requests")
        if total is not None and (not isinstance(total, int) or total < 0):
            bad(f"{path}.total_requests", "must be >= 0 or omitted")
            continue
        offset = _get(a, "start_offset_ns", 0)
        jitter = _get(a, "prep_jitter_ns", 0)
        if not isinstance(offset, int) or offset < 0 or not isinstance(jitter, int) or jitter < 0:
            bad(f"{path}.start_offset_ns", "offset and jitter must be >= 0")
            continue
        static_accs = _get(a, "static_accs")
        if static_accs is not None:
            if (
                not isinstance(static_accs, list)
                or len(static_accs) != threads
                or not all(isinstance(s, int) for s in static_accs)
            ):
                bad(f"{path}.static_accs", f"must list one accelerator index per thread ({threads})")
                continue
            out_of_range = [s for s in static_accs if not (0 <= s < n_accs)]
            if out_of_range:
                bad(f"{path}.static_accs", f"indices {out_of_range} out of range 0..{n_accs - 1}")
                continue
        elif mode == "static":
            bad(f"{path}.static_accs", "static mode requires an accelerator index per thread")
            continue
        apps.append(
            AppSpec(
                app_id=_get(a, "app_id", i),
                acc_type=acc_type,
                frame_bytes_in=fin,
                frame_bytes_out=fout,
                prep_time_ns=prep,
                max_outstanding=window,
                threads=threads,
                total_requests=total,
                static_accs=tuple(static_accs) if static_accs is not None else None,
                start_offset_ns=offset,
                prep_jitter_ns=jitter,
            )
        )

    timeline: list[TimelineAction] = []
    raw_timeline = _get(raw, "timeline", []) or []
    if not isinstance(raw_timeline, list):
        bad("timeline", "must be a list")
        raw_timeline = []
    for i, entry in enumerate(raw_timeline):
        path = f"timeline[{i}]"
        t = _get(entry, "time_ns")
        action = _get(entry, "action")
        if not isinstance(t, int) or t < 0:
            bad(f"{path}.time_ns", "must be >= 0")
            continue
        if action == "regroup":
            group = _get(entry, "group")
            row = _get(entry, "row")
            if not isinstance(group, int) or not (0 <= group < len(group_rows)):
                bad(f"{path}.group", f"must be a group index 0..{len(group_rows) - 1}")
                continue
            if not isinstance(row, list) or len(row) != n_accs or not all(
                isinstance(v, bool) for v in row
            ):
                bad(f"{path}.row", f"must be a list of {n_accs} booleans")
                continue
            timeline.append(TimelineAction(t, "regroup", group=group, row=tuple(row)))
        elif action == "reweight":
            w = _get(entry, "weights")
            if (
                not isinstance(w, list)
                or len(w) != n_accs
                or not all(isinstance(x, int) and 1 <= x <= 255 for x in w)
            ):
                bad(f"{path}.weights", f"must be {n_accs} integers in 1..255")
                continue
            timeline.append(TimelineAction(t, "reweight", weights=tuple(w)))
        else:
            bad(f"{path}.action", f"{action!r} is not 'regroup' or 'reweight'")

    if issues:
        raise ScenarioError(issues)
    assert link is not None
    return ScenarioConfig(
        mode=mode,
        seed=seed,
        duration_ns=duration,
        accelerators=accelerators,
        apps=apps,
        link=link,
        priority_weights=weights,
        group_rows=group_rows,
        type_to_group=type_to_group,
        page_size=page_size,
        pages_per_buffer=pages,
        queue_capacity=qcap,
        sg_fetch_latency_ns=fetch,
        resubmit_delay_ns=resubmit,
        timeline=timeline,
    )


def parse_config(path: str) -> ScenarioConfig:
    """Load and validate a scenario file; raises ScenarioError with field paths."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError([("", f"not valid JSON: {exc}")]) from None
    return scenario_from_dict(raw)
