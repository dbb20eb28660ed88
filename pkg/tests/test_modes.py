import itertools
import random

import pytest

from helpers import acc, app, config, raw_scenario
from ultrashare.scenario import scenario_from_dict
from ultrashare.workloads import (
    build_system,
    generate_workload,
    run_scenario,
    run_single_queue_mode,
    run_static_mode,
)

PAGE = 4096
MS = 1_000_000


def run_traced(cfg):
    system = build_system(cfg, keep_trace=True)
    system.run()
    return system


def records(system, kind):
    return [(t, f) for t, k, f in system.collector.trace if k == kind]


# -- workload generator ----------------------------------------------------------


def test_outstanding_window_never_exceeded():
    cfg = config([acc(rate=0.001)], [app(prep=1 * MS, window=3)], duration_ns=60 * MS)
    system = run_traced(cfg)
    outstanding = 0
    peak = 0
    for _, kind, fields in system.collector.trace:
        if kind == "command-arrival" and not fields["retry"]:
            outstanding += 1
        elif kind == "command-complete":
            outstanding -= 1
        peak = max(peak, outstanding)
    assert peak == 3


def test_prep_time_sets_arrival_rate_when_unblocked():
    # fast service + wide windows: arrivals are limited only by preparation
    cfg = config(
        [acc(acc_type=0, rate=4.0), acc(acc_type=1, rate=4.0)],
        [app(acc_type=0, prep=1 * MS, window=8), app(acc_type=1, prep=4 * MS, window=8)],
        duration_ns=100 * MS,
    )
    system = run_traced(cfg)
    counts = {0: 0, 1: 0}
    for _, f in records(system, "command-arrival"):
        if not f["retry"]:
            counts[f["app_id"]] += 1
    assert counts[1] > 0
    assert abs(counts[0] / counts[1] - 4.0) < 0.5


def test_zero_requests_is_an_empty_stream():
    cfg = config([acc()], [app(total_requests=0)], duration_ns=10 * MS)
    assert generate_workload(cfg) == []
    report = run_scenario(cfg)
    assert report.completed_total == 0


def test_empty_app_list_runs_to_a_zero_report():
    cfg = config([acc()], [], duration_ns=10 * MS)
    report = run_scenario(cfg)
    assert report.completed_total == 0
    assert report.per_acc[0].idle_time == 10 * MS
    assert report.per_app == {}


# -- single-queue baseline ----------------------------------------------------------


def test_single_queue_head_blocks_later_types():
    # A's second command stalls at the head; B's command sits behind it even
    # though B's accelerator is idle the whole time
    slow = 5 * MS
    cfg_kw = dict(
        duration_ns=40 * MS,
        accelerators=[acc(acc_type=0, rate=PAGE / slow), acc(acc_type=1, rate=4.0)],
        apps=[
            app(acc_type=0, prep=100, window=2, total_requests=2),
            app(acc_type=1, prep=300, window=1, total_requests=1),
        ],
    )
    single = run_traced(scenario_from_dict(raw_scenario(mode="single-queue", **cfg_kw)))
    b_command = next(f["command_id"] for _, f in records(single, "command-arrival")
                     if f["app_id"] == 1)
    a1_done = min(t for t, f in records(single, "command-complete"))
    b_alloc = next(t for t, f in records(single, "command-allocated")
                   if f["command_id"] == b_command)
    assert b_alloc >= a1_done > 1 * MS

    grouped = run_traced(scenario_from_dict(raw_scenario(mode="ultrashare", **cfg_kw)))
    b_command = next(f["command_id"] for _, f in records(grouped, "command-arrival")
                     if f["app_id"] == 1)
    b_alloc = next(t for t, f in records(grouped, "command-allocated")
                   if f["command_id"] == b_command)
    assert b_alloc == 300  # served the moment it arrives


def test_single_queue_equals_grouped_with_one_type():
    cfg_kw = dict(
        duration_ns=50 * MS,
        accelerators=[acc(), acc(), acc()],
        apps=[app(window=4, prep=2000), app(window=2, prep=7000)],
        seed=5,
    )
    single = run_traced(scenario_from_dict(raw_scenario(mode="single-queue", **cfg_kw)))
    grouped = run_traced(scenario_from_dict(raw_scenario(mode="ultrashare", **cfg_kw)))
    assert single.collector.trace == grouped.collector.trace
    assert single.report() == grouped.report()


# -- static baseline ------------------------------------------------------------------


def static_config(assignment, duration=40 * MS, threads=3):
    return scenario_from_dict(raw_scenario(
        mode="static",
        duration_ns=duration,
        accelerators=[acc(), acc()],
        apps=[app(threads=threads, window=threads, prep=1000,
                  static_accs=list(assignment))],
    ))


def test_static_all_on_one_accelerator_serializes():
    report = run_static_mode(static_config((0, 0, 0)))
    assert report.per_acc[1].busy_time == 0
    assert report.per_acc[1].requests_completed == 0
    assert report.per_acc[0].busy_time > 39 * MS  # saturated


def test_static_imbalanced_assignment_uses_both():
    report = run_static_mode(static_config((0, 0, 1)))
    assert report.per_acc[0].busy_time > 0 and report.per_acc[1].busy_time > 0
    assert report.per_acc[0].requests_completed > report.per_acc[1].requests_completed


def test_static_single_thread_single_acc_equals_dynamic():
    base = dict(
        duration_ns=30 * MS,
        accelerators=[acc()],
        apps=[app(threads=1, window=1, prep=1000, static_accs=[0])],
    )
    static = run_traced(scenario_from_dict(raw_scenario(mode="static", **base)))
    dynamic = run_traced(scenario_from_dict(raw_scenario(mode="ultrashare", **base)))
    assert static.report() == dynamic.report()


def test_static_bijective_matches_per_type_singleton_groups():
    # one thread pinned per accelerator vs. one single-member group per type:
    # the same commands complete either way
    accelerators = [acc(acc_type=0), acc(acc_type=1, rate=0.002), acc(acc_type=2, rate=0.001)]
    apps = [
        app(acc_type=t, threads=1, window=2, prep=500 * (t + 1), static_accs=[t])
        for t in range(3)
    ]
    base = dict(duration_ns=40 * MS, accelerators=accelerators, apps=apps)
    static = run_traced(scenario_from_dict(raw_scenario(mode="static", **base)))
    dynamic = run_traced(scenario_from_dict(raw_scenario(mode="ultrashare", **base)))
    done_static = {f["command_id"] for _, f in records(static, "command-complete")}
    done_dynamic = {f["command_id"] for _, f in records(dynamic, "command-complete")}
    assert done_static == done_dynamic
    for mode_report in (static.report(), dynamic.report()):
        assert mode_report.completed_total == len(done_static)


def test_wrapper_mode_guards():
    cfg = config([acc()], [app()])
    with pytest.raises(ValueError):
        run_single_queue_mode(cfg)
    with pytest.raises(ValueError):
        run_static_mode(cfg)


def test_dynamic_completes_at_least_as_much_as_any_static_assignment():
    rng = random.Random(404)
    for trial in range(6):
        k = rng.randrange(1, 4)
        threads = rng.randrange(1, 5)
        rate = rng.choice([0.002, 0.004, 0.008])
        prep = rng.randrange(200, 3000)
        duration = 20 * MS
        accelerators = [acc(rate=rate) for _ in range(k)]

        dynamic = run_scenario(scenario_from_dict(raw_scenario(
            mode="ultrashare", duration_ns=duration,
            accelerators=accelerators,
            apps=[app(threads=threads, window=threads, prep=prep)],
            seed=trial,
        )))
        for assignment in itertools.product(range(k), repeat=threads):
            static = run_scenario(scenario_from_dict(raw_scenario(
                mode="static", duration_ns=duration,
                accelerators=accelerators,
                apps=[app(threads=threads, window=threads, prep=prep,
                          static_accs=list(assignment))],
                seed=trial,
            )))
            assert dynamic.completed_total >= static.completed_total, (
                f"assignment {assignment} beat dynamic allocation"
            )
