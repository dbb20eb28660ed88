"""Scenario-building shorthand shared by the test modules."""

from ultrashare.scenario import scenario_from_dict


def acc(acc_type=0, rate=0.004096, startup=0, frame_in=4096, frame_out=4096):
    return {
        "acc_type": acc_type,
        "process_rate": rate,
        "startup_latency_ns": startup,
        "input_bytes_per_frame": frame_in,
        "output_bytes_per_frame": frame_out,
    }


def app(acc_type=0, frame_in=4096, frame_out=4096, prep=1000, window=2, threads=1, **extra):
    spec = {
        "acc_type": acc_type,
        "frame_bytes_in": frame_in,
        "frame_bytes_out": frame_out,
        "prep_time_ns": prep,
        "max_outstanding": window,
        "threads": threads,
    }
    spec.update(extra)
    return spec


def raw_scenario(accelerators, apps, duration_ns=10_000_000, mode="ultrashare", seed=1, **extra):
    raw = {
        "mode": mode,
        "seed": seed,
        "duration_ns": duration_ns,
        "accelerators": accelerators,
        "apps": apps,
        "link": {"rx_bandwidth": 16.0, "tx_bandwidth": 16.0, "per_transfer_overhead_ns": 200},
    }
    raw.update(extra)
    return raw


def config(accelerators, apps, **extra):
    return scenario_from_dict(raw_scenario(accelerators, apps, **extra))
