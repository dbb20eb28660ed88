"""End-to-end delay staircase when one app fans out over 3 accelerators.

A single application fires n identical requests simultaneously at a group
of three accelerators (1 ms of compute each, transfers negligible). Up to
three run in parallel; the fourth has to wait for a free instance, so the
worst-case end-to-end delay climbs one service time at every multiple of
three.
"""

from ultrashare import build_system, scenario_from_dict

MS = 1_000_000
RATE = 4096 / MS


def scenario(n):
    return scenario_from_dict({
        "mode": "ultrashare", "seed": 1, "duration_ns": 40 * MS,
        "accelerators": [
            {"acc_type": 0, "process_rate": RATE,
             "input_bytes_per_frame": 4096, "output_bytes_per_frame": 4096}
            for _ in range(3)
        ],
        "link": {"rx_bandwidth": 16.0, "tx_bandwidth": 16.0,
                 "per_transfer_overhead_ns": 200},
        "apps": [{"acc_type": 0, "frame_bytes_in": 4096, "frame_bytes_out": 4096,
                  "prep_time_ns": 0, "max_outstanding": n, "total_requests": n}],
    })


def main():
    print("n parallel requests vs. worst end-to-end delay (3 accelerators, 1 ms service)\n")
    print(f"{'n':>3} {'max delay (ms)':>15}")
    for n in range(1, 10):
        system = build_system(scenario(n), keep_trace=True)
        system.run()
        submit, done = {}, {}
        for t, kind, fields in system.collector.trace:
            if kind == "command-arrival":
                submit[fields["command_id"]] = t
            elif kind == "command-complete":
                done[fields["command_id"]] = t
        worst = max(done[c] - submit[c] for c in done)
        marker = "  <- jump" if n in (4, 7) else ""
        print(f"{n:>3} {worst / MS:>15.3f}{marker}")


if __name__ == "__main__":
    main()
