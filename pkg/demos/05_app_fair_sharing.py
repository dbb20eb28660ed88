"""Accelerator time is shared equally even when request sizes differ 16x.

Three applications share three identical streaming accelerators. Their
requests differ only in size (1 : 4 : 16, like three video resolutions),
so per-frame service time differs 16x too. Each app still receives the
same share of accelerator busy time; what differs is how many frames that
buys.
"""

from ultrashare import run_scenario, scenario_from_dict

MS = 1_000_000
SIZES = [129_600, 518_400, 2_073_600]  # bytes per request, 1:4:16


def scenario():
    return scenario_from_dict({
        "mode": "ultrashare", "seed": 1, "duration_ns": 2_000 * MS,
        "page_size": 65536, "pages_per_buffer": 8,
        "accelerators": [
            {"acc_type": 0, "process_rate": SIZES[0] / MS,
             "input_bytes_per_frame": SIZES[0], "output_bytes_per_frame": SIZES[0]}
            for _ in range(3)
        ],
        "link": {"rx_bandwidth": 16.0, "tx_bandwidth": 16.0,
                 "per_transfer_overhead_ns": 200},
        "apps": [
            {"acc_type": 0, "frame_bytes_in": s, "frame_bytes_out": s,
             "prep_time_ns": 1_000, "max_outstanding": 1}
            for s in SIZES
        ],
    })


def main():
    report = run_scenario(scenario())
    total_busy = sum(s.busy_time_attributed for s in report.per_app.values())
    print("three apps, request sizes 1:4:16, three identical accelerators, 2 s\n")
    print(f"{'app':>3} {'request bytes':>14} {'frames done':>12} "
          f"{'frames/s':>9} {'busy share':>11}")
    for i in range(3):
        stats = report.per_app[i]
        print(f"{i:>3} {SIZES[i]:>14,} {stats.requests_completed:>12} "
              f"{stats.throughput_rps:>9.1f} {stats.busy_time_attributed / total_busy:>10.1%}")
    print()
    print("Busy shares are equal; frame rates scale inversely with request size.")


if __name__ == "__main__":
    main()
