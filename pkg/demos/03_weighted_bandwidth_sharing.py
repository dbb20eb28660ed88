"""Weighted round-robin sharing of the host link.

Nine accelerators stream enormous frames so the RX direction of the link
is the only bottleneck. The data-request scheduler walks the accelerators
round-robin, granting up to weight[i] element transfers per visit, and
skips anyone with nothing pending. Three configurations:

  1. uniform weights          -> equal byte shares
  2. weights (1,1,1,4,4,4,8,8,8) -> shares proportional to weights
  3. same weights, but the weight-8 accelerators can only consume half
     their entitlement -> they get exactly their demand and the rest of
     the bandwidth is redistributed by weight (work conservation)
"""

from ultrashare import run_scenario, scenario_from_dict

MS = 1_000_000
PAGE = 65536
BW = 2.0
OVERHEAD = 200
LINK_RATE = PAGE / (OVERHEAD + PAGE / BW)  # effective bytes/ns per element
GIANT = 512 * 1024 * 1024


def scenario(weights, capped_rate=None):
    accelerators, apps = [], []
    for t in range(3):
        rate = capped_rate if (capped_rate is not None and t == 2) else 100.0
        for _ in range(3):
            accelerators.append({
                "acc_type": t, "process_rate": rate,
                "input_bytes_per_frame": GIANT, "output_bytes_per_frame": PAGE,
            })
        apps.append({
            "acc_type": t, "frame_bytes_in": GIANT, "frame_bytes_out": PAGE,
            "prep_time_ns": 100, "max_outstanding": 3, "total_requests": 3,
        })
    return scenario_from_dict({
        "mode": "ultrashare", "seed": 3, "duration_ns": 300 * MS,
        "page_size": PAGE, "pages_per_buffer": 16,
        "priority_weights": weights,
        "accelerators": accelerators,
        "link": {"rx_bandwidth": BW, "tx_bandwidth": BW,
                 "per_transfer_overhead_ns": OVERHEAD},
        "apps": apps,
    })


def show(title, report):
    rx = [a.rx_bytes for a in report.per_acc]
    total = sum(rx)
    print(title)
    shares = " ".join(f"{b / total:6.3f}" for b in rx)
    print(f"  byte shares: {shares}")


def main():
    weights = [1, 1, 1, 4, 4, 4, 8, 8, 8]
    show("uniform weights (1,...,1):", run_scenario(scenario([1] * 9)))
    show(f"weights {tuple(weights)}:", run_scenario(scenario(weights)))
    capped = 0.5 * (8 / 39) * LINK_RATE
    report = run_scenario(scenario(weights, capped_rate=capped))
    show("same weights, weight-8 accelerators compute-bound at half share:", report)
    print()
    print(f"weighted ideal shares: {' '.join(f'{w / 39:6.3f}' for w in weights)}")
    print("In the capped case the weight-8 accelerators take only what they can")
    print("consume; the leftover bandwidth is split 1:1:1:4:4:4 among the rest.")


if __name__ == "__main__":
    main()
