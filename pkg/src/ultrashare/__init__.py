"""Discrete-event simulator for FPGA accelerator-sharing controllers.

Models a command-based multi-accelerator controller: per-group command
queues, dynamic round-robin accelerator allocation, scatter-gather data
movement through page-sized buffers, and weighted round-robin sharing of
the host link - plus single-queue and statically-pinned baselines for
comparison experiments.
"""

__version__ = "0.1.0"

from .allocator import (
    DynamicAllocator,
    GroupTable,
    RequestInfo,
    SingleQueueAllocator,
    StaticAllocator,
    rightmost_idle,
)
from .commands import Command, CommandQueue, classify_command
from .controller import AccelParams, AcceleratorController
from .engine import Engine, EventKind, SimEvent, SimulationError
from .link import LinkChannel, LinkModel, PriorityTable, WrrScheduler
from .metrics import MetricsCollector, MetricsReport, emit_report, parse_report
from .scenario import AppSpec, ScenarioConfig, ScenarioError, parse_config, scenario_from_dict
from .sglist import CompactSgList, SgElement, build_sg_list, compact_sg, decode_sg, total_bytes
from .system import SgDistributor, System
from .workloads import (
    build_system,
    generate_workload,
    run_scenario,
    run_single_queue_mode,
    run_static_mode,
)
