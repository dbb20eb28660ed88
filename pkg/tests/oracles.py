"""Independent reference implementations used to cross-check the simulator.

These are deliberately written as plain scans over the raw state, separate
from the production code paths they validate.
"""


def reference_allocate(idle, rows, queue_ids, cursor):
    """Cyclic scan from `cursor`: first queue with a command and an idle
    group member wins; the lowest-numbered idle member is chosen.

    queue_ids maps queue index -> list of queued command ids (head first).
    Returns (queue, command_id, acc, new_cursor) or None.
    """
    n = len(queue_ids)
    for step in range(n):
        q = (cursor + step) % n
        if not queue_ids[q]:
            continue
        candidates = [i for i in range(len(idle)) if idle[i] and rows[q][i]]
        if not candidates:
            continue
        return q, queue_ids[q][0], min(candidates), (q + 1) % n
    return None


def reference_wrr_cycle(weights):
    """Grant sequence of one full weighted round-robin cycle, all requesters
    always pending: accelerator a appears weights[a] times in visit order."""
    sequence = []
    for acc, weight in enumerate(weights):
        sequence.extend([acc] * weight)
    return sequence
