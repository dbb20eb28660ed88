import random

import pytest

from oracles import reference_allocate
from ultrashare.allocator import (
    DynamicAllocator,
    GroupTable,
    make_request_info,
    rightmost_idle,
)
from ultrashare.commands import REJECTED_UNMAPPED, Command
from ultrashare.sglist import build_sg_list

PAGE = 4096


def make_command(cid, acc_type=0, core=0):
    return Command(
        command_id=cid,
        core_id=core,
        acc_type=acc_type,
        rx_lists=(build_sg_list(PAGE, PAGE, 0x1000),),
        tx_lists=(build_sg_list(2 * PAGE, PAGE, 0x9000),),
        submit_time=0,
    )


def test_rightmost_idle_picks_smallest_index():
    assert rightmost_idle([False, True, True, False]) == 1


def test_rightmost_idle_last_position():
    assert rightmost_idle([False, False, False, True]) == 3


def test_rightmost_idle_none_when_all_busy():
    assert rightmost_idle([False, False, False]) is None


def make_allocator(rows, type_to_group=None, capacity=8):
    table = GroupTable(rows)
    if type_to_group is None:
        type_to_group = list(range(table.n_groups))
    return DynamicAllocator(table, type_to_group, capacity)


def test_skips_empty_queue():
    # group 0 empty, group 1 holds a command servable by idle acc 2
    alloc = make_allocator([[True, False, False], [False, True, True]])
    cmd = make_command(1, acc_type=1)
    alloc.submit(cmd)
    idle = [True, False, True]
    result = alloc.allocate_step(idle)
    assert result is not None
    assert (result.queue_index, result.command, result.acc_index) == (1, cmd, 2)
    assert idle == [True, False, False]


def test_stalled_queue_does_not_block_others():
    # queue 0's group is fully busy; queue 1 must still be served
    alloc = make_allocator([[True, True, False], [False, False, True]])
    blocked = make_command(1, acc_type=0)
    runnable = make_command(2, acc_type=1)
    alloc.submit(blocked)
    alloc.submit(runnable)
    idle = [False, False, True]
    result = alloc.allocate_step(idle)
    assert result is not None
    assert result.command is runnable
    assert result.acc_index == 2
    # the blocked command is still queued, not lost
    assert alloc.queues[0].head() is blocked


def test_cursor_advances_past_served_queue():
    alloc = make_allocator([[True, False], [False, True]])
    alloc.submit(make_command(1, acc_type=0))
    alloc.submit(make_command(2, acc_type=1))
    idle = [True, True]
    first = alloc.allocate_step(idle)
    assert first.queue_index == 0 and alloc.cursor == 1
    second = alloc.allocate_step(idle)
    assert second.queue_index == 1 and alloc.cursor == 0


def test_unmapped_type_is_rejected():
    alloc = make_allocator([[True]], type_to_group=[0])
    status, queue = alloc.submit(make_command(1, acc_type=7))
    assert status == REJECTED_UNMAPPED and queue is None


def test_reconfigure_moves_accelerator_between_groups():
    alloc = make_allocator([[True, True, True], [False, False, False]])
    alloc.submit(make_command(1, acc_type=1))
    assert alloc.allocate_step([True, True, True]) is None  # group 1 empty of members
    alloc.table.set_row(1, [False, False, True])
    result = alloc.allocate_step([True, True, True])
    assert result is not None and result.acc_index == 2


def test_identity_reconfigure_changes_nothing():
    rows = [[True, False], [False, True]]
    alloc = make_allocator(rows)
    alloc.table.set_row(0, [True, False])
    alloc.submit(make_command(1, acc_type=0))
    assert alloc.allocate_step([True, True]).acc_index == 0


def test_cleared_row_starves_its_queue():
    alloc = make_allocator([[True, True]], type_to_group=[0])
    alloc.table.set_row(0, [False, False])
    alloc.submit(make_command(1))
    assert alloc.allocate_step([True, True]) is None
    assert len(alloc.queues[0]) == 1


def test_reconfigure_group_out_of_range():
    table = GroupTable([[True, True]])
    with pytest.raises(ValueError):
        table.set_row(3, [True, True])


def test_per_queue_fifo_order():
    alloc = make_allocator([[True, True]], type_to_group=[0])
    commands = [make_command(i) for i in range(4)]
    for cmd in commands:
        alloc.submit(cmd)
    idle = [True, True]
    served = []
    while (result := alloc.allocate_step(idle)) is not None:
        served.append(result.command.command_id)
        idle[result.acc_index] = True  # pretend it finished instantly
        if len(served) == 4:
            break
    assert served == [0, 1, 2, 3]


def test_request_info_carries_list_lengths():
    alloc = make_allocator([[True]], type_to_group=[0])
    cmd = make_command(5)
    alloc.submit(cmd)
    result = alloc.allocate_step([True])
    info = make_request_info(result)
    assert info.command_id == 5
    assert info.allocated_acc == 0
    assert info.rx_list_lengths == (1,)
    assert info.tx_list_lengths == (2,)


def random_instance(rng):
    t = rng.randrange(1, 5)
    k = rng.randrange(1, 9)
    rows = [[rng.random() < 0.5 for _ in range(k)] for _ in range(t)]
    idle = [rng.random() < 0.5 for _ in range(k)]
    alloc = DynamicAllocator(GroupTable(rows), list(range(t)), queue_capacity=8)
    queue_ids = []
    cid = 0
    for q in range(t):
        depth = rng.randrange(0, 6)
        ids = []
        for _ in range(depth):
            alloc.queues[q].enqueue(make_command(cid, acc_type=q))
            ids.append(cid)
            cid += 1
        queue_ids.append(ids)
    alloc.cursor = rng.randrange(0, t)
    return alloc, rows, idle, queue_ids


def test_matches_brute_force_reference_smoke():
    rng = random.Random(2024)
    for _ in range(500):
        alloc, rows, idle, queue_ids = random_instance(rng)
        cursor = alloc.cursor
        expected = reference_allocate(idle, rows, queue_ids, cursor)
        got = alloc.allocate_step(list(idle))
        if expected is None:
            assert got is None
            assert alloc.cursor == cursor
        else:
            q, cmd_id, acc, new_cursor = expected
            assert (got.queue_index, got.command.command_id, got.acc_index) == (q, cmd_id, acc)
            assert alloc.cursor == new_cursor


def test_work_conservation():
    # whenever some queue is non-empty with an idle group member, a full scan allocates
    rng = random.Random(11)
    for _ in range(300):
        alloc, rows, idle, queue_ids = random_instance(rng)
        servable = any(
            ids and any(idle[i] and rows[q][i] for i in range(len(idle)))
            for q, ids in enumerate(queue_ids)
        )
        got = alloc.allocate_step(list(idle))
        assert (got is not None) == servable


def test_allocation_safety():
    # the chosen accelerator was idle and a member of the served group's row
    rng = random.Random(5)
    for _ in range(300):
        alloc, rows, idle, _ = random_instance(rng)
        got = alloc.allocate_step(list(idle))
        if got is not None:
            assert idle[got.acc_index]
            assert rows[got.queue_index][got.acc_index]
