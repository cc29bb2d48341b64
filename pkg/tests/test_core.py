"""Layout construction, target identity, clocks, and seeded randomness."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from singleswitch.core import (ALPHABET, FREQUENCY_ORDER, SPACE,
                               CompletionPlacement, Ordering, SessionLog,
                               SimClock, TargetKind, build_nomon_layout,
                               build_picture_layout, build_rcs_layout,
                               char_target, completion_slot, load_layout,
                               make_rng, principal_targets, save_layout)


def test_alphabet_composition():
    assert len(ALPHABET) == 32
    assert set("abcdefghijklmnopqrstuvwxyz") < set(ALPHABET)
    assert SPACE in ALPHABET and "'" in ALPHABET
    assert len(set(ALPHABET)) == len(ALPHABET)


def test_frequency_order_is_a_letter_permutation():
    assert sorted(FREQUENCY_ORDER) == sorted("abcdefghijklmnopqrstuvwxyz")
    assert FREQUENCY_ORDER[0] == "e"


def test_principal_targets_frequency_puts_space_first():
    targets = principal_targets(Ordering.FREQUENCY)
    assert targets[0].id == "char:space"
    assert targets[1].id == "char:e"
    # 32 characters plus undo/backspace/clear
    assert len(targets) == 35
    assert sum(t.is_corrective() for t in targets) == 3


def test_principal_targets_alphabetical_ends_with_space():
    targets = principal_targets(Ordering.ALPHABETICAL)
    assert targets[0].id == "char:a"
    chars = [t for t in targets if t.kind is TargetKind.CHARACTER]
    assert chars[-1].id == "char:space"


def test_rcs_layout_frequency_top_derived_positions():
    layout = build_rcs_layout(Ordering.FREQUENCY, CompletionPlacement.TOP, 7)
    assert (layout.rows, layout.cols) == (6, 7)
    # one completion row on top, principals below
    assert layout.cells[(0, 0)].id == "word:0"
    assert layout.cells[(0, 6)].id == "word:6"
    assert layout.cells[(1, 0)].id == "char:space"
    assert layout.cells[(1, 1)].id == "char:e"


def test_rcs_layout_frequency_bottom_derived_positions():
    layout = build_rcs_layout(Ordering.FREQUENCY, CompletionPlacement.BOTTOM, 7)
    assert layout.rows == 6
    # principals first: 35 targets fill rows 0..4, slots on row 5
    assert layout.cells[(0, 0)].id == "char:space"
    assert layout.cells[(0, 1)].id == "char:e"
    assert layout.cells[(4, 6)].id == "corr:clear"
    assert layout.cells[(5, 0)].id == "word:0"
    assert layout.cells[(5, 6)].id == "word:6"


def test_rcs_layout_respects_grid_limit():
    layout = build_rcs_layout(w_max=18)
    assert layout.rows == 8
    with pytest.raises(ValueError):
        build_rcs_layout(w_max=19)
    with pytest.raises(ValueError):
        build_rcs_layout(w_max=-1)


def test_rcs_layout_zero_completions():
    layout = build_rcs_layout(w_max=0)
    assert layout.rows == 5
    assert all(t.kind is not TargetKind.WORD_COMPLETION for t in layout.targets())


def test_nomon_layout_grid():
    layout = build_nomon_layout(3, 17)
    assert (layout.rows, layout.cols) == (7, 5)
    assert len(layout.targets()) == 35
    with pytest.raises(ValueError):
        build_nomon_layout(4, 17)
    with pytest.raises(ValueError):
        build_nomon_layout(2, 53)


def test_picture_layout_near_square():
    layout = build_picture_layout(10)
    assert (layout.rows, layout.cols) == (3, 4)
    assert len(layout.targets()) == 10
    with pytest.raises(ValueError):
        build_picture_layout(0)


def test_layout_position_of_and_validate():
    layout = build_rcs_layout()
    assert layout.position_of(char_target("e")) == (1, 1)
    with pytest.raises(KeyError):
        layout.position_of(char_target("e" * 2))
    layout.cells[(0, 1)] = layout.cells[(0, 0)]
    with pytest.raises(ValueError):
        layout.validate()


def test_layout_file_roundtrip(tmp_path):
    for build in (lambda: build_rcs_layout(Ordering.ALPHABETICAL,
                                           CompletionPlacement.BOTTOM, 12),
                  lambda: build_nomon_layout(2, 9),
                  lambda: build_picture_layout(6)):
        layout = build()
        path = tmp_path / "layout.txt"
        save_layout(layout, path)
        loaded = load_layout(path)
        assert loaded.rows == layout.rows and loaded.cols == layout.cols
        assert {p: t.id for p, t in loaded.cells.items() if t} == \
               {p: t.id for p, t in layout.cells.items() if t}


def test_load_layout_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2 3\n")
    with pytest.raises(ValueError):
        load_layout(path)
    path.write_text("1 1 frequency top 0 0\n0 0 char\n")
    with pytest.raises(ValueError):
        load_layout(path)


def test_completion_slot_identity():
    a, b = completion_slot(3), completion_slot(3)
    assert a == b and a.id == "word:3"


def test_sim_clock_monotone():
    clock = SimClock(100)
    clock.advance_to(150)
    with pytest.raises(ValueError):
        clock.advance_to(149)


def test_session_log_ordering_and_filters():
    log = SessionLog()
    log.append(10, "click")
    log.append(10, "select", target="char:e", corrective=False)
    log.append(12, "text", text="e")
    assert len(log.clicks()) == 1 and len(log.selections()) == 1
    with pytest.raises(ValueError):
        log.append(5, "click")


@given(st.integers(0, 2**16), st.lists(st.integers(0, 100), max_size=3))
def test_make_rng_reproducible(seed, stream):
    a = make_rng(seed, *stream).integers(0, 10**9, 8)
    b = make_rng(seed, *stream).integers(0, 10**9, 8)
    assert np.array_equal(a, b)


def test_make_rng_streams_differ():
    a = make_rng(0, 1).integers(0, 10**9, 8)
    b = make_rng(0, 2).integers(0, 10**9, 8)
    assert not np.array_equal(a, b)
