"""Row-column scanning engine.

Rows are highlighted in turn; a click enters column scanning of the chosen
row, and a second click selects the highlighted cell.  The first row and
first column dwell an extra delay d on top of the scan time s.  Column
scanning reverts to row scanning after two complete cycles without a click.
Unfilled word-completion slots (and rows with no filled cells) are skipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .core import Layout, TargetId, TargetKind

SCAN_LEVELS = range(0, 21)
DELAY_LEVELS = range(0, 11)
MAX_COLUMN_CYCLES = 2


def scan_time(j: int) -> int:
    """Scan dwell in ms for a speed index: 2 e^(-j/14) seconds."""
    if j not in SCAN_LEVELS:
        raise ValueError(f"scan index must be in [0, 20], got {j}")
    return round(2000.0 * math.exp(-j / 14.0))


def extra_delay(k: int) -> int:
    """First row/column extra dwell in ms: 0.15 (10 - k) seconds."""
    if k not in DELAY_LEVELS:
        raise ValueError(f"delay index must be in [0, 10], got {k}")
    return round(150.0 * (10 - k))


class ScanMode(Enum):
    ROW = "row_scan"
    COL = "col_scan"


@dataclass
class Selection:
    target: TargetId | None      # None: click on an empty trailing cell
    t: int
    row: int
    col: int


class RcsEngine:
    """Timed highlighting over a grid layout; one instance per session."""

    def __init__(self, layout: Layout, scan_ms: int, delay_ms: int,
                 start_time: int = 0, keep_trace: bool = False):
        self.layout = layout
        self.scan_ms = int(scan_ms)
        self.delay_ms = int(delay_ms)
        self.keep_trace = keep_trace
        self.trace: list[str] = []
        # columns with a selectable cell, per row; updated with predictions
        self.active_cols: list[list[int]] = []
        self.filled_slots: int = layout.w_max
        self._rebuild_active()
        self.mode = ScanMode.ROW
        self.scan_index = 0          # position within active row/column list
        self.selected_row: int | None = None
        self.cycles = 0
        self.dwell_started_at = int(start_time)
        self.last_event_time = int(start_time)

    # -- layout occupancy ---------------------------------------------------

    def set_filled_slots(self, n: int) -> None:
        """Number of completion slots currently holding a prediction."""
        self.filled_slots = min(n, self.layout.w_max)
        self._rebuild_active()

    def _rebuild_active(self) -> None:
        self.active_cols = []
        for r in range(self.layout.rows):
            cols = []
            for c in range(self.layout.cols):
                t = self.layout.cells.get((r, c))
                if t is None:
                    continue
                if t.kind is TargetKind.WORD_COMPLETION:
                    slot = int(t.id.split(":")[1])
                    if slot >= self.filled_slots:
                        continue
                cols.append(c)
            self.active_cols.append(cols)
        self.active_rows = [r for r, cols in enumerate(self.active_cols) if cols]
        if not self.active_rows:
            raise ValueError("layout has no selectable cells")

    # -- timing -------------------------------------------------------------

    def _dwell(self) -> int:
        return self.scan_ms + (self.delay_ms if self.scan_index == 0 else 0)

    def _scan_length(self) -> int:
        if self.mode is ScanMode.ROW:
            return len(self.active_rows)
        return len(self.active_cols[self.selected_row])

    def advance_to(self, now: int) -> None:
        """Advance the highlight as far as elapsed time dictates."""
        now = int(now)
        if now < self.last_event_time:
            raise ValueError("time must be non-decreasing")
        self.last_event_time = now
        while self.dwell_started_at + self._dwell() <= now:
            self.dwell_started_at += self._dwell()
            self.scan_index += 1
            if self.scan_index >= self._scan_length():
                self.scan_index = 0
                if self.mode is ScanMode.COL:
                    self.cycles += 1
                    if self.cycles >= MAX_COLUMN_CYCLES:
                        self._to_row_scan()

    def _to_row_scan(self) -> None:
        self.mode = ScanMode.ROW
        self.scan_index = 0
        self.selected_row = None
        self.cycles = 0

    # -- queries used by simulated users and the UI -------------------------

    def highlighted(self) -> tuple[ScanMode, int]:
        """(mode, grid row or grid column index) of the current highlight."""
        if self.mode is ScanMode.ROW:
            return self.mode, self.active_rows[self.scan_index]
        return self.mode, self.active_cols[self.selected_row][self.scan_index]

    def dwell_boundaries(self) -> tuple[int, int]:
        return self.dwell_started_at, self.dwell_started_at + self._dwell()

    def time_to_target_click(self, target_row: int, target_col: int | None) -> int:
        """Time from `now` (assumed = last_event_time) until the midpoint of
        the target's dwell, scanning forward from the current highlight."""
        length = self._scan_length()
        if self.mode is ScanMode.ROW:
            try:
                goal = self.active_rows.index(target_row)
            except ValueError:
                raise ValueError(f"row {target_row} is not scannable")
        else:
            if target_row != self.selected_row:
                raise ValueError("target not in the selected row")
            goal = self.active_cols[self.selected_row].index(target_col)
        t = -(self.last_event_time - self.dwell_started_at)
        idx = self.scan_index
        while idx != goal:
            t += self.scan_ms + (self.delay_ms if idx == 0 else 0)
            idx = (idx + 1) % length
        t += (self.scan_ms + (self.delay_ms if idx == 0 else 0)) // 2
        return t

    # -- clicks -------------------------------------------------------------

    def observe_click(self, now: int) -> Selection | None:
        self.advance_to(now)
        mode, index = self.highlighted()
        if mode is ScanMode.ROW:
            self.mode = ScanMode.COL
            self.selected_row = index
            self.scan_index = 0
            self.cycles = 0
            self.dwell_started_at = int(now)
            if self.keep_trace:
                self.trace.append(f"t={now} ev=click mode=row_scan row={index}")
            return None
        row = self.selected_row
        target = self.layout.cells.get((row, index))
        sel = Selection(target=target, t=int(now), row=row, col=index)
        self._to_row_scan()
        self.dwell_started_at = int(now)
        if self.keep_trace:
            tid = target.id if target else "empty"
            self.trace.append(f"t={now} ev=select mode=col_scan target={tid}")
        return sel
