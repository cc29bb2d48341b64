"""Shared domain types: targets, layouts, time, and seeded randomness.

All times in this package are integer milliseconds on a simulated clock
owned by the harness or session.  Engines never read the wall clock.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Letters in descending English unigram frequency, used for the
# frequency-ordered scanning layout.
FREQUENCY_ORDER = "etaoinsrhldcumfpgwybvkxjqz"

ALPHABET_LETTERS = "abcdefghijklmnopqrstuvwxyz"
PUNCTUATION = [",", ".", "'", "?", "!"]
SPACE = " "

# Full symbol set of the character language model and text targets.
ALPHABET = list(ALPHABET_LETTERS) + [SPACE, "'"] + [",", ".", "?", "!"]
# deduplicate while preserving order (apostrophe appears once)
ALPHABET = list(dict.fromkeys(ALPHABET))

RCS_COLS = 7
RCS_MAX_ROWS = 8
RCS_W_MAX_LIMIT = 18

NOMON_ROWS = 7
NOMON_COLS = 5


class TargetKind(enum.Enum):
    CHARACTER = "char"
    WORD_COMPLETION = "word"
    UNDO = "undo"
    BACKSPACE = "backspace"
    CLEAR = "clear"
    PICTURE = "picture"


CORRECTIVE_KINDS = (TargetKind.UNDO, TargetKind.BACKSPACE, TargetKind.CLEAR)


@dataclass(frozen=True, order=True)
class TargetId:
    id: str
    kind: TargetKind = field(compare=False)
    label: str = field(compare=False)

    def is_corrective(self) -> bool:
        return self.kind in CORRECTIVE_KINDS


def char_target(ch: str) -> TargetId:
    label = "space" if ch == SPACE else ch
    return TargetId(id=f"char:{label}", kind=TargetKind.CHARACTER, label=label)


def corrective_target(kind: TargetKind) -> TargetId:
    return TargetId(id=f"corr:{kind.value}", kind=kind, label=kind.value)


def completion_slot(index: int) -> TargetId:
    """Fixed word-completion slot for grid layouts (content varies)."""
    return TargetId(id=f"word:{index}", kind=TargetKind.WORD_COMPLETION,
                    label=f"word{index}")


def completion_target(word: str) -> TargetId:
    """Dynamic word-completion target (clock layouts create these per round)."""
    return TargetId(id=f"word:{word}", kind=TargetKind.WORD_COMPLETION, label=word)


def picture_target(index: int) -> TargetId:
    return TargetId(id=f"pic:{index}", kind=TargetKind.PICTURE, label=f"pic{index}")


def target_char(target: TargetId) -> str:
    """The text character a CHARACTER target stands for."""
    assert target.kind is TargetKind.CHARACTER
    return SPACE if target.label == "space" else target.label


class Ordering(enum.Enum):
    ALPHABETICAL = "alphabetical"
    FREQUENCY = "frequency"


class CompletionPlacement(enum.Enum):
    TOP = "top"
    BOTTOM = "bottom"


def principal_targets(ordering: Ordering) -> list[TargetId]:
    """Characters (in the requested order) followed by the correctives.

    The frequency ordering ranks space with the letters: it is the most
    common character in running text, so it takes the first cell.  The
    alphabetical ordering keeps the conventional a-z block with space and
    punctuation at the end."""
    if ordering is Ordering.FREQUENCY:
        chars = [SPACE] + list(FREQUENCY_ORDER) + PUNCTUATION
    else:
        chars = list(ALPHABET_LETTERS) + PUNCTUATION + [SPACE]
    targets = [char_target(c) for c in chars]
    targets += [corrective_target(k) for k in CORRECTIVE_KINDS]
    return targets


@dataclass
class Layout:
    rows: int
    cols: int
    cells: dict[tuple[int, int], TargetId | None]
    ordering: Ordering
    completion_placement: CompletionPlacement
    w_max: int
    w_c: int

    def targets(self) -> list[TargetId]:
        out = []
        for r in range(self.rows):
            for c in range(self.cols):
                t = self.cells.get((r, c))
                if t is not None:
                    out.append(t)
        return out

    def position_of(self, target: TargetId) -> tuple[int, int]:
        for pos, t in self.cells.items():
            if t is not None and t.id == target.id:
                return pos
        raise KeyError(target.id)

    def validate(self) -> None:
        ids = [t.id for t in self.targets()]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate target ids in layout")


def build_rcs_layout(ordering: Ordering = Ordering.FREQUENCY,
                     completion_placement: CompletionPlacement = CompletionPlacement.TOP,
                     w_max: int = 7) -> Layout:
    """Scanning grid: completion slot rows on one edge, principals below/above.

    Completion slots are fixed positions whose displayed word changes with the
    prediction state; unfilled slots are skipped by the scanner.
    """
    if not 0 <= w_max <= RCS_W_MAX_LIMIT:
        raise ValueError(f"w_max must be in [0, {RCS_W_MAX_LIMIT}], got {w_max}")
    principals = principal_targets(ordering)
    n_word_rows = math.ceil(w_max / RCS_COLS)
    n_prin_rows = math.ceil(len(principals) / RCS_COLS)
    rows = n_word_rows + n_prin_rows
    assert rows <= RCS_MAX_ROWS

    cells: dict[tuple[int, int], TargetId | None] = {}

    def fill(row0, targets):
        for i, t in enumerate(targets):
            cells[(row0 + i // RCS_COLS, i % RCS_COLS)] = t

    slots = [completion_slot(i) for i in range(w_max)]
    if completion_placement is CompletionPlacement.TOP:
        fill(0, slots)
        fill(n_word_rows, principals)
    else:
        fill(0, principals)
        fill(n_prin_rows, slots)
    layout = Layout(rows=rows, cols=RCS_COLS, cells=cells, ordering=ordering,
                    completion_placement=completion_placement, w_max=w_max, w_c=0)
    layout.validate()
    return layout


def build_nomon_layout(w_c: int = 3, w_max: int = 17) -> Layout:
    """Clock-keyboard principal grid; completion clocks are created per round.

    35 principal options need a 7x5 grid of cells.  Each character cell may
    expose up to w_c completion clocks, at most w_max across the layout.
    """
    if w_c not in (1, 2, 3):
        raise ValueError(f"w_c must be in {{1,2,3}}, got {w_c}")
    if not 0 <= w_max <= 26 * w_c:
        raise ValueError(f"w_max must be in [0, {26 * w_c}], got {w_max}")
    principals = principal_targets(Ordering.ALPHABETICAL)
    cells: dict[tuple[int, int], TargetId | None] = {}
    for i, t in enumerate(principals):
        cells[(i // NOMON_COLS, i % NOMON_COLS)] = t
    layout = Layout(rows=NOMON_ROWS, cols=NOMON_COLS, cells=cells,
                    ordering=Ordering.ALPHABETICAL,
                    completion_placement=CompletionPlacement.TOP,
                    w_max=w_max, w_c=w_c)
    layout.validate()
    return layout


def build_picture_layout(n: int) -> Layout:
    """Near-square grid of n picture targets (ceil(sqrt(n)) columns)."""
    if n < 1:
        raise ValueError("need at least one picture target")
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    cells: dict[tuple[int, int], TargetId | None] = {}
    for i in range(n):
        cells[(i // cols, i % cols)] = picture_target(i)
    layout = Layout(rows=rows, cols=cols, cells=cells,
                    ordering=Ordering.ALPHABETICAL,
                    completion_placement=CompletionPlacement.TOP, w_max=0, w_c=0)
    layout.validate()
    return layout


# ---------------------------------------------------------------------------
# layout file format
#
#   header:  rows cols ordering placement Wmax Wc
#   cells:   r c kind label      (one line per occupied cell)
# ---------------------------------------------------------------------------

_KIND_BY_NAME = {k.value: k for k in TargetKind}


def save_layout(layout: Layout, path) -> None:
    with open(path, "w") as f:
        f.write(f"{layout.rows} {layout.cols} {layout.ordering.value} "
                f"{layout.completion_placement.value} {layout.w_max} {layout.w_c}\n")
        for r in range(layout.rows):
            for c in range(layout.cols):
                t = layout.cells.get((r, c))
                if t is not None:
                    f.write(f"{r} {c} {t.kind.value} {t.label}\n")


def load_layout(path) -> Layout:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 6:
            raise ValueError(f"bad layout header in {path}")
        rows, cols = int(header[0]), int(header[1])
        ordering = Ordering(header[2])
        placement = CompletionPlacement(header[3])
        w_max, w_c = int(header[4]), int(header[5])
        cells: dict[tuple[int, int], TargetId | None] = {}
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ValueError(f"bad layout cell line: {line!r}")
            r, c, kind_name, label = int(parts[0]), int(parts[1]), parts[2], parts[3]
            kind = _KIND_BY_NAME[kind_name]
            if kind is TargetKind.CHARACTER:
                t = char_target(SPACE if label == "space" else label)
            elif kind in CORRECTIVE_KINDS:
                t = corrective_target(kind)
            elif kind is TargetKind.PICTURE:
                t = picture_target(int(label.removeprefix("pic")))
            else:
                if label.startswith("word") and label.removeprefix("word").isdigit():
                    t = completion_slot(int(label.removeprefix("word")))
                else:
                    t = completion_target(label)
            cells[(r, c)] = t
    layout = Layout(rows=rows, cols=cols, cells=cells, ordering=ordering,
                    completion_placement=placement, w_max=w_max, w_c=w_c)
    layout.validate()
    return layout


# ---------------------------------------------------------------------------
# time and randomness
# ---------------------------------------------------------------------------

class SimClock:
    """Single-writer monotone millisecond clock for simulations."""

    def __init__(self, start_ms: int = 0):
        self.now = int(start_ms)

    def advance_to(self, t_ms: int) -> None:
        if t_ms < self.now:
            raise ValueError(f"clock cannot go backwards ({t_ms} < {self.now})")
        self.now = int(t_ms)


def make_rng(seed: int, *stream) -> np.random.Generator:
    """Deterministic generator for a (seed, *stream) tuple.

    Identical tuples always produce identical draw sequences, independent of
    the order in which streams are created.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed,) + tuple(stream))))


@dataclass
class LogEvent:
    t: int
    kind: str            # tick | click | select | text | prompt | flash
    data: dict = field(default_factory=dict)


class SessionLog:
    """Append-only timestamped event stream; all metrics derive from this."""

    def __init__(self):
        self.events: list[LogEvent] = []

    def append(self, t: int, kind: str, **data) -> None:
        if self.events and t < self.events[-1].t:
            raise ValueError("event timestamps must be non-decreasing")
        self.events.append(LogEvent(int(t), kind, data))

    def clicks(self) -> list[LogEvent]:
        return [e for e in self.events if e.kind == "click"]

    def selections(self) -> list[LogEvent]:
        return [e for e in self.events if e.kind == "select"]
