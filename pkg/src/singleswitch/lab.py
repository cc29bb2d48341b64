"""Experiment harness: phrase sets, parameter sweeps, scaling studies.

Sweeps run the simulated user over a grid of interface parameters and
aggregate per-phrase metrics with bootstrap confidence intervals.  Every run
derives its RNG from (seed, repetition index), so the same repetition sees
the same phrase and the same click noise in every grid cell; results are
bit-identical across runs and across parallelism levels.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .clickmodel import gaussian_distribution, load_distribution
from .core import (CompletionPlacement, Ordering, build_nomon_layout,
                   build_picture_layout, build_rcs_layout, make_rng)
from .lm import LanguageModel, train_language_model
from .metrics import bootstrap_ci, phrase_metrics
from .nomon import rotation_period
from .rcs import extra_delay, scan_time
from .simuser import (SimUserConfig, nomon_picture_clicks, rcs_picture_scans,
                      run_phrase_nomon, run_phrase_rcs)

# Stand-in for an experienced user's click-offset distribution: most clicks
# land slightly after the reference instant.
EXPERT_CLICK_MEAN = 120.0
EXPERT_CLICK_SIGMA = 50.0

DEFAULT_REPETITIONS = 150
DEFAULT_IV_OOV_RATIO = (2, 1)

METRICS_HEADER = ("session,engine,phrase_id,iv_oov,wpm,cpc,"
                  "corr_rate,err_rate,clicks,duration_ms")


# ---------------------------------------------------------------------------
# bundled data
# ---------------------------------------------------------------------------

def bundled_corpus() -> str:
    return resources.files("singleswitch.data").joinpath("corpus.txt").read_text()


def bundled_phrases_path() -> str:
    return str(resources.files("singleswitch.data").joinpath("phrases.tsv"))


_DEFAULT_LM: LanguageModel | None = None


def default_language_model() -> LanguageModel:
    """Language model trained on the bundled corpus; cached per process."""
    global _DEFAULT_LM
    if _DEFAULT_LM is None:
        _DEFAULT_LM = train_language_model(bundled_corpus())
    return _DEFAULT_LM


# ---------------------------------------------------------------------------
# phrase sets
# ---------------------------------------------------------------------------

def load_phrases(path, vocab=None, ratio: tuple[int, int] = DEFAULT_IV_OOV_RATIO,
                 seed: int = 0, count: int | None = None) -> list[tuple[str, str]]:
    """Seeded shuffle-and-mix of tagged phrases at an IV:OOV ratio.

    Each line is `IV\\t<phrase>` or `OOV\\t<phrase>`.  With a vocabulary the
    tags are verified: an IV phrase must contain only known words, an OOV
    phrase exactly one unknown word.  Sampling is without replacement.
    """
    iv, oov = [], []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[0] not in ("IV", "OOV"):
                raise ValueError(f"{path}:{lineno}: expected 'IV\\t...' or "
                                 f"'OOV\\t...', got {line!r}")
            tag, phrase = parts
            if vocab is not None:
                unknown = sum(1 for w in phrase.split() if w not in vocab)
                if tag == "IV" and unknown:
                    raise ValueError(f"{path}:{lineno}: phrase tagged IV has "
                                     f"{unknown} out-of-vocabulary word(s)")
                if tag == "OOV" and unknown != 1:
                    raise ValueError(f"{path}:{lineno}: phrase tagged OOV has "
                                     f"{unknown} out-of-vocabulary words, want 1")
            (iv if tag == "IV" else oov).append(phrase)

    rng = make_rng(seed, 0)
    rng.shuffle(iv)
    rng.shuffle(oov)
    a, b = ratio
    if a < 0 or b < 0 or a + b == 0:
        raise ValueError(f"bad IV:OOV ratio {ratio}")
    mixed: list[tuple[str, str]] = []
    i = o = 0
    while count is None or len(mixed) < count:
        block = [("IV", 1)] * a + [("OOV", 1)] * b
        progressed = False
        for tag, _ in block:
            if count is not None and len(mixed) >= count:
                break
            if tag == "IV" and i < len(iv):
                mixed.append(("IV", iv[i])); i += 1; progressed = True
            elif tag == "OOV" and o < len(oov):
                mixed.append(("OOV", oov[o])); o += 1; progressed = True
        if not progressed:
            if count is not None:
                raise ValueError(f"phrase file exhausted at {len(mixed)} "
                                 f"phrases, {count} requested")
            break
    return mixed


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepCell:
    """One point of the parameter grid."""
    engine: str                                  # "nomon" | "rcs"
    w_max: int
    w_c: int = 0                                 # clock engine only
    ordering: Ordering = Ordering.FREQUENCY      # scanning engine only
    placement: CompletionPlacement = CompletionPlacement.TOP
    speed: int = 10                              # l (clock) or j (scan)
    delay: int = 5                               # k (scan extra delay)

    def label(self) -> str:
        if self.engine == "nomon":
            return f"nomon_wc{self.w_c}_wmax{self.w_max}_l{self.speed}"
        return (f"rcs_{self.ordering.value}_{self.placement.value}"
                f"_wmax{self.w_max}_j{self.speed}_k{self.delay}")


@dataclass
class SweepSpec:
    engine: str
    cells: list[SweepCell]
    phrases: list[tuple[str, str]]               # (tag, text)
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    ideal: bool = False
    click_mean: float = EXPERT_CLICK_MEAN
    click_sigma: float = EXPERT_CLICK_SIGMA
    dist_path: str | None = None                 # overrides the Gaussian
    corpus_path: str | None = None               # None = bundled corpus

    def validate(self) -> None:
        if not self.cells:
            raise ValueError("sweep grid is empty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.phrases:
            raise ValueError("sweep needs at least one phrase")
        if any(c.engine != self.engine for c in self.cells):
            raise ValueError("cell engine disagrees with sweep engine")


@dataclass
class PhraseRow:
    session: str
    engine: str
    phrase_id: int
    iv_oov: str
    wpm: float
    cpc: float
    corr_rate: float
    err_rate: float
    clicks: int
    duration_ms: int

    def csv(self) -> str:
        return (f"{self.session},{self.engine},{self.phrase_id},{self.iv_oov},"
                f"{self.wpm:.12g},{self.cpc:.12g},{self.corr_rate:.12g},"
                f"{self.err_rate:.12g},{self.clicks},{self.duration_ms}")


@dataclass
class CellResult:
    cell: SweepCell
    mean_wpm: float
    wpm_ci: tuple[float, float]
    mean_cpc: float
    cpc_ci: tuple[float, float]
    mean_corr_rate: float
    mean_err_rate: float
    mean_clicks_per_selection: float
    failures: int
    rows: list[PhraseRow]


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: list[CellResult]


def _cell_dist(spec: SweepSpec, cell: SweepCell, period: float):
    if spec.ideal:
        return None
    if spec.dist_path is not None:
        return load_distribution(spec.dist_path).rescaled(period)
    return gaussian_distribution(period, spec.click_mean, spec.click_sigma)


def run_cell(spec: SweepSpec, cell: SweepCell, lm: LanguageModel,
             cell_index: int) -> CellResult:
    if cell.engine == "nomon":
        layout = build_nomon_layout(cell.w_c, cell.w_max)
        period = rotation_period(cell.speed)
        dist = _cell_dist(spec, cell, period)
        params = {"period": period}
        runner = run_phrase_nomon
    else:
        layout = build_rcs_layout(cell.ordering, cell.placement, cell.w_max)
        s, d = scan_time(cell.speed), extra_delay(cell.delay)
        dist = _cell_dist(spec, cell, 2 * s)
        params = {"scan_ms": s, "delay_ms": d}
        runner = run_phrase_rcs

    config = SimUserConfig(click_dist=dist)
    rows: list[PhraseRow] = []
    cps = []
    failures = 0
    label = cell.label()
    for rep in range(spec.repetitions):
        tag, phrase = spec.phrases[rep % len(spec.phrases)]
        rng = make_rng(spec.seed, 1, rep)
        out = runner(layout, lm, phrase, config, rng, **params)
        pm = phrase_metrics(out.log, phrase, out.final_text)
        if not out.completed:
            failures += 1
        rows.append(PhraseRow(
            session=f"{label}/r{rep}", engine=cell.engine,
            phrase_id=rep % len(spec.phrases), iv_oov=tag,
            wpm=pm.entry_rate, cpc=pm.click_load,
            corr_rate=pm.correction_rate, err_rate=pm.final_error_rate,
            clicks=pm.clicks, duration_ms=pm.duration_ms))
        cps.append(pm.clicks / pm.selections)

    wpms = [r.wpm for r in rows]
    cpcs = [r.cpc for r in rows]
    boot = make_rng(spec.seed, 2, cell_index)
    wpm_ci = bootstrap_ci(wpms, rng=boot) if len(wpms) > 1 else (wpms[0], wpms[0])
    boot = make_rng(spec.seed, 3, cell_index)
    cpc_ci = bootstrap_ci(cpcs, rng=boot) if len(cpcs) > 1 else (cpcs[0], cpcs[0])
    return CellResult(
        cell=cell,
        mean_wpm=float(np.mean(wpms)), wpm_ci=wpm_ci,
        mean_cpc=float(np.mean(cpcs)), cpc_ci=cpc_ci,
        mean_corr_rate=float(np.mean([r.corr_rate for r in rows])),
        mean_err_rate=float(np.mean([r.err_rate for r in rows])),
        mean_clicks_per_selection=float(np.mean(cps)),
        failures=failures, rows=rows)


_WORKER_STATE: dict = {}


def _worker_init(spec: SweepSpec) -> None:
    corpus = (open(spec.corpus_path).read() if spec.corpus_path
              else bundled_corpus())
    _WORKER_STATE["spec"] = spec
    _WORKER_STATE["lm"] = train_language_model(corpus)


def _worker_cell(i: int) -> CellResult:
    spec = _WORKER_STATE["spec"]
    return run_cell(spec, spec.cells[i], _WORKER_STATE["lm"], i)


def run_sweep(spec: SweepSpec, lm: LanguageModel | None = None,
              workers: int = 1) -> SweepResult:
    """Run every grid cell over the phrase set; deterministic under seed."""
    spec.validate()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                                 initargs=(spec,)) as pool:
            cells = list(pool.map(_worker_cell, range(len(spec.cells))))
    else:
        if lm is None:
            lm = (train_language_model(open(spec.corpus_path).read())
                  if spec.corpus_path else default_language_model())
        cells = [run_cell(spec, c, lm, i) for i, c in enumerate(spec.cells)]
    return SweepResult(spec=spec, cells=cells)


# ---------------------------------------------------------------------------
# scaling studies (picture task, uniform priors, no language model)
# ---------------------------------------------------------------------------

@dataclass
class ScalingRow:
    n: int
    mean: float              # clicks/selection (clock) or scans/selection
    predicted_sqrt: float    # sqrt(n), scanning reference curve


@dataclass
class ScalingResult:
    engine: str
    rows: list[ScalingRow]
    log_fit: tuple[float, float, float]       # a, b, rss of a + b ln n
    linear_fit: tuple[float, float, float]    # a, b, rss of a + b n


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    rss = float(np.sum((y - design @ coef) ** 2))
    return float(coef[0]), float(coef[1]), rss


# Scaling studies use a wider click spread than the expert stand-in: with
# tight clicks the commit threshold is met at the minimum click count for
# small target sets, which hides the growth law being measured.
SCALING_CLICK_SIGMA = 100.0


def run_scaling_study(engine: str, n_values, seed: int = 0,
                      selections_per_n: int = 400, speed: int = 10,
                      click_sigma: float = SCALING_CLICK_SIGMA) -> ScalingResult:
    rows = []
    for n in n_values:
        layout = build_picture_layout(n)
        if engine == "nomon":
            period = rotation_period(speed)
            dist = gaussian_distribution(period, 0.0, click_sigma)
            counts = nomon_picture_clicks(layout, dist, make_rng(seed, n),
                                          period, selections_per_n)
            mean = float(np.mean(counts))
        elif engine == "rcs":
            mean = float(np.mean(rcs_picture_scans(layout, scan_time(speed))))
        else:
            raise ValueError(f"unknown engine kind {engine!r}")
        rows.append(ScalingRow(n=n, mean=mean, predicted_sqrt=math.sqrt(n)))
    x = np.array([r.n for r in rows], dtype=float)
    y = np.array([r.mean for r in rows])
    return ScalingResult(engine=engine, rows=rows,
                         log_fit=_least_squares(np.log(x), y),
                         linear_fit=_least_squares(x, y))


# ---------------------------------------------------------------------------
# result emission
# ---------------------------------------------------------------------------

CELLS_HEADER = ("cell,engine,w_c,w_max,ordering,placement,speed,delay,"
                "mean_wpm,wpm_lo,wpm_hi,mean_cpc,cpc_lo,cpc_hi,"
                "corr_rate,err_rate,clicks_per_selection,failures")


def emit(result: SweepResult, out_dir) -> list[str]:
    """Write metrics.csv (per phrase) and cells.csv (per cell); idempotent."""
    if not result.cells:
        raise ValueError("nothing to emit: sweep result is empty")
    os.makedirs(out_dir, exist_ok=True)
    metrics_path = os.path.join(out_dir, "metrics.csv")
    cells_path = os.path.join(out_dir, "cells.csv")
    try:
        with open(metrics_path, "w") as f:
            f.write(METRICS_HEADER + "\n")
            for cr in result.cells:
                for row in cr.rows:
                    f.write(row.csv() + "\n")
        with open(cells_path, "w") as f:
            f.write(CELLS_HEADER + "\n")
            for cr in result.cells:
                c = cr.cell
                f.write(f"{c.label()},{c.engine},{c.w_c},{c.w_max},"
                        f"{c.ordering.value},{c.placement.value},"
                        f"{c.speed},{c.delay},"
                        f"{cr.mean_wpm:.12g},{cr.wpm_ci[0]:.12g},{cr.wpm_ci[1]:.12g},"
                        f"{cr.mean_cpc:.12g},{cr.cpc_ci[0]:.12g},{cr.cpc_ci[1]:.12g},"
                        f"{cr.mean_corr_rate:.12g},{cr.mean_err_rate:.12g},"
                        f"{cr.mean_clicks_per_selection:.12g},{cr.failures}\n")
    except OSError as e:
        raise OSError(f"could not write sweep results under {out_dir}: {e}") from e
    return [metrics_path, cells_path]


# ---------------------------------------------------------------------------
# sweep spec files: `key = value` lines, # comments
# ---------------------------------------------------------------------------

def _parse_values(raw: str) -> list[str]:
    return [v.strip() for v in raw.split(",") if v.strip()]


def _parse_int_list(raw: str) -> list[int]:
    out: list[int] = []
    for v in _parse_values(raw):
        if ".." in v:
            lo, hi = v.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(v))
    return out


def parse_sweep_spec(path) -> SweepSpec:
    """Build a SweepSpec from a key=value file.

    Keys: engine, w_c, w_max, ordering, placement, speed, delay (ints or
    ranges `a..b`, comma lists), repetitions, seed, phrases (file path),
    ratio (`a:b`), click (`ideal` | `gaussian:MEAN:SIGMA` | a distribution
    file path), corpus (file path).
    """
    kv: dict[str, str] = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()

    engine = kv.get("engine")
    if engine not in ("nomon", "rcs"):
        raise ValueError(f"{path}: engine must be 'nomon' or 'rcs'")
    seed = int(kv.get("seed", "0"))
    repetitions = int(kv.get("repetitions", str(DEFAULT_REPETITIONS)))
    ratio = DEFAULT_IV_OOV_RATIO
    if "ratio" in kv:
        a, b = kv["ratio"].split(":")
        ratio = (int(a), int(b))

    ideal, mean, sigma, dist_path = False, EXPERT_CLICK_MEAN, EXPERT_CLICK_SIGMA, None
    click = kv.get("click", "gaussian")
    if click == "ideal":
        ideal = True
    elif click.startswith("gaussian"):
        parts = click.split(":")
        if len(parts) == 3:
            mean, sigma = float(parts[1]), float(parts[2])
    else:
        dist_path = click

    w_max_values = _parse_int_list(kv.get("w_max", "7"))
    speeds = _parse_int_list(kv.get("speed", "10"))
    cells: list[SweepCell] = []
    if engine == "nomon":
        for w_c, w_max, speed in itertools.product(
                _parse_int_list(kv.get("w_c", "3")), w_max_values, speeds):
            if w_max <= 26 * w_c:
                cells.append(SweepCell(engine="nomon", w_c=w_c, w_max=w_max,
                                       speed=speed))
    else:
        orderings = [Ordering(v) for v in _parse_values(kv.get("ordering", "frequency"))]
        placements = [CompletionPlacement(v)
                      for v in _parse_values(kv.get("placement", "top"))]
        delays = _parse_int_list(kv.get("delay", "5"))
        for ordering, placement, w_max, speed, delay in itertools.product(
                orderings, placements, w_max_values, speeds, delays):
            cells.append(SweepCell(engine="rcs", ordering=ordering,
                                   placement=placement, w_max=w_max,
                                   speed=speed, delay=delay))

    phrases_path = kv.get("phrases") or bundled_phrases_path()
    phrases = load_phrases(phrases_path, ratio=ratio, seed=seed,
                           count=repetitions)
    return SweepSpec(engine=engine, cells=cells, phrases=phrases,
                     repetitions=repetitions, seed=seed, ideal=ideal,
                     click_mean=mean, click_sigma=sigma, dist_path=dist_path,
                     corpus_path=kv.get("corpus"))
