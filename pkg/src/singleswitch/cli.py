"""Command-line entry points: simulate, sweep, scaling, train-lm, serve."""

from __future__ import annotations

import argparse
import sys

from . import lab
from .core import load_layout
from .lm import save_char_model, save_vocabulary, train_language_model


def _add_simulate(sub) -> None:
    p = sub.add_parser("simulate", help="run the simulated user over a phrase set")
    p.add_argument("--engine", choices=("nomon", "rcs"), required=True)
    p.add_argument("--layout", help="layout file (default: built-in for the engine)")
    p.add_argument("--phrases", help="tagged phrase file (default: bundled)")
    p.add_argument("--dist", help="click distribution file (default: expert stand-in)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ideal", action="store_true", help="noise-free clicks")
    p.add_argument("--speed", type=int, default=10, help="l (nomon) or j (rcs)")
    p.add_argument("--delay", type=int, default=5, help="k (rcs extra delay)")
    p.add_argument("--repetitions", type=int, default=lab.DEFAULT_REPETITIONS)
    p.add_argument("--out", default="results", help="output directory")


def _add_sweep(sub) -> None:
    p = sub.add_parser("sweep", help="run a parameter sweep from a spec file")
    p.add_argument("--spec", required=True, help="key=value sweep spec file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)


def _add_scaling(sub) -> None:
    p = sub.add_parser("scaling", help="picture-task scaling study")
    p.add_argument("--engine", choices=("nomon", "rcs"), required=True)
    p.add_argument("--n", default="4,16,64,256", help="comma list of option counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--selections", type=int, default=400)


def _add_train_lm(sub) -> None:
    p = sub.add_parser("train-lm", help="train the character/word models")
    p.add_argument("--corpus", help="training text (default: bundled)")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--out", required=True, help="character model output file")
    p.add_argument("--vocab-out", help="vocabulary output file")


def _add_serve(sub) -> None:
    p = sub.add_parser("serve", help="run the websocket session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--log-dir", default="sessions")


def _cmd_simulate(args) -> int:
    if args.layout:
        layout = load_layout(args.layout)
        engine = args.engine
        if engine == "nomon":
            cell = lab.SweepCell(engine="nomon", w_c=layout.w_c,
                                 w_max=layout.w_max, speed=args.speed)
        else:
            cell = lab.SweepCell(engine="rcs", ordering=layout.ordering,
                                 placement=layout.completion_placement,
                                 w_max=layout.w_max, speed=args.speed,
                                 delay=args.delay)
    elif args.engine == "nomon":
        cell = lab.SweepCell(engine="nomon", w_c=3, w_max=17, speed=args.speed)
    else:
        cell = lab.SweepCell(engine="rcs", w_max=7, speed=args.speed,
                             delay=args.delay)
    phrases = lab.load_phrases(args.phrases or lab.bundled_phrases_path(),
                               seed=args.seed, count=args.repetitions)
    spec = lab.SweepSpec(engine=args.engine, cells=[cell], phrases=phrases,
                         repetitions=args.repetitions, seed=args.seed,
                         ideal=args.ideal, dist_path=args.dist)
    result = lab.run_sweep(spec)
    paths = lab.emit(result, args.out)
    cr = result.cells[0]
    print(f"{cell.label()}: wpm {cr.mean_wpm:.3f} "
          f"[{cr.wpm_ci[0]:.3f}, {cr.wpm_ci[1]:.3f}]  cpc {cr.mean_cpc:.3f}  "
          f"err {cr.mean_err_rate:.4f}  failures {cr.failures}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_sweep(args) -> int:
    spec = lab.parse_sweep_spec(args.spec)
    result = lab.run_sweep(spec, workers=args.workers)
    for p in lab.emit(result, args.out):
        print(f"wrote {p}")
    return 0


def _cmd_scaling(args) -> int:
    n_values = [int(v) for v in args.n.split(",")]
    res = lab.run_scaling_study(args.engine, n_values, seed=args.seed,
                                selections_per_n=args.selections)
    unit = "clicks" if args.engine == "nomon" else "scans"
    for row in res.rows:
        print(f"n={row.n:4d}  mean {unit}/selection {row.mean:.3f}  "
              f"sqrt(n) {row.predicted_sqrt:.3f}")
    a, b, rss = res.log_fit
    print(f"log fit:    {a:.3f} + {b:.3f} ln n   rss {rss:.4f}")
    a, b, rss = res.linear_fit
    print(f"linear fit: {a:.3f} + {b:.3f} n      rss {rss:.4f}")
    return 0


def _cmd_train_lm(args) -> int:
    corpus = open(args.corpus).read() if args.corpus else lab.bundled_corpus()
    lm = train_language_model(corpus, char_order=args.order)
    save_char_model(lm.char_model, args.out)
    print(f"wrote {args.out}")
    if args.vocab_out:
        save_vocabulary(lm.word_model, args.vocab_out)
        print(f"wrote {args.vocab_out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .session import create_app
    uvicorn.run(create_app(log_dir=args.log_dir), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="singleswitch",
        description="single-switch text entry: engines, simulations, service")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_sweep(sub)
    _add_scaling(sub)
    _add_train_lm(sub)
    _add_serve(sub)
    args = parser.parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "scaling": _cmd_scaling,
        "train-lm": _cmd_train_lm,
        "serve": _cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
