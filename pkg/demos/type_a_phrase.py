"""Watch both engines type one phrase, selection by selection.

Usage: python3 demos/type_a_phrase.py [phrase]
"""

import sys

from singleswitch.clickmodel import gaussian_distribution
from singleswitch.core import (CompletionPlacement, Ordering,
                               build_nomon_layout, build_rcs_layout, make_rng)
from singleswitch.lab import default_language_model
from singleswitch.metrics import phrase_metrics
from singleswitch.nomon import rotation_period
from singleswitch.rcs import extra_delay, scan_time
from singleswitch.simuser import SimUserConfig, run_phrase_nomon, run_phrase_rcs


def show(name, out, phrase):
    pm = phrase_metrics(out.log, phrase, out.final_text)
    print(f"\n== {name} ==")
    for e in out.log.events:
        if e.kind == "select":
            print(f"  {e.t:>8} ms  {e.data['target']}")
    print(f"  final: {out.final_text!r}")
    print(f"  {pm.entry_rate:.2f} wpm, {pm.clicks} clicks, "
          f"{pm.correction_rate:.0%} corrective, err {pm.final_error_rate:.3f}")


def main():
    phrase = " ".join(sys.argv[1:]) or "could you pass me the salt"
    lm = default_language_model()
    config = SimUserConfig(
        click_dist=gaussian_distribution(1000.0, 120.0, 50.0))

    period = rotation_period(10)
    out = run_phrase_nomon(build_nomon_layout(3, 17), lm, phrase, config,
                           make_rng(0, 0), period=period)
    show(f"nomon (T={period} ms, Wc=3, Wmax=17)", out, phrase)

    s, d = scan_time(10), extra_delay(5)
    layout = build_rcs_layout(Ordering.FREQUENCY, CompletionPlacement.TOP, 7)
    out = run_phrase_rcs(layout, lm, phrase, config, make_rng(0, 0),
                         scan_ms=s, delay_ms=d)
    show(f"row-column scanning (s={s} ms, d={d} ms, Wmax=7)", out, phrase)


if __name__ == "__main__":
    main()
