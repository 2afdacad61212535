"""Smoke test for the pywgreedy extension module."""

import json
import math

import pywgreedy as wg


def main():
    l2 = wg.Space.lp(2.0, 4)
    assert math.isclose(l2.norm([3.0, 4.0, 0.0, 0.0]), 5.0)
    assert wg.Space.sup(3).norm([1.0, -7.0, 2.0]) == 7.0

    w = wg.Weight.harmonic(4)
    assert math.isclose(w.measure([1, 2]), 1.5)

    assert wg.greedy_orderings([1.0, -1.0, 0.5], all_ties=True) == [[1, 2, 3], [2, 1, 3]]
    assert wg.greedy_sum([0.5, -3.0, 2.0], 2) == [0.0, -3.0, 2.0]

    value, chosen = wg.sigma(wg.Space.sup(3), [3.0, 2.0, 1.0], wg.Weight.constant(3), 2.0, "expansional")
    assert value == 1.0 and chosen == [1, 2]

    config = {
        "spaces": [{"kind": "lp", "dim": 5, "p": 2}],
        "weights": [{"kind": "constant"}],
        "suites": ["nu-counterexample"],
    }
    report = json.loads(wg.run_config(json.dumps(config)))
    assert report["summary"]["pass"] == 1, report["summary"]

    try:
        wg.Space.lp(0.5, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("p < 1 accepted")

    print(f"pywgreedy {wg.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
