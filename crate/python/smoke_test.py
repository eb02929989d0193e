"""Smoke test for the polydisc extension module: python python/smoke_test.py"""

import math

import polydisc

KITE = 16 * (7 - 4 * math.sqrt(3))


def close(a, b, tol):
    assert abs(a - b) < tol, f"{a} vs {b}"


def main():
    kite = polydisc.kite4()
    assert len(kite) == 4
    close(kite.delta_bar(), KITE, 1e-12)
    close(kite.diameter(), 2.0, 1e-12)
    assert sorted(kite.diameter_graph()) == [(0, 1), (0, 2), (1, 2), (1, 3)]
    report = kite.kkt()
    assert report["passed"] and report["min_multiplier"] > 0

    same = polydisc.Config(kite.points())
    close(same.log_discriminant(), kite.log_discriminant(), 1e-14)
    close(polydisc.Config.from_json(kite.to_json()).delta_bar(), KITE, 1e-14)
    close(kite.normalized(1.0).delta_bar(rescale=True), KITE, 1e-12)

    close(polydisc.dodecagon12().delta_bar(), 1.2901383629, 1e-9)
    close(polydisc.arc_polygon(18).delta_bar(), 1.283184, 1e-6)
    close(polydisc.hexagon6().delta_bar(), (2 * math.sqrt(3) - 2) ** 18 / 729, 1e-9)
    assert polydisc.triwave(64).diameter() <= 2 + 1e-12

    config, summary = polydisc.maximize(5, starts=8, seed=3)
    close(config.delta_bar(), 0.8**5 * (math.sqrt(5) - 1) ** 10, 1e-6)
    assert summary["termination"] == "gradient-converged"

    cstar = polydisc.constant("Cstar")
    assert cstar["passed"]
    close(cstar["closed_form_value"], 1.304457, 1e-6)
    assert polydisc.caterpillar_count(8) == (20, 20)

    for bad in (lambda: polydisc.constant("bogus"), lambda: polydisc.Config([(math.nan, 0.0)])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print(f"polydisc {polydisc.__version__}: smoke test ok")


if __name__ == "__main__":
    main()
