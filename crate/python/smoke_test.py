"""Smoke test for the `snc` extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import json
import math

import snc


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert close(snc.beta(0.2), 0.0244, 5e-4)
    tau, profit = snc.optimal_incentive(10.0)
    assert close(tau, 0.104, 1e-3) and close(profit, 0.650, 5e-3)

    a = snc.alpha_star()
    assert a["gamma_star"] > 0 and a["alpha_star"] > 0

    toy = snc.run_toy()
    assert close(toy["usnc_profit"], 3.0, 0.05)
    assert close(toy["jsnc_profit"], 4.16, 0.05)

    for method in ("usnc", "jsnc", "semi-jsnc"):
        out = snc.solve(method)
        assert out["solution"]["method"] == method
        assert out["score"] >= 0

    scenario = json.loads(snc.scenario_json("paper-default"))
    scenario["users"] = {"kind": "explicit", "points": [[0.0, 0.0], [50.0, 0.0], [300.0, 0.0]]}
    out = snc.solve("semi-jsnc", scenario=json.dumps(scenario))
    assert out["solution"]["flags"]["u"][:2] == [True, True]

    report = snc.monte_carlo(trials=3, seed=1)
    assert len(report["trials"]) == 3 and report["generator"] == "chacha20/v1"
    again = snc.monte_carlo(trials=3, seed=1)
    scores = lambda r: [[o["score"] for o in t["outcomes"]] for t in r["trials"]]
    assert scores(report) == scores(again)

    opt = snc.regional_optimum(200.0, 2000.0)
    assert close(opt["gain_percent"], 50.0, 5.0)
    assert abs(snc.tau_infinity(500.0)["tau"] - opt["tau"]) < 0.1

    curve = snc.fit_pwl(4)
    assert len(curve["breakpoints"]) == 4 and math.isfinite(curve["rmse"])

    try:
        snc.solve("nonsense")
    except snc.SncCoreError:
        pass
    else:
        raise AssertionError("unknown method accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
