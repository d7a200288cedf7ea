"""Smoke test for the `qel` Python extension.

Build and install the module first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import json
import math

import qel


def main():
    rho = qel.DensityMatrix.random(4, seed=1, eps=1e-6)
    sigma = qel.DensityMatrix.random(4, seed=2, eps=1e-6)
    assert rho.dim == 4
    assert abs(sum(rho.eigenvalues()) - 1.0) < 1e-12

    s = qel.relative_entropy(rho, sigma)
    assert s >= 0.0
    assert abs(qel.relative_entropy(rho, sigma, mu=0.5) - (s + math.log(2.0))) < 1e-9
    assert qel.renyi(0.5, rho, sigma) <= s + 1e-9
    assert abs(qel.relative_entropy(rho, rho)) < 1e-9

    phi = qel.KrausChannel.random_unital(4, m=3, seed=3)
    assert phi.is_unital
    out = qel.check_stronger_monotonicity(rho, sigma, phi)
    assert out["pass"], out
    assert out["quantities"]["trace_omega"] <= 1.0 + 1e-8

    state = qel.MultipartiteState.random([2, 2, 2], seed=4)
    assert qel.cmi(state) >= -1e-10
    assert qel.check_ssa(state)["pass"]
    assert qel.MultipartiteState.from_json(state.to_json()).dims == [2, 2, 2]

    spec = {"d_a": 2, "d_c": 2, "seed": 5,
            "blocks": [{"p": 0.5, "d_bl": 1, "d_br": 2}, {"p": 0.5, "d_bl": 2, "d_br": 1}]}
    markov = qel.MultipartiteState.markov(json.dumps(spec))
    assert abs(qel.cmi(markov)) < 1e-10
    res = qel.markov_characterizations(markov)
    assert res["pass"] and res["quantities"]["markov"] == 1.0

    trotter = qel.trotter_sequence(state, n_max=16)
    assert abs(trotter["t_values"][0] - 1.0) < 1e-10
    assert max(trotter["t_values"]) <= 1.0 + 1e-8

    records = qel.run_suite("ssa,pinsker", trials=5, seed=7)
    assert len(records) == 10 and all(r["pass"] for r in records)
    assert records == qel.run_suite("ssa,pinsker", trials=5, seed=7)
    assert "markov" in qel.checkers()

    ex = qel.explore("cmi-petz", trials=50, seed=1)
    assert ex["completed"] + ex["failed"] == 50
    assert sum(ex["histogram_counts"]) == ex["completed"]

    try:
        qel.run_suite("no-such-checker")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown checker accepted")

    print("qel smoke test passed")


if __name__ == "__main__":
    main()
