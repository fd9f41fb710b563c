"""Smoke test for the twistlab Python extension.

Build and install first, e.g.
    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/twistlab-*.whl
"""
import json
import math

import twistlab_py as tl


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert "zeta" in tl.catalog()

    inv = tl.invariants("zeta")
    assert inv["d"] == 1.0 and close(inv["q"], 1.0, 1e-12)

    member, n_alpha = tl.spectrum("zeta-squared", 2.0)
    assert member and close(n_alpha, 1.0, 1e-12)

    # alternating zeta: F(2, 1/2) = -(1 - 2^{-1}) zeta(2)
    value, tail = tl.twist_series("zeta", complex(2.0, 0.0), 0.5, 200000)
    assert close(value, -math.pi ** 2 / 12, 1e-4), value

    # F = -eta and eta(-1) = (1 - 4) zeta(-1) = 1/4
    value, err = tl.continue_twist("zeta", complex(-1.0, 0.0), 0.5)
    assert close(value, -0.25, 1e-6), (value, err)

    rep = tl.verify_fe("zeta", complex(-1.0, 10.0), 0.5, 1)
    assert rep["residual"] <= 1e-3, rep

    strict = tl.detect_strict("halfint-model")
    assert strict["is_strict"] and strict["h"] == 0

    dev = tl.residue_identity("zeta", 0.5)
    assert max(dev) <= 1e-5, dev

    report = json.loads(tl.run("invariants", "zeta"))
    assert report["name"] == "zeta"

    try:
        tl.spectrum("zeta", -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative alpha accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
