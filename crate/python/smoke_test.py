"""Smoke test for the circarray_py extension module.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o target/wheels
    pip install target/wheels/circarray_py-*.whl
"""

import math
import sys

import numpy as np

import circarray_py as ca


def check(cond, msg):
    if not cond:
        print(f"FAIL: {msg}")
        sys.exit(1)
    print(f"ok    {msg}")


def main():
    s = np.array(ca.dft_matrix(8))
    check(np.allclose(s @ s.conj().T, np.eye(8), atol=1e-12), "DFT matrix is unitary")
    check(ca.eigenvalues(4, 0.45) == [0.0, -0.9, 0.0, 0.9], "eigenvalues for N=4")
    check(ca.zero_mode_indices(8) == (2, 6), "zero modes for N=8")
    check(ca.partition_mode_sets(4) == ([1, 3], [2, 4]), "odd/even sets")

    cfg = ca.ArrayConfig(8, 0.45, 0.015, pump="r0")
    check(cfg.validate() == [], "config validates")
    check(len(cfg.z_grid()) == 401, "default z grid")
    drift = np.array(ca.drift_matrix(cfg))
    check(drift.shape == (16, 16), "drift matrix shape")

    v = ca.covariance(cfg, 20.0)
    oracle = ca.covariance(cfg, 20.0, route="oracle")
    m, o = np.array(v.matrix()), np.array(oracle.matrix())
    check(np.max(np.abs(m - o)) < 1e-9, "closed form matches oracle")
    check(abs(np.linalg.det(m) - 1.0) < 1e-8, "pure state det = 1")
    check(v.diagnostics().is_physical, "state is physical")

    odd, even = ca.partition_mode_sets(8)
    report = v.full_inseparability(odd)
    check(len(report.pairs) == 3 and report.fully_inseparable, "odd set fully inseparable")
    check(report.note is not None, "pure-state annotation present")

    lossy = v.apply_loss(0.3)
    a = v.vlf_pair(1, 3, 0.0, math.pi / 2)
    b = lossy.vlf_pair(1, 3, 0.0, math.pi / 2)
    check(abs(b - (0.3 * a + 4 * 0.7)) < 1e-12, "loss law")

    half = ca.covariance(ca.ArrayConfig(8, 0.45, 0.015, pump="rN2"), 20.0)
    check(np.isclose(half.matrix()[0][0], math.cosh(1.2), atol=1e-12), "r=N/2 diagonal is cosh(1.2)")
    check(not half.full_inseparability(odd).fully_inseparable, "r=N/2 not inseparable")

    bad = ca.ArrayConfig(6, 0.45, 0.015, pump="rN4")
    check(any("N ≡ 0 mod 4" in e for e in bad.validate()), "N=6 with r=N/4 rejected")
    try:
        ca.covariance(bad, 1.0)
        check(False, "invalid config raises")
    except ValueError:
        check(True, "invalid config raises ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
