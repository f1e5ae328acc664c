"""Smoke test for the momentlab Python bindings.

Build the extension first, for example:

    cargo build --release -p momentlab-py
    cp target/release/libmomentlab_py.so python/momentlab_py.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import momentlab_py as ml


def main():
    s = ml.kloosterman(3, 5, 77)
    assert abs(s) <= ml.weil_bound(3, 5, 77)
    assert abs(s - ml.kloosterman(5, 3, 77)) < 1e-9

    assert ml.dim_cusp_forms(12) == 1
    assert ml.dim_cusp_forms(24) == 2

    (delta,) = ml.eigenforms(12, 40)
    assert abs(delta.hecke_lambda(2) - (-24) / 2 ** 5.5) < 1e-12
    assert abs(delta.coefficients[0] - 1.0) < 1e-15

    report = ml.petersson(12, 1, 1)
    assert report["rel_gap"] < 1e-8, report

    forms = ml.eigenforms(24, 3000)
    f_gl3 = ml.SymSquareForm(ml.eigenforms(12, 3000)[0], 3000)
    assert f_gl3.coefficient(1) == 1.0
    for f in forms:
        assert ml.central_value_rs(f_gl3, f) > -1e-6
        assert math.isfinite(ml.central_value_gl2(f))

    w = ml.TestFunction.canonical()
    assert w(0.0) == 0.0 and w.integral() > 0.0
    avg = ml.averaged_bessel(w, 50.0, 2500.0, "even")
    assert abs(avg["lhs"] - avg["main_term"] - avg["residual"]) < 1e-9

    amp = ml.amplifier(forms[0], forms[0], 11)
    assert abs(amp["value"] - (amp["constant"] + amp["first"] + amp["second"] + amp["diagonal"])) < 1e-10
    assert amp["value"] >= amp["self_lower_bound"]

    print("smoke test passed (momentlab_py %s)" % ml.__version__)


if __name__ == "__main__":
    main()
