"""Quick end-to-end check of the Python bindings.

Build first:  maturin develop -m crates/py/Cargo.toml
"""

from fractions import Fraction

import nodal


def main():
    assert nodal.severi(3, 1) == 12
    assert nodal.severi(4, 3) == 675
    assert nodal.severi(3, 0, alpha="3", beta="") == 1

    g2 = nodal.forms(4)["G2"]
    assert g2.coeffs() == [Fraction(-1, 24), 1, 3, 4, 7]

    s = nodal.PowerSeries([1, 1, 0, 0, 0])
    assert (s.log().exp()) == s
    assert s.pow(Fraction(1, 2)) * s.pow(Fraction(1, 2)) == s

    table = nodal.SeveriTable()
    coeffs, fits, _ = nodal.node_poly_check(2, 3, 12, table=table)
    assert fits and len(coeffs) == 5

    assert nodal.decompose((1, -3, 9, 3)) == (0, 1, 0, 0)
    assert nodal.class_of("plane", 4) == (16, -12, 9, 3)
    v3, v0 = nodal.close_relation((1, -3, 8, 4), (0, 0, 9, 3), 0, 0)
    assert v3 == (0, 0, 8, 4) and v0 == (1, -3, 9, 3)

    fit = nodal.fit(2, table=table)
    assert fit.consistent
    assert fit.B["B1"].coeffs() == [1, -1, -5]
    assert fit.B["B2"].coeffs() == [1, 5, 2]
    t1 = fit.T(1)
    assert t1 == {(1, 0, 0, 0): 3, (0, 1, 0, 0): 2, (0, 0, 0, 1): 1}
    assert fit.evaluate(nodal.class_of("plane", 12), 2) == nodal.p2_series(12, 2, table=table)

    val, unit = nodal.genus_series(0, 0, 0, 2, 3)
    assert val == 1 and unit.coeffs() == [1, 24, 324, 3200]

    try:
        nodal.decompose((1, 0, 9, 3))
    except nodal.NodalError:
        pass
    else:
        raise AssertionError("parity violation accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
