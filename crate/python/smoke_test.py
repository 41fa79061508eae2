"""Smoke test for the ptvir extension.

Build it first:  pip install --no-build-isolation -e crates/python
"""

from fractions import Fraction

import ptvir


def main():
    # closed forms on the cubic
    z = ptvir.partition("ch4(H)")
    assert z.closed_form == "21/4 q", z.closed_form
    assert z.functional_equation and not z.ambiguous
    z = ptvir.partition("ch2(g1) * ch3(g6)")
    assert z.closed_form == "((3 q - 3 q^2) / (1 + q)) P(1,6)", z.closed_form
    # 3q(1-q)/(1+q) = 3q - 6q^2 + ...
    assert ptvir.bracket("ch2(g1)*ch3(g6)", 2) == "-6 P(1,6)"
    assert ptvir.virasoro_residual(1, "ch4(1)", 6) == "O(q^8)"

    # the plane: S^[1] = S and ch_k(g) = [td^-1]_{k-2} g
    plane = ptvir.Surface.plane()
    assert plane.basis() == ["1", "h1", "p"]
    assert plane.bracket("ch2(p)", 1) == 1
    assert plane.bracket("ch3(h1)", 1) == Fraction(-3, 2)
    # [td^-1]_2 = c1^2/4 - (c1^2 + c2)/12 = 9/4 - 1
    assert plane.bracket("ch4(1)", 1) == Fraction(5, 4)
    for k in range(-1, 5):
        for n in (0, 1):
            assert plane.virasoro_residual(k, "ch3(h1)*ch4(p)", n) == 0

    k3 = ptvir.Surface.k3()
    assert len(k3.basis()) == 24

    report = ptvir.verify("fano-geometry")
    assert report.passed and len(report) == 48
    assert report.rows[0] == ("fano-geometry/integral-c1^2", "fano-integrals", "45", "45", "pass")
    report = ptvir.verify("surface-n1", fuzz=2, seed=3)
    assert report.passed, report.to_text()

    for bad in (lambda: ptvir.partition("ch2(Z)"), lambda: ptvir.verify("nope"), lambda: plane.bracket("ch2(p)", 2)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test ok")


if __name__ == "__main__":
    main()
