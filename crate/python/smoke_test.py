"""Smoke test for the sqrtp extension module.

Build and run from the repository root:

    cargo build --release -p sqrtp-python
    cp target/release/libsqrtp.so python/sqrtp.so
    python3 python/smoke_test.py
"""

import json
import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import sqrtp  # noqa: E402


def main():
    f = sqrtp.field(5)
    assert (Fraction(f.eps_a), Fraction(f.eps_b)) == (Fraction(1, 2), Fraction(1, 2))
    assert (f.norm_eps, f.varpi, f.h_f) == (-1, 3, 1)
    assert Fraction(f.zeta_m1) == Fraction(1, 30)
    assert sqrtp.field(37).varpi == 1
    assert sqrtp.Field(19).eps_a == "170/1"

    ws = [(k.tag, k.w) for k in sqrtp.cm_fields(5)]
    assert ws == [("K1", 2), ("K3", 3), ("Zeta10", 5)], ws
    assert [k.h for k in sqrtp.cm_fields(3)] == [1, 2]

    assert len(sqrtp.orders(7)) == 5
    labels = [o.label for o in sqrtp.orders(13, over="A")]
    assert labels == ["B12", "B14", "B34", "B32", "B32conj"], labels

    r = sqrtp.class_number(5, disc=[2, 3])
    assert r.h == 2
    assert Fraction(r.mass) + Fraction(r.elliptic) == 2
    assert json.loads(r.to_json())["h_o"] == 2
    assert sqrtp.class_number(13, disc=["3:1", "3:2"]).disc == ["P3:1", "P3:2"]
    for p in (2, 5, 13):
        assert sqrtp.class_number(p).h == 1

    assert all(h >= 1 for h in sqrtp.class_number_family(29))
    sqrtp.verify(31)
    assert sqrtp.kronecker(2, 7) == 1

    for bad in (lambda: sqrtp.field(4), lambda: sqrtp.orders(7, over="A"),
                lambda: sqrtp.class_number(5, disc=[2])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
