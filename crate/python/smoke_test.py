"""Smoke test for the pyautinv extension.

Build and install it first:

    pip install --no-build-isolation ./crates/py
"""

import math
import pathlib
import sys

import pyautinv

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "corpus"


def check_scalars():
    for p in (2, 3, 5, 7):
        for b in range(40):
            for a in range(b + 1):
                assert pyautinv.binom_mod_p(b, a, p) == math.comb(b, a) % p
        for j in range(p):
            assert pyautinv.factorial_inv(j, p) * math.factorial(j) % p == 1
    try:
        pyautinv.factorial_inv(5, 5)
    except pyautinv.ValidationError:
        pass
    else:
        raise AssertionError("5! mod 5 has no inverse")


def check_corpus():
    files = sorted(CORPUS.glob("*.aut"))
    assert len(files) >= 12
    kinds = set()
    for f in files:
        sigma = pyautinv.Automorphism.from_file(f)
        kinds.add(sigma.kind)
        tau = sigma.invert()
        assert sigma.compose(tau).is_identity(), f
        assert tau.compose(sigma).is_identity(), f
        lines = sigma.verify_inverse(tau, seed=3)
        assert all(line.endswith(": pass") for line in lines), f
        assert tau.invert() == sigma, f
    return len(files), kinds


def check_elements():
    shear = pyautinv.Automorphism("poly 3 2 0\nx1 -> x1\nx2 -> x2 + x1^2\n")
    assert shear.invert().images() == [("x1", "x1"), ("x2", "x2 + 2*x1^2")]
    assert shear.apply("x2^2") == "x2^2 + 2*x1^2*x2 + x1^4"

    table = pyautinv.taylor("diffop", 5, 1, "D1[3]*x1", kmax=1)
    assert table == ["alpha=(0) beta=(2) gamma=() : 1", "alpha=(1) beta=(3) gamma=() : 1"]

    try:
        pyautinv.Automorphism("poly 3 2 0\nx1 -> x1 +\nx2 -> x2\n")
    except pyautinv.ParseError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("parse error not raised")

    try:
        pyautinv.Automorphism("series 5 1 0 D=8\nx1 -> 2*x1^2\n")
    except pyautinv.ValidationError:
        pass
    else:
        raise AssertionError("non-unit Jacobian accepted")

    try:
        shear.verify_inverse(shear)
    except pyautinv.VerificationError:
        pass
    else:
        raise AssertionError("a shear is not its own inverse at p = 3")


def main():
    check_scalars()
    n, kinds = check_corpus()
    check_elements()
    print(f"ok: {n} corpus files over {len(kinds)} kinds")
    return 0


if __name__ == "__main__":
    sys.exit(main())
