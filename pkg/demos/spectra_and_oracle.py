"""Newton spectra of a few Laurent polynomials, checked against the Jacobian-ring oracle."""

from clarke_mirror import fixtures
from clarke_mirror.hodge import koszul_oracle, newton_spectrum
from clarke_mirror.polytope import NewtonLevel, Polytope

cases = {
    "t^5 on the affine line": Polytope([(0,), (5,)]),
    "x + 1/x": Polytope([(-1,), (1,)]),
    "x + y + 1/(xy)": fixtures.polygon("P2"),
    "x + 1/x + y + 1/y": fixtures.polygon("P1xP1"),
    "hexagon": fixtures.polygon("dP6"),
}

for name, p in cases.items():
    spec = newton_spectrum(NewtonLevel(p))
    oracle = koszul_oracle(p)
    levels = ", ".join(f"{lam}:{c}" for lam, c in spec.levels.items())
    agree = "agrees" if oracle.levels == spec.levels else "DISAGREES"
    print(f"{name:<22} total {spec.total}  [{levels}]  oracle {agree}")
