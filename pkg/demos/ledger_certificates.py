"""Mirror-relation certificates for grouped B-symbol targets.

Shows the k = 2 and k = 3 derivations, then where the generator span stops
being enough and labeled hypotheses take over.
"""

from clarke_mirror.mirrorledger import MirrorGeneratorSet, derive_hdual, labeled_target

der = derive_hdual(5)
for cert in der.certificates:
    terms = " ".join(("+" if c > 0 else "-") + f"{abs(c)}*{g}" + (f"({s})" if s else "") for (g, s), c in sorted(cert.terms.items()))
    flag = " [conditional]" if cert.conditional(der.generators) else ""
    print(f"{cert.label}{flag}\n    {terms if len(terms) < 160 else terms[:157] + '...'}")

print(f"\nunconditional up to k = {der.unconditional_up_to()}")

gens = MirrorGeneratorSet()
atoms = tuple((i,) for i in range(1, 5))
gens.geometric_closure(atoms)
for minus, zero in ((atoms[:2], atoms[2:]), (atoms[:3], atoms[3:])):
    inside = gens.membership(labeled_target(minus, zero)) is not None
    print(f"labeled {len(minus)},{len(zero)} target on four parts in the geometric span: {inside}")
