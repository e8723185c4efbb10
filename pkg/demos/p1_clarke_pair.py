"""The stacky P^1 example: one age-1/2 sector and the dual orbifold diamonds.

Run with ``python3 demos/p1_clarke_pair.py``.
"""

from clarke_mirror import fixtures
from clarke_mirror.nefclarke import dual_nef_partition, validate_clarke
from clarke_mirror.orbifold import box_elements, clarke_family_side, verify_cdual

fans = fixtures.p1_fans()

# Without the multiplier 2 on the middle ray the support function is not convex.
plain = validate_clarke(fans["sigma_L_plain"], fans["sigma_check"])
print("plain fan:", "valid" if plain.valid else f"fails on {plain.reason}")

stacky = validate_clarke(fans["sigma_L_stacky"], fans["sigma_check"])
print("stacky fan:", "valid" if stacky.valid else f"fails on {stacky.reason}")

for b in box_elements(fans["sigma_L_stacky"]):
    print(f"twisted sector at {b.point}, age {b.age}")

np = fixtures.segment_nef(1)
left = clarke_family_side(np.pieces(), {0})
right = clarke_family_side(dual_nef_partition(np).pieces, set())
print("\norbifold side\n" + left.diamond.table())
print("\nLG side\n" + right.diamond.table())
print()
print(verify_cdual(left.diamond, right.diamond, 2).table())
