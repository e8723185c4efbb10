"""Exact polyhedral, orbifold and irregular Hodge computations for Clarke mirror pairs."""

from .hodge import HodgeDiamond, lg_diamond, newton_spectrum, koszul_oracle
from .mirrorledger import BLedger, BSymbol, derive_hdual, verify_binomial_identities
from .nefclarke import dual_nef_partition, validate_clarke, validate_nef_partition
from .polytope import Polytope, convex_hull, is_reflexive, polar_dual

__version__ = "0.1.0"

__all__ = [
    "BLedger",
    "BSymbol",
    "HodgeDiamond",
    "Polytope",
    "convex_hull",
    "derive_hdual",
    "dual_nef_partition",
    "is_reflexive",
    "koszul_oracle",
    "lg_diamond",
    "newton_spectrum",
    "polar_dual",
    "validate_clarke",
    "validate_nef_partition",
    "verify_binomial_identities",
]
