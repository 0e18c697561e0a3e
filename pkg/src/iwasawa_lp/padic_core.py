"""p-adic scalars, cyclotomic values, characters and Gauss sums (one import point)."""
from .cyclo import (CycloScalar, PadicCharacter, character_eval, cyclo_degree, finite_characters,
                    gauss_sum)
from .numfield import QuadraticElement, hecke_root, newton_slopes
from .padic import (PadicScalar, PrecisionError, PrecisionProfile, QpPoly, is_prime,
                    principal_unit_logs, teichmuller, valuation)

__all__ = ["CycloScalar", "PadicCharacter", "PadicScalar", "PrecisionError", "PrecisionProfile",
           "QpPoly", "QuadraticElement", "character_eval", "cyclo_degree", "finite_characters",
           "gauss_sum", "hecke_root", "is_prime", "newton_slopes", "principal_unit_logs",
           "teichmuller", "valuation"]
