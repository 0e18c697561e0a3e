"""Modular symbols for Gamma_0(N): spaces, Hecke operators, eigen-symbols, stabilization."""
from .forms import BUILTIN, FormFixture, load_form
from .modsym import (INF, EigenSymbol, NotFoundError, NotSeparatedError, StabilizedForm, SymbolError,
                     SymbolSpace, algebraic_l_value, build_space, charpoly, find_eigensymbol,
                     hecke_operator, mat_mul, p_stabilize, sign_for, twisted_value_by_operator)

__all__ = ["BUILTIN", "INF", "EigenSymbol", "FormFixture", "NotFoundError", "NotSeparatedError",
           "StabilizedForm", "SymbolError", "SymbolSpace", "algebraic_l_value", "build_space",
           "charpoly", "find_eigensymbol", "hecke_operator", "load_form", "mat_mul", "p_stabilize",
           "sign_for", "twisted_value_by_operator"]
