"""p-adic L-functions of modular forms: exact p-adics, Iwasawa algebras,
modular symbols, admissible distributions and family gluing."""

__version__ = "0.1.0"
