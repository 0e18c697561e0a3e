"""Named eigenform fixtures and loading of form fixture files."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .modsym import EigenSymbol, build_space, find_eigensymbol


@dataclass(frozen=True)
class FormFixture:
    label: str
    N: int
    k: int
    eigenvalues: dict     # l -> a_l, enough to isolate the form

    def symbols(self) -> dict[int, EigenSymbol]:
        """The plus and minus eigen-symbols, normalized on the pinned basis."""
        space = build_space(self.N, self.k)
        return {s: find_eigensymbol(space, self.eigenvalues, s) for s in (1, -1)}

    def to_record(self) -> dict:
        return {"label": self.label, "N": self.N, "k": self.k,
                "eigenvalues": {str(l): str(a) for l, a in sorted(self.eigenvalues.items())}}

    @classmethod
    def from_record(cls, rec: dict) -> "FormFixture":
        ev = {int(l): Fraction(a) for l, a in rec["eigenvalues"].items()}
        return cls(str(rec.get("label", f"{rec['N']}.{rec['k']}")), int(rec["N"]), int(rec["k"]), ev)


BUILTIN = {
    # the elliptic curve y^2 + y = x^3 - x^2 - 10x - 20
    "11a": FormFixture("11a", 11, 2, {2: -2, 3: -1}),
    # Ramanujan's Delta
    "Delta": FormFixture("Delta", 1, 12, {2: -24}),
}


def load_form(label_or_path: str) -> FormFixture:
    """A builtin label or the path of a JSON fixture {label, N, k, eigenvalues}."""
    if label_or_path in BUILTIN:
        return BUILTIN[label_or_path]
    path = Path(label_or_path)
    if not path.exists():
        raise FileNotFoundError(f"unknown form '{label_or_path}' (builtins: {', '.join(sorted(BUILTIN))})")
    return FormFixture.from_record(json.loads(path.read_text()))
