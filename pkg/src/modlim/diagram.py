"""In-memory form of a diagram document: named modules, homs, one poset, systems.

Systems, system morphisms and sequences refer to modules and homs by name,
which keeps a diagram directly serializable.  :mod:`modlim.serialize` turns
it into JSON and resolves names back into objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .modules import FPModule, ModHom


@dataclass
class Diagram:
    modulus: int
    modules: dict = field(default_factory=dict)       # name -> FPModule
    homs: dict = field(default_factory=dict)          # name -> (ModHom, src name, dst name)
    poset_elements: Optional[list] = None             # node labels
    poset_le: list = field(default_factory=list)      # [[a, b], ...] strict order pairs
    systems: dict = field(default_factory=dict)       # name -> {"kind", "assign", "maps"}
    morphisms: dict = field(default_factory=dict)     # name -> {"src", "dst", "components"}
    sequences: list = field(default_factory=list)     # [{"f": name, "g": name}]
    args: list = field(default_factory=list)          # module names a compute subcommand acts on
    command: Optional[str] = None                     # compute subcommand that reproduces a certificate
    note: str = ""

    def add_module(self, name: str, A: FPModule) -> str:
        for k, v in self.modules.items():
            if v == A:
                return k
        self.modules[name] = A
        return name

    def add_hom(self, name: str, h: ModHom) -> str:
        src = self.add_module(name + ".src", h.src)
        dst = self.add_module(name + ".dst", h.dst)
        self.homs[name] = (h, src, dst)
        return name

    def set_poset(self, poset, labels: Optional[list] = None):
        labels = labels or [str(i) for i in range(poset.size)]
        self.poset_elements = list(labels)
        self.poset_le = [[labels[a], labels[b]] for a, b in poset.strict_pairs()]
        return labels

    def add_system(self, name: str, system, labels: list) -> str:
        assign = {}
        for i, A in enumerate(system.modules):
            assign[labels[i]] = self.add_module(f"{name}.{labels[i]}", A)
        maps = {}
        for a, b in system.poset.strict_pairs():
            key = f"{labels[a]}<={labels[b]}"
            maps[key] = self.add_hom(f"{name}.{key}", system.map(a, b))
        self.systems[name] = {"kind": system.kind, "assign": assign, "maps": maps}
        return name

    def add_morphism(self, name: str, src: str, dst: str, family, labels: list) -> str:
        comps = {}
        for i, h in enumerate(family):
            comps[labels[i]] = self.add_hom(f"{name}.{labels[i]}", h)
        self.morphisms[name] = {"src": src, "dst": dst, "components": comps}
        return name
