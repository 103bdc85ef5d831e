"""The shipped template registry and its certification gate."""

from __future__ import annotations

from pathlib import Path

from .contract import BehavioralContract
from .harness import CertificationFailure, CertificationReport, certify
from .template import ComponentTemplate

DATA = Path(__file__).with_name("data")

SHIPPED = (
    "wire", "signal_plus", "signal_minus", "diode_plus", "diode_minus", "dup_plus", "dup_minus",
    "merge_plus", "merge_minus", "semicross_plus", "semicross_minus", "switch_plus",
    "switch_minus", "retarder_base",
)


class Registry:
    """Templates and contracts loaded from a directory of ``.tpl``/``.contract`` files.

    ``get`` hands out a template only after it passed its contract; the
    verdict is cached per registry instance.
    """

    def __init__(self, root=None):
        self.root = Path(root) if root else DATA
        if not self.root.is_dir():
            raise FileNotFoundError(f"registry directory {self.root} not found")
        self.templates = {p.stem: ComponentTemplate.load(p) for p in sorted(self.root.glob("*.tpl"))}
        self.contracts = {
            p.stem: BehavioralContract.load(p) for p in sorted(self.root.glob("*.contract"))
        }
        self.reports: dict[str, CertificationReport] = {}

    def __contains__(self, name):
        return name in self.templates

    def names(self):
        return list(self.templates)

    def certify(self, name, strict=False) -> CertificationReport:
        if name not in self.reports:
            if name not in self.contracts:
                rep = CertificationReport(name, failures=["no contract shipped"])
            else:
                rep = certify(self.templates[name], self.contracts[name], strict=False)
            self.reports[name] = rep
        rep = self.reports[name]
        if strict and not rep.ok:
            raise CertificationFailure(f"{name}: {rep.failures[0]}")
        return rep

    def certify_all(self):
        return [self.certify(n) for n in self.templates]

    def get(self, name) -> ComponentTemplate:
        """The named template, refused unless it is certified."""
        if name not in self.templates:
            raise KeyError(f"no template {name!r} in {self.root}")
        self.certify(name, strict=True)
        return self.templates[name]


_default = None


def default_registry() -> Registry:
    global _default
    if _default is None:
        _default = Registry()
    return _default
