"""Named residual norms with tolerances and verdicts."""
from dataclasses import dataclass, field
import json
import math


@dataclass
class Residual:
    name: str
    value: float
    tolerance: float | None = None
    asserted: bool = True
    note: str = ""

    @property
    def passed(self):
        if self.tolerance is None:
            return True
        return math.isfinite(self.value) and self.value < self.tolerance


@dataclass
class ResidualReport:
    """Collection of residuals.

    Entries with ``asserted=False`` are reported only and never influence
    :attr:`passed`.
    """
    title: str = ""
    entries: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, name, value, tolerance=None, asserted=True, note=""):
        self.entries.append(Residual(name, float(value), tolerance,
                                     asserted and tolerance is not None, note))
        return self

    def extend(self, other, prefix=""):
        for e in other.entries:
            self.entries.append(Residual(prefix + e.name, e.value, e.tolerance,
                                         e.asserted, e.note))
        return self

    def __getitem__(self, name):
        for e in self.entries:
            if e.name == name:
                return e.value
        raise KeyError(name)

    def names(self):
        return [e.name for e in self.entries]

    @property
    def passed(self):
        return all(e.passed for e in self.entries if e.asserted)

    def failures(self):
        return [e.name for e in self.entries if e.asserted and not e.passed]

    def max(self):
        return max((e.value for e in self.entries), default=0.0)

    def to_dict(self):
        def row(e):
            return {"name": e.name, "value": e.value, "tolerance": e.tolerance,
                    "passed": e.passed, "note": e.note}
        return {
            "title": self.title,
            "passed": self.passed,
            "asserted": [row(e) for e in self.entries if e.asserted],
            "reported_only": [row(e) for e in self.entries if not e.asserted],
            "meta": self.meta,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          default=_json_float)


def _json_float(x):
    return float(x)
