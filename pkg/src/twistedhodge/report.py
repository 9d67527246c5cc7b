"""Check results and their JSON / CSV serialisation."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

PASS, FAIL, NA = "pass", "fail", "n/a"


@dataclass
class Check:
    name: str
    anchor: str
    residual: float | None = None
    tolerance: float | None = None
    observed: object = None
    expected: object = None
    verdict: str = ""
    note: str = ""

    def __post_init__(self):
        if not self.verdict:
            ok = True
            if self.residual is not None and self.tolerance is not None:
                ok = self.residual <= self.tolerance
            if self.expected is not None:
                ok = ok and self.observed == self.expected
            self.verdict = PASS if ok else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict != FAIL


@dataclass
class CheckReport:
    suite: str
    model: str
    N: int
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, *args, **kwargs) -> Check:
        c = args[0] if args and isinstance(args[0], Check) else Check(*args, **kwargs)
        self.checks.append(c)
        return c

    def extend(self, other: "CheckReport", prefix: str = ""):
        for c in other.checks:
            c = Check(**{**asdict(c), "name": prefix + c.name})
            self.checks.append(c)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return PASS if self.passed else FAIL

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def max_residual(self) -> float:
        vals = [c.residual for c in self.checks if c.residual is not None and c.verdict != "n/a"]
        return max(vals) if vals else 0.0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "model": self.model,
            "N": self.N,
            "verdict": self.verdict,
            "checks": [_clean(asdict(c)) for c in self.checks],
            **({"data": _clean(self.data)} if self.data else {}),
        }

    def summary(self) -> str:
        lines = [f"[{self.verdict.upper()}] {self.suite} on {self.model} (N={self.N})"]
        for c in self.checks:
            r = "" if c.residual is None else f" residual={c.residual:.3e}"
            o = "" if c.expected is None else f" observed={c.observed} expected={c.expected}"
            lines.append(f"  {c.verdict:>4}  {c.name}{r}{o}{(' ' + c.note) if c.note else ''}")
        return "\n".join(lines)


def _clean(x):
    """Make a structure JSON-friendly with stable float formatting."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        x = x.item()
    if isinstance(x, float):
        return float(f"{x:.6e}")
    if isinstance(x, complex):
        return [float(f"{x.real:.6e}"), float(f"{x.imag:.6e}")]
    return x


def reports_to_json(reports: list[CheckReport], model: str | None = None) -> str:
    payload = {"model": model or (reports[0].model if reports else ""),
               "suites": [r.to_dict() for r in reports],
               "verdict": PASS if all(r.passed for r in reports) else FAIL}
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


CSV_FIELDS = ["suite", "model", "N", "check", "anchor", "residual", "tolerance", "observed", "expected", "verdict"]


def reports_to_csv(reports: list[CheckReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        for c in r.checks:
            w.writerow([r.suite, r.model, r.N, c.name, c.anchor,
                        "" if c.residual is None else f"{c.residual:.6e}",
                        "" if c.tolerance is None else f"{c.tolerance:.1e}",
                        json.dumps(_clean(c.observed)) if c.observed is not None else "",
                        json.dumps(_clean(c.expected)) if c.expected is not None else "",
                        c.verdict])
    return buf.getvalue()
