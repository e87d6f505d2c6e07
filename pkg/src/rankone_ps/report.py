"""Verification records and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1

CSV_FIELDS = [
    "suite", "model", "case", "check", "lambda",
    "lhs_re", "lhs_im", "rhs_re", "rhs_im",
    "abs_err", "rel_err", "tol", "pass",
    "ratio_re", "ratio_im", "abs_dev", "error", "params",
]


@dataclass
class CaseRecord:
    """One compared quantity.

    ``passed`` is ``abs_err <= tol * max(1, |rhs|)``, i.e. a relative test
    for large values and an absolute one near zero, unless the suite sets
    ``mode`` to ``"abs"`` or ``"rel"``.
    """

    suite: str
    model: str
    case: int
    check: str
    lhs: complex
    rhs: complex
    tol: float
    params: dict = field(default_factory=dict)
    lam: float | None = None
    ratio: complex | None = None
    abs_dev: float | None = None
    error: str | None = None
    mode: str = "mixed"
    abs_err: float = field(init=False)
    rel_err: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.lhs = complex(self.lhs)
        self.rhs = complex(self.rhs)
        if self.error is not None:
            self.abs_err = self.rel_err = math.inf
            self.passed = False
            return
        self.abs_err = abs(self.lhs - self.rhs)
        scale = abs(self.rhs)
        self.rel_err = self.abs_err / scale if scale > 0 else self.abs_err
        if self.mode == "abs":
            bound = self.tol
        elif self.mode == "rel":
            bound = self.tol * scale
        else:
            bound = self.tol * max(1.0, scale)
        self.passed = bool(math.isfinite(self.abs_err) and self.abs_err <= bound)

    @classmethod
    def failure(cls, suite, model, case, check, exc: BaseException, params=None, tol=0.0):
        return cls(suite, model, case, check, math.nan, math.nan, tol, params or {},
                   error=f"{type(exc).__name__}: {exc}")

    def to_dict(self) -> dict:
        def cpx(z):
            return None if z is None else [_num(z.real), _num(z.imag)]

        return {
            "suite": self.suite,
            "model": self.model,
            "case": self.case,
            "check": self.check,
            "lambda": self.lam,
            "lhs": cpx(self.lhs),
            "rhs": cpx(self.rhs),
            "abs_err": _num(self.abs_err),
            "rel_err": _num(self.rel_err),
            "tol": self.tol,
            "pass": self.passed,
            "ratio": cpx(None if self.ratio is None else complex(self.ratio)),
            "abs_dev": None if self.abs_dev is None else _num(self.abs_dev),
            "error": self.error,
            "params": self.params,
        }


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@dataclass
class VerificationReport:
    cases: list
    config_echo: dict
    wall_time: float | None = None
    timestamp: str | None = None
    skipped: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def summary(self) -> dict:
        n_pass = sum(c.passed for c in self.cases)
        finite = [c.rel_err for c in self.cases if math.isfinite(c.rel_err)]
        out = {
            "n_cases": len(self.cases),
            "n_pass": n_pass,
            "n_fail": len(self.cases) - n_pass,
            "max_rel_err": max(finite) if finite else None,
            "pass": self.passed,
        }
        suites = {}
        for c in self.cases:
            s = suites.setdefault(c.suite, {"n_cases": 0, "n_fail": 0})
            s["n_cases"] += 1
            s["n_fail"] += not c.passed
        out["suites"] = suites
        out["skipped"] = list(self.skipped)
        if self.wall_time is not None:
            out["wall_time_s"] = self.wall_time
        return out

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "config_echo": self.config_echo,
            "summary": self.summary(),
            "cases": [c.to_dict() for c in self.cases],
        }
        if self.timestamp is not None:
            d["timestamp"] = self.timestamp
        return d


def _csv_rows(report: VerificationReport):
    for c in report.cases:
        ratio = c.to_dict()["ratio"] or ["", ""]
        yield {
            "suite": c.suite, "model": c.model, "case": c.case, "check": c.check,
            "lambda": "" if c.lam is None else repr(float(c.lam)),
            "lhs_re": repr(c.lhs.real), "lhs_im": repr(c.lhs.imag),
            "rhs_re": repr(c.rhs.real), "rhs_im": repr(c.rhs.imag),
            "abs_err": repr(c.abs_err), "rel_err": repr(c.rel_err), "tol": repr(c.tol),
            "pass": int(c.passed),
            "ratio_re": repr(ratio[0]) if ratio[0] != "" else "",
            "ratio_im": repr(ratio[1]) if ratio[1] != "" else "",
            "abs_dev": "" if c.abs_dev is None else repr(float(c.abs_dev)),
            "error": c.error or "",
            "params": json.dumps(c.params, sort_keys=True),
        }


def render(report: VerificationReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in _csv_rows(report):
            w.writerow(row)
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}; valid: ['csv', 'json']")


def emit_report(report: VerificationReport, fmt: str = "json", path=None) -> str:
    """Serialize ``report``; write it to ``path`` when given (``-`` for stdout)."""
    text = render(report, fmt)
    if path is not None and str(path) != "-":
        p = Path(path)
        try:
            p.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {p}: {exc.strerror or exc}") from exc
    return text


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
