"""Flat, exact serialization of enumeration records (JSON lines and CSV)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .search import EnumerationRecord

FIELDS = (
    "a",
    "m",
    "link_dim",
    "fano_sum",
    "upper_bound",
    "passes",
    "sphere",
    "criterion",
    "tau",
    "bp_class",
    "kervaire",
    "moduli_real_dim",
    "contact_excluded",
)


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if not den:
        raise ValueError(f"expected 'num/den', got {text!r}")
    return Fraction(int(num), int(den))


@dataclass(frozen=True)
class RecordRow:
    a: tuple[int, ...]
    m: int
    link_dim: int
    fano_sum: Fraction
    upper_bound: Fraction
    passes: bool
    sphere: bool
    criterion: str
    tau: Optional[int]
    bp_class: Optional[int]
    kervaire: str
    moduli_real_dim: int
    contact_excluded: bool

    @classmethod
    def from_record(cls, rec: EnumerationRecord) -> "RecordRow":
        return cls(
            a=tuple(rec.a),
            m=len(rec.a),
            link_dim=rec.link.link_dim,
            fano_sum=rec.certificate.fano_sum,
            upper_bound=rec.certificate.upper_bound,
            passes=rec.certificate.passes,
            sphere=rec.link.is_homotopy_sphere,
            criterion=rec.link.criterion.value,
            tau=rec.tau,
            bp_class=rec.link.bp_class,
            kervaire=rec.link.kervaire.value,
            moduli_real_dim=rec.moduli_real_dim,
            contact_excluded=rec.contact_excluded,
        )

    def to_json_dict(self) -> dict:
        return {
            "a": ",".join(map(str, self.a)),
            "m": self.m,
            "link_dim": self.link_dim,
            "fano_sum": format_fraction(self.fano_sum),
            "upper_bound": format_fraction(self.upper_bound),
            "passes": self.passes,
            "sphere": self.sphere,
            "criterion": self.criterion,
            "tau": self.tau,
            "bp_class": self.bp_class,
            "kervaire": self.kervaire,
            "moduli_real_dim": self.moduli_real_dim,
            "contact_excluded": self.contact_excluded,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RecordRow":
        return cls(
            a=tuple(int(x) for x in d["a"].split(",")),
            m=int(d["m"]),
            link_dim=int(d["link_dim"]),
            fano_sum=parse_fraction(d["fano_sum"]),
            upper_bound=parse_fraction(d["upper_bound"]),
            passes=bool(d["passes"]),
            sphere=bool(d["sphere"]),
            criterion=d["criterion"],
            tau=None if d["tau"] is None else int(d["tau"]),
            bp_class=None if d["bp_class"] is None else int(d["bp_class"]),
            kervaire=d["kervaire"],
            moduli_real_dim=int(d["moduli_real_dim"]),
            contact_excluded=bool(d["contact_excluded"]),
        )

    def to_csv_row(self) -> list[str]:
        d = self.to_json_dict()
        out = []
        for name in FIELDS:
            v = d[name]
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("true" if v else "false")
            else:
                out.append(str(v))
        return out

    @classmethod
    def from_csv_row(cls, row: list[str]) -> "RecordRow":
        if len(row) != len(FIELDS):
            raise ValueError(f"expected {len(FIELDS)} columns, got {len(row)}")
        raw = dict(zip(FIELDS, row))
        d: dict = {}
        for name, v in raw.items():
            if name in ("passes", "sphere", "contact_excluded"):
                if v not in ("true", "false"):
                    raise ValueError(f"bad boolean {v!r} in column {name}")
                d[name] = v == "true"
            elif name in ("tau", "bp_class"):
                d[name] = None if v == "" else v
            else:
                d[name] = v
        return cls.from_json_dict(d)


def to_json_line(row: RecordRow) -> str:
    return json.dumps(row.to_json_dict(), separators=(",", ":"))


def from_json_line(line: str) -> RecordRow:
    return RecordRow.from_json_dict(json.loads(line))


def csv_header() -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(FIELDS)
    return buf.getvalue()


def to_csv_line(row: RecordRow) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(row.to_csv_row())
    return buf.getvalue()


def read_csv(text: str) -> list[RecordRow]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != FIELDS:
        raise ValueError("missing or malformed CSV header")
    return [RecordRow.from_csv_row(r) for r in rows[1:] if r]


def read_json_lines(lines: Iterable[str]) -> list[RecordRow]:
    out = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if "summary" in obj:
            continue
        out.append(RecordRow.from_json_dict(obj))
    return out
