"""Core record types shared by every pipeline stage, plus row serialization.

A dataset row couples one base patent with exactly ``k`` related-patent
slots.  Slots occupied by anticipating prior art (positives, label 1) are
packed at the highest slot indices; unused slots stay null at the lowest
indices so the slot count is always ``k``.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class MalformedNumber(ValueError):
    """Raised when a publication/application number cannot be normalized."""


class SchemaError(ValueError):
    """Raised when a serialized file does not match the expected columns."""


_SEPARATORS = re.compile(r"[ ,/\-]")
_PUB_SHAPE = re.compile(r"^(?P<country>[A-Z]{2})?(?P<body>[0-9]+)(?P<kind>[A-Z][0-9]{0,2})?$")

# Claim enumeration markers: "1. ", "2. " ... at the start of the text or
# after whitespace.
_CLAIM_MARKER = re.compile(r"(?:^|\s)(\d{1,3})\.(?=\s)")


@dataclass(frozen=True)
class PublicationNumber:
    """Canonical patent publication identifier: country + digits + kind."""

    country: str
    body: str
    kind: str | None = None

    def __post_init__(self):
        if len(self.country) != 2 or not self.country.isalpha() or not self.country.isupper():
            raise MalformedNumber(f"bad country code: {self.country!r}")
        if not self.body or not self.body.isdigit():
            raise MalformedNumber(f"bad number body: {self.body!r}")

    def __str__(self) -> str:
        return f"{self.country}{self.body}{self.kind or ''}"


@dataclass(frozen=True)
class ApplicationNumber:
    """USPTO application serial, digits only after separator stripping."""

    value: str

    def __post_init__(self):
        if not self.value or not self.value.isdigit():
            raise MalformedNumber(f"bad application number: {self.value!r}")

    def __str__(self) -> str:
        return self.value


def normalize_publication_number(raw: str) -> PublicationNumber:
    """Clean up a free-text publication number into its canonical form.

    Separators (space, comma, slash, hyphen) are stripped, the result is
    uppercased, and a missing country code defaults to "US".  A kind code is
    preserved when present and never invented when absent.
    """
    cleaned = _SEPARATORS.sub("", raw).upper()
    if not any(c.isdigit() for c in cleaned):
        raise MalformedNumber(f"no digits in {raw!r}")
    m = _PUB_SHAPE.match(cleaned)
    if m is None:
        raise MalformedNumber(f"unrecognized number shape: {raw!r}")
    return PublicationNumber(
        country=m.group("country") or "US",
        body=m.group("body"),
        kind=m.group("kind"),
    )


def normalize_application_number(raw: str) -> ApplicationNumber:
    cleaned = _SEPARATORS.sub("", raw)
    if not cleaned or not cleaned.isdigit():
        raise MalformedNumber(f"bad application number: {raw!r}")
    return ApplicationNumber(cleaned)


def count_enumerated_claims(text: str) -> int:
    """Largest n such that claim markers 1..n all appear in the text."""
    seen = {int(m.group(1)) for m in _CLAIM_MARKER.finditer(text)}
    n = 0
    while n + 1 in seen:
        n += 1
    return n


@dataclass(frozen=True)
class ClaimSet:
    """Full claims text of one patent plus the detected enumeration count."""

    text: str
    count: int = 0

    def __post_init__(self):
        if not self.text:
            raise ValueError("claims text must be non-empty")

    @classmethod
    def from_text(cls, text: str) -> "ClaimSet":
        return cls(text=text, count=count_enumerated_claims(text))


@dataclass(frozen=True)
class PatentRecord:
    """A patent/application stub; claims may be missing on raw search hits,
    but any record admitted into a dataset row must carry them."""

    application_number: ApplicationNumber
    publication_number: PublicationNumber
    abstract: str
    claims: ClaimSet | None


class Statute:
    """Rejection statute buckets; only S102 sections yield positive labels."""

    S102 = "S102"
    S103 = "S103"
    OTHER = "OTHER"


@dataclass(frozen=True)
class RejectionCitation:
    rejection_text: str
    cited: PublicationNumber | None = None
    statute: str = Statute.OTHER


@dataclass(frozen=True)
class Slot:
    """One related-patent slot of a dataset row; fully null when unused."""

    pub: PublicationNumber | None = None
    claims: ClaimSet | None = None
    label: int = 0

    def is_null(self) -> bool:
        return self.pub is None and self.claims is None


@dataclass
class DatasetRow:
    base: PatentRecord
    k: int
    slots: list[Slot]
    rejection_texts: list[str] = field(default_factory=list)
    underfilled: bool = False

    def positive_count(self) -> int:
        return sum(s.label for s in self.slots)


def validate_row(row: DatasetRow) -> None:
    """Check the slot-packing invariants; raises ValueError on violation."""
    if row.k < 1:
        raise ValueError("k must be >= 1")
    if row.base.claims is None:
        raise ValueError("base patent admitted to a row must have claims")
    if len(row.slots) != row.k:
        raise ValueError(f"expected {row.k} slots, got {len(row.slots)}")
    labels = [s.label for s in row.slots]
    if any(l not in (0, 1) for l in labels):
        raise ValueError("labels must be 0 or 1")
    for s in row.slots:
        if s.label == 1 and (s.pub is None or s.claims is None):
            raise ValueError("positive slot missing pub or claims")
        if (s.pub is None) != (s.claims is None):
            raise ValueError("slot must carry both pub and claims or neither")
    # positives must occupy the highest indices
    first_pos = next((i for i, l in enumerate(labels) if l == 1), len(labels))
    if any(l == 0 for l in labels[first_pos:]):
        raise ValueError("positive slots must be packed at the top indices")
    has_pos = any(labels)
    if has_pos != bool(row.rejection_texts):
        raise ValueError("rejection_texts must be non-empty iff a positive slot exists")


@dataclass(frozen=True)
class PairExample:
    """One (base claims, candidate claims) training pair."""

    base_pub: PublicationNumber
    cand_pub: PublicationNumber
    claims_x: ClaimSet
    claims_y: ClaimSet
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


ROW_FIXED_COLUMNS = ["application_number", "publication_number", "abstract", "claims"]
PAIR_COLUMNS = ["base_pub", "cand_pub", "claims_x", "claims_y", "label"]


def _row_header(k: int, n_rej: int) -> list[str]:
    cols = list(ROW_FIXED_COLUMNS)
    cols += [f"rejection_text_{i}" for i in range(1, n_rej + 1)]
    for i in range(1, k + 1):
        cols += [f"pub_{i}", f"claims_{i}", f"label_{i}"]
    return cols


def _rejection_width(rows: Sequence[DatasetRow]) -> int:
    # The sample corpus never exceeds two positives per row, so two rejection
    # columns is the floor; wider rows get extra columns.
    widest = max((len(r.rejection_texts) for r in rows), default=0)
    return max(2, widest)


def write_rows(rows: Sequence[DatasetRow], path: str | Path) -> None:
    """Serialize rows to CSV (RFC-4180 quoting) or JSONL, by extension.

    Rows must share one ``k``.  Null slots become empty CSV fields / JSON
    nulls.  Output is byte-stable for a fixed input.
    """
    path = Path(path)
    for row in rows:
        validate_row(row)
    ks = {r.k for r in rows}
    if len(ks) > 1:
        raise ValueError(f"rows disagree on k: {sorted(ks)}")
    if path.suffix == ".jsonl":
        _write_rows_jsonl(rows, path)
    else:
        _write_rows_csv(rows, path, k=ks.pop() if ks else 25)


def _claims_cell(claims: ClaimSet | None) -> str:
    return claims.text if claims is not None else ""


def _write_rows_csv(rows: Sequence[DatasetRow], path: Path, k: int) -> None:
    n_rej = _rejection_width(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_row_header(k, n_rej))
        for row in rows:
            rec = [
                str(row.base.application_number),
                str(row.base.publication_number),
                row.base.abstract,
                row.base.claims.text,
            ]
            rej = list(row.rejection_texts) + [""] * (n_rej - len(row.rejection_texts))
            rec += rej
            for slot in row.slots:
                rec += [
                    str(slot.pub) if slot.pub else "",
                    _claims_cell(slot.claims),
                    str(slot.label),
                ]
            writer.writerow(rec)


def _slot_to_json(slot: Slot) -> dict:
    return {
        "pub": str(slot.pub) if slot.pub else None,
        "claims": {"text": slot.claims.text, "count": slot.claims.count} if slot.claims else None,
        "label": slot.label,
    }


def _write_rows_jsonl(rows: Sequence[DatasetRow], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            obj = {
                "application_number": str(row.base.application_number),
                "publication_number": str(row.base.publication_number),
                "abstract": row.base.abstract,
                "claims": {"text": row.base.claims.text, "count": row.base.claims.count},
                "k": row.k,
                "rejection_texts": list(row.rejection_texts),
                "slots": [_slot_to_json(s) for s in row.slots],
                "underfilled": row.underfilled,
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_rows(path: str | Path) -> list[DatasetRow]:
    path = Path(path)
    if path.suffix == ".jsonl":
        return _read_rows_jsonl(path)
    return _read_rows_csv(path)


def _parse_header(header: list[str]) -> tuple[int, int]:
    """Return (k, n_rejection_columns) from a row CSV header."""
    if header[: len(ROW_FIXED_COLUMNS)] != ROW_FIXED_COLUMNS:
        raise SchemaError(f"unexpected leading columns: {header[:4]}")
    rest = header[len(ROW_FIXED_COLUMNS):]
    n_rej = 0
    while n_rej < len(rest) and rest[n_rej] == f"rejection_text_{n_rej + 1}":
        n_rej += 1
    slot_cols = rest[n_rej:]
    if len(slot_cols) % 3 != 0:
        raise SchemaError("slot columns not a multiple of 3")
    k = len(slot_cols) // 3
    for i in range(k):
        expected = [f"pub_{i + 1}", f"claims_{i + 1}", f"label_{i + 1}"]
        if slot_cols[3 * i: 3 * i + 3] != expected:
            raise SchemaError(f"bad slot columns near index {i + 1}")
    if k == 0:
        raise SchemaError("header declares zero slots")
    return k, n_rej


def _read_rows_csv(path: Path) -> list[DatasetRow]:
    rows: list[DatasetRow] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file, expected a header row") from None
        k, n_rej = _parse_header(header)
        width = len(header)
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != width:
                raise SchemaError(f"line {lineno}: expected {width} fields, got {len(rec)}")
            base = PatentRecord(
                application_number=ApplicationNumber(rec[0]),
                publication_number=normalize_publication_number(rec[1]),
                abstract=rec[2],
                claims=ClaimSet.from_text(rec[3]),
            )
            rej = [t for t in rec[4: 4 + n_rej] if t]
            slots = []
            pos = 4 + n_rej
            for i in range(k):
                pub_s, claims_s, label_s = rec[pos + 3 * i: pos + 3 * i + 3]
                slots.append(
                    Slot(
                        pub=normalize_publication_number(pub_s) if pub_s else None,
                        claims=ClaimSet.from_text(claims_s) if claims_s else None,
                        label=int(label_s),
                    )
                )
            row = DatasetRow(base=base, k=k, slots=slots, rejection_texts=rej,
                             underfilled=any(s.is_null() for s in slots))
            validate_row(row)
            rows.append(row)
    return rows


def _slot_from_json(obj: dict) -> Slot:
    claims = obj.get("claims")
    return Slot(
        pub=normalize_publication_number(obj["pub"]) if obj.get("pub") else None,
        claims=ClaimSet(text=claims["text"], count=claims["count"]) if claims else None,
        label=int(obj["label"]),
    )


def _read_rows_jsonl(path: Path) -> list[DatasetRow]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
            base = PatentRecord(
                application_number=ApplicationNumber(obj["application_number"]),
                publication_number=normalize_publication_number(obj["publication_number"]),
                abstract=obj["abstract"],
                claims=ClaimSet(text=obj["claims"]["text"], count=obj["claims"]["count"]),
            )
            row = DatasetRow(
                base=base,
                k=int(obj["k"]),
                slots=[_slot_from_json(s) for s in obj["slots"]],
                rejection_texts=list(obj["rejection_texts"]),
                underfilled=bool(obj.get("underfilled", False)),
            )
            validate_row(row)
            rows.append(row)
    return rows


def write_pairs(pairs: Iterable[PairExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PAIR_COLUMNS)
        for p in pairs:
            writer.writerow([str(p.base_pub), str(p.cand_pub), p.claims_x.text, p.claims_y.text, p.label])


def read_pairs(path: str | Path) -> list[PairExample]:
    pairs = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty pairs file") from None
        if header != PAIR_COLUMNS:
            raise SchemaError(f"bad pairs header: {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(PAIR_COLUMNS):
                raise SchemaError(f"line {lineno}: expected {len(PAIR_COLUMNS)} fields")
            pairs.append(
                PairExample(
                    base_pub=normalize_publication_number(rec[0]),
                    cand_pub=normalize_publication_number(rec[1]),
                    claims_x=ClaimSet.from_text(rec[2]),
                    claims_y=ClaimSet.from_text(rec[3]),
                    label=int(rec[4]),
                )
            )
    return pairs
