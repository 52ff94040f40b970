"""Find anticipation (102) rejections and pull the cited publication number.

Extraction is rule-based and pure: number-shaped tokens are collected from
the rejection text and the one nearest an anticipation phrase wins.  An
external extractor process can be plugged in over a line protocol when a
model-backed extractor is preferred.
"""

from __future__ import annotations

import re
import subprocess
from dataclasses import dataclass

from .records import (
    MalformedNumber,
    PublicationNumber,
    RejectionCitation,
    Statute,
    normalize_publication_number,
)
from .uspto import OfficeAction

METHOD_RULES = "RULES"
METHOD_EXTERNAL = "EXTERNAL"


@dataclass(frozen=True)
class ExtractionOutcome:
    citation: PublicationNumber | None
    method: str
    confidence: float

    def __post_init__(self):
        if self.citation is not None and self.confidence <= 0:
            raise ValueError("a returned citation requires confidence > 0")


def classify_statute(label: str) -> str:
    """Bucket a rejection label; 103 wins over 102 so combined labels like
    "102/103" are never treated as pure anticipation."""
    if "103" in label:
        return Statute.S103
    if "102" in label:
        return Statute.S102
    return Statute.OTHER


def find_102_rejections(oa: OfficeAction) -> list[RejectionCitation]:
    """One unfilled citation per distinct 102 section; everything else dropped."""
    return [
        RejectionCitation(rejection_text=section.text, cited=None, statute=Statute.S102)
        for section in oa.sections
        if section.statute == Statute.S102
    ]


# Anticipation language that anchors the cited number.
_ANCHORS = re.compile(
    r"anticipat\w*|in\s+view\s+of|based\s+(?:up)?on|\bover\b",
    re.IGNORECASE,
)

# A digit run possibly broken by grouping separators, e.g. 9,853,454 or
# 2010/0123456.
_DIGIT_RUN = re.compile(r"\d[\d,./-]*\d")

_KIND_AFTER = re.compile(r"\s{0,2}([ABab]\d{1,2})\b")

# Country code plus the boilerplate allowed between it and the digits
# ("US Patent Application Publication No. ...").
_COUNTRY_BEFORE = re.compile(
    r"\b(?P<country>USPN|US|U\.?S\.?|EP|WO|JP|GB|DE|CN|KR)\b\.?"
    r"(?P<filler>(?:\s|Pat(?:ent)?\.?|Appl(?:ication)?|Publication|Pub\.?|No\.?|Number|Serial|[.,:;])*)$",
    re.IGNORECASE,
)

_NAME_PAREN = re.compile(r"[A-Z][A-Za-z'\-]+(?:\s+et\s+al\.?)?\s*\($")


def _plausible_core(token: str) -> str | None:
    """Digits of a token that is shaped like a publication number, else None."""
    digits = re.sub(r"\D", "", token)
    if "/" in token or "-" in token:
        parts = re.split(r"[/-]", token)
        if len(parts) != 2:
            return None
        year, serial = parts
        if len(year) == 4 and len(re.sub(r"\D", "", serial)) in (6, 7):
            return digits
        return None
    if "," in token:
        if re.fullmatch(r"\d{1,3}(?:,\d{3})+", token) and 6 <= len(digits) <= 9:
            return digits
        return None
    if len(digits) in (6, 7, 8, 10, 11):
        return digits
    return None


@dataclass(frozen=True)
class _Candidate:
    start: int
    pub: PublicationNumber


def _scan_candidates(text: str) -> list[_Candidate]:
    out = []
    for m in _DIGIT_RUN.finditer(text):
        digits = _plausible_core(m.group(0))
        if digits is None:
            continue
        country = None
        before = _COUNTRY_BEFORE.search(text[max(0, m.start() - 60): m.start()])
        if before:
            code = before.group("country").replace(".", "").upper()
            country = "US" if code == "USPN" else code
        kind = None
        after = _KIND_AFTER.match(text, m.end())
        if after:
            kind = after.group(1).upper()
        try:
            pub = normalize_publication_number(f"{country or ''}{digits}{kind or ''}")
        except MalformedNumber:
            continue
        out.append(_Candidate(start=m.start(), pub=pub))
    return out


def _in_name_parenthetical(text: str, cand: _Candidate) -> bool:
    lookback = text[max(0, cand.start - 80): cand.start]
    # allow "US Patent No." boilerplate between "(" and the digits
    lookback = re.sub(
        r"(?:USPN|US|U\.?S\.?|EP|WO)\.?|Pat(?:ent)?\.?|Appl(?:ication)?|Publication|Pub\.?|No\.?|Number|[\s.,:;]",
        "",
        lookback[lookback.rfind("("):] if "(" in lookback else lookback,
        flags=re.IGNORECASE,
    )
    if lookback not in ("", "("):
        return False
    upto = text[max(0, cand.start - 80): cand.start]
    paren = upto.rfind("(")
    if paren == -1:
        return False
    return _NAME_PAREN.search(upto[: paren + 1]) is not None


def extract_cited_publication(text: str) -> ExtractionOutcome:
    """Pick the publication number cited by a rejection, or report absence.

    The candidate nearest an anticipation phrase wins; ties break on first
    occurrence.  With no anchoring phrase, a number inside an inventor-name
    parenthetical ("Smith (US 2010/0123456 A1)") is accepted at lower
    confidence.
    """
    if not text:
        raise ValueError("rejection text must be non-empty")
    candidates = _scan_candidates(text)
    if not candidates:
        return ExtractionOutcome(citation=None, method=METHOD_RULES, confidence=0.0)
    anchor_ends = [m.end() for m in _ANCHORS.finditer(text)]
    if anchor_ends:
        best = min(
            candidates,
            key=lambda c: (min(abs(c.start - e) for e in anchor_ends), c.start),
        )
        return ExtractionOutcome(citation=best.pub, method=METHOD_RULES, confidence=0.9)
    for cand in candidates:
        if _in_name_parenthetical(text, cand):
            return ExtractionOutcome(citation=cand.pub, method=METHOD_RULES, confidence=0.6)
    return ExtractionOutcome(citation=None, method=METHOD_RULES, confidence=0.0)


def measure_extraction_success(
    fixtures: list[tuple[str, str]],
    extractor=extract_cited_publication,
) -> float:
    """Fraction of (text, expected number) cases the extractor gets right."""
    if not fixtures:
        raise ValueError("fixtures must be non-empty")
    correct = 0
    for text, expected_raw in fixtures:
        expected = normalize_publication_number(expected_raw)
        outcome = extractor(text)
        if outcome.citation is not None and str(outcome.citation) == str(expected):
            correct += 1
    return correct / len(fixtures)


class ExternalExtractor:
    """Line-protocol plug for an external extractor process.

    Per request: the rejection text is written line by line (internal blank
    lines dropped), terminated by one blank line; the process answers with a
    single line holding the publication number or the literal token NONE.
    """

    def __init__(self, cmd: list[str]):
        self.cmd = list(cmd)
        self._proc: subprocess.Popen | None = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def __call__(self, text: str) -> ExtractionOutcome:
        if not text:
            raise ValueError("rejection text must be non-empty")
        proc = self._ensure()
        assert proc.stdin is not None and proc.stdout is not None
        for line in text.splitlines():
            if line.strip():
                proc.stdin.write(line + "\n")
        proc.stdin.write("\n")
        proc.stdin.flush()
        answer = proc.stdout.readline().strip()
        if not answer or answer.upper() == "NONE":
            return ExtractionOutcome(citation=None, method=METHOD_EXTERNAL, confidence=0.0)
        try:
            pub = normalize_publication_number(answer)
        except MalformedNumber:
            return ExtractionOutcome(citation=None, method=METHOD_EXTERNAL, confidence=0.0)
        return ExtractionOutcome(citation=pub, method=METHOD_EXTERNAL, confidence=1.0)

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
