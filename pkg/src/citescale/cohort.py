"""Cohort files, filter presets, synthetic cohorts, and the summary table.

Cohort file format (UTF-8, line-delimited JSON): the first line is a header
object carrying ``format_version`` and free-text ``provenance``; every
following line is one record object with keys ``id`` and ``citations``.

    {"format_version": 1, "provenance": "..."}
    {"id": "r000001", "citations": [12, 0, 3]}
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .empirical import CitationRecord
from .errors import CohortValidationError
from .pareto import ParetoModel, sample

__all__ = [
    "FORMAT_VERSION",
    "FILTER_PRESETS",
    "CohortFile",
    "FilterCounts",
    "SynthSpec",
    "SummaryRow",
    "SUMMARY_HEADER",
    "load_cohort",
    "save_cohort",
    "filter_cohort",
    "resolve_preset",
    "generate_synthetic",
    "write_summary_csv",
    "read_summary_csv",
    "write_atomic",
]

FORMAT_VERSION = 1

# Preset -> (minimum publications, minimum total citations), inclusive.
FILTER_PRESETS: dict[str, tuple[int, int]] = {
    "strict": (100, 10000),
    "relaxed": (10, 100),
    "none": (1, 0),
}


@dataclass(frozen=True)
class CohortFile:
    """A validated set of citation records plus provenance text."""

    records: tuple[CitationRecord, ...]
    provenance: str = ""
    format_version: int = FORMAT_VERSION

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for r in self.records:
            if r.id in seen:
                raise ValueError(f"duplicate record id {r.id!r}")
            seen.add(r.id)


class FilterCounts(NamedTuple):
    kept: int
    dropped: int


def resolve_preset(preset: str | tuple[int, int]) -> tuple[int, int]:
    """Map a preset name or explicit (n_pub_min, n_cit_min) pair to thresholds."""
    if isinstance(preset, str):
        try:
            return FILTER_PRESETS[preset]
        except KeyError:
            raise ValueError(
                f"unknown filter preset {preset!r}; "
                f"known: {', '.join(sorted(FILTER_PRESETS))}") from None
    n_pub_min, n_cit_min = preset
    return int(n_pub_min), int(n_cit_min)


def filter_cohort(cohort: CohortFile,
                  preset: str | tuple[int, int]) -> tuple[CohortFile, FilterCounts]:
    """Keep records meeting both minimums (inclusive); report kept/dropped counts."""
    n_pub_min, n_cit_min = resolve_preset(preset)
    kept = tuple(r for r in cohort.records
                 if r.n_pub >= n_pub_min and r.n_cit >= n_cit_min)
    counts = FilterCounts(kept=len(kept), dropped=len(cohort.records) - len(kept))
    label = preset if isinstance(preset, str) else f"custom{preset!r}"
    provenance = f"{cohort.provenance} | filter={label}" if cohort.provenance \
        else f"filter={label}"
    return CohortFile(records=kept, provenance=provenance,
                      format_version=cohort.format_version), counts


def write_atomic(path: str, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_cohort(cohort: CohortFile, path: str) -> None:
    """Serialize header line plus one JSON record per line; atomic replace."""
    lines = [json.dumps({"format_version": cohort.format_version,
                         "provenance": cohort.provenance})]
    for r in cohort.records:
        lines.append(json.dumps({"id": r.id, "citations": list(r.citations)}))
    write_atomic(path, ("\n".join(lines) + "\n").encode("utf-8"))


def _parse_record(line_no: int, obj, seen: set[str],
                  problems: list[tuple[int, str]]) -> CitationRecord | None:
    if not isinstance(obj, dict):
        problems.append((line_no, "record is not a JSON object"))
        return None
    rid = obj.get("id")
    cits = obj.get("citations")
    if not isinstance(rid, str) or not rid:
        problems.append((line_no, "missing or non-string 'id'"))
        return None
    if rid in seen:
        problems.append((line_no, f"duplicate id {rid!r}"))
        return None
    if not isinstance(cits, list) or len(cits) == 0:
        problems.append((line_no, f"record {rid!r}: 'citations' must be a non-empty list"))
        return None
    if not all(isinstance(c, int) and not isinstance(c, bool) for c in cits):
        problems.append((line_no, f"record {rid!r}: citations must be integers"))
        return None
    if any(c < 0 for c in cits):
        problems.append((line_no, f"record {rid!r}: negative citation count"))
        return None
    seen.add(rid)
    return CitationRecord(id=rid, citations=tuple(cits))


def load_cohort(path: str) -> CohortFile:
    """Parse and validate a cohort file.

    Every malformed line is collected; the raised CohortValidationError lists
    them all with line numbers instead of stopping at the first.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    problems: list[tuple[int, str]] = []
    if not lines:
        raise CohortValidationError([(1, "empty file, header line missing")])
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CohortValidationError([(1, f"header is not valid JSON: {exc}")]) from None
    if not isinstance(header, dict) or "format_version" not in header:
        raise CohortValidationError([(1, "header line must carry 'format_version'")])
    version = header["format_version"]
    if version != FORMAT_VERSION:
        raise CohortValidationError(
            [(1, f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")])
    provenance = header.get("provenance", "")
    records: list[CitationRecord] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append((line_no, f"invalid JSON: {exc}"))
            continue
        record = _parse_record(line_no, obj, seen, problems)
        if record is not None:
            records.append(record)
    if problems:
        raise CohortValidationError(problems)
    return CohortFile(records=tuple(records), provenance=str(provenance),
                      format_version=FORMAT_VERSION)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic cohort; scalars fix a value, pairs draw uniformly."""

    n_researchers: int
    b_true: float | tuple[float, float]
    n_pub: int | tuple[int, int]
    mean_citations: float | tuple[float, float]
    seed: int

    def __post_init__(self) -> None:
        if self.n_researchers < 0:
            raise ValueError("n_researchers must be non-negative")
        lo_b = self.b_true[0] if isinstance(self.b_true, tuple) else self.b_true
        if not lo_b > 1.0:
            raise ValueError("b_true must exceed 1")
        lo_p = self.n_pub[0] if isinstance(self.n_pub, tuple) else self.n_pub
        if lo_p < 1:
            raise ValueError("n_pub must be at least 1")
        lo_m = self.mean_citations[0] if isinstance(self.mean_citations, tuple) \
            else self.mean_citations
        if not lo_m > 0.0:
            raise ValueError("mean_citations must be positive")


def _draw_value(rng: np.random.Generator, spec_value, *, integer: bool):
    if isinstance(spec_value, tuple):
        lo, hi = spec_value
        if integer:
            return int(rng.integers(int(lo), int(hi) + 1))
        return float(rng.uniform(float(lo), float(hi)))
    return int(spec_value) if integer else float(spec_value)


def generate_synthetic(spec: SynthSpec) -> CohortFile:
    """Cohort of floor-integerized draws from the citation law; seed-deterministic.

    Per researcher the generator consumes, in order: b, n_pub, mean, samples.
    """
    rng = np.random.default_rng(spec.seed)
    records = []
    for i in range(spec.n_researchers):
        b = _draw_value(rng, spec.b_true, integer=False)
        n_pub = _draw_value(rng, spec.n_pub, integer=True)
        mean = _draw_value(rng, spec.mean_citations, integer=False)
        model = ParetoModel.from_mean(b, mean)
        draws = sample(model, rng, n_pub)
        citations = tuple(int(c) for c in np.floor(draws).astype(np.int64))
        records.append(CitationRecord(id=f"r{i + 1:06d}", citations=citations))
    provenance = (f"synthetic n={spec.n_researchers} b={spec.b_true!r} "
                  f"n_pub={spec.n_pub!r} mean={spec.mean_citations!r} seed={spec.seed}")
    return CohortFile(records=tuple(records), provenance=provenance)


SUMMARY_HEADER = ("id", "n_pub", "n_cit", "h", "gini", "b_hat", "a_hat",
                  "s_min", "w", "accepted", "violates_e_bound")


@dataclass(frozen=True)
class SummaryRow:
    """One researcher's line in the per-record summary table."""

    id: str
    n_pub: int
    n_cit: int
    h: int
    gini: float
    b_hat: float
    a_hat: float
    s_min: float
    w: int
    accepted: bool
    violates_e_bound: bool


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_summary_csv(rows: Iterable[SummaryRow], path: str) -> None:
    """Comma-separated summary with the fixed header; floats keep full precision."""
    lines = [",".join(SUMMARY_HEADER)]
    for row in rows:
        lines.append(",".join(_format_cell(getattr(row, col)) for col in SUMMARY_HEADER))
    write_atomic(path, ("\n".join(lines) + "\n").encode("utf-8"))


def read_summary_csv(path: str) -> list[SummaryRow]:
    """Parse a summary table written by write_summary_csv."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or tuple(lines[0].split(",")) != SUMMARY_HEADER:
        raise ValueError(f"{path}: missing or unexpected summary header")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(SUMMARY_HEADER):
            raise ValueError(f"{path}: malformed row: {line!r}")
        rows.append(SummaryRow(
            id=cells[0], n_pub=int(cells[1]), n_cit=int(cells[2]), h=int(cells[3]),
            gini=float(cells[4]), b_hat=float(cells[5]), a_hat=float(cells[6]),
            s_min=float(cells[7]), w=int(cells[8]),
            accepted=cells[9] == "true", violates_e_bound=cells[10] == "true"))
    return rows
