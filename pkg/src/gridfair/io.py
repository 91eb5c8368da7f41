"""Readers and writers for run files, judgments, alignments, and results.

All inputs are UTF-8, newline-delimited text; lines starting with ``#``
and blank lines are ignored. Parsers reject malformed records instead of
repairing them, and every parse error names the 1-based line it came from.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import AlignmentTable, GroupSchema, Ranking, RelevanceJudgments
from .errors import ParseError

RESULT_FIELDS = (
    "system",
    "request",
    "geometry",
    "columns",
    "reduction",
    "base",
    "adjustment",
    "alpha",
    "gamma",
    "beta",
    "metric",
    "value",
)


@dataclass(frozen=True)
class RunFile:
    """Parsed ranked output of one system: request id to the list of its
    sampled rankings, ordered by sample index."""

    system: str
    rankings: Mapping[str, tuple[Ranking, ...]]

    def requests(self) -> tuple[str, ...]:
        return tuple(sorted(self.rankings))


@dataclass(frozen=True)
class ResultsRow:
    """One measured value for (system, request, layout, model, metric)."""

    system: str
    request: str
    geometry: str
    columns: int
    reduction: str
    base: str
    adjustment: str
    alpha: float
    gamma: float
    beta: float
    metric: str
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite metric value: {self.value}")

    def sort_key(self):
        return (
            self.system,
            self.request,
            self.geometry,
            self.columns,
            self.reduction,
            self.base,
            self.adjustment,
            self.alpha,
            self.gamma,
            self.beta,
            self.metric,
        )


def _data_lines(path):
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def parse_run(path) -> RunFile:
    """Read whitespace-separated ``qid iter docid rank score tag`` records.

    ``iter`` is the stochastic-policy sample index; the conventional
    placeholder ``Q0`` reads as sample 0. Records are grouped by
    (request, sample) and ordered by ascending rank; the rank order in the
    file is authoritative, scores are carried as-is.
    """
    records: dict[tuple[str, int], list[tuple[int, str, float]]] = {}
    seen_docs: set[tuple[str, int, str]] = set()
    seen_ranks: set[tuple[str, int, int]] = set()
    system = None
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 6:
            raise ParseError(path, lineno, f"expected 6 columns, got {len(parts)}")
        qid, it, docid, rank_s, score_s, tag = parts
        if it == "Q0":
            sample = 0
        else:
            try:
                sample = int(it)
            except ValueError:
                raise ParseError(path, lineno, f"sample index {it!r} is not an integer")
            if sample < 0:
                raise ParseError(path, lineno, f"negative sample index {sample}")
        try:
            rank = int(rank_s)
        except ValueError:
            raise ParseError(path, lineno, f"rank {rank_s!r} is not an integer")
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(path, lineno, f"score {score_s!r} is not a number")
        if (qid, sample, docid) in seen_docs:
            raise ParseError(
                path, lineno, f"duplicate document {docid!r} in request {qid!r} sample {sample}"
            )
        if (qid, sample, rank) in seen_ranks:
            raise ParseError(
                path, lineno, f"duplicate rank {rank} in request {qid!r} sample {sample}"
            )
        seen_docs.add((qid, sample, docid))
        seen_ranks.add((qid, sample, rank))
        if system is None:
            system = tag
        records.setdefault((qid, sample), []).append((rank, docid, score))
    if system is None:
        raise ParseError(path, 1, "run file contains no records")
    rankings: dict[str, list[Ranking]] = {}
    for (qid, sample), rows in records.items():
        rows.sort()
        rankings.setdefault(qid, []).append(
            Ranking(
                request=qid,
                sample=sample,
                items=tuple(doc for _, doc, _ in rows),
                scores=tuple(score for _, _, score in rows),
            )
        )
    ordered = {
        qid: tuple(sorted(lists, key=lambda r: r.sample))
        for qid, lists in rankings.items()
    }
    return RunFile(system=system, rankings=ordered)


def write_run(rankings: Iterable[Ranking], system: str, path) -> None:
    """Write rankings in the six-column run format, 0-based ranks."""
    ordered = sorted(rankings, key=lambda r: (r.request, r.sample))
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for ranking in ordered:
            scores = ranking.scores or tuple(
                float(len(ranking.items) - i) for i in range(len(ranking.items))
            )
            for rank, (doc, score) in enumerate(zip(ranking.items, scores)):
                out.write(
                    f"{ranking.request} {ranking.sample} {doc} {rank} "
                    f"{_fmt(score)} {system}\n"
                )


def parse_alignment(path) -> AlignmentTable:
    """Read tab-separated ``docid group weight`` membership rows.

    Multiple rows per document accumulate and are L1-normalized. The
    schema covers every observed group name plus ``unknown``, sorted with
    unknown last.
    """
    raw: dict[str, dict[str, float]] = {}
    first_line: dict[str, int] = {}
    groups: set[str] = set()
    for lineno, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected 3 tab-separated columns, got {len(parts)}")
        docid, group, weight_s = (p.strip() for p in parts)
        if not docid or not group:
            raise ParseError(path, lineno, "empty document or group name")
        try:
            weight = float(weight_s)
        except ValueError:
            raise ParseError(path, lineno, f"weight {weight_s!r} is not a number")
        if weight < 0:
            raise ParseError(path, lineno, f"negative membership weight {weight}")
        groups.add(group)
        acc = raw.setdefault(docid, {})
        acc[group] = acc.get(group, 0.0) + weight
        first_line.setdefault(docid, lineno)
    schema = GroupSchema.from_groups(groups)
    vectors = {}
    for docid, acc in raw.items():
        total = sum(acc.values())
        if total <= 0:
            raise ParseError(
                path, first_line[docid], f"document {docid!r} has all-zero membership"
            )
        vec = [acc.get(name, 0.0) / total for name in schema.names]
        vectors[docid] = vec
    return AlignmentTable.from_weights(schema, vectors)


def parse_qrels(path) -> RelevanceJudgments:
    """Read whitespace-separated ``qid 0 docid grade`` judgments.

    The second column is ignored. Absent pairs read as grade 0.
    """
    grades: dict[tuple[str, str], float] = {}
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(path, lineno, f"expected 4 columns, got {len(parts)}")
        qid, _, docid, grade_s = parts
        try:
            grade = float(grade_s)
        except ValueError:
            raise ParseError(path, lineno, f"grade {grade_s!r} is not a number")
        if grade < 0:
            raise ParseError(path, lineno, f"negative relevance grade {grade}")
        if (qid, docid) in grades:
            raise ParseError(path, lineno, f"duplicate judgment for {qid!r}/{docid!r}")
        grades[(qid, docid)] = grade
    return RelevanceJudgments(grades)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_results(rows: Sequence[ResultsRow], path) -> None:
    """Write rows as CSV with the fixed header, sorted, floats at 12
    significant digits. Identical inputs produce byte-identical files."""
    ordered = sorted(rows, key=ResultsRow.sort_key)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULT_FIELDS)
        for row in ordered:
            writer.writerow(
                [
                    row.system,
                    row.request,
                    row.geometry,
                    str(row.columns),
                    row.reduction,
                    row.base,
                    row.adjustment,
                    _fmt(row.alpha),
                    _fmt(row.gamma),
                    _fmt(row.beta),
                    row.metric,
                    _fmt(row.value),
                ]
            )


def read_results(path) -> list[ResultsRow]:
    """Read a results CSV produced by :func:`write_results`."""
    rows = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(RESULT_FIELDS):
            raise ParseError(path, 1, f"unexpected header {header}")
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(RESULT_FIELDS):
                raise ParseError(
                    path, lineno, f"expected {len(RESULT_FIELDS)} fields, got {len(record)}"
                )
            try:
                rows.append(
                    ResultsRow(
                        system=record[0],
                        request=record[1],
                        geometry=record[2],
                        columns=int(record[3]),
                        reduction=record[4],
                        base=record[5],
                        adjustment=record[6],
                        alpha=float(record[7]),
                        gamma=float(record[8]),
                        beta=float(record[9]),
                        metric=record[10],
                        value=float(record[11]),
                    )
                )
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc))
    return rows
