"""Crowdsourcing analysis: agreement, error patterns, and label integration.

All operations are pure functions over immutable annotation files, so
they can run concurrently on snapshots without coordination. Agreement
uses exact type equality; hierarchical partial credit is deliberately
out of scope.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus
from .errors import IoError, NoOverlap, ParseError, TooFewAnnotators
from .kb import TypeHierarchy, TypeId, type_depth

# Error patterns for a (gold, predicted) pair.
CORRECT = "Correct"
OVER_SPECIFIC = "OverSpecific"
NOT_SPECIFIC = "NotSpecific"
INCORRECT_PATH = "IncorrectPath"

ERROR_KINDS = (CORRECT, OVER_SPECIFIC, NOT_SPECIFIC, INCORRECT_PATH)

# Report colors, declared in the emitted legend.
_PATTERN_COLORS = {
    OVER_SPECIFIC: "orange",
    NOT_SPECIFIC: "blue",
    INCORRECT_PATH: "red",
}


@dataclass(frozen=True)
class AnnotationFile:
    """One annotator's labels for one document's mentions."""

    annotator_id: str
    doc_id: str
    labels: dict[str, TypeId]  # mention_id -> type path; unlabeled mentions absent


def read_annotation_json(path: Path | str) -> AnnotationFile:
    """Read a session JSON export; mentions with a null label are skipped."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return annotation_from_dict(data, source=str(path))


def annotation_from_dict(data: dict, source: str = "<memory>") -> AnnotationFile:
    if not isinstance(data, dict) or "doc_id" not in data or "annotator" not in data:
        raise ParseError(f"{source}: export must carry 'doc_id' and 'annotator'")
    annotations = data.get("annotations", [])
    if not isinstance(annotations, list):
        raise ParseError(f"{source}: 'annotations' must be a list")
    labels: dict[str, TypeId] = {}
    for row in annotations:
        if not isinstance(row, dict) or "mention_id" not in row:
            raise ParseError(f"{source}: annotation rows need a 'mention_id'")
        label = row.get("label")
        if label is not None:
            labels[str(row["mention_id"])] = str(label)
    return AnnotationFile(
        annotator_id=str(data["annotator"]),
        doc_id=str(data["doc_id"]),
        labels=labels,
    )


def pairwise_accuracy(a: AnnotationFile, b: AnnotationFile) -> float:
    """Fraction of commonly labeled mentions with the identical type."""
    common = a.labels.keys() & b.labels.keys()
    if not common:
        raise NoOverlap(
            f"annotators {a.annotator_id!r} and {b.annotator_id!r} share no labeled mentions")
    agreed = sum(1 for m in common if a.labels[m] == b.labels[m])
    return agreed / len(common)


@dataclass(frozen=True)
class AccuracyMatrix:
    """Symmetric pairwise accuracy; None marks pairs with no shared mentions."""

    annotators: tuple[str, ...]
    cells: tuple[tuple[float | None, ...], ...]

    def to_dict(self) -> dict:
        return {
            "annotators": list(self.annotators),
            "cells": [list(row) for row in self.cells],
        }


def accuracy_matrix(files: list[AnnotationFile]) -> AccuracyMatrix:
    """All pairwise accuracies; needs at least two annotation files."""
    if len(files) < 2:
        raise TooFewAnnotators("accuracy matrix needs at least two annotation files")
    cells = []
    for a in files:
        row: list[float | None] = []
        for b in files:
            try:
                row.append(pairwise_accuracy(a, b))
            except NoOverlap:
                row.append(None)
        cells.append(tuple(row))
    return AccuracyMatrix(
        annotators=tuple(f.annotator_id for f in files),
        cells=tuple(cells),
    )


def classify_error(h: TypeHierarchy, gold: TypeId, predicted: TypeId) -> str:
    """Which of the four patterns a (gold, predicted) pair falls into.

    Classification uses edge reachability, so types with several parents
    are handled correctly regardless of their canonical path string.
    """
    h.require(gold)
    h.require(predicted)
    if gold == predicted:
        return CORRECT
    if gold in h.ancestors(predicted):
        return OVER_SPECIFIC
    if predicted in h.ancestors(gold):
        return NOT_SPECIFIC
    return INCORRECT_PATH


def error_counts(h: TypeHierarchy, gold: AnnotationFile,
                 pred: AnnotationFile) -> dict[str, int]:
    """Pattern counts over the commonly labeled mentions; partitions them."""
    common = gold.labels.keys() & pred.labels.keys()
    if not common:
        raise NoOverlap("gold and predicted files share no labeled mentions")
    counts = Counter(classify_error(h, gold.labels[m], pred.labels[m]) for m in common)
    return {kind: counts.get(kind, 0) for kind in ERROR_KINDS}


_TEX_SPECIALS = {
    "\\": r"\textbackslash{}",
    "&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#", "_": r"\_",
    "{": r"\{", "}": r"\}",
    "~": r"\textasciitilde{}", "^": r"\textasciicircum{}",
}


def _tex_escape(text: str) -> str:
    return "".join(_TEX_SPECIALS.get(ch, ch) for ch in text)


def error_report(h: TypeHierarchy, gold: AnnotationFile, pred: AnnotationFile,
                 corpus: Corpus) -> str:
    """Standalone LaTeX error report with color-coded mislabeled spans.

    Over-specific spans render orange, not-specific blue, incorrect-path
    red; correct spans stay uncolored. A summary table carries the
    pattern counts over all commonly labeled mentions.
    """
    counts = error_counts(h, gold, pred)
    common = gold.labels.keys() & pred.labels.keys()

    lines = [
        r"\documentclass{article}",
        r"\usepackage[utf8]{inputenc}",
        r"\usepackage{xcolor}",
        r"\begin{document}",
        r"\section*{Annotation Error Report}",
        f"Gold annotator: {_tex_escape(gold.annotator_id)}; "
        f"compared annotator: {_tex_escape(pred.annotator_id)}.",
        "",
        r"Legend: \textcolor{orange}{over specific}, "
        r"\textcolor{blue}{not specific}, "
        r"\textcolor{red}{incorrect path}.",
        "",
        r"\begin{tabular}{lr}",
    ]
    for kind in ERROR_KINDS:
        lines.append(f"{_tex_escape(kind)} & {counts[kind]} \\\\")
    lines += [r"\end{tabular}", ""]

    for doc in corpus.documents.values():
        doc_common = [m for m in doc.mentions if m.mention_id in common]
        if not doc_common:
            continue
        lines.append(r"\paragraph{" + _tex_escape(doc.doc_id) + "}")
        parts = []
        cursor = 0
        for mention in doc_common:
            parts.append(_tex_escape(doc.text[cursor:mention.start]))
            kind = classify_error(h, gold.labels[mention.mention_id],
                                  pred.labels[mention.mention_id])
            surface = _tex_escape(mention.surface)
            color = _PATTERN_COLORS.get(kind)
            parts.append(rf"\textcolor{{{color}}}{{{surface}}}" if color else surface)
            cursor = mention.end
        parts.append(_tex_escape(doc.text[cursor:]))
        lines.append("".join(parts))
        lines.append("")

    lines.append(r"\end{document}")
    return "\n".join(lines) + "\n"


def write_error_report(h: TypeHierarchy, gold: AnnotationFile, pred: AnnotationFile,
                       corpus: Corpus, dest: Path | str) -> Path:
    dest = Path(dest)
    try:
        dest.write_text(error_report(h, gold, pred, corpus), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {dest}: {exc}") from exc
    return dest


@dataclass(frozen=True)
class IntegrationResult:
    labels: dict[str, TypeId]
    unresolved: set[str]
    support: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "labels": dict(sorted(self.labels.items())),
            "unresolved": sorted(self.unresolved),
            "support": dict(sorted(self.support.items())),
        }


def integrate(h: TypeHierarchy, files: list[AnnotationFile]) -> IntegrationResult:
    """Final labels by voting; independent of annotator file order.

    A strict majority wins outright. Ties among the top vote-getters go
    to the deepest type that is an ancestor-or-self of every tied label
    (ties on depth break lexicographically); when no such type exists
    below the virtual root, the mention stays unresolved. Support counts
    the votes the winning label generalizes.
    """
    if len(files) < 2:
        raise TooFewAnnotators("integration needs at least two annotation files")
    mentions = sorted({m for f in files for m in f.labels})
    labels: dict[str, TypeId] = {}
    unresolved: set[str] = set()
    support: dict[str, int] = {}
    for mention_id in mentions:
        votes = Counter(f.labels[mention_id] for f in files if mention_id in f.labels)
        for label in votes:
            h.require(label)
        top = max(votes.values())
        tied = sorted(label for label, n in votes.items() if n == top)
        if len(tied) == 1:
            labels[mention_id] = tied[0]
            support[mention_id] = top
            continue
        shared = None
        for label in tied:
            closed = {label} | h.ancestors(label)
            shared = closed if shared is None else shared & closed
        if not shared:
            unresolved.add(mention_id)
            continue
        winner = min(shared, key=lambda p: (-type_depth(p), p))
        labels[mention_id] = winner
        support[mention_id] = top * len(tied)
    return IntegrationResult(labels=labels, unresolved=unresolved, support=support)
