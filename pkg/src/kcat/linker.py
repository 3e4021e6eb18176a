"""Candidate generation, ranking, and knowledge-constrained type filtering.

The baseline ranker scores candidates by their alias-count prior
p(entity | surface); precomputed predictions from an external linking
model can be ingested instead (``import_predictions``) and flow through
the same ranking and truncation rules. All operations are pure reads
over the knowledge base.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DanglingRefError, EmptyInput, ParseError
from .kb import KnowledgeBase, TypeId

# Revision choices offered per mention; configurable per project.
DEFAULT_K_MAX = 20


@dataclass(frozen=True)
class Mention:
    """A pre-annotated span in a document; ``gold_entity`` is evaluation-only."""

    mention_id: str
    doc_id: str
    start: int
    end: int
    surface: str
    gold_entity: str | None = None


@dataclass(frozen=True)
class Candidate:
    entity_id: str
    score: float


@dataclass(frozen=True)
class CandidateSet:
    """Ranked candidates for one mention; score desc, ties by entity id asc."""

    mention_id: str
    candidates: tuple[Candidate, ...] = ()

    @property
    def predicted(self) -> str | None:
        """Top-ranked entity id, or None when there are no candidates."""
        return self.candidates[0].entity_id if self.candidates else None

    def entity_ids(self) -> list[str]:
        return [c.entity_id for c in self.candidates]

    def __len__(self) -> int:
        return len(self.candidates)


def _ranked(mention_id: str, candidates, k_max: int | None = None) -> CandidateSet:
    ordered = sorted(candidates, key=lambda c: (-c.score, c.entity_id))
    if k_max is not None:
        ordered = ordered[:k_max]
    return CandidateSet(mention_id=mention_id, candidates=tuple(ordered))


def generate_candidates(kb: KnowledgeBase, mention: Mention,
                        k_max: int = DEFAULT_K_MAX) -> CandidateSet:
    """Baseline candidate generation from the alias dictionary.

    Scores are counts normalized over the full (untruncated) alias
    entry, so truncation to ``k_max`` never inflates survivor scores.
    Zero-count candidates carry no prior mass and are dropped. An
    unknown surface yields an empty set, which the UI surfaces as
    "needs manual search" rather than an error.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    counts = kb.aliases.lookup(mention.surface)
    total = sum(counts.values())
    if total == 0:
        return CandidateSet(mention_id=mention.mention_id)
    scored = (Candidate(entity_id=e, score=c / total)
              for e, c in counts.items() if c > 0)
    return _ranked(mention.mention_id, scored, k_max)


def rank_candidates(cs: CandidateSet) -> CandidateSet:
    """Re-sort by (score desc, entity id asc); idempotent, no truncation."""
    return _ranked(cs.mention_id, cs.candidates)


def import_predictions(kb: KnowledgeBase, file: Path | str,
                       k_max: int = DEFAULT_K_MAX) -> dict[str, CandidateSet]:
    """Ingest external linker output (one JSON object per line).

    Each row is ``{"mention_id": ..., "candidates": [{"entity": ...,
    "score": ...}, ...]}``; rows are re-ranked and truncated exactly
    like baseline output. Unknown entity ids raise DanglingRefError.
    """
    file = Path(file)
    try:
        lines = file.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {file}: {exc}") from exc

    result: dict[str, CandidateSet] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{file}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(row, dict) or "mention_id" not in row:
            raise ParseError(f"{file}:{lineno}: row must be an object with a 'mention_id'")
        mention_id = str(row["mention_id"])
        if mention_id in result:
            raise ParseError(f"{file}:{lineno}: duplicate mention_id {mention_id!r}")
        raw = row.get("candidates", [])
        if not isinstance(raw, list):
            raise ParseError(f"{file}:{lineno}: 'candidates' must be a list")
        candidates = []
        seen: set[str] = set()
        for cand in raw:
            if not isinstance(cand, dict) or "entity" not in cand or "score" not in cand:
                raise ParseError(
                    f"{file}:{lineno}: candidate needs 'entity' and 'score': {cand!r}")
            entity_id = str(cand["entity"])
            if entity_id in seen:
                raise ParseError(f"{file}:{lineno}: entity {entity_id!r} listed twice")
            seen.add(entity_id)
            if entity_id not in kb.entities:
                raise DanglingRefError(
                    f"{file}:{lineno}: unknown entity id {entity_id!r}")
            score = cand["score"]
            if not isinstance(score, (int, float)) or isinstance(score, bool) \
                    or not 0.0 <= float(score) <= 1.0:
                raise ParseError(
                    f"{file}:{lineno}: score of {entity_id!r} must be in [0, 1]")
            candidates.append(Candidate(entity_id=entity_id, score=float(score)))
        result[mention_id] = _ranked(mention_id, candidates, k_max)
    return result


def export_predictions(candidate_sets, file: Path | str) -> None:
    """Write candidate sets in the predictions line format (import's inverse)."""
    file = Path(file)
    with file.open("w", encoding="utf-8") as fh:
        for cs in candidate_sets:
            row = {
                "mention_id": cs.mention_id,
                "candidates": [
                    {"entity": c.entity_id, "score": c.score} for c in cs.candidates
                ],
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def constrained_types(kb: KnowledgeBase, cs: CandidateSet) -> set[TypeId]:
    """Union of the candidates' (ancestor-closed) type sets.

    With no candidates there is no constraint to apply and the full
    hierarchy node set is returned, so annotation stays possible when
    linking fails.
    """
    if not cs.candidates:
        return kb.hierarchy.nodes
    offered: set[TypeId] = set()
    for cand in cs.candidates:
        offered |= kb.entity(cand.entity_id).types
    return offered


def filter_by_type(kb: KnowledgeBase, cs: CandidateSet, t: TypeId) -> CandidateSet:
    """Keep candidates whose closed type set contains ``t``; order preserved.

    Because entity type sets are ancestor-closed, this keeps exactly the
    candidates typed with ``t`` or any descendant of ``t``.
    """
    kb.hierarchy.require(t)
    survivors = tuple(c for c in cs.candidates if t in kb.entity(c.entity_id).types)
    return CandidateSet(mention_id=cs.mention_id, candidates=survivors)


@dataclass(frozen=True)
class ReductionReport:
    """How far linking constraints shrink the candidate type set."""

    total_types: int
    mean_kc_types: float
    ratio: float

    def to_dict(self) -> dict:
        return {
            "total_types": self.total_types,
            "mean_kc_types": self.mean_kc_types,
            "ratio": self.ratio,
        }


def reduction_stats(kb: KnowledgeBase, candidate_sets) -> ReductionReport:
    """Mean constrained-type-set size over mentions, as a fraction of all types."""
    candidate_sets = list(candidate_sets)
    if not candidate_sets:
        raise EmptyInput("reduction_stats needs at least one candidate set")
    total = len(kb.hierarchy)
    mean = sum(len(constrained_types(kb, cs)) for cs in candidate_sets) / len(candidate_sets)
    return ReductionReport(total_types=total, mean_kc_types=mean, ratio=mean / total)
