"""Corpus documents with pre-annotated mention spans.

Span detection is out of scope: mentions arrive in the corpus file with
character offsets. The loader checks that spans are in bounds, mutually
non-overlapping, and (when a surface is given) match the document text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, UnknownDoc
from .linker import Mention


@dataclass(frozen=True)
class CorpusDocument:
    doc_id: str
    text: str
    mentions: tuple[Mention, ...]  # sorted by start offset

    def mention(self, mention_id: str) -> Mention | None:
        for m in self.mentions:
            if m.mention_id == mention_id:
                return m
        return None


@dataclass
class Corpus:
    documents: dict[str, CorpusDocument]

    def document(self, doc_id: str) -> CorpusDocument:
        try:
            return self.documents[doc_id]
        except KeyError:
            raise UnknownDoc(f"unknown document {doc_id!r}") from None

    def all_mentions(self) -> list[Mention]:
        return [m for doc in self.documents.values() for m in doc.mentions]

    def __len__(self) -> int:
        return len(self.documents)


def load_corpus(path: Path | str) -> Corpus:
    """Load ``{"documents": [...]}`` and validate every mention span."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("documents"), list):
        raise ParseError(f"{path} must be an object with a 'documents' list")

    documents: dict[str, CorpusDocument] = {}
    seen_mentions: set[str] = set()
    for entry in data["documents"]:
        doc = _load_document(entry, seen_mentions)
        if doc.doc_id in documents:
            raise ParseError(f"duplicate doc_id {doc.doc_id!r}")
        documents[doc.doc_id] = doc
    return Corpus(documents=documents)


def _load_document(entry: dict, seen_mentions: set[str]) -> CorpusDocument:
    if not isinstance(entry, dict) or "doc_id" not in entry or "text" not in entry:
        raise ParseError(f"document entry needs 'doc_id' and 'text': {entry!r}")
    doc_id = str(entry["doc_id"])
    text = str(entry["text"])
    raw_mentions = entry.get("mentions", [])
    if not isinstance(raw_mentions, list):
        raise ParseError(f"'mentions' of {doc_id!r} must be a list")

    mentions: list[Mention] = []
    for raw in raw_mentions:
        if not isinstance(raw, dict) or "mention_id" not in raw:
            raise ParseError(f"{doc_id}: mention entry needs a 'mention_id': {raw!r}")
        mention_id = str(raw["mention_id"])
        if mention_id in seen_mentions:
            raise ParseError(f"duplicate mention_id {mention_id!r}")
        seen_mentions.add(mention_id)
        try:
            start, end = int(raw["start"]), int(raw["end"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{doc_id}/{mention_id}: 'start' and 'end' must be integers") from None
        if not 0 <= start < end <= len(text):
            raise ParseError(
                f"{doc_id}/{mention_id}: span [{start}, {end}) out of bounds "
                f"for text of length {len(text)}")
        surface = text[start:end]
        if "surface" in raw and raw["surface"] != surface:
            raise ParseError(
                f"{doc_id}/{mention_id}: declared surface {raw['surface']!r} "
                f"does not match text slice {surface!r}")
        gold = raw.get("gold_entity")
        mentions.append(Mention(
            mention_id=mention_id, doc_id=doc_id, start=start, end=end,
            surface=surface, gold_entity=str(gold) if gold is not None else None,
        ))

    mentions.sort(key=lambda m: m.start)
    for prev, cur in zip(mentions, mentions[1:]):
        if cur.start < prev.end:
            raise ParseError(
                f"{doc_id}: mentions {prev.mention_id!r} and {cur.mention_id!r} overlap")
    return CorpusDocument(doc_id=doc_id, text=text, mentions=tuple(mentions))
