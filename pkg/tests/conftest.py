"""Shared fixtures: a small hand-built KB/corpus and a BBN-shaped one."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from kcat.corpus import load_corpus
from kcat.kb import load_kb_dir

# 12-node hierarchy; /organization/club has a second parent (/group) so
# multi-parent classification stays exercised everywhere.
SMALL_TYPES = [
    {"id": "/person", "parents": [], "definition": "a human being"},
    {"id": "/person/athlete", "parents": ["/person"],
     "definition": "a person trained to compete in sports"},
    {"id": "/person/artist", "parents": ["/person"],
     "definition": "a person who creates art"},
    {"id": "/person/artist/singer", "parents": ["/person/artist"],
     "definition": "a person who sings"},
    {"id": "/organization", "parents": [],
     "definition": "a group of people with a particular purpose"},
    {"id": "/organization/club", "parents": ["/organization", "/group"],
     "definition": "an association dedicated to a particular interest"},
    {"id": "/organization/company", "parents": ["/organization"],
     "definition": "a commercial business"},
    {"id": "/group", "parents": [], "definition": "a gathered collection"},
    {"id": "/location", "parents": [], "definition": "a particular place"},
    {"id": "/location/city", "parents": ["/location"], "definition": "a large town"},
    {"id": "/location/country", "parents": ["/location"],
     "definition": "a nation's territory"},
    {"id": "/other", "parents": [], "definition": "none of the above"},
]

SMALL_ENTITIES = [
    {"id": "Q123", "name": "Kobe Bean Bryant", "types": ["/person/athlete"],
     "description": "American professional basketball player."},
    {"id": "Q456", "name": "Kobe", "types": ["/location/city"],
     "description": "Port city in Japan."},
    {"id": "QCITY", "name": "Liverpool", "types": ["/location/city"],
     "description": "City in north-west England."},
    {"id": "QCLUB", "name": "Liverpool F.C.", "types": ["/organization/club"],
     "description": "Professional football club based in Liverpool, England."},
    {"id": "QSINGER", "name": "Adele", "types": ["/person/artist/singer"],
     "description": "English singer and songwriter."},
    {"id": "QCOMP", "name": "Apple Inc.", "types": ["/organization/company"],
     "description": "American technology company."},
]

SMALL_ALIASES = [
    {"surface": "kobe", "candidates": [
        {"entity": "Q123", "count": 980}, {"entity": "Q456", "count": 20}]},
    {"surface": "liverpool", "candidates": [
        {"entity": "QCITY", "count": 700}, {"entity": "QCLUB", "count": 300}]},
    {"surface": "adele", "candidates": [{"entity": "QSINGER", "count": 50}]},
    {"surface": "apple", "candidates": [{"entity": "QCOMP", "count": 10}]},
]

SMALL_DOCS = {
    "documents": [
        {"doc_id": "d1", "text": "Kobe scored 60 points in the final game.",
         "mentions": [
             {"mention_id": "d1-m0", "start": 0, "end": 4, "gold_entity": "Q123"}]},
        {"doc_id": "d2", "text": "Liverpool won the match yesterday.",
         "mentions": [
             {"mention_id": "d2-m0", "start": 0, "end": 9, "gold_entity": "QCLUB"}]},
        {"doc_id": "d3", "text": "Zzqx mentioned Adele in passing.",
         "mentions": [
             {"mention_id": "d3-m0", "start": 0, "end": 4},
             {"mention_id": "d3-m1", "start": 15, "end": 20,
              "gold_entity": "QSINGER"}]},
    ]
}


def write_kb(kb_dir: Path, types=None, entities=None, aliases=None) -> Path:
    kb_dir.mkdir(parents=True, exist_ok=True)
    (kb_dir / "types.json").write_text(
        json.dumps({"types": types if types is not None else SMALL_TYPES}),
        encoding="utf-8")
    (kb_dir / "entities.json").write_text(
        json.dumps({"entities": entities if entities is not None else SMALL_ENTITIES}),
        encoding="utf-8")
    (kb_dir / "aliases.json").write_text(
        json.dumps({"aliases": aliases if aliases is not None else SMALL_ALIASES}),
        encoding="utf-8")
    return kb_dir


def write_corpus(path: Path, docs=None) -> Path:
    path.write_text(json.dumps(docs if docs is not None else SMALL_DOCS),
                    encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def small_kb_dir(tmp_path_factory) -> Path:
    return write_kb(tmp_path_factory.mktemp("kb"))


@pytest.fixture(scope="session")
def small_kb(small_kb_dir):
    return load_kb_dir(small_kb_dir)


@pytest.fixture(scope="session")
def small_corpus_file(tmp_path_factory) -> Path:
    return write_corpus(tmp_path_factory.mktemp("corpus") / "corpus.json")


@pytest.fixture(scope="session")
def small_corpus(small_corpus_file):
    return load_corpus(small_corpus_file)


def build_bbn_shaped() -> tuple[list[dict], list[dict], list[dict], dict]:
    """47 types, 60 single-candidate mentions, mean constrained size 2.05.

    57 entities carry one leaf type (closed size 2) and three carry two
    leaves under one root (closed size 3): 123 constrained types over 60
    mentions, i.e. a ratio of 123/(60*47) ~ 4.36%.
    """
    roots = [f"/r{i}" for i in range(9)]
    types = [{"id": r, "parents": []} for r in roots]
    child_counts = [5, 5, 5, 4, 4, 4, 4, 4, 3]  # 38 children + 9 roots = 47
    leaves: list[str] = []
    for root, count in zip(roots, child_counts):
        for j in range(count):
            leaf = f"{root}/c{j}"
            types.append({"id": leaf, "parents": [root]})
            leaves.append(leaf)
    assert len(types) == 47

    entities, aliases = [], []
    for k in range(60):
        eid = f"E{k}"
        if k < 57:
            declared = [leaves[k % len(leaves)]]
        else:
            root = roots[k - 57]
            declared = [f"{root}/c0", f"{root}/c1"]
        entities.append({"id": eid, "name": f"Entity {k}", "types": declared})
        aliases.append({"surface": f"ent{k}",
                        "candidates": [{"entity": eid, "count": 5}]})

    words = [f"ent{k}" for k in range(60)]
    text = " ".join(words)
    mentions, pos = [], 0
    for k, word in enumerate(words):
        mentions.append({"mention_id": f"b-m{k}", "start": pos,
                         "end": pos + len(word)})
        pos += len(word) + 1
    docs = {"documents": [{"doc_id": "bbn-doc", "text": text, "mentions": mentions}]}
    return types, entities, aliases, docs


@pytest.fixture(scope="session")
def bbn_fixture(tmp_path_factory):
    """(kb, corpus) for the reduction-mechanism checks."""
    types, entities, aliases, docs = build_bbn_shaped()
    base = tmp_path_factory.mktemp("bbn")
    kb_dir = write_kb(base / "kb", types, entities, aliases)
    corpus_file = write_corpus(base / "corpus.json", docs)
    return load_kb_dir(kb_dir), load_corpus(corpus_file)
