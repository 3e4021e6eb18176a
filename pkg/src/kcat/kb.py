"""Knowledge base: type hierarchy, entity records, alias dictionary.

The knowledge base is loaded from three JSON files (``types.json``,
``entities.json``, ``aliases.json``), validated for referential
integrity, and immutable afterwards, so concurrent reads need no
coordination. Entity type sets are ancestor-closed at load time:
membership tests during interactive filtering are then O(1) and never
miss a coarse type.
"""

from __future__ import annotations

import json
import string
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CycleError, DanglingRefError, ParseError, UnknownType

# A type id is its slash-delimited path from the root, e.g. "/person/athlete".
TypeId = str

TYPES_FILENAME = "types.json"
ENTITIES_FILENAME = "entities.json"
ALIASES_FILENAME = "aliases.json"

_SURFACE_TRIM = string.punctuation + string.whitespace


def validate_type_path(path: str) -> str:
    """Check the lexical form of a type path and return it unchanged.

    Paths are non-empty, begin with "/", and every segment is non-empty
    and free of "/" and whitespace.
    """
    if not isinstance(path, str) or not path.startswith("/"):
        raise ParseError(f"type path must be a string starting with '/': {path!r}")
    segments = path.split("/")[1:]
    for seg in segments:
        if not seg or any(ch.isspace() for ch in seg):
            raise ParseError(f"type path has an empty or whitespace segment: {path!r}")
    return path


def type_depth(path: TypeId) -> int:
    """Number of path segments; "/person/athlete" has depth 2."""
    return path.count("/")


def parent_prefix(path: TypeId) -> TypeId | None:
    """Textual parent of a path, or None for a depth-1 path."""
    head, _, _ = path.rpartition("/")
    return head or None


def normalize_surface(surface: str) -> str:
    """Canonical alias key: lowercase, collapse whitespace, trim punctuation.

    Applied identically when the alias table is loaded and when a
    mention surface is looked up.
    """
    collapsed = " ".join(surface.lower().split())
    return collapsed.strip(_SURFACE_TRIM)


@dataclass(frozen=True)
class EntityRecord:
    """A KB entity with its ancestor-closed type set."""

    entity_id: str
    name: str
    types: frozenset[TypeId]
    description: str = ""


@dataclass
class TypeHierarchy:
    """The type set organized as a rooted DAG.

    ``parents`` keeps the declared parent order; the first parent is the
    canonical chain encoded in the node's path string, any further
    parents are extra DAG edges. Nodes with no parents sit directly
    under an implicit virtual root that is never exposed as a label.
    """

    parents: dict[TypeId, tuple[TypeId, ...]]
    children: dict[TypeId, tuple[TypeId, ...]]
    definitions: dict[TypeId, str]

    @classmethod
    def from_entries(cls, entries: list[dict]) -> "TypeHierarchy":
        """Build and validate a hierarchy from parsed ``types.json`` entries.

        Validation order matters: unknown parent ids raise
        DanglingRefError, cycles raise CycleError, and only then is each
        path checked to spell out its first-declared parent chain
        (ParseError otherwise).
        """
        parents: dict[TypeId, tuple[TypeId, ...]] = {}
        definitions: dict[TypeId, str] = {}
        for entry in entries:
            if not isinstance(entry, dict) or "id" not in entry:
                raise ParseError(f"type entry must be an object with an 'id': {entry!r}")
            path = validate_type_path(entry["id"])
            if path in parents:
                raise ParseError(f"duplicate type id {path!r}")
            raw_parents = entry.get("parents", [])
            if not isinstance(raw_parents, list):
                raise ParseError(f"'parents' of {path!r} must be a list")
            for p in raw_parents:
                validate_type_path(p)
            if len(set(raw_parents)) != len(raw_parents):
                raise ParseError(f"duplicate parent for type {path!r}")
            parents[path] = tuple(raw_parents)
            definitions[path] = str(entry.get("definition", ""))

        for path, plist in parents.items():
            for p in plist:
                if p not in parents:
                    raise DanglingRefError(f"type {path!r} lists unknown parent {p!r}")

        hierarchy = cls(
            parents=parents,
            children=_children_of(parents),
            definitions=definitions,
        )
        hierarchy._check_acyclic()
        hierarchy._check_canonical_paths()
        return hierarchy

    @property
    def nodes(self) -> set[TypeId]:
        return set(self.parents)

    def __contains__(self, t: TypeId) -> bool:
        return t in self.parents

    def __len__(self) -> int:
        return len(self.parents)

    def require(self, t: TypeId) -> None:
        if t not in self.parents:
            raise UnknownType(f"unknown type {t!r}")

    def definition(self, t: TypeId) -> str:
        self.require(t)
        return self.definitions.get(t, "")

    def roots(self) -> list[TypeId]:
        """Types directly under the virtual root, sorted by path."""
        return sorted(t for t, ps in self.parents.items() if not ps)

    def ancestors(self, t: TypeId) -> set[TypeId]:
        """All strict ancestors of ``t``; the virtual root is excluded."""
        self.require(t)
        return self._reach(t, self.parents)

    def descendants(self, t: TypeId) -> set[TypeId]:
        """All strict descendants of ``t``."""
        self.require(t)
        return self._reach(t, self.children)

    def closure(self, types) -> frozenset[TypeId]:
        """Ancestor closure of a collection of types (each included)."""
        closed: set[TypeId] = set()
        for t in types:
            if t not in closed:
                closed.add(t)
                closed |= self.ancestors(t)
        return frozenset(closed)

    def subtree(self, t: TypeId) -> "TypeHierarchy":
        """The hierarchy induced on ``t`` and its descendants.

        ``t`` becomes a root of the result; every node keeps its
        original path string.
        """
        self.require(t)
        keep = {t} | self.descendants(t)
        parents: dict[TypeId, tuple[TypeId, ...]] = {t: ()}
        for node in keep - {t}:
            parents[node] = tuple(p for p in self.parents[node] if p in keep)
        return TypeHierarchy(
            parents=parents,
            children=_children_of(parents),
            definitions={node: self.definitions.get(node, "") for node in keep},
        )

    def _reach(self, start: TypeId, adjacency: dict[TypeId, tuple[TypeId, ...]]) -> set[TypeId]:
        seen: set[TypeId] = set()
        queue = deque(adjacency[start])
        while queue:
            node = queue.popleft()
            if node not in seen:
                seen.add(node)
                queue.extend(adjacency[node])
        return seen

    def _check_acyclic(self) -> None:
        # Kahn's algorithm over parent->child edges; leftovers are cyclic.
        pending = {t: len(ps) for t, ps in self.parents.items()}
        queue = deque(t for t, n in pending.items() if n == 0)
        processed = 0
        while queue:
            node = queue.popleft()
            processed += 1
            for child in self.children[node]:
                pending[child] -= 1
                if pending[child] == 0:
                    queue.append(child)
        if processed != len(self.parents):
            cyclic = sorted(t for t, n in pending.items() if n > 0)
            raise CycleError(f"type hierarchy is not a DAG; cycle involves {cyclic}")

    def _check_canonical_paths(self) -> None:
        for path, plist in self.parents.items():
            expected = plist[0] if plist else None
            if parent_prefix(path) != expected:
                raise ParseError(
                    f"path {path!r} does not spell its first-declared parent chain "
                    f"(expected parent prefix {expected!r})"
                )


def _children_of(parents: dict[TypeId, tuple[TypeId, ...]]) -> dict[TypeId, tuple[TypeId, ...]]:
    children: dict[TypeId, list[TypeId]] = {t: [] for t in parents}
    for node, plist in parents.items():
        for p in plist:
            if p in children:
                children[p].append(node)
    # sorted for structural determinism across loads
    return {t: tuple(sorted(cs)) for t, cs in children.items()}


@dataclass
class AliasTable:
    """Normalized surface string -> {entity_id: count}."""

    entries: dict[str, dict[str, int]] = field(default_factory=dict)

    def lookup(self, surface: str) -> dict[str, int]:
        """Candidate counts for a raw surface; empty dict when unknown."""
        return self.entries.get(normalize_surface(surface), {})


@dataclass
class KnowledgeBase:
    hierarchy: TypeHierarchy
    entities: dict[str, EntityRecord]
    aliases: AliasTable

    def entity(self, entity_id: str) -> EntityRecord:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise DanglingRefError(f"unknown entity id {entity_id!r}") from None


def load_kb(types_file: Path | str, entities_file: Path | str,
            aliases_file: Path | str) -> KnowledgeBase:
    """Load and validate a knowledge base from its three JSON files.

    Raises ParseError on malformed files, CycleError when the hierarchy
    is not a DAG, DanglingRefError on unknown type or entity ids.
    """
    hierarchy = TypeHierarchy.from_entries(
        _read_json_list(types_file, "types"))
    entities = _load_entities(_read_json_list(entities_file, "entities"), hierarchy)
    aliases = _load_aliases(_read_json_list(aliases_file, "aliases"), entities)
    return KnowledgeBase(hierarchy=hierarchy, entities=entities, aliases=aliases)


def load_kb_dir(kb_dir: Path | str) -> KnowledgeBase:
    """Load a knowledge base from a directory holding the three files."""
    kb_dir = Path(kb_dir)
    return load_kb(
        kb_dir / TYPES_FILENAME,
        kb_dir / ENTITIES_FILENAME,
        kb_dir / ALIASES_FILENAME,
    )


def _read_json_list(path: Path | str, key: str) -> list:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get(key), list):
        raise ParseError(f"{path} must be an object with a {key!r} list")
    return data[key]


def _load_entities(entries: list, hierarchy: TypeHierarchy) -> dict[str, EntityRecord]:
    entities: dict[str, EntityRecord] = {}
    for entry in entries:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError(f"entity entry must be an object with an 'id': {entry!r}")
        entity_id = str(entry["id"])
        if entity_id in entities:
            raise ParseError(f"duplicate entity id {entity_id!r}")
        declared = entry.get("types")
        if not isinstance(declared, list) or not declared:
            raise ParseError(f"entity {entity_id!r} must declare a non-empty 'types' list")
        for t in declared:
            if t not in hierarchy:
                raise DanglingRefError(f"entity {entity_id!r} lists unknown type {t!r}")
        entities[entity_id] = EntityRecord(
            entity_id=entity_id,
            name=str(entry.get("name", entity_id)),
            types=hierarchy.closure(declared),
            description=str(entry.get("description", "")),
        )
    return entities


def _load_aliases(entries: list, entities: dict[str, EntityRecord]) -> AliasTable:
    table: dict[str, dict[str, int]] = {}
    for entry in entries:
        if not isinstance(entry, dict) or "surface" not in entry:
            raise ParseError(f"alias entry must be an object with a 'surface': {entry!r}")
        key = normalize_surface(str(entry["surface"]))
        if not key:
            raise ParseError(f"alias surface normalizes to empty: {entry['surface']!r}")
        candidates = entry.get("candidates", [])
        if not isinstance(candidates, list):
            raise ParseError(f"'candidates' of alias {entry['surface']!r} must be a list")
        # surfaces that normalize to the same key are merged by summing counts
        bucket = table.setdefault(key, {})
        seen_here: set[str] = set()
        for cand in candidates:
            if not isinstance(cand, dict) or "entity" not in cand:
                raise ParseError(f"alias candidate must be an object with an 'entity': {cand!r}")
            entity_id = str(cand["entity"])
            if entity_id in seen_here:
                raise ParseError(
                    f"alias {entry['surface']!r} lists entity {entity_id!r} twice")
            seen_here.add(entity_id)
            if entity_id not in entities:
                raise DanglingRefError(
                    f"alias {entry['surface']!r} references unknown entity {entity_id!r}")
            count = cand.get("count", 0)
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise ParseError(
                    f"alias count for {entity_id!r} must be a non-negative integer")
            bucket[entity_id] = bucket.get(entity_id, 0) + count
    return AliasTable(entries=table)
