"""Per-document annotation sessions: multi-step typing, revision, undo/redo.

Mutations are event-sourced: each applied command carries full
before-snapshots of the mention states it touched, so undo is a
snapshot restore and redo is a deterministic forward re-execution.
Replaying the applied commands from the freshly opened session always
reproduces the current states exactly.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CorpusDocument
from .errors import (
    EmptyHistory,
    IoError,
    NotACandidate,
    NotInChain,
    NotOffered,
    UnknownFormat,
    UnknownMention,
)
from .kb import KnowledgeBase, TypeId
from .linker import (
    DEFAULT_K_MAX,
    Candidate,
    CandidateSet,
    constrained_types,
    filter_by_type,
    generate_candidates,
)

# Mention phases
UNLINKED = "Unlinked"
LINKED = "Linked"
COARSE_SELECTED = "CoarseSelected"
REVISED = "Revised"
LABELED = "Labeled"

# Command kinds
SELECT_TYPE = "SelectType"
ACCEPT_ENTITY = "AcceptEntity"
REVISE_ENTITY = "ReviseEntity"
SET_LABEL = "SetLabel"
MODIFY_LABEL = "ModifyLabel"
RESET_MENTION = "ResetMention"
RESET_ALL = "ResetAll"

# Type path exported for mentions that never received a label.
UNRESOLVED_LABEL = "/UNRESOLVED"


@dataclass
class MentionState:
    mention_id: str
    phase: str
    working: CandidateSet
    selected_types: list[TypeId] = field(default_factory=list)
    final_label: TypeId | None = None
    final_entity: str | None = None

    def clone(self) -> "MentionState":
        return MentionState(
            mention_id=self.mention_id,
            phase=self.phase,
            working=self.working,  # immutable, safe to share
            selected_types=list(self.selected_types),
            final_label=self.final_label,
            final_entity=self.final_entity,
        )

    def to_dict(self) -> dict:
        return {
            "mention_id": self.mention_id,
            "phase": self.phase,
            "working": [
                {"entity": c.entity_id, "score": c.score} for c in self.working.candidates
            ],
            "selected_types": list(self.selected_types),
            "final_label": self.final_label,
            "final_entity": self.final_entity,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MentionState":
        working = CandidateSet(
            mention_id=data["mention_id"],
            candidates=tuple(
                Candidate(entity_id=c["entity"], score=c["score"])
                for c in data["working"]
            ),
        )
        return cls(
            mention_id=data["mention_id"],
            phase=data["phase"],
            working=working,
            selected_types=list(data["selected_types"]),
            final_label=data["final_label"],
            final_entity=data["final_entity"],
        )


@dataclass
class Command:
    """An applied mutation plus the snapshots that invert it."""

    kind: str
    mention_id: str | None = None
    type_path: TypeId | None = None
    entity_id: str | None = None
    inner_kind: str | None = None  # set on ModifyLabel compounds
    inverse: dict[str, MentionState] = field(default_factory=dict)

    def action_dict(self) -> dict:
        """The user-level action this command answers to, for the log."""
        kind = self.inner_kind if self.kind == MODIFY_LABEL else self.kind
        if kind == SELECT_TYPE:
            return {"action": "select_type", "mention_id": self.mention_id,
                    "type": self.type_path}
        if kind in (ACCEPT_ENTITY, REVISE_ENTITY):
            return {"action": "revise_entity", "mention_id": self.mention_id,
                    "entity": self.entity_id}
        if kind == SET_LABEL:
            return {"action": "set_label", "mention_id": self.mention_id,
                    "type": self.type_path}
        if kind == RESET_MENTION:
            return {"action": "reset", "mention_id": self.mention_id}
        if kind == RESET_ALL:
            return {"action": "reset"}
        raise ValueError(f"unloggable command kind {self.kind!r}")


@dataclass
class AnnotationSession:
    """Single-annotator, single-document annotation state.

    One session is owned by exactly one annotator; callers serialize
    mutations (the HTTP layer enforces this with a per-session lock).
    """

    session_id: str
    annotator_id: str
    kb: KnowledgeBase
    doc: CorpusDocument
    k_max: int = DEFAULT_K_MAX
    auto_accept_on_direct_label: bool = True
    states: dict[str, MentionState] = field(default_factory=dict)
    initial_states: dict[str, MentionState] = field(default_factory=dict)
    undo_stack: list[Command] = field(default_factory=list)
    redo_stack: list[Command] = field(default_factory=list)

    @property
    def doc_id(self) -> str:
        return self.doc.doc_id

    def state(self, mention_id: str) -> MentionState:
        try:
            return self.states[mention_id]
        except KeyError:
            raise UnknownMention(f"unknown mention {mention_id!r}") from None

    def offered_types(self, mention_id: str) -> set[TypeId]:
        """Types currently selectable for the mention (full set if unconstrained)."""
        return constrained_types(self.kb, self.state(mention_id).working)

    # -- mutations -----------------------------------------------------------

    def select_type(self, mention_id: str, t: TypeId) -> None:
        """Pick a (coarse) type, shrinking the candidate list to matches.

        The selection chain must strictly deepen: after the first pick,
        each further type must be a descendant of the previous one.
        """
        self.kb.hierarchy.require(t)
        st = self.state(mention_id)
        if st.phase == LABELED:
            self._modify(st, lambda fresh: self._do_select(fresh, t), type_path=t)
            return
        prior = st.clone()
        self._do_select(st, t)
        self._push(Command(kind=SELECT_TYPE, mention_id=mention_id, type_path=t,
                           inverse={mention_id: prior}))

    def revise_entity(self, mention_id: str, entity_id: str) -> None:
        """Pick the linked entity from the current working candidates.

        Picking the top-ranked prediction is recorded as an accept; any
        other pick is a revision. Either way the constrained type set
        now comes from this single entity.
        """
        st = self.state(mention_id)
        if st.phase == LABELED:
            self._modify(st, lambda fresh: self._do_revise(fresh, entity_id),
                         entity_id=entity_id)
            return
        prior = st.clone()
        kind = self._do_revise(st, entity_id)
        self._push(Command(kind=kind, mention_id=mention_id, entity_id=entity_id,
                           inverse={mention_id: prior}))

    def set_label(self, mention_id: str, t: TypeId) -> None:
        """Assign the final type; must come from the constrained set."""
        self.kb.hierarchy.require(t)
        st = self.state(mention_id)
        if st.phase == LABELED:
            self._modify(st, lambda fresh: self._do_set_label(fresh, t), type_path=t)
            return
        prior = st.clone()
        self._do_set_label(st, t)
        self._push(Command(kind=SET_LABEL, mention_id=mention_id, type_path=t,
                           inverse={mention_id: prior}))

    def reset(self, mention_id: str | None = None) -> None:
        """Restore one mention (or all) to its freshly opened state."""
        if mention_id is not None:
            prior = self.state(mention_id).clone()
            cmd = Command(kind=RESET_MENTION, mention_id=mention_id,
                          inverse={mention_id: prior})
        else:
            cmd = Command(kind=RESET_ALL,
                          inverse={mid: st.clone() for mid, st in self.states.items()})
        self._execute(cmd)
        self._push(cmd)

    def undo(self) -> None:
        """Restore the state before the most recent command."""
        if not self.undo_stack:
            raise EmptyHistory("nothing to undo")
        cmd = self.undo_stack.pop()
        for mid, snapshot in cmd.inverse.items():
            self.states[mid] = snapshot.clone()
        self.redo_stack.append(cmd)

    def redo(self) -> None:
        """Re-apply the most recently undone command."""
        if not self.redo_stack:
            raise EmptyHistory("nothing to redo")
        cmd = self.redo_stack.pop()
        self._execute(cmd)
        self.undo_stack.append(cmd)

    # -- command plumbing ------------------------------------------------------

    def _push(self, cmd: Command) -> None:
        self.undo_stack.append(cmd)
        self.redo_stack.clear()

    def _modify(self, st: MentionState, do, *,
                type_path: TypeId | None = None, entity_id: str | None = None) -> None:
        """Restart labeling on an already labeled mention.

        Modeled as reset-then-act, recorded as one compound command so a
        single undo reverses the whole modification.
        """
        prior = st.clone()
        fresh = self.initial_states[st.mention_id].clone()
        applied_kind = do(fresh)
        self.states[st.mention_id] = fresh
        self._push(Command(
            kind=MODIFY_LABEL, mention_id=st.mention_id,
            type_path=type_path, entity_id=entity_id,
            inner_kind=applied_kind,
            inverse={st.mention_id: prior},
        ))

    def _execute(self, cmd: Command) -> None:
        """Forward semantics of a command; shared by apply and redo."""
        if cmd.kind == SELECT_TYPE:
            self._do_select(self.states[cmd.mention_id], cmd.type_path)
        elif cmd.kind in (ACCEPT_ENTITY, REVISE_ENTITY):
            self._do_revise(self.states[cmd.mention_id], cmd.entity_id)
        elif cmd.kind == SET_LABEL:
            self._do_set_label(self.states[cmd.mention_id], cmd.type_path)
        elif cmd.kind == MODIFY_LABEL:
            fresh = self.initial_states[cmd.mention_id].clone()
            if cmd.inner_kind == SELECT_TYPE:
                self._do_select(fresh, cmd.type_path)
            elif cmd.inner_kind in (ACCEPT_ENTITY, REVISE_ENTITY):
                self._do_revise(fresh, cmd.entity_id)
            elif cmd.inner_kind == SET_LABEL:
                self._do_set_label(fresh, cmd.type_path)
            else:
                raise ValueError(f"bad ModifyLabel inner kind {cmd.inner_kind!r}")
            self.states[cmd.mention_id] = fresh
        elif cmd.kind == RESET_MENTION:
            self.states[cmd.mention_id] = self.initial_states[cmd.mention_id].clone()
        elif cmd.kind == RESET_ALL:
            for mid, st in self.initial_states.items():
                self.states[mid] = st.clone()
        else:
            raise ValueError(f"unknown command kind {cmd.kind!r}")

    def _do_select(self, st: MentionState, t: TypeId) -> str:
        if st.selected_types:
            prev = st.selected_types[-1]
            if t not in self.kb.hierarchy.descendants(prev):
                raise NotInChain(
                    f"{t!r} does not deepen the selection chain below {prev!r}")
        if st.working.candidates and t not in constrained_types(self.kb, st.working):
            raise NotOffered(f"{t!r} is outside the constrained type set")
        st.selected_types.append(t)
        st.working = filter_by_type(self.kb, st.working, t)
        st.phase = COARSE_SELECTED
        return SELECT_TYPE

    def _do_revise(self, st: MentionState, entity_id: str) -> str:
        if entity_id not in st.working.entity_ids():
            raise NotACandidate(
                f"{entity_id!r} is not among the working candidates")
        kind = ACCEPT_ENTITY if entity_id == st.working.predicted else REVISE_ENTITY
        survivor = next(c for c in st.working.candidates if c.entity_id == entity_id)
        st.final_entity = entity_id
        st.working = CandidateSet(mention_id=st.mention_id, candidates=(survivor,))
        st.phase = REVISED
        return kind

    def _do_set_label(self, st: MentionState, t: TypeId) -> str:
        if st.working.candidates and t not in constrained_types(self.kb, st.working):
            raise NotOffered(f"{t!r} is outside the constrained type set")
        st.final_label = t
        if (st.final_entity is None and self.auto_accept_on_direct_label
                and st.working.candidates):
            # accept the best candidate consistent with the chosen type; when
            # the top prediction carries it, that is the top prediction itself
            st.final_entity = filter_by_type(self.kb, st.working, t).predicted
        st.phase = LABELED
        return SET_LABEL


def open_session(kb: KnowledgeBase, doc: CorpusDocument,
                 predictions: dict[str, CandidateSet] | None = None, *,
                 annotator_id: str = "anonymous",
                 session_id: str | None = None,
                 k_max: int = DEFAULT_K_MAX,
                 auto_accept_on_direct_label: bool = True) -> AnnotationSession:
    """Open a session with every mention pre-linked.

    Mentions covered by ``predictions`` use the imported candidate sets;
    all others fall back to the baseline alias-prior linker. Mentions
    with no candidates at all start Unlinked and offer the full type set.
    """
    session = AnnotationSession(
        session_id=session_id or uuid.uuid4().hex,
        annotator_id=annotator_id,
        kb=kb,
        doc=doc,
        k_max=k_max,
        auto_accept_on_direct_label=auto_accept_on_direct_label,
    )
    for mention in doc.mentions:
        cs = None
        if predictions is not None:
            cs = predictions.get(mention.mention_id)
        if cs is None:
            cs = generate_candidates(kb, mention, k_max)
        state = MentionState(
            mention_id=mention.mention_id,
            phase=LINKED if cs.candidates else UNLINKED,
            working=cs,
        )
        session.states[mention.mention_id] = state
        session.initial_states[mention.mention_id] = state.clone()
    return session


def apply_action(session: AnnotationSession, action: dict) -> None:
    """Apply one user-level action record (the log-line vocabulary)."""
    name = action.get("action")
    if name == "select_type":
        session.select_type(action["mention_id"], action["type"])
    elif name == "revise_entity":
        session.revise_entity(action["mention_id"], action["entity"])
    elif name == "set_label":
        session.set_label(action["mention_id"], action["type"])
    elif name == "reset":
        session.reset(action.get("mention_id"))
    elif name == "undo":
        session.undo()
    elif name == "redo":
        session.redo()
    else:
        raise ValueError(f"unknown action {name!r}")


# -- export -------------------------------------------------------------------

def _escape_txt(text: str) -> str:
    """Backslash-escape the markup tokens so plain text stays unambiguous."""
    return (text.replace("\\", "\\\\")
                .replace("[@", "\\[@")
                .replace("*]", "\\*]")
                .replace("#", "\\#"))


def render_txt(session: AnnotationSession) -> str:
    """Document text with every mention span rewritten as ``[@surface#type*]``.

    Mentions without a final label export with the ``/UNRESOLVED`` path.
    """
    text = session.doc.text
    parts: list[str] = []
    cursor = 0
    for mention in session.doc.mentions:
        parts.append(_escape_txt(text[cursor:mention.start]))
        label = session.states[mention.mention_id].final_label or UNRESOLVED_LABEL
        parts.append(f"[@{_escape_txt(mention.surface)}#{_escape_txt(label)}*]")
        cursor = mention.end
    parts.append(_escape_txt(text[cursor:]))
    return "".join(parts)


def render_json(session: AnnotationSession) -> str:
    """Lossless JSON export; reimporting reproduces the labels exactly."""
    annotations = []
    for mention in session.doc.mentions:
        st = session.states[mention.mention_id]
        annotations.append({
            "mention_id": mention.mention_id,
            "start": mention.start,
            "end": mention.end,
            "surface": mention.surface,
            "entity": st.final_entity,
            "label": st.final_label,
        })
    payload = {
        "doc_id": session.doc_id,
        "annotator": session.annotator_id,
        "annotations": annotations,
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def export(session: AnnotationSession, format: str, dest: Path | str) -> Path:
    """Write the session to ``dest`` as ``txt`` or ``json``."""
    if format == "txt":
        content = render_txt(session)
    elif format == "json":
        content = render_json(session)
    else:
        raise UnknownFormat(f"unknown export format {format!r}")
    dest = Path(dest)
    try:
        dest.write_text(content, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {dest}: {exc}") from exc
    return dest
