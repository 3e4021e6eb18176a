"""Append-only session logs: one JSON action per line, recovery by replay.

The live log is strictly append-only; the service writes each applied
action before acknowledging it, so replaying the log after a crash or
restart reconstructs the exact session state, undo and redo stacks
included. ``save_compacted`` rewrites a log bounded to the most recent
commands (preceded by a state snapshot), trading redo history for a
memory bound on persisted sessions.
"""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import Corpus
from .errors import IoError, ParseError
from .kb import KnowledgeBase
from .linker import CandidateSet
from .session import AnnotationSession, MentionState, apply_action, open_session

# Persisted undo history bound applied by save_compacted.
MAX_SAVED_COMMANDS = 1000

LOG_SUFFIX = ".jsonl"


def log_path(data_dir: Path | str, session_id: str) -> Path:
    return Path(data_dir) / f"{session_id}{LOG_SUFFIX}"


def append_action(path: Path | str, action: dict) -> None:
    """Append one action line and flush it to disk before returning."""
    try:
        with Path(path).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(action, ensure_ascii=False) + "\n")
            fh.flush()
    except OSError as exc:
        raise IoError(f"cannot append to session log {path}: {exc}") from exc


def write_header(path: Path | str, session: AnnotationSession) -> None:
    """Start a fresh log with the session's opening record."""
    header = {
        "action": "open",
        "session_id": session.session_id,
        "annotator": session.annotator_id,
        "doc_id": session.doc_id,
        "k_max": session.k_max,
        "auto_accept_on_direct_label": session.auto_accept_on_direct_label,
    }
    try:
        Path(path).write_text(json.dumps(header, ensure_ascii=False) + "\n",
                              encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write session log {path}: {exc}") from exc


def replay_log(kb: KnowledgeBase, corpus: Corpus, path: Path | str,
               predictions: dict[str, CandidateSet] | None = None) -> AnnotationSession:
    """Rebuild a session by replaying its log from the opening record."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read session log {path}: {exc}") from exc

    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
    if not records or records[0].get("action") != "open":
        raise ParseError(f"{path}: first record must be the 'open' header")

    header = records[0]
    doc = corpus.document(header["doc_id"])
    session = open_session(
        kb, doc, predictions,
        annotator_id=header["annotator"],
        session_id=header["session_id"],
        k_max=header.get("k_max", 20),
        auto_accept_on_direct_label=header.get("auto_accept_on_direct_label", True),
    )
    for record in records[1:]:
        if record.get("action") == "snapshot":
            for mid, data in record["states"].items():
                session.states[mid] = MentionState.from_dict(data)
        else:
            apply_action(session, record)
    return session


def save_compacted(session: AnnotationSession, path: Path | str,
                   max_commands: int = MAX_SAVED_COMMANDS) -> None:
    """Persist the session, keeping at most ``max_commands`` of undo history.

    Older commands are folded into a state snapshot taken just before
    the retained tail, so replay restores the same states and the tail
    stays undoable. Redo history is not persisted by compaction.
    """
    actions = [cmd.action_dict() for cmd in session.undo_stack]
    dropped = actions[:-max_commands]
    kept = actions[-max_commands:] if actions else []

    write_header(path, session)
    if dropped:
        base = _session_at(session, dropped)
        snapshot = {
            "action": "snapshot",
            "states": {mid: st.to_dict() for mid, st in base.states.items()},
        }
        append_action(path, snapshot)
    for action in kept:
        append_action(path, action)


def _session_at(session: AnnotationSession, actions: list[dict]) -> AnnotationSession:
    """The session state reached by the given prefix of effective actions."""
    base = AnnotationSession(
        session_id=session.session_id,
        annotator_id=session.annotator_id,
        kb=session.kb,
        doc=session.doc,
        k_max=session.k_max,
        auto_accept_on_direct_label=session.auto_accept_on_direct_label,
        states={mid: st.clone() for mid, st in session.initial_states.items()},
        initial_states={mid: st.clone() for mid, st in session.initial_states.items()},
    )
    for action in actions:
        apply_action(base, action)
    return base
