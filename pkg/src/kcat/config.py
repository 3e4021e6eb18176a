"""Project configuration for the service and CLI.

The config file is flat TOML: `key = value` lines with string, integer,
and boolean values (this interpreter targets exactly that subset; the
stdlib gains tomllib only in Python 3.11). Unknown keys are ignored.
The ``KCAT_DATA_DIR`` environment variable overrides ``data_dir``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError

DEFAULT_K_MAX = 20
DEFAULT_LISTEN_ADDR = "127.0.0.1:8137"


@dataclass(frozen=True)
class ProjectConfig:
    kb_dir: Path
    corpus_file: Path
    data_dir: Path
    predictions_file: Path | None = None
    k_max: int = DEFAULT_K_MAX
    listen_addr: str = DEFAULT_LISTEN_ADDR
    ui_dir: Path | None = None

    @property
    def host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_addr.rsplit(":", 1)[1])

    def validate(self) -> None:
        """Startup checks: referenced paths exist, k_max is positive."""
        if self.k_max < 1:
            raise ParseError("k_max must be >= 1")
        for label, path in (("kb_dir", self.kb_dir), ("corpus_file", self.corpus_file)):
            if not Path(path).exists():
                raise ParseError(f"{label} does not exist: {path}")
        if self.predictions_file is not None and not Path(self.predictions_file).exists():
            raise ParseError(f"predictions_file does not exist: {self.predictions_file}")
        if ":" not in self.listen_addr:
            raise ParseError(f"listen_addr must be host:port: {self.listen_addr!r}")
        try:
            self.port
        except ValueError:
            raise ParseError(f"listen_addr port is not an integer: {self.listen_addr!r}") from None


def _parse_value(raw: str, path: Path, lineno: int):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        body = raw[1:-1]
        if '"' in body.replace('\\"', ""):
            raise ParseError(f"{path}:{lineno}: unescaped quote in string")
        return body.replace('\\"', '"').replace("\\\\", "\\")
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: value must be a string, integer, "
                         f"or boolean: {raw!r}") from None


def read_config_table(path: Path | str) -> dict:
    """Key/value pairs from a flat TOML file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc

    table: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            continue  # table headers carry no information for a flat config
        if "=" not in stripped:
            raise ParseError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key or not key.replace("_", "").isalnum():
            raise ParseError(f"{path}:{lineno}: bad key {key!r}")
        # strip a trailing comment from non-string values
        if not raw.strip().startswith('"') and "#" in raw:
            raw = raw.split("#", 1)[0]
        table[key] = _parse_value(raw, path, lineno)
    return table


def load_config(path: Path | str) -> ProjectConfig:
    """Read a config file and apply environment overrides."""
    path = Path(path)
    table = read_config_table(path)
    base = path.parent

    def resolve(key: str) -> Path | None:
        value = table.get(key)
        if value is None:
            return None
        if not isinstance(value, str):
            raise ParseError(f"{path}: {key} must be a string path")
        return (base / value).resolve() if not Path(value).is_absolute() else Path(value)

    kb_dir = resolve("kb_dir")
    corpus_file = resolve("corpus_file")
    if kb_dir is None or corpus_file is None:
        raise ParseError(f"{path}: config requires 'kb_dir' and 'corpus_file'")
    data_dir = resolve("data_dir") or (base / "data").resolve()
    env_data_dir = os.environ.get("KCAT_DATA_DIR")
    if env_data_dir:
        data_dir = Path(env_data_dir).resolve()

    k_max = table.get("k_max", DEFAULT_K_MAX)
    if not isinstance(k_max, int) or isinstance(k_max, bool):
        raise ParseError(f"{path}: k_max must be an integer")
    listen_addr = table.get("listen_addr", DEFAULT_LISTEN_ADDR)
    if not isinstance(listen_addr, str):
        raise ParseError(f"{path}: listen_addr must be a string")

    return ProjectConfig(
        kb_dir=kb_dir,
        corpus_file=corpus_file,
        data_dir=data_dir,
        predictions_file=resolve("predictions_file"),
        k_max=k_max,
        listen_addr=listen_addr,
        ui_dir=resolve("ui_dir"),
    )
