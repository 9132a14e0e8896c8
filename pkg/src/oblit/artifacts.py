"""Versioned line-oriented artifact files shared by pipeline stages.

Every artifact starts with a header line `#oblit <kind> v<version>` followed
by one JSON record per line. Writers are byte-deterministic (sorted keys, no
timestamps); a kind or version mismatch on read is an error, never a silent
reinterpretation.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator


class ArtifactError(ValueError):
    """Wrong artifact kind or version, or a malformed artifact file."""


def write_artifact(path: str | Path, kind: str, version: int, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"#oblit {kind} v{version}\n")
        for record in records:
            handle.write(json.dumps(record, sort_keys=True))
            handle.write("\n")


def read_artifact(path: str | Path, kind: str, version: int) -> Iterator[dict]:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        parts = header.split(" ")
        if len(parts) != 3 or parts[0] != "#oblit":
            raise ArtifactError(f"{path}: not an artifact file (header {header!r})")
        if parts[1] != kind:
            raise ArtifactError(f"{path}: expected kind {kind!r}, found {parts[1]!r}")
        if parts[2] != f"v{version}":
            raise ArtifactError(
                f"{path}: version mismatch: expected v{version}, found {parts[2]}"
            )
        for lineno, line in enumerate(handle, 2):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise ArtifactError(f"{path}: line {lineno}: invalid JSON") from exc
