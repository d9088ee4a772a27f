"""Canonical JSON rendering.

Every artifact the CLI writes and the HTTP service returns goes through
``dumps`` so the two surfaces stay byte-identical for identical inputs:
UTF-8, two-space indent, no key sorting (dicts are built in a fixed
field order), one trailing newline.
"""

from __future__ import annotations

import json
from pathlib import Path


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def dump_bytes(obj) -> bytes:
    return dumps(obj).encode("utf-8")


def write(path: Path | str, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read(path: Path | str):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
