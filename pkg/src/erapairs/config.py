"""Flat ``key = value`` config files, optionally split into ``[section]`` blocks."""

from __future__ import annotations

import os
from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_flat_config(text: str) -> dict[str, dict[str, str]]:
    """Sections of key/value pairs; keys before any header go under ``""``.

    ``#`` and ``;`` start comment lines.
    """
    sections: dict[str, dict[str, str]] = {"": {}}
    current = sections[""]
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            name = s[1:-1].strip()
            if not name or name in sections:
                raise ConfigError(f"line {lineno}: empty or repeated section [{name}]")
            current = sections[name] = {}
            continue
        key, sep, value = s.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key = key.strip()
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        current[key] = value.strip()
    if not sections[""] and len(sections) > 1:
        del sections[""]
    return sections


def read_flat_config(path: str | os.PathLike[str]) -> dict[str, dict[str, str]]:
    return parse_flat_config(Path(path).read_text(encoding="utf-8"))


def read_single_section(path: str | os.PathLike[str]) -> dict[str, str]:
    sections = read_flat_config(path)
    if list(sections) != [""]:
        raise ConfigError(f"{path}: sections are not allowed here")
    return sections[""]
