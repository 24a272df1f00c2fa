"""Level parsing: text files to classified tile grids.

Levels are plain text, one character per tile and one row per line. Row 0
is the top of the level and y grows downward, matching reading order; every
height-sensitive metric in this package uses that frame.
"""

from __future__ import annotations

import enum
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class TileClass(enum.IntEnum):
    SOLID = 0
    EMPTY = 1
    ENEMY = 2
    REWARD = 3
    PIPE = 4

    @classmethod
    def from_name(cls, name: str) -> TileClass:
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise UnknownClassError(f"unknown tile class {name!r}") from None


class LevelFormatError(ValueError):
    """Base class for malformed level or classification input."""


class ClassificationError(LevelFormatError):
    pass


class DuplicateKeyError(ClassificationError):
    pass


class UnknownClassError(ClassificationError):
    pass


class EmptyClassificationError(ClassificationError):
    pass


class EmptyLevelError(LevelFormatError):
    pass


class RaggedRowsError(LevelFormatError):
    pass


class UnmappedCharacterError(LevelFormatError):
    pass


# Mario AI Framework alphabet. 'M' (start), 'F' (flag) and '|' (platform
# background) are decoration and read as empty space.
_DEFAULT_GROUPS: dict[TileClass, str] = {
    TileClass.EMPTY: "-MF|",
    TileClass.SOLID: "X#S%DU*Bb",
    TileClass.ENEMY: "EgGkKrRyY",
    TileClass.REWARD: "Q!CoL12?@",
    TileClass.PIPE: "tT<>[]",
}


@dataclass(frozen=True)
class TileClassification:
    char_map: dict[str, TileClass]
    default_class: TileClass | None = None

    def __post_init__(self) -> None:
        if not self.char_map:
            raise EmptyClassificationError("classification maps no characters")
        for ch in self.char_map:
            if len(ch) != 1:
                raise ClassificationError(f"tile key must be one character, got {ch!r}")

    def classify(self, ch: str) -> TileClass:
        cls = self.char_map.get(ch)
        if cls is None:
            if self.default_class is None:
                raise UnmappedCharacterError(f"character {ch!r} has no tile class")
            return self.default_class
        return cls


def default_classification() -> TileClassification:
    char_map = {ch: cls for cls, chars in _DEFAULT_GROUPS.items() for ch in chars}
    return TileClassification(char_map)


def parse_classification(text: str) -> TileClassification:
    """Parse ``<char> = <Class>`` lines.

    Lines starting with ``;`` are comments. A key may be wrapped in single
    quotes (``' ' = Empty``). The key ``default`` sets the fallback class.
    """
    char_map: dict[str, TileClass] = {}
    default: TileClass | None = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith(";"):
            continue
        key, sep, value = line.rpartition("=")
        if not sep:
            key, sep, value = line.rpartition(":")
        if not sep:
            raise ClassificationError(f"line {lineno}: expected '<char> = <Class>'")
        key = key.strip()
        if len(key) == 3 and key[0] == key[-1] == "'":
            key = key[1]
        cls = TileClass.from_name(value)
        if key.lower() == "default":
            default = cls
            continue
        if len(key) != 1:
            raise ClassificationError(f"line {lineno}: key {key!r} is not a single character")
        if key in char_map:
            raise DuplicateKeyError(f"line {lineno}: duplicate key {key!r}")
        char_map[key] = cls
    return TileClassification(char_map, default)


def load_classification(path: str | os.PathLike[str] | None) -> TileClassification:
    if path is None:
        return default_classification()
    return parse_classification(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True, eq=False)
class TileGrid:
    cells: np.ndarray  # (height, width) int8 of TileClass values
    raw: tuple[str, ...]
    level_id: str = ""
    generator_label: str = ""

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def to_text(self) -> str:
        return "\n".join(self.raw) + "\n"


def parse_level(
    text: str,
    classification: TileClassification | None = None,
    level_id: str = "",
    generator_label: str = "",
) -> TileGrid:
    classification = classification or default_classification()
    rows = text.splitlines()
    if rows and rows[-1] == "":
        rows.pop()
    if not rows or not any(rows):
        raise EmptyLevelError(f"level {level_id!r} is empty")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(
                f"level {level_id!r}: row {i} has length {len(row)}, expected {width}"
            )
    if width == 0:
        raise EmptyLevelError(f"level {level_id!r} has zero-width rows")

    lookup: dict[str, int] = {}
    cells = np.empty((len(rows), width), dtype=np.int8)
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            code = lookup.get(ch)
            if code is None:
                try:
                    code = lookup[ch] = int(classification.classify(ch))
                except UnmappedCharacterError as exc:
                    raise UnmappedCharacterError(
                        f"level {level_id!r}: row {y}, column {x}: {exc}"
                    ) from None
            cells[y, x] = code
    cells.setflags(write=False)
    return TileGrid(cells, tuple(rows), level_id, generator_label)


@dataclass(frozen=True)
class LoadFailure:
    path: str
    error: str


class Corpus(list):
    """A list of TileGrid that also carries the files that failed to load."""

    def __init__(self, grids=(), failures: list[LoadFailure] | None = None):
        super().__init__(grids)
        self.failures: list[LoadFailure] = list(failures or [])


def corpus_files(root: str | os.PathLike[str]) -> list[tuple[str, str, Path]]:
    """``(generator_label, level_id, path)`` for every level file, sorted."""
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"corpus root {str(root)!r} is not a directory")
    found = []
    for gen_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for f in sorted(gen_dir.glob("*.txt")):
            found.append((gen_dir.name, f.stem, f))
    found.sort(key=lambda t: (t[0], t[1]))
    return found


def _load_one(item: tuple[str, str, Path], classification: TileClassification):
    label, level_id, path = item
    try:
        text = path.read_text(encoding="utf-8")
        return parse_level(text, classification, level_id, label)
    except (OSError, UnicodeDecodeError, LevelFormatError) as exc:
        return LoadFailure(str(path), f"{type(exc).__name__}: {exc}")


def load_corpus(
    root: str | os.PathLike[str],
    classification: TileClassification | None = None,
) -> Corpus:
    """Load ``root/<generator>/<level>.txt`` files in (generator, level) order.

    Files that fail to read or parse are logged and collected in
    ``Corpus.failures``; they never abort the load.
    """
    classification = classification or default_classification()
    files = corpus_files(root)
    if not files:
        log.warning("no level files found under %s", root)
    corpus = Corpus()
    for item in files:
        result = _load_one(item, classification)
        if isinstance(result, LoadFailure):
            log.warning("skipping %s: %s", result.path, result.error)
            corpus.failures.append(result)
        else:
            corpus.append(result)
    if corpus.failures:
        log.warning("%d of %d level files failed to load", len(corpus.failures), len(files))
    return corpus


def write_corpus(grids, root: str | os.PathLike[str]) -> list[Path]:
    root = Path(root)
    paths = []
    for g in grids:
        d = root / (g.generator_label or "unlabelled")
        d.mkdir(parents=True, exist_ok=True)
        p = d / f"{g.level_id}.txt"
        p.write_text(g.to_text(), encoding="utf-8", newline="\n")
        paths.append(p)
    return paths
