"""File output: CSV/JSON writers and the per-run manifest.

CSV uses comma separators, '.' decimal points, LF line endings, UTF-8 and a
header row.  Floats are written with repr (shortest round-trip form), so
re-reading a report reproduces the numbers bit for bit.  Existing files are
never appended to and only overwritten when ``force`` is set.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError

__all__ = ["ensure_writable", "fmt_cell", "write_csv", "write_json",
           "sha256_file", "RunManifest"]


def ensure_writable(path: str, force: bool) -> None:
    if os.path.exists(path) and not force:
        raise PreconditionError(
            f"refusing to overwrite {path!r} (pass --force to allow)")
    parent = os.path.dirname(os.path.abspath(path))
    if parent and not os.path.isdir(parent):
        raise PreconditionError(f"output directory {parent!r} does not exist")


def fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def write_csv(path: str, header: list[str], rows, force: bool = False) -> None:
    ensure_writable(path, force)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt_cell(v) for v in row) + "\n")


def jsonable(obj):
    """Recursively convert report objects to plain JSON types."""
    if isinstance(obj, Fraction):
        return {"fraction": f"{obj.numerator}/{obj.denominator}", "float": float(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj


def write_json(path: str, obj, force: bool = False) -> None:
    ensure_writable(path, force)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to re-run a CLI invocation and check its outputs."""

    tool: str
    version: str
    subcommand: str
    argv: list[str]
    parameters: dict
    seed: int | None
    started_at: str
    finished_at: str
    outputs: dict[str, str] = field(default_factory=dict)  # path -> sha256

    def write(self, path: str, force: bool = False) -> None:
        write_json(path, {
            "tool": self.tool, "version": self.version,
            "subcommand": self.subcommand, "argv": self.argv,
            "parameters": self.parameters, "seed": self.seed,
            "started_at": self.started_at, "finished_at": self.finished_at,
            "outputs": self.outputs,
        }, force=force)
