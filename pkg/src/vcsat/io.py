"""Family text files and machine-readable reports.

Family file layout::

    n=6
    1,2,4
    1,3,5
    -

One member per line in canonical order, elements ascending and comma
separated; ``-`` stands for the empty set.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import InvalidInputError
from .family import SetFamily, SubsetMask, elements_of

SCHEMA_VERSION = 1
EMPTY = "-"


def format_family(fam: SetFamily) -> str:
    lines = [f"n={fam.n}"]
    for b in fam.bits:
        lines.append(",".join(map(str, elements_of(b))) if b else EMPTY)
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> SetFamily:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("n="):
        raise InvalidInputError("family file must start with a line 'n=<int>'")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise InvalidInputError(f"bad header {lines[0]!r}") from None
    masks = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if ln == EMPTY:
            masks.append(0)
            continue
        try:
            elems = [int(tok) for tok in ln.split(",")]
        except ValueError:
            raise InvalidInputError(f"line {lineno}: not a comma-separated element list: {ln!r}") from None
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise InvalidInputError(f"line {lineno}: elements must be strictly ascending")
        if elems[0] < 1 or elems[-1] > n:
            raise InvalidInputError(f"line {lineno}: elements must lie in [1, {n}]")
        masks.append(SubsetMask.of(elems, n).bits)
    if len(set(masks)) != len(masks):
        raise InvalidInputError("family file lists a set twice")
    return SetFamily(n, masks)


def read_family(path: str | Path) -> SetFamily:
    return parse_family(Path(path).read_text())


def write_family(fam: SetFamily, path: str | Path) -> None:
    Path(path).write_text(format_family(fam))


def set_list(mask: SubsetMask | int) -> list[int]:
    bits = mask.bits if isinstance(mask, SubsetMask) else int(mask)
    return list(elements_of(bits))


@dataclass
class Report:
    command: str
    parameters: dict[str, Any]
    ok: bool = True
    family_size: int | None = None
    vc: int | None = None
    saturated: bool | None = None
    almost_shattering: bool | None = None
    conditions: dict[str, Any] | None = None
    witnesses: list[Any] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    message: str = ""
    duration_s: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        raw = json.loads(text)
        if "schema_version" not in raw:
            raise InvalidInputError("report has no schema_version")
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in raw.items() if k in known})

    def to_text(self) -> str:
        out = [f"{self.command}: {'ok' if self.ok else 'FAILED'}"]
        if self.message:
            out.append(f"  {self.message}")
        for key in ("family_size", "vc", "saturated", "almost_shattering"):
            value = getattr(self, key)
            if value is not None:
                out.append(f"  {key}: {value}")
        if self.conditions is not None:
            out.append("  conditions: " + ", ".join(f"{k}={v}" for k, v in self.conditions.items()))
        for key, value in self.details.items():
            out.append(f"  {key}: {value}")
        for w in self.witnesses:
            out.append(f"  witness: {w}")
        out.append(f"  duration: {self.duration_s:.3f}s")
        return "\n".join(out) + "\n"
