"""Profile file I/O with explicit normalization of messy ballots.

Two formats are supported (see docs/formats.md for the exact schemas):

  * JSON: one object holding the candidate table, ``max_rankings``, the
    bound ballots as arrays of candidate names, and ``unbound_count``.
  * CSV: header ``rank1,...,rankK`` and one row per bound ballot; the
    candidate table, ``max_rankings`` and ``unbound_count`` come from a
    sidecar JSON file (``<path>.meta.json`` by default) or keyword
    arguments.

Normalization rules, applied on read in this order while scanning a row
left to right: an ``overvote`` token truncates the ballot there;
``undervote`` and blank cells are skipped (later ranks shift up); a repeated
candidate keeps its first occurrence. Token matching is case-insensitive
for the three reserved tokens only; candidate names must match exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .core import ElectionProfile, validate_profile
from .errors import ParseError, UnknownCandidate, ValidationError

UNDERVOTE = "undervote"
OVERVOTE = "overvote"

_SIDECAR_SUFFIX = ".meta.json"


def normalize_row(cells, name_to_id) -> tuple[int, ...]:
    """Apply the normalization rules to one row of rank-slot tokens."""
    out: list[int] = []
    seen: set[int] = set()
    for cell in cells:
        token = cell.strip()
        lowered = token.lower()
        if lowered == OVERVOTE:
            break
        if lowered == UNDERVOTE or token == "":
            continue
        cid = name_to_id.get(token)
        if cid is None:
            raise UnknownCandidate(f"unknown candidate {token!r}")
        if cid not in seen:
            seen.add(cid)
            out.append(cid)
    return tuple(out)


def _detect_format(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    suffix = path.suffix.lower().lstrip(".")
    if suffix in ("json", "csv"):
        return suffix
    raise ParseError(f"cannot infer format from {path.name!r}; pass format explicitly")


def _build_profile(candidates, max_rankings, unbound_count, raw_rows) -> ElectionProfile:
    if not isinstance(candidates, (list, tuple)) or not all(
        isinstance(c, str) for c in candidates
    ):
        raise ParseError("candidates must be a list of strings")
    if not isinstance(max_rankings, int) or isinstance(max_rankings, bool):
        raise ParseError("max_rankings must be an integer")
    if not isinstance(unbound_count, int) or isinstance(unbound_count, bool):
        raise ParseError("unbound_count must be an integer")
    name_to_id = {name: i for i, name in enumerate(candidates)}
    ballots = tuple(normalize_row(row, name_to_id) for row in raw_rows)
    profile = ElectionProfile(
        candidates=tuple(candidates),
        bound_ballots=ballots,
        unbound_count=unbound_count,
        max_rankings=max_rankings,
    )
    violations = validate_profile(profile)
    if violations:
        raise ValidationError(violations)
    return profile


def read_profile(
    path,
    fmt: str | None = None,
    *,
    sidecar=None,
    candidates=None,
    max_rankings=None,
    unbound_count=None,
) -> ElectionProfile:
    """Read and validate a profile; CSV metadata may come from ``sidecar``
    or the keyword overrides."""
    path = Path(path)
    fmt = _detect_format(path, fmt)
    if fmt == "json":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
        missing = {"candidates", "max_rankings", "ballots", "unbound_count"} - set(data)
        if missing:
            raise ParseError(f"{path}: missing fields {sorted(missing)}")
        rows = data["ballots"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError(f"{path}: ballots must be an array of arrays")
        return _build_profile(
            data["candidates"], data["max_rankings"], data["unbound_count"], rows
        )

    if fmt == "csv":
        meta = {}
        sidecar_path = Path(sidecar) if sidecar else Path(str(path) + _SIDECAR_SUFFIX)
        if sidecar_path.exists():
            try:
                with open(sidecar_path, encoding="utf-8") as fh:
                    meta = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ParseError(f"cannot read sidecar {sidecar_path}: {exc}") from exc
        if candidates is not None:
            meta["candidates"] = list(candidates)
        if max_rankings is not None:
            meta["max_rankings"] = max_rankings
        if unbound_count is not None:
            meta["unbound_count"] = unbound_count
        for key in ("candidates", "max_rankings"):
            if key not in meta:
                raise ParseError(
                    f"CSV profiles need {key!r} from a sidecar file or explicit argument"
                )
        meta.setdefault("unbound_count", 0)

        try:
            with open(path, newline="", encoding="utf-8") as fh:
                reader = csv.reader(fh)
                try:
                    header = next(reader)
                except StopIteration:
                    raise ParseError(f"{path}: empty file") from None
                rows = list(reader)
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc

        expected = [f"rank{i + 1}" for i in range(len(header))]
        if [h.strip().lower() for h in header] != expected:
            raise ParseError(f"{path}: header must be rank1..rank{len(header)}")
        if len(header) > meta["max_rankings"]:
            raise ParseError(
                f"{path}: {len(header)} rank columns exceed max_rankings={meta['max_rankings']}"
            )
        for i, row in enumerate(rows):
            if len(row) > len(header):
                raise ParseError(f"{path}: row {i} has more cells than the header")
        return _build_profile(
            meta["candidates"], meta["max_rankings"], meta["unbound_count"], rows
        )

    raise ParseError(f"unknown format {fmt!r}")


def profile_to_json(profile: ElectionProfile) -> dict:
    return {
        "candidates": list(profile.candidates),
        "max_rankings": profile.max_rankings,
        "ballots": [list(profile.names(sig)) for sig in profile.bound_ballots],
        "unbound_count": profile.unbound_count,
    }


def write_profile(profile: ElectionProfile, path, fmt: str | None = None) -> None:
    """Write a profile; round-trips structurally with :func:`read_profile`.

    CSV output also writes the ``<path>.meta.json`` sidecar.
    """
    violations = validate_profile(profile)
    if violations:
        raise ValidationError(violations)
    path = Path(path)
    fmt = _detect_format(path, fmt)
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(profile_to_json(profile), fh, indent=2)
            fh.write("\n")
        return
    if fmt == "csv":
        width = profile.max_rankings
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"rank{i + 1}" for i in range(width)])
            for sig in profile.bound_ballots:
                names = list(profile.names(sig))
                writer.writerow(names + [""] * (width - len(names)))
        meta = {
            "candidates": list(profile.candidates),
            "max_rankings": profile.max_rankings,
            "unbound_count": profile.unbound_count,
        }
        with open(str(path) + _SIDECAR_SUFFIX, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
        return
    raise ParseError(f"unknown format {fmt!r}")
