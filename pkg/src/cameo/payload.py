"""Canonical payload serialization and content digests.

Task payloads travel through channels as plain JSON-compatible values
(dicts, lists, strings, numbers, bools, None).  Cache keys and determinism
guarantees both rest on one canonical text form: map keys sorted, no
insignificant whitespace, floats rendered as their shortest round-trip
decimal (Python's repr), NaN/Inf rejected.
"""

import hashlib
import json
import math

from .errors import SerializationError

_SCALARS = (str, int, float, bool, type(None))


def _check_canonicalizable(value, path="$"):
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SerializationError(f"non-finite float at {path}")
        return
    if isinstance(value, _SCALARS):
        return
    if isinstance(value, dict):
        for k, v in value.items():
            if not isinstance(k, str):
                raise SerializationError(f"non-string map key {k!r} at {path}")
            _check_canonicalizable(v, f"{path}.{k}")
        return
    if isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _check_canonicalizable(v, f"{path}[{i}]")
        return
    raise SerializationError(f"unserializable value of type {type(value).__name__} at {path}")


def canonical_json(value) -> str:
    """Render `value` in the canonical text form used for digests."""
    _check_canonicalizable(value)
    return json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=False)


def payload_digest(value) -> str:
    """256-bit content digest (hex) of a canonicalized payload."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def derive_seed(seed: int, *parts) -> int:
    """Derive an independent 64-bit sub-seed from a base seed and labels.

    hash(seed || part0 || part1 ...) truncated to 64 bits; stable across
    runs and platforms.
    """
    h = hashlib.sha256()
    h.update(str(int(seed)).encode("utf-8"))
    for part in parts:
        h.update(b"|")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")
