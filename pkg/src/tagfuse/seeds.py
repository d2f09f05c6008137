"""Deterministic seed derivation.

Every randomized stage draws from a seed derived from the master seed and
a purpose label (usually the topic name). Results therefore do not depend
on the order topics are processed in, and any stage can be re-run in
isolation and reproduce itself.
"""

from __future__ import annotations

import hashlib


def derive_seed(master_seed: int, *labels: str) -> int:
    """Collapse the master seed and labels into a 63-bit child seed."""
    digest = hashlib.sha256()
    digest.update(str(int(master_seed)).encode("ascii"))
    for label in labels:
        digest.update(b"\x1f")
        digest.update(label.encode("utf-8"))
    return int.from_bytes(digest.digest()[:8], "big") >> 1
