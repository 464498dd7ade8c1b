"""Sparse semi-echelon forms over F_p.

Vectors are dicts from comparable column keys to residues mod p. The lead
column of a vector is its smallest key, so callers control pivot priority
through the key encoding (e.g. ``(0, exps)`` sorts before ``(1, exps)``).
"""

from __future__ import annotations

from typing import Hashable, Iterable

Vec = dict
Tag = dict


def vec_axpy(y: Vec, a: int, x: Vec, p: int) -> None:
    """y += a*x in place, dropping zeros."""
    for k, v in x.items():
        w = (y.get(k, 0) + a * v) % p
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class Echelon:
    """Incremental semi-echelon basis with optional combination tags.

    Each stored row is normalized to lead coefficient 1. A tag records the row
    as an F_p-combination of the vectors that were inserted.
    """

    def __init__(self, p: int, track: bool = False):
        self.p = p
        self.track = track
        self.rows: dict[Hashable, tuple[Vec, Tag | None]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Vec, tag: Tag | None = None) -> tuple[Vec, Tag | None]:
        """Reduce by lead terms; the result is zero iff vec lies in the span."""
        p = self.p
        vec = dict(vec)
        tag = dict(tag) if (self.track and tag is not None) else ({} if self.track else None)
        rows = self.rows
        done: dict = {}
        while vec:
            lead = min(vec)
            row = rows.get(lead)
            if row is None:
                done[lead] = vec.pop(lead)
                continue
            c = vec[lead]
            r, rtag = row
            vec_axpy(vec, -c, r, p)
            if tag is not None:
                vec_axpy(tag, -c, rtag, p)
        return done, tag

    def reduce_lead(self, vec: Vec, tag: Tag | None = None) -> tuple[Vec, Tag | None]:
        """Reduce only until the lead column is not a pivot."""
        p = self.p
        vec = dict(vec)
        tag = dict(tag) if (self.track and tag is not None) else ({} if self.track else None)
        rows = self.rows
        while vec:
            lead = min(vec)
            row = rows.get(lead)
            if row is None:
                break
            c = vec[lead]
            r, rtag = row
            vec_axpy(vec, -c, r, p)
            if tag is not None:
                vec_axpy(tag, -c, rtag, p)
        return vec, tag

    def add(self, vec: Vec, tag: Tag | None = None) -> Hashable | None:
        """Insert a vector; returns its new pivot, or None if it was dependent."""
        vec, tag = self.reduce_lead(vec, tag)
        if not vec:
            return None
        lead = min(vec)
        inv = pow(vec[lead], -1, self.p)
        if inv != 1:
            vec = {k: v * inv % self.p for k, v in vec.items()}
            if tag is not None:
                tag = {k: v * inv % self.p for k, v in tag.items()}
        self.rows[lead] = (vec, tag)
        return lead

    def contains(self, vec: Vec) -> bool:
        rest, _ = self.reduce_lead(vec)
        return not rest

    def express(self, vec: Vec) -> Tag | None:
        """Combination of inserted vectors equal to ``vec``, or None if outside the span."""
        if not self.track:
            raise ValueError("echelon was built without tracking")
        rest, tag = self.reduce_lead(vec, {})
        if rest:
            return None
        return {k: (-v) % self.p for k, v in tag.items()}

    def basis(self) -> Iterable[tuple[Vec, Tag | None]]:
        return self.rows.values()

    def rows_with_lead(self, pred) -> list[tuple[Vec, Tag | None]]:
        return [row for lead, row in self.rows.items() if pred(lead)]
