"""Linear sketches over dynamically updated integer vectors with q-sparse decode.

Realization: a peeling-based bucketed sketch.  Each of `rows` hash rows spreads
the domain over `width` cells; a cell accumulates (count, index-sum,
fingerprint) = (sum of values, sum of index*value, sum of value*fp(index)),
all linear in the underlying vector, so update order is irrelevant and an
insert followed by a delete restores the state bit for bit.

Decode peels cells that look like a single surviving index, verifying each
candidate against its 64-bit fingerprint and re-checking that the emptied
tables are exactly zero, so a wrong vector is never returned silently: either
the exact vector comes back or the decode reports failure.  Decode also
reports failure when more than q items peel out, making it double as the
q-sparsity test.

Reference mode stores the exact nonzero map; it is a testing oracle and its
storage is flagged separately in space accounting.
"""

from __future__ import annotations

import math

import numpy as np

from .hashing import MERSENNE61, mulmod61

__all__ = ["SparseSketch", "DecodeFailure", "decode_or_none"]

_U64 = np.uint64
_M61 = _U64(MERSENNE61)
_FP_MIX_1 = _U64(0xBF58476D1CE4E5B9)
_FP_MIX_2 = _U64(0x94D049BB133111EB)


def _fingerprints(indices: np.ndarray, salt: np.uint64) -> np.ndarray:
    """64-bit mixed fingerprints (splitmix-style), seeded by `salt`."""
    x = indices.astype(_U64) + salt
    x = (x ^ (x >> _U64(30))) * _FP_MIX_1
    x = (x ^ (x >> _U64(27))) * _FP_MIX_2
    x = x ^ (x >> _U64(31))
    return x | _U64(1)  # odd, so value * fp never collapses to 0 mod 2^64


def _rows_for(delta: float) -> int:
    # The dominant decode failure is a pair of items colliding in every row,
    # ~ C(q,2)/width^rows, so rows grows with log(1/delta); 5..7 covers
    # desk-scale deltas with comfortable margin.
    return int(min(7, max(5, round(2.5 + 0.55 * math.log10(1.0 / max(delta, 1e-12))))))


class DecodeFailure(Exception):
    """Peeling stalled, a fingerprint mismatched, or more than q items survived."""


class SparseSketch:
    """q-sparse recovery sketch over an index domain of size `domain_size`.

    Final vector values must land in [0, value_bound]; intermediate updates may
    be any signed integers.
    """

    def __init__(
        self,
        q: int,
        domain_size: int,
        value_bound: int = 1,
        delta: float = 0.01,
        seed: int = 0,
        mode: str = "sketch",
    ):
        if q < 1:
            raise ValueError("q must be >= 1")
        if domain_size < 1:
            raise ValueError("domain_size must be >= 1")
        if mode not in ("sketch", "reference"):
            raise ValueError(f"unknown mode {mode!r}")
        self.q = q
        self.domain_size = domain_size
        self.value_bound = value_bound
        self.delta = delta
        self.seed = seed
        self.mode = mode
        if mode == "reference":
            self._exact: dict[int, int] = {}
            self.rows = 0
            self.width = 0
            return
        self.rows = _rows_for(delta)
        # ~4 cells per recoverable item split across rows; floor keeps tiny
        # sketches functional.
        self.width = max(4, int(math.ceil(4.0 * q / self.rows)) + 1)
        rng = np.random.default_rng(seed)
        self._c1 = rng.integers(0, MERSENNE61, size=self.rows, dtype=np.int64).astype(_U64)
        self._c0 = rng.integers(0, MERSENNE61, size=self.rows, dtype=np.int64).astype(_U64)
        self._fp_salt = _U64(int(rng.integers(1 << 62)))
        self._offsets = (np.arange(self.rows, dtype=np.int64) * self.width)[:, None]
        cells = self.rows * self.width
        self._count = np.zeros(cells, dtype=np.int64)
        self._isum = np.zeros(cells, dtype=np.int64)
        self._fsum = np.zeros(cells, dtype=_U64)

    def _cells(self, indices: np.ndarray) -> np.ndarray:
        """Flattened cell positions, shape (rows, len(indices))."""
        x = indices.astype(_U64)[None, :]
        acc = mulmod61(self._c1[:, None], x)
        acc += self._c0[:, None]
        acc = (acc >> _U64(61)) + (acc & _M61)
        acc = np.where(acc >= _M61, acc - _M61, acc)
        return (acc % _U64(self.width)).astype(np.int64) + self._offsets

    # -- updates ---------------------------------------------------------

    def update(self, index: int, delta: int) -> None:
        if not 0 <= index < self.domain_size:
            raise ValueError(f"index {index} outside domain")
        if self.mode == "reference":
            v = self._exact.get(index, 0) + delta
            if v:
                self._exact[index] = v
            else:
                self._exact.pop(index, None)
            return
        self.update_many(np.array([index], dtype=np.int64), np.array([delta], dtype=np.int64))

    def update_many(self, indices: np.ndarray, deltas: np.ndarray) -> None:
        """Apply a batch of signed updates (same linear map as repeated update)."""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            return
        dlt = np.asarray(deltas, dtype=np.int64)
        if self.mode == "reference":
            for i, d in zip(idx.tolist(), dlt.tolist()):
                v = self._exact.get(i, 0) + d
                if v:
                    self._exact[i] = v
                else:
                    self._exact.pop(i, None)
            return
        pos = self._cells(idx).ravel()
        np.add.at(self._count, pos, np.tile(dlt, self.rows))
        np.add.at(self._isum, pos, np.tile(idx * dlt, self.rows))
        np.add.at(self._fsum, pos, np.tile(_fingerprints(idx, self._fp_salt) * dlt.astype(_U64), self.rows))

    # -- decode ----------------------------------------------------------

    def decode(self) -> dict[int, int]:
        """Exact nonzero map of the underlying vector.

        Raises DecodeFailure when the vector is not recoverable as <= q sparse.
        Never returns a wrong vector: every candidate is cross-checked against
        its fingerprint and the fully-peeled tables must come back to zero.
        """
        if self.mode == "reference":
            if len(self._exact) > self.q:
                raise DecodeFailure(f"{len(self._exact)} nonzeros exceed q={self.q}")
            return dict(self._exact)
        count = self._count.copy()
        isum = self._isum.copy()
        fsum = self._fsum.copy()
        rec_idx: list[np.ndarray] = []
        rec_val: list[np.ndarray] = []
        recovered = 0
        # Peel in vectorized rounds: all verified pure cells across all rows
        # are subtracted at once; typically O(log support) rounds.  After the
        # first full scan only cells touched by a subtraction can become pure,
        # so later rounds visit just those.
        active: np.ndarray | None = None
        for _ in range(self.q + self.rows + 8):
            if active is None:
                flat = np.flatnonzero(count)
            else:
                flat = active[count[active] != 0]
            if flat.size == 0:
                break
            v = count[flat]
            s = isum[flat]
            ok = v > 0
            idx = np.zeros_like(s)
            np.floor_divide(s, v, out=idx, where=ok)
            ok &= idx * v == s
            ok &= (idx >= 0) & (idx < self.domain_size)
            ok &= _fingerprints(idx, self._fp_salt) * v.astype(_U64) == fsum[flat]
            if ok.any():
                # the pure cell must be where this row's hash puts the index
                sel = np.flatnonzero(ok)
                cand = idx[sel]
                home = self._cells(cand)
                row_of = flat[sel] // self.width
                ok[sel[home[row_of, np.arange(sel.size)] != flat[sel]]] = False
            if not ok.any():
                break
            cand_idx, first = np.unique(idx[ok], return_index=True)
            cand_val = v[ok][first]
            recovered += cand_idx.size
            if recovered > self.q:
                raise DecodeFailure(f"more than q={self.q} items recovered")
            rec_idx.append(cand_idx)
            rec_val.append(cand_val)
            pos = self._cells(cand_idx).ravel()
            np.add.at(count, pos, np.tile(-cand_val, self.rows))
            np.add.at(isum, pos, np.tile(-cand_idx * cand_val, self.rows))
            neg_fp = _U64(0) - _fingerprints(cand_idx, self._fp_salt) * cand_val.astype(_U64)
            np.add.at(fsum, pos, np.tile(neg_fp, self.rows))
            active = np.unique(pos)
        if count.any() or isum.any() or fsum.any():
            raise DecodeFailure("residue left after peeling")
        out: dict[int, int] = {}
        for ia, va in zip(rec_idx, rec_val):
            for i, v_ in zip(ia.tolist(), va.tolist()):
                if not 0 <= v_ <= self.value_bound:
                    raise DecodeFailure(f"recovered value {v_} outside [0, {self.value_bound}]")
                out[i] = v_
        return out

    def is_q_sparse(self) -> bool:
        """True iff the vector has <= q nonzeros, up to the delta failure budget."""
        try:
            self.decode()
            return True
        except DecodeFailure:
            return False

    # -- accounting ------------------------------------------------------

    def state_words(self) -> int:
        """Live 64-bit words held by the sketch (true stored size in reference mode)."""
        if self.mode == "reference":
            return 2 * len(self._exact) + 4
        return 3 * self.rows * self.width + 2 * self.rows + 8


def decode_or_none(s: SparseSketch) -> dict[int, int] | None:
    """Decode, mapping failure to None (callers treat failure as 'not sparse')."""
    try:
        return s.decode()
    except DecodeFailure:
        return None
