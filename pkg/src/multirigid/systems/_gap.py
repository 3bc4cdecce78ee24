"""Gap-pair language engine for constant-length substitutions.

``pairs(L1, L2, p)`` is the set of word pairs ``(y[0:L1], y[p:p+L2])`` over
all points y of the subshift.  Every y is ``sigma^t tau(z)`` with
``0 <= t < q`` and z in the subshift, so the pairs at gap p are images of
pairs at gap ``(p + t) // q`` for shorter words.  The recursion is run for a
whole range of gaps at once: per level, gaps sharing the same residue and
the same child pair-sets collapse to one key, and each key is resolved once.

Pair-sets are interned as integer ids, so a level is an int array over the
gap range.  Lengths shrink to at most 2 and gap ranges to a few values, at
which point the language itself is enumerated.
"""
from __future__ import annotations

from collections import OrderedDict

import numpy as np


class GapEngine:
    def __init__(self, system, base_span: int = 12, memo_cells: int = 1 << 27):
        self.system = system
        self.q = system.q
        self.base_span = base_span
        self.memo_cells = memo_cells
        # words and pair-sets are interned; a pair-set is a sorted int64 array of a << 32 | b
        self._words: list[str] = []
        self._word_ids: dict[str, int] = {}
        self._sets: list[np.ndarray] = []
        self._ids: dict[bytes, int] = {}
        self._memo: OrderedDict[tuple, np.ndarray] = OrderedDict()
        self._memo_size = 0
        self._combined: dict[tuple, int] = {}
        self._slices: dict[tuple, int] = {}

    # -- interning ---------------------------------------------------------------

    def _word(self, w: str) -> int:
        i = self._word_ids.get(w)
        if i is None:
            i = self._word_ids[w] = len(self._words)
            self._words.append(w)
        return i

    def _intern(self, packed: np.ndarray) -> int:
        packed = np.unique(packed.astype(np.int64))
        key = packed.tobytes()
        i = self._ids.get(key)
        if i is None:
            i = self._ids[key] = len(self._sets)
            packed.setflags(write=False)
            self._sets.append(packed)
        return i

    def pair_set(self, i: int) -> frozenset:
        return frozenset((self._words[int(v >> 32)], self._words[int(v & 0xFFFFFFFF)])
                         for v in self._sets[i])

    def _image_slice(self, ids: np.ndarray, start: int, length: int) -> np.ndarray:
        """Word ids of ``tau(w)[start:start+length]`` for each word id."""
        uniq, inv = np.unique(ids, return_inverse=True)
        vals = np.empty(len(uniq), dtype=np.int64)
        for k, i in enumerate(uniq.tolist()):
            key = (i, start, length)
            j = self._slices.get(key)
            if j is None:
                img = self.system.apply(self._words[i])
                j = self._slices[key] = self._word(img[start:start + length])
            vals[k] = j
        return vals[inv.ravel()]

    # -- recursion ---------------------------------------------------------------

    def pair_ids(self, L1: int, L2: int, lo: int, hi: int) -> np.ndarray:
        """Pair-set ids for gaps ``lo..hi``; the returned array must not be mutated."""
        key = (L1, L2, lo, hi)
        hit = self._memo.get(key)
        if hit is not None:
            self._memo.move_to_end(key)
            return hit
        if max(L1, hi + L2) - min(0, lo) <= self.base_span:
            out = self._base(L1, L2, lo, hi)
        else:
            out = self._recurse(L1, L2, lo, hi)
        out.setflags(write=False)
        self._memo[key] = out
        self._memo_size += out.size
        while self._memo_size > self.memo_cells and len(self._memo) > 1:
            _, old = self._memo.popitem(last=False)
            self._memo_size -= old.size
        return out

    def _base(self, L1, L2, lo, hi) -> np.ndarray:
        off = -min(0, lo)
        span = max(L1, hi + L2) + off
        words = self.system.legal_words(span)
        ids = []
        for p in range(lo, hi + 1):
            pairs = {(self._word(w[off:off + L1]) << 32) | self._word(w[off + p:off + p + L2]) for w in words}
            ids.append(self._intern(np.fromiter(pairs, dtype=np.int64, count=len(pairs))))
        return np.asarray(ids, dtype=np.int32)

    def _recurse(self, L1, L2, lo, hi) -> np.ndarray:
        q = self.q
        p = np.arange(lo, hi + 1, dtype=np.int64)
        clo, chi = lo // q, (hi + q - 1) // q
        a2_of_rho = np.array([(rho + L2 - 1) // q + 1 for rho in range(q)])
        cols = [p % q]
        for t in range(q):
            a1 = (t + L1 - 1) // q + 1
            shifted = p + t
            rho, pp = shifted % q, shifted // q - clo
            a2 = a2_of_rho[rho]
            child = np.empty(len(p), dtype=np.int64)
            for v in np.unique(a2):
                arr = self.pair_ids(a1, int(v), clo, chi)
                mask = a2 == v
                child[mask] = arr[pp[mask]]
            cols.append(child)
        # pack the key columns into one integer when it fits; 1-d unique is much faster
        radix = len(self._sets) + 1
        if (q * radix ** q).bit_length() < 63:
            packed = cols[0].copy()
            mult = q
            for c in cols[1:]:
                packed += c * mult
                mult *= radix
            _, first, inv = np.unique(packed, return_index=True, return_inverse=True)
            uniq = np.stack([c[first] for c in cols], axis=1)
        else:
            uniq, inv = np.unique(np.stack(cols, axis=1), axis=0, return_inverse=True)
        resolved = np.array([self._combine(L1, L2, tuple(int(k) for k in row)) for row in uniq],
                            dtype=np.int32)
        return resolved[inv.ravel()]

    def _combine(self, L1, L2, key) -> int:
        ck = (L1, L2) + key
        hit = self._combined.get(ck)
        if hit is not None:
            return hit
        q, r0 = self.q, key[0]
        parts = []
        for t in range(q):
            rho = (r0 + t) % q
            s = self._sets[key[1 + t]]
            a = self._image_slice(s >> 32, t, L1)
            b = self._image_slice(s & 0xFFFFFFFF, rho, L2)
            parts.append((a << 32) | b)
        i = self._combined[ck] = self._intern(np.concatenate(parts))
        return i

    # -- queries -----------------------------------------------------------------

    def followers(self, i: int, u: str) -> int:
        """Number of second words paired with ``u`` in pair-set ``i``."""
        j = self._word_ids.get(u)
        if j is None:
            return 0
        s = self._sets[i]
        return int(np.searchsorted(s, (j + 1) << 32) - np.searchsorted(s, j << 32))

    def counts(self, u: str, L2: int, ps: np.ndarray) -> np.ndarray:
        """Distinct length-L2 words at gap p after an occurrence of ``u``, per p."""
        ps = np.asarray(ps, dtype=np.int64)
        if ps.size == 0:
            return np.zeros(ps.shape, dtype=np.int64)
        lo, hi = int(ps.min()), int(ps.max())
        ids = self.pair_ids(len(u), L2, lo, hi)[ps - lo]
        uniq, inv = np.unique(ids, return_inverse=True)
        vals = np.array([self.followers(int(i), u) for i in uniq], dtype=np.int64)
        return vals[inv.ravel()].reshape(ps.shape)
