"""k-wise independent hash families realized as random polynomials over a prime field.

A degree-(k-1) polynomial with uniform coefficients over F_p, reduced into the
target range, gives exactly k-wise independent outputs on any k distinct points
of the field (up to the documented modular-reduction bias of at most
range_size / p).  State is k field elements plus four integer parameters,
independent of the domain size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KWiseHash",
    "mulmod61",
    "ParameterError",
    "sample_hash",
    "eval_unit_interval",
    "next_prime",
    "MERSENNE61",
    "UNIT_RANGE_BITS",
]

MERSENNE61 = (1 << 61) - 1
PRIME_CEILING = 1 << 62
# Auto-selected primes keep at least this much headroom over the range so the
# mod-range bias (<= range/p) stays below 2^-20.
_HEADROOM = 1 << 20
UNIT_RANGE_BITS = 40
UNIT_RANGE = 1 << UNIT_RANGE_BITS


class ParameterError(ValueError):
    """Raised when no admissible prime exists for the requested sizes."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    # Deterministic Miller-Rabin for n < 3.3e24 with the fixed base set.
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    c = max(n, 2)
    while not _is_prime(c):
        c += 1
    return c


_LOW32 = np.uint64(0xFFFFFFFF)
_M61 = np.uint64(MERSENNE61)


@dataclass(frozen=True)
class KWiseHash:
    """A member of a k-wise independent family from [domain_size] to [range_size]."""

    k: int
    domain_size: int
    range_size: int
    prime: int
    coefficients: tuple[int, ...]
    seed: int

    def eval(self, x: int) -> int:
        """Hash a single point (0 <= x < domain_size)."""
        if not 0 <= x < self.domain_size:
            raise ValueError(f"index {x} outside domain [0, {self.domain_size})")
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % self.prime
        return acc % self.range_size

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized eval; exact for the Mersenne prime, scalar fallback otherwise."""
        xs = np.asarray(xs, dtype=np.uint64)
        if self.prime == MERSENNE61:
            acc = np.zeros_like(xs)
            for c in reversed(self.coefficients):
                acc = mulmod61(acc, xs)
                acc += np.uint64(c)
                acc = (acc >> np.uint64(61)) + (acc & _M61)
                acc = np.where(acc >= _M61, acc - _M61, acc)
            return acc % np.uint64(self.range_size)
        return np.array([self.eval(int(x)) for x in xs], dtype=np.uint64)

    def eval_unit(self, x: int) -> float:
        """Map into [0, 1) with 2^40 buckets (threshold-comparison mode)."""
        if self.range_size != UNIT_RANGE:
            raise ValueError("unit-interval mode requires range_size = 2^40")
        return self.eval(x) / UNIT_RANGE

    def eval_unit_many(self, xs: np.ndarray) -> np.ndarray:
        if self.range_size != UNIT_RANGE:
            raise ValueError("unit-interval mode requires range_size = 2^40")
        return self.eval_many(xs).astype(np.float64) / float(UNIT_RANGE)

    def state_words(self) -> int:
        """Serialized size: k field elements plus 4 integer parameters."""
        return self.k + 4


def mulmod61(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise (a*b) mod (2^61 - 1) for uint64 arrays, both < 2^61."""
    a1 = a >> np.uint64(32)
    a0 = a & _LOW32
    b1 = b >> np.uint64(32)
    b0 = b & _LOW32
    hh = (a1 * b1) % _M61 * np.uint64(8)
    mid = a1 * b0 + a0 * b1
    mid = (mid >> np.uint64(29)) + ((mid & np.uint64((1 << 29) - 1)) << np.uint64(32))
    low = a0 * b0
    low = (low >> np.uint64(61)) + (low & _M61)
    t = hh % _M61 + mid % _M61 + low % _M61
    t = (t >> np.uint64(61)) + (t & _M61)
    t = (t >> np.uint64(61)) + (t & _M61)
    return np.where(t >= _M61, t - _M61, t)


def _pick_prime(domain_size: int, range_size: int) -> int:
    lo = max(domain_size, range_size)
    if lo * _HEADROOM <= MERSENNE61:
        return MERSENNE61
    if lo >= PRIME_CEILING:
        raise ParameterError(
            f"no admissible prime below 2^62 for domain {domain_size}, range {range_size}"
        )
    p = next_prime(lo)
    if p >= PRIME_CEILING:
        raise ParameterError(
            f"no admissible prime below 2^62 for domain {domain_size}, range {range_size}"
        )
    return p


def sample_hash(
    k: int,
    domain_size: int,
    range_size: int,
    seed: int,
    prime: int | None = None,
) -> KWiseHash:
    """Draw a hash from the k-wise independent family, deterministically from seed.

    The default prime is 2^61 - 1 when it leaves >= 2^20 headroom over
    max(domain, range) (bias <= 2^-20); otherwise the smallest admissible prime.
    Passing `prime` pins the field explicitly (e.g. prime == range_size gives an
    exactly uniform marginal).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if domain_size < 1 or range_size < 1:
        raise ValueError("domain_size and range_size must be >= 1")
    if prime is None:
        prime = _pick_prime(domain_size, range_size)
    else:
        if prime < max(domain_size, range_size):
            raise ParameterError("prime must be >= max(domain_size, range_size)")
        if prime >= PRIME_CEILING:
            raise ParameterError("prime above the 2^62 ceiling")
        if not _is_prime(prime):
            raise ParameterError(f"{prime} is not prime")
    rng = np.random.default_rng(seed)
    coeffs = tuple(int(c) for c in rng.integers(0, prime, size=k, dtype=np.int64))
    return KWiseHash(
        k=k,
        domain_size=domain_size,
        range_size=range_size,
        prime=prime,
        coefficients=coeffs,
        seed=seed,
    )


def eval_unit_interval(h: KWiseHash, index: int) -> float:
    """Functional form of KWiseHash.eval_unit for a single index."""
    return h.eval_unit(index)
