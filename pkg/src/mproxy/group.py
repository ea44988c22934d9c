"""Schnorr groups and instrumented modular arithmetic.

All protocol values live either in the order-``q`` subgroup of Z_p*
(:class:`GroupElement`) or in Z_q (:class:`Scalar`). Exponentiations,
multiplications and inversions in Z_p* go through :func:`mod_exp`,
:func:`mod_mul` and :func:`mod_inv`, which tick an :class:`OpCounter`.
Arithmetic in Z_q is not counted.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Protocol, Union

from .errors import (
    MismatchedParamsError,
    NotInvertibleError,
    ParamsError,
    SearchExhaustedError,
)

MR_ROUNDS = 64
SEARCH_BUDGET = 100_000

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
)


class RandomSource(Protocol):
    def randbytes(self, n: int) -> bytes: ...


def _randbits(rng: RandomSource, bits: int) -> int:
    nbytes = (bits + 7) // 8
    return int.from_bytes(rng.randbytes(nbytes), "big") & ((1 << bits) - 1)


def randbelow(rng: RandomSource, n: int) -> int:
    """Uniform integer in [0, n) by rejection sampling."""
    if n <= 0:
        raise ValueError("upper bound must be positive")
    bits = max(1, (n - 1).bit_length())
    while True:
        v = _randbits(rng, bits)
        if v < n:
            return v


def is_probable_prime(n: int, rounds: int = MR_ROUNDS, rng: RandomSource | None = None) -> bool:
    """Miller-Rabin test; error probability at most 4**-rounds."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    if rng is None:
        rng = secrets.SystemRandom()
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = 2 + randbelow(rng, n - 3)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GroupParams:
    """A Schnorr group: ``g`` generates the order-``q`` subgroup of Z_p*.

    ``test_mode`` marks toy parameters; only those accept injected
    challenge values (see :mod:`mproxy.encoding`).
    """

    p: int
    q: int
    g: int
    p_bits: int = field(default=0, compare=False)
    q_bits: int = field(default=0, compare=False)
    test_mode: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.p_bits:
            object.__setattr__(self, "p_bits", self.p.bit_length())
        if not self.q_bits:
            object.__setattr__(self, "q_bits", self.q.bit_length())

    @property
    def generator(self) -> GroupElement:
        return GroupElement(self.g, self)

    def element(self, value: int) -> GroupElement:
        """Wrap an untrusted integer, enforcing subgroup membership."""
        el = GroupElement(value, self)
        if not el.in_subgroup():
            raise ParamsError(f"{value:#x} is not in the order-q subgroup")
        return el

    def scalar(self, value: int) -> Scalar:
        return Scalar(value, self)

    def is_member(self, value: int) -> bool:
        return 1 <= value < self.p and pow(value, self.q, self.p) == 1


TOY_PARAMS = GroupParams(p=23, q=11, g=2, test_mode=True)


@dataclass(frozen=True)
class Scalar:
    value: int
    params: GroupParams = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.value < self.params.q:
            raise ParamsError(f"scalar {self.value} outside [0, q)")

    def _other(self, other) -> int:
        if isinstance(other, Scalar):
            if other.params != self.params:
                raise MismatchedParamsError("scalars from different groups")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Scalar((self.value + o) % self.params.q, self.params)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Scalar((self.value - o) % self.params.q, self.params)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Scalar(self.value * o % self.params.q, self.params)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.value % self.params.q, self.params)

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class GroupElement:
    value: int
    params: GroupParams = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.value < self.params.p:
            raise ParamsError(f"group element {self.value} outside [1, p)")

    def in_subgroup(self) -> bool:
        return self.params.is_member(self.value)

    def __int__(self):
        return self.value


@dataclass
class OpCounter:
    """Running totals of exponentiations, multiplications, inversions, hashes."""

    E: int = 0
    M: int = 0
    I: int = 0  # noqa: E741
    H: int = 0

    def snapshot(self) -> OpCounter:
        return OpCounter(self.E, self.M, self.I, self.H)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.E, self.M, self.I, self.H)

    def __sub__(self, other: OpCounter) -> OpCounter:
        return OpCounter(self.E - other.E, self.M - other.M, self.I - other.I, self.H - other.H)

    def __str__(self):
        return f"{self.E}E+{self.M}M+{self.I}I+{self.H}H"


def _same_params(a: GroupElement, b) -> None:
    if a.params != b.params:
        raise MismatchedParamsError("operands belong to different groups")


def mod_exp(base: GroupElement, exponent: Union[Scalar, int], counter: OpCounter | None = None) -> GroupElement:
    """``base ** exponent mod p``; counts one E whatever the exponent size.

    Negative integer exponents are reduced mod q (``g^-e == g^(q-e)`` in the
    subgroup), so no inversion is spent.
    """
    if isinstance(exponent, Scalar):
        _same_params(base, exponent)
        e = exponent.value
    else:
        e = exponent if exponent >= 0 else exponent % base.params.q
    if counter is not None:
        counter.E += 1
    return GroupElement(pow(base.value, e, base.params.p), base.params)


def mod_mul(a: GroupElement, b: GroupElement, counter: OpCounter | None = None) -> GroupElement:
    _same_params(a, b)
    if counter is not None:
        counter.M += 1
    return GroupElement(a.value * b.value % a.params.p, a.params)


def mod_inv(a: GroupElement, counter: OpCounter | None = None) -> GroupElement:
    p = a.params.p
    if a.value % p == 0:
        raise NotInvertibleError("zero has no inverse mod p")
    if counter is not None:
        counter.I += 1
    return GroupElement(pow(a.value, -1, p), a.params)


def product(elements, counter: OpCounter | None = None) -> GroupElement:
    """Left fold of :func:`mod_mul`; ``len - 1`` multiplications."""
    it = iter(elements)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("product of an empty sequence") from None
    for el in it:
        acc = mod_mul(acc, el, counter)
    return acc


def random_scalar(rng: RandomSource, params: GroupParams) -> Scalar:
    """Uniform scalar in [2, q); 0 and 1 are never returned."""
    if params.q < 3:
        raise ParamsError("q must be at least 3")
    return Scalar(2 + randbelow(rng, params.q - 2), params)


def validate_params(params: GroupParams, rng: RandomSource | None = None) -> bool:
    p, q, g = params.p, params.q, params.g
    try:
        if q < 3 or p <= q:
            return False
        if (p - 1) % q:
            return False
        if not (1 < g < p) or pow(g, q, p) != 1:
            return False
        return is_probable_prime(q, rng=rng) and is_probable_prime(p, rng=rng)
    except (TypeError, ValueError):
        return False


def _random_prime(rng: RandomSource, bits: int) -> int:
    if bits < 2:
        raise ParamsError("prime size must be at least 2 bits")
    while True:
        n = _randbits(rng, bits) | (1 << (bits - 1)) | 1
        if n.bit_length() == bits and is_probable_prime(n, rng=rng):
            return n


def generate_params(q_bits: int, p_bits: int, rng: RandomSource, *, toy: bool = False,
                    budget: int = SEARCH_BUDGET) -> GroupParams:
    """Generate a Schnorr group with a ``q_bits`` order and ``p_bits`` modulus.

    ``p`` is searched as ``q*t + 1`` over even cofactors ``t``; ``budget``
    bounds the total number of cofactors tried. ``toy=True`` lifts the
    8-bit floor on ``q`` and marks the result as test parameters.
    """
    if q_bits < (2 if toy else 8):
        raise ParamsError(f"q_bits={q_bits} is too small")
    if p_bits <= q_bits:
        raise ParamsError(f"p_bits={p_bits} must exceed q_bits={q_bits}")

    tried = 0
    while tried < budget:
        q = _random_prime(rng, q_bits)
        # even t keeps p odd; p must have exactly p_bits bits
        t_lo = -(-(1 << (p_bits - 1)) // q)
        t_hi = ((1 << p_bits) - 2) // q
        t_lo += t_lo % 2
        t_hi -= t_hi % 2
        if t_lo > t_hi:
            tried += 1
            continue
        n_t = (t_hi - t_lo) // 2 + 1
        if n_t <= 64:
            cands = [t_lo + 2 * j for j in range(n_t)]
        else:
            cands = (t_lo + 2 * randbelow(rng, n_t) for _ in range(min(n_t, budget - tried)))
        for t in cands:
            tried += 1
            p = q * t + 1
            if is_probable_prime(p, rounds=1, rng=rng) and is_probable_prime(p, rng=rng):
                while True:
                    u = 2 + randbelow(rng, p - 3)
                    g = pow(u, t, p)
                    if g != 1:
                        return GroupParams(p, q, g, p_bits, q_bits, test_mode=toy)
            if tried >= budget:
                break
    raise SearchExhaustedError(f"no group found within {budget} candidates")
