"""Schnorr signatures in (T, s) form with ``s = t + c*x``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .encoding import ChallengeOracle, DomainTag, Field, hash_to_scalar
from .group import (
    GroupElement,
    GroupParams,
    OpCounter,
    RandomSource,
    Scalar,
    mod_exp,
    mod_mul,
    random_scalar,
)


@dataclass(frozen=True)
class KeyPair:
    x: Scalar
    y: GroupElement

    @property
    def params(self) -> GroupParams:
        return self.y.params


@dataclass(frozen=True)
class SchnorrSignature:
    T: GroupElement
    s: Scalar


def keygen(rng: RandomSource, params: GroupParams, counter: OpCounter | None = None) -> KeyPair:
    x = random_scalar(rng, params)
    return KeyPair(x, mod_exp(params.generator, x, counter))


def keypair_from_secret(x: Scalar, counter: OpCounter | None = None) -> KeyPair:
    return KeyPair(x, mod_exp(x.params.generator, x, counter))


# challenge builders receive the commitment T and return the hash input fields
ChallengeFields = Callable[[GroupElement], Sequence[Field]]


def sign_with(x: Scalar, tag: DomainTag, fields: ChallengeFields, rng: RandomSource | None,
              counter: OpCounter | None = None, *, nonce: Scalar | None = None,
              oracle: ChallengeOracle | None = None) -> SchnorrSignature:
    """Schnorr signing core shared by the base and proxy schemes."""
    params = x.params
    t = nonce if nonce is not None else random_scalar(rng, params)
    T = mod_exp(params.generator, t, counter)
    c = hash_to_scalar(tag, fields(T), params, counter, oracle=oracle)
    return SchnorrSignature(T, t + c * x)


def verify_with(sig: SchnorrSignature, y: GroupElement, tag: DomainTag, fields: ChallengeFields,
                counter: OpCounter | None = None, *,
                oracle: ChallengeOracle | None = None) -> bool:
    params = y.params
    if sig.T.params != params or sig.s.params != params:
        return False
    if not sig.T.in_subgroup():
        return False
    c = hash_to_scalar(tag, fields(sig.T), params, counter, oracle=oracle)
    lhs = mod_exp(params.generator, sig.s, counter)
    rhs = mod_mul(sig.T, mod_exp(y, c, counter), counter)
    return lhs == rhs


def sign(m: bytes, key: KeyPair, rng: RandomSource | None, counter: OpCounter | None = None, *,
         nonce: Scalar | None = None, oracle: ChallengeOracle | None = None) -> SchnorrSignature:
    return sign_with(key.x, DomainTag.BASE_SIGN, lambda T: [m, T.value], rng, counter,
                     nonce=nonce, oracle=oracle)


def verify(m: bytes, sig: SchnorrSignature, y: GroupElement, counter: OpCounter | None = None, *,
           oracle: ChallengeOracle | None = None) -> bool:
    return verify_with(sig, y, DomainTag.BASE_SIGN, lambda T: [m, T.value], counter, oracle=oracle)
