"""Single-proxy partial delegation with warrant.

The original signer with key ``(x, y)`` publishes ``r = g^k`` and hands the
proxy ``s = x*e + k`` where ``e = h(m_w, r)``. Proxy signatures are Schnorr
signatures under ``s``, checked against the derived public key
``y' = y^e * r``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoding import ChallengeOracle, DomainTag, hash_to_scalar
from .errors import ConformanceError, InvalidDelegationError
from .group import (
    GroupElement,
    OpCounter,
    RandomSource,
    Scalar,
    mod_exp,
    mod_mul,
    random_scalar,
)
from .schnorr import SchnorrSignature, sign_with, verify_with
from .warrant import Warrant, check_conformance, encode_warrant


@dataclass(frozen=True)
class KimDelegation:
    warrant: Warrant
    s: Scalar
    r: GroupElement


@dataclass(frozen=True)
class KimProxySignature:
    warrant: Warrant
    r: GroupElement
    inner: SchnorrSignature


def delegation_challenge(warrant: Warrant, r: GroupElement, counter: OpCounter | None = None, *,
                         oracle: ChallengeOracle | None = None) -> Scalar:
    return hash_to_scalar(DomainTag.DELEGATION, [encode_warrant(warrant), r.value], r.params,
                          counter, oracle=oracle)


def kim_delegate(x: Scalar, warrant: Warrant, rng: RandomSource | None,
                 counter: OpCounter | None = None, *, nonce: Scalar | None = None,
                 oracle: ChallengeOracle | None = None) -> KimDelegation:
    params = x.params
    k = nonce if nonce is not None else random_scalar(rng, params)
    r = mod_exp(params.generator, k, counter)
    e = delegation_challenge(warrant, r, counter, oracle=oracle)
    return KimDelegation(warrant, x * e + k, r)


def kim_verify_delegation(d: KimDelegation, y: GroupElement, counter: OpCounter | None = None, *,
                          oracle: ChallengeOracle | None = None) -> bool:
    params = y.params
    if d.r.params != params or d.s.params != params or not d.r.in_subgroup():
        return False
    e = delegation_challenge(d.warrant, d.r, counter, oracle=oracle)
    lhs = mod_exp(params.generator, d.s, counter)
    return lhs == mod_mul(mod_exp(y, e, counter), d.r, counter)


def proxy_public_key(warrant: Warrant, r: GroupElement, y: GroupElement,
                     counter: OpCounter | None = None, *,
                     oracle: ChallengeOracle | None = None) -> GroupElement:
    """``y' = y^e * r``, the key proxy signatures verify against."""
    e = delegation_challenge(warrant, r, counter, oracle=oracle)
    return mod_mul(mod_exp(y, e, counter), r, counter)


def _kim_fields(m: bytes, warrant: Warrant, r: GroupElement):
    mw = encode_warrant(warrant)
    return lambda T: [m, mw, r.value, T.value]


def kim_proxy_sign(m: bytes, d: KimDelegation, y: GroupElement, rng: RandomSource | None,
                   counter: OpCounter | None = None, *, now: int,
                   nonce: Scalar | None = None,
                   oracle: ChallengeOracle | None = None) -> KimProxySignature:
    """Sign ``m`` on behalf of the holder of ``y``.

    Raises :class:`InvalidDelegationError` if the delegation does not check
    out against ``y`` and :class:`ConformanceError` if ``m`` is outside the
    warrant at time ``now``.
    """
    if not kim_verify_delegation(d, y, counter, oracle=oracle):
        raise InvalidDelegationError("delegation fails g^s == y^e * r")
    if not check_conformance(m, d.warrant, now):
        raise ConformanceError("message does not conform to the warrant")
    inner = sign_with(d.s, DomainTag.KIM_SIGN, _kim_fields(m, d.warrant, d.r), rng, counter,
                      nonce=nonce, oracle=oracle)
    return KimProxySignature(d.warrant, d.r, inner)


def kim_proxy_verify(m: bytes, sig: KimProxySignature, y: GroupElement,
                     counter: OpCounter | None = None, *, now: int,
                     oracle: ChallengeOracle | None = None) -> bool:
    if not check_conformance(m, sig.warrant, now):
        return False
    if sig.r.params != y.params or not sig.r.in_subgroup():
        return False
    y_proxy = proxy_public_key(sig.warrant, sig.r, y, counter, oracle=oracle)
    return verify_with(sig.inner, y_proxy, DomainTag.KIM_SIGN, _kim_fields(m, sig.warrant, sig.r),
                       counter, oracle=oracle)
