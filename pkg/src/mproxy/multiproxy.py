"""Multi-proxy signatures: one original signer, ``n`` jointly signing proxies.

Delegation. The original signer (secret ``x0``) draws ``k_i``, publishes
``r_i = g^k_i`` and ``r = prod r_i``, sets ``e = h(m_w, r)`` and gives proxy
``i`` the share ``sigma_i = x0*e + k_i``, checkable as
``g^sigma_i == y0^e * r_i``.

Signing keys. Proxy ``i`` folds in its own secret: ``d_i = sigma_i + e*x_i``
with public counterpart ``V_i = y0^e * r_i * y_i^e``. Because every ``d_i``
needs the matching ``x_i``, each partial signature is attributable.

Signing is a two-round Schnorr multisignature run by a clerk
(:class:`SigningSession`): commitments ``T_i = g^t_i``, a joint challenge
``c = h(m, m_w, r, T)`` over ``T = prod T_i``, responses
``s_i = t_i + c*d_i``. The clerk checks each partial against ``V_i`` and
outputs ``(m_w, r, T, s = sum s_i)``.

Verification recomputes the group key
``Y = y0^(n*e) * (prod y_i)^e * r`` (equal to ``prod V_i``) and checks
``g^s == T * Y^c``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .encoding import ChallengeOracle, DomainTag, hash_to_scalar
from .errors import (
    ConformanceError,
    DuplicateContributionError,
    MismatchedParamsError,
    MissingCommitmentError,
    PhaseError,
    SelfCheckError,
    SessionAbortedError,
    ShareInvalidError,
)
from .group import (
    GroupElement,
    GroupParams,
    OpCounter,
    RandomSource,
    Scalar,
    mod_exp,
    mod_mul,
    product,
    random_scalar,
)
from .kim import delegation_challenge
from .warrant import Warrant, check_conformance, encode_warrant


@dataclass(frozen=True)
class MultiDelegationRecord:
    """Public delegation data: the warrant, ``r`` and every ``r_i``."""

    warrant: Warrant
    r: GroupElement
    r_list: tuple[GroupElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "r_list", tuple(self.r_list))
        if len(self.r_list) != self.warrant.n:
            raise ValueError(
                f"record has {len(self.r_list)} commitments for {self.warrant.n} proxies"
            )

    @property
    def params(self) -> GroupParams:
        return self.r.params

    @property
    def n(self) -> int:
        return self.warrant.n


@dataclass(frozen=True)
class DelegationShare:
    index: int  # 1-based, aligned with warrant.proxy_ids
    sigma: Scalar
    record: MultiDelegationRecord

    def __post_init__(self):
        if not 1 <= self.index <= self.record.n:
            raise ValueError(f"share index {self.index} outside 1..{self.record.n}")


@dataclass(frozen=True)
class ProxySigningKey:
    index: int
    d: Scalar
    V: GroupElement


@dataclass(frozen=True)
class MultiProxySignature:
    warrant: Warrant
    r: GroupElement
    T: GroupElement
    s: Scalar


def multi_delegate(x0: Scalar, warrant: Warrant, rng: RandomSource | None,
                   counter: OpCounter | None = None, *,
                   nonces: Sequence[Scalar] | None = None,
                   oracle: ChallengeOracle | None = None,
                   ) -> tuple[list[DelegationShare], MultiDelegationRecord]:
    params = x0.params
    if nonces is None:
        nonces = [random_scalar(rng, params) for _ in range(warrant.n)]
    elif len(nonces) != warrant.n:
        raise ValueError(f"expected {warrant.n} nonces, got {len(nonces)}")
    g = params.generator
    r_list = [mod_exp(g, k, counter) for k in nonces]
    r = product(r_list, counter)
    e = delegation_challenge(warrant, r, counter, oracle=oracle)
    record = MultiDelegationRecord(warrant, r, tuple(r_list))
    shares = [DelegationShare(i, x0 * e + k, record) for i, k in enumerate(nonces, 1)]
    return shares, record


def record_consistent(record: MultiDelegationRecord) -> bool:
    """Structural check of public data: membership and ``r == prod r_i``.

    Validation of public inputs is not protocol arithmetic and is not counted.
    """
    params = record.params
    acc = 1
    for ri in record.r_list:
        if ri.params != params or not ri.in_subgroup():
            return False
        acc = acc * ri.value % params.p
    return record.r.in_subgroup() and acc == record.r.value


def _check_share(share: DelegationShare, y0: GroupElement, counter, oracle):
    record = share.record
    if record.params != y0.params or share.sigma.params != y0.params:
        return None
    if not record_consistent(record):
        return None
    e = delegation_challenge(record.warrant, record.r, counter, oracle=oracle)
    y0e = mod_exp(y0, e, counter)
    lhs = mod_exp(y0.params.generator, share.sigma, counter)
    if lhs != mod_mul(y0e, record.r_list[share.index - 1], counter):
        return None
    return e, y0e


def verify_share(share: DelegationShare, y0: GroupElement, counter: OpCounter | None = None, *,
                 oracle: ChallengeOracle | None = None) -> bool:
    return _check_share(share, y0, counter, oracle) is not None


def derive_signing_key(share: DelegationShare, x_i: Scalar, y0: GroupElement, y_i: GroupElement,
                       counter: OpCounter | None = None, *,
                       oracle: ChallengeOracle | None = None) -> ProxySigningKey:
    """Verify ``share`` and combine it with the proxy's own secret ``x_i``."""
    checked = _check_share(share, y0, counter, oracle)
    if checked is None:
        raise ShareInvalidError(f"delegation share {share.index} rejected")
    e, y0e = checked
    params = y0.params
    d = share.sigma + e * x_i
    V = mod_mul(mod_mul(y0e, share.record.r_list[share.index - 1], counter),
                mod_exp(y_i, e, counter), counter)
    if mod_exp(params.generator, d, counter) != V:
        raise SelfCheckError(f"g^d != V for proxy {share.index}; does x_i match y_i?")
    return ProxySigningKey(share.index, d, V)


def aggregate_public_keys(y_list: Sequence[GroupElement]) -> GroupElement:
    """``prod y_i``: a per-group constant, computed outside the op count."""
    if not y_list:
        raise ValueError("empty proxy key list")
    params = y_list[0].params
    acc = 1
    for y in y_list:
        if y.params != params:
            raise MismatchedParamsError("proxy keys from different groups")
        acc = acc * y.value % params.p
    return GroupElement(acc, params)


def group_proxy_key(record: MultiDelegationRecord, y0: GroupElement,
                    y_list: Sequence[GroupElement], counter: OpCounter | None = None, *,
                    oracle: ChallengeOracle | None = None) -> GroupElement:
    """``Y = y0^(n*e) * (prod y_i)^e * r``."""
    if len(y_list) != record.n:
        raise ValueError(f"{len(y_list)} proxy keys for {record.n} proxies")
    e = delegation_challenge(record.warrant, record.r, counter, oracle=oracle)
    agg = aggregate_public_keys(y_list)
    head = mod_mul(mod_exp(y0, e * record.n, counter), mod_exp(agg, e, counter), counter)
    return mod_mul(head, record.r, counter)


def partial_verification_keys(record: MultiDelegationRecord, y0: GroupElement,
                              y_list: Sequence[GroupElement], counter: OpCounter | None = None,
                              *, oracle: ChallengeOracle | None = None) -> list[GroupElement]:
    """Every ``V_i = y0^e * r_i * y_i^e``, from public data only."""
    if len(y_list) != record.n:
        raise ValueError(f"{len(y_list)} proxy keys for {record.n} proxies")
    e = delegation_challenge(record.warrant, record.r, counter, oracle=oracle)
    y0e = mod_exp(y0, e, counter)
    return [
        mod_mul(mod_mul(y0e, ri, counter), mod_exp(yi, e, counter), counter)
        for ri, yi in zip(record.r_list, y_list)
    ]


def round1_commit(params: GroupParams, rng: RandomSource | None, counter: OpCounter | None = None,
                  *, nonce: Scalar | None = None) -> tuple[Scalar, GroupElement]:
    t = nonce if nonce is not None else random_scalar(rng, params)
    return t, mod_exp(params.generator, t, counter)


def _challenge_fields(m: bytes, record: MultiDelegationRecord, T: GroupElement):
    return [m, encode_warrant(record.warrant), record.r.value, T.value]


def session_challenge(m: bytes, record: MultiDelegationRecord,
                      commitments: Union[Mapping[int, GroupElement], Sequence[GroupElement]],
                      counter: OpCounter | None = None, *,
                      oracle: ChallengeOracle | None = None) -> tuple[GroupElement, Scalar]:
    """Joint commitment ``T = prod T_i`` and challenge ``c``.

    ``commitments`` maps 1-based indices to ``T_i``; a plain sequence is
    read as indices ``1..len``.
    """
    if not isinstance(commitments, Mapping):
        commitments = dict(enumerate(commitments, 1))
    missing = set(range(1, record.n + 1)) - set(commitments)
    if missing:
        raise MissingCommitmentError(missing)
    T = product(commitments.values(), counter)
    c = hash_to_scalar(DomainTag.MULTI_CHALLENGE, _challenge_fields(m, record, T), record.params,
                       counter, oracle=oracle)
    return T, c


def round2_respond(t_i: Scalar, d_i: Scalar, c: Scalar) -> Scalar:
    return t_i + c * d_i


def verify_partial(s_i: Scalar, T_i: GroupElement, V_i: GroupElement, c: Scalar,
                   counter: OpCounter | None = None) -> bool:
    params = V_i.params
    lhs = mod_exp(params.generator, s_i, counter)
    return lhs == mod_mul(T_i, mod_exp(V_i, c, counter), counter)


class Phase(enum.Enum):
    COLLECT_COMMITMENTS = "collect-commitments"
    COLLECT_RESPONSES = "collect-responses"
    DONE = "done"
    ABORTED = "aborted"


class SigningSession:
    """Clerk-side state for one joint signature.

    Commitments and responses may arrive in any order, one per index. The
    challenge is fixed as soon as the last commitment arrives. Any bad
    contribution aborts the session and records the offending indices in
    ``blame``; an aborted session is never resumed.
    """

    def __init__(self, m: bytes, record: MultiDelegationRecord, y0: GroupElement,
                 y_list: Sequence[GroupElement], counter: OpCounter | None = None, *,
                 now: int | None = None, oracle: ChallengeOracle | None = None):
        if now is not None and not check_conformance(m, record.warrant, now):
            raise ConformanceError("message does not conform to the warrant")
        self.message = m
        self.record = record
        self.counter = counter
        self.oracle = oracle
        self.phase = Phase.COLLECT_COMMITMENTS
        self.commitments: dict[int, GroupElement] = {}
        self.responses: dict[int, Scalar] = {}
        self.T: GroupElement | None = None
        self.challenge: Scalar | None = None
        self.blame: frozenset[int] = frozenset()
        self._V = partial_verification_keys(record, y0, y_list, counter, oracle=oracle)

    @property
    def n(self) -> int:
        return self.record.n

    def _check_index(self, index: int, seen: Mapping) -> None:
        if not 1 <= index <= self.n:
            raise ValueError(f"index {index} outside 1..{self.n}")
        if index in seen:
            raise DuplicateContributionError(f"second contribution from index {index}")

    def _abort(self, blame) -> None:
        self.phase = Phase.ABORTED
        self.blame = frozenset(blame)
        raise SessionAbortedError(self.blame)

    def add_commitment(self, index: int, T_i: GroupElement) -> None:
        if self.phase is not Phase.COLLECT_COMMITMENTS:
            raise PhaseError(f"commitments are closed (phase {self.phase.value})")
        self._check_index(index, self.commitments)
        if T_i.params != self.record.params or not T_i.in_subgroup():
            self._abort({index})
        self.commitments[index] = T_i
        if len(self.commitments) == self.n:
            self.T, self.challenge = session_challenge(
                self.message, self.record, self.commitments, self.counter, oracle=self.oracle
            )
            self.phase = Phase.COLLECT_RESPONSES

    def add_response(self, index: int, s_i: Scalar) -> None:
        if self.phase is not Phase.COLLECT_RESPONSES:
            raise PhaseError(f"responses not accepted in phase {self.phase.value}")
        self._check_index(index, self.responses)
        self.responses[index] = s_i

    def aggregate(self) -> MultiProxySignature:
        if self.phase is not Phase.COLLECT_RESPONSES:
            raise PhaseError(f"cannot aggregate in phase {self.phase.value}")
        missing = set(range(1, self.n + 1)) - set(self.responses)
        if missing:
            raise PhaseError("missing response(s) for index " + ", ".join(map(str, sorted(missing))))
        bad = set()
        for i in range(1, self.n + 1):
            s_i = self.responses[i]
            if s_i.params != self.record.params or not verify_partial(
                s_i, self.commitments[i], self._V[i - 1], self.challenge, self.counter
            ):
                bad.add(i)
        if bad:
            self._abort(bad)
        s = sum((self.responses[i] for i in range(2, self.n + 1)), self.responses[1])
        self.phase = Phase.DONE
        return MultiProxySignature(self.record.warrant, self.record.r, self.T, s)


def aggregate(session: SigningSession) -> MultiProxySignature:
    return session.aggregate()


def simulate_session(m: bytes, record: MultiDelegationRecord, keys: Sequence[ProxySigningKey],
                     y0: GroupElement, y_list: Sequence[GroupElement], rng: RandomSource | None,
                     counter: OpCounter | None = None, *, now: int | None = None,
                     nonces: Sequence[Scalar] | None = None, order: Sequence[int] | None = None,
                     oracle: ChallengeOracle | None = None) -> MultiProxySignature:
    """Run both rounds for all ``keys`` in one process.

    ``order`` permutes the arrival order of contributions (positions into
    ``keys``); ``nonces`` fixes each proxy's ``t_i``.
    """
    params = record.params
    session = SigningSession(m, record, y0, y_list, counter, now=now, oracle=oracle)
    order = list(order) if order is not None else list(range(len(keys)))
    secrets_t = {}
    for pos in order:
        key = keys[pos]
        t, T_i = round1_commit(params, rng, counter,
                               nonce=None if nonces is None else nonces[pos])
        secrets_t[key.index] = t
        session.add_commitment(key.index, T_i)
    for pos in order:
        key = keys[pos]
        session.add_response(key.index, round2_respond(secrets_t[key.index], key.d, session.challenge))
    return session.aggregate()


def verify_multiproxy(m: bytes, sig: MultiProxySignature, y0: GroupElement,
                      y_list: Sequence[GroupElement], counter: OpCounter | None = None, *,
                      now: int, oracle: ChallengeOracle | None = None) -> bool:
    if not check_conformance(m, sig.warrant, now):
        return False
    params = y0.params
    if len(y_list) != sig.warrant.n:
        return False
    for el in (sig.r, sig.T, y0, *y_list):
        if el.params != params or not el.in_subgroup():
            return False
    if sig.s.params != params:
        return False
    record = _SignatureView(sig.warrant, sig.r)
    Y = group_proxy_key(record, y0, y_list, counter, oracle=oracle)
    c = hash_to_scalar(DomainTag.MULTI_CHALLENGE, _challenge_fields(m, record, sig.T), params,
                       counter, oracle=oracle)
    lhs = mod_exp(params.generator, sig.s, counter)
    return lhs == mod_mul(sig.T, mod_exp(Y, c, counter), counter)


@dataclass(frozen=True)
class _SignatureView:
    # the slice of a record a verifier sees: r travels without the r_i
    warrant: Warrant
    r: GroupElement

    @property
    def params(self) -> GroupParams:
        return self.r.params

    @property
    def n(self) -> int:
        return self.warrant.n
