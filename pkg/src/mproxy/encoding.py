"""Canonical field encoding and domain-separated hashing into Z_q.

Layout of one field: 4-byte big-endian payload length, then the payload.
Integers are encoded as minimal big-endian bytes (zero has an empty
payload); byte strings are copied verbatim. A hash input is one tag byte
followed by the encoded fields, digested with SHA-256 and reduced mod q.
"""

from __future__ import annotations

import enum
import hashlib
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import InjectionForbiddenError
from .group import GroupElement, GroupParams, OpCounter, Scalar

Field = Union[int, bytes]


class DomainTag(enum.IntEnum):
    DELEGATION = 0x01
    MULTI_CHALLENGE = 0x02
    BASE_SIGN = 0x03
    KIM_SIGN = 0x04


ChallengeOracle = Callable[[DomainTag, Sequence[Field]], Optional[int]]


class ChallengeTable(dict):
    """Fixed challenge values keyed by tag, for known-answer tests.

    Tags missing from the table fall back to the real hash.
    """

    def __call__(self, tag: DomainTag, fields: Sequence[Field]) -> Optional[int]:
        return self.get(tag)


def _int_bytes(v: int) -> bytes:
    return v.to_bytes((v.bit_length() + 7) // 8, "big")


def encode_fields(fields: Iterable[Field]) -> bytes:
    out = bytearray()
    for f in fields:
        if isinstance(f, (GroupElement, Scalar)):
            f = f.value
        if isinstance(f, bool):
            raise TypeError("booleans are not encodable fields")
        if isinstance(f, int):
            if f < 0:
                raise ValueError("negative integers are not encodable")
            payload = _int_bytes(f)
        elif isinstance(f, (bytes, bytearray, memoryview)):
            payload = bytes(f)
        else:
            raise TypeError(f"cannot encode {type(f).__name__}")
        out += len(payload).to_bytes(4, "big")
        out += payload
    return bytes(out)


def hash_to_scalar(tag: DomainTag, fields: Sequence[Field], params: GroupParams,
                   counter: OpCounter | None = None, *,
                   oracle: ChallengeOracle | None = None) -> Scalar:
    """Hash ``tag || encode_fields(fields)`` into Z_q; counts one H.

    ``oracle`` may stipulate the result for test-mode groups only.
    """
    tag = DomainTag(tag)
    if counter is not None:
        counter.H += 1
    if oracle is not None:
        if not params.test_mode:
            raise InjectionForbiddenError("challenge injection requires test-mode parameters")
        injected = oracle(tag, fields)
        if injected is not None:
            return Scalar(injected % params.q, params)
    digest = hashlib.sha256(bytes([tag]) + encode_fields(fields)).digest()
    return Scalar(int.from_bytes(digest, "big") % params.q, params)
