"""Delegation warrants: who may sign, for whom, what, and when."""

from __future__ import annotations

from dataclasses import dataclass, field

from .encoding import encode_fields
from .errors import WarrantError


@dataclass(frozen=True)
class Warrant:
    """Public delegation statement.

    Messages are in scope when they start with ``message_prefix`` (empty
    means unrestricted) and are checked at a time in
    ``[valid_from, valid_to]``, both inclusive, in epoch seconds.
    """

    original_id: bytes
    proxy_ids: tuple[bytes, ...]
    valid_from: int
    valid_to: int
    message_prefix: bytes = field(default=b"")

    def __post_init__(self):
        object.__setattr__(self, "proxy_ids", tuple(bytes(p) for p in self.proxy_ids))
        self.validate()

    @property
    def n(self) -> int:
        return len(self.proxy_ids)

    def validate(self) -> None:
        if not self.proxy_ids:
            raise WarrantError("warrant names no proxy signers")
        if len(set(self.proxy_ids)) != len(self.proxy_ids):
            raise WarrantError("proxy ids must be pairwise distinct")
        if self.valid_from < 0 or self.valid_to < 0:
            raise WarrantError("validity bounds must be non-negative")
        if self.valid_from > self.valid_to:
            raise WarrantError("valid_from is after valid_to")


def encode_warrant(w: Warrant) -> bytes:
    w.validate()
    # the proxy count precedes the ids so the variable-length list stays injective
    return encode_fields(
        [w.original_id, w.n, *w.proxy_ids, w.valid_from, w.valid_to, w.message_prefix]
    )


def check_conformance(m: bytes, w: Warrant, now: int) -> bool:
    return m.startswith(w.message_prefix) and w.valid_from <= now <= w.valid_to
