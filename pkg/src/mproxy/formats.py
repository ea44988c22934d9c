"""Labeled-line value files.

Every file is a sequence of ``label=value`` lines terminated by ``\\n``.
Group elements and scalars are lowercase big-endian hex without leading
zeros; byte strings (ids, prefixes) are lowercase hex of their bytes;
indices and times are decimal. Files compose: a share file is a record
file with extra lines, so readers ignore labels they do not need.
"""

from __future__ import annotations

import re

from .errors import FormatError, ParamsError, WarrantError
from .group import GroupElement, GroupParams, Scalar, mod_exp, validate_params
from .kim import KimDelegation, KimProxySignature
from .multiproxy import (
    DelegationShare,
    MultiDelegationRecord,
    MultiProxySignature,
    ProxySigningKey,
)
from .schnorr import KeyPair, SchnorrSignature
from .warrant import Warrant

_HEX_INT = re.compile(r"0|[1-9a-f][0-9a-f]*")
_HEX_BYTES = re.compile(r"(?:[0-9a-f]{2})*")
_DEC = re.compile(r"0|[1-9][0-9]*")
_LABEL = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


class Fields(dict):
    """Parsed labels with typed accessors that raise :class:`FormatError`."""

    def _raw(self, key: str) -> str:
        try:
            return self[key]
        except KeyError:
            raise FormatError(f"missing field {key!r}") from None

    def hex_int(self, key: str) -> int:
        v = self._raw(key)
        if not _HEX_INT.fullmatch(v):
            raise FormatError(f"field {key!r}: {v!r} is not canonical lowercase hex")
        return int(v, 16)

    def hex_bytes(self, key: str) -> bytes:
        v = self._raw(key)
        if not _HEX_BYTES.fullmatch(v):
            raise FormatError(f"field {key!r}: {v!r} is not a hex byte string")
        return bytes.fromhex(v)

    def dec_int(self, key: str) -> int:
        v = self._raw(key)
        if not _DEC.fullmatch(v):
            raise FormatError(f"field {key!r}: {v!r} is not a decimal integer")
        return int(v)

    def scalar(self, key: str, params: GroupParams) -> Scalar:
        v = self.hex_int(key)
        if v >= params.q:
            raise FormatError(f"field {key!r}: value is not below q")
        return Scalar(v, params)

    def element(self, key: str, params: GroupParams) -> GroupElement:
        v = self.hex_int(key)
        if not params.is_member(v):
            raise FormatError(f"field {key!r}: value is not in the order-q subgroup")
        return GroupElement(v, params)

    def indexed(self, stem: str) -> list[str]:
        """Labels ``stem.1 .. stem.N``, which must be contiguous."""
        found = sorted(int(k[len(stem) + 1:]) for k in self
                       if k.startswith(stem + ".") and k[len(stem) + 1:].isdigit())
        if found != list(range(1, len(found) + 1)):
            raise FormatError(f"{stem}.N labels are not numbered 1..N")
        return [f"{stem}.{i}" for i in found]


def parse(text: str) -> Fields:
    out = Fields()
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        label, sep, value = line.partition("=")
        if not sep or not _LABEL.fullmatch(label):
            raise FormatError(f"line {lineno}: expected label=value")
        if label in out:
            raise FormatError(f"line {lineno}: duplicate label {label!r}")
        out[label] = value.strip()
    return out


def render(pairs) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs)


def _h(v) -> str:
    return format(int(v), "x")


def _expect_scheme(f: Fields, scheme: str) -> None:
    got = f._raw("scheme")
    if got != scheme:
        raise FormatError(f"expected scheme={scheme}, found scheme={got}")


# parameters and keys

def params_lines(params: GroupParams):
    return [("p", _h(params.p)), ("q", _h(params.q)), ("g", _h(params.g))]


def read_params(text: str) -> GroupParams:
    f = parse(text)
    return GroupParams(f.hex_int("p"), f.hex_int("q"), f.hex_int("g"))


def key_lines(y: GroupElement, x: Scalar | None = None, ident: bytes | None = None):
    lines = []
    if ident is not None:
        lines.append(("id", ident.hex()))
    if x is not None:
        lines.append(("x", _h(x)))
    lines.append(("y", _h(y)))
    return lines


def read_key(text: str, params: GroupParams) -> tuple[Scalar | None, GroupElement]:
    """Return ``(x, y)``; ``x`` is ``None`` for public-key files."""
    f = parse(text)
    y = f.element("y", params)
    x = f.scalar("x", params) if "x" in f else None
    if x is not None and mod_exp(params.generator, x) != y:
        raise FormatError("key file: y does not match x")
    return x, y


def read_keypair(text: str, params: GroupParams) -> KeyPair:
    x, y = read_key(text, params)
    if x is None:
        raise FormatError("key file holds no secret x")
    return KeyPair(x, y)


# warrants

def warrant_lines(w: Warrant):
    lines = [("original_id", w.original_id.hex())]
    lines += [(f"proxy_id.{i}", pid.hex()) for i, pid in enumerate(w.proxy_ids, 1)]
    lines += [("valid_from", str(w.valid_from)), ("valid_to", str(w.valid_to)),
              ("message_prefix", w.message_prefix.hex())]
    return lines


def warrant_from(f: Fields) -> Warrant:
    try:
        return Warrant(
            f.hex_bytes("original_id"),
            tuple(f.hex_bytes(k) for k in f.indexed("proxy_id")),
            f.dec_int("valid_from"),
            f.dec_int("valid_to"),
            f.hex_bytes("message_prefix"),
        )
    except WarrantError as exc:
        raise FormatError(f"warrant: {exc}") from exc


def read_warrant(text: str) -> Warrant:
    return warrant_from(parse(text))


# base and single-proxy signatures

def schnorr_lines(sig: SchnorrSignature):
    return [("scheme", "schnorr"), ("T", _h(sig.T)), ("s", _h(sig.s))]


def schnorr_from(f: Fields, params: GroupParams) -> SchnorrSignature:
    _expect_scheme(f, "schnorr")
    return SchnorrSignature(f.element("T", params), f.scalar("s", params))


def kim_delegation_lines(d: KimDelegation):
    return [("scheme", "kim"), *warrant_lines(d.warrant), ("s", _h(d.s)), ("r", _h(d.r))]


def kim_delegation_from(f: Fields, params: GroupParams) -> KimDelegation:
    return KimDelegation(warrant_from(f), f.scalar("s", params), f.element("r", params))


def kim_signature_lines(sig: KimProxySignature):
    return [("scheme", "kim"), *warrant_lines(sig.warrant), ("r", _h(sig.r)),
            ("T", _h(sig.inner.T)), ("inner_s", _h(sig.inner.s))]


def kim_signature_from(f: Fields, params: GroupParams) -> KimProxySignature:
    _expect_scheme(f, "kim")
    inner = SchnorrSignature(f.element("T", params), f.scalar("inner_s", params))
    return KimProxySignature(warrant_from(f), f.element("r", params), inner)


# multi-proxy material

def record_lines(rec: MultiDelegationRecord):
    return [*warrant_lines(rec.warrant), ("r", _h(rec.r)),
            *((f"r.{i}", _h(ri)) for i, ri in enumerate(rec.r_list, 1))]


def record_from(f: Fields, params: GroupParams) -> MultiDelegationRecord:
    w = warrant_from(f)
    r_list = tuple(f.element(k, params) for k in f.indexed("r"))
    try:
        return MultiDelegationRecord(w, f.element("r", params), r_list)
    except ValueError as exc:
        raise FormatError(f"record: {exc}") from exc


def share_lines(share: DelegationShare):
    return [*record_lines(share.record), ("i", str(share.index)), ("sigma", _h(share.sigma))]


def share_from(f: Fields, params: GroupParams) -> DelegationShare:
    rec = record_from(f, params)
    try:
        return DelegationShare(f.dec_int("i"), f.scalar("sigma", params), rec)
    except ValueError as exc:
        raise FormatError(f"share: {exc}") from exc


def signing_key_lines(share: DelegationShare, key: ProxySigningKey):
    return [*share_lines(share), ("d", _h(key.d)), ("V", _h(key.V))]


def signing_key_from(f: Fields, params: GroupParams) -> tuple[DelegationShare, ProxySigningKey]:
    share = share_from(f, params)
    key = ProxySigningKey(share.index, f.scalar("d", params), f.element("V", params))
    return share, key


def multiproxy_signature_lines(sig: MultiProxySignature):
    return [("scheme", "multiproxy"), *warrant_lines(sig.warrant), ("r", _h(sig.r)),
            ("T", _h(sig.T)), ("s", _h(sig.s))]


def multiproxy_signature_from(f: Fields, params: GroupParams) -> MultiProxySignature:
    _expect_scheme(f, "multiproxy")
    return MultiProxySignature(warrant_from(f), f.element("r", params), f.element("T", params),
                               f.scalar("s", params))


def checked_params(params: GroupParams) -> GroupParams:
    if not validate_params(params):
        raise ParamsError("parameter file does not describe a valid Schnorr group")
    return params
