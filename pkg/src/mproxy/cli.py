"""Command-line front end.

Exit status: 0 success, 1 a check came out false (signature, share,
delegation or warrant conformance), 2 malformed input, 3 signing session
aborted (blamed indices on stderr), 4 internal error.
"""

from __future__ import annotations

import argparse
import random
import secrets
import sys
import time
from pathlib import Path

from . import formats as fmt
from .costs import measure, render_table
from .errors import (
    ConformanceError,
    FormatError,
    InvalidDelegationError,
    ParamsError,
    SessionAbortedError,
    ShareInvalidError,
    WarrantError,
)
from .group import TOY_PARAMS, generate_params
from .kim import kim_delegate, kim_proxy_sign, kim_proxy_verify, kim_verify_delegation
from .multiproxy import (
    SigningSession,
    derive_signing_key,
    multi_delegate,
    round1_commit,
    round2_respond,
    verify_multiproxy,
)
from .schnorr import keygen, sign, verify
from .warrant import Warrant

EXIT_OK, EXIT_FALSE, EXIT_MALFORMED, EXIT_ABORT, EXIT_INTERNAL = range(5)


class CheckFailed(Exception):
    """A verification-style command reached a negative verdict."""


def _rng(seed: str | None):
    if seed is None:
        return secrets.SystemRandom()
    try:
        return random.Random(int(seed, 16))
    except ValueError:
        raise FormatError(f"--seed must be hex, got {seed!r}") from None


def _read(path) -> str:
    return Path(path).read_text()


def _write(path, pairs) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(fmt.render(pairs))


def _params(args):
    return fmt.checked_params(fmt.read_params(_read(args.params)))


def _message(args) -> bytes:
    if args.message_file is not None:
        return Path(args.message_file).read_bytes()
    if args.message is None:
        raise FormatError("one of --message or --message-file is required")
    return args.message.encode()


def _now(args) -> int:
    return int(time.time()) if args.now is None else args.now


def _public(path, params):
    return fmt.read_key(_read(path), params)[1]


def cmd_params(args) -> None:
    if args.toy:
        params = TOY_PARAMS
    else:
        params = generate_params(args.q_bits, args.p_bits, _rng(args.seed))
    _write(args.out, fmt.params_lines(params))


def cmd_keygen(args) -> None:
    params = _params(args)
    kp = keygen(_rng(args.seed), params)
    ident = args.id.encode() if args.id is not None else None
    _write(args.out, fmt.key_lines(kp.y, kp.x, ident))
    _write(str(args.out) + ".pub", fmt.key_lines(kp.y, None, ident))


def cmd_warrant(args) -> None:
    w = Warrant(
        args.original_id.encode(),
        tuple(p.encode() for p in args.proxy_id),
        args.valid_from,
        args.valid_to,
        args.prefix.encode(),
    )
    _write(args.out, fmt.warrant_lines(w))


def cmd_delegate(args) -> None:
    params = _params(args)
    key = fmt.read_keypair(_read(args.key), params)
    warrant = fmt.read_warrant(_read(args.warrant))
    rng = _rng(args.seed)
    out = Path(args.out)
    if args.scheme == "kim":
        if warrant.n != 1:
            raise FormatError("a kim delegation names exactly one proxy")
        _write(out / "delegation.txt", fmt.kim_delegation_lines(kim_delegate(key.x, warrant, rng)))
        return
    shares, record = multi_delegate(key.x, warrant, rng)
    _write(out / "record.txt", fmt.record_lines(record))
    for share in shares:
        _write(out / f"share.{share.index}.txt", fmt.share_lines(share))


def cmd_accept(args) -> None:
    params = _params(args)
    f = fmt.parse(_read(args.share))
    y0 = _public(args.original, params)
    if f.get("scheme") == "kim":
        d = fmt.kim_delegation_from(f, params)
        if not kim_verify_delegation(d, y0):
            raise InvalidDelegationError("delegation rejected: g^s != y^e * r")
        _write(args.out, fmt.kim_delegation_lines(d))
        return
    share = fmt.share_from(f, params)
    proxy = fmt.read_keypair(_read(args.key), params)
    key = derive_signing_key(share, proxy.x, y0, proxy.y)
    _write(args.out, fmt.signing_key_lines(share, key))


def cmd_sign(args) -> None:
    params = _params(args)
    m = _message(args)
    rng = _rng(args.seed)
    if args.delegation is not None:
        d = fmt.kim_delegation_from(fmt.parse(_read(args.delegation)), params)
        if args.original is None:
            raise FormatError("--original is required to sign with a delegation")
        y = _public(args.original, params)
        sig = kim_proxy_sign(m, d, y, rng, now=_now(args))
        _write(args.out, fmt.kim_signature_lines(sig))
    else:
        if args.key is None:
            raise FormatError("one of --key or --delegation is required")
        kp = fmt.read_keypair(_read(args.key), params)
        _write(args.out, fmt.schnorr_lines(sign(m, kp, rng)))


def cmd_session(args) -> None:
    """Run both signing rounds, exchanging every contribution through files."""
    params = _params(args)
    m = _message(args)
    rng = _rng(args.seed)
    y0 = _public(args.original, params)
    y_list = [_public(p, params) for p in args.proxy_key]
    loaded = [fmt.signing_key_from(fmt.parse(_read(p)), params) for p in args.signing_key]
    record = loaded[0][0].record
    if any(share.record != record for share, _ in loaded):
        raise FormatError("signing keys come from different delegations")
    keys = {key.index: key for _, key in loaded}
    if sorted(keys) != list(range(1, record.n + 1)) or len(loaded) != record.n:
        raise FormatError(f"need exactly one signing key per index 1..{record.n}")
    if len(y_list) != record.n:
        raise FormatError(f"need {record.n} --proxy-key files, got {len(y_list)}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    session = SigningSession(m, record, y0, y_list, now=_now(args))

    nonces = {}
    for i in sorted(keys):
        nonces[i], T_i = round1_commit(params, rng)
        _write(out / f"commit.{i}.txt", [("i", str(i)), ("T", format(T_i.value, "x"))])
    for i in sorted(keys):
        f = fmt.parse(_read(out / f"commit.{i}.txt"))
        session.add_commitment(f.dec_int("i"), f.element("T", params))
    _write(out / "challenge.txt",
           [("T", format(session.T.value, "x")), ("c", format(session.challenge.value, "x"))])

    c = fmt.parse(_read(out / "challenge.txt")).scalar("c", params)
    for i in sorted(keys):
        s_i = round2_respond(nonces[i], keys[i].d, c)
        _write(out / f"response.{i}.txt", [("i", str(i)), ("s", format(s_i.value, "x"))])
    for i in sorted(keys):
        f = fmt.parse(_read(out / f"response.{i}.txt"))
        session.add_response(f.dec_int("i"), f.scalar("s", params))

    sig = session.aggregate()
    _write(out / "signature.txt", fmt.multiproxy_signature_lines(sig))


def cmd_verify(args) -> None:
    params = _params(args)
    m = _message(args)
    f = fmt.parse(_read(args.signature))
    scheme = f.get("scheme")
    if scheme == "schnorr":
        if args.key is None:
            raise FormatError("--key is required for schnorr signatures")
        ok = verify(m, fmt.schnorr_from(f, params), _public(args.key, params))
    elif scheme == "kim":
        if args.original is None:
            raise FormatError("--original is required for kim signatures")
        ok = kim_proxy_verify(m, fmt.kim_signature_from(f, params), _public(args.original, params),
                              now=_now(args))
    elif scheme == "multiproxy":
        if args.original is None:
            raise FormatError("--original is required for multiproxy signatures")
        sig = fmt.multiproxy_signature_from(f, params)
        y_list = [_public(p, params) for p in args.proxy_key]
        ok = verify_multiproxy(m, sig, _public(args.original, params), y_list, now=_now(args))
    else:
        raise FormatError(f"unknown scheme {scheme!r}")
    if not ok:
        raise CheckFailed("signature is NOT valid")
    print("signature valid")


def cmd_costs(args) -> None:
    params = TOY_PARAMS if args.group == "toy" else _params(args)
    rng = _rng(args.seed)
    costs = []
    for n in args.n:
        costs += measure(n, rng, params)
    sys.stdout.write(render_table(costs, args.format))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mproxy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    def message_flags(p):
        p.add_argument("--message")
        p.add_argument("--message-file")

    p = add("params", cmd_params, "generate group parameters")
    p.add_argument("--out", required=True)
    p.add_argument("--toy", action="store_true", help="write the p=23, q=11, g=2 test group")
    p.add_argument("--q-bits", type=int, default=160)
    p.add_argument("--p-bits", type=int, default=512)
    p.add_argument("--seed")

    p = add("keygen", cmd_keygen, "generate a key pair (writes FILE and FILE.pub)")
    p.add_argument("--params", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--id")
    p.add_argument("--seed")

    p = add("warrant", cmd_warrant, "write a warrant file")
    p.add_argument("--original-id", required=True)
    p.add_argument("--proxy-id", action="append", required=True)
    p.add_argument("--valid-from", type=int, required=True)
    p.add_argument("--valid-to", type=int, required=True)
    p.add_argument("--prefix", default="")
    p.add_argument("--out", required=True)

    p = add("delegate", cmd_delegate, "delegate signing power under a warrant")
    p.add_argument("--params", required=True)
    p.add_argument("--key", required=True, help="original signer's key file")
    p.add_argument("--warrant", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scheme", choices=("multiproxy", "kim"), default="multiproxy")
    p.add_argument("--seed")

    p = add("accept", cmd_accept, "check a delegation share and derive the signing key")
    p.add_argument("--params", required=True)
    p.add_argument("--share", required=True)
    p.add_argument("--key", help="proxy's own key file (multiproxy shares)")
    p.add_argument("--original", required=True, help="original signer's public key")
    p.add_argument("--out", required=True)

    p = add("sign", cmd_sign, "schnorr or single-proxy signing")
    p.add_argument("--params", required=True)
    p.add_argument("--key")
    p.add_argument("--delegation")
    p.add_argument("--original")
    message_flags(p)
    p.add_argument("--now", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--seed")

    p = add("session", cmd_session, "run a multi-proxy signing session")
    p.add_argument("--params", required=True)
    p.add_argument("--original", required=True)
    p.add_argument("--proxy-key", action="append", required=True,
                   help="proxy public keys, in warrant order")
    p.add_argument("--signing-key", action="append", required=True)
    message_flags(p)
    p.add_argument("--now", type=int)
    p.add_argument("--out", required=True, help="session directory")
    p.add_argument("--seed")

    p = add("verify", cmd_verify, "verify a signature file")
    p.add_argument("--params", required=True)
    p.add_argument("--signature", required=True)
    p.add_argument("--key", help="signer public key (schnorr)")
    p.add_argument("--original", help="original signer public key (kim, multiproxy)")
    p.add_argument("--proxy-key", action="append", default=[])
    message_flags(p)
    p.add_argument("--now", type=int)

    p = add("costs", cmd_costs, "count E/M/I/H per protocol phase")
    p.add_argument("--n", type=int, action="append", required=True)
    p.add_argument("--group", choices=("toy", "file"), default="toy")
    p.add_argument("--params")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (CheckFailed, ConformanceError, InvalidDelegationError, ShareInvalidError) as exc:
        print(f"mproxy: {exc}", file=sys.stderr)
        if isinstance(exc, (InvalidDelegationError, ShareInvalidError)):
            print("mproxy: request a new delegation", file=sys.stderr)
        return EXIT_FALSE
    except SessionAbortedError as exc:
        print(f"mproxy: {exc}", file=sys.stderr)
        print("blame: " + " ".join(map(str, sorted(exc.blame))), file=sys.stderr)
        return EXIT_ABORT
    except (FormatError, ParamsError, WarrantError, OSError, ValueError) as exc:
        print(f"mproxy: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except Exception as exc:  # noqa: BLE001
        print(f"mproxy: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
