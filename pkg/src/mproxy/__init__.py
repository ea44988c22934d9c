"""Schnorr, single-proxy and multi-proxy signatures with warrants."""

from .encoding import ChallengeTable, DomainTag, encode_fields, hash_to_scalar
from .group import (
    TOY_PARAMS,
    GroupElement,
    GroupParams,
    OpCounter,
    Scalar,
    generate_params,
    mod_exp,
    mod_inv,
    mod_mul,
    random_scalar,
    validate_params,
)
from .kim import kim_delegate, kim_proxy_sign, kim_proxy_verify, kim_verify_delegation
from .multiproxy import (
    MultiProxySignature,
    SigningSession,
    derive_signing_key,
    group_proxy_key,
    multi_delegate,
    simulate_session,
    verify_multiproxy,
    verify_share,
)
from .schnorr import KeyPair, keygen, sign, verify
from .warrant import Warrant, check_conformance, encode_warrant

__version__ = "0.1.0"
