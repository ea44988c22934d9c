import random

import pytest
from scipy.stats import chisquare

from conftest import PARAMS_512, SMALL_PARAMS
from mproxy.encoding import ChallengeTable, DomainTag, encode_fields, hash_to_scalar
from mproxy.errors import InjectionForbiddenError
from mproxy.group import TOY_PARAMS, OpCounter


@pytest.mark.parametrize("fields,expected", [
    ([0], "00000000"),
    ([1, 2], "00000001" "01" "00000001" "02"),
    ([b"ab"], "00000002" "6162"),
    ([b""], "00000000"),
    ([256], "00000002" "0100"),
    ([], ""),
])
def test_encode_fields_layout(fields, expected):
    assert encode_fields(fields).hex() == expected


def test_encode_rejects_negative_and_other_types():
    with pytest.raises(ValueError):
        encode_fields([-1])
    with pytest.raises(TypeError):
        encode_fields(["text"])
    with pytest.raises(TypeError):
        encode_fields([True])


def test_encoding_injective_fuzz():
    rng = random.Random(21)
    seen = {}
    for _ in range(10_000):
        fields = tuple(rng.randbytes(rng.randrange(4)) for _ in range(rng.randrange(5)))
        enc = encode_fields(fields)
        assert seen.setdefault(enc, fields) == fields


def test_hash_known_answer():
    # tag 0x03 || len(4) || "m" ; SHA-256 reduced mod q
    import hashlib

    digest = hashlib.sha256(bytes.fromhex("03" "00000001") + b"m").digest()
    expected = int.from_bytes(digest, "big") % PARAMS_512.q
    assert hash_to_scalar(DomainTag.BASE_SIGN, [b"m"], PARAMS_512).value == expected


def test_hash_deterministic_and_counted():
    c = OpCounter()
    a = hash_to_scalar(DomainTag.DELEGATION, [b"x", 5], PARAMS_512, c)
    b = hash_to_scalar(DomainTag.DELEGATION, [b"x", 5], PARAMS_512, c)
    assert a == b and c.H == 2


def test_domain_separation():
    rng = random.Random(22)
    for _ in range(100):
        fields = [rng.randbytes(8), rng.getrandbits(64)]
        a = hash_to_scalar(DomainTag.DELEGATION, fields, PARAMS_512)
        b = hash_to_scalar(DomainTag.MULTI_CHALLENGE, fields, PARAMS_512)
        assert a != b


def test_range_and_uniformity_q11():
    rng = random.Random(23)
    counts = [0] * 11
    for _ in range(10_000):
        v = hash_to_scalar(DomainTag.BASE_SIGN, [rng.randbytes(8)], TOY_PARAMS).value
        assert 0 <= v < 11
        counts[v] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_injection_in_test_mode():
    table = ChallengeTable({DomainTag.DELEGATION: 7})
    c = OpCounter()
    assert hash_to_scalar(DomainTag.DELEGATION, [b"a"], TOY_PARAMS, c, oracle=table).value == 7
    assert c.H == 1
    real = hash_to_scalar(DomainTag.BASE_SIGN, [b"a"], TOY_PARAMS)
    assert hash_to_scalar(DomainTag.BASE_SIGN, [b"a"], TOY_PARAMS, oracle=table) == real
    assert hash_to_scalar(DomainTag.DELEGATION, [], SMALL_PARAMS, oracle=table).value == 7


def test_injection_forbidden_outside_test_mode():
    with pytest.raises(InjectionForbiddenError):
        hash_to_scalar(DomainTag.DELEGATION, [b"a"], PARAMS_512, oracle=ChallengeTable())


def test_tags_are_distinct_bytes():
    values = [t.value for t in DomainTag]
    assert len(set(values)) == len(values) and all(0 < v < 256 for v in values)
