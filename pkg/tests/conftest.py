import random

import pytest

from mproxy.encoding import ChallengeTable, DomainTag
from mproxy.group import TOY_PARAMS, GroupParams, mod_exp
from mproxy.multiproxy import derive_signing_key, multi_delegate
from mproxy.schnorr import keygen
from mproxy.warrant import Warrant

# generate_params(64, 128, random.Random(0x5eed), toy=True)
SMALL_PARAMS = GroupParams(
    p=0xBE9DB720D9140E46EBF25A9B65A9D6E5,
    q=0xC5D298210F8DAD5B,
    g=0x230BD9D22D45DB5037FF6F7C39B90E91,
    test_mode=True,
)

# generate_params(160, 512, random.Random(0x512))
PARAMS_512 = GroupParams(
    p=int("B3C042624ED659B8495D1559E6570CCD2763CD422533E4FAE6739125AB2A1C14"
          "65D8BF13C305A87AF0DACD97E4E539F37B64093738A7E33F706D8843189927FD", 16),
    q=0xE297E9513542C5A3CCA86647A101B60276124B19,
    g=int("21AE941D4C97E5A72DFD4DD16898EA8FD31F0E733E320FA60530A84EF239A830"
          "751B65BAD09FB9C89D267C57CE58CE6830501A8942ECD2EFC9CBC2132043DC2A", 16),
)

NOW = 1_000


def toy_warrant(n=2, prefix=b""):
    return Warrant(b"O", tuple(b"P%d" % i for i in range(1, n + 1)), 0, 10_000, prefix)


def kat_oracle():
    return ChallengeTable({DomainTag.DELEGATION: 7, DomainTag.MULTI_CHALLENGE: 10})


def el(v, params=TOY_PARAMS):
    return params.element(v)


def sc(v, params=TOY_PARAMS):
    return params.scalar(v)


class Setup:
    """Keys, delegation and signing keys for one random protocol run."""

    def __init__(self, rng, params, n, prefix=b""):
        self.params = params
        self.rng = rng
        self.original = keygen(rng, params)
        self.proxies = [keygen(rng, params) for _ in range(n)]
        self.y0 = self.original.y
        self.y_list = [kp.y for kp in self.proxies]
        self.warrant = toy_warrant(n, prefix)
        self.shares, self.record = multi_delegate(self.original.x, self.warrant, rng)
        self.keys = [
            derive_signing_key(sh, kp.x, self.y0, kp.y)
            for sh, kp in zip(self.shares, self.proxies)
        ]


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def toy():
    return TOY_PARAMS


def g_pow(e, params=TOY_PARAMS):
    return mod_exp(params.generator, e)


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
