import random

import pytest

from tpad.parity import ParityCheckMatrix
from tpad.ram import (
    CHECK_BITS_INCORRECT,
    EXPECTED_SYMPTOM,
    IDLE,
    IN_NEQ_OUT,
    OUT_NEQ_DATAOUT,
    RAM_TROJANS,
    READ,
    WRITE,
    ProtectedRam,
    addr_data_bits,
)

# Fixture code over 8 address + 16 data bits reproducing the worked values:
# check(BE||0124) = 110 = 6h and check(BF||0124) = 010 = 2h.
WORKED_ROWS = (
    tuple(1 if j in {0, 5, 6, 7, 15, 21} else 0 for j in range(24)),
    tuple(1 if j in {1, 2, 8, 9, 10, 11, 12, 13, 14, 16, 23} else 0 for j in range(24)),
    tuple(1 if j in {3, 4, 15, 17, 18, 19, 20, 22} else 0 for j in range(24)),
)


@pytest.fixture
def worked_code():
    return ParityCheckMatrix(WORKED_ROWS)


@pytest.fixture
def ram(worked_code):
    return ProtectedRam(256, 16, code=worked_code)


class TestWorkedValues:
    def test_write_check_bits_are_6(self, worked_code):
        bits = worked_code.check_bits(addr_data_bits(0xBE, 0x0124, 8, 16))
        assert bits == (1, 1, 0)  # 6h

    def test_neighbor_address_check_bits_are_2(self, worked_code):
        bits = worked_code.check_bits(addr_data_bits(0xBF, 0x0124, 8, 16))
        assert bits == (0, 1, 0)  # 2h

    def test_clean_write_then_read(self, ram):
        assert not ram.cycle(WRITE, 0xBE, 0x0124).attack
        res = ram.cycle(READ, 0xBE)
        assert not res.attack and res.data_out == 0x0124

    def test_redirected_read_detected(self, ram):
        ram.cycle(WRITE, 0xBE, 0x0124)
        res = ram.cycle(READ, 0xBF, trojan="read_wrong_address")
        assert res.attack and res.symptoms == (CHECK_BITS_INCORRECT,)


def _staged(worked_code, trojan):
    """Stage each trojan so exactly its table symptom can fire."""
    ram = ProtectedRam(256, 16, code=worked_code)
    if trojan in ("read_wrong_address", "read_wrong_data", "does_not_read"):
        ram.cycle(WRITE, 0x10, 0x1111)
        ram.cycle(READ, 0x10)
        addr = 0x11 if trojan in ("read_wrong_address", "does_not_read") else 0x10
        return ram.cycle(READ, addr, trojan=trojan)
    if trojan == "write_instead_of_read":
        ram.cycle(WRITE, 0x10, 0x1111)
        ram.cycle(READ, 0x10)
        return ram.cycle(READ, 0x10, data_in=0x2222, trojan=trojan)
    if trojan == "write_wrong_address":
        return ram.cycle(WRITE, 0x20, 0x3333, trojan=trojan)
    if trojan == "write_wrong_data":
        ram.cycle(WRITE, 0x20, 0x3333, trojan=trojan)
        return ram.cycle(READ, 0x20)
    if trojan in ("read_instead_of_write", "does_not_write"):
        ram.cycle(WRITE, 0x20, 0x3333)
        return ram.cycle(WRITE, 0x20, 0x4444, trojan=trojan)
    if trojan == "read_instead_of_idle":
        ram.cycle(WRITE, 0x30, 0x5555)
        ram.cycle(WRITE, 0x31, 0x6666)
        return ram.cycle(IDLE, 0x30, trojan=trojan)
    if trojan == "write_instead_of_idle":
        ram.cycle(WRITE, 0x30, 0x5555)
        return ram.cycle(IDLE, 0x31, data_in=0x7777, trojan=trojan)
    raise AssertionError(trojan)


class TestDetectionTable:
    @pytest.mark.parametrize("trojan", RAM_TROJANS)
    def test_each_row_fires_its_exact_symptom(self, worked_code, trojan):
        res = _staged(worked_code, trojan)
        assert res.attack
        assert res.symptoms == (EXPECTED_SYMPTOM[trojan],)

    def test_latent_write_corruption_clean_at_write_time(self, worked_code):
        ram = ProtectedRam(256, 16, code=worked_code)
        assert not ram.cycle(WRITE, 0x20, 0x3333, trojan="write_wrong_data").attack

    def test_write_instead_of_read_symptom_names(self, worked_code):
        res = _staged(worked_code, "write_instead_of_read")
        assert res.symptoms == (OUT_NEQ_DATAOUT,)

    def test_does_not_write_symptom_names(self, worked_code):
        res = _staged(worked_code, "does_not_write")
        assert res.symptoms == (IN_NEQ_OUT,)


class TestHealthyTraffic:
    def test_no_false_positives_random_ops(self, ram):
        rng = random.Random(0)
        for _ in range(20_000):
            op = rng.choice((READ, WRITE, IDLE))
            if op == WRITE:
                res = ram.cycle(WRITE, rng.randrange(256), rng.randrange(1 << 16))
            elif op == READ:
                res = ram.cycle(READ, rng.randrange(256))
            else:
                res = ram.cycle(IDLE)
            assert not res.attack

    def test_data_out_latch_holds_through_writes_and_idle(self, ram):
        ram.cycle(WRITE, 1, 0xAAAA)
        ram.cycle(READ, 1)
        assert ram.data_out == 0xAAAA
        ram.cycle(WRITE, 2, 0xBBBB)
        assert ram.data_out == 0xAAAA  # only reads load the latch
        ram.cycle(IDLE)
        assert ram.data_out == 0xAAAA


class TestValidation:
    def test_address_range(self, ram):
        with pytest.raises(ValueError):
            ram.cycle(READ, 256)

    def test_write_needs_data(self, ram):
        with pytest.raises(ValueError):
            ram.cycle(WRITE, 3)

    def test_code_width_must_cover_addr_and_data(self, worked_code):
        with pytest.raises(ValueError):
            ProtectedRam(512, 16, code=worked_code)  # 9 addr bits != 8
