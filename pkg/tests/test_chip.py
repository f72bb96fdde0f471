import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpad.chip import (
    AttackEffect,
    ChipOptions,
    InputDecoderState,
    OutputEncoderState,
    OutputReceiver,
    StimulusEncoder,
    build_protected_chip,
    decode_inputs,
    encode_outputs,
    load_chip_bundle,
    save_chip_bundle,
)
from tpad.netlist import WidthError, parse_netlist, random_netlist
from tpad.parity import ParityCheckMatrix, sample_parity_code
from tpad.switchbox import UnsatisfiableError

from conftest import lfsr16


def bits_msb(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


class TestOutputEncoding:
    def test_worked_hex_example(self):
        """Raw check 110101, previous 010101, transmitted 100000."""
        h = ParityCheckMatrix(tuple(bits_msb(1 << (5 - i), 6) for i in range(6)))
        state = OutputEncoderState(h, bits_msb(0b010101, 6))
        check, state2 = encode_outputs(state, bits_msb(0b110101, 6))
        assert check == bits_msb(0b100000, 6)
        assert state2.prev_check == check

    def test_zero_chain(self):
        h = sample_parity_code(4, 2, 0)
        state = OutputEncoderState(h, (0, 0))
        check, _ = encode_outputs(state, (0, 0, 0, 0))
        assert check == (0, 0)

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_chain_identity(self, seed):
        """check(t) xor check(t-1) equals the raw parity of outputs(t)."""
        rng = random.Random(seed)
        h = sample_parity_code(6, 3, seed)
        state = OutputEncoderState(h, tuple(rng.getrandbits(1) for _ in range(3)))
        prev = state.prev_check
        for _ in range(16):
            word = tuple(rng.getrandbits(1) for _ in range(6))
            check, state = encode_outputs(state, word)
            raw = h.check_bits(word)
            assert tuple(a ^ b for a, b in zip(check, prev)) == raw
            prev = check


class TestInputDecoding:
    def test_worked_hex_example(self):
        """Inputs FA, received check 1, previous B: expected A matches actual A."""
        rows = (
            tuple(1 if j in {0, 1, 3} else 0 for j in range(8)),
            tuple(1 if j in {2, 4, 5} else 0 for j in range(8)),
            tuple(1 if j in {6} else 0 for j in range(8)),
            tuple(1 if j in {5, 7} else 0 for j in range(8)),
        )
        h = ParityCheckMatrix(rows)
        inputs = bits_msb(0xFA, 8)
        assert h.check_bits(inputs) == bits_msb(0xA, 4)
        state = InputDecoderState(h, bits_msb(0xB, 4))
        attack, state2 = decode_inputs(state, inputs, bits_msb(0x1, 4))
        assert not attack
        assert state2.prev_check == bits_msb(0x1, 4)

    def test_flipped_input_bit_detected(self):
        h = sample_parity_code(8, 4, 3)
        rng = random.Random(1)
        prev = tuple(rng.getrandbits(1) for _ in range(4))
        sender = OutputEncoderState(h, prev)
        receiver = InputDecoderState(h, prev)
        x = tuple(rng.getrandbits(1) for _ in range(8))
        check, sender = encode_outputs(sender, x)
        tampered = (x[0] ^ 1,) + x[1:]
        attack, _ = decode_inputs(receiver, tampered, check)
        assert attack

    def test_lockstep_clean_channel(self):
        h = sample_parity_code(8, 3, 9)
        rng = random.Random(2)
        start = tuple(rng.getrandbits(1) for _ in range(3))
        sender = OutputEncoderState(h, start)
        receiver = InputDecoderState(h, start)
        for _ in range(10_000):
            x = tuple(rng.getrandbits(1) for _ in range(8))
            check, sender = encode_outputs(sender, x)
            attack, receiver = decode_inputs(receiver, x, check)
            assert not attack

    def test_stale_pair_replay_detected(self):
        """Individually valid but out-of-chain (outputs, check) pairs fail."""
        h = sample_parity_code(8, 3, 4)
        rng = random.Random(3)
        start = tuple(rng.getrandbits(1) for _ in range(3))
        sender = OutputEncoderState(h, start)
        receiver = InputDecoderState(h, start)
        seen = []
        for _ in range(6):
            x = tuple(rng.getrandbits(1) for _ in range(8))
            check, sender = encode_outputs(sender, x)
            attack, receiver = decode_inputs(receiver, x, check)
            assert not attack
            seen.append((x, check))
        stale_x, stale_check = seen[1]
        attack, _ = decode_inputs(receiver, stale_x, stale_check)
        assert attack  # chain context moved on; replay without it fails


@pytest.fixture(scope="module")
def adder_chip():
    from conftest import FULL_ADDER

    f = parse_netlist(FULL_ADDER)
    return build_protected_chip(f, r=1, t=2, lfsr_spec=lfsr16(1), rng_seed=42)


@pytest.fixture(scope="module")
def pipelined_ram_chip():
    f = random_netlist(8, 30, 6, rng_seed=3, name="core")
    return build_protected_chip(
        f, r=3, t=2, lfsr_spec=lfsr16(3), rng_seed=5,
        options=ChipOptions(pipeline_stages=1, ram_depth=64),
    )


def clean_run(chip, cycles, seed, with_ram=False):
    chip.clear_attacks()
    chip.reset(seed)
    enc = StimulusEncoder(chip)
    rec = OutputReceiver(chip)
    rng = random.Random(seed + 1)
    m = len(chip.f.inputs)
    fires = 0
    for _ in range(cycles):
        x = tuple(rng.getrandbits(1) for _ in range(m))
        ram_op = None
        if with_ram and chip.ram is not None:
            kind = rng.choice(("read", "write", "idle"))
            if kind == "write":
                ram_op = ("write", rng.randrange(chip.ram.depth), rng.randrange(1 << 16))
            elif kind == "read":
                ram_op = ("read", rng.randrange(chip.ram.depth), None)
            else:
                ram_op = ("idle", None, None)
        res = chip.cycle(x, enc.send(x), ram_op=ram_op)
        fires += res.monitor_attack
        fires += res.decode_attack
        fires += rec.receive(res.outputs, res.out_check)
        if res.ram is not None:
            fires += res.ram.attack
    return fires


class TestChipBuild:
    def test_adder_chip_untampered_run(self, adder_chip):
        assert clean_run(adder_chip, 10_000, seed=7) == 0

    def test_pipelined_chip_untampered_run(self, pipelined_ram_chip):
        assert clean_run(pipelined_ram_chip, 10_000, seed=8, with_ram=True) == 0

    def test_error_signal_equals_taps_when_clean(self, adder_chip):
        from tpad.lfsr import lfsr_taps

        chip = adder_chip
        chip.clear_attacks()
        chip.reset(1)
        enc = StimulusEncoder(chip)
        rng = random.Random(5)
        for _ in range(64):
            taps = lfsr_taps(chip.lfsr_state, chip.lfsr_spec)
            x = tuple(rng.getrandbits(1) for _ in range(3))
            res = chip.cycle(x, enc.send(x))
            assert res.error_signal == taps

    def test_unsatisfiable_insertion_surfaces(self, full_adder):
        with pytest.raises(UnsatisfiableError):
            build_protected_chip(
                full_adder, r=1, t=50, lfsr_spec=lfsr16(1), rng_seed=1,
                options=ChipOptions(insertion_max_iterations=30),
            )

    def test_sequential_function_rejected(self):
        seq = parse_netlist(".inputs d\n.outputs q\nq = DFF(d)\n")
        with pytest.raises(ValueError):
            build_protected_chip(seq, r=1, t=1, lfsr_spec=lfsr16(1))

    def test_tap_width_must_match_r(self, full_adder):
        with pytest.raises(ValueError):
            build_protected_chip(full_adder, r=2, t=1, lfsr_spec=lfsr16(1))


class TestChainIdentity:
    def test_transmitted_checks_chain_over_function_outputs(self, adder_chip):
        """out_check(t) xor out_check(t-1) recovers the raw output parity."""
        chip = adder_chip
        chip.clear_attacks()
        chip.reset(31)
        enc = StimulusEncoder(chip)
        rng = random.Random(32)
        h = chip.out_codes[0][1]
        prev = chip.initial_prev_out_checks[0]
        for _ in range(200):
            x = tuple(rng.getrandbits(1) for _ in range(3))
            res = chip.cycle(x, enc.send(x))
            raw = h.check_bits(res.outputs)
            assert tuple(a ^ b for a, b in zip(res.out_check, prev)) == raw
            prev = res.out_check


class TestChipAttacks:
    def test_single_output_flip_detected_with_pipeline_lag(self, pipelined_ram_chip):
        chip = pipelined_ram_chip
        chip.clear_attacks()
        chip.reset(11)
        enc = StimulusEncoder(chip)
        rng = random.Random(6)
        wire = chip.f.outputs[1]
        chip.install_attack(AttackEffect(kind="logic", trigger=("at_cycle", 5),
                                         f_overrides={wire: "flip"}))
        fired_at = None
        for c in range(12):
            x = tuple(rng.getrandbits(1) for _ in range(8))
            res = chip.cycle(x, enc.send(x))
            if res.monitor_attack and fired_at is None:
                fired_at = c
        chip.clear_attacks()
        assert fired_at == 6  # one pipeline stage delays the comparison

    def test_pin_attack_on_check_wire(self, adder_chip):
        chip = adder_chip
        chip.clear_attacks()
        chip.reset(12)
        enc = StimulusEncoder(chip)
        rng = random.Random(7)
        chip.install_attack(AttackEffect(kind="pin", trigger=("at_cycle", 3), recv_flips=(0,)))
        hits = []
        for c in range(8):
            x = tuple(rng.getrandbits(1) for _ in range(3))
            res = chip.cycle(x, enc.send(x))
            if res.monitor_attack:
                hits.append(c)
        chip.clear_attacks()
        # the tampered word also enters the chain register, so a one-cycle
        # glitch disturbs the comparison at the glitch cycle and the next one
        assert hits == [3, 4]

    def test_reliability_stuck_engages_permanently(self, pipelined_ram_chip):
        chip = pipelined_ram_chip
        chip.clear_attacks()
        chip.reset(13)
        enc = StimulusEncoder(chip)
        rng = random.Random(8)
        wire = chip.f.outputs[0]
        chip.install_attack(AttackEffect(kind="reliability", trigger=("after_cycle", 50),
                                         f_overrides={wire: "stuck1"}))
        first = None
        fires = 0
        for c in range(120):
            x = tuple(rng.getrandbits(1) for _ in range(8))
            res = chip.cycle(x, enc.send(x))
            if res.monitor_attack:
                fires += 1
                if first is None:
                    first = c
        chip.clear_attacks()
        assert first is not None and first >= 50
        assert fires > 10  # stuck line keeps disagreeing on many cycles


class TestBundle:
    def test_round_trip_lockstep(self, pipelined_ram_chip, tmp_path):
        chip = pipelined_ram_chip
        chip.clear_attacks()
        save_chip_bundle(chip, tmp_path / "bundle")
        twin = load_chip_bundle(tmp_path / "bundle")
        chip.reset(21)
        twin.reset(21)
        enc_a, enc_b = StimulusEncoder(chip), StimulusEncoder(twin)
        rng = random.Random(9)
        for _ in range(200):
            x = tuple(rng.getrandbits(1) for _ in range(8))
            ra = chip.cycle(x, enc_a.send(x))
            rb = twin.cycle(x, enc_b.send(x))
            assert ra.outputs == rb.outputs
            assert ra.out_check == rb.out_check
            assert ra.error_signal == rb.error_signal

    def test_tampered_bundle_rejected(self, adder_chip, tmp_path):
        save_chip_bundle(adder_chip, tmp_path / "b2")
        target = tmp_path / "b2" / "logic.code"
        text = target.read_text()
        flipped = text[:-2] + ("0\n" if text[-2] == "1" else "1\n")
        target.write_text(flipped)
        with pytest.raises(ValueError):
            load_chip_bundle(tmp_path / "b2")


class TestWidthChecks:
    def test_cycle_width_validation(self, adder_chip):
        adder_chip.reset(0)
        with pytest.raises(WidthError):
            adder_chip.cycle((1, 0), (0,))
        with pytest.raises(WidthError):
            adder_chip.cycle((1, 0, 1), (0, 0))
