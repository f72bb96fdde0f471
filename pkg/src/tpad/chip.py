"""Protected-chip assembly: I/O coding, logic CED, error encoding, RAM.

A chip wraps a combinational function netlist f with:

  * an input decoder that checks XOR-chained check bits arriving with the
    primary inputs,
  * a check-bit predictor (OCP) for a randomized parity code over f's
    outputs plus the matching checker,
  * one output encoder per output subset, XOR-chaining check bits across
    cycles,
  * a combiner that folds all checker signals into one r-bit error signal
    keyed to an LFSR tap subset.

All of that checking circuitry is synthesized into a single detection
netlist which then receives random switchbox obfuscation; the function f
itself stays untouched. The per-cycle dataflow is: decode inputs, evaluate
f and the detection netlist, encode outputs, advance the LFSR, and let the
trusted monitor compare the emitted error signal against its mirror.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .lfsr import ErrorMonitor, LfsrSpec, lfsr_taps, step_lfsr
from .netlist import (
    Bits,
    Netlist,
    NetlistBuilder,
    WidthError,
    eval_wires,
    parse_netlist,
    serialize_netlist,
)
from .parity import (
    ParityCheckMatrix,
    build_ocp,
    format_matrix,
    parse_matrix,
    sample_parity_code,
)
from .ram import ProtectedRam, RamCycleResult
from .switchbox import (
    ObfuscatedNetlist,
    apply_config,
    format_config,
    insert_switchboxes,
    parse_config,
    parse_obfuscated,
    serialize_obfuscated,
)

Rng = Union[int, random.Random, None]


def _as_rng(seed: Rng) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


# -- stateless coding steps ------------------------------------------------------


@dataclass(frozen=True)
class OutputEncoderState:
    code: ParityCheckMatrix
    prev_check: Bits


def encode_outputs(state: OutputEncoderState, outputs: Sequence[int]) -> tuple[Bits, OutputEncoderState]:
    """Check bits of the word XORed with the previous cycle's check bits."""
    raw = state.code.check_bits(outputs)
    if len(state.prev_check) != state.code.r:
        raise WidthError("encoder chain width mismatch")
    check = tuple(a ^ b for a, b in zip(raw, state.prev_check))
    return check, OutputEncoderState(state.code, check)


@dataclass(frozen=True)
class InputDecoderState:
    code: ParityCheckMatrix
    prev_check: Bits


def decode_inputs(
    state: InputDecoderState, inputs: Sequence[int], recv_check: Sequence[int]
) -> tuple[bool, InputDecoderState]:
    """Attack verdict for one received (inputs, check bits) pair."""
    if len(recv_check) != state.code.r:
        raise WidthError("decoder chain width mismatch")
    expected = tuple(a ^ b for a, b in zip(recv_check, state.prev_check))
    actual = state.code.check_bits(inputs)
    return expected != actual, InputDecoderState(state.code, tuple(recv_check))


# -- detection netlist -----------------------------------------------------------


@dataclass(frozen=True)
class DetectionLayout:
    """Index bookkeeping for the combined detection netlist ports."""

    m: int
    r: int
    k: int
    subsets: tuple[tuple[int, ...], ...]
    has_ram: bool

    @property
    def n_inputs(self) -> int:
        return self.m + 3 * self.r + self.k + self.r * len(self.subsets) + (
            self.r if self.has_ram else 0
        )

    def pack_inputs(
        self,
        x: Sequence[int],
        recv_check: Sequence[int],
        prev_in: Sequence[int],
        f_out: Sequence[int],
        prev_outs: Sequence[Sequence[int]],
        taps: Sequence[int],
        ram_sig: Optional[Sequence[int]] = None,
    ) -> tuple[int, ...]:
        parts = [*x, *recv_check, *prev_in, *f_out]
        for p in prev_outs:
            parts.extend(p)
        parts.extend(taps)
        if self.has_ram:
            parts.extend(ram_sig if ram_sig is not None else taps)
        return tuple(parts)

    def unpack_outputs(self, outs: Sequence[int]) -> tuple[Bits, Bits, list[Bits]]:
        r = self.r
        err = tuple(outs[0:r])
        in_sig = tuple(outs[r:2 * r])
        checks = []
        for s in range(len(self.subsets)):
            checks.append(tuple(outs[2 * r + s * r: 2 * r + (s + 1) * r]))
        return err, in_sig, checks


def build_detection_netlist(
    f: Netlist,
    ocp: Netlist,
    h_logic: ParityCheckMatrix,
    h_in: ParityCheckMatrix,
    out_codes: Sequence[tuple[tuple[int, ...], ParityCheckMatrix]],
    pipeline_stages: int = 0,
    has_ram: bool = False,
) -> tuple[Netlist, DetectionLayout]:
    """One netlist holding decoder, OCP, checker, output encoders, combiner."""
    m, k, r = len(f.inputs), len(f.outputs), h_logic.r
    layout = DetectionLayout(m, r, k, tuple(tuple(s) for s, _ in out_codes), has_ram)
    b = NetlistBuilder(f"{f.name}.det")

    x = [b.input(f"x{i}") for i in range(m)]
    recv = [b.input(f"rc{i}") for i in range(r)]
    prev_in = [b.input(f"pin{i}") for i in range(r)]
    fout = [b.input(f"fo{i}") for i in range(k)]
    prev_outs = [
        [b.input(f"pout{s}_{i}") for i in range(r)] for s in range(len(out_codes))
    ]
    taps = [b.input(f"tap{i}") for i in range(r)]
    ram_sig = [b.input(f"ram{i}") for i in range(r)] if has_ram else None

    # logic CED: predictor (copied OCP) against recomputed output parities
    pred = b.inline(ocp, x)
    actual = [
        b.xor_tree([fout[j] for j, a in enumerate(row) if a]) for row in h_logic.rows
    ]
    if pipeline_stages:
        pred = [b.gate("DFF", p) for p in pred]
        actual = [b.gate("DFF", a) for a in actual]
    ced = [b.gate("XOR", taps[i], pred[i], actual[i]) for i in range(r)]

    # input decoding
    expected_in = [b.gate("XOR", recv[i], prev_in[i]) for i in range(r)]
    actual_in = [
        b.xor_tree([x[j] for j, a in enumerate(row) if a]) for row in h_in.rows
    ]
    in_sig = [b.gate("XOR", taps[i], expected_in[i], actual_in[i]) for i in range(r)]

    # output encoders, one per subset
    out_checks = []
    for s, (subset, h_out) in enumerate(out_codes):
        checks = []
        for i, row in enumerate(h_out.rows):
            tree = b.xor_tree([fout[subset[j]] for j, a in enumerate(row) if a])
            checks.append(b.gate("XOR", tree, prev_outs[s][i]))
        out_checks.append(checks)

    # error combining: OR under tap 0, AND under tap 1
    checker_sigs = [ced, in_sig] + ([ram_sig] if has_ram else [])
    err = []
    for i in range(r):
        bits = [sig[i] for sig in checker_sigs]
        orv = b.gate("OR", *bits) if len(bits) > 1 else bits[0]
        andv = b.gate("AND", *bits) if len(bits) > 1 else bits[0]
        nt = b.gate("NOT", taps[i])
        err.append(b.gate("OR", b.gate("AND", nt, orv), b.gate("AND", taps[i], andv)))

    outs = [*err, *in_sig]
    for checks in out_checks:
        outs.extend(checks)
    b.set_outputs(outs)
    return b.build(), layout


# -- runtime attacks ---------------------------------------------------------------


@dataclass
class AttackEffect:
    """Concrete hook points for one injected attack inside a chip."""

    kind: str
    trigger: tuple = ("always",)
    input_flips: tuple[int, ...] = ()
    recv_flips: tuple[int, ...] = ()
    output_flips: tuple[int, ...] = ()  # pad-side, after output encoding
    f_overrides: dict[int, str] = field(default_factory=dict)
    d_overrides: dict[int, str] = field(default_factory=dict)
    ram_trojan: Optional[str] = None
    replay_depth: int = 0
    descriptor: Optional[object] = None
    captured_state: Optional[tuple] = None  # stored-state snapshot, set at engage

    def triggered(self, cycle: int, rng: random.Random) -> bool:
        mode = self.trigger[0]
        if mode == "always":
            return True
        if mode == "at_cycle":
            return cycle == self.trigger[1]
        if mode == "after_cycle":
            return cycle >= self.trigger[1]
        if mode == "random":
            return rng.random() < self.trigger[1]
        raise ValueError(f"unknown trigger {self.trigger!r}")


@dataclass
class ChipCycleResult:
    outputs: Bits                # words leaving the chip pads
    out_check: Bits              # check bits leaving with subset 0
    out_checks: tuple[Bits, ...]
    error_signal: Bits
    monitor_attack: bool
    decode_attack: bool
    ram: Optional[RamCycleResult] = None


@dataclass
class ChipOptions:
    pipeline_stages: int = 0
    ram_depth: Optional[int] = None
    ram_word_width: int = 16
    output_subsets: Optional[tuple[tuple[int, ...], ...]] = None
    h_in: Optional[ParityCheckMatrix] = None
    insertion_max_iterations: int = 1000
    insertion_min_switchboxes: int = 0
    insertion_sample_count: int = 4096


class ProtectedChip:
    """Single-owner cycle-stepped model of one protected chip."""

    def __init__(
        self,
        f: Netlist,
        ocp: Netlist,
        detection: ObfuscatedNetlist,
        layout: DetectionLayout,
        h_logic: ParityCheckMatrix,
        h_in: ParityCheckMatrix,
        out_codes: list[tuple[tuple[int, ...], ParityCheckMatrix]],
        lfsr_spec: LfsrSpec,
        r: int,
        t: int,
        options: ChipOptions,
        h_mem: Optional[ParityCheckMatrix] = None,
    ):
        self.f = f
        self.ocp = ocp
        self.detection = detection
        self.layout = layout
        self.h_logic = h_logic
        self.h_in = h_in
        self.out_codes = out_codes
        self.lfsr_spec = lfsr_spec
        self.r = r
        self.t = t
        self.options = options
        self.h_mem = h_mem
        self.resolved = apply_config(detection, detection.intended)
        self._dstep = self.resolved.step_fn()
        self._fstep = f.step_fn()
        self.attacks: list[AttackEffect] = []
        self.ram: Optional[ProtectedRam] = None
        self.reset(0)

    # state management ------------------------------------------------------------

    def reset(self, session_seed: Rng = None) -> None:
        """Fresh run state; initial chained check bits drawn from the seed.

        The harness is trusted to hand the same initial values to whoever
        encodes this chip's input stream and decodes its output stream.
        """
        rng = _as_rng(session_seed)
        r = self.r
        self.prev_in_check: Bits = tuple(rng.getrandbits(1) for _ in range(r))
        self.prev_out_checks: list[Bits] = [
            tuple(rng.getrandbits(1) for _ in range(r)) for _ in self.out_codes
        ]
        self.initial_prev_in_check = self.prev_in_check
        self.initial_prev_out_checks = list(self.prev_out_checks)
        self.lfsr_state = self.lfsr_spec.seed
        self.monitor = ErrorMonitor(self.lfsr_spec)
        self.d_state: Bits = (0,) * self.resolved.state_width
        self.f_state: Bits = (0,) * self.f.state_width
        self.cycle_count = 0
        self._trigger_rng = random.Random(rng.getrandbits(64))
        self._history: deque = deque(maxlen=4096)
        self._last_tx_checks: list[Bits] = list(self.prev_out_checks)
        for a in self.attacks:
            a.captured_state = None
        if self.options.ram_depth:
            self.ram = ProtectedRam(
                self.options.ram_depth, self.options.ram_word_width, code=self.h_mem
            )

    def sync_input_chain(self, prev_check: Bits) -> None:
        """Adopt a sender's chain start for this chip's input decoder."""
        if len(prev_check) != self.r:
            raise WidthError("chain width mismatch")
        self.prev_in_check = tuple(prev_check)
        self.initial_prev_in_check = tuple(prev_check)

    def install_attack(self, effect: AttackEffect) -> None:
        self.attacks.append(effect)

    def clear_attacks(self) -> None:
        self.attacks = []

    # per-cycle dataflow ------------------------------------------------------------

    def cycle(
        self,
        inputs: Sequence[int],
        recv_check: Sequence[int],
        ram_op: Optional[tuple] = None,
    ) -> ChipCycleResult:
        if len(inputs) != len(self.f.inputs):
            raise WidthError("primary input width mismatch")
        if len(recv_check) != self.r:
            raise WidthError("input check width mismatch")
        r = self.r
        taps = lfsr_taps(self.lfsr_state, self.lfsr_spec)
        active = [a for a in self.attacks if a.triggered(self.cycle_count, self._trigger_rng)]

        x = list(inputs)
        rc = list(recv_check)
        for a in active:
            for i in a.input_flips:
                x[i] ^= 1
            for i in a.recv_flips:
                rc[i] ^= 1

        f_over: dict[int, str] = {}
        d_over: dict[int, str] = {}
        ram_trojan = None
        replay = None
        parity_null = False
        for a in active:
            f_over.update(a.f_overrides)
            d_over.update(a.d_overrides)
            if a.ram_trojan:
                ram_trojan = a.ram_trojan
            if a.kind == "decoupling_stored_state":
                # the trojan's extra flip-flops hold one earlier consistent
                # state; from engagement on, the CED path sees only that
                if a.captured_state is None and len(self._history) >= a.replay_depth > 0:
                    a.captured_state = self._history[-a.replay_depth]
                replay = a.captured_state
            if a.kind == "decoupling_parity_null":
                parity_null = True

        if f_over:
            f_out, self.f_state = eval_wires(self.f, x, self.f_state, f_over)
        else:
            f_out, self.f_state = self._fstep(tuple(x), self.f_state, 1)

        ram_res = None
        ram_sig: Bits = taps
        if self.ram is not None and ram_op is not None:
            op, addr, data = (ram_op + (None, None))[:3]
            ram_res = self.ram.cycle(op, addr, data, trojan=ram_trojan)
            if ram_res.attack:
                ram_sig = (taps[0] ^ 1,) + taps[1:]

        # the detection netlist sees either live values or, under a stored
        # state decoupling attack, a recorded snapshot of an earlier cycle
        if replay is not None:
            ced_x, ced_rc, ced_prev_in, ced_fout, ced_prev_outs = replay
        else:
            ced_x, ced_rc, ced_prev_in, ced_fout, ced_prev_outs = (
                tuple(x), tuple(rc), self.prev_in_check, f_out,
                tuple(self.prev_out_checks),
            )
        packed = self.layout.pack_inputs(
            ced_x, ced_rc, ced_prev_in, ced_fout, ced_prev_outs, taps, ram_sig
        )
        if d_over:
            d_out, self.d_state = eval_wires(self.resolved, packed, self.d_state, d_over)
        else:
            d_out, self.d_state = self._dstep(packed, self.d_state, 1)
        error_signal, in_sig, out_checks = self.layout.unpack_outputs(d_out)
        decode_attack = in_sig != taps

        self._history.append((tuple(x), tuple(rc), self.prev_in_check, f_out,
                              tuple(self.prev_out_checks)))

        # transmitted values
        tx_out = list(f_out)
        tx_checks = [list(c) for c in out_checks]
        if replay is not None:
            tx_out = [b ^ 1 for b in f_out]  # hijacked main outputs
        if parity_null:
            tx_out = [0] * len(f_out)
            tx_checks = [list(c) for c in self._last_tx_checks]
        for a in active:
            for i in a.output_flips:
                tx_out[i] ^= 1

        if replay is None:
            self.prev_in_check = tuple(rc)
            self.prev_out_checks = [tuple(c) for c in out_checks]
        self._last_tx_checks = [tuple(c) for c in tx_checks]
        self.lfsr_state = step_lfsr(self.lfsr_state, self.lfsr_spec)
        monitor_attack = self.monitor.check(error_signal)
        self.cycle_count += 1
        return ChipCycleResult(
            outputs=tuple(tx_out),
            out_check=tuple(tx_checks[0]) if tx_checks else (),
            out_checks=tuple(tuple(c) for c in tx_checks),
            error_signal=error_signal,
            monitor_attack=monitor_attack,
            decode_attack=decode_attack,
            ram=ram_res,
        )


def build_protected_chip(
    f: Netlist,
    r: int,
    t: int,
    lfsr_spec: LfsrSpec,
    rng_seed: Rng = None,
    options: Optional[ChipOptions] = None,
) -> ProtectedChip:
    """Sample codes, synthesize and obfuscate the detection netlist, wire a chip.

    The function netlist stays as-is; the detection netlist (input decoder,
    OCP, checker, output encoders, error combiner) is built around the codes
    and switchbox-obfuscated with a target of t switchboxes per output cone.
    """
    if f.has_state:
        raise ValueError("chip function netlist must be combinational")
    if lfsr_spec.r != r:
        raise ValueError("LFSR tap subset width must equal r")
    options = options or ChipOptions()
    rng = _as_rng(rng_seed)
    m, k = len(f.inputs), len(f.outputs)

    h_logic = sample_parity_code(k, r, rng.getrandbits(64))
    h_in = options.h_in or sample_parity_code(m, r, rng.getrandbits(64))
    subsets = options.output_subsets or (tuple(range(k)),)
    seen: dict[tuple[int, ...], ParityCheckMatrix] = {}
    out_codes: list[tuple[tuple[int, ...], ParityCheckMatrix]] = []
    for s in subsets:
        s = tuple(s)
        if s not in seen:
            seen[s] = sample_parity_code(len(s), r, rng.getrandbits(64))
        out_codes.append((s, seen[s]))
    h_mem = None
    if options.ram_depth:
        addr_bits = options.ram_depth.bit_length() - 1
        h_mem = sample_parity_code(addr_bits + options.ram_word_width, r, rng.getrandbits(64))

    ocp = build_ocp(f, h_logic)
    det, layout = build_detection_netlist(
        f, ocp, h_logic, h_in, out_codes,
        pipeline_stages=options.pipeline_stages,
        has_ram=bool(options.ram_depth),
    )
    obf = insert_switchboxes(
        det,
        t,
        rng_seed=rng.getrandbits(64),
        max_iterations=options.insertion_max_iterations,
        min_switchboxes=options.insertion_min_switchboxes,
        sample_count=options.insertion_sample_count,
    )
    return ProtectedChip(
        f, ocp, obf, layout, h_logic, h_in, out_codes, lfsr_spec, r, t, options, h_mem
    )


def chip_cycle(
    chip: ProtectedChip,
    inputs: Sequence[int],
    recv_check: Sequence[int],
    ram_op: Optional[tuple] = None,
) -> ChipCycleResult:
    """Advance a protected chip by one clock."""
    return chip.cycle(inputs, recv_check, ram_op)


# -- trusted harness helpers --------------------------------------------------------


class StimulusEncoder:
    """Trusted sender for a chip's input channel (same code, synced chain)."""

    def __init__(self, chip: ProtectedChip):
        self.state = OutputEncoderState(chip.h_in, chip.initial_prev_in_check)

    def send(self, x: Sequence[int]) -> Bits:
        check, self.state = encode_outputs(self.state, x)
        return check


class OutputReceiver:
    """Trusted receiver decoding one of the chip's output subsets."""

    def __init__(self, chip: ProtectedChip, subset_index: int = 0):
        subset, code = chip.out_codes[subset_index]
        self.subset = subset
        self.state = InputDecoderState(code, chip.initial_prev_out_checks[subset_index])

    def receive(self, outputs: Sequence[int], check: Sequence[int]) -> bool:
        word = [outputs[j] for j in self.subset]
        attack, self.state = decode_inputs(self.state, word, check)
        return attack


# -- chip bundles --------------------------------------------------------------------


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def save_chip_bundle(chip: ProtectedChip, path: Union[str, Path]) -> None:
    """Write a chip as a directory of netlists, codes and specs + manifest."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    from .lfsr import format_lfsr_spec

    files: dict[str, str] = {
        "function.net": serialize_netlist(chip.f),
        "ocp.net": serialize_netlist(chip.ocp),
        "detection.net": serialize_obfuscated(chip.detection),
        "detection.cfg": format_config(chip.detection.intended),
        "logic.code": format_matrix(chip.h_logic),
        "input.code": format_matrix(chip.h_in),
        "lfsr.spec": format_lfsr_spec(chip.lfsr_spec),
    }
    for i, (subset, code) in enumerate(chip.out_codes):
        files[f"output{i}.code"] = format_matrix(code)
    if chip.h_mem is not None:
        files["ram.code"] = format_matrix(chip.h_mem)
    manifest = {
        "format": "tpad-chip/1",
        "name": chip.f.name,
        "r": chip.r,
        "t": chip.t,
        "pipeline_stages": chip.options.pipeline_stages,
        "ram_depth": chip.options.ram_depth,
        "ram_word_width": chip.options.ram_word_width,
        "output_subsets": [list(s) for s, _ in chip.out_codes],
        "files": {},
    }
    for name, text in files.items():
        (root / name).write_text(text)
        manifest["files"][name] = _sha256(text.encode())
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_chip_bundle(path: Union[str, Path]) -> ProtectedChip:
    root = Path(path)
    manifest = json.loads((root / "manifest.json").read_text())
    if manifest.get("format") != "tpad-chip/1":
        raise ValueError("not a chip bundle")
    texts: dict[str, str] = {}
    for name, digest in manifest["files"].items():
        text = (root / name).read_text()
        if _sha256(text.encode()) != digest:
            raise ValueError(f"bundle file {name} does not match its manifest hash")
        texts[name] = text
    from .lfsr import parse_lfsr_spec

    f = parse_netlist(texts["function.net"])
    ocp = parse_netlist(texts["ocp.net"])
    detection = parse_obfuscated(texts["detection.net"], parse_config(texts["detection.cfg"]))
    h_logic = parse_matrix(texts["logic.code"])
    h_in = parse_matrix(texts["input.code"])
    subsets = [tuple(s) for s in manifest["output_subsets"]]
    out_codes = [
        (subsets[i], parse_matrix(texts[f"output{i}.code"])) for i in range(len(subsets))
    ]
    h_mem = parse_matrix(texts["ram.code"]) if "ram.code" in texts else None
    options = ChipOptions(
        pipeline_stages=manifest["pipeline_stages"],
        ram_depth=manifest["ram_depth"],
        ram_word_width=manifest["ram_word_width"],
        output_subsets=tuple(subsets),
    )
    layout = DetectionLayout(
        len(f.inputs), h_logic.r, len(f.outputs), tuple(subsets), h_mem is not None
    )
    lfsr_spec = parse_lfsr_spec(texts["lfsr.spec"])
    return ProtectedChip(
        f, ocp, detection, layout, h_logic, h_in, out_codes, lfsr_spec,
        h_logic.r, manifest["t"], options, h_mem,
    )
