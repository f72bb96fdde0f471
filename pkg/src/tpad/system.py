"""Multi-chip system simulation with encoded channels and trusted monitors.

Chips run in lockstep on one clock. Each directed channel carries a subset
of the sender's outputs plus that subset's chained check bits, with one
cycle of latency through a channel register. Wires between chips are
trusted, so a corrupted channel value is attributed to the sending chip's
pads. Receivers share the sender's code and starting check bits (the
trusted system assembler distributes both). Every chip's error signal
feeds its own mirror monitor; terminal outputs are decoded by a trusted
harness receiver.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .attacks import AttackDescriptor, compile_attack
from .chip import (
    ChipOptions,
    OutputReceiver,
    ProtectedChip,
    StimulusEncoder,
    build_protected_chip,
)
from .lfsr import LfsrSpec
from .netlist import Netlist, serialize_netlist
from .parity import format_matrix

Rng = Union[int, random.Random, None]


@dataclass(frozen=True)
class Channel:
    sender: int
    receiver: int
    subset_index: int = 0


@dataclass
class SystemTopology:
    chips: list[ProtectedChip]
    channels: list[Channel]

    def __post_init__(self):
        seen_rx: set[int] = set()
        for ch in self.channels:
            if not (0 <= ch.sender < len(self.chips) and 0 <= ch.receiver < len(self.chips)):
                raise ValueError("channel endpoint out of range")
            if ch.receiver in seen_rx:
                raise ValueError(f"chip {ch.receiver} has more than one input channel")
            seen_rx.add(ch.receiver)
            sender = self.chips[ch.sender]
            receiver = self.chips[ch.receiver]
            subset, code = sender.out_codes[ch.subset_index]
            if len(subset) != len(receiver.f.inputs):
                raise ValueError(
                    f"channel {ch.sender}->{ch.receiver} width {len(subset)} "
                    f"does not match receiver input count {len(receiver.f.inputs)}"
                )
            if code.rows != receiver.h_in.rows:
                raise ValueError(
                    f"receiver {ch.receiver} must use the sender's output code"
                )

    @property
    def source_chips(self) -> list[int]:
        fed = {ch.receiver for ch in self.channels}
        return [i for i in range(len(self.chips)) if i not in fed]

    @property
    def terminal_chips(self) -> list[int]:
        feeding = {ch.sender for ch in self.channels}
        return [i for i in range(len(self.chips)) if i not in feeding]


def build_pipeline_system(
    functions: Sequence[Netlist],
    r: int,
    t: int,
    lfsr_spec: LfsrSpec,
    rng_seed: Rng = None,
    options: Optional[Sequence[Optional[ChipOptions]]] = None,
) -> SystemTopology:
    """Chain of chips where each consumes the full outputs of the previous.

    Adjacent functions must have matching output/input counts. Receivers
    are built with the sender's output code as their input code, the
    shared-encoding rule for a shared output subset.
    """
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    chips: list[ProtectedChip] = []
    channels: list[Channel] = []
    for i, f in enumerate(functions):
        opt = (options[i] if options and options[i] else ChipOptions())
        if i > 0:
            opt = ChipOptions(
                pipeline_stages=opt.pipeline_stages,
                ram_depth=opt.ram_depth,
                ram_word_width=opt.ram_word_width,
                output_subsets=opt.output_subsets,
                h_in=chips[i - 1].out_codes[0][1],
                insertion_max_iterations=opt.insertion_max_iterations,
                insertion_min_switchboxes=opt.insertion_min_switchboxes,
                insertion_sample_count=opt.insertion_sample_count,
            )
        chips.append(build_protected_chip(f, r, t, lfsr_spec, rng.getrandbits(64), opt))
        if i > 0:
            channels.append(Channel(i - 1, i, 0))
    return SystemTopology(chips, channels)


@dataclass
class RunReport:
    cycles: int
    monitor_fires: list[list[int]]
    terminal_decode_fires: list[int]
    first_detection: Optional[int]
    config_digest: str

    @property
    def any_detection(self) -> bool:
        return self.first_detection is not None


def config_digest(topology: SystemTopology, extra: Optional[dict] = None) -> str:
    """Hash of everything needed to reconstruct the run configuration."""
    payload = {"chips": [], "extra": extra or {}}
    for chip in topology.chips:
        payload["chips"].append(
            {
                "function": serialize_netlist(chip.f),
                "logic_code": format_matrix(chip.h_logic),
                "input_code": format_matrix(chip.h_in),
                "output_codes": [format_matrix(c) for _, c in chip.out_codes],
                "lfsr": [chip.lfsr_spec.degree, chip.lfsr_spec.poly,
                         chip.lfsr_spec.seed, list(chip.lfsr_spec.taps)],
                "pipeline": chip.options.pipeline_stages,
            }
        )
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


Stimulus = Callable[[int, random.Random], Sequence[int]]


def run_system(
    topology: SystemTopology,
    stimulus: Optional[Stimulus],
    attacks: Sequence[tuple[int, AttackDescriptor]],
    cycles: int,
    rng_seed: Rng = None,
) -> RunReport:
    """Lockstep simulation; channels add one cycle of latency.

    stimulus(cycle, rng) supplies the source chips' raw input bits (random
    bits when None). Attacks are (chip_index, descriptor) pairs installed
    before the run. The report holds each monitor's firing cycles plus the
    trusted decode verdicts on terminal chip outputs.
    """
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    chips = topology.chips
    session = rng.getrandbits(64)
    for i, chip in enumerate(chips):
        chip.clear_attacks()
        chip.reset(session * 1000003 + i)
    for idx, atk in attacks:
        chips[idx].install_attack(compile_attack(chips[idx], atk))

    # trusted key distribution: receivers inherit the sender's chain start
    chan_reg: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for ch in topology.channels:
        sender = chips[ch.sender]
        start = sender.initial_prev_out_checks[ch.subset_index]
        chips[ch.receiver].sync_input_chain(start)
        width = len(sender.out_codes[ch.subset_index][0])
        chan_reg[ch.receiver] = ((0,) * width, start)

    encoders = {i: StimulusEncoder(chips[i]) for i in topology.source_chips}
    receivers = {i: OutputReceiver(chips[i]) for i in topology.terminal_chips}
    stim_rng = random.Random(rng.getrandbits(64))

    monitor_fires: list[list[int]] = [[] for _ in chips]
    terminal_fires: list[int] = []
    first_detection: Optional[int] = None

    for cyc in range(cycles):
        next_reg: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
        for i, chip in enumerate(chips):
            if i in encoders:
                m = len(chip.f.inputs)
                x = tuple(stimulus(cyc, stim_rng)) if stimulus else tuple(
                    stim_rng.getrandbits(1) for _ in range(m)
                )
                rc = encoders[i].send(x)
            else:
                x, rc = chan_reg[i]
            res = chip.cycle(x, rc)
            fired = res.monitor_attack
            if i in receivers and receivers[i].receive(res.outputs, res.out_check):
                terminal_fires.append(cyc)
                fired = True
            if res.monitor_attack:
                monitor_fires[i].append(cyc)
            if fired and first_detection is None:
                first_detection = cyc
            for ch in topology.channels:
                if ch.sender == i:
                    subset = chip.out_codes[ch.subset_index][0]
                    word = tuple(res.outputs[j] for j in subset)
                    next_reg[ch.receiver] = (word, res.out_checks[ch.subset_index])
        chan_reg.update(next_reg)

    return RunReport(
        cycles, monitor_fires, terminal_fires, first_detection, config_digest(topology)
    )
