"""Attack taxonomy, injection, detection campaigns, and analytic calculators.

Attack kinds follow the pin / core / decoupling taxonomy: pin attacks flip
wires between pad and core, logic attacks force or flip gate outputs,
electrical attacks appear as capture-time bit flips with a per-cycle
probability, reliability attacks engage a permanent stuck-at after an
activation cycle, and decoupling attacks feed the checking circuitry valid
data while hijacking the main path. Campaigns run seeded trials against a
chip, count monitor or receiver detections, and pair every trial with an
attack-free control run that must stay silent.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .chip import AttackEffect, OutputReceiver, ProtectedChip, StimulusEncoder
from .netlist import Netlist
from .parity import ParityCheckMatrix

Rng = Union[int, random.Random, None]

ATTACK_KINDS = (
    "pin",
    "logic",
    "electrical",
    "reliability",
    "decoupling_stored_state",
    "decoupling_parity_null",
    "decoupling_fft_zero",
)


def _as_rng(seed: Rng) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


@dataclass(frozen=True)
class AttackDescriptor:
    """Taxonomy-tagged mutation applied to a chip or channel.

    target grammar:
        input:<i> | recv_check:<i> | output:<i>   pad-side wires
        fout:<i>                                   function output wire
        fgate:<name> | dgate:<name>                gate by wire name
        ram:<trojan_row>                           protected-RAM behavior
        - (empty) for decoupling payloads
    """

    kind: str
    target: str = "-"
    trigger: tuple = ("always",)
    payload: str = "flip"  # flip | stuck0 | stuck1 | replay:<j>

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")


_TRIGGER_RE = re.compile(r"^(always|at_cycle:(\d+)|after_cycle:(\d+)|random:([0-9.eE+-]+))$")


def parse_attack_line(line: str) -> AttackDescriptor:
    """One attack per line: 'logic flip gate=g7 trigger=at_cycle:120'."""
    parts = line.split()
    if len(parts) < 2:
        raise ValueError(f"bad attack line {line!r}")
    kind, payload = parts[0], parts[1]
    target = "-"
    trigger: tuple = ("always",)
    for tok in parts[2:]:
        if "=" not in tok:
            raise ValueError(f"bad attack token {tok!r}")
        key, val = tok.split("=", 1)
        if key in ("gate", "target", "wire"):
            target = val
        elif key == "trigger":
            m = _TRIGGER_RE.match(val)
            if not m:
                raise ValueError(f"bad trigger {val!r}")
            if val == "always":
                trigger = ("always",)
            elif val.startswith("at_cycle"):
                trigger = ("at_cycle", int(m.group(2)))
            elif val.startswith("after_cycle"):
                trigger = ("after_cycle", int(m.group(3)))
            else:
                trigger = ("random", float(m.group(4)))
        else:
            raise ValueError(f"unknown attack key {key!r}")
    return AttackDescriptor(kind, target, trigger, payload)


def parse_attack_file(text: str) -> list[AttackDescriptor]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_attack_line(line))
    return out


def format_attack_line(atk: AttackDescriptor) -> str:
    trig = atk.trigger[0] if atk.trigger[0] == "always" else f"{atk.trigger[0]}:{atk.trigger[1]}"
    return f"{atk.kind} {atk.payload} target={atk.target} trigger={trig}"


def compile_attack(chip: ProtectedChip, atk: AttackDescriptor) -> AttackEffect:
    """Resolve a descriptor's symbolic target onto the chip's wires."""
    kind, target, payload = atk.kind, atk.target, atk.payload
    eff = AttackEffect(kind=kind, trigger=atk.trigger, descriptor=atk)
    mode = payload if payload in ("flip", "stuck0", "stuck1") else "flip"

    def idx(prefix: str) -> int:
        return int(target.split(":", 1)[1])

    if kind == "decoupling_parity_null":
        return eff
    if kind == "decoupling_stored_state":
        if payload.startswith("replay:"):
            eff.replay_depth = int(payload.split(":", 1)[1])
        else:
            eff.replay_depth = 1
        return eff
    if kind == "decoupling_fft_zero":
        raise ValueError("fft reference zeroing applies to the FFT engine, not a chip")

    if target.startswith("input:"):
        eff.input_flips = (idx("input"),)
    elif target.startswith("recv_check:"):
        eff.recv_flips = (idx("recv_check"),)
    elif target.startswith("output:"):
        eff.output_flips = (idx("output"),)
    elif target.startswith("fout:"):
        eff.f_overrides = {chip.f.outputs[idx("fout")]: mode}
    elif target.startswith("fgate:"):
        eff.f_overrides = {chip.f.wire(target.split(":", 1)[1]): mode}
    elif target.startswith("dgate:"):
        eff.d_overrides = {chip.resolved.wire(target.split(":", 1)[1]): mode}
    elif target.startswith("ram:"):
        eff.ram_trojan = target.split(":", 1)[1]
    else:
        raise ValueError(f"unknown target {target!r}")
    if kind == "reliability" and atk.trigger[0] not in ("after_cycle",):
        eff.trigger = ("after_cycle", atk.trigger[1] if len(atk.trigger) > 1 else 0)
    return eff


def inject(chip: ProtectedChip, atk: AttackDescriptor) -> ProtectedChip:
    """Install an attack on the chip (mutating it) and return it."""
    chip.install_attack(compile_attack(chip, atk))
    return chip


# -- campaigns -----------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    attack_kind: str
    detected: bool
    first_detect_cycle: Optional[int]


@dataclass
class DetectionReport:
    trials: int
    detected: int
    false_positives: int
    by_kind: dict[str, tuple[int, int]] = field(default_factory=dict)
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def detection_rate(self) -> float:
        return self.detected / self.trials if self.trials else 0.0

    def confidence_interval(self, z: float = 1.96) -> tuple[float, float]:
        """Normal-approximation binomial interval for the detection rate."""
        if not self.trials:
            return (0.0, 0.0)
        p = self.detection_rate
        half = z * math.sqrt(max(p * (1 - p), 1e-12) / self.trials)
        return (max(0.0, p - half), min(1.0, p + half))

    def to_csv(self) -> str:
        lines = ["trial,attack_kind,detected,first_detect_cycle"]
        for rec in self.records:
            cyc = "" if rec.first_detect_cycle is None else str(rec.first_detect_cycle)
            lines.append(f"{rec.trial},{rec.attack_kind},{int(rec.detected)},{cyc}")
        lines.append(
            f"summary,all,{self.detected}/{self.trials},"
            f"rate={self.detection_rate:.6f};false_positives={self.false_positives}"
        )
        return "\n".join(lines) + "\n"


AttackGenerator = Callable[[random.Random], Optional[AttackDescriptor]]


def uniform_output_flip_attacks(min_flips: int = 2) -> AttackGenerator:
    """Uniform multi-bit flips on the function outputs at a random cycle."""

    def gen(rng: random.Random) -> AttackDescriptor:
        return AttackDescriptor("logic", "fout:*", ("at_cycle", -1), f"multi:{min_flips}")

    return gen


def single_output_flip_attacks() -> AttackGenerator:
    def gen(rng: random.Random) -> AttackDescriptor:
        return AttackDescriptor("logic", "fout:*", ("at_cycle", -1), "multi:1:1")

    return gen


def pin_flip_attacks(max_flips: Optional[int] = None) -> AttackGenerator:
    def gen(rng: random.Random) -> AttackDescriptor:
        return AttackDescriptor("pin", "input:*", ("at_cycle", -1), f"pins:{max_flips or 0}")

    return gen


def attack_free() -> AttackGenerator:
    def gen(rng: random.Random) -> Optional[AttackDescriptor]:
        return None

    return gen


def _materialize(chip: ProtectedChip, atk: AttackDescriptor, rng: random.Random,
                 cycles: int) -> AttackEffect:
    """Expand campaign wildcards (random position / weight / cycle) to an effect."""
    trigger = atk.trigger
    if trigger == ("at_cycle", -1):
        trigger = ("at_cycle", rng.randrange(cycles))
    if atk.target == "fout:*":
        k = len(chip.f.outputs)
        if atk.payload.startswith("multi:"):
            parts = atk.payload.split(":")
            lo = min(int(parts[1]), k)
            hi = int(parts[2]) if len(parts) > 2 else k
            w = rng.randint(lo, max(lo, min(hi, k)))
        else:
            w = 1
        wires = rng.sample(list(chip.f.outputs), min(w, k))
        return AttackEffect(kind="logic", trigger=trigger,
                            f_overrides={wv: "flip" for wv in wires}, descriptor=atk)
    if atk.target == "input:*":
        m = len(chip.f.inputs)
        if atk.payload.startswith("pins:"):
            cap = int(atk.payload.split(":")[1]) or m
        else:
            cap = m
        w = rng.randint(1, max(1, min(cap, m)))
        pins = tuple(rng.sample(range(m), w))
        return AttackEffect(kind="pin", trigger=trigger, input_flips=pins, descriptor=atk)
    eff = compile_attack(chip, atk)
    eff.trigger = trigger
    return eff


def run_campaign(
    chip: ProtectedChip,
    attack_generator: AttackGenerator,
    trials: int,
    cycles_per_trial: int,
    rng_seed: Rng = None,
) -> DetectionReport:
    """Seeded trials: fresh chip state, one sampled attack, fixed cycle budget.

    Detection means the chip's monitor or the trusted receiver fired at any
    cycle of the trial. Every trial is paired with an attack-free control
    run over the same stimulus; any report there counts as a false positive
    (the architecture's contract is that there are none). Chips with a
    protected RAM also see random memory traffic each cycle.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = _as_rng(rng_seed)
    detected = 0
    false_positives = 0
    by_kind: dict[str, list[int]] = {}
    records: list[TrialRecord] = []
    m = len(chip.f.inputs)
    for trial in range(trials):
        atk = attack_generator(rng)
        stim_seed = rng.getrandbits(64)
        session_seed = rng.getrandbits(64)
        effect = _materialize(chip, atk, rng, cycles_per_trial) if atk is not None else None

        hit = control_fired = False
        first_cycle: Optional[int] = None
        for armed in (True, False):
            chip.clear_attacks()
            chip.reset(session_seed)
            if armed and effect is not None:
                effect.captured_state = None
                chip.install_attack(effect)
            enc = StimulusEncoder(chip)
            rec = OutputReceiver(chip)
            srng = random.Random(stim_seed)
            fired = False
            for cyc in range(cycles_per_trial):
                x = tuple(srng.getrandbits(1) for _ in range(m))
                ram_op = None
                if chip.ram is not None:
                    roll = srng.random()
                    if roll < 0.4:
                        ram_op = ("write", srng.randrange(chip.ram.depth),
                                  srng.randrange(1 << chip.ram.word_width))
                    elif roll < 0.8:
                        ram_op = ("read", srng.randrange(chip.ram.depth), None)
                    else:
                        ram_op = ("idle", None, None)
                res = chip.cycle(x, enc.send(x), ram_op=ram_op)
                bad = res.monitor_attack or res.decode_attack
                bad = rec.receive(res.outputs, res.out_check) or bad
                if bad:
                    fired = True
                    if armed and first_cycle is None:
                        first_cycle = cyc
            if armed:
                hit = fired
            else:
                control_fired = fired
        chip.clear_attacks()
        if effect is not None:
            detected += hit
            key = effect.kind
            agg = by_kind.setdefault(key, [0, 0])
            agg[0] += 1
            agg[1] += hit
            records.append(TrialRecord(trial, key, hit, first_cycle))
        else:
            records.append(TrialRecord(trial, "none", False, None))
        false_positives += control_fired
    return DetectionReport(
        trials, detected, false_positives,
        {k: (v[0], v[1]) for k, v in by_kind.items()},
        records,
    )


# -- analytic reverse-engineering calculators ------------------------------------------


def cp_attack_probability(theta: float, x: int) -> float:
    """Chance of guessing a cone's whole configuration at per-SB odds 1-theta."""
    if not 0 <= theta <= 1:
        raise ValueError("theta must be in [0, 1]")
    if x < 0:
        raise ValueError("x must be >= 0")
    return (1.0 - theta) ** x

def per_sb_attack_probability(p_per_sb: float, x: int) -> float:
    """Success probability p per switchbox, compounded over x of them."""
    if not 0 <= p_per_sb <= 1:
        raise ValueError("p must be in [0, 1]")
    if x < 0:
        raise ValueError("x must be >= 0")
    return p_per_sb ** x


# -- subcircuit matching attack ---------------------------------------------------------


def _as_digraph(net: Netlist):
    import networkx as nx

    g = nx.DiGraph()
    for gate in net.gates:
        g.add_node(gate.out, kind=gate.kind)
    by_out = {gate.out: gate for gate in net.gates}
    for gate in net.gates:
        for w in gate.ins:
            if w in by_out:
                g.add_edge(w, gate.out)
    return g


def _random_subcircuit(net: Netlist, rng: random.Random, max_size: int,
                       min_size: int = 2, attempts: int = 16) -> Optional[list[int]]:
    """Connected gate set grown backward from a random root.

    Growth retries a few roots until the subcircuit reaches min_size; a lone
    gate matches anywhere of the same kind and carries no structure worth
    calling a subcircuit.
    """
    if not net.gates:
        return None
    by_out = {g.out: g for g in net.gates}
    best: Optional[list[int]] = None
    for _ in range(attempts):
        root = rng.choice(net.gates).out
        chosen = [root]
        frontier = [w for w in by_out[root].ins if w in by_out]
        while frontier and len(chosen) < max_size:
            w = rng.choice(frontier)
            frontier.remove(w)
            if w in chosen:
                continue
            chosen.append(w)
            frontier.extend(q for q in by_out[w].ins if q in by_out and q not in chosen)
        if len(chosen) >= min_size:
            return chosen
        if best is None or len(chosen) > len(best):
            best = chosen
    return best


def subcircuit_match_attack(
    f: Netlist,
    ocp: Netlist,
    h_logic: ParityCheckMatrix,
    trials: int,
    rng_seed: Rng = None,
    max_size: int = 6,
    min_size: int = 2,
    probe_vectors: int = 64,
) -> float:
    """Attacker success rate for matched-subcircuit double flips.

    Per trial: pick a random connected subcircuit of f (up to max_size
    gates), search the predictor netlist for a node-kind-preserving
    occurrence, flip the outputs of both, and test whether any probe input
    still satisfies predictor == recomputed check bits. No match counts as
    an attacker failure. Success means the tampering was never detected.
    """
    import networkx as nx
    from .netlist import eval_wires, input_patterns

    rng = _as_rng(rng_seed)
    g_ocp = _as_digraph(ocp)
    by_out_f = {g.out: g for g in f.gates}
    success = 0
    m = len(f.inputs)
    exhaustive = m <= 12
    if exhaustive:
        pats, full = input_patterns(m)

    for _ in range(trials):
        sub = _random_subcircuit(f, rng, max_size, min_size)
        if not sub:
            continue
        pattern = nx.DiGraph()
        for w in sub:
            pattern.add_node(w, kind=by_out_f[w].kind)
        for w in sub:
            for q in by_out_f[w].ins:
                if q in sub:
                    pattern.add_edge(q, w)
        matcher = nx.algorithms.isomorphism.DiGraphMatcher(
            g_ocp, pattern,
            node_match=lambda a, b: a.get("kind") == b.get("kind"),
        )
        mapping = None
        for iso in matcher.subgraph_monomorphisms_iter():
            mapping = iso
            break
        if mapping is None:
            continue
        root_f = sub[0]
        root_ocp = next(big for big, small in mapping.items() if small == root_f)

        if exhaustive:
            fo, _ = eval_wires(f, pats, (), {root_f: "flip"}, mask=full)
            po, _ = eval_wires(ocp, pats, (), {root_ocp: "flip"}, mask=full)
            expect = _check_masks(h_logic, fo, full)
            detected = any(a ^ b for a, b in zip(po, expect))
        else:
            detected = False
            for _ in range(probe_vectors):
                x = tuple(rng.getrandbits(1) for _ in range(m))
                fo, _ = eval_wires(f, x, (), {root_f: "flip"})
                po, _ = eval_wires(ocp, x, (), {root_ocp: "flip"})
                if po != h_logic.check_bits(fo):
                    detected = True
                    break
        if not detected:
            success += 1
    return success / trials


def _check_masks(h: ParityCheckMatrix, out_masks: Sequence[int], full: int) -> list[int]:
    res = []
    for row in h.rows:
        acc = 0
        for j, a in enumerate(row):
            if a:
                acc ^= out_masks[j]
        res.append(acc)
    return res


# -- decoupling cost and destructive sampling -------------------------------------------


def decoupling_cost(
    kind: str,
    outputs: Optional[int] = None,
    check_bits: Optional[int] = None,
    flip_flops: Optional[int] = None,
    fft_points: Optional[int] = None,
) -> dict[str, int]:
    """Minimum extra hardware an attacker needs for a decoupling attack.

    parity_null needs 2 transistors per primary output plus one flip-flop
    per check bit; stored_state needs one extra flip-flop per state bit;
    fft_zero needs 120 transistors per FFT point (two per non-sign bit of
    the four reference half words).
    """
    if kind == "parity_null":
        if outputs is None or check_bits is None:
            raise ValueError("parity_null needs outputs and check_bits")
        return {"transistors": 2 * outputs, "flip_flops": check_bits}
    if kind == "stored_state":
        if flip_flops is None:
            raise ValueError("stored_state needs flip_flops")
        return {"transistors": 0, "flip_flops": flip_flops}
    if kind == "fft_zero":
        if fft_points is None:
            raise ValueError("fft_zero needs fft_points")
        return {"transistors": 120 * fft_points, "flip_flops": 0}
    raise ValueError(f"unknown decoupling kind {kind!r}")


def destructive_detection_probability(n: int, a: int, t: int) -> float:
    """Chance that destroying t of n chips exposes at least one of a bad ones.

    Hypergeometric: 1 - C(n-a, t) / C(n, t), evaluated as a stable product.
    Equals 1 when t > n - a (the good chips run out).
    """
    if n < 0 or not 0 <= a <= n or not 0 <= t <= n:
        raise ValueError("need 0 <= a <= n and 0 <= t <= n")
    if t > n - a:
        return 1.0
    miss = 1.0
    for i in range(t):
        miss *= (n - a - i) / (n - i)
    return 1.0 - miss


def simulate_destructive_sampling(n: int, a: int, t: int, trials: int, rng_seed: Rng = None) -> float:
    """Monte Carlo oracle: draw t of n without replacement, count hits."""
    rng = _as_rng(rng_seed)
    hits = 0
    population = list(range(n))
    for _ in range(trials):
        sample = rng.sample(population, t)
        if any(s < a for s in sample):
            hits += 1
    return hits / trials
