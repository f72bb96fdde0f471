"""Switchbox wire-permutation elements and randomized insertion.

A two-input switchbox routes wire pair (x, y) either straight to (z, w)
(parallel) or swapped (crossed). Random insertion repeatedly pairs two
disjoint radius-1 gate neighborhoods with matching boundary shape, places
switchboxes on their incoming wires and outputs, drops any switchbox whose
two settings compute the same function, coin-flips the intended setting of
the survivors, and stops once every output cone holds at least t of them.

Every insertion keeps the union dependency graph (a switchbox output
depending on both its inputs) acyclic, so all 2^#SB configurations yield
valid netlists, not just the intended one.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .netlist import (
    Gate,
    Netlist,
    NetlistError,
    check_equivalence,
    _GATE_RE,
    GATE_KINDS,
    NetlistSyntaxError,
)

PARALLEL = "parallel"
CROSSED = "crossed"

Rng = Union[int, random.Random, None]


class SwitchboxError(NetlistError):
    pass


class ConfigCoverageError(SwitchboxError):
    """A configuration misses or names switchboxes not in the netlist."""


class NoIncorrectConfigsError(SwitchboxError):
    """The config space has a single point, so no incorrect configs exist."""


class UnsatisfiableError(SwitchboxError):
    def __init__(self, message: str, per_output_counts: tuple[int, ...]):
        super().__init__(message)
        self.per_output_counts = per_output_counts


@dataclass(frozen=True)
class Switchbox:
    id: int
    ins: tuple[int, int]
    outs: tuple[int, int]

    def __post_init__(self):
        wires = (*self.ins, *self.outs)
        if len(set(wires)) != 4:
            raise SwitchboxError(f"switchbox {self.id} wires must be pairwise distinct")


@dataclass
class ObfuscatedNetlist:
    """A netlist whose wiring is partly deferred to switchbox settings."""

    name: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    gates: tuple[Gate, ...]
    switchboxes: tuple[Switchbox, ...]
    intended: dict[int, str]
    wire_names: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        ids = [sb.id for sb in self.switchboxes]
        if len(set(ids)) != len(ids):
            raise SwitchboxError("duplicate switchbox ids")
        if set(self.intended) != set(ids):
            raise ConfigCoverageError("intended config must cover every switchbox exactly once")
        # single-driver and acyclicity (in the union sense) via apply()
        self.apply(self.intended)

    @property
    def n_switchboxes(self) -> int:
        return len(self.switchboxes)

    def apply(self, cfg: dict[int, str]) -> Netlist:
        return apply_config(self, cfg)

    @property
    def per_output_sb_count(self) -> tuple[int, ...]:
        return tuple(count_cone_switchboxes(self, i) for i in range(len(self.outputs)))


def apply_config(obf: ObfuscatedNetlist, cfg: dict[int, str]) -> Netlist:
    """Resolve every switchbox to plain buffers according to cfg."""
    have = {sb.id for sb in obf.switchboxes}
    if set(cfg) != have:
        missing = sorted(have - set(cfg))
        extra = sorted(set(cfg) - have)
        raise ConfigCoverageError(f"config mismatch, missing={missing} extra={extra}")
    gates = list(obf.gates)
    for sb in obf.switchboxes:
        mode = cfg[sb.id]
        if mode not in (PARALLEL, CROSSED):
            raise ConfigCoverageError(f"bad mode {mode!r} for sb{sb.id}")
        x, y = sb.ins if mode == PARALLEL else (sb.ins[1], sb.ins[0])
        gates.append(Gate(sb.outs[0], "BUF", (x,)))
        gates.append(Gate(sb.outs[1], "BUF", (y,)))
    return Netlist(obf.name, obf.inputs, obf.outputs, gates, obf.wire_names)


def count_cone_switchboxes(obf: ObfuscatedNetlist, output_index: int) -> int:
    """Switchboxes in the transitive fan-in of one output.

    A switchbox belongs to a cone when either of its output wires feeds the
    cone; both of its inputs are then traversed, since either may drive the
    cone depending on the configuration.
    """
    if not 0 <= output_index < len(obf.outputs):
        raise IndexError(f"output index {output_index} out of range")
    gate_by_out = {g.out: g for g in obf.gates}
    sb_by_out = {}
    for sb in obf.switchboxes:
        sb_by_out[sb.outs[0]] = sb
        sb_by_out[sb.outs[1]] = sb
    seen_g: set[int] = set()
    seen_sb: set[int] = set()
    stack = [obf.outputs[output_index]]
    while stack:
        w = stack.pop()
        g = gate_by_out.get(w)
        if g is not None:
            if g.out in seen_g:
                continue
            seen_g.add(g.out)
            stack.extend(g.ins)
            continue
        sb = sb_by_out.get(w)
        if sb is not None and sb.id not in seen_sb:
            seen_sb.add(sb.id)
            stack.extend(sb.ins)
    return len(seen_sb)


@dataclass
class ScanReport:
    samples: int
    equivalent: int
    hits: list[dict[int, str]]

    @property
    def fraction_equivalent(self) -> float:
        return self.equivalent / self.samples


# -- insertion ---------------------------------------------------------------------


class _Work:
    """Mutable wiring state shared by the insertion steps."""

    def __init__(self, net: Netlist):
        self.inputs = list(net.inputs)
        self.outputs = list(net.outputs)
        self.kind: dict[int, str] = {g.out: g.kind for g in net.gates}
        self.ins: dict[int, list[int]] = {g.out: list(g.ins) for g in net.gates}
        self.sb_ins: dict[int, list[int]] = {}
        self.sb_outs: dict[int, tuple[int, int]] = {}
        self.wire_names = dict(net.wire_names)
        self.next_wire = max([*net.inputs, *(g.out for g in net.gates), -1]) + 1
        self.next_sb = 0

    def fresh_wire(self) -> int:
        w = self.next_wire
        self.next_wire += 1
        return w

    def gate_list(self) -> list[Gate]:
        return [Gate(o, self.kind[o], tuple(self.ins[o])) for o in self.kind]

    def switchbox_list(self) -> list[Switchbox]:
        return [Switchbox(i, tuple(self.sb_ins[i]), self.sb_outs[i]) for i in sorted(self.sb_ins)]

    def snapshot(self, intended: dict[int, str], name: str) -> ObfuscatedNetlist:
        return ObfuscatedNetlist(
            name,
            tuple(self.inputs),
            tuple(self.outputs),
            tuple(self.gate_list()),
            tuple(self.switchbox_list()),
            dict(intended),
            dict(self.wire_names),
        )

    # wiring queries ---------------------------------------------------------

    def driver_gate(self, wire: int) -> Optional[int]:
        return wire if wire in self.kind else None

    def sb_of_wire(self, wire: int) -> Optional[int]:
        for sid, outs in self.sb_outs.items():
            if wire in outs:
                return sid
        return None

    def consumers(self, wire: int) -> list[tuple]:
        """(kind, ref, pin) sites currently reading a wire."""
        out = []
        for o, pins in self.ins.items():
            for p, w in enumerate(pins):
                if w == wire:
                    out.append(("gate", o, p))
        for sid, pins in self.sb_ins.items():
            for p, w in enumerate(pins):
                if w == wire:
                    out.append(("sb", sid, p))
        for i, w in enumerate(self.outputs):
            if w == wire:
                out.append(("po", i, 0))
        return out

    def rewire(self, site: tuple, wire: int) -> None:
        kind, ref, pin = site
        if kind == "gate":
            self.ins[ref][pin] = wire
        elif kind == "sb":
            self.sb_ins[ref][pin] = wire
        else:
            self.outputs[ref] = wire

    def site_wire(self, site: tuple) -> int:
        kind, ref, pin = site
        if kind == "gate":
            return self.ins[ref][pin]
        if kind == "sb":
            return self.sb_ins[ref][pin]
        return self.outputs[ref]

    # union dependency graph ---------------------------------------------------

    def _dep_nodes(self, wire: int) -> list[tuple]:
        """Graph node driving a wire, if any (primary inputs have none)."""
        if wire in self.kind:
            return [("g", wire)]
        sid = self.sb_of_wire(wire)
        if sid is not None:
            return [("s", sid)]
        return []

    def union_cyclic_through(self, sb_id: int) -> bool:
        """True when sb_id lies on a union-graph cycle (DFFs cut the graph)."""
        start = ("s", sb_id)
        stack = [start]
        seen = set()
        first = True
        while stack:
            node = stack.pop()
            if not first:
                if node == start:
                    return True
                if node in seen:
                    continue
                seen.add(node)
            first = False
            tag, ref = node
            wires = self.sb_ins[ref] if tag == "s" else (
                [] if self.kind[ref] == "DFF" else self.ins[ref]
            )
            for w in wires:
                stack.extend(self._dep_nodes(w))
        return False

    # neighborhood machinery -----------------------------------------------------

    def gate_preds(self, g: int) -> list[int]:
        return sorted({w for w in self.ins[g] if w in self.kind})

    def gate_succs(self, g: int) -> list[int]:
        return sorted({o for o, pins in self.ins.items() if g in pins})

    def neighborhood(self, v: int) -> set[int]:
        return {v, *self.gate_preds(v), *self.gate_succs(v)}

    def incoming_edges(self, nb: set[int]) -> list[tuple[int, int, int]]:
        """(wire, gate, pin) edges entering the neighborhood, sorted."""
        edges = []
        for g in sorted(nb):
            for p, w in enumerate(self.ins[g]):
                if w not in nb:
                    edges.append((w, g, p))
        return edges

    def output_gates(self, nb: set[int]) -> list[int]:
        """Gates of the neighborhood whose output wire is used outside it."""
        outs = []
        for g in sorted(nb):
            external = g in self.outputs
            if not external:
                for o, pins in self.ins.items():
                    if o not in nb and g in pins:
                        external = True
                        break
            if not external:
                for pins in self.sb_ins.values():
                    if g in pins:
                        external = True
                        break
            if external:
                outs.append(g)
        return outs

    # switchbox editing -----------------------------------------------------------

    def add_switchbox(self, x: int, y: int, sites_z: list[tuple], sites_w: list[tuple]) -> Optional[int]:
        """Insert an SB over (x, y), rerouting the given sites to its outputs.

        Returns the new SB id, or None (with no state change) when the
        insertion would let some configuration form a combinational cycle.
        Stacking directly onto another SB's output pair is refused: crossing
        both boxes would cancel out, a guaranteed two-SB degenerate config.
        """
        if x == y:
            return None
        for outs in self.sb_outs.values():
            if {x, y} == set(outs):
                return None
        z = self.fresh_wire()
        w = self.fresh_wire()
        sid = self.next_sb
        undo = [(site, self.site_wire(site)) for site in sites_z + sites_w]
        for site in sites_z:
            self.rewire(site, z)
        for site in sites_w:
            self.rewire(site, w)
        self.sb_ins[sid] = [x, y]
        self.sb_outs[sid] = (z, w)
        if self.union_cyclic_through(sid):
            del self.sb_ins[sid]
            del self.sb_outs[sid]
            for site, old in undo:
                self.rewire(site, old)
            return None
        self.next_sb += 1
        self.wire_names[z] = f"sb{sid}_a"
        self.wire_names[w] = f"sb{sid}_b"
        return sid

    def remove_switchbox(self, sid: int) -> None:
        """Drop an SB, restoring its parallel (identity) wiring."""
        x, y = self.sb_ins[sid]
        z, w = self.sb_outs[sid]
        for site in self.consumers(z):
            self.rewire(site, x)
        for site in self.consumers(w):
            self.rewire(site, y)
        del self.sb_ins[sid]
        del self.sb_outs[sid]
        self.wire_names.pop(z, None)
        self.wire_names.pop(w, None)


def insert_switchboxes(
    net: Netlist,
    t: int,
    rng_seed: Rng = None,
    max_iterations: int = 1000,
    min_switchboxes: int = 0,
    max_exhaustive_inputs: int = 16,
    sample_count: int = 10000,
) -> ObfuscatedNetlist:
    """Randomized switchbox insertion until every output cone holds >= t SBs.

    Each round picks a random gate neighborhood, finds a disjoint partner
    with the same number of incoming wires and of outputs, switches the
    paired boundary wires, and keeps only switchboxes whose two settings are
    functionally distinct (tested with one switchbox toggled at a time, all
    others held at their intended setting). Surviving switchboxes get a fair
    coin flip for the intended setting, rewired so the intended state always
    realizes the original function. Raises UnsatisfiableError with the best
    per-cone counts when max_iterations rounds cannot meet the target.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    work = _Work(net)
    intended: dict[int, str] = {}
    name = f"{net.name}.obf"

    def satisfied() -> bool:
        snap = work.snapshot(intended, name)
        if snap.n_switchboxes < min_switchboxes:
            return False
        return all(c >= t for c in snap.per_output_sb_count)

    for _ in range(max_iterations):
        gates = sorted(work.kind)
        if not gates:
            break
        v = rng.choice(gates)
        nb_v = work.neighborhood(v)
        inc_v = work.incoming_edges(nb_v)
        out_v = work.output_gates(nb_v)

        partner = None
        for u in rng.sample(gates, len(gates)):
            nb_u = work.neighborhood(u)
            if nb_u & nb_v:
                continue
            if len(work.incoming_edges(nb_u)) != len(inc_v):
                continue
            if len(work.output_gates(nb_u)) != len(out_v):
                continue
            partner = (u, nb_u)
            break
        if partner is None:
            continue
        _, nb_u = partner
        inc_u = work.incoming_edges(nb_u)
        out_u = work.output_gates(nb_u)

        round_sbs: list[int] = []
        for (wx, gv, pv), (wy, gu, pu) in zip(inc_v, inc_u):
            sid = work.add_switchbox(wx, wy, [("gate", gv, pv)], [("gate", gu, pu)])
            if sid is not None:
                round_sbs.append(sid)
        for s_gate, t_gate in zip(out_v, out_u):
            sites_z = work.consumers(s_gate)
            sites_w = work.consumers(t_gate)
            sid = work.add_switchbox(s_gate, t_gate, sites_z, sites_w)
            if sid is not None:
                round_sbs.append(sid)

        for sid in round_sbs:
            base = {i: intended.get(i, PARALLEL) for i in work.sb_ins}
            snap = work.snapshot({**base, sid: PARALLEL}, name)
            n_par = apply_config(snap, {**base, sid: PARALLEL})
            n_cross = apply_config(snap, {**base, sid: CROSSED})
            verdict = check_equivalence(
                n_par,
                n_cross,
                max_exhaustive_inputs=max_exhaustive_inputs,
                sample_count=sample_count,
                rng_seed=rng.getrandbits(32),
            )
            if verdict.equivalent:
                # degenerate (or not provably non-degenerate): drop it
                work.remove_switchbox(sid)
                continue
            if rng.random() < 0.5:
                work.sb_ins[sid].reverse()
                intended[sid] = CROSSED
            else:
                intended[sid] = PARALLEL

        if satisfied():
            result = work.snapshot(intended, name)
            return result

    counts = work.snapshot(intended, name).per_output_sb_count
    raise UnsatisfiableError(
        f"could not reach {t} switchboxes per output cone "
        f"within {max_iterations} iterations (best counts: {counts})",
        counts,
    )


# -- degeneracy scanning ---------------------------------------------------------


def _union_order(obf: ObfuscatedNetlist) -> list[tuple]:
    """Evaluation order over gates and SBs valid for every configuration."""
    gate_by_out = {g.out: g for g in obf.gates}
    sb_by_out = {}
    for sb in obf.switchboxes:
        sb_by_out[sb.outs[0]] = ("s", sb)
        sb_by_out[sb.outs[1]] = ("s", sb)
    order: list[tuple] = []
    state: dict[tuple, int] = {}

    def node_of(wire):
        g = gate_by_out.get(wire)
        if g is not None:
            return ("g", g)
        return sb_by_out.get(wire)

    def deps(node):
        tag, ref = node
        if tag == "s":
            return ref.ins
        if ref.kind == "DFF":
            return ()
        return ref.ins

    roots = [("g", g) for g in obf.gates] + [("s", sb) for sb in obf.switchboxes]
    for root in roots:
        key = (root[0], root[1].out if root[0] == "g" else root[1].id)
        if key in state:
            continue
        stack = [(root, 0)]
        state[key] = 0
        while stack:
            node, idx = stack.pop()
            nkey = (node[0], node[1].out if node[0] == "g" else node[1].id)
            advanced = False
            dl = deps(node)
            while idx < len(dl):
                w = dl[idx]
                idx += 1
                dep = node_of(w)
                if dep is None:
                    continue
                dkey = (dep[0], dep[1].out if dep[0] == "g" else dep[1].id)
                st = state.get(dkey)
                if st == 0:
                    raise SwitchboxError("union graph cycle")
                if st is None:
                    stack.append((node, idx))
                    stack.append((dep, 0))
                    state[dkey] = 0
                    advanced = True
                    break
            if advanced:
                continue
            state[nkey] = 1
            order.append(node)
    return order


def _eval_configs_fast(obf: ObfuscatedNetlist, order: list[tuple], cfg_bits: int,
                       in_masks: Sequence[int], mask: int) -> tuple[int, ...]:
    """Combinational truth-table evaluation for one configuration."""
    sb_index = {sb.id: i for i, sb in enumerate(obf.switchboxes)}
    val: dict[int, int] = {}
    for i, w in enumerate(obf.inputs):
        val[w] = in_masks[i]
    for node in order:
        tag, ref = node
        if tag == "s":
            x = val[ref.ins[0]]
            y = val[ref.ins[1]]
            if (cfg_bits >> sb_index[ref.id]) & 1:
                x, y = y, x
            val[ref.outs[0]] = x
            val[ref.outs[1]] = y
            continue
        g = ref
        a = [val[w] for w in g.ins]
        k = g.kind
        if k == "AND":
            v = a[0]
            for q in a[1:]:
                v &= q
        elif k == "OR":
            v = a[0]
            for q in a[1:]:
                v |= q
        elif k == "XOR":
            v = a[0]
            for q in a[1:]:
                v ^= q
        elif k == "NAND":
            v = a[0]
            for q in a[1:]:
                v &= q
            v ^= mask
        elif k == "NOR":
            v = a[0]
            for q in a[1:]:
                v |= q
            v ^= mask
        elif k == "NOT":
            v = mask ^ a[0]
        elif k == "BUF":
            v = a[0]
        elif k == "CONST0":
            v = 0
        else:
            v = mask
        val[g.out] = v
    return tuple(val[w] for w in obf.outputs)


def degeneracy_scan(obf: ObfuscatedNetlist, samples: int, rng_seed: Rng = None) -> ScanReport:
    """Sample incorrect configurations and count functional matches.

    Draws `samples` uniform configurations different from the intended one,
    applies each, and reports the fraction equivalent to the intended
    function together with every offending configuration.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    nsb = obf.n_switchboxes
    if nsb == 0:
        raise NoIncorrectConfigsError("no incorrect configs exist")
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    intended_bits = 0
    for i, sb in enumerate(obf.switchboxes):
        if obf.intended[sb.id] == CROSSED:
            intended_bits |= 1 << i

    baseline = apply_config(obf, obf.intended)
    m = len(obf.inputs)
    fast = not baseline.has_state and m <= 16
    hits: list[dict[int, str]] = []
    equivalent = 0

    if fast:
        from .netlist import input_patterns

        order = _union_order(obf)
        pats, full = input_patterns(m)
        reference = _eval_configs_fast(obf, order, intended_bits, pats, full)
        for _ in range(samples):
            bits = rng.getrandbits(nsb)
            while bits == intended_bits:
                bits = rng.getrandbits(nsb)
            got = _eval_configs_fast(obf, order, bits, pats, full)
            if got == reference:
                equivalent += 1
                hits.append(_bits_to_cfg(obf, bits))
    else:
        for _ in range(samples):
            bits = rng.getrandbits(nsb)
            while bits == intended_bits:
                bits = rng.getrandbits(nsb)
            cfg = _bits_to_cfg(obf, bits)
            verdict = check_equivalence(
                apply_config(obf, cfg), baseline, rng_seed=rng.getrandbits(32)
            )
            if verdict.equivalent:
                equivalent += 1
                hits.append(cfg)
    return ScanReport(samples, equivalent, hits)


def _bits_to_cfg(obf: ObfuscatedNetlist, bits: int) -> dict[int, str]:
    return {
        sb.id: CROSSED if (bits >> i) & 1 else PARALLEL
        for i, sb in enumerate(obf.switchboxes)
    }


# -- files -------------------------------------------------------------------------

_SB_RE = re.compile(
    r"^\s*sb(\d+)\s*=\s*SB2\(\s*([\w.$]+)\s*,\s*([\w.$]+)\s*->\s*([\w.$]+)\s*,\s*([\w.$]+)\s*\)\s*$"
)
_CFG_RE = re.compile(r"^\s*sb(\d+)\s*=\s*(parallel|crossed)\s*$")


def serialize_obfuscated(obf: ObfuscatedNetlist) -> str:
    """Netlist text with one `sbN = SB2(x, y -> z, w)` line per switchbox."""
    names: dict[int, str] = {}
    used = set()
    for w in sorted({*obf.inputs, *obf.outputs,
                     *(g.out for g in obf.gates),
                     *(w for sb in obf.switchboxes for w in (*sb.ins, *sb.outs)),
                     *(w for g in obf.gates for w in g.ins)}):
        cand = obf.wire_names.get(w, f"w{w}")
        while cand in used:
            cand += "_"
        names[w] = cand
        used.add(cand)
    lines = [f".model {obf.name}"]
    if obf.inputs:
        lines.append(".inputs " + " ".join(names[w] for w in obf.inputs))
    if obf.outputs:
        lines.append(".outputs " + " ".join(names[w] for w in obf.outputs))
    for g in obf.gates:
        lines.append(f"{names[g.out]} = {g.kind}(" + ", ".join(names[w] for w in g.ins) + ")")
    for sb in obf.switchboxes:
        lines.append(
            f"sb{sb.id} = SB2({names[sb.ins[0]]}, {names[sb.ins[1]]} -> "
            f"{names[sb.outs[0]]}, {names[sb.outs[1]]})"
        )
    return "\n".join(lines) + "\n"


def parse_obfuscated(text: str, intended: dict[int, str], name: str = "netlist") -> ObfuscatedNetlist:
    model = name
    input_names: list[str] = []
    output_names: list[str] = []
    gate_specs: list[tuple[str, str, list[str]]] = []
    sb_specs: list[tuple[int, str, str, str, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("."):
            parts = line.split()
            if parts[0] == ".model" and len(parts) == 2:
                model = parts[1]
            elif parts[0] == ".inputs":
                input_names.extend(parts[1:])
            elif parts[0] == ".outputs":
                output_names.extend(parts[1:])
            else:
                raise NetlistSyntaxError(f"unknown directive {parts[0]!r}", lineno)
            continue
        m = _SB_RE.match(line)
        if m:
            sb_specs.append((int(m.group(1)), m.group(2), m.group(3), m.group(4), m.group(5)))
            continue
        m = _GATE_RE.match(line)
        if m and m.group(2) in GATE_KINDS:
            args = [a.strip() for a in m.group(3).split(",")] if m.group(3).strip() else []
            gate_specs.append((m.group(1), m.group(2), args))
            continue
        raise NetlistSyntaxError("expected gate or SB2 line", lineno)

    ids: dict[str, int] = {}

    def wid(n: str) -> int:
        if n not in ids:
            ids[n] = len(ids)
        return ids[n]

    inputs = [wid(n) for n in input_names]
    gates = []
    for out, kind, args in gate_specs:
        gates.append(Gate(wid(out), kind, tuple(wid(a) for a in args)))
    sbs = []
    for sid, x, y, z, w in sb_specs:
        sbs.append(Switchbox(sid, (wid(x), wid(y)), (wid(z), wid(w))))
    outputs = [wid(n) for n in output_names]
    names = {w: n for n, w in ids.items()}
    return ObfuscatedNetlist(
        model, tuple(inputs), tuple(outputs), tuple(gates), tuple(sbs), dict(intended), names
    )


def format_config(intended: dict[int, str]) -> str:
    return "\n".join(f"sb{i} = {intended[i]}" for i in sorted(intended)) + "\n"


def parse_config(text: str) -> dict[int, str]:
    cfg: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CFG_RE.match(line)
        if not m:
            raise NetlistSyntaxError("expected 'sbN = parallel|crossed'", lineno)
        cfg[int(m.group(1))] = m.group(2)
    return cfg
