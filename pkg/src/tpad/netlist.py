"""Gate-level netlist IR: text format, simulation, logic cones, equivalence.

The netlist text format is line oriented:

    # one-bit full adder
    .model adder
    .inputs a b cin
    .outputs s cout
    x1 = XOR(a, b)
    s = XOR(x1, cin)
    g1 = AND(a, b)
    g2 = AND(x1, cin)
    cout = OR(g1, g2)

Gate kinds: AND OR XOR NAND NOR (arity >= 2), NOT BUF DFF (arity 1),
CONST0 CONST1 (arity 0). Every wire has exactly one driver (a primary
input or a gate output), and the combinational part must be acyclic;
DFF outputs act as cut points. Forward references are allowed. The
serializer emits a canonical form (gates in topological order) that
round-trips through the parser bit exactly.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

Bits = tuple[int, ...]

GATE_KINDS = ("AND", "OR", "XOR", "NAND", "NOR", "NOT", "BUF", "CONST0", "CONST1", "DFF")
_UNARY = ("NOT", "BUF", "DFF")
_NULLARY = ("CONST0", "CONST1")


class NetlistError(Exception):
    """Base class for netlist construction and parsing failures."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class MultipleDriverError(NetlistError):
    pass


class UndrivenWireError(NetlistError):
    pass


class ArityError(NetlistError):
    pass


class CombinationalCycleError(NetlistError):
    pass


class WidthError(NetlistError):
    pass


class ArityMismatchError(NetlistError):
    """Two netlists cannot be compared because their port counts differ."""


@dataclass(frozen=True)
class Gate:
    out: int
    kind: str
    ins: tuple[int, ...]


class Netlist:
    """Immutable single-driver gate graph with ordered input/output ports."""

    def __init__(
        self,
        name: str,
        inputs: Sequence[int],
        outputs: Sequence[int],
        gates: Sequence[Gate],
        wire_names: Optional[dict[int, str]] = None,
    ):
        self.name = name
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.gates = tuple(gates)
        self.wire_names = dict(wire_names or {})
        self._validate()
        self._topo = self._topo_sort()
        self._dffs = tuple(g for g in self.gates if g.kind == "DFF")
        self._step: Optional[Callable] = None

    # -- construction checks -------------------------------------------------

    def _validate(self) -> None:
        driver: dict[int, str] = {}
        for w in self.inputs:
            if w in driver:
                raise MultipleDriverError(f"wire {self._wn(w)} listed as input twice")
            driver[w] = "input"
        for g in self.gates:
            if g.kind not in GATE_KINDS:
                raise ArityError(f"unknown gate kind {g.kind!r}")
            need = 1 if g.kind in _UNARY else 0 if g.kind in _NULLARY else None
            if need is None:
                if len(g.ins) < 2:
                    raise ArityError(f"{g.kind} gate {self._wn(g.out)} needs >= 2 inputs")
            elif len(g.ins) != need:
                raise ArityError(f"{g.kind} gate {self._wn(g.out)} needs exactly {need} input(s)")
            if g.out in driver:
                raise MultipleDriverError(f"wire {self._wn(g.out)} has multiple drivers")
            driver[g.out] = "gate"
        for g in self.gates:
            for w in g.ins:
                if w not in driver:
                    raise UndrivenWireError(f"wire {self._wn(w)} has no driver")
        for w in self.outputs:
            if w not in driver:
                raise UndrivenWireError(f"output wire {self._wn(w)} has no driver")

    def _topo_sort(self) -> tuple[Gate, ...]:
        """Topological order of combinational gates; DFF outputs are sources."""
        by_out = {g.out: g for g in self.gates}
        order: list[Gate] = []
        state: dict[int, int] = {}  # 0 visiting, 1 done

        for root in self.gates:
            if root.out in state:
                continue
            stack: list[tuple[Gate, int]] = [(root, 0)]
            state[root.out] = 0
            while stack:
                g, idx = stack.pop()
                if g.kind == "DFF":
                    # sequential cut: the D input is consumed next cycle
                    state[g.out] = 1
                    order.append(g)
                    continue
                advanced = False
                while idx < len(g.ins):
                    w = g.ins[idx]
                    idx += 1
                    dep = by_out.get(w)
                    if dep is None or dep.kind == "DFF":
                        continue
                    st = state.get(dep.out)
                    if st == 0:
                        raise CombinationalCycleError(
                            f"combinational cycle through wire {self._wn(dep.out)}"
                        )
                    if st is None:
                        stack.append((g, idx))
                        stack.append((dep, 0))
                        state[dep.out] = 0
                        advanced = True
                        break
                if advanced:
                    continue
                state[g.out] = 1
                order.append(g)
        return tuple(o for o in order if o.kind != "DFF")

    # -- naming ---------------------------------------------------------------

    def _wn(self, w: int) -> str:
        return self.wire_names.get(w, f"w{w}")

    def wire_name(self, w: int) -> str:
        return self._wn(w)

    def wire(self, name: str) -> int:
        for w, n in self.wire_names.items():
            if n == name:
                return w
        raise KeyError(name)

    # -- basic facts ----------------------------------------------------------

    @property
    def state_width(self) -> int:
        return len(self._dffs)

    @property
    def has_state(self) -> bool:
        return bool(self._dffs)

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def driver_of(self, wire: int) -> Optional[Gate]:
        for g in self.gates:
            if g.out == wire:
                return g
        return None

    # -- evaluation -----------------------------------------------------------

    def step_fn(self) -> Callable:
        """Compiled (inputs, state, mask) -> (outputs, next_state) evaluator.

        Values are ints; with mask=1 they are single bits, with a wider mask
        each int packs one bit position per test vector (bit-parallel runs).
        """
        if self._step is None:
            self._step = _compile_step(self)
        return self._step

    def evaluate(self, inputs: Sequence[int], state: Sequence[int] = ()) -> tuple[Bits, Bits]:
        if len(inputs) != len(self.inputs):
            raise WidthError(f"expected {len(self.inputs)} input bits, got {len(inputs)}")
        if len(state) != self.state_width:
            raise WidthError(f"expected {self.state_width} state bits, got {len(state)}")
        out, nxt = self.step_fn()(tuple(inputs), tuple(state), 1)
        return out, nxt


def evaluate(net: Netlist, inputs: Sequence[int], state: Sequence[int] = ()) -> tuple[Bits, Bits]:
    """Cycle-accurate evaluation: outputs plus next DFF state."""
    return net.evaluate(inputs, state)


def _gate_expr(g: Gate) -> str:
    args = [f"v{w}" for w in g.ins]
    if g.kind == "AND":
        return " & ".join(args)
    if g.kind == "OR":
        return " | ".join(args)
    if g.kind == "XOR":
        return " ^ ".join(args)
    if g.kind == "NAND":
        return "mask ^ (" + " & ".join(args) + ")"
    if g.kind == "NOR":
        return "mask ^ (" + " | ".join(args) + ")"
    if g.kind == "NOT":
        return f"mask ^ {args[0]}"
    if g.kind == "BUF":
        return args[0]
    if g.kind == "CONST0":
        return "0"
    if g.kind == "CONST1":
        return "mask"
    raise AssertionError(g.kind)


def _tuple_src(items: list[str]) -> str:
    if len(items) == 1:
        return f"({items[0]},)"
    return "(" + ", ".join(items) + ")"


def _compile_step(net: Netlist) -> Callable:
    lines = ["def step(inp, state, mask=1):"]
    for i, w in enumerate(net.inputs):
        lines.append(f" v{w} = inp[{i}]")
    for i, g in enumerate(net._dffs):
        lines.append(f" v{g.out} = state[{i}]")
    for g in net._topo:
        lines.append(f" v{g.out} = {_gate_expr(g)}")
    outs = _tuple_src([f"v{w}" for w in net.outputs])
    nxt = _tuple_src([f"v{g.ins[0]}" for g in net._dffs])
    lines.append(f" return {outs}, {nxt}")
    ns: dict = {}
    exec("\n".join(lines), ns)  # noqa: S102 - generated from validated gate list
    return ns["step"]


def eval_wires(
    net: Netlist,
    inputs: Sequence[int],
    state: Sequence[int] = (),
    overrides: Optional[dict[int, str]] = None,
    mask: int = 1,
) -> tuple[Bits, Bits]:
    """Interpreted evaluation with per-wire fault overrides.

    overrides maps wire id -> 'flip' | 'stuck0' | 'stuck1', applied to the
    value right after the wire is driven (inputs included).
    """
    if len(inputs) != len(net.inputs):
        raise WidthError(f"expected {len(net.inputs)} input bits, got {len(inputs)}")
    if len(state) != net.state_width:
        raise WidthError(f"expected {net.state_width} state bits, got {len(state)}")
    ov = overrides or {}

    def fix(w: int, v: int) -> int:
        mode = ov.get(w)
        if mode is None:
            return v
        if mode == "flip":
            return v ^ mask
        if mode == "stuck0":
            return 0
        if mode == "stuck1":
            return mask
        raise ValueError(f"unknown override {mode!r}")

    val: dict[int, int] = {}
    for i, w in enumerate(net.inputs):
        val[w] = fix(w, inputs[i] & mask)
    for i, g in enumerate(net._dffs):
        val[g.out] = fix(g.out, state[i] & mask)
    for g in net._topo:
        a = [val[w] for w in g.ins]
        if g.kind == "AND":
            v = a[0]
            for x in a[1:]:
                v &= x
        elif g.kind == "OR":
            v = a[0]
            for x in a[1:]:
                v |= x
        elif g.kind == "XOR":
            v = a[0]
            for x in a[1:]:
                v ^= x
        elif g.kind == "NAND":
            v = a[0]
            for x in a[1:]:
                v &= x
            v ^= mask
        elif g.kind == "NOR":
            v = a[0]
            for x in a[1:]:
                v |= x
            v ^= mask
        elif g.kind == "NOT":
            v = mask ^ a[0]
        elif g.kind == "BUF":
            v = a[0]
        elif g.kind == "CONST0":
            v = 0
        else:  # CONST1
            v = mask
        val[g.out] = fix(g.out, v)
    outs = tuple(val[w] for w in net.outputs)
    nxt = tuple(val[g.ins[0]] for g in net._dffs)
    return outs, nxt


# -- builder -------------------------------------------------------------------


class NetlistBuilder:
    """Incremental constructor used by synthesis passes."""

    def __init__(self, name: str):
        self.name = name
        self._next = 0
        self._inputs: list[int] = []
        self._outputs: list[int] = []
        self._gates: list[Gate] = []
        self._names: dict[int, str] = {}

    def _fresh(self, name: Optional[str]) -> int:
        w = self._next
        self._next += 1
        if name is not None:
            self._names[w] = name
        return w

    def input(self, name: Optional[str] = None) -> int:
        w = self._fresh(name)
        self._inputs.append(w)
        return w

    def gate(self, kind: str, *ins: int, name: Optional[str] = None) -> int:
        w = self._fresh(name)
        self._gates.append(Gate(w, kind, tuple(ins)))
        return w

    def inline(self, net: Netlist, input_wires: Sequence[int]) -> list[int]:
        """Copy another netlist's gates, mapping its inputs onto input_wires.

        Returns the wires carrying the copied netlist's outputs.
        """
        if len(input_wires) != len(net.inputs):
            raise WidthError("inline input count mismatch")
        remap = dict(zip(net.inputs, input_wires))
        for g in net.gates:
            remap[g.out] = self._fresh(None)
        for g in net.gates:
            self._gates.append(Gate(remap[g.out], g.kind, tuple(remap[w] for w in g.ins)))
        return [remap[w] for w in net.outputs]

    def xor_tree(self, wires: Sequence[int]) -> int:
        """Balanced XOR reduction; a single wire passes through unchanged."""
        level = list(wires)
        if not level:
            raise ValueError("empty xor tree")
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level) - 1, 2):
                nxt.append(self.gate("XOR", level[i], level[i + 1]))
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    def set_outputs(self, wires: Sequence[int]) -> None:
        self._outputs = list(wires)

    def build(self) -> Netlist:
        return Netlist(self.name, self._inputs, self._outputs, self._gates, self._names)


# -- text format ---------------------------------------------------------------

_GATE_RE = re.compile(r"^\s*([A-Za-z_][\w.$]*)\s*=\s*([A-Z][A-Z0-9]*)\s*\((.*)\)\s*$")
_NAME_RE = re.compile(r"^[A-Za-z_][\w.$]*$")


def parse_netlist(text: str, name: str = "netlist") -> Netlist:
    """Parse the line-oriented netlist format into a Netlist."""
    model = name
    input_names: list[str] = []
    output_names: list[str] = []
    gate_specs: list[tuple[str, str, list[str], int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("."):
            parts = line.split()
            if parts[0] == ".model":
                if len(parts) != 2:
                    raise NetlistSyntaxError(".model expects one name", lineno)
                model = parts[1]
            elif parts[0] == ".inputs":
                for p in parts[1:]:
                    if not _NAME_RE.match(p):
                        raise NetlistSyntaxError(f"bad input name {p!r}", lineno, raw.find(p) + 1)
                    input_names.append(p)
            elif parts[0] == ".outputs":
                for p in parts[1:]:
                    if not _NAME_RE.match(p):
                        raise NetlistSyntaxError(f"bad output name {p!r}", lineno, raw.find(p) + 1)
                    output_names.append(p)
            else:
                raise NetlistSyntaxError(f"unknown directive {parts[0]!r}", lineno)
            continue
        m = _GATE_RE.match(line)
        if not m:
            eq = raw.find("=")
            raise NetlistSyntaxError("expected 'name = KIND(args)'", lineno, eq + 1 if eq >= 0 else 1)
        out, kind, argstr = m.group(1), m.group(2), m.group(3).strip()
        if kind not in GATE_KINDS:
            raise NetlistSyntaxError(f"unknown gate kind {kind!r}", lineno, raw.find(kind) + 1)
        args = [a.strip() for a in argstr.split(",")] if argstr else []
        for a in args:
            if not _NAME_RE.match(a):
                raise NetlistSyntaxError(f"bad wire name {a!r}", lineno, raw.find(a) + 1)
        gate_specs.append((out, kind, args, lineno))

    ids: dict[str, int] = {}
    drivers: set[str] = set()
    for n in input_names:
        if n in drivers:
            raise MultipleDriverError(f"wire {n!r} has multiple drivers")
        drivers.add(n)
        ids[n] = len(ids)
    for out, _, _, _ in gate_specs:
        if out in drivers:
            raise MultipleDriverError(f"wire {out!r} has multiple drivers")
        drivers.add(out)
        ids[out] = len(ids)

    def resolve(n: str) -> int:
        if n not in ids:
            raise UndrivenWireError(f"wire {n!r} has no driver")
        return ids[n]

    gates = [Gate(ids[out], kind, tuple(resolve(a) for a in args)) for out, kind, args, _ in gate_specs]
    outputs = [resolve(n) for n in output_names]
    names = {w: n for n, w in ids.items()}
    return Netlist(model, [ids[n] for n in input_names], outputs, gates, names)


def _stable_names(net: Netlist) -> dict[int, str]:
    used = set(net.wire_names.values())
    names = dict(net.wire_names)
    for w in sorted({*net.inputs, *net.outputs, *(g.out for g in net.gates)}):
        if w not in names:
            cand = f"w{w}"
            while cand in used:
                cand += "_"
            names[w] = cand
            used.add(cand)
    return names


def serialize_netlist(net: Netlist) -> str:
    """Canonical text form: declarations, then gates in topological order."""
    names = _stable_names(net)
    lines = [f".model {net.name}"]
    if net.inputs:
        lines.append(".inputs " + " ".join(names[w] for w in net.inputs))
    if net.outputs:
        lines.append(".outputs " + " ".join(names[w] for w in net.outputs))
    for g in net._topo:
        lines.append(f"{names[g.out]} = {g.kind}(" + ", ".join(names[w] for w in g.ins) + ")")
    for g in sorted(net._dffs, key=lambda g: g.out):
        lines.append(f"{names[g.out]} = DFF({names[g.ins[0]]})")
    return "\n".join(lines) + "\n"


# -- logic cones ----------------------------------------------------------------


def output_cone(net: Netlist, output_index: int) -> Netlist:
    """Sub-netlist with exactly the transitive fan-in gates of one output.

    The full ordered primary-input list is retained so the cone evaluates on
    the same input vectors as the parent netlist.
    """
    if not 0 <= output_index < len(net.outputs):
        raise IndexError(f"output index {output_index} out of range")
    by_out = {g.out: g for g in net.gates}
    keep: set[int] = set()
    stack = [net.outputs[output_index]]
    while stack:
        w = stack.pop()
        g = by_out.get(w)
        if g is None or g.out in keep:
            continue
        keep.add(g.out)
        stack.extend(g.ins)
    gates = [g for g in net.gates if g.out in keep]
    return Netlist(
        f"{net.name}.cone{output_index}",
        net.inputs,
        (net.outputs[output_index],),
        gates,
        net.wire_names,
    )


# -- equivalence ----------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    mode: str  # 'exhaustive' or 'sampled'
    vectors_checked: int
    counterexample: Optional[tuple] = None  # Bits, or per-cycle tuple of Bits
    horizon: Optional[int] = None  # set for sequential (unrolled) compares


def input_patterns(m: int) -> tuple[list[int], int]:
    """Truth-table bit patterns for m variables over all 2^m points."""
    size = 1 << m
    full = (1 << size) - 1
    pats = []
    for j in range(m):
        period = 1 << (j + 1)
        unit = ((1 << (1 << j)) - 1) << (1 << j)
        rep = full // ((1 << period) - 1)
        pats.append(unit * rep)
    return pats, full


def _bit_of(v: int, idx: int) -> int:
    return (v >> idx) & 1


def check_equivalence(
    n1: Netlist,
    n2: Netlist,
    max_exhaustive_inputs: int = 16,
    sample_count: int = 10000,
    rng_seed: Optional[int] = None,
    horizon: int = 4,
) -> EquivalenceVerdict:
    """Compare two netlists, exhaustively when the input space is small.

    Combinational netlists are compared over all input vectors when the
    input count is at most max_exhaustive_inputs, otherwise over
    sample_count uniform random vectors (verdict tagged 'sampled').
    Sequential netlists are unrolled for `horizon` cycles from the all-zero
    state; the exhaustive bound then applies to inputs * horizon.
    Non-equivalence verdicts always carry a replayable counterexample.
    """
    if len(n1.inputs) != len(n2.inputs) or len(n1.outputs) != len(n2.outputs):
        raise ArityMismatchError(
            f"{n1.name}: {len(n1.inputs)}->{len(n1.outputs)}, "
            f"{n2.name}: {len(n2.inputs)}->{len(n2.outputs)}"
        )
    m = len(n1.inputs)
    sequential = n1.has_state or n2.has_state
    cycles = horizon if sequential else 1
    total_vars = m * cycles

    if total_vars <= max_exhaustive_inputs:
        pats, full = input_patterns(total_vars)
        cex_idx = None
        s1: Bits = (0,) * n1.state_width
        s2: Bits = (0,) * n2.state_width
        f1, f2 = n1.step_fn(), n2.step_fn()
        for c in range(cycles):
            inp = tuple(pats[c * m + j] for j in range(m))
            o1, s1 = f1(inp, s1, full)
            o2, s2 = f2(inp, s2, full)
            for a, b in zip(o1, o2):
                d = a ^ b
                if d:
                    cex_idx = (c, d & -d)
                    break
            if cex_idx:
                break
        if cex_idx is None:
            return EquivalenceVerdict(True, "exhaustive", 1 << total_vars,
                                      horizon=cycles if sequential else None)
        _, low = cex_idx
        v = low.bit_length() - 1
        seq_cex = tuple(
            tuple(_bit_of(v, c * m + j) for j in range(m)) for c in range(cycles)
        )
        cex = seq_cex if sequential else seq_cex[0]
        _assert_replays(n1, n2, cex, sequential, cycles)
        return EquivalenceVerdict(False, "exhaustive", 1 << total_vars, cex,
                                  horizon=cycles if sequential else None)

    rng = random.Random(rng_seed)
    f1, f2 = n1.step_fn(), n2.step_fn()
    done = 0
    while done < sample_count:
        batch = min(512, sample_count - done)
        mask = (1 << batch) - 1
        cyc_inputs = [tuple(rng.getrandbits(batch) for _ in range(m)) for _ in range(cycles)]
        s1 = (0,) * n1.state_width
        s2 = (0,) * n2.state_width
        diff = 0
        diff_cycle = 0
        for c in range(cycles):
            o1, s1 = f1(cyc_inputs[c], s1, mask)
            o2, s2 = f2(cyc_inputs[c], s2, mask)
            for a, b in zip(o1, o2):
                d = a ^ b
                if d:
                    diff = d
                    diff_cycle = c
                    break
            if diff:
                break
        if diff:
            idx = (diff & -diff).bit_length() - 1
            seq_cex = tuple(
                tuple(_bit_of(cyc_inputs[c][j], idx) for j in range(m)) for c in range(cycles)
            )
            cex = seq_cex if sequential else seq_cex[0]
            _assert_replays(n1, n2, cex, sequential, cycles)
            return EquivalenceVerdict(False, "sampled", done + idx + 1, cex,
                                      horizon=cycles if sequential else None)
        done += batch
    return EquivalenceVerdict(True, "sampled", sample_count,
                              horizon=cycles if sequential else None)


def _assert_replays(n1: Netlist, n2: Netlist, cex, sequential: bool, cycles: int) -> None:
    seq = cex if sequential else (cex,)
    s1: Bits = (0,) * n1.state_width
    s2: Bits = (0,) * n2.state_width
    for c in range(cycles if sequential else 1):
        o1, s1 = n1.evaluate(seq[c], s1)
        o2, s2 = n2.evaluate(seq[c], s2)
        if o1 != o2:
            return
    raise AssertionError("equivalence counterexample does not replay")


# -- simplification --------------------------------------------------------------


def simplify_netlist(net: Netlist) -> Netlist:
    """Constant folding, buffer forwarding, structural sharing, dead removal.

    DFFs are kept (their cycle-zero output differs from a constant), and the
    returned netlist defines its own DFF state ordering.
    """
    repl: dict[int, int] = {}  # wire -> canonical wire
    const: dict[int, int] = {}  # wire -> 0/1
    seen: dict[tuple, int] = {}
    gates: list[Gate] = []
    next_id = max([*net.inputs, *(g.out for g in net.gates), -1]) + 1

    def fresh() -> int:
        nonlocal next_id
        w = next_id
        next_id += 1
        return w

    def canon(w: int) -> int:
        while w in repl:
            w = repl[w]
        return w

    for g in net._topo + net._dffs:
        ins = tuple(canon(w) for w in g.ins)
        kind = g.kind
        if kind == "DFF":
            key = ("DFF", ins)
            prev = seen.get(key)
            if prev is not None:
                repl[g.out] = prev
                continue
            seen[key] = g.out
            gates.append(Gate(g.out, "DFF", ins))
            continue
        vals = [const.get(w) for w in ins]
        if kind in ("CONST0", "CONST1"):
            const[g.out] = 1 if kind == "CONST1" else 0
            continue
        if kind == "BUF":
            if vals[0] is not None:
                const[g.out] = vals[0]
            else:
                repl[g.out] = ins[0]
            continue
        if kind == "NOT":
            if vals[0] is not None:
                const[g.out] = 1 - vals[0]
                continue
        if kind in ("AND", "NAND", "OR", "NOR", "XOR"):
            live = []
            acc = 0 if kind in ("OR", "NOR", "XOR") else 1
            for w, v in zip(ins, vals):
                if v is None:
                    live.append(w)
                elif kind in ("AND", "NAND"):
                    acc &= v
                elif kind in ("OR", "NOR"):
                    acc |= v
                else:
                    acc ^= v
            if kind in ("AND", "NAND") and acc == 0:
                const[g.out] = 1 if kind == "NAND" else 0
                continue
            if kind in ("OR", "NOR") and acc == 1:
                const[g.out] = 0 if kind == "NOR" else 1
                continue
            if not live:
                v = acc
                if kind in ("NAND", "NOR"):
                    v = 1 - v
                const[g.out] = v
                continue
            invert = kind in ("NAND", "NOR") or (kind == "XOR" and acc == 1)
            base = {"NAND": "AND", "NOR": "OR"}.get(kind, kind)
            if len(live) == 1:
                kind2, ins2 = ("NOT", (live[0],)) if invert else ("BUF", (live[0],))
            else:
                ordered = tuple(sorted(live))
                kind2, ins2 = base, ordered
                if invert:
                    kind2 = {"AND": "NAND", "OR": "NOR"}.get(base, base)
                    if base == "XOR":
                        # fold the inversion into a NOT after the shared XOR
                        key = ("XOR", ordered)
                        prev = seen.get(key)
                        if prev is None:
                            prev = fresh()
                            seen[key] = prev
                            gates.append(Gate(prev, "XOR", ordered))
                        kind2, ins2 = "NOT", (prev,)
            if kind2 == "BUF":
                repl[g.out] = ins2[0]
                continue
            key = (kind2, ins2)
            prev = seen.get(key)
            if prev is not None:
                repl[g.out] = prev
                continue
            seen[key] = g.out
            gates.append(Gate(g.out, kind2, ins2))
            continue
        # NOT of a live wire
        key = (kind, ins)
        prev = seen.get(key)
        if prev is not None:
            repl[g.out] = prev
            continue
        seen[key] = g.out
        gates.append(Gate(g.out, kind, ins))

    # materialize constants that ended up driving outputs or live gate inputs
    const_gate: dict[int, int] = {}
    extra: list[Gate] = []

    def resolve(w: int) -> int:
        w = canon(w)
        if w in const:
            v = const[w]
            if v not in const_gate:
                const_gate[v] = fresh()
                extra.append(Gate(const_gate[v], "CONST1" if v else "CONST0", ()))
            return const_gate[v]
        return w

    fixed_gates = []
    for g in gates:
        fixed_gates.append(Gate(g.out, g.kind, tuple(resolve(w) for w in g.ins)))
    outputs = [resolve(w) for w in net.outputs]
    fixed_gates.extend(extra)

    # dead-code removal: keep fan-in of outputs, following DFF data inputs
    by_out = {g.out: g for g in fixed_gates}
    keep: set[int] = set()
    stack = list(outputs)
    while stack:
        w = stack.pop()
        g = by_out.get(w)
        if g is None or g.out in keep:
            continue
        keep.add(g.out)
        stack.extend(g.ins)
    live_gates = [g for g in fixed_gates if g.out in keep]
    return Netlist(net.name, net.inputs, outputs, live_gates, net.wire_names)


# -- random circuits (experiments and tests) -------------------------------------


def random_netlist(
    n_inputs: int,
    n_gates: int,
    n_outputs: int,
    rng_seed: Optional[int] = None,
    name: str = "rand",
) -> Netlist:
    """Random combinational DAG over the two-input gate library."""
    rng = random.Random(rng_seed)
    b = NetlistBuilder(name)
    wires = [b.input(f"i{i}") for i in range(n_inputs)]
    kinds = ["AND", "OR", "XOR", "NAND", "NOR", "AND", "OR", "XOR", "NOT"]
    for _ in range(n_gates):
        kind = rng.choice(kinds)
        if kind == "NOT":
            wires.append(b.gate("NOT", rng.choice(wires)))
        else:
            a = rng.choice(wires)
            c = rng.choice(wires)
            tries = 0
            while c == a and tries < 4:
                c = rng.choice(wires)
                tries += 1
            wires.append(b.gate(kind, a, c))
    pool = wires[n_inputs:] if n_gates >= n_outputs else wires
    outs = rng.sample(pool, min(n_outputs, len(pool)))
    b.set_outputs(outs)
    return b.build()
