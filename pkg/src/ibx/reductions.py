"""Compilers that turn questions about arbitrary maps into pure iteration.

Each compiler emits a Schedule: a bijection g, an exact iteration count, a
start state, and an extraction map, with the contract that running g for
exactly that many steps from the start and extracting yields the answer.

The clocked bijections here share a discipline: a wide counter c1 and a
narrow counter c2 are packed in front of the payload fields, each step first
ticks the clock (c2, carrying into c1 on wraparound), and the payload action
is keyed by the value c2 showed when the step began.  States whose counter
fields decode out of range are fixed points, which keeps every map total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .circuits import ClassicalCircuit, ClassicalGate, _BOOL_FN
from .kernel import (
    Bijection,
    Bitstring,
    WidthMismatchError,
    iterate_bijection,
    pack_fields,
    unpack_fields,
)


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class ClockedState:
    c1: int
    c2: int
    payload: Tuple[int, ...]


@dataclass(frozen=True)
class ClockedCodec:
    """Bit packing for (c1, c2, payload...) states.

    Field widths are the minimum that hold modulus-1; decode returns None for
    states with a counter at or beyond its modulus.
    """

    m_big: int
    m_small: int
    payload_widths: Tuple[int, ...]

    @property
    def widths(self) -> Tuple[int, ...]:
        w1 = max(1, (self.m_big - 1).bit_length())
        w2 = max(1, (self.m_small - 1).bit_length())
        return (w1, w2) + self.payload_widths

    @property
    def width(self) -> int:
        return sum(self.widths)

    def encode(self, state: ClockedState) -> int:
        return pack_fields(list(zip((state.c1, state.c2) + state.payload, self.widths)))

    def decode(self, value: int) -> Optional[ClockedState]:
        parts = unpack_fields(value, self.widths)
        c1, c2 = parts[0], parts[1]
        if c1 >= self.m_big or c2 >= self.m_small:
            return None
        return ClockedState(c1, c2, parts[2:])


@dataclass(frozen=True)
class Schedule:
    """A compiled iteration job.  ``codec`` is set by the clocked compilers
    so callers can inspect intermediate states."""

    g: Bijection
    total_iterations: int
    start: Bitstring
    extract: Callable[[Bitstring], Bitstring]
    codec: Optional[ClockedCodec] = None

    def __post_init__(self) -> None:
        if self.total_iterations < 0:
            raise ReductionError("iteration total must be nonnegative")
        if self.start.width != self.g.width:
            raise WidthMismatchError("schedule start width does not match its bijection")


def run_schedule(schedule: Schedule) -> Bitstring:
    final = iterate_bijection(schedule.g, schedule.total_iterations, schedule.start)
    return schedule.extract(final)


MAX_SWEEP_WIDTH = 20
MAX_CLOCK_WIDTH = 8


def inversion_by_iteration(f: Bijection, x: Bitstring) -> Schedule:
    """Collapse a pointwise question about f into pure iteration.

    The emitted g walks a counter a over every k-bit value while adding
    ftilde(a) into an accumulator b, where ftilde(y) is f(y) when y = x and
    zero otherwise.  Exactly one term of the sweep is nonzero, so after all
    2**k steps b holds f(x).  The point is the shape of the reduction, not
    the answer: any function with a cheap point test (the inverse of f
    included, via the indicator f(y) = x) can be summed out the same way,
    and g itself only ever consults f forward.
    """
    k = f.width
    if k > MAX_SWEEP_WIDTH:
        raise ReductionError(f"width {k} exceeds sweep cap {MAX_SWEEP_WIDTH}")
    if x.width != k:
        raise WidthMismatchError("target width does not match bijection width")
    size = 1 << k
    mask = size - 1
    target = x.value

    def ftilde(a: int) -> int:
        return f.forward(a) if a == target else 0

    def fwd(v: int) -> int:
        a, b = unpack_fields(v, (k, k))
        return pack_fields([((a + 1) & mask, k), ((b + ftilde(a)) & mask, k)])

    def back(v: int) -> int:
        a, b = unpack_fields(v, (k, k))
        prev = (a - 1) & mask
        return pack_fields([(prev, k), ((b - ftilde(prev)) & mask, k)])

    g = Bijection(2 * k, fwd, back, label=f"sweep-sum[{f.label}]")

    def extract(final: Bitstring) -> Bitstring:
        _, b = unpack_fields(final.value, (k, k))
        return Bitstring(b, k)

    return Schedule(g, size, Bitstring(0, 2 * k), extract)


def compile_iteration_to_invertible(f: Bijection, n: int, x: Bitstring) -> Schedule:
    """Compile "apply f n times to x" into iterating one invertible map.

    f may be handed over forward-only; the compiled g is still invertible.
    g acts on tuples (c1, c2, a, b, c).  One full little-hand cycle of
    M = 2**k + 3 steps advances a by one application of f:

      c2 = 0            b ^= f(a)        (stash the image)
      c2 = 1            a ^= b           (a becomes a ^ f(a))
      1 < c2 < 2**k+2   if f(c) = b: a ^= c; then c += 1 mod 2**k
                        (sweep c over all candidates; only c = old a fires,
                         leaving a = f(a))
      c2 = 2**k+2       b ^= a           (clear the stash)

    The clock ticks first each step, but the payload action is keyed by the
    pre-tick c2, so starting from (0,0,x,0,0) the c2=0 action runs on the
    very first step.  After n*M steps the a field holds f applied n times.
    """
    k = f.width
    if k > MAX_CLOCK_WIDTH:
        raise ReductionError(f"width {k} exceeds clock cap {MAX_CLOCK_WIDTH}")
    if x.width != k:
        raise WidthMismatchError("input width does not match bijection width")
    if n < 0:
        raise ReductionError("iteration count must be nonnegative")
    size = 1 << k
    mask = size - 1
    m_small = size + 3
    m_big = n + 1
    codec = ClockedCodec(m_big, m_small, (k, k, k))
    sweep_end = size + 2

    def action(c2: int, a: int, b: int, c: int) -> Tuple[int, int, int]:
        if c2 == 0:
            return a, b ^ f.forward(a), c
        if c2 == 1:
            return a ^ b, b, c
        if 1 < c2 < sweep_end:
            if f.forward(c) == b:
                a ^= c
            return a, b, (c + 1) & mask
        if c2 == sweep_end:
            return a, b ^ a, c
        return a, b, c

    def unaction(c2: int, a: int, b: int, c: int) -> Tuple[int, int, int]:
        if c2 == 0:
            return a, b ^ f.forward(a), c
        if c2 == 1:
            return a ^ b, b, c
        if 1 < c2 < sweep_end:
            c = (c - 1) & mask
            if f.forward(c) == b:
                a ^= c
            return a, b, c
        if c2 == sweep_end:
            return a, b ^ a, c
        return a, b, c

    def fwd(v: int) -> int:
        st = codec.decode(v)
        if st is None:
            return v
        a, b, c = action(st.c2, *st.payload)
        c2 = st.c2 + 1
        c1 = st.c1
        if c2 == m_small:
            c2 = 0
            c1 = (c1 + 1) % m_big
        return codec.encode(ClockedState(c1, c2, (a, b, c)))

    def back(v: int) -> int:
        st = codec.decode(v)
        if st is None:
            return v
        c2 = st.c2 - 1
        c1 = st.c1
        if c2 < 0:
            c2 = m_small - 1
            c1 = (c1 - 1) % m_big
        a, b, c = unaction(c2, *st.payload)
        return codec.encode(ClockedState(c1, c2, (a, b, c)))

    g = Bijection(codec.width, fwd, back, label=f"clock[{f.label}]")
    start = Bitstring(codec.encode(ClockedState(0, 0, (x.value, 0, 0))), codec.width)

    def extract(final: Bitstring) -> Bitstring:
        st = codec.decode(final.value)
        if st is None:
            raise ReductionError("final state decodes out of range")
        return Bitstring(st.payload[0], k)

    return Schedule(g, n * m_small, start, extract, codec=codec)


# ---------------------------------------------------------------------------
# Oracle circuits: boolean circuits with extra gates that iterate a bijection.


@dataclass(frozen=True)
class OracleGate:
    """t := g^(n)(s), where n is read off the n_wires as a binary numeral
    (first listed wire most significant) and s, t have the oracle's width."""

    n_wires: Tuple[int, ...]
    s_wires: Tuple[int, ...]
    t_wires: Tuple[int, ...]


@dataclass(frozen=True)
class OracleCircuit:
    inputs: int
    gates: Tuple[object, ...]  # ClassicalGate | OracleGate, in dependency order
    outputs: Tuple[int, ...]

    def __post_init__(self) -> None:
        defined = set(range(self.inputs))
        for g in self.gates:
            if isinstance(g, ClassicalGate):
                if g.out in defined:
                    raise ReductionError(f"wire {g.out} written twice")
                for a in g.args:
                    if a not in defined:
                        raise ReductionError(f"gate reads undefined wire {a}")
                defined.add(g.out)
            elif isinstance(g, OracleGate):
                for a in g.n_wires + g.s_wires:
                    if a not in defined:
                        raise ReductionError(f"oracle gate reads undefined wire {a}")
                for t in g.t_wires:
                    if t in defined:
                        raise ReductionError(f"wire {t} written twice")
                    defined.add(t)
                if len(set(g.t_wires)) != len(g.t_wires):
                    raise ReductionError("oracle target wires must be distinct")
            else:
                raise ReductionError(f"unknown gate object {g!r}")
        for w in self.outputs:
            if w not in defined:
                raise ReductionError(f"output names undefined wire {w}")

    def all_wires(self) -> List[int]:
        wires = set(range(self.inputs))
        for g in self.gates:
            if isinstance(g, ClassicalGate):
                wires.add(g.out)
                wires.update(g.args)
            else:
                wires.update(g.n_wires + g.s_wires + g.t_wires)
        wires.update(self.outputs)
        return sorted(wires)

    def max_oracle_count(self) -> int:
        worst = 0
        for g in self.gates:
            if isinstance(g, OracleGate):
                worst = max(worst, (1 << len(g.n_wires)) - 1)
        return worst


def eval_oracle_circuit(oc: OracleCircuit, g_oracle: Bijection, x: Bitstring) -> Bitstring:
    """Direct evaluator, used as the oracle the compiled schedule is tested
    against."""
    if x.width != oc.inputs:
        raise WidthMismatchError("input width does not match circuit inputs")
    k = oc.inputs
    values = {i: x.bit(k - 1 - i) for i in range(k)}
    for g in oc.gates:
        if isinstance(g, ClassicalGate):
            values[g.out] = _BOOL_FN[g.kind](*(values[a] for a in g.args))
        else:
            count = 0
            for w in g.n_wires:
                count = (count << 1) | values[w]
            s = Bitstring(
                pack_fields([(values[w], 1) for w in g.s_wires]), len(g.s_wires)
            )
            if g_oracle.width != len(g.s_wires):
                raise WidthMismatchError("oracle width does not match s wires")
            t = iterate_bijection(g_oracle, count, s)
            for idx, w in enumerate(g.t_wires):
                values[w] = t.bit(len(g.t_wires) - 1 - idx)
    out = 0
    for w in oc.outputs:
        out = (out << 1) | values[w]
    return Bitstring(out, len(oc.outputs))


def _inverse_via_table(f: Bijection) -> Callable[[int], int]:
    if f.width > 16:
        raise ReductionError(
            "oracle bijection carries no backward evaluator and is too wide to tabulate"
        )
    table = {}
    for v in range(1 << f.width):
        table[f.forward(v)] = v
    return lambda y: table.get(y, y)


def compile_oracle_circuit(
    oc: OracleCircuit, g_oracle: Bijection, x: Bitstring
) -> Schedule:
    """Compile an oracle-circuit evaluation into iterating one bijection h.

    h carries (c1, c2, wire vector).  The little hand c2 runs modulo
    N = (largest possible oracle count) + 1; its wraparound advances the big
    hand c1 modulo M = (gate count) + 1.  While c1 points at a boolean gate,
    the gate's value is XORed into its target once, at c2 = 0.  While c1
    points at an oracle gate, c2 = 0 copies s onto the zeroed target t and
    each later tick with c2 at most the gate's count replaces t by g(t).
    After M*N steps every gate has fired and the clock is back at zero.
    """
    if x.width != oc.inputs:
        raise WidthMismatchError("input width does not match circuit inputs")
    wires = oc.all_wires()
    w_count = len(wires)
    pos = {w: w_count - 1 - i for i, w in enumerate(wires)}  # bit position per wire
    m_small = oc.max_oracle_count() + 1
    m_big = len(oc.gates) + 1
    codec = ClockedCodec(m_big, m_small, (w_count,))

    backward_oracle = g_oracle.backward or _inverse_via_table(g_oracle)

    def read(vec: int, ws: Sequence[int]) -> int:
        out = 0
        for w in ws:
            out = (out << 1) | ((vec >> pos[w]) & 1)
        return out

    def write(vec: int, ws: Sequence[int], value: int) -> int:
        for idx, w in enumerate(reversed(ws)):
            bit = (value >> idx) & 1
            vec = (vec & ~(1 << pos[w])) | (bit << pos[w])
        return vec

    def act(c1: int, c2: int, vec: int, reverse: bool) -> int:
        if c1 >= len(oc.gates):
            return vec
        g = oc.gates[c1]
        if isinstance(g, ClassicalGate):
            if c2 == 0:
                val = _BOOL_FN[g.kind](*(((vec >> pos[a]) & 1) for a in g.args))
                vec ^= val << pos[g.out]
            return vec
        count = read(vec, g.n_wires)
        if c2 == 0:
            vec ^= write(0, g.t_wires, read(vec, g.s_wires))
            return vec
        if 0 < c2 <= count:
            t = read(vec, g.t_wires)
            t2 = backward_oracle(t) if reverse else g_oracle.forward(t)
            vec = write(vec, g.t_wires, t2)
        return vec

    def fwd(v: int) -> int:
        st = codec.decode(v)
        if st is None:
            return v
        vec = act(st.c1, st.c2, st.payload[0], reverse=False)
        c2 = st.c2 + 1
        c1 = st.c1
        if c2 == m_small:
            c2 = 0
            c1 = (c1 + 1) % m_big
        return codec.encode(ClockedState(c1, c2, (vec,)))

    def back(v: int) -> int:
        st = codec.decode(v)
        if st is None:
            return v
        c2 = st.c2 - 1
        c1 = st.c1
        if c2 < 0:
            c2 = m_small - 1
            c1 = (c1 - 1) % m_big
        vec = act(c1, c2, st.payload[0], reverse=True)
        return codec.encode(ClockedState(c1, c2, (vec,)))

    h = Bijection(codec.width, fwd, back, label="oracle-clock")

    vec0 = 0
    for i in range(oc.inputs):
        vec0 |= x.bit(oc.inputs - 1 - i) << pos[i]
    start = Bitstring(codec.encode(ClockedState(0, 0, (vec0,))), codec.width)

    def extract(final: Bitstring) -> Bitstring:
        st = codec.decode(final.value)
        if st is None:
            raise ReductionError("final state decodes out of range")
        vec = st.payload[0]
        out = 0
        for w in oc.outputs:
            out = (out << 1) | ((vec >> pos[w]) & 1)
        return Bitstring(out, len(oc.outputs))

    return Schedule(h, m_big * m_small, start, extract, codec=codec)
