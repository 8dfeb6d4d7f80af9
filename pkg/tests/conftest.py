"""Shared fixtures: a deterministic RNG and random-object builders."""

import random

import pytest

from ibx import circuits


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def random_reversible_circuit(rng, width, max_gates, min_gates=1):
    """Gates drawn only from kinds narrower than the circuit."""
    kinds = [k for k, a in circuits.GATE_ARITY.items() if a < width]
    gates = []
    for _ in range(rng.randint(min_gates, max_gates)):
        kind = rng.choice(kinds)
        wires = rng.sample(range(width), circuits.GATE_ARITY[kind])
        gates.append(circuits.gate(kind, *wires))
    return circuits.ReversibleCircuit(width, tuple(gates))


@pytest.fixture
def make_circuit():
    return random_reversible_circuit
