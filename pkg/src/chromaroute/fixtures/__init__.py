"""Small devices and workloads used by the tests and the documentation.

Every loader returns freshly parsed objects, so callers may mutate the
results freely.
"""

from __future__ import annotations

import json
from importlib import resources

from ..hardware import CouplingGraph, CrosstalkProfile, load_hardware
from ..ir import LogicalCircuit, PauliProgram, parse_circuit, parse_pauli_program
from ..jw import FermionTerm, parse_fermion_terms


def fixture_text(name: str) -> str:
    return resources.files(__name__).joinpath("data", name).read_text(encoding="utf-8")


def _device(name: str) -> tuple[CouplingGraph, CrosstalkProfile]:
    return load_hardware(json.loads(fixture_text(name)))


def ring6() -> tuple[CouplingGraph, CrosstalkProfile]:
    """Six-qubit ring whose profile pairs every link with its next-nearest links."""
    return _device("ring6.json")


def ring6_cross() -> tuple[CouplingGraph, CrosstalkProfile]:
    """The ring with mild cross-pair interference and fast decoherence."""
    return _device("ring6_cross.json")


def ring6_cross_hot() -> tuple[CouplingGraph, CrosstalkProfile]:
    """The ring with crushing cross-pair interference and slow decoherence."""
    return _device("ring6_cross_hot.json")


def tree7() -> tuple[CouplingGraph, CrosstalkProfile]:
    """Seven qubits, mostly tree shaped, with one profiled link pair."""
    return _device("tree7.json")


def grid6() -> tuple[CouplingGraph, CrosstalkProfile]:
    """Six qubits with two equal-cost routes between the branches."""
    return _device("grid6.json")


def pair_circuit() -> LogicalCircuit:
    return parse_circuit(fixture_text("pair_circuit.txt"))


def zz_string() -> PauliProgram:
    return parse_pauli_program(fixture_text("zz_string.txt"))


def chain_pair() -> PauliProgram:
    return parse_pauli_program(fixture_text("chain_pair.txt"))


def h2_terms() -> list[FermionTerm]:
    return parse_fermion_terms(fixture_text("h2_fermion.txt"))
