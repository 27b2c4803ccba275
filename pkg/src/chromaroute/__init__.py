"""Crosstalk-aware mapping, scheduling and ansatz synthesis for coupled qubits."""

from .baseline import baseline_schedule, oblivious_schedule, serialize_crosstalk
from .csg import (
    Csg,
    CsgVertex,
    build_csg,
    executable_pairs,
    get_executable,
    get_useful_swaps,
    useful_swaps,
)
from .errors import (
    ChromarouteError,
    EncodingError,
    HardwareError,
    InvariantError,
    MappingError,
    ParseError,
    StallError,
    VerificationError,
)
from .fidelity import (
    AllowanceSearchResult,
    FidelityReport,
    decoherence_error,
    esp,
    fidelity_report,
    find_x_max,
    search_allowance,
    tvd,
)
from .hardware import (
    CouplingGraph,
    CrosstalkProfile,
    CrosstalkRecord,
    Mapping,
    crosstalk_between,
    load_hardware,
    load_hardware_file,
    normalize_edge,
)
from .ir import (
    Gate,
    LogicalCircuit,
    PauliProgram,
    PauliString,
    frontier,
    parse_circuit,
    parse_pauli_program,
    serialize_circuit,
    serialize_pauli_program,
)
from .jw import FermionTerm, jw_encode, parse_fermion_terms
from .scheduler import (
    LedgerEntry,
    Op,
    ScheduledCircuit,
    compile_circuit,
    expand_two_local,
    rank_and_select,
    verify_routing,
    welsh_powell,
)
from .vqa import (
    SynthesisOptions,
    SynthesisTree,
    build_qubit_graph,
    calculate_depths,
    delete_qubit,
    derive_gate_sets,
    graph_center,
    kruskal_mst,
    mst,
    pattern_cost,
    synthesize,
    synthesize_pauli_program,
)

__version__ = "0.1.0"

__all__ = [
    "AllowanceSearchResult",
    "ChromarouteError",
    "CouplingGraph",
    "CrosstalkProfile",
    "CrosstalkRecord",
    "Csg",
    "CsgVertex",
    "EncodingError",
    "FermionTerm",
    "FidelityReport",
    "Gate",
    "HardwareError",
    "InvariantError",
    "LedgerEntry",
    "LogicalCircuit",
    "Mapping",
    "MappingError",
    "Op",
    "ParseError",
    "PauliProgram",
    "PauliString",
    "ScheduledCircuit",
    "StallError",
    "SynthesisOptions",
    "SynthesisTree",
    "VerificationError",
    "baseline_schedule",
    "build_csg",
    "build_qubit_graph",
    "calculate_depths",
    "compile_circuit",
    "crosstalk_between",
    "decoherence_error",
    "delete_qubit",
    "derive_gate_sets",
    "esp",
    "executable_pairs",
    "expand_two_local",
    "fidelity_report",
    "find_x_max",
    "frontier",
    "get_executable",
    "get_useful_swaps",
    "graph_center",
    "jw_encode",
    "kruskal_mst",
    "load_hardware",
    "load_hardware_file",
    "mst",
    "normalize_edge",
    "oblivious_schedule",
    "parse_circuit",
    "parse_fermion_terms",
    "parse_pauli_program",
    "pattern_cost",
    "rank_and_select",
    "search_allowance",
    "serialize_circuit",
    "serialize_crosstalk",
    "serialize_pauli_program",
    "synthesize",
    "synthesize_pauli_program",
    "tvd",
    "useful_swaps",
    "verify_routing",
    "welsh_powell",
]
