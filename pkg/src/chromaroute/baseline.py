"""Comparison compiler: crosstalk-oblivious mapping plus crosstalk
removal by delaying.

The oblivious pass routes like a conventional noise-adaptive mapper: it
executes whatever is executable, and for every still-distant gate starts
the distance-reducing SWAP with the lowest isolated error rate, without
looking at the crosstalk profile at all.  The serialization pass then
takes that schedule and pushes operations later until no two profile-linked
links are ever driven in the same layer.  Together they give the
"avoid crosstalk by waiting" reference point that the allowance-based
scheduler is measured against.
"""

from __future__ import annotations

import math

from .csg import PendingPair, executable_pairs, useful_swaps
from .errors import StallError
from .hardware import CouplingGraph, CrosstalkProfile, Mapping
from .ir import LogicalCircuit
from .scheduler import SWAP_DURATION, Op, ScheduleState, ScheduledCircuit, _pending_pairs


def oblivious_schedule(
    circuit: LogicalCircuit,
    hw: CouplingGraph,
    profile: CrosstalkProfile,
    initial_mapping: Mapping | None = None,
) -> ScheduledCircuit:
    """Route greedily by isolated error rates, ignoring crosstalk.

    Whatever interference the schedule commits is still recorded in the
    ledger, so its ESP reflects the inflated rates."""
    if initial_mapping is None:
        initial_mapping = Mapping(circuit.num_qubits, hw.num_qubits)
    state = ScheduleState(hw, profile, initial_mapping.copy(), allowance=math.inf)
    executed: set[int] = set()
    in_flight: set[int] = set()
    idle = 0
    iterations = 0
    hard_cap = 50 * (len(circuit.gates) + hw.num_qubits + 10)
    while len(executed) < len(circuit.gates):
        iterations += 1
        if iterations > hard_cap:
            raise StallError(f"baseline: no convergence after {iterations} iterations")
        state.open_layer()
        two_q, singles = _pending_pairs(circuit, executed, in_flight)
        progress = False
        for p in executable_pairs(two_q, state.mapping, hw):
            g = circuit.gate(p.key)
            pq = (state.mapping.phys(g.qubits[0]), state.mapping.phys(g.qubits[1]))
            if not (state.qubit_free(pq[0]) and state.qubit_free(pq[1])):
                continue
            if g.kind == "swap":
                state.start_swap(pq, gate_key=g.gate_id)
                in_flight.add(g.gate_id)
            else:
                state.place(Op(kind=g.kind, qubits=pq, gate_id=g.gate_id, param=g.param))
                executed.add(g.gate_id)
            progress = True
        helped_now = set()
        for f in state.flights:
            helped_now.update(f.helps)
        candidates = useful_swaps(two_q, state.mapping, hw)
        for p in two_q:
            if p.key in helped_now:
                continue
            options = [c for c in candidates if p.key in c.helps]
            options.sort(key=lambda c: (hw.edge_error.get(c.edge, 0.0), c.edge))
            for c in options:
                if state.qubit_free(c.edge[0]) and state.qubit_free(c.edge[1]):
                    state.start_swap(c.edge, helps=c.helps)
                    helped_now.update(c.helps)
                    progress = True
                    break
        for g in singles:
            pq = state.mapping.phys(g.qubits[0])
            if state.qubit_free(pq):
                state.place(Op(kind="u", qubits=(pq,), gate_id=g.gate_id, label=g.label))
                executed.add(g.gate_id)
                progress = True
        _, completed = state.close_layer()
        for f in completed:
            if f.gate_key is not None:
                executed.add(f.gate_key)
                in_flight.discard(f.gate_key)
                progress = True
        if progress:
            idle = 0
        else:
            idle += 1
            if idle > hw.num_qubits:
                raise StallError(f"baseline: stuck for {idle} iterations")
    return ScheduledCircuit(
        num_physical=hw.num_qubits,
        layers=state.layers,
        crosstalk_ledger=state.ledger,
        initial_mapping=initial_mapping,
        final_mapping=state.mapping.copy(),
    )


def serialize_crosstalk(
    sched: ScheduledCircuit,
    circuit: LogicalCircuit,
    hw: CouplingGraph,
    profile: CrosstalkProfile,
) -> ScheduledCircuit:
    """Rebuild a schedule with zero committed crosstalk by delaying.

    Operations are replayed in their original order; each is placed at the
    earliest layer where its qubits are free and its link shares no layer
    with a profile-linked link.  Op order fixes the mapping evolution, so
    only timing changes."""
    layers: list[list[Op]] = []
    busy: list[set[int]] = []
    active: list[set[tuple[int, int]]] = []
    mapping = sched.initial_mapping.copy()
    qubit_ready: dict[int, int] = {}

    def ensure(n: int):
        while len(layers) < n:
            layers.append([])
            busy.append(set())
            active.append(set())

    def clashes(edge, layer_idx) -> bool:
        if layer_idx >= len(active):
            return False
        for other in active[layer_idx]:
            if profile.record_for(edge, other) is not None:
                return True
        return False

    def fits(qubits, layer_idx) -> bool:
        if layer_idx >= len(busy):
            return True
        return not (busy[layer_idx] & set(qubits))

    for layer in sched.layers:
        for op in layer:
            if op.kind == "swap" and op.slice_index != 1:
                continue
            if op.kind == "swap":
                edge = (min(op.qubits), max(op.qubits))
                start = max((qubit_ready.get(q, 0) for q in edge), default=0)
                while True:
                    ok = all(
                        fits(edge, start + k) and not clashes(edge, start + k)
                        for k in range(SWAP_DURATION)
                    )
                    if ok:
                        break
                    start += 1
                ensure(start + SWAP_DURATION)
                for k in range(SWAP_DURATION):
                    layers[start + k].append(
                        Op(kind="swap", qubits=edge, gate_id=op.gate_id, slice_index=k + 1)
                    )
                    busy[start + k].update(edge)
                    active[start + k].add(edge)
                for q in edge:
                    qubit_ready[q] = start + SWAP_DURATION
                if op.gate_id is None:
                    mapping.apply_swap(*edge)
            elif op.kind == "u":
                g = circuit.gate(op.gate_id)
                pq = mapping.phys(g.qubits[0])
                start = qubit_ready.get(pq, 0)
                while not fits((pq,), start):
                    start += 1
                ensure(start + 1)
                layers[start].append(Op(kind="u", qubits=(pq,), gate_id=op.gate_id, label=op.label))
                busy[start].add(pq)
                qubit_ready[pq] = start + 1
            else:
                g = circuit.gate(op.gate_id)
                pq = (mapping.phys(g.qubits[0]), mapping.phys(g.qubits[1]))
                edge = (min(pq), max(pq))
                start = max(qubit_ready.get(q, 0) for q in pq)
                while not (fits(pq, start) and not clashes(edge, start)):
                    start += 1
                ensure(start + 1)
                layers[start].append(Op(kind=op.kind, qubits=pq, gate_id=op.gate_id, param=op.param))
                busy[start].add(pq[0])
                busy[start].add(pq[1])
                active[start].add(edge)
                for q in pq:
                    qubit_ready[q] = start + 1
    packed = [layer for layer in layers if layer]
    return ScheduledCircuit(
        num_physical=sched.num_physical,
        layers=packed,
        crosstalk_ledger=[],
        initial_mapping=sched.initial_mapping,
        final_mapping=mapping,
    )


def baseline_schedule(
    circuit: LogicalCircuit,
    hw: CouplingGraph,
    profile: CrosstalkProfile,
    initial_mapping: Mapping | None = None,
) -> ScheduledCircuit:
    """Oblivious routing followed by crosstalk removal through delays."""
    routed = oblivious_schedule(circuit, hw, profile, initial_mapping)
    return serialize_crosstalk(routed, circuit, hw, profile)
