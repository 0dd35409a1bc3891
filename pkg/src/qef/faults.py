"""Analytic no-propagation bounds and Monte Carlo Pauli-frame fault injection."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Iterable, Literal

import numpy as np

from qef._backend import kernels
from qef.circuit import CliffordCircuit, Gate
from qef.code import CssCode, EaCssCode, as_ea
from qef.encoder import StandardForm, standard_form
from qef.ftencoder import FtSynthesisTrace, OddBlockCountZSeed, Unsolvable, plan_blocks, synth_ft

Injection = Literal["gate", "group"]
CHUNK = 8192


@dataclass(frozen=True)
class FaultModel:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


def no_prop_factor(w: int, p: float, paper_literal: bool = False) -> float:
    """Probability that a fan-out with ``w`` targets spreads nothing.

    The control must avoid X/Y, and an even number of targets may carry a
    Z/Y that flows back onto the control.  ``paper_literal`` adds the two
    terms instead of multiplying them; that form is not a probability.
    """
    if w < 0:
        raise ValueError("weight must be non-negative")
    q = 2.0 * p / 3.0
    even = sum(math.comb(w, c) * q**c * (1 - q) ** (w - c) for c in range(0, w + 1, 2))
    return (1 - q) + even if paper_literal else (1 - q) * even


def _bound(weights: Iterable[int], p: float, paper_literal: bool = False) -> float:
    prod = 1.0
    for w in weights:
        prod *= no_prop_factor(w, p, paper_literal)
    value = 1.0 - prod
    if paper_literal:
        return value
    if not 0.0 <= value <= 1.0 + 1e-12:
        warnings.warn(f"bound {value} left [0, 1] before clamping", RuntimeWarning, stacklevel=2)
    return min(1.0, max(0.0, value))


def nonft_weights(sf: StandardForm) -> dict[str, list[int]]:
    return {"ab": sf.x_weights(), "a": sf.z_weights()}


def ft_weights(trace: FtSynthesisTrace) -> dict[str, list[list[int]]]:
    return {"x": trace.x_weights(), "z": trace.z_weights()}


def bound_nonft(sf: StandardForm, p: float, paper_literal: bool = False) -> float:
    w = nonft_weights(sf)
    return _bound(w["ab"] + w["a"], p, paper_literal)


def bound_ft(trace: FtSynthesisTrace, p: float, paper_literal: bool = False) -> float:
    w = ft_weights(trace)
    flat = [v for row in w["x"] + w["z"] for v in row]
    return _bound(flat, p, paper_literal)


# --- Monte Carlo --------------------------------------------------------------


def _groups(gates: tuple[Gate, ...]) -> list[list[int]]:
    """Runs of adjacent CX gates that all share a control or all share a target."""
    out: list[list[int]] = []
    for g, gate in enumerate(gates):
        if gate.kind != "CX":
            continue
        if out and out[-1][-1] == g - 1:
            run = [gates[i] for i in out[-1]]
            if all(r.a == gate.a for r in run) or all(r.b == gate.b for r in run):
                out[-1].append(g)
                continue
        out.append([g])
    return out


def fault_locations(
    circuit: CliffordCircuit, protected: Iterable[int] = (), injection: Injection = "gate"
) -> list[tuple[int, int]]:
    """``(gate index, qubit)`` pairs, in firing order."""
    skip = set(protected)
    locs: list[tuple[int, int]] = []
    if injection == "gate":
        for g, gate in enumerate(circuit.gates):
            if gate.kind == "CX":
                locs += [(g, q) for q in (gate.a, gate.b) if q not in skip]
    elif injection == "group":
        for grp in _groups(circuit.gates):
            seen: list[int] = []
            for g in grp:
                for q in circuit.gates[g].qubits():
                    if q not in skip and q not in seen:
                        seen.append(q)
            locs += [(grp[0], q) for q in seen]
    else:
        raise ValueError(f"unknown injection mode {injection!r}")
    return locs


def _encode(circuit: CliffordCircuit):
    kind = np.array([0 if g.kind == "CX" else 1 for g in circuit.gates], dtype=np.int8)
    qa = np.array([g.a for g in circuit.gates], dtype=np.int32)
    qb = np.array([max(g.b, 0) for g in circuit.gates], dtype=np.int32)
    return kind, qa, qb


def sample_faults(rng: np.random.Generator, trials: int, nloc: int, p: float) -> np.ndarray:
    """Depolarizing codes per location: 0 = I, 1 = X, 3 = Y, 2 = Z."""
    u = rng.random((trials, nloc))
    out = np.zeros((trials, nloc), dtype=np.uint8)
    out[u < p] = 2
    out[u < 2 * p / 3] = 3
    out[u < p / 3] = 1
    return out


def count_events(circuit, faults: np.ndarray, locs: list[tuple[int, int]]) -> int:
    kind, qa, qb = _encode(circuit)
    loc_gate = np.array([g for g, _ in locs], dtype=np.int32)
    loc_qubit = np.array([q for _, q in locs], dtype=np.int32)
    return int(
        kernels.propagate_frames(
            kind, qa, qb, circuit.qubits, np.ascontiguousarray(faults), loc_gate, loc_qubit
        )
    )


@dataclass
class McResult:
    p: float
    trials: int
    seed: int
    estimate: float
    stderr: float


def simulate(
    circuit: CliffordCircuit,
    model: FaultModel,
    trials: int,
    seed: int,
    protected: Iterable[int] = (),
    injection: Injection = "gate",
) -> McResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    locs = fault_locations(circuit, protected, injection)
    nchunks = -(-trials // CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(nchunks)
    events = 0
    for c, ss in enumerate(seqs):
        size = min(CHUNK, trials - c * CHUNK)
        if not locs:
            continue
        faults = sample_faults(np.random.default_rng(ss), size, len(locs), model.p)
        events += count_events(circuit, faults, locs)
    est = events / trials
    return McResult(model.p, trials, seed, est, math.sqrt(est * (1 - est) / trials))


@dataclass
class PropagationReport:
    bound_nf: float | None
    bound_ft: float | None
    factors: dict = field(default_factory=dict)
    mc: McResult | None = None

    def to_json(self) -> dict:
        return {
            "bound_nf": self.bound_nf,
            "bound_ft": self.bound_ft,
            "factors": self.factors,
            "mc": asdict(self.mc) if self.mc is not None else None,
        }


def min_blocks(
    ea: EaCssCode | CssCode, p: float, g_max: int, partitions: dict[int, object] | None = None
) -> int | None:
    """Smallest g whose FT bound is strictly below the non-FT bound.

    ``partitions`` may pin the block layout for particular g; other g use
    near-equal blocks.  A g whose synthesis is unsolvable is skipped.
    """
    ea = as_ea(ea)
    if not 1 <= g_max <= ea.n:
        raise ValueError(f"g_max must lie in 1..{ea.n}")
    nf = bound_nonft(standard_form(ea), p)
    for g in range(1, g_max + 1):
        part = (partitions or {}).get(g) or plan_blocks(ea.n, g)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OddBlockCountZSeed)
            try:
                trace = synth_ft(ea, part).trace
            except Unsolvable:
                continue
        if bound_ft(trace, p) < nf:
            return g
    return None
