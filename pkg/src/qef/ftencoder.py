"""Block-transversal encoder synthesis using shared GHZ resource states.

The transmitter data columns are split into ``g`` contiguous blocks.  Each
stabilizer row ``i`` owns one GHZ state with one qubit per block; that qubit
sits right after its block's data columns.  Every CNOT acts inside a single
block, so a fault can only spread within its block.

Stages, per block and in order:

* X stage: fan-out from the row's GHZ qubit onto the data columns whose X
  content must flip.
* Z stage: data-controlled CNOTs onto the block's GHZ qubits, found by
  solving a linear system over GF(2).  A rank-deficient system is patched by
  borrowing block data columns as extra generators.
* repair: a GHZ qubit whose X column became empty receives CNOTs from the
  other generator columns.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from qef import gf2
from qef.circuit import (
    CliffordCircuit,
    StabilizerTableau,
    apply_circuit,
    concat,
    fanin,
    fanout,
)
from qef.code import ColumnLayout, ColumnRole, CssCode, EaCssCode, as_ea
from qef.gf2 import BitMatrix

TieBreak = Literal["couple", "zero"]
RepairRule = Literal["all", "minimal"]


class BadPartition(ValueError):
    pass


class Unsolvable(RuntimeError):
    def __init__(self, block: int, detail: str = ""):
        self.block = block
        super().__init__(f"block {block + 1}: Z stage has no solution{': ' + detail if detail else ''}")


class OddBlockCountZSeed(UserWarning):
    """The last of an odd number of blocks gets no Z seed on its GHZ qubits."""


@dataclass(frozen=True)
class BlockPartition:
    n_data: int
    blocks: tuple[tuple[int, int], ...]  # half-open ranges over data columns

    @property
    def g(self) -> int:
        return len(self.blocks)

    def block_of(self, q: int) -> int:
        for j, (lo, hi) in enumerate(self.blocks):
            if lo <= q < hi:
                return j
        raise IndexError(q)

    def boundaries(self) -> list[int]:
        return [hi for _, hi in self.blocks[:-1]]


def plan_blocks(n_data: int, g: int | None = None, boundaries=None) -> BlockPartition:
    """Contiguous blocks, either near-equal (larger blocks first) or cut after
    the listed 1-based data positions."""
    if boundaries is not None:
        cuts = [int(b) for b in boundaries]
        if g is not None and g != len(cuts) + 1:
            raise BadPartition(f"{len(cuts)} boundaries give {len(cuts) + 1} blocks, not {g}")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise BadPartition(f"boundaries must be strictly increasing: {cuts}")
        if cuts and (cuts[0] < 1 or cuts[-1] > n_data - 1):
            raise BadPartition(f"boundaries must lie in 1..{n_data - 1}: {cuts}")
        edges = [0, *cuts, n_data]
    else:
        if g is None or not 1 <= g <= n_data:
            raise BadPartition(f"need 1 <= g <= {n_data}, got {g}")
        base, extra = divmod(n_data, g)
        sizes = [base + (j < extra) for j in range(g)]
        edges = [0, *np.cumsum(sizes).tolist()]
    return BlockPartition(n_data, tuple(zip(edges[:-1], edges[1:])))


@dataclass(frozen=True)
class FtLayout:
    partition: BlockPartition
    rho: int
    rho1: int
    rho2: int
    c: int
    data_map: tuple[int, ...]  # base transmitter column -> FT column
    receiver_cols: tuple[int, ...]
    columns: ColumnLayout

    @property
    def g(self) -> int:
        return self.partition.g

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def transmitter_qubits(self) -> int:
        return self.width - self.c

    def entangled_col(self, i: int, j: int) -> int:
        lo, hi = self.partition.blocks[j]
        return hi + j * self.rho + i

    def entangled(self, j: int) -> list[int]:
        return [self.entangled_col(i, j) for i in range(self.rho)]

    def data_cols(self, j: int) -> list[int]:
        lo, hi = self.partition.blocks[j]
        return [self.data_map[q] for q in range(lo, hi)]

    def block_columns(self, j: int) -> set[int]:
        return set(self.data_cols(j)) | set(self.entangled(j))

    def block_of_column(self, col: int) -> int | None:
        return self.columns.roles[col].block

    def to_json(self) -> dict:
        return {
            "blocks": [list(b) for b in self.partition.blocks],
            "rho": self.rho,
            "rho1": self.rho1,
            "rho2": self.rho2,
            "c": self.c,
            "columns": self.columns.to_json(),
        }


def ancilla_positions(rho1: int, rho2: int, n_free: int) -> tuple[list[int], list[int]]:
    """Interleave |+> and |0> ancillas, then the surplus of the larger kind."""
    if rho1 + rho2 > n_free:
        raise BadPartition(f"{rho1 + rho2} ancillas do not fit in {n_free} free columns")
    m = min(rho1, rho2)
    xs = [2 * i for i in range(m)]
    zs = [2 * i + 1 for i in range(m)]
    surplus = list(range(2 * m, rho1 + rho2))
    (xs if rho1 > rho2 else zs).extend(surplus)
    return xs, zs


def make_layout(ea: EaCssCode, part: BlockPartition) -> FtLayout:
    n, c = ea.n, ea.c
    if part.n_data != n:
        raise BadPartition(f"partition covers {part.n_data} columns, code has {n}")
    rho = max(ea.rho1, ea.rho2)
    xs, zs = ancilla_positions(ea.rho1, ea.rho2, n - c)
    base_role = {q: ColumnRole("info") for q in range(n - c)}
    base_role.update({q: ColumnRole("ancilla-plus", i) for i, q in enumerate(xs)})
    base_role.update({q: ColumnRole("ancilla-zero", i) for i, q in enumerate(zs)})
    base_role.update({q: ColumnRole("epair-tx") for q in range(n - c, n)})
    roles: list[ColumnRole] = []
    data_map = []
    for j, (lo, hi) in enumerate(part.blocks):
        for q in range(lo, hi):
            data_map.append(len(roles))
            r = base_role[q]
            roles.append(ColumnRole(r.kind, r.stabilizer, j))
        roles += [ColumnRole("entangled", i, j) for i in range(rho)]
    rx = tuple(range(len(roles), len(roles) + c))
    roles += [ColumnRole("epair-rx")] * c
    return FtLayout(part, rho, ea.rho1, ea.rho2, c, tuple(data_map), rx, ColumnLayout(tuple(roles)))


def initial_tableau_ft(ea: EaCssCode | CssCode, part: BlockPartition) -> tuple[StabilizerTableau, FtLayout]:
    ea = as_ea(ea)
    lay = make_layout(ea, part)
    n, c, r1, r2, g = ea.n, ea.c, ea.rho1, ea.rho2, part.g
    if g % 2:
        warnings.warn(
            f"g={g} is odd: block {g} has no Z seed and relies on augmentation",
            OddBlockCountZSeed,
            stacklevel=2,
        )
    roles = lay.columns.roles
    x = gf2.zeros(r1 + r2, lay.width)
    z = gf2.zeros(r1 + r2, lay.width)
    for col, role in enumerate(roles):
        if role.kind == "ancilla-plus":
            x[role.stabilizer, col] = 1
        elif role.kind == "ancilla-zero":
            z[r1 + role.stabilizer, col] = 1
    for e in range(c):
        tx, rx = lay.data_map[n - c + e], lay.receiver_cols[e]
        for i in np.nonzero(ea.hx[:, n + e])[0]:
            x[i, [tx, rx]] = 1
        for r in np.nonzero(ea.hz[:, n + e])[0]:
            z[r1 + r, [tx, rx]] = 1
    for i in range(r1):
        x[i, [lay.entangled_col(i, j) for j in range(g)]] = 1
    for r in range(r2):
        for m in range(g // 2):
            z[r1 + r, [lay.entangled_col(r, 2 * m), lay.entangled_col(r, 2 * m + 1)]] = 1
    return StabilizerTableau(x, z), lay


def target_matrices(ea: EaCssCode, lay: FtLayout) -> tuple[BitMatrix, BitMatrix]:
    """The base code's generators placed on the FT columns (zero on GHZ qubits)."""
    n = ea.n
    cols = list(lay.data_map) + list(lay.receiver_cols)
    tx = gf2.zeros(ea.rho1, lay.width)
    tz = gf2.zeros(ea.rho2, lay.width)
    tx[:, cols] = ea.hx[:, : n + ea.c]
    tz[:, cols] = ea.hz[:, : n + ea.c]
    return tx, tz


def synth_ft_x(t: StabilizerTableau, lay: FtLayout, ea: EaCssCode) -> list[CliffordCircuit]:
    tx, _ = target_matrices(ea, lay)
    out = []
    for j in range(lay.g):
        data = lay.data_cols(j)
        gates = []
        for i in range(ea.rho1):
            flips = [q for q in data if tx[i, q] != t.xpart[i, q]]
            gates += fanout(lay.entangled_col(i, j), flips)
        out.append(CliffordCircuit(lay.width, tuple(gates)))
    return out


@dataclass
class BlockZResult:
    circuit: CliffordCircuit
    generators: list[int]
    augmented: list[int]
    corrected: list[int]
    solution: BitMatrix


def _z_stage(
    t: StabilizerTableau, lay: FtLayout, tz: BitMatrix, j: int, tie_break: TieBreak
) -> BlockZResult:
    r1 = lay.rho1
    zr = t.zpart[r1:]
    ent = lay.entangled(j)
    data = lay.data_cols(j)
    aug: list[int] = []
    while True:
        corrected = [q for q in data if q not in aug]
        gens = aug + ent
        gmat = zr[:, gens]
        rhs = tz[:, corrected] ^ zr[:, corrected]
        try:
            sol = gf2.solve(gmat, rhs)
            break
        except gf2.NoSolution:
            pass
        base_rank = gf2.rank(gmat)
        for cand in sorted(corrected, reverse=True):
            if zr[:, cand].any() and gf2.rank(zr[:, [cand] + gens]) > base_rank:
                aug.append(cand)
                break
        else:
            raise Unsolvable(j, "no block column raises the generator rank")
    if tie_break == "couple":
        null = gf2.nullspace(gmat)
        if len(null):
            for k in range(len(corrected)):
                if not rhs[:, k].any():
                    sol[:, k] = null[-1]
    gates = []
    for k, q in enumerate(corrected):
        gates += fanout(q, [gens[r] for r in np.nonzero(sol[:, k])[0]])
    return BlockZResult(CliffordCircuit(lay.width, tuple(gates)), gens, aug, corrected, sol)


def _repair(
    t: StabilizerTableau, lay: FtLayout, j: int, gens: list[int], rule: RepairRule
) -> tuple[CliffordCircuit, list[int]]:
    gates, stuck = [], []
    x = t.xpart.copy()
    for e in lay.entangled(j):
        if x[:, e].any():
            continue
        pool = [q for q in sorted(gens) if q != e and x[:, q].any()]
        if rule == "minimal":
            pool = pool[:1]
        while pool and not np.bitwise_xor.reduce(x[:, pool], axis=1).any():
            pool.pop()
        if not pool:
            stuck.append(e)
            continue
        for gate in fanin(pool, e):
            x[:, e] ^= x[:, gate.a]
            gates.append(gate)
    return CliffordCircuit(lay.width, tuple(gates)), stuck


@dataclass
class FtSynthesisTrace:
    layout: FtLayout
    u: list[CliffordCircuit]
    o: list[CliffordCircuit]
    r: list[CliffordCircuit]
    augmented: list[list[int]]
    z_results: list[BlockZResult]
    unrepaired: list[int] = field(default_factory=list)
    snapshots: list[tuple[str, StabilizerTableau]] = field(default_factory=list)

    @property
    def initial(self) -> StabilizerTableau:
        return self.snapshots[0][1]

    @property
    def final(self) -> StabilizerTableau:
        return self.snapshots[-1][1]

    def snapshot(self, name: str) -> StabilizerTableau:
        return dict(self.snapshots)[name]

    def x_weights(self) -> list[list[int]]:
        """``[i][j]``: CNOT count of row i's fan-out in block j's X stage."""
        lay = self.layout
        w = [[0] * lay.g for _ in range(lay.rho1)]
        for j, circ in enumerate(self.u):
            for gate in circ.gates:
                i = lay.columns.roles[gate.a].stabilizer
                w[i][j] += 1
        return w

    def z_weights(self) -> list[list[int]]:
        """``[i][j]``: Z support change of row i on block j's data columns."""
        lay = self.layout
        before = self.initial.zpart[lay.rho1 :]
        after = self.final.zpart[lay.rho1 :]
        return [
            [int((before[i, lay.data_cols(j)] ^ after[i, lay.data_cols(j)]).sum()) for j in range(lay.g)]
            for i in range(lay.rho2)
        ]


@dataclass
class FtSynthesis:
    encoder: CliffordCircuit
    layout: FtLayout
    trace: FtSynthesisTrace

    def __iter__(self):
        return iter((self.encoder, self.layout, self.trace))

    def ft_code(self) -> EaCssCode:
        """The encoded stabilizer group as an EA code over the FT columns."""
        fin = self.trace.final
        lay = self.layout
        code = CssCode(fin.xpart[: lay.rho1], fin.zpart[lay.rho1 :])
        return EaCssCode(code, lay.c, lay.columns)

    def parameters(self, base: EaCssCode) -> tuple[int, int]:
        """(transmitter qubits, logical qubits) of the FT code."""
        extra = self.layout.g * self.layout.rho
        return base.n + extra, base.k + extra


def synth_ft(
    ea: EaCssCode | CssCode,
    part: BlockPartition,
    tie_break: TieBreak = "couple",
    repair: RepairRule = "all",
) -> FtSynthesis:
    ea = as_ea(ea)
    t, lay = initial_tableau_ft(ea, part)
    _, tz = target_matrices(ea, lay)
    snaps = [("initial", t)]
    us = synth_ft_x(t, lay, ea)
    for j, u in enumerate(us):
        t = apply_circuit(t, u)
        snaps.append((f"U{j + 1}", t))
    os_, rs, augs, zres, unrepaired = [], [], [], [], []
    for j in range(lay.g):
        res = _z_stage(t, lay, tz, j, tie_break)
        t = apply_circuit(t, res.circuit)
        snaps.append((f"O{j + 1}", t))
        rep, stuck = _repair(t, lay, j, res.generators, repair)
        unrepaired += stuck
        t = apply_circuit(t, rep)
        snaps.append((f"R{j + 1}", t))
        os_.append(res.circuit)
        rs.append(rep)
        augs.append(res.augmented)
        zres.append(res)
    stages = [*us] + [c for pair in zip(os_, rs) for c in pair]
    encoder = concat(lay.width, *stages)
    trace = FtSynthesisTrace(lay, us, os_, rs, augs, zres, unrepaired, snaps)
    return FtSynthesis(encoder, lay, trace)


def cross_block_gates(circuit: CliffordCircuit, lay: FtLayout) -> list:
    bad = []
    for gate in circuit.gates:
        blocks = {lay.block_of_column(q) for q in gate.qubits()}
        if len(blocks) != 1 or None in blocks:
            bad.append(gate)
    return bad


def verify_ft(
    encoder: CliffordCircuit,
    ea: EaCssCode | CssCode,
    part: BlockPartition,
    augmented: list[int] = (),
    expected: StabilizerTableau | None = None,
) -> list[str]:
    """Names of violated checks, in evaluation order; empty means valid."""
    ea = as_ea(ea)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OddBlockCountZSeed)
        t0, lay = initial_tableau_ft(ea, part)
    if encoder.qubits != lay.width:
        return ["qubit-range"]
    failures = []
    if cross_block_gates(encoder, lay):
        failures.append("transversality")
    fin = apply_circuit(t0, encoder)
    if not fin.is_commuting():
        failures.append("commutation")
    if fin.rank() != ea.rho1 + ea.rho2:
        failures.append("rank")
    tx, tz = target_matrices(ea, lay)
    keep = [q for q in list(lay.data_map) + list(lay.receiver_cols) if q not in set(augmented)]
    if not np.array_equal(fin.xpart[: ea.rho1][:, keep], tx[:, keep]):
        failures.append("x-realization")
    if not np.array_equal(fin.zpart[ea.rho1 :][:, keep], tz[:, keep]):
        failures.append("z-realization")
    if expected is not None and not fin.same_group(expected):
        failures.append("final-tableau")
    return failures
