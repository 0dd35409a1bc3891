"""CNOT/Hadamard circuits and their sign-free action on stabilizer tableaux.

Conjugating a stabilizer group by a gate acts on the binary (X|Z) matrix as
a column operation:

* ``CX(c, t)``: X column t += X column c, Z column c += Z column t
* ``H(q)``: swap X column q with Z column q
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from qef import gf2
from qef.code import ParseError
from qef.gf2 import BitMatrix


class Gate(NamedTuple):
    kind: str  # "CX" or "H"
    a: int  # control (CX) or the qubit (H)
    b: int = -1  # target (CX)

    def qubits(self) -> tuple[int, ...]:
        return (self.a, self.b) if self.kind == "CX" else (self.a,)

    def __str__(self) -> str:
        return f"CX {self.a} {self.b}" if self.kind == "CX" else f"H {self.a}"


def CX(control: int, target: int) -> Gate:
    if control == target:
        raise ValueError(f"CX control and target coincide: {control}")
    return Gate("CX", control, target)


def H(qubit: int) -> Gate:
    return Gate("H", qubit)


def fanout(control: int, targets: Iterable[int]) -> list[Gate]:
    """CNOT with one control and several targets, expanded in ascending target order."""
    return [CX(control, t) for t in sorted(targets)]


def fanin(controls: Iterable[int], target: int) -> list[Gate]:
    return [CX(c, target) for c in sorted(controls)]


@dataclass(frozen=True)
class CliffordCircuit:
    qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.kind not in ("CX", "H"):
                raise ValueError(f"unsupported gate {g.kind!r}")
            if g.kind == "CX" and g.a == g.b:
                raise ValueError(f"CX control and target coincide: {g}")
            for q in g.qubits():
                if not 0 <= q < self.qubits:
                    raise ValueError(f"{g} touches qubit {q} outside 0..{self.qubits - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: CliffordCircuit) -> CliffordCircuit:
        if other.qubits != self.qubits:
            raise ValueError("cannot concatenate circuits over different qubit counts")
        return CliffordCircuit(self.qubits, self.gates + other.gates)

    @property
    def cx_count(self) -> int:
        return sum(g.kind == "CX" for g in self.gates)


def concat(qubits: int, *parts: CliffordCircuit | Iterable[Gate]) -> CliffordCircuit:
    gates: list[Gate] = []
    for part in parts:
        gates.extend(part.gates if isinstance(part, CliffordCircuit) else part)
    return CliffordCircuit(qubits, tuple(gates))


def dagger(c: CliffordCircuit) -> CliffordCircuit:
    # CX and H are self-inverse
    return CliffordCircuit(c.qubits, tuple(reversed(c.gates)))


@dataclass(frozen=True)
class StabilizerTableau:
    xpart: BitMatrix
    zpart: BitMatrix

    def __post_init__(self):
        x, z = gf2.as_bits(self.xpart), gf2.as_bits(self.zpart)
        if x.shape != z.shape:
            raise ValueError(f"X part {x.shape} and Z part {z.shape} differ in shape")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "xpart", x)
        object.__setattr__(self, "zpart", z)

    @classmethod
    def from_css(cls, hx, hz, cols: int | None = None) -> StabilizerTableau:
        hx = gf2.as_bits(hx, cols)
        hz = gf2.as_bits(hz, hx.shape[1])
        n = hx.shape[1]
        return cls(
            np.concatenate([hx, gf2.zeros(hz.shape[0], n)]),
            np.concatenate([gf2.zeros(hx.shape[0], n), hz]),
        )

    @property
    def rows(self) -> int:
        return self.xpart.shape[0]

    @property
    def qubits(self) -> int:
        return self.xpart.shape[1]

    def symplectic(self) -> BitMatrix:
        return np.concatenate([self.xpart, self.zpart], axis=1)

    def commutation_matrix(self) -> BitMatrix:
        return gf2.matmul(self.xpart, self.zpart.T) ^ gf2.matmul(self.zpart, self.xpart.T)

    def is_commuting(self) -> bool:
        return not self.commutation_matrix().any()

    def rank(self) -> int:
        return gf2.rank(self.symplectic())

    def same_group(self, other: StabilizerTableau) -> bool:
        return gf2.row_space_equal(self.symplectic(), other.symplectic())

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return np.array_equal(self.xpart, other.xpart) and np.array_equal(self.zpart, other.zpart)

    __hash__ = None  # type: ignore[assignment]


def _apply_inplace(x: np.ndarray, z: np.ndarray, g: Gate) -> None:
    if g.kind == "CX":
        x[:, g.b] ^= x[:, g.a]
        z[:, g.a] ^= z[:, g.b]
    else:
        tmp = x[:, g.a].copy()
        x[:, g.a] = z[:, g.a]
        z[:, g.a] = tmp


def conjugate(t: StabilizerTableau, g: Gate) -> StabilizerTableau:
    for q in g.qubits():
        if not 0 <= q < t.qubits:
            raise ValueError(f"{g} touches qubit {q} outside the tableau")
    x, z = t.xpart.copy(), t.zpart.copy()
    _apply_inplace(x, z, g)
    return StabilizerTableau(x, z)


def apply_circuit(t: StabilizerTableau, c: CliffordCircuit | Iterable[Gate]) -> StabilizerTableau:
    gates = c.gates if isinstance(c, CliffordCircuit) else tuple(c)
    x, z = t.xpart.copy(), t.zpart.copy()
    for g in gates:
        for q in g.qubits():
            if not 0 <= q < t.qubits:
                raise ValueError(f"{g} touches qubit {q} outside the tableau")
        _apply_inplace(x, z, g)
    return StabilizerTableau(x, z)


# --- text format --------------------------------------------------------------


def serialize(c: CliffordCircuit) -> str:
    return "\n".join([f"QUBITS {c.qubits}"] + [str(g) for g in c.gates]) + "\n"


def parse_circuit(text: str) -> CliffordCircuit:
    qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *args = line.split()
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise ParseError(f"non-integer operand in {line!r}", lineno, len(op) + 2) from None
        if qubits is None:
            if op != "QUBITS" or len(nums) != 1 or nums[0] < 0:
                raise ParseError("first statement must be 'QUBITS <n>'", lineno, 1)
            qubits = nums[0]
            continue
        if op == "CX" and len(nums) == 2:
            g = Gate("CX", nums[0], nums[1])
        elif op == "H" and len(nums) == 1:
            g = Gate("H", nums[0])
        else:
            raise ParseError(f"unknown or malformed gate {line!r}", lineno, 1)
        if g.kind == "CX" and g.a == g.b:
            raise ParseError("CX control equals target", lineno, 1)
        for q in g.qubits():
            if not 0 <= q < qubits:
                raise ParseError(f"qubit {q} outside 0..{qubits - 1}", lineno, 1)
        gates.append(g)
    if qubits is None:
        raise ParseError("missing 'QUBITS <n>' header", 1, 1)
    return CliffordCircuit(qubits, tuple(gates))
