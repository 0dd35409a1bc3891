"""Encoder synthesis for a CSS code without fault-tolerance constraints.

The decoder clears the X generators with fan-out CNOTs, moves them to the Z
side with Hadamards, then clears the remaining Z support.  The encoder is the
reversed decoder.  Circuits are returned in the code's own qubit labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qef import gf2
from qef.circuit import CliffordCircuit, StabilizerTableau, apply_circuit, concat, dagger, fanout, H
from qef.code import CssCode, EaCssCode, RankDeficient
from qef.gf2 import BitMatrix


@dataclass(frozen=True)
class StandardForm:
    """Column-permuted generators with the X side in ``[I | A | B]`` form.

    Column ``s`` of ``hx_tilde``/``hz_tilde`` is qubit ``column_perm[s]`` of
    the original code.  The Z rows are only permuted, never recombined.
    """

    hx_tilde: BitMatrix
    hz_tilde: BitMatrix
    column_perm: tuple[int, ...]

    @property
    def rho1(self) -> int:
        return self.hx_tilde.shape[0]

    @property
    def rho2(self) -> int:
        return self.hz_tilde.shape[0]

    @property
    def n(self) -> int:
        return self.hx_tilde.shape[1]

    @property
    def ab_x(self) -> BitMatrix:
        return self.hx_tilde[:, self.rho1 :]

    @property
    def a_z(self) -> BitMatrix:
        return self.hz_tilde[:, self.rho1 : self.rho1 + self.rho2]

    @property
    def b_z(self) -> BitMatrix:
        return self.hz_tilde[:, self.rho1 + self.rho2 :]

    def labels(self, start: int, stop: int) -> list[int]:
        return list(self.column_perm[start:stop])

    def x_weights(self) -> list[int]:
        """Fan-out size of each X-clearing CNOT group."""
        return [int(w) for w in self.ab_x.sum(axis=1)]

    def z_weights(self) -> list[int]:
        """Fan-out size of each info-qubit CNOT group."""
        p = gf2.solve(self.a_z, self.b_z)
        return [int(w) for w in p.sum(axis=0)]


def _matrices(code) -> tuple[BitMatrix, BitMatrix]:
    return gf2.as_bits(code.hx), gf2.as_bits(code.hz, code.hx.shape[1])


def standard_form(code: CssCode | EaCssCode) -> StandardForm:
    hx, hz = _matrices(code)
    rho1, rho2 = hx.shape[0], hz.shape[0]
    if gf2.rank(hx) != rho1 or gf2.rank(hz) != rho2:
        raise RankDeficient("generators are linearly dependent")
    rx = gf2.rref(hx, allow_column_swaps=True)
    rest = list(rx.column_perm[rho1:])
    rz = gf2.rref(hz[:, rest], allow_column_swaps=True)
    if rz.rank != rho2:
        raise RankDeficient("Z generators are dependent outside the X pivot columns")
    perm = tuple(rx.column_perm[:rho1]) + tuple(rest[j] for j in rz.column_perm)
    hx_t = rx.reduced[:rho1][:, [*range(rho1), *(rho1 + j for j in rz.column_perm)]]
    hz_t = hz[:, list(perm)]
    return StandardForm(hx_t.copy(), hz_t.copy(), perm)


def synth_U(sf: StandardForm) -> CliffordCircuit:
    gates = []
    for i in range(sf.rho1):
        targets = [sf.column_perm[sf.rho1 + j] for j in np.nonzero(sf.ab_x[i])[0]]
        gates += fanout(sf.column_perm[i], targets)
    return CliffordCircuit(sf.n, tuple(gates))


def synth_T(rho1: int, n: int, labels: list[int] | None = None) -> CliffordCircuit:
    labels = list(range(rho1)) if labels is None else labels[:rho1]
    return CliffordCircuit(n, tuple(H(q) for q in labels))


def synth_W(t: StabilizerTableau, sf: StandardForm) -> CliffordCircuit:
    """Clear the Z support on the info columns using the current tableau."""
    r1, r2 = sf.rho1, sf.rho2
    zrows = t.zpart[r1 : r1 + r2]
    j2 = sf.labels(r1, r1 + r2)
    j3 = sf.labels(r1 + r2, sf.n)
    p = gf2.solve(zrows[:, j2], zrows[:, j3])
    gates = []
    for col in sorted(range(len(j3)), key=lambda c: j3[c]):
        gates += fanout(j3[col], [j2[r] for r in np.nonzero(p[:, col])[0]])
    return CliffordCircuit(sf.n, tuple(gates))


@dataclass(frozen=True)
class NonFtSynthesis:
    decoder: CliffordCircuit
    encoder: CliffordCircuit
    perm: tuple[int, ...]
    standard: StandardForm
    u: CliffordCircuit
    t: CliffordCircuit
    w: CliffordCircuit

    def __iter__(self):
        return iter((self.decoder, self.encoder, self.perm))


def code_tableau(code) -> StabilizerTableau:
    hx, hz = _matrices(code)
    return StabilizerTableau.from_css(hx, hz)


def synth_nonft(code: CssCode | EaCssCode) -> NonFtSynthesis:
    sf = standard_form(code)
    t0 = code_tableau(code)
    u = synth_U(sf)
    t = synth_T(sf.rho1, sf.n, list(sf.column_perm))
    w = synth_W(apply_circuit(t0, u + t), sf)
    decoder = concat(sf.n, u, t, w)
    return NonFtSynthesis(decoder, dagger(decoder), sf.column_perm, sf, u, t, w)


def initial_tableau_nonft(
    n: int, rho1: int, rho2: int, perm: tuple[int, ...] | None = None
) -> StabilizerTableau:
    """|0> ancillas on the first ``rho1 + rho2`` standard-form columns."""
    perm = tuple(range(n)) if perm is None else perm
    m = rho1 + rho2
    z = gf2.zeros(m, n)
    z[np.arange(m), list(perm[:m])] = 1
    return StabilizerTableau(gf2.zeros(m, n), z)


def is_canonical(t: StabilizerTableau, rho1: int, rho2: int, perm: tuple[int, ...]) -> bool:
    """X part zero and Z part spanning single-qubit Z on the ancilla columns."""
    if t.xpart.any():
        return False
    target = initial_tableau_nonft(t.qubits, rho1, rho2, perm)
    return gf2.row_space_equal(t.zpart, target.zpart)


def verify_nonft(code, encoder: CliffordCircuit, perm: tuple[int, ...]) -> list[str]:
    """Names of violated checks; empty when the encoder is valid."""
    hx, hz = _matrices(code)
    rho1, rho2, n = hx.shape[0], hz.shape[0], hx.shape[1]
    if encoder.qubits != n or sorted(perm) != list(range(n)):
        return ["qubit-range"]
    failures = []
    decoded = apply_circuit(code_tableau(code), dagger(encoder))
    if not is_canonical(decoded, rho1, rho2, tuple(perm)):
        failures.append("decoder-canonical-form")
    start = initial_tableau_nonft(n, rho1, rho2, tuple(perm))
    if not apply_circuit(start, encoder).same_group(code_tableau(code)):
        failures.append("encoder-image")
    return failures
