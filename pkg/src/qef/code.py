"""CSS and entanglement-assisted CSS codes.

An entanglement-assisted (EA) code is stored as an ordinary CSS pair over
``n + c`` columns: the ``n`` transmitter qubits followed by the ``c`` receiver
halves of the preshared Bell pairs.  The transmitter halves are the last ``c``
transmitter columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from qef import gf2
from qef._backend import kernels
from qef.gf2 import BitMatrix

MAX_DISTANCE_QUBITS = 24

ROLE_KINDS = (
    "data",
    "ancilla-plus",
    "ancilla-zero",
    "info",
    "epair-tx",
    "epair-rx",
    "entangled",
)


class NotDualContaining(ValueError):
    def __init__(self, c: int):
        self.c = c
        super().__init__(
            f"H1 H2^T != 0: rank {c}, entanglement assistance with {c} Bell pair(s) needed"
        )


class RankDeficient(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ColumnRole:
    kind: str
    stabilizer: int | None = None
    block: int | None = None

    def __post_init__(self):
        if self.kind not in ROLE_KINDS:
            raise ValueError(f"unknown column role {self.kind!r}")
        if self.kind == "entangled" and self.stabilizer is None:
            raise ValueError("entangled roles need a stabilizer index")

    def to_json(self) -> dict:
        out: dict = {"role": self.kind}
        if self.stabilizer is not None:
            out["stabilizer"] = self.stabilizer
        if self.block is not None:
            out["block"] = self.block
        return out


@dataclass(frozen=True)
class ColumnLayout:
    roles: tuple[ColumnRole, ...]

    def __post_init__(self):
        seen = set()
        for r in self.roles:
            if r.kind == "entangled":
                key = (r.stabilizer, r.block)
                if key in seen:
                    raise ValueError(f"duplicate entangled column {key}")
                seen.add(key)

    def __len__(self) -> int:
        return len(self.roles)

    def columns(self, *kinds: str) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r.kind in kinds]

    def to_json(self) -> list[dict]:
        return [dict(index=i, **r.to_json()) for i, r in enumerate(self.roles)]

    @classmethod
    def from_json(cls, items: Iterable[dict]) -> ColumnLayout:
        items = sorted(items, key=lambda d: d["index"])
        return cls(
            tuple(ColumnRole(d["role"], d.get("stabilizer"), d.get("block")) for d in items)
        )


@dataclass(frozen=True)
class CssCode:
    hx: BitMatrix
    hz: BitMatrix

    def __post_init__(self):
        hx, hz = gf2.as_bits(self.hx), gf2.as_bits(self.hz)
        if hx.shape[1] != hz.shape[1]:
            if hx.shape[0] == 0:
                hx = gf2.zeros(0, hz.shape[1])
            elif hz.shape[0] == 0:
                hz = gf2.zeros(0, hx.shape[1])
            else:
                raise ValueError(f"column mismatch: {hx.shape[1]} vs {hz.shape[1]}")
        hx.setflags(write=False)
        hz.setflags(write=False)
        object.__setattr__(self, "hx", hx)
        object.__setattr__(self, "hz", hz)

    @property
    def n(self) -> int:
        return self.hx.shape[1]

    @property
    def rho1(self) -> int:
        return self.hx.shape[0]

    @property
    def rho2(self) -> int:
        return self.hz.shape[0]

    @property
    def k(self) -> int:
        return self.n - gf2.rank(self.hx) - gf2.rank(self.hz)

    @property
    def support(self) -> list[int]:
        """Columns on which errors may occur."""
        return list(range(self.n))


@dataclass(frozen=True)
class EaCssCode:
    """EA code: ``code`` spans transmitter then receiver columns."""

    code: CssCode
    c: int
    layout: ColumnLayout = field(compare=False)

    @property
    def hx(self) -> BitMatrix:
        return self.code.hx

    @property
    def hz(self) -> BitMatrix:
        return self.code.hz

    @property
    def n(self) -> int:
        """Transmitter qubits."""
        return self.code.n - self.c

    @property
    def rho1(self) -> int:
        return self.code.rho1

    @property
    def rho2(self) -> int:
        return self.code.rho2

    @property
    def k(self) -> int:
        return self.code.n - gf2.rank(self.hx) - gf2.rank(self.hz)

    @property
    def receiver_cols(self) -> list[int]:
        return list(range(self.n, self.n + self.c))

    @property
    def epair_tx_cols(self) -> list[int]:
        return list(range(self.n - self.c, self.n))

    @property
    def support(self) -> list[int]:
        return list(range(self.n))


def _check_independent(hx: BitMatrix, hz: BitMatrix) -> None:
    for name, m in (("H1", hx), ("H2", hz)):
        r = gf2.rank(m)
        if r != m.shape[0]:
            raise RankDeficient(f"{name} has {m.shape[0]} rows but rank {r}")


def build_css(h1, h2) -> CssCode:
    h1, h2 = gf2.as_bits(h1), gf2.as_bits(h2)
    code = CssCode(h1, h2)
    c = gf2.rank(gf2.matmul(code.hx, code.hz.T))
    if c:
        raise NotDualContaining(c)
    _check_independent(code.hx, code.hz)
    return code


def ea_extend(h1, h2) -> EaCssCode:
    """Append ``c = rank(H1 H2^T)`` receiver columns so the pair commutes.

    With ``H1 H2^T = P Q`` (rank factorisation), H1 gains ``P`` and H2 gains
    ``Q^T``; then ``[H1|P][H2|Q^T]^T = M + PQ = 0``.
    """
    base = CssCode(h1, h2)
    hx, hz = base.hx, base.hz
    _check_independent(hx, hz)
    p, q = gf2.rank_factorize(gf2.matmul(hx, hz.T))
    c = p.shape[1]
    if c > base.n:
        raise RankDeficient(f"{c} Bell pairs needed but only {base.n} transmitter qubits")
    code = CssCode(np.concatenate([hx, p], axis=1), np.concatenate([hz, q.T], axis=1))
    n = base.n
    roles = [ColumnRole("data")] * (n - c) + [ColumnRole("epair-tx")] * c
    roles += [ColumnRole("epair-rx")] * c
    return EaCssCode(code, c, ColumnLayout(tuple(roles)))


def as_ea(code: CssCode | EaCssCode) -> EaCssCode:
    if isinstance(code, EaCssCode):
        return code
    return EaCssCode(code, 0, ColumnLayout((ColumnRole("data"),) * code.n))


def random_dual_containing(
    n: int, rho1: int, seed: int, rho2: int | None = None
) -> tuple[BitMatrix, BitMatrix]:
    """``H1 = [I | A]`` and ``H2 = [A^T | I]`` with uniform random ``A``.

    When ``rho2 < n - rho1`` is requested, H2 is ``S [A^T | I]`` for a random
    full-rank ``S``, which keeps ``H1 H2^T = 0`` and leaves ``k > 0``.
    """
    if not 0 < rho1 < n:
        raise ValueError(f"need 0 < rho1 < n, got rho1={rho1}, n={n}")
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, size=(rho1, n - rho1), dtype=np.uint8)
    h1 = np.concatenate([gf2.identity(rho1), a], axis=1)
    h2 = np.concatenate([a.T, gf2.identity(n - rho1)], axis=1)
    if rho2 is not None and rho2 != n - rho1:
        if not 0 <= rho2 <= n - rho1:
            raise ValueError(f"rho2 must lie in [0, {n - rho1}]")
        while True:
            s = rng.integers(0, 2, size=(rho2, n - rho1), dtype=np.uint8)
            if gf2.rank(s) == rho2:
                break
        h2 = gf2.matmul(s, h2)
    return h1, h2


# --- minimum distance ---------------------------------------------------------


def _column_masks(m: BitMatrix, cols: list[int]) -> np.ndarray:
    """Bit r of entry j is ``m[r, cols[j]]``."""
    return np.array(
        [sum(1 << int(r) for r in np.nonzero(m[:, c])[0]) for c in cols], dtype=np.uint64
    )


def _min_logical_weight(checks: BitMatrix, stabs: BitMatrix, support: list[int]) -> int | None:
    width = stabs.shape[1]
    if width > 64 or checks.shape[0] > 64:
        raise TooLarge("distance kernel handles at most 64 columns and 64 checks")
    syn = _column_masks(checks, support)
    vec = np.array([1 << c for c in support], dtype=np.uint64)
    red = gf2.rref(stabs)
    basis_rows = red.reduced[: red.rank]
    basis = np.array(
        [sum(1 << int(c) for c in np.nonzero(row)[0]) for row in basis_rows], dtype=np.uint64
    )
    pivbit = np.array([1 << c for c in red.pivot_cols], dtype=np.uint64)
    w = kernels.min_weight_logical(syn, vec, basis, pivbit, len(support))
    return None if w < 0 else int(w)


def brute_force_distance(code: CssCode | EaCssCode) -> int | None:
    """Minimum weight of a logical X or Z operator supported off the receivers.

    Returns None when the code encodes no logical qubit.
    """
    support = code.support
    if len(support) > MAX_DISTANCE_QUBITS:
        raise TooLarge(f"{len(support)} qubits exceeds the enumeration bound {MAX_DISTANCE_QUBITS}")
    dx = _min_logical_weight(code.hz, code.hx, support)
    dz = _min_logical_weight(code.hx, code.hz, support)
    found = [d for d in (dx, dz) if d is not None]
    return min(found) if found else None


# --- file formats -------------------------------------------------------------

Format = Literal["dense", "alist"]


def _data_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((lineno, line))
    return out


def _ints(lineno: int, line: str) -> list[int]:
    vals = []
    for tok in re.finditer(r"\S+", line):
        try:
            vals.append(int(tok.group()))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok.group()!r}", lineno, tok.start() + 1) from None
    return vals


def _parse_dense(text: str) -> BitMatrix:
    lines = _data_lines(text)
    if not lines:
        raise ParseError("missing '<rows> <cols>' header", 1)
    lineno, header = lines[0]
    dims = _ints(lineno, header)
    if len(dims) != 2 or min(dims) < 0:
        raise ParseError("header must be two non-negative integers", lineno, 1)
    rows, cols = dims
    body = lines[1:]
    if len(body) != rows:
        where = body[-1][0] + 1 if body else lineno + 1
        raise ParseError(f"expected {rows} matrix rows, found {len(body)}", where)
    m = gf2.zeros(rows, cols)
    for r, (ln, line) in enumerate(body):
        vals = _ints(ln, line)
        if len(vals) != cols:
            raise ParseError(f"expected {cols} entries, found {len(vals)}", ln, 1)
        for j, v in enumerate(vals):
            if v not in (0, 1):
                raise ParseError(f"entry {v} is not a bit", ln, j + 1)
        m[r] = vals
    return m


def _parse_alist(text: str) -> BitMatrix:
    lines = _data_lines(text)
    if len(lines) < 4:
        raise ParseError("alist needs at least four header lines", len(text.splitlines()) + 1)
    (l1, s1), (l2, s2), (l3, s3), (l4, s4) = lines[:4]
    dims = _ints(l1, s1)
    if len(dims) != 2:
        raise ParseError("first line must be 'N M'", l1, 1)
    ncols, nrows = dims
    if len(_ints(l2, s2)) != 2:
        raise ParseError("second line must hold the maximum column and row weights", l2, 1)
    col_w, row_w = _ints(l3, s3), _ints(l4, s4)
    if len(col_w) != ncols:
        raise ParseError(f"expected {ncols} column weights", l3, 1)
    if len(row_w) != nrows:
        raise ParseError(f"expected {nrows} row weights", l4, 1)
    rest = lines[4:]
    if len(rest) < ncols + nrows:
        where = rest[-1][0] + 1 if rest else l4 + 1
        raise ParseError(f"expected {ncols + nrows} index lines, found {len(rest)}", where)
    m = gf2.zeros(nrows, ncols)
    for j, (ln, line) in enumerate(rest[:ncols]):
        idx = [v for v in _ints(ln, line) if v != 0]
        if len(idx) != col_w[j]:
            raise ParseError(f"column {j + 1} lists {len(idx)} rows, weight says {col_w[j]}", ln, 1)
        for v in idx:
            if not 1 <= v <= nrows:
                raise ParseError(f"row index {v} out of range", ln, 1)
            m[v - 1, j] = 1
    check = gf2.zeros(nrows, ncols)
    for i, (ln, line) in enumerate(rest[ncols : ncols + nrows]):
        idx = [v for v in _ints(ln, line) if v != 0]
        if len(idx) != row_w[i]:
            raise ParseError(f"row {i + 1} lists {len(idx)} columns, weight says {row_w[i]}", ln, 1)
        for v in idx:
            if not 1 <= v <= ncols:
                raise ParseError(f"column index {v} out of range", ln, 1)
            check[i, v - 1] = 1
    if not np.array_equal(m, check):
        raise ParseError("column and row index lists disagree", rest[ncols][0], 1)
    return m


def parse_matrix(text: str | bytes, format: Format = "dense") -> BitMatrix:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if format == "dense":
        return _parse_dense(text)
    if format == "alist":
        return _parse_alist(text)
    raise ValueError(f"unknown matrix format {format!r}")


def write_matrix(m, format: Format = "dense") -> str:
    m = gf2.as_bits(m)
    rows, cols = m.shape
    if format == "dense":
        lines = [f"{rows} {cols}"] + [" ".join(str(int(v)) for v in row) for row in m]
        return "\n".join(lines) + "\n"
    if format != "alist":
        raise ValueError(f"unknown matrix format {format!r}")
    col_idx = [np.nonzero(m[:, j])[0] + 1 for j in range(cols)]
    row_idx = [np.nonzero(m[i])[0] + 1 for i in range(rows)]
    max_c = max((len(c) for c in col_idx), default=0)
    max_r = max((len(r) for r in row_idx), default=0)

    def padded(idx, width):
        vals = list(map(int, idx)) + [0] * (max(width, 1) - len(idx))
        return " ".join(map(str, vals))

    lines = [
        f"{cols} {rows}",
        f"{max_c} {max_r}",
        " ".join(str(len(c)) for c in col_idx),
        " ".join(str(len(r)) for r in row_idx),
    ]
    lines += [padded(c, max_c) for c in col_idx]
    lines += [padded(r, max_r) for r in row_idx]
    return "\n".join(lines) + "\n"


def load_matrix(path, format: Format = "dense") -> BitMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), format)
