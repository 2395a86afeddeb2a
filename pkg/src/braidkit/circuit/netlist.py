"""Netlist construction, SPICE export/import and nodal admittance assembly.

The :class:`Netlist` is the single source for real-space Laplacians: the
matrix used in analysis is assembled from the same element list that is
written to disk, so an exported file reproduces the analysed circuit.

Directed INIC stamp (``p1`` senses, ``p2`` drives, polarity ``s``)::

    J[p1, p2] -= s * iw * (C1 + C2)      J[p2, p2] += iw * (C1 + C2)
    J[p2, p1] -= s * iw * (C2 - C1)      J[p1, p1] += iw * (C2 - C1)

With ``C1 = C2 = C/2`` the coupling is unidirectional.  The diagonal term is
placed on the driving node, the convention of the k-space Laplacian.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import DomainError
from .inic import inic_halves
from .params import CircuitParams

__all__ = [
    "Element",
    "Netlist",
    "build_netlist",
    "format_si",
    "parse_si",
    "parse_spice",
    "netlist_export",
    "SUBCKT_TEXT",
]

_SUFFIXES = [(1e-15, "f"), (1e-12, "p"), (1e-9, "n"), (1e-6, "u"), (1e-3, "m"),
             (1.0, ""), (1e3, "k"), (1e6, "meg"), (1e9, "g")]


def format_si(x: float) -> str:
    """Engineering notation with a SPICE suffix, 15 significant digits (``4.7e-9`` -> ``4.7n``)."""
    if x == 0:
        return "0"
    mag = abs(x)
    scale, suffix = _SUFFIXES[0]
    for s, name in _SUFFIXES:
        if mag >= s * (1 - 1e-12):
            scale, suffix = s, name
    return f"{x / scale:.15g}{suffix}"


_SI_RE = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)(meg|[fpnumkg])?[a-z]*$", re.IGNORECASE)
_SI_SCALE = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "m": 1e-3, "k": 1e3, "meg": 1e6, "g": 1e9}


def parse_si(text: str) -> float:
    """Inverse of :func:`format_si`; accepts plain floats and trailing unit letters."""
    match = _SI_RE.match(text.strip())
    if not match:
        raise ValueError(f"cannot parse value {text!r}")
    value = float(match.group(1))
    suffix = (match.group(2) or "").lower()
    return value * _SI_SCALE[suffix] if suffix else value


@dataclass
class Element:
    """One card: ``kind`` is R, L, C or X (INIC instance)."""

    kind: str
    name: str
    nodes: tuple
    value: float = 0.0
    subckt: Optional[str] = None
    params: dict = field(default_factory=dict)

    def card(self) -> str:
        head = f"{self.name} {' '.join(self.nodes)}"
        if self.kind == "X":
            args = " ".join(f"{k}={format_si(v)}" for k, v in self.params.items())
            return f"{head} {self.subckt} {args}"
        return f"{head} {format_si(self.value)}"


SUBCKT_TEXT = """\
* INIC: forward (n1 senses n2) C1+C2, reverse C2-C1
.subckt INIC n1 n2 C1=1n C2=1n RA=1k CA=10p
C2 n1 n2 {C2}
RA1 n1 out {RA}
CA1 n1 out {CA}
RA2 out f {RA}
CA2 out f {CA}
C1 f n2 {C1}
E1 out 0 n1 f 1e6
.ends INIC
* INICN: INIC driven through a unity inverting buffer (negative coupling)
.subckt INICN n1 n2 C1=1n C2=1n RA=1k CA=10p
E2 m 0 n2 0 -1
X1 n1 m INIC C1={C1} C2={C2} RA={RA} CA={CA}
.ends INICN
"""


@dataclass
class Netlist:
    """External nodes (in matrix order), elements and the boundary condition."""

    nodes: list
    elements: list
    bc: str
    title: str = ""

    def counts(self) -> dict:
        out: dict = {}
        for e in self.elements:
            key = e.subckt if e.kind == "X" else e.kind
            out[key] = out.get(key, 0) + 1
        return out

    def laplacian(self, omega: float) -> np.ndarray:
        """Nodal admittance matrix over :attr:`nodes` at angular frequency ``omega``.

        Internal nodes (e.g. between an inductor and its series resistance) are
        eliminated by Kron reduction.
        """
        if not omega > 0:
            raise ValueError("omega must be positive")
        index = {name: i for i, name in enumerate(self.nodes)}
        for e in self.elements:
            for node in e.nodes:
                if node != "0" and node not in index:
                    index[node] = len(index)
        size = len(index)
        j = np.zeros((size, size), dtype=complex)
        iw = 1j * omega

        def stamp(a, b, y):
            ia = index.get(a)
            ib = index.get(b)
            if ia is not None:
                j[ia, ia] += y
            if ib is not None:
                j[ib, ib] += y
            if ia is not None and ib is not None:
                j[ia, ib] -= y
                j[ib, ia] -= y

        for e in self.elements:
            a, b = e.nodes
            if e.kind == "R":
                stamp(a, b, 1.0 / e.value)
            elif e.kind == "L":
                stamp(a, b, 1.0 / (iw * e.value))
            elif e.kind == "C":
                stamp(a, b, iw * e.value)
            elif e.kind == "X":
                sign = {"INIC": 1.0, "INICN": -1.0}[e.subckt]
                fwd = iw * (e.params["C1"] + e.params["C2"])
                rev = iw * (e.params["C2"] - e.params["C1"])
                p1, p2 = index[a], index[b]
                j[p1, p2] -= sign * fwd
                j[p2, p2] += fwd
                j[p2, p1] -= sign * rev
                j[p1, p1] += rev
            else:
                raise ValueError(f"unsupported element kind {e.kind!r}")
        n_ext = len(self.nodes)
        if size == n_ext:
            return j
        jee, jei = j[:n_ext, :n_ext], j[:n_ext, n_ext:]
        jie, jii = j[n_ext:, :n_ext], j[n_ext:, n_ext:]
        return jee - jei @ np.linalg.solve(jii, jie)

    def to_spice(self) -> str:
        lines = [f"* {self.title}".rstrip(), f"* bc={self.bc} nodes={len(self.nodes)}"]
        lines += SUBCKT_TEXT.rstrip("\n").split("\n")
        lines += [e.card() for e in self.elements]
        lines.append(".end")
        return "\n".join(lines) + "\n"


def _node(sub: str, cell: int) -> str:
    return f"{sub}{cell}"


def build_netlist(params: CircuitParams, n_cells: int, bc: str = "PBC") -> Netlist:
    """Chain of ``n_cells`` unit cells with nodes ``A1, B1, ..., AN, BN``.

    Every node is grounded through its inductor (with ``esr`` in series) and
    ``r0``.  Each cell has a plain ``c0`` capacitor and two INICs: A_j senses
    B_(j-m) through ``c_m`` and B_j senses A_(j+n) through ``c_n``.  Under OBC
    bonds that would wrap are removed and grounded compensation capacitors
    restore the diagonal at the nodes that lose a contribution.
    """
    bc = bc.upper()
    if bc not in ("OBC", "PBC"):
        raise ValueError(f"bc must be OBC or PBC, got {bc!r}")
    need = params.m + params.n + 1
    if n_cells < need:
        raise DomainError(f"chain of {n_cells} cells is too short for m={params.m}, n={params.n}; need {need}")
    nodes = []
    for cell in range(1, n_cells + 1):
        nodes += [_node("A", cell), _node("B", cell)]
    elements: list = []
    for name in nodes:
        ind = params.l_a if name[0] == "A" else params.l_b
        if params.esr > 0:
            elements.append(Element("L", f"L_{name}", (name, f"{name}_L"), ind))
            elements.append(Element("R", f"RL_{name}", (f"{name}_L", "0"), params.esr))
        else:
            elements.append(Element("L", f"L_{name}", (name, "0"), ind))
        if math.isfinite(params.r0):
            elements.append(Element("R", f"R0_{name}", (name, "0"), params.r0))
    for cell in range(1, n_cells + 1):
        elements.append(Element("C", f"C0_{cell}", (_node("A", cell), _node("B", cell)), params.c0))

    leak = params.inic_leak
    compensation: dict = {}
    bonds = (
        ("M", "A", "B", -params.m, params.c_m, params.m_sign),
        ("N", "B", "A", params.n, params.c_n, params.n_sign),
    )
    for tag, sense, drive, offset, cap, sign in bonds:
        for cell in range(1, n_cells + 1):
            target = cell + offset
            p1 = _node(sense, cell)
            if 1 <= target <= n_cells or bc == "PBC":
                p2 = _node(drive, (target - 1) % n_cells + 1)
                c1, c2 = inic_halves(cap, leak)
                elements.append(Element("X", f"X{tag}_{cell}", (p1, p2),
                                        subckt="INIC" if sign > 0 else "INICN",
                                        params={"C1": c1, "C2": c2, "RA": params.ra, "CA": params.ca}))
            else:
                # the dropped bond would have wrapped onto this drive node; keep its diagonal share
                p2 = _node(drive, (target - 1) % n_cells + 1)
                compensation[p2] = compensation.get(p2, 0.0) + cap
                if leak:
                    compensation[p1] = compensation.get(p1, 0.0) + leak * cap
    for name in nodes:
        if name in compensation:
            elements.append(Element("C", f"CC_{name}", (name, "0"), compensation[name]))
    title = f"braidkit chain N={n_cells} m={params.m} n={params.n}"
    return Netlist(nodes, elements, bc, title)


def netlist_export(params: CircuitParams, n_cells: int, bc: str, path=None) -> str:
    """SPICE text of :func:`build_netlist`; also written to ``path`` when given."""
    text = build_netlist(params, n_cells, bc).to_spice()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


_EXTERNAL = re.compile(r"^([AB])(\d+)$")


def parse_spice(text: str) -> Netlist:
    """Read a netlist written by :meth:`Netlist.to_spice` (R, L, C and INIC cards)."""
    elements = []
    bc = "PBC"
    title = ""
    in_subckt = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            match = re.search(r"bc=(\w+)", line)
            if match:
                bc = match.group(1).upper()
            elif not title:
                title = line.lstrip("* ").strip()
            continue
        low = line.lower()
        if low.startswith(".subckt"):
            in_subckt = True
            continue
        if low.startswith(".ends"):
            in_subckt = False
            continue
        if in_subckt or low.startswith("."):
            continue
        fields = line.split()
        kind = fields[0][0].upper()
        if kind in "RLC":
            if len(fields) < 4:
                raise ValueError(f"malformed card: {line!r}")
            elements.append(Element(kind, fields[0], (fields[1], fields[2]), parse_si(fields[3])))
        elif kind == "X":
            params = {}
            for token in fields[4:]:
                key, _, value = token.partition("=")
                params[key.upper()] = parse_si(value)
            elements.append(Element("X", fields[0], (fields[1], fields[2]), subckt=fields[3].upper(),
                                    params=params))
        else:
            raise ValueError(f"unsupported card: {line!r}")
    names = set()
    for e in elements:
        names.update(n for n in e.nodes if _EXTERNAL.match(n))
    nodes = sorted(names, key=lambda s: (int(_EXTERNAL.match(s).group(2)), s[0]))
    return Netlist(nodes, elements, bc, title)
