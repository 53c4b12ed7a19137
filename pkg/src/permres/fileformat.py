"""JSON problem files and certificates.

Every integer is written as a decimal string so no reader has to guess a
numeric width.  Matrices are row-major lists of rows.  Parse and validation
errors carry the JSON path of the offending value and, when the source text
is available, its line number.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .groups import FiniteGroup, cyclic, dihedral, direct_product, from_permutations
from .linalg import IntegerMatrix
from .modules import (
    FiniteModule,
    Lattice,
    ModuleError,
    PermutationStructure,
    PresentedModule,
    _perm_matrix,
)
from .presentation import (
    PermutationSummand,
    PresentationCertificate,
    Stabilization,
    VerificationError,
    obstruction,
    verify_presentation,
)

CERTIFICATE_KIND = "permutation-presentation-certificate"
FORMAT_VERSION = "1"

_INT_RE = re.compile(r"-?[0-9]+\Z")


class FormatError(ValueError):
    """Malformed input; ``path`` locates the value, ``line`` is 1-based when known."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.path:
            where.append(self.path)
        return f"{', '.join(where)}: {self.message}" if where else self.message


# ---------------------------------------------------------------------------
# Locating JSON paths in source text
# ---------------------------------------------------------------------------

def _path_lines(text: str) -> dict[str, int]:
    """Map each JSON path (``a.b[2]``) to the line where its value starts."""
    out: dict[str, int] = {}
    dec = json.JSONDecoder()
    ws = re.compile(r"[ \t\n\r]*")

    def line_of(pos: int) -> int:
        return text.count("\n", 0, pos) + 1

    def skip(pos: int) -> int:
        return ws.match(text, pos).end()

    def value(pos: int, path: str) -> int:
        pos = skip(pos)
        out[path] = line_of(pos)
        ch = text[pos] if pos < len(text) else ""
        if ch == "{":
            pos = skip(pos + 1)
            if text[pos] == "}":
                return pos + 1
            while True:
                key, pos = dec.raw_decode(text, skip(pos))
                pos = skip(pos) + 1          # colon
                pos = skip(value(pos, f"{path}.{key}" if path else str(key)))
                if text[pos] == "}":
                    return pos + 1
                pos += 1                     # comma
        if ch == "[":
            pos = skip(pos + 1)
            if text[pos] == "]":
                return pos + 1
            i = 0
            while True:
                pos = skip(value(pos, f"{path}[{i}]"))
                i += 1
                if text[pos] == "]":
                    return pos + 1
                pos += 1
        _, end = dec.raw_decode(text, pos)
        return end

    value(0, "")
    return out


class _Reader:
    """Typed access to a parsed document with path-aware errors."""

    def __init__(self, text: Optional[str] = None):
        self._lines = None
        self._text = text

    def fail(self, message: str, path: str) -> FormatError:
        line = None
        if self._text is not None:
            if self._lines is None:
                self._lines = _path_lines(self._text)
            p = path
            while p and p not in self._lines:
                p = re.sub(r"(\.[^.\[]*|\[\d+\])$", "", p)
            line = self._lines.get(p)
        return FormatError(message, path, line)

    def obj(self, doc: Any, path: str) -> dict:
        if not isinstance(doc, dict):
            raise self.fail("expected an object", path)
        return doc

    def key(self, doc: dict, name: str, path: str) -> Any:
        if name not in doc:
            raise self.fail(f"missing key {name!r}", path)
        return doc[name]

    def int(self, v: Any, path: str) -> int:
        if isinstance(v, bool) or not isinstance(v, str) or not _INT_RE.match(v):
            raise self.fail(f"expected an integer string such as \"3\", got {json.dumps(v)}", path)
        return int(v)

    def nat(self, v: Any, path: str) -> int:
        n = self.int(v, path)
        if n < 0:
            raise self.fail("expected a non-negative integer", path)
        return n

    def list(self, v: Any, path: str) -> list:
        if not isinstance(v, list):
            raise self.fail("expected an array", path)
        return v

    def ints(self, v: Any, path: str) -> list[int]:
        return [self.int(x, f"{path}[{i}]") for i, x in enumerate(self.list(v, path))]

    def matrix(self, v: Any, path: str, rows: Optional[int] = None, cols: Optional[int] = None) -> IntegerMatrix:
        if isinstance(v, dict):
            shape = self.ints(self.key(v, "shape", path), f"{path}.shape")
            if len(shape) != 2 or min(shape) < 0:
                raise self.fail("shape must be two non-negative integers", f"{path}.shape")
            data = self.list(self.key(v, "rows", path), f"{path}.rows")
            r, c = shape
            body = [self.ints(row, f"{path}.rows[{i}]") for i, row in enumerate(data)]
            if len(body) != r or any(len(row) != c for row in body):
                raise self.fail(f"rows do not match shape {r}x{c}", f"{path}.rows")
            M = IntegerMatrix(body, r, c)
        else:
            data = self.list(v, path)
            body = [self.ints(row, f"{path}[{i}]") for i, row in enumerate(data)]
            widths = {len(row) for row in body}
            if len(widths) > 1:
                raise self.fail("rows have different lengths", path)
            c = widths.pop() if widths else (cols or 0)
            M = IntegerMatrix(body, len(body), c)
        if rows is not None and M.rows != rows or cols is not None and M.cols != cols:
            raise self.fail(f"expected a {rows}x{cols} matrix, got {M.rows}x{M.cols}", path)
        return M


def _s(x: int) -> str:
    return str(int(x))


def matrix_to_json(A: IntegerMatrix) -> dict:
    return {"shape": [_s(A.rows), _s(A.cols)], "rows": [[_s(x) for x in row] for row in A.tolist()]}


def _load_text(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", line=e.lineno) from None


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

def parse_group(doc: Any, rd: _Reader, path: str = "group") -> FiniteGroup:
    """Group constructors: cyclic, product of cyclics, dihedral, permutations, table."""
    d = rd.obj(doc, path)
    kinds = [k for k in ("cyclic", "product", "dihedral", "permutations", "table") if k in d]
    if len(kinds) != 1:
        raise rd.fail("give exactly one of cyclic, product, dihedral, permutations, table", path)
    kind = kinds[0]
    if kind == "cyclic":
        n = rd.int(d["cyclic"], f"{path}.cyclic")
        if n < 1:
            raise rd.fail("cyclic group order must be positive", f"{path}.cyclic")
        return cyclic(n)
    if kind == "product":
        orders = rd.ints(d["product"], f"{path}.product")
        if not orders or min(orders) < 1:
            raise rd.fail("product needs positive cyclic orders", f"{path}.product")
        G = cyclic(orders[0])
        for n in orders[1:]:
            G = direct_product(G, cyclic(n))
        G.name = " x ".join(f"Z/{n}" for n in orders)
        return G
    if kind == "dihedral":
        n = rd.int(d["dihedral"], f"{path}.dihedral")
        if n < 3:
            raise rd.fail("dihedral group needs n >= 3", f"{path}.dihedral")
        return dihedral(n)
    if kind == "permutations":
        perms = [rd.ints(p, f"{path}.permutations[{i}]")
                 for i, p in enumerate(rd.list(d["permutations"], f"{path}.permutations"))]
        if not perms:
            raise rd.fail("need at least one permutation", f"{path}.permutations")
        n = len(perms[0])
        for i, p in enumerate(perms):
            if sorted(p) != list(range(n)):
                raise rd.fail(f"not a permutation of 0..{n - 1}", f"{path}.permutations[{i}]")
        return from_permutations(perms, name=str(d.get("name", "")))
    table = [rd.ints(row, f"{path}.table[{i}]") for i, row in enumerate(rd.list(d["table"], f"{path}.table"))]
    gens = rd.ints(d["generators"], f"{path}.generators") if "generators" in d else None
    try:
        return FiniteGroup(table, name=str(d.get("name", "")), generators=gens)
    except ValueError as e:
        raise rd.fail(str(e), f"{path}.table") from None


def group_to_json(G: FiniteGroup) -> dict:
    return {"name": G.name, "table": [[_s(x) for x in row] for row in G.table],
            "generators": [_s(g) for g in G.generators]}


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------

def _generator_action(G: FiniteGroup, d: dict, rd: _Reader, path: str, rank: int) -> dict[int, IntegerMatrix]:
    acts = rd.key(d, "actions", path)
    if isinstance(acts, dict):
        out = {}
        for k, v in acts.items():
            g = rd.int(k, f"{path}.actions")
            if not 0 <= g < G.order:
                raise rd.fail(f"no group element {g}", f"{path}.actions.{k}")
            out[g] = rd.matrix(v, f"{path}.actions.{k}", rank, rank)
        return out
    acts = rd.list(acts, f"{path}.actions")
    gens = (rd.ints(d["generators"], f"{path}.generators") if "generators" in d else list(G.generators))
    if len(acts) != len(gens):
        raise rd.fail(f"expected {len(gens)} action matrices (one per group generator {gens}), "
                      f"got {len(acts)}", f"{path}.actions")
    out = {}
    for i, (g, v) in enumerate(zip(gens, acts)):
        if not 0 <= g < G.order:
            raise rd.fail(f"no group element {g}", f"{path}.generators[{i}]")
        out[g] = rd.matrix(v, f"{path}.actions[{i}]", rank, rank)
    return out


def parse_module(G: FiniteGroup, doc: Any, rd: _Reader, path: str = "module") -> PresentedModule:
    d = rd.obj(doc, path)
    kind = rd.key(d, "type", path)
    if kind not in ("lattice", "finite"):
        raise rd.fail("module type must be \"lattice\" or \"finite\"", f"{path}.type")
    if "moduli" in d and kind == "finite":
        moduli = rd.ints(d["moduli"], f"{path}.moduli")
        if any(q < 1 for q in moduli):
            raise rd.fail("moduli must be positive", f"{path}.moduli")
        rank = len(moduli)
        rel = IntegerMatrix.diagonal(moduli) if rank else IntegerMatrix.zeros(0, 0)
    else:
        rank = rd.nat(rd.key(d, "rank", path), f"{path}.rank")
        rel = None
        if kind == "finite":
            rel = rd.matrix(rd.key(d, "relations", path), f"{path}.relations", rows=rank)
    gens = _generator_action(G, d, rd, path, rank)
    try:
        if kind == "lattice":
            from .modules import lattice_from_generators
            return lattice_from_generators(G, rank, gens)
        from .modules import finite_module_from_generators
        return finite_module_from_generators(G, rel, gens)
    except ModuleError as e:
        raise rd.fail(str(e), f"{path}.actions") from None


def _full_action_json(M: PresentedModule) -> list:
    return [matrix_to_json(M.action[g]) for g in M.group.generators]


def module_to_json(M: PresentedModule) -> dict:
    out: dict = {"type": "lattice" if M.is_lattice else "finite", "rank": _s(M.rank)}
    if not M.is_lattice:
        out["relations"] = matrix_to_json(M.relations)
    out["generators"] = [_s(g) for g in M.group.generators]
    out["actions"] = _full_action_json(M)
    return out


def _perm_structure_to_json(P: PermutationStructure) -> dict:
    labels = P.labels if P.labels is not None else list(range(P.rank))
    G = P.group
    return {"rank": _s(P.rank),
            "labels": [_label(x) for x in labels],
            "generators": [_s(g) for g in G.generators],
            "permutations": [[_s(j) for j in P.perm[g]] for g in G.generators]}


def _label(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(str(a) for a in x) + ")"
    return str(x)


def _parse_perm_structure(G: FiniteGroup, doc: Any, rd: _Reader, path: str) -> PermutationStructure:
    d = rd.obj(doc, path)
    n = rd.nat(rd.key(d, "rank", path), f"{path}.rank")
    perms = rd.list(rd.key(d, "permutations", path), f"{path}.permutations")
    gens = rd.ints(rd.key(d, "generators", path), f"{path}.generators")
    if len(perms) != len(gens):
        raise rd.fail("one permutation per generator is required", f"{path}.permutations")
    for i, g in enumerate(gens):
        if not 0 <= g < G.order:
            raise rd.fail(f"no group element {g}", f"{path}.generators[{i}]")
    action = {}
    for i, (g, p) in enumerate(zip(gens, perms)):
        q = rd.ints(p, f"{path}.permutations[{i}]")
        if sorted(q) != list(range(n)):
            raise rd.fail(f"not a permutation of 0..{n - 1}", f"{path}.permutations[{i}]")
        action[g] = _perm_matrix(q) if n else IntegerMatrix.zeros(0, 0)
    labels = d.get("labels")
    try:
        L = PresentedModule.from_generators(G, n, action) if n else Lattice(G, [IntegerMatrix.zeros(0, 0)] * G.order)
        if not isinstance(L, Lattice):
            raise ModuleError("permutation module must be a lattice")
        return PermutationStructure.detect(L, labels=list(labels) if isinstance(labels, list) else None)
    except ModuleError as e:
        raise rd.fail(str(e), f"{path}.permutations") from None


def _parse_lattice(G: FiniteGroup, doc: Any, rd: _Reader, path: str) -> Lattice:
    d = rd.obj(doc, path)
    if d.get("type", "lattice") != "lattice":
        raise rd.fail("expected a lattice", f"{path}.type")
    M = parse_module(G, dict(d, type="lattice"), rd, path)
    assert isinstance(M, Lattice)
    return M


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------

@dataclass
class ProblemFile:
    group: FiniteGroup
    module: PresentedModule
    task: Optional[str] = None
    options: dict = field(default_factory=dict)


def parse_problem(text: str) -> ProblemFile:
    doc = _load_text(text)
    rd = _Reader(text)
    d = rd.obj(doc, "")
    G = parse_group(rd.key(d, "group", ""), rd)
    M = parse_module(G, rd.key(d, "module", ""), rd)
    task = d.get("task")
    if task is not None and not isinstance(task, str):
        raise rd.fail("task must be a string", "task")
    opts = rd.obj(d.get("options", {}), "options")
    options = {}
    for k, v in opts.items():
        options[k] = rd.int(v, f"options.{k}")
    return ProblemFile(G, M, task, options)


def problem_to_json(G: FiniteGroup, M: PresentedModule, task: Optional[str] = None, **options) -> dict:
    out: dict = {"group": group_to_json(G), "module": module_to_json(M)}
    if task:
        out["task"] = task
    if options:
        out["options"] = {k: _s(v) for k, v in options.items()}
    return out


def dumps(doc: Any) -> str:
    """Compact rows, indented structure: matrices stay one row per line."""
    text = json.dumps(doc, indent=1, ensure_ascii=False)
    # fold arrays of scalars onto one line
    return re.sub(r"\[\s+((?:\"[^\"\n]*\",?\s*)+)\]",
                  lambda m: "[" + ", ".join(x.strip().rstrip(",") for x in m.group(1).split("\n") if x.strip()) + "]",
                  text)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def _payload(cert: PresentationCertificate) -> dict:
    """Everything the verifier checks, in canonical order (labels excluded)."""
    G = cert.module.group
    st = cert.stabilization
    sm = cert.summand
    ob = cert.obstruction or obstruction(cert.module)
    A = cert.matrix
    return {
        "group": group_to_json(G),
        "module": module_to_json(cert.module),
        "P0": _perm_structure_to_json(cert.P0),
        "phi": matrix_to_json(cert.phi),
        "P1": module_to_json(cert.P1),
        "iota": matrix_to_json(cert.iota),
        "surjection": matrix_to_json(cert.surjection),
        "summand": None if sm is None else {
            "cover": _perm_structure_to_json(sm.cover),
            "projection": matrix_to_json(sm.projection),
            "section": matrix_to_json(sm.section)},
        "stabilization": None if st is None else {
            "extra": _perm_structure_to_json(st.extra),
            "T": matrix_to_json(st.T)},
        "matrix": None if A is None else matrix_to_json(A),
        "obstruction": {"exponent": _s(ob.exponent),
                        "h1": [_s(x) for x in ob.invariant_factors],
                        "verdict": ob.verdict},
    }


def _strip_labels(doc: Any) -> Any:
    if isinstance(doc, dict):
        return {k: _strip_labels(v) for k, v in doc.items() if k != "labels"}
    if isinstance(doc, list):
        return [_strip_labels(v) for v in doc]
    return doc


def payload_digest(payload: dict) -> str:
    canon = json.dumps(_strip_labels(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def certificate_to_json(cert: PresentationCertificate) -> dict:
    body = _payload(cert)
    return {"kind": CERTIFICATE_KIND, "version": FORMAT_VERSION, **body,
            "digest": payload_digest(body)}


@dataclass
class LoadedCertificate:
    certificate: PresentationCertificate
    stored_matrix: Optional[IntegerMatrix]
    stored_obstruction: tuple[int, tuple[int, ...], str]
    digest: Optional[str]
    payload: dict


def parse_certificate(text: str) -> LoadedCertificate:
    doc = _load_text(text)
    rd = _Reader(text)
    d = rd.obj(doc, "")
    if d.get("kind") != CERTIFICATE_KIND:
        raise rd.fail(f"not a certificate (kind must be {CERTIFICATE_KIND!r})", "kind")
    if d.get("version") != FORMAT_VERSION:
        raise rd.fail(f"unsupported version {d.get('version')!r}", "version")
    G = parse_group(rd.key(d, "group", ""), rd)
    M = parse_module(G, rd.key(d, "module", ""), rd)
    if not isinstance(M, FiniteModule):
        raise rd.fail("certificate target must be a finite module", "module")
    P0 = _parse_perm_structure(G, rd.key(d, "P0", ""), rd, "P0")
    P1 = _parse_lattice(G, rd.key(d, "P1", ""), rd, "P1")
    phi = rd.matrix(rd.key(d, "phi", ""), "phi", M.rank, P0.rank)
    iota = rd.matrix(rd.key(d, "iota", ""), "iota", P0.rank, P1.rank)
    surj = rd.matrix(rd.key(d, "surjection", ""), "surjection", P0.rank, M.rank)
    sm = None
    if d.get("summand") is not None:
        s = rd.obj(d["summand"], "summand")
        C = _parse_perm_structure(G, rd.key(s, "cover", "summand"), rd, "summand.cover")
        proj = rd.matrix(rd.key(s, "projection", "summand"), "summand.projection", P1.rank, C.rank)
        sec = rd.matrix(rd.key(s, "section", "summand"), "summand.section", C.rank, P1.rank)
        sm = PermutationSummand(P1, C, proj, sec)
    st = None
    if d.get("stabilization") is not None:
        s = rd.obj(d["stabilization"], "stabilization")
        E = _parse_perm_structure(G, rd.key(s, "extra", "stabilization"), rd, "stabilization.extra")
        n = P0.rank + E.rank
        T = rd.matrix(rd.key(s, "T", "stabilization"), "stabilization.T", n, n)
        st = Stabilization(E, T, 0)
    A = None
    if d.get("matrix") is not None:
        A = rd.matrix(d["matrix"], "matrix")
    ob = rd.obj(rd.key(d, "obstruction", ""), "obstruction")
    stored_ob = (rd.int(rd.key(ob, "exponent", "obstruction"), "obstruction.exponent"),
                 tuple(rd.ints(rd.key(ob, "h1", "obstruction"), "obstruction.h1")),
                 str(rd.key(ob, "verdict", "obstruction")))
    cert = PresentationCertificate(M, P0, phi, P1, iota, surj, sm, st, None)
    payload = {k: v for k, v in d.items() if k not in ("kind", "version", "digest")}
    return LoadedCertificate(cert, A, stored_ob, d.get("digest"), payload)


def verify_loaded(lc: LoadedCertificate) -> list[str]:
    """All failures found, each naming the violated condition; empty means pass."""
    failures = []
    cert = lc.certificate
    try:
        verify_presentation(cert)
    except (VerificationError, ModuleError) as e:
        failures.append(str(e))
        return failures
    computed = cert.matrix
    if (computed is None) != (lc.stored_matrix is None):
        failures.append("square matrix present without stabilization data, or missing although stabilized")
    elif computed is not None and computed != lc.stored_matrix:
        failures.append("stored square matrix differs from (iota ⊕ id) ∘ T")
    rep = obstruction(cert.module)
    if lc.stored_obstruction != (rep.exponent, rep.invariant_factors, rep.verdict):
        failures.append(f"stored obstruction {lc.stored_obstruction} differs from the recomputed "
                        f"({rep.exponent}, {rep.invariant_factors}, {rep.verdict!r})")
    if lc.digest is None:
        failures.append("certificate has no digest")
    elif payload_digest(lc.payload) != lc.digest:
        failures.append("digest mismatch: the data differ from what was certified")
    return failures

