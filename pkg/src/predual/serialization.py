"""JSON documents for instances, certificates and reports.

Every number is written as a string: rationals as ``"p/q"`` (or an integer),
floats as 17 significant digits.  Complex matrix entries are ``[re, im]``
pairs.  :func:`dumps` is canonical (sorted keys, fixed indentation), so
parse-then-dump of a canonical document reproduces it byte for byte.

Instance document::

    {
      "schema_version": 1,
      "algebra": {"blocks": [2, 3]} | {"blocks": [1, ...], "diffuse_model": {"resolution": n}},
      "mode": "exact" | "float",
      "functional": {"spectral": [{"v": M, "weights": [...], "positions": [...]}, ...]}
                  | {"matrix": [M, ...]}
                  | {"clusters": [{"lambda": "1/2", "mult": 2}, ...]},
      "tolerances": {"tau_rank": "1e-10", ...},   (optional)
      "seed": 7                                    (optional)
    }

A ``clusters`` functional is the diagonal functional with each eigenvalue
repeated ``mult`` times, laid out over the blocks in order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import jsonschema
import numpy as np

from .algebra import AlgebraShape
from .errors import InputError
from .exact import ExactMatrix, format_rational, parse_rational
from .functional import EXACT, FLOAT, TAU_EQUAL, TAU_RANK, Functional, SpectralBlock

SCHEMA_VERSION = 1

_NUM = {"type": "string", "pattern": r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?(\s*/\s*\d+)?\s*$"}
_ENTRY = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]}
_MATRIX = {"type": "array", "minItems": 1,
           "items": {"type": "array", "minItems": 1, "items": _ENTRY}}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "mode", "functional"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "mode": {"enum": [EXACT, FLOAT]},
        "algebra": {
            "type": "object",
            "required": ["blocks"],
            "additionalProperties": False,
            "properties": {
                "blocks": {"type": "array", "minItems": 1,
                           "items": {"type": "integer", "minimum": 1}},
                "diffuse_model": {
                    "type": "object", "required": ["resolution"], "additionalProperties": False,
                    "properties": {"resolution": {"type": "integer", "minimum": 1}},
                },
            },
        },
        "functional": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "spectral": {"type": "array", "minItems": 1, "items": {
                    "type": "object",
                    "required": ["v", "weights", "positions"],
                    "additionalProperties": False,
                    "properties": {
                        "v": _MATRIX,
                        "weights": {"type": "array", "items": _NUM},
                        "positions": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    },
                }},
                "matrix": {"type": "array", "minItems": 1, "items": _MATRIX},
                "clusters": {"type": "array", "minItems": 1, "items": {
                    "type": "object",
                    "required": ["lambda", "mult"],
                    "additionalProperties": False,
                    "properties": {"lambda": _NUM, "mult": {"type": "integer", "minimum": 1}},
                }},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: _NUM for k in ("tau_rank", "tau_cluster", "delta")},
        },
        "seed": {"type": "integer"},
    },
}


# -- scalars -------------------------------------------------------------------

def fmt_number(x) -> str:
    """``"p/q"`` for exact values, 17 significant digits for floats."""
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer, Fraction)):
        return format_rational(Fraction(int(x)) if isinstance(x, np.integer) else x)
    return f"{float(x):.17g}"


def parse_number(s: str, exact: bool):
    return parse_rational(s) if exact else float(Fraction(s.replace(" ", "")))


def _fmt_matrix(a) -> list:
    if isinstance(a, ExactMatrix):
        return [[[format_rational(e.re), format_rational(e.im)] for e in row] for row in a.tolist()]
    a = np.asarray(a, dtype=complex)
    return [[[fmt_number(z.real), fmt_number(z.imag)] for z in row] for row in a]


def _parse_matrix(rows: list, exact: bool, where: str):
    try:
        if exact:
            return ExactMatrix.from_entries(rows)
        out = np.array([[complex(*(parse_number(p, False) for p in e)) if isinstance(e, list)
                         else complex(parse_number(e, False)) for e in row] for row in rows])
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {exc}") from None
    return out


# -- instances -----------------------------------------------------------------

@dataclass
class InstanceDocument:
    functional: Functional
    mode: str
    tolerances: dict = field(default_factory=dict)
    seed: Optional[int] = None
    form: str = "matrix"

    @property
    def tau_rank(self) -> float:
        return float(self.tolerances.get("tau_rank", TAU_RANK))

    @property
    def tau_cluster(self) -> Optional[float]:
        t = self.tolerances.get("tau_cluster")
        return None if t is None else float(t)

    @property
    def delta(self) -> float:
        return float(self.tolerances.get("delta", TAU_EQUAL))


def _field_path(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    return path or "<document>"


def validate_instance(doc) -> None:
    """Schema check; the error message names the offending field."""
    validator = jsonschema.Draft202012Validator(INSTANCE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise InputError(f"field '{_field_path(err)}': {err.message}")


def instance_from_json(doc: dict) -> InstanceDocument:
    validate_instance(doc)
    mode = doc["mode"]
    exact = mode == EXACT
    fdoc = doc["functional"]
    form = next(iter(fdoc))
    shape = AlgebraShape.from_json(doc["algebra"]) if "algebra" in doc else None

    if exact and form == "matrix":
        raise InputError("field 'functional': exact mode needs the spectral or clusters form")

    if form == "clusters":
        weights = []
        for i, c in enumerate(fdoc["clusters"]):
            lam = parse_number(c["lambda"], exact)
            if lam <= 0:
                raise InputError(f"field 'functional.clusters.{i}.lambda': eigenvalues must be positive")
            weights += [lam] * c["mult"]
        if shape is None:
            shape = AlgebraShape((len(weights),))
        if sum(shape.blocks) != len(weights):
            raise InputError(f"field 'functional.clusters': {len(weights)} eigenvalues do not fill "
                             f"the {sum(shape.blocks)} diagonal positions of the algebra")
        phi = Functional.diagonal(weights, shape=shape, exact=exact)
    elif form == "spectral":
        blocks = []
        for i, b in enumerate(fdoc["spectral"]):
            where = f"functional.spectral.{i}"
            v = _parse_matrix(b["v"], True, f"field '{where}.v'")
            try:
                weights = [parse_rational(w) for w in b["weights"]]
                blocks.append(SpectralBlock(v, tuple(weights), tuple(b["positions"])))
            except (InputError, ValueError, ZeroDivisionError) as exc:
                raise InputError(f"field '{where}': {exc}") from None
        phi = Functional.from_spectral(blocks, shape=_shape_for(shape, [b.dim for b in blocks]))
        if not exact:
            phi = phi.to_float()
    else:
        mats = [_parse_matrix(m, False, f"field 'functional.matrix.{i}'")
                for i, m in enumerate(fdoc["matrix"])]
        for i, m in enumerate(mats):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise InputError(f"field 'functional.matrix.{i}': matrix must be square")
        phi = Functional(mats, shape=_shape_for(shape, [m.shape[0] for m in mats]))

    if phi.is_zero():
        raise InputError(f"field 'functional.{form}': the functional is zero (weights sum to 0)")
    tols = {}
    for k, v in doc.get("tolerances", {}).items():
        val = float(Fraction(v.replace(" ", "")))
        if val < 0:
            raise InputError(f"field 'tolerances.{k}': must be nonnegative")
        tols[k] = val
    return InstanceDocument(phi, mode, tols, doc.get("seed"), form)


def _shape_for(shape: Optional[AlgebraShape], dims: list[int]) -> AlgebraShape:
    if shape is None:
        return AlgebraShape(tuple(dims))
    if tuple(dims) != shape.blocks:
        raise InputError(f"field 'algebra.blocks': {list(shape.blocks)} does not match the "
                         f"functional's block sizes {dims}")
    return shape


def functional_to_json(phi: Functional) -> dict:
    if phi.spectral is not None:
        return {"spectral": [{"v": _fmt_matrix(sb.v),
                              "weights": [format_rational(w) for w in sb.weights],
                              "positions": list(sb.positions)} for sb in phi.spectral]}
    return {"matrix": [_fmt_matrix(b) for b in phi.blocks]}


def instance_to_json(inst: InstanceDocument) -> dict:
    phi = inst.functional
    fdoc = functional_to_json(phi)
    if inst.mode == FLOAT and "spectral" in fdoc and not phi.is_exact:
        fdoc = {"matrix": [_fmt_matrix(b) for b in phi.blocks]}
    doc = {"schema_version": SCHEMA_VERSION, "algebra": phi.shape.to_json(),
           "mode": inst.mode, "functional": fdoc}
    if inst.tolerances:
        doc["tolerances"] = {k: fmt_number(v) for k, v in inst.tolerances.items()}
    if inst.seed is not None:
        doc["seed"] = int(inst.seed)
    return doc


def dumps(doc) -> str:
    """Canonical JSON text."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_instance(text: str) -> InstanceDocument:
    return instance_from_json(loads(text))


# -- certificates and reports --------------------------------------------------

def certificate_to_json(cert, solvable: bool) -> dict:
    doc = {
        "solvable": bool(solvable),
        "mode": cert.mode,
        "selection": list(cert.selection),
        "mass": fmt_number(cert.mass),
        "total": fmt_number(cert.total),
        "defect": fmt_number(cert.defect),
        "norms": {"phi": fmt_number(cert.norm_phi), "psi": fmt_number(cert.norm_psi),
                  "phi_plus_psi": fmt_number(cert.norm_plus),
                  "phi_minus_psi": fmt_number(cert.norm_minus)},
        "psi": functional_to_json(cert.psi),
        "e_plus": [_fmt_matrix(x) for x in cert.e_plus],
        "e_minus": [_fmt_matrix(x) for x in cert.e_minus],
    }
    if cert.clusters is not None:
        doc["clusters"] = [{"lambda": fmt_number(v), "mult": m} for v, m in cert.clusters.pairs()]
    return doc


def certificate_from_json(doc: dict, shape: AlgebraShape):
    """Rebuild a :class:`~predual.splitter.SplitCertificate` for re-verification."""
    from .splitter import SplitCertificate

    try:
        mode = doc["mode"]
        exact = mode == EXACT
        norms = doc["norms"]
        psi_doc = doc["psi"]
        if "spectral" in psi_doc:
            spec = [SpectralBlock(ExactMatrix.from_entries(b["v"]),
                                  tuple(parse_rational(w) for w in b["weights"]),
                                  tuple(b["positions"])) for b in psi_doc["spectral"]]
            psi = Functional.from_spectral(spec, shape=shape)
            if not exact:
                psi = psi.to_float()
        else:
            psi = Functional([_parse_matrix(m, exact, "field 'psi'") for m in psi_doc["matrix"]],
                             shape=shape)
        ep = [_parse_matrix(m, exact, "field 'e_plus'") for m in doc["e_plus"]]
        em = [_parse_matrix(m, exact, "field 'e_minus'") for m in doc["e_minus"]]
        num = (lambda s: parse_number(s, exact))
        return SplitCertificate(
            selection=tuple(doc["selection"]), e_plus=ep, e_minus=em, psi=psi,
            norm_phi=num(norms["phi"]), norm_psi=num(norms["psi"]),
            norm_plus=num(norms["phi_plus_psi"]), norm_minus=num(norms["phi_minus_psi"]),
            mass=num(doc["mass"]), total=num(doc["total"]), defect=num(doc["defect"]), mode=mode)
    except KeyError as exc:
        raise InputError(f"certificate: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"certificate: {exc}") from None


def clusters_report_to_json(report) -> dict:
    return {"clusters": [{"lambda": fmt_number(v), "mult": m} for v, m in report.clusters.pairs()],
            "is_trivial": report.is_trivial,
            "block_structure": report.block_structure,
            "warnings": list(report.warnings)}


def ultra_report_to_json(r) -> dict:
    return {
        "generator": r.generator,
        "seed": r.seed,
        "stages": r.n_stages,
        "verdict": r.verdict,
        "decay_rate": None if r.decay_rate is None else fmt_number(r.decay_rate),
        "fitted_constant": fmt_number(r.fitted_constant),
        "cauchy_tol": fmt_number(r.cauchy_tol),
        "cauchy_index": r.cauchy_index,
        "verified_stages": list(r.verified_stages),
        "defects": [fmt_number(d) for d in r.defects],
        "norms": [fmt_number(d) for d in r.norms],
    }


def polyline_to_json(p) -> dict:
    return {"base_norm": fmt_number(p.base_norm),
            "samples": [{"t": fmt_number(t), "selection": list(k), "functional": functional_to_json(x)}
                        for t, k, x in zip(p.times, p.selections, p.samples)]}
