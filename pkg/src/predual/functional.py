"""Normal functionals on block-matrix algebras.

A functional is stored through its representing matrices under the trace
pairing ``phi(x) = sum_i trace(a_i x_i)``.  With this pairing the module
actions become ``a_{x phi} = x a_phi`` and ``a_{phi x} = a_phi x``, and the
polar decomposition ``phi = v|phi|`` is the left matrix polar decomposition
``a_phi = v |a_phi|`` with ``|a_phi| = (a_phi^* a_phi)^{1/2}``.

Two scalar modes exist.  Float functionals hold complex numpy arrays.  Exact
functionals hold :class:`~predual.exact.ExactMatrix` blocks; they are built
from spectral data ``(v, weights, positions)`` in which ``|phi|`` is diagonal
with rational weights, which is the only form whose polar decomposition can be
computed without leaving the rationals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraShape
from .errors import InputError
from .exact import ExactMatrix, GaussianRational, parse_rational, rational_sqrt

TAU_RANK = 1e-10
TAU_RECONSTRUCT = 1e-10
TAU_EQUAL = 1e-9

EXACT = "exact"
FLOAT = "float"


class InexactWarning(UserWarning):
    """An exact-mode computation had to fall back to floating point."""


# -- block helpers ------------------------------------------------------------

def _is_exact(block) -> bool:
    return isinstance(block, ExactMatrix)


def block_adjoint(a):
    return a.adjoint() if _is_exact(a) else a.conj().T


def block_trace(a):
    return a.trace() if _is_exact(a) else complex(np.trace(a))


def block_to_float(a) -> np.ndarray:
    return a.to_complex() if _is_exact(a) else np.asarray(a, dtype=complex)


def _zeros_like(a):
    return ExactMatrix.zeros(*a.shape) if _is_exact(a) else np.zeros_like(a)


def _coerce_pair(a, b):
    if _is_exact(a) and _is_exact(b):
        return a, b
    return block_to_float(a), block_to_float(b)


# -- spectral data -------------------------------------------------------------

@dataclass(frozen=True)
class SpectralBlock:
    """``a = v . diag(weights at positions)`` with ``v^* v`` the diagonal support."""

    v: ExactMatrix
    weights: tuple[Fraction, ...]
    positions: tuple[int, ...]

    def __post_init__(self):
        n, m = self.v.shape
        if n != m:
            raise InputError("spectral form: v must be square")
        weights = tuple(parse_rational(w) for w in self.weights)
        positions = tuple(int(p) for p in self.positions)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "positions", positions)
        if len(weights) != len(positions):
            raise InputError("spectral form: weights and positions differ in length")
        if len(set(positions)) != len(positions) or any(not 0 <= p < n for p in positions):
            raise InputError(f"spectral form: positions {list(positions)} invalid for dimension {n}")
        if any(w < 0 for w in weights):
            raise InputError("spectral form: weights must be nonnegative")
        if self.v.adjoint() @ self.v != self.support():
            raise InputError("spectral form: v^* v must equal the diagonal support projection")

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    def support_positions(self) -> tuple[int, ...]:
        return tuple(p for p, w in zip(self.positions, self.weights) if w > 0)

    def positive(self) -> ExactMatrix:
        diag = [0] * self.dim
        for p, w in zip(self.positions, self.weights):
            diag[p] = w
        return ExactMatrix.diag(diag)

    def support(self) -> ExactMatrix:
        diag = [0] * self.dim
        for p in self.support_positions():
            diag[p] = 1
        return ExactMatrix.diag(diag)

    def matrix(self) -> ExactMatrix:
        return self.v @ self.positive()


# -- functionals ---------------------------------------------------------------

class Functional:
    """Normal functional on a block algebra, stored by representing matrices."""

    __slots__ = ("shape", "blocks", "spectral")

    def __init__(self, blocks: Sequence, shape: Optional[AlgebraShape] = None,
                 spectral: Optional[Sequence[SpectralBlock]] = None):
        blocks = tuple(blocks)
        if not blocks:
            raise InputError("a functional needs at least one block")
        exact = [_is_exact(b) for b in blocks]
        if any(exact) and not all(exact):
            raise InputError("cannot mix exact and float blocks")
        if not all(exact):
            blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        for b in blocks:
            if len(b.shape) != 2 or b.shape[0] != b.shape[1]:
                raise InputError(f"representing matrices must be square, got {b.shape}")
        dims = tuple(b.shape[0] for b in blocks)
        if shape is None:
            shape = AlgebraShape(dims)
        elif shape.blocks != dims:
            raise InputError(f"block dimensions {list(dims)} do not match shape {list(shape.blocks)}")
        self.shape = shape
        self.blocks = blocks
        self.spectral = tuple(spectral) if spectral is not None else None

    # construction
    @classmethod
    def from_spectral(cls, spectral: Sequence[SpectralBlock],
                      shape: Optional[AlgebraShape] = None) -> "Functional":
        spectral = tuple(spectral)
        return cls([s.matrix() for s in spectral], shape=shape, spectral=spectral)

    @classmethod
    def diagonal(cls, weights: Sequence, shape: Optional[AlgebraShape] = None,
                 exact: bool = True) -> "Functional":
        """Functional with a real diagonal representing matrix.

        ``weights`` is laid out over the blocks of ``shape`` in order (one
        entry per diagonal position); without ``shape`` a single block is used.
        Negative entries are absorbed into the sign of ``v``.
        """
        weights = list(weights)
        if shape is None:
            shape = AlgebraShape((len(weights),))
        if sum(shape.blocks) != len(weights):
            raise InputError("diagonal weights must cover every diagonal position of the shape")
        if not exact:
            out, i = [], 0
            for b in shape.blocks:
                out.append(np.diag(np.asarray(weights[i:i + b], dtype=complex)))
                i += b
            return cls(out, shape=shape)
        spectral, i = [], 0
        for b in shape.blocks:
            chunk = [parse_rational(w) for w in weights[i:i + b]]
            i += b
            v = ExactMatrix.diag([(1 if w > 0 else -1) if w != 0 else 0 for w in chunk])
            spectral.append(SpectralBlock(v, tuple(abs(w) for w in chunk), tuple(range(b))))
        return cls.from_spectral(spectral, shape=shape)

    @classmethod
    def zero(cls, shape: AlgebraShape, exact: bool = False) -> "Functional":
        if exact:
            return cls([ExactMatrix.zeros(b) for b in shape.blocks], shape=shape)
        return cls([np.zeros((b, b), dtype=complex) for b in shape.blocks], shape=shape)

    # properties
    @property
    def mode(self) -> str:
        return EXACT if _is_exact(self.blocks[0]) else FLOAT

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT

    def __repr__(self) -> str:
        return f"Functional(mode={self.mode}, blocks={list(self.shape.blocks)})"

    def check_shape(self, shape: AlgebraShape) -> None:
        if self.shape.blocks != shape.blocks:
            raise InputError(f"functional blocks {list(self.shape.blocks)} do not match "
                             f"algebra blocks {list(shape.blocks)}")

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.is_exact:
            return all(b.is_zero() for b in self.blocks)
        return all(np.abs(b).max(initial=0.0) <= tol for b in self.blocks)

    def to_float(self) -> "Functional":
        if not self.is_exact:
            return self
        return Functional([b.to_complex() for b in self.blocks], shape=self.shape)

    def restrict_to_blocks(self, indices) -> "Functional":
        keep = set(indices)
        blocks = [b if i in keep else _zeros_like(b) for i, b in enumerate(self.blocks)]
        spectral = None
        if self.spectral is not None:
            spectral = [s if i in keep else SpectralBlock(ExactMatrix.zeros(s.dim), (), ())
                        for i, s in enumerate(self.spectral)]
        return Functional(blocks, shape=self.shape, spectral=spectral)

    # evaluation and linear structure
    def __call__(self, x: Sequence):
        """phi(x) = sum_i trace(a_i x_i)."""
        x = list(x)
        if len(x) != len(self.blocks):
            raise InputError("element and functional have different block counts")
        if self.is_exact and all(_is_exact(xi) for xi in x):
            total_re, total_im = Fraction(0), Fraction(0)
            for a, xi in zip(self.blocks, x):
                t = (a @ xi).trace()
                total_re += t.re
                total_im += t.im
            return GaussianRational(total_re, total_im)
        return sum(complex(np.trace(block_to_float(a) @ block_to_float(xi)))
                   for a, xi in zip(self.blocks, x))

    def _combine(self, other: "Functional", sign: int) -> "Functional":
        if not isinstance(other, Functional):
            return NotImplemented
        other.check_shape(self.shape)
        out = []
        for a, b in zip(self.blocks, other.blocks):
            a, b = _coerce_pair(a, b)
            out.append(a + b if sign > 0 else a - b)
        return Functional(out, shape=self.shape)

    def __add__(self, other):
        return self._combine(other, +1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self) -> "Functional":
        spectral = None
        if self.spectral is not None:
            spectral = [SpectralBlock(-s.v, s.weights, s.positions) for s in self.spectral]
        return Functional([-b for b in self.blocks], shape=self.shape, spectral=spectral)

    def __mul__(self, c) -> "Functional":
        if self.is_exact and isinstance(c, (Rational, str)):
            return Functional([b * c for b in self.blocks], shape=self.shape)
        if isinstance(c, (int, float, complex, np.number, Rational)):
            return Functional([block_to_float(b) * complex(c) for b in self.blocks], shape=self.shape)
        return NotImplemented

    __rmul__ = __mul__

    def equals(self, other: "Functional", tol: float = 0.0) -> bool:
        if self.shape.blocks != other.shape.blocks:
            return False
        if self.is_exact and other.is_exact and tol == 0.0:
            return all(a == b for a, b in zip(self.blocks, other.blocks))
        return max_abs_diff(self, other) <= tol


def max_abs_diff(phi: Functional, psi: Functional) -> float:
    return max(float(np.abs(block_to_float(a) - block_to_float(b)).max(initial=0.0))
               for a, b in zip(phi.blocks, psi.blocks))


def as_element(blocks: Sequence, exact: bool = False) -> list:
    """Normalize an algebra element given as per-block matrices."""
    if exact:
        return [b if _is_exact(b) else ExactMatrix.from_entries(b) for b in blocks]
    return [block_to_float(b) for b in blocks]


def identity_element(shape: AlgebraShape, exact: bool = False) -> list:
    if exact:
        return [ExactMatrix.identity(b) for b in shape.blocks]
    return [np.eye(b, dtype=complex) for b in shape.blocks]


# -- trace norm ---------------------------------------------------------------

def _exact_block_trace_norm(a: ExactMatrix) -> Optional[Fraction]:
    for gram in (a.adjoint() @ a, a @ a.adjoint()):
        if gram.is_diagonal():
            roots = [rational_sqrt(d.re) for d in gram.diagonal()]
            if all(r is not None for r in roots):
                return sum(roots, Fraction(0))
    return None


def trace_norm(phi: Functional):
    """Sum of singular values over blocks, i.e. the norm of ``phi`` on the algebra.

    Exact functionals give a ``Fraction`` whenever ``a^* a`` (or ``a a^*``) is
    diagonal with rational square roots, which covers every functional built from
    spectral data and the sums and differences the splitter forms.  Other exact
    inputs fall back to floating point with an :class:`InexactWarning`.
    """
    if phi.is_exact:
        total = Fraction(0)
        for a in phi.blocks:
            t = _exact_block_trace_norm(a)
            if t is None:
                warnings.warn("trace norm not rational-diagonalizable; using floating point",
                              InexactWarning, stacklevel=2)
                return trace_norm(phi.to_float())
            total += t
        return total
    return float(sum(np.linalg.svd(b, compute_uv=False).sum() for b in phi.blocks if b.size))


def matrix_trace_norm(a) -> float:
    """Float trace norm of a single matrix."""
    a = block_to_float(a)
    return float(np.linalg.svd(a, compute_uv=False).sum()) if a.size else 0.0


# -- polar decomposition ------------------------------------------------------

@dataclass(frozen=True)
class BlockEigen:
    """Eigen-data of ``|phi|`` on its support inside one block.

    ``values`` are in decreasing order.  In exact mode ``basis`` is a tuple of
    standard-basis positions; in float mode it is an ``n x r`` array of columns.
    """

    values: tuple
    basis: object


@dataclass(frozen=True)
class PolarForm:
    v: tuple
    positive: tuple
    support: tuple
    eigen: tuple[BlockEigen, ...]
    shape: AlgebraShape
    mode: str

    def reconstruct(self) -> Functional:
        return Functional([v @ p for v, p in zip(self.v, self.positive)], shape=self.shape)

    def positive_functional(self) -> Functional:
        return Functional(list(self.positive), shape=self.shape)

    @property
    def rank(self) -> int:
        return sum(len(e.values) for e in self.eigen)


def _polar_exact_block(a: ExactMatrix, spectral: Optional[SpectralBlock]):
    if spectral is not None:
        pairs = sorted(((w, p) for p, w in zip(spectral.positions, spectral.weights) if w > 0),
                       key=lambda t: (-t[0], t[1]))
        eigen = BlockEigen(tuple(w for w, _ in pairs), tuple(p for _, p in pairs))
        return spectral.v, spectral.positive(), spectral.support(), eigen
    gram = a.adjoint() @ a
    if not gram.is_diagonal():
        raise InputError("exact polar decomposition needs a^* a diagonal; convert to float mode")
    roots = [rational_sqrt(d.re) for d in gram.diagonal()]
    if any(r is None for r in roots):
        raise InputError("exact polar decomposition needs rational singular values; convert to float mode")
    positive = ExactMatrix.diag(roots)
    support = ExactMatrix.diag([1 if r else 0 for r in roots])
    pinv = ExactMatrix.diag([1 / r if r else 0 for r in roots])
    v = a @ pinv
    pairs = sorted(((r, p) for p, r in enumerate(roots) if r > 0), key=lambda t: (-t[0], t[1]))
    eigen = BlockEigen(tuple(r for r, _ in pairs), tuple(p for _, p in pairs))
    return v, positive, support, eigen


def _polar_float_block(a: np.ndarray, tau_rank: float):
    n = a.shape[0]
    if n == 0:
        z = np.zeros((0, 0), dtype=complex)
        return z, z, z, BlockEigen((), np.zeros((0, 0), dtype=complex))
    w, sigma, vh = np.linalg.svd(a)
    r = int(np.sum(sigma > tau_rank))
    wr, sr, vr = w[:, :r], sigma[:r], vh[:r].conj().T
    v = wr @ vr.conj().T
    positive = (vr * sr) @ vr.conj().T
    support = vr @ vr.conj().T
    return v, positive, support, BlockEigen(tuple(float(s) for s in sr), vr)


def polar_decompose(phi: Functional, tau_rank: float = TAU_RANK) -> PolarForm:
    """Polar decomposition ``phi = v|phi|`` with ``v^* v = s(|phi|)``.

    ``v`` vanishes on the kernel of ``|phi|``, which makes it unique.  In float
    mode singular values at or below ``tau_rank`` are treated as zero.
    """
    vs, ps, ss, eig = [], [], [], []
    for i, a in enumerate(phi.blocks):
        if phi.is_exact:
            spec = phi.spectral[i] if phi.spectral is not None else None
            v, p, s, e = _polar_exact_block(a, spec)
        else:
            v, p, s, e = _polar_float_block(a, tau_rank)
        vs.append(v)
        ps.append(p)
        ss.append(s)
        eig.append(e)
    return PolarForm(tuple(vs), tuple(ps), tuple(ss), tuple(eig), phi.shape, phi.mode)


# -- module actions, adjoint ----------------------------------------------------

def act(x: Sequence, phi: Functional, side: str = "left") -> Functional:
    """``x phi`` (side='left', y -> phi(yx)) or ``phi x`` (side='right', y -> phi(xy))."""
    x = list(x)
    if len(x) != len(phi.blocks):
        raise InputError("element and functional have different block counts")
    out = []
    for xi, a in zip(x, phi.blocks):
        if xi.shape != a.shape:
            raise InputError(f"block shape mismatch {xi.shape} vs {a.shape}")
        xi, a = _coerce_pair(xi, a)
        if side == "left":
            out.append(xi @ a)
        elif side == "right":
            out.append(a @ xi)
        else:
            raise InputError(f"side must be 'left' or 'right', got {side!r}")
    return Functional(out, shape=phi.shape)


def adjoint(phi: Functional) -> Functional:
    """phi^*(x) = conj(phi(x^*)); represented by the conjugate transpose."""
    return Functional([block_adjoint(a) for a in phi.blocks], shape=phi.shape)


# -- norm additivity ----------------------------------------------------------

@dataclass
class KusudaReport:
    norm_additive: bool
    additivity_gap: float
    abs_additive_error: Optional[float] = None
    shared_isometry_error: Optional[float] = None
    details: dict = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        if not self.norm_additive:
            return True
        return self.abs_additive_error <= tol and self.shared_isometry_error <= tol


def kusuda_check(phi1: Functional, phi2: Functional, tol: float = TAU_EQUAL,
                 tau_rank: float = TAU_RANK) -> KusudaReport:
    """Check what norm additivity ``|phi1 + phi2| = |phi1| + |phi2|`` forces.

    When ``||phi1 + phi2|| = ||phi1|| + ||phi2||`` within ``tol``, the positive
    parts add and both summands share the polar isometry of the sum; the report
    carries the trace-norm size of both discrepancies.  Non-additive pairs are
    flagged and the conclusions are not evaluated.
    """
    phi2.check_shape(phi1.shape)
    f1, f2 = phi1.to_float(), phi2.to_float()
    total = f1 + f2
    n1, n2, n12 = trace_norm(f1), trace_norm(f2), trace_norm(total)
    gap = n1 + n2 - n12
    scale = max(1.0, n1 + n2)
    if gap > tol * scale:
        return KusudaReport(False, gap)
    polar = polar_decompose(total, tau_rank)
    p1, p2 = polar_decompose(f1, tau_rank), polar_decompose(f2, tau_rank)
    abs_err = sum(matrix_trace_norm(p - (q1 + q2))
                  for p, q1, q2 in zip(polar.positive, p1.positive, p2.positive))
    iso_err = 0.0
    for part, pp in ((f1, p1), (f2, p2)):
        err = sum(matrix_trace_norm(v @ q - a) for v, q, a in zip(polar.v, pp.positive, part.blocks))
        iso_err = max(iso_err, err)
    return KusudaReport(True, gap, abs_err, iso_err, {"norms": (n1, n2, n12)})
