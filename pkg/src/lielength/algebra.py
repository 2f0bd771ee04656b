"""Finite-dimensional unital Banach algebras and the exp/log calculus over them.

Three concrete algebra kinds are supported:

* ``scalar-complex`` / ``scalar-real`` -- the base field with absolute value;
* ``matrix(k)`` -- k-by-k complex matrices with the operator (spectral) norm;
* ``functions-on-graph`` -- complex functions sampled on the vertices of a
  finite graph, pointwise operations, sup norm over vertices.  Connected
  components of the graph play the role of connected components of the
  underlying compact space.

Matrices over an algebra carry two norms: the entry-max norm ``|X|_inf`` and
the operator norm of X acting on the l1-sum of n copies of the algebra,
computed as max over columns j of sum_i |X_ij|_A.  The column-sum formula is
exact when entries act by multiplication on a commutative or scalar algebra
and is an upper bound otherwise; together with the entry-max lower bound it
brackets every quantity derived from it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-9

SCALAR_COMPLEX = "scalar-complex"
SCALAR_REAL = "scalar-real"
MATRIX = "matrix"
FUNCTIONS = "functions-on-graph"

GROUP_TAGS = ("GL", "SL", "En", "U", "Up")


class SpectrumOnCutError(ValueError):
    """Raised when a principal logarithm is requested for a non-unitary
    element with spectrum touching the closed negative real half-line."""


class NumericFailureError(RuntimeError):
    """Raised when exp/log evaluation fails to reproduce its input within
    tolerance (non-convergence or ill conditioning)."""


def connected_components(n_vertices, edges):
    """Connected-component labels of an undirected graph, as a list mapping
    vertex -> component index.  Components are numbered by smallest vertex."""
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots = [find(v) for v in range(n_vertices)]
    order = sorted(set(roots))
    index = {r: i for i, r in enumerate(order)}
    return [index[r] for r in roots]


@dataclass(frozen=True)
class BanachAlgebra:
    """A finite-dimensional unital Banach algebra with its norm.

    ``kind`` selects the model; ``k`` is the matrix size for ``matrix`` kind;
    ``vertices``/``edges`` describe the sampling graph for the function kind.
    The unit always has norm 1 and the norm is submultiplicative.
    """

    kind: str
    k: int = 0
    vertices: int = 0
    edges: tuple = ()

    def __post_init__(self):
        if self.kind not in (SCALAR_COMPLEX, SCALAR_REAL, MATRIX, FUNCTIONS):
            raise ValueError(f"unknown algebra kind {self.kind!r}")
        if self.kind == MATRIX and self.k < 1:
            raise ValueError("matrix algebra needs k >= 1")
        if self.kind == FUNCTIONS:
            if self.vertices < 1:
                raise ValueError("function algebra needs at least one vertex")
            for u, v in self.edges:
                if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                    raise ValueError(f"edge ({u},{v}) out of range")

    @property
    def is_commutative(self):
        return self.kind != MATRIX or self.k == 1

    @property
    def dtype(self):
        return np.float64 if self.kind == SCALAR_REAL else np.complex128

    def value_shape(self):
        if self.kind in (SCALAR_COMPLEX, SCALAR_REAL):
            return ()
        if self.kind == MATRIX:
            return (self.k, self.k)
        return (self.vertices,)

    def unit_value(self):
        if self.kind in (SCALAR_COMPLEX, SCALAR_REAL):
            return self.dtype(1)
        if self.kind == MATRIX:
            return np.eye(self.k, dtype=self.dtype)
        return np.ones(self.vertices, dtype=self.dtype)

    def zero_value(self):
        if self.kind in (SCALAR_COMPLEX, SCALAR_REAL):
            return self.dtype(0)
        return np.zeros(self.value_shape(), dtype=self.dtype)

    def norm(self, value):
        """Norm of an element value: |.| for scalars, spectral norm for the
        matrix algebra, sup over vertices for function samples."""
        value = np.asarray(value)
        if self.kind in (SCALAR_COMPLEX, SCALAR_REAL):
            return float(abs(value))
        if self.kind == MATRIX:
            return float(np.linalg.norm(value, 2))
        return float(np.max(np.abs(value))) if value.size else 0.0

    def mul(self, a, b):
        if self.kind == MATRIX:
            return np.asarray(a) @ np.asarray(b)
        return np.asarray(a) * np.asarray(b)

    def conj(self, value):
        if self.kind == MATRIX:
            return np.asarray(value).conj().T
        return np.conj(value)

    def components(self):
        """Connected-component labels (function algebras only)."""
        if self.kind != FUNCTIONS:
            raise ValueError("components are defined for function algebras")
        return connected_components(self.vertices, self.edges)

    def random_value(self, rng, scale=1.0):
        shape = self.value_shape()
        if self.kind == SCALAR_REAL:
            return scale * rng.standard_normal(shape) if shape == () else scale * rng.standard_normal(shape)
        re = rng.standard_normal(shape)
        im = rng.standard_normal(shape)
        return scale * (re + 1j * im)


def scalar_complex():
    return BanachAlgebra(SCALAR_COMPLEX)


def scalar_real():
    return BanachAlgebra(SCALAR_REAL)


def matrix_algebra(k):
    return BanachAlgebra(MATRIX, k=k)


def function_algebra(vertices, edges=()):
    return BanachAlgebra(FUNCTIONS, vertices=vertices,
                         edges=tuple(tuple(e) for e in edges))


@dataclass(frozen=True)
class AlgebraElement:
    """An element of a Banach algebra together with its parent algebra."""

    algebra: BanachAlgebra
    value: object

    def __post_init__(self):
        v = np.asarray(self.value)
        if v.shape != self.algebra.value_shape():
            raise ValueError(
                f"value shape {v.shape} does not match algebra {self.algebra.kind}")
        object.__setattr__(self, "value", v.astype(self.algebra.dtype))

    @property
    def norm(self):
        return self.algebra.norm(self.value)


class MatrixOverAlgebra:
    """An n-by-n matrix with entries in a Banach algebra.

    Data layout: scalar algebras store (n, n); the matrix(k) algebra stores
    (n, n, k, k); function algebras store (n, n, V).  Entry (i, j) is
    ``data[i, j]`` in all cases.
    """

    def __init__(self, algebra, data):
        self.algebra = algebra
        data = np.asarray(data, dtype=algebra.dtype)
        expected_ndim = 2 + len(algebra.value_shape())
        if data.ndim != expected_ndim or data.shape[0] != data.shape[1]:
            raise ValueError(f"bad matrix data shape {data.shape}")
        if data.shape[2:] != algebra.value_shape():
            raise ValueError(
                f"entry shape {data.shape[2:]} does not match algebra")
        self.data = data
        self.n = data.shape[0]

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls, algebra, n):
        data = np.zeros((n, n) + algebra.value_shape(), dtype=algebra.dtype)
        for i in range(n):
            data[i, i] = algebra.unit_value()
        return cls(algebra, data)

    @classmethod
    def zeros(cls, algebra, n):
        return cls(algebra, np.zeros((n, n) + algebra.value_shape(),
                                     dtype=algebra.dtype))

    @classmethod
    def single_entry(cls, algebra, n, i, j, value):
        out = cls.zeros(algebra, n)
        out.data[i, j] = np.asarray(value, dtype=algebra.dtype)
        return out

    @classmethod
    def random(cls, algebra, n, rng, scale=1.0):
        data = np.stack([
            np.stack([np.asarray(algebra.random_value(rng, scale))
                      for _ in range(n)], axis=0)
            for _ in range(n)], axis=0)
        return cls(algebra, data)

    # -- entry access ------------------------------------------------------
    def entry(self, i, j):
        return AlgebraElement(self.algebra, self.data[i, j])

    def entry_norms(self):
        return np.array([[self.algebra.norm(self.data[i, j])
                          for j in range(self.n)] for i in range(self.n)])

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        self._check_compatible(other)
        return MatrixOverAlgebra(self.algebra, self.data + other.data)

    def __sub__(self, other):
        self._check_compatible(other)
        return MatrixOverAlgebra(self.algebra, self.data - other.data)

    def __neg__(self):
        return MatrixOverAlgebra(self.algebra, -self.data)

    def scaled(self, c):
        if self.algebra.kind == SCALAR_REAL and np.iscomplexobj(np.asarray(c)):
            raise ValueError("complex scale on a real algebra")
        return MatrixOverAlgebra(self.algebra, c * self.data)

    def __matmul__(self, other):
        self._check_compatible(other)
        kind = self.algebra.kind
        if kind == MATRIX:
            data = np.einsum("ikab,kjbc->ijac", self.data, other.data)
        elif kind == FUNCTIONS:
            data = np.einsum("ikv,kjv->ijv", self.data, other.data)
        else:
            data = self.data @ other.data
        return MatrixOverAlgebra(self.algebra, data)

    def adjoint(self):
        kind = self.algebra.kind
        if kind == MATRIX:
            data = self.data.conj().transpose(1, 0, 3, 2)
        elif kind == FUNCTIONS:
            data = self.data.conj().transpose(1, 0, 2)
        else:
            data = self.data.conj().T
        return MatrixOverAlgebra(self.algebra, data)

    def _check_compatible(self, other):
        if self.algebra != other.algebra or self.n != other.n:
            raise ValueError("incompatible matrices")

    # -- norms -------------------------------------------------------------
    def entry_max_norm(self):
        """|X|_inf = max over entries of the algebra norm."""
        return float(np.max(self.entry_norms()))

    def op_norm(self):
        """Operator norm of X on the l1-sum A^n: max column sum of entry
        norms.  Exact for scalar and commutative algebras, an upper bound
        otherwise (entry_max_norm is the companion lower bound)."""
        norms = self.entry_norms()
        return float(np.max(norms.sum(axis=0)))

    # -- flat (numeric) representation --------------------------------------
    def to_flat(self):
        """Represent the matrix as a stack of plain square matrices on which
        exp/log/inv act: shape (n, n) for scalars, (nk, nk) for matrix(k),
        (V, n, n) for function algebras."""
        kind = self.algebra.kind
        if kind == MATRIX:
            k = self.algebra.k
            return self.data.transpose(0, 2, 1, 3).reshape(self.n * k, self.n * k)
        if kind == FUNCTIONS:
            return self.data.transpose(2, 0, 1)
        return self.data.copy()

    @classmethod
    def from_flat(cls, algebra, n, flat):
        if algebra.kind == MATRIX:
            k = algebra.k
            data = flat.reshape(n, k, n, k).transpose(0, 2, 1, 3)
        elif algebra.kind == FUNCTIONS:
            data = np.asarray(flat).transpose(1, 2, 0)
        else:
            data = np.asarray(flat)
        return cls(algebra, data)

    def inverse(self):
        inv = np.linalg.inv(self.to_flat())
        return MatrixOverAlgebra.from_flat(self.algebra, self.n, inv)

    def det(self):
        """Entrywise determinant (commutative algebras only), as an
        AlgebraElement."""
        if not self.algebra.is_commutative:
            raise ValueError("determinant requires a commutative algebra")
        kind = self.algebra.kind
        if kind == FUNCTIONS:
            return AlgebraElement(self.algebra, np.linalg.det(self.to_flat()))
        if kind == MATRIX:  # k == 1 commutative case
            return AlgebraElement(self.algebra,
                                  np.linalg.det(self.data[:, :, 0, 0]).reshape(1, 1))
        return AlgebraElement(self.algebra, np.linalg.det(self.data))

    def trace_sum(self):
        """Sum of the diagonal entries, as an AlgebraElement."""
        value = self.algebra.zero_value()
        for i in range(self.n):
            value = value + self.data[i, i]
        return AlgebraElement(self.algebra, value)

    def copy(self):
        return MatrixOverAlgebra(self.algebra, self.data.copy())

    def __repr__(self):
        return (f"MatrixOverAlgebra(n={self.n}, kind={self.algebra.kind!r}, "
                f"|X|={self.op_norm():.4g})")


def op_norm(x):
    """Operator norm of a matrix over an algebra on the l1-sum A^n."""
    return x.op_norm()


def norm_description(algebra):
    """Human-readable statement of the norm every reported value refers to."""
    entry = {
        SCALAR_COMPLEX: "absolute value",
        SCALAR_REAL: "absolute value",
        MATRIX: f"operator norm on C^{algebra.k}",
        FUNCTIONS: "sup over vertices",
    }[algebra.kind]
    return f"max column sum of entry norms, entries by {entry}"


@dataclass
class GroupElement:
    """An invertible matrix over a Banach algebra, tagged with its ambient
    group (GL, SL, En, U, Up)."""

    matrix: MatrixOverAlgebra
    group_tag: str = "GL"
    tol: float = DEFAULT_TOL
    validate: bool = True

    def __post_init__(self):
        if self.group_tag not in GROUP_TAGS:
            raise ValueError(f"unknown group tag {self.group_tag!r}")
        if self.validate:
            self.check_invariants()

    def check_invariants(self):
        g = self.matrix
        res = (g @ g.inverse()) - MatrixOverAlgebra.identity(g.algebra, g.n)
        if res.op_norm() > self.tol * (1.0 + g.op_norm()):
            raise ValueError("matrix is not invertible within tolerance")
        if self.group_tag == "SL":
            if not g.algebra.is_commutative:
                raise ValueError("SL tag requires a commutative algebra")
            dev = g.det().value - g.algebra.unit_value()
            if g.algebra.norm(dev) > self.tol:
                raise ValueError("SL tag but determinant differs from the unit")
        if self.group_tag in ("U", "Up"):
            res = (g.adjoint() @ g) - MatrixOverAlgebra.identity(g.algebra, g.n)
            if res.op_norm() > self.tol:
                raise ValueError("U tag but g*g differs from the identity")

    @property
    def algebra(self):
        return self.matrix.algebra

    @property
    def n(self):
        return self.matrix.n

    def inverse(self):
        return GroupElement(self.matrix.inverse(), self.group_tag,
                            tol=self.tol, validate=False)

    def __matmul__(self, other):
        tag = self.group_tag if self.group_tag == other.group_tag else "GL"
        return GroupElement(self.matrix @ other.matrix, tag,
                            tol=self.tol, validate=False)

    def is_unitary(self, tol=None):
        tol = self.tol if tol is None else tol
        g = self.matrix
        res = (g.adjoint() @ g) - MatrixOverAlgebra.identity(g.algebra, g.n)
        return res.op_norm() <= tol

    @classmethod
    def identity(cls, algebra, n, group_tag="GL"):
        return cls(MatrixOverAlgebra.identity(algebra, n), group_tag,
                   validate=False)


# ---------------------------------------------------------------------------
# exponential and principal logarithm


def _expm_stack(flat):
    out = scipy.linalg.expm(flat)
    if not np.all(np.isfinite(out)):
        raise NumericFailureError("matrix exponential did not converge")
    return out


def mat_exp(x, group_tag="GL", tol=DEFAULT_TOL):
    """exp(X) as a group element.  Verifies |exp(X)| <= e^{|X|}."""
    flat = _expm_stack(x.to_flat())
    mat = MatrixOverAlgebra.from_flat(x.algebra, x.n, flat)
    bound = np.exp(min(x.op_norm(), 700.0))
    if mat.op_norm() > bound * (1.0 + 1e-9) + 1e-12:
        raise NumericFailureError("|exp(X)| exceeds e^{|X|}: numeric failure")
    return GroupElement(mat, group_tag, tol=tol, validate=False)


def _principal_log_square(m, unitary, tol):
    """Principal log of one plain square matrix.

    Eigenvalue arguments lie in (-pi, pi]; for unitary input a tie at -1 is
    resolved to +pi.  Non-unitary input with spectrum on the closed negative
    real axis is rejected.
    """
    m = np.asarray(m)
    if unitary:
        t, z = scipy.linalg.schur(m.astype(np.complex128), output="complex")
        off = t - np.diag(np.diag(t))
        if np.linalg.norm(off) > 1e-8 * max(1.0, np.linalg.norm(t)):
            raise NumericFailureError("unitary input failed to diagonalize")
        d = np.diag(t)
        theta = np.angle(d)
        theta = np.where(np.abs(d + 1.0) <= 1e-12, np.pi, theta)
        logd = np.log(np.abs(d)) + 1j * theta
        return (z * logd) @ z.conj().T
    eig = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(eig))))
    if np.any(np.abs(eig) <= tol * scale):
        raise SpectrumOnCutError("singular input: 0 is in the spectrum")
    on_cut = (eig.real <= 0) & (np.abs(eig.imag) <= tol * scale)
    if np.any(on_cut):
        raise SpectrumOnCutError(
            "spectrum touches the negative real axis; principal log undefined")
    out = scipy.linalg.logm(m)
    if not np.all(np.isfinite(out)):
        raise NumericFailureError("matrix logarithm did not converge")
    return out


def mat_log(g, tol=DEFAULT_TOL):
    """Principal logarithm of a group element.

    Unitary elements are always accepted (ties at -1 resolve to +pi); other
    elements must have spectrum avoiding the closed negative real half-line.
    The round trip exp(log g) = g is verified to 1e-9 relative.
    """
    mat = g.matrix
    unitary = g.group_tag in ("U", "Up") or g.is_unitary(tol)
    flat = mat.to_flat()
    if flat.ndim == 3:
        logs = np.stack([_principal_log_square(flat[v], unitary, tol)
                         for v in range(flat.shape[0])])
    else:
        logs = _principal_log_square(flat, unitary, tol)
    if mat.algebra.kind == SCALAR_REAL:
        if np.max(np.abs(np.imag(logs))) > 1e-9:
            raise SpectrumOnCutError(
                "no real logarithm: spectrum requires a complex branch")
        logs = np.real(logs)
    out = MatrixOverAlgebra.from_flat(mat.algebra, mat.n, logs)
    back = mat_exp(out, group_tag=g.group_tag, tol=tol)
    err = (back.matrix - mat).op_norm()
    if err > 1e-9 * (1.0 + mat.op_norm()):
        raise NumericFailureError(f"exp(log g) missed g by {err:.3g}")
    return out


# ---------------------------------------------------------------------------
# JSON serialization


def _value_to_json(value):
    v = np.asarray(value)
    if np.iscomplexobj(v):
        return np.stack([v.real, v.imag], axis=-1).tolist()
    return v.tolist()


def _value_from_json(obj, algebra):
    arr = np.asarray(obj, dtype=float)
    if algebra.dtype == np.complex128:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr


def algebra_to_json(algebra):
    doc = {"kind": algebra.kind}
    if algebra.kind == MATRIX:
        doc["k"] = algebra.k
    if algebra.kind == FUNCTIONS:
        doc["vertices"] = algebra.vertices
        doc["edges"] = [list(e) for e in algebra.edges]
    return doc


def algebra_from_json(doc):
    kind = doc["kind"]
    if kind == MATRIX:
        return matrix_algebra(doc["k"])
    if kind == FUNCTIONS:
        return function_algebra(doc["vertices"], doc.get("edges", []))
    return BanachAlgebra(kind)


def matrix_to_json(x):
    return {
        "algebra": algebra_to_json(x.algebra),
        "n": x.n,
        "entries": [[_value_to_json(x.data[i, j]) for j in range(x.n)]
                    for i in range(x.n)],
    }


def matrix_from_json(doc):
    algebra = algebra_from_json(doc["algebra"])
    n = doc["n"]
    data = np.zeros((n, n) + algebra.value_shape(), dtype=algebra.dtype)
    for i in range(n):
        for j in range(n):
            data[i, j] = _value_from_json(doc["entries"][i][j], algebra)
    return MatrixOverAlgebra(algebra, data)


def group_to_json(g):
    doc = matrix_to_json(g.matrix)
    doc["group_tag"] = g.group_tag
    return doc


def group_from_json(doc):
    return GroupElement(matrix_from_json(doc), doc.get("group_tag", "GL"))


def dump_json(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
