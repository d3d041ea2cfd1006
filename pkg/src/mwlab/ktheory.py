"""Exact integer linear algebra: Hermite/Smith normal forms, finitely generated
abelian groups, and K-groups of a graph algebra from its vertex matrix.

Everything here runs on Python's arbitrary-precision integers; no floating
point is involved anywhere in this module.
"""

from dataclasses import dataclass
from math import gcd

from .errors import PreconditionError

__all__ = [
    "IntMatrix",
    "SmithDecomposition",
    "FgAbelianGroup",
    "Presentation",
    "GroupHom",
    "GraphKTheory",
    "ExactnessResult",
    "hermite_normal_form",
    "smith_normal_form",
    "det_bareiss",
    "kernel",
    "cokernel",
    "graph_algebra_ktheory",
    "check_exact",
]


class IntMatrix:
    """Immutable integer matrix backed by tuples of Python ints."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
        else:
            width = 0
        self.rows = len(rows)
        self.cols = width
        self._data = rows

    @classmethod
    def zeros(cls, rows, cols):
        m = object.__new__(cls)
        m.rows, m.cols = rows, cols
        m._data = tuple((0,) * cols for _ in range(rows))
        return m

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns, rows=None):
        cols = [tuple(int(x) for x in c) for c in columns]
        if cols:
            rows = len(cols[0])
        elif rows is None:
            rows = 0
        return cls([[c[i] for c in cols] for i in range(rows)])

    @classmethod
    def parse(cls, text):
        """Parse the CLI matrix syntax, e.g. ``"3,1;1,3"``."""
        try:
            rows = [
                [int(tok) for tok in row.split(",")]
                for row in text.strip().split(";")
            ]
        except ValueError as exc:
            raise ValueError(f"cannot parse matrix {text!r}: {exc}") from None
        return cls(rows)

    def __getitem__(self, key):
        i, j = key
        return self._data[i][j]

    def row(self, i):
        return self._data[i]

    def column(self, j):
        return tuple(r[j] for r in self._data)

    def to_lists(self):
        return [list(r) for r in self._data]

    @property
    def is_square(self):
        return self.rows == self.cols

    @property
    def is_zero(self):
        return all(x == 0 for r in self._data for x in r)

    def transpose(self):
        return IntMatrix([[self._data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def __add__(self, other):
        self._check_same_shape(other)
        return IntMatrix([[a + b for a, b in zip(ra, rb)]
                          for ra, rb in zip(self._data, other._data)])

    def __sub__(self, other):
        self._check_same_shape(other)
        return IntMatrix([[a - b for a, b in zip(ra, rb)]
                          for ra, rb in zip(self._data, other._data)])

    def __neg__(self):
        return IntMatrix([[-a for a in r] for r in self._data])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        bt = other.transpose()._data
        return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in bt]
                          for row in self._data])

    __mul__ = __matmul__

    def __pow__(self, n):
        if not self.is_square:
            raise ValueError("matrix power needs a square matrix")
        if n < 0:
            raise ValueError("negative power")
        result = IntMatrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, vector):
        """Matrix-vector product on an integer vector."""
        if len(vector) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * x for a, x in zip(row, vector)) for row in self._data)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self._data == other._data \
            and self.shape == other.shape

    def __hash__(self):
        return hash((self.shape, self._data))

    def __repr__(self):
        return f"IntMatrix({self.to_lists()!r})"

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


def det_bareiss(m):
    """Exact determinant by fraction-free Bareiss elimination."""
    if not m.is_square:
        raise ValueError("determinant needs a square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [list(row) for row in m._data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class _Worksheet:
    """Mutable matrix with tracked unimodular row (and optionally column) ops."""

    def __init__(self, m, track_cols=False):
        self.a = [list(row) for row in m._data]
        self.rows, self.cols = m.rows, m.cols
        self.u = [[1 if i == j else 0 for j in range(self.rows)]
                  for i in range(self.rows)]
        self.v = None
        if track_cols:
            self.v = [[1 if i == j else 0 for j in range(self.cols)]
                      for i in range(self.cols)]

    def swap_rows(self, i, j):
        if i != j:
            self.a[i], self.a[j] = self.a[j], self.a[i]
            self.u[i], self.u[j] = self.u[j], self.u[i]

    def negate_row(self, i):
        self.a[i] = [-x for x in self.a[i]]
        self.u[i] = [-x for x in self.u[i]]

    def add_row(self, target, source, factor):
        if factor:
            self.a[target] = [x + factor * y
                              for x, y in zip(self.a[target], self.a[source])]
            self.u[target] = [x + factor * y
                              for x, y in zip(self.u[target], self.u[source])]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.a:
                row[i], row[j] = row[j], row[i]
            for row in self.v:
                row[i], row[j] = row[j], row[i]

    def negate_col(self, j):
        for row in self.a:
            row[j] = -row[j]
        for row in self.v:
            row[j] = -row[j]

    def add_col(self, target, source, factor):
        if factor:
            for row in self.a:
                row[target] += factor * row[source]
            for row in self.v:
                row[target] += factor * row[source]


def hermite_normal_form(m):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U @ m == H``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots and entries above each pivot reduced
    into ``[0, pivot)``.
    """
    w = _Worksheet(m)
    pivot_row = 0
    for col in range(w.cols):
        # gcd-reduce the entries at or below pivot_row in this column
        while True:
            live = [i for i in range(pivot_row, w.rows) if w.a[i][col] != 0]
            if not live:
                break
            best = min(live, key=lambda i: abs(w.a[i][col]))
            w.swap_rows(pivot_row, best)
            if w.a[pivot_row][col] < 0:
                w.negate_row(pivot_row)
            done = True
            for i in range(pivot_row + 1, w.rows):
                q = w.a[i][col] // w.a[pivot_row][col]
                w.add_row(i, pivot_row, -q)
                if w.a[i][col] != 0:
                    done = False
            if done:
                break
        if pivot_row < w.rows and w.a[pivot_row][col] != 0:
            p = w.a[pivot_row][col]
            for i in range(pivot_row):
                q = w.a[i][col] // p
                w.add_row(i, pivot_row, -q)
            pivot_row += 1
            if pivot_row == w.rows:
                break
    return IntMatrix(w.a), IntMatrix(w.u)


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with unimodular U, V and divisibility chain on D."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self):
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(n))

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(m):
    """Smith normal form by elementary operations with minimal-entry pivoting."""
    w = _Worksheet(m, track_cols=True)
    n = min(w.rows, w.cols)
    for k in range(n):
        while True:
            # find the minimal nonzero entry in the trailing block
            best = None
            for i in range(k, w.rows):
                for j in range(k, w.cols):
                    x = w.a[i][j]
                    if x != 0 and (best is None or abs(x) < abs(w.a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            w.swap_rows(k, best[0])
            w.swap_cols(k, best[1])
            if w.a[k][k] < 0:
                w.negate_row(k)
            pivot = w.a[k][k]
            dirty = False
            for i in range(k + 1, w.rows):
                q = w.a[i][k] // pivot
                w.add_row(i, k, -q)
                if w.a[i][k] != 0:
                    dirty = True
            for j in range(k + 1, w.cols):
                q = w.a[k][j] // pivot
                w.add_col(j, k, -q)
                if w.a[k][j] != 0:
                    dirty = True
            if dirty:
                continue
            # enforce divisibility: pivot must divide the trailing block
            offender = None
            for i in range(k + 1, w.rows):
                for j in range(k + 1, w.cols):
                    if w.a[i][j] % pivot != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            w.add_row(k, offender, 1)
        if k < w.rows and k < w.cols and w.a[k][k] == 0:
            break
    return SmithDecomposition(IntMatrix(w.u), IntMatrix(w.a), IntMatrix(w.v))


@dataclass(frozen=True)
class FgAbelianGroup:
    """Finitely generated abelian group in invariant-factor form.

    ``free_rank`` copies of Z plus cyclic factors Z/d1 + ... + Z/dk with
    d1 | d2 | ... and every d_i >= 2.
    """

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion factors must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion factors must form a divisibility chain")

    @classmethod
    def from_invariant_factors(cls, factors, extra_free=0):
        """Build from a raw diagonal: drop units, zeros count as free rank."""
        torsion = [d for d in factors if d >= 2]
        free = extra_free + sum(1 for d in factors if d == 0)
        return cls(free, tuple(torsion))

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def presentation(self):
        """Presentation Z^n / column-span(R) with torsion generators first."""
        n = len(self.torsion) + self.free_rank
        cols = []
        for i, d in enumerate(self.torsion):
            col = [0] * n
            col[i] = d
            cols.append(col)
        return Presentation(n, IntMatrix.from_columns(cols, rows=n))

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}Z" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def kernel(m):
    """Kernel of ``m : Z^cols -> Z^rows``.

    Returns ``(group, basis)`` where the group is free of rank cols - rank(m)
    and ``basis`` is an IntMatrix whose columns form a primitive basis.
    """
    snf = smith_normal_form(m)
    diag = snf.diagonal
    basis_cols = [snf.V.column(j) for j in range(m.cols)
                  if j >= len(diag) or diag[j] == 0]
    group = FgAbelianGroup(len(basis_cols))
    return group, IntMatrix.from_columns(basis_cols, rows=m.cols)


def cokernel(m):
    """Cokernel Z^rows / column-span(m) in invariant-factor form."""
    snf = smith_normal_form(m)
    return FgAbelianGroup.from_invariant_factors(
        snf.diagonal, extra_free=m.rows - len(snf.diagonal))


@dataclass(frozen=True)
class GraphKTheory:
    K0: FgAbelianGroup
    K1: FgAbelianGroup


def graph_algebra_ktheory(vertex_matrix):
    """K-groups of the graph algebra: K1 = ker(1 - A^t), K0 = coker(1 - A^t)."""
    if not vertex_matrix.is_square:
        raise ValueError("vertex matrix must be square")
    if any(x < 0 for row in vertex_matrix._data for x in row):
        raise ValueError("vertex matrix must be nonnegative")
    n = vertex_matrix.rows
    delta = IntMatrix.identity(n) - vertex_matrix.transpose()
    k1, _ = kernel(delta)
    k0 = cokernel(delta)
    return GraphKTheory(K0=k0, K1=k1)


# --- presentations, homomorphisms, exactness ---------------------------------


@dataclass(frozen=True)
class Presentation:
    """Abelian group presented as Z^generators / column-span(relations)."""

    generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise ValueError("relation matrix must have one row per generator")

    @classmethod
    def free(cls, n):
        return cls(n, IntMatrix.from_columns([], rows=n))

    @classmethod
    def trivial(cls):
        return cls.free(0)

    def group(self):
        """Canonical invariant-factor form of the presented group."""
        if self.relations.cols == 0:
            return FgAbelianGroup(self.generators)
        return cokernel(self.relations)


def _lattice_rows(m):
    """Canonical basis (as HNF rows) of the lattice spanned by the columns of m."""
    h, _ = hermite_normal_form(m.transpose())
    return [row for row in h._data if any(row)]


def _reduce_against(rows, vector):
    """Reduce a vector against HNF basis rows; zero iff in the lattice."""
    v = list(vector)
    for row in rows:
        pivot_col = next(j for j, x in enumerate(row) if x != 0)
        if v[pivot_col] % row[pivot_col] == 0:
            q = v[pivot_col] // row[pivot_col]
            if q:
                v = [x - q * y for x, y in zip(v, row)]
    return v


def _lattice_contains(rows, vector):
    return all(x == 0 for x in _reduce_against(rows, vector))


def _hstack(a, b):
    if a.rows != b.rows:
        raise ValueError("row mismatch in hstack")
    return IntMatrix([ra + rb for ra, rb in zip(a._data, b._data)])


def integer_kernel_basis(m):
    """Columns spanning {x in Z^cols : m @ x = 0}."""
    _, basis = kernel(m)
    return basis


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism between presented groups, given on generators."""

    domain: Presentation
    codomain: Presentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.generators, self.domain.generators):
            raise ValueError(
                f"hom matrix shape {self.matrix.shape} does not match "
                f"codomain x domain ({self.codomain.generators}, {self.domain.generators})")
        if not self.is_well_defined():
            raise ValueError("hom does not respect the domain relations")

    def is_well_defined(self):
        """matrix maps every domain relation into the codomain relation lattice."""
        if self.domain.relations.cols == 0:
            return True
        target = _lattice_rows(self.codomain.relations)
        for j in range(self.domain.relations.cols):
            image = self.matrix.apply(self.domain.relations.column(j))
            if any(image):
                if not target or not _lattice_contains(target, image):
                    return False
        return True


@dataclass(frozen=True)
class ExactnessResult:
    exact: bool
    failure_at: int | None = None


def _kernel_lattice_columns(hom):
    """Columns spanning {x in Z^b : hom.matrix @ x lies in codomain relations}."""
    g = hom.matrix
    rc = hom.codomain.relations
    if rc.cols == 0:
        return integer_kernel_basis(g)
    stacked = _hstack(g, -rc)
    basis = integer_kernel_basis(stacked)
    cols = [basis.column(j)[:g.cols] for j in range(basis.cols)]
    cols = [c for c in cols if any(c)]
    return IntMatrix.from_columns(cols, rows=g.cols)


def check_exact(sequence, cyclic=False):
    """Decide exactness of a chain of GroupHoms at every interior node.

    For ``cyclic`` sequences the chain closes up and every node is interior.
    ``failure_at`` indexes the first failing node in the group chain
    (node i sits between homs i-1 and i).
    """
    if not sequence:
        raise PreconditionError("empty sequence")
    n = len(sequence)
    for i in range(n - 1):
        if sequence[i].codomain != sequence[i + 1].domain:
            raise PreconditionError(f"homs {i} and {i + 1} are not composable")
    if cyclic and sequence[-1].codomain != sequence[0].domain:
        raise PreconditionError("cyclic sequence does not close up")

    pairs = [(sequence[i], sequence[i + 1], i + 1) for i in range(n - 1)]
    if cyclic:
        pairs.append((sequence[-1], sequence[0], 0))
    for incoming, outgoing, node in pairs:
        pres = incoming.codomain
        image = _hstack(incoming.matrix, pres.relations)
        kernel_cols = _kernel_lattice_columns(outgoing)
        kernel_full = _hstack(kernel_cols, pres.relations)
        if _lattice_rows(image) != _lattice_rows(kernel_full):
            return ExactnessResult(False, failure_at=node)
    return ExactnessResult(True)
