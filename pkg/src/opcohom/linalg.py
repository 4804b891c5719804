"""Exact rational matrices, ranks, kernels and Betti numbers."""
import os
from fractions import Fraction
from math import isqrt, lcm

from . import _elim_py

try:
    if os.environ.get("OPCOHOM_PURE"):
        raise ImportError("pure backend requested")
    from . import _elim_c
except ImportError:
    _elim_c = None

BACKEND = "cython" if _elim_c is not None else "python"

Rational = Fraction


class DimensionError(ValueError):
    pass


class NotAComplexError(ValueError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"d_out * d_in != 0 at column {column}")


def to_rational(x):
    """Parse an int, a Fraction or a string ``"p/q"`` (no decimals)."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "." in s or "e" in s.lower():
            raise ValueError(f"not a rational literal: {x!r}")
        return Fraction(s)
    raise TypeError(f"not a rational: {x!r}")


class ExactMatrix:
    """Sparse matrix with Fraction entries, stored row-major."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self._rows = {}
        if entries:
            for (r, c), v in entries.items():
                self.add(r, c, v)

    def add(self, r, c, v):
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
        if not v:
            return
        row = self._rows.setdefault(r, {})
        w = row.get(c, 0) + v
        if w:
            row[c] = Fraction(w)
        else:
            del row[c]
            if not row:
                del self._rows[r]

    @classmethod
    def from_dense(cls, data, cols=None):
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        m = cls(rows, cols)
        for i, line in enumerate(data):
            if len(line) != cols:
                raise DimensionError("ragged matrix")
            for j, v in enumerate(line):
                if v:
                    m._rows.setdefault(i, {})[j] = to_rational(v)
        return m

    @classmethod
    def identity(cls, n):
        m = cls(n, n)
        for i in range(n):
            m._rows[i] = {i: Fraction(1)}
        return m

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    @property
    def entries(self):
        return {(r, c): v for r, row in self._rows.items() for c, v in row.items()}

    def row(self, r):
        return self._rows.get(r, {})

    def get(self, r, c):
        return self._rows.get(r, {}).get(c, Fraction(0))

    def nnz(self):
        return sum(len(r) for r in self._rows.values())

    def to_dense(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, row in self._rows.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self):
        t = ExactMatrix(self.cols, self.rows)
        for r, row in self._rows.items():
            for c, v in row.items():
                t._rows.setdefault(c, {})[r] = v
        return t

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = ExactMatrix(self.rows, other.cols)
        for r, row in self._rows.items():
            acc = {}
            for k, v in row.items():
                for c, w in other._rows.get(k, {}).items():
                    acc[c] = acc.get(c, 0) + v * w
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out._rows[r] = acc
        return out

    def __neg__(self):
        out = ExactMatrix(self.rows, self.cols)
        out._rows = {r: {c: -v for c, v in row.items()} for r, row in self._rows.items()}
        return out

    def apply(self, vec):
        """Matrix times a vector given as a dict or a list."""
        if not isinstance(vec, dict):
            vec = {i: v for i, v in enumerate(vec) if v}
        out = {}
        for r, row in self._rows.items():
            s = 0
            for c, v in row.items():
                w = vec.get(c)
                if w:
                    s += v * w
            if s:
                out[r] = Fraction(s)
        return out

    def is_zero(self):
        return not self._rows

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._rows == other._rows

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def integer_rows(self):
        """Rows scaled to coprime integers (same row space)."""
        out = []
        for r in sorted(self._rows):
            row = self._rows[r]
            den = lcm(*(v.denominator for v in row.values()))
            out.append({c: int(v * den) for c, v in row.items()})
        return out


def _is_prime(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _primes_below(top, count):
    out = []
    n = top - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 1
    return out


PRIMES = _primes_below(2 ** 31, 24)


def _reconstruct(a, m):
    # rational reconstruction of a residue mod m, bounds sqrt(m/2)
    bound = isqrt(m // 2)
    r0, r1 = m, a % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    return Fraction(r1, t1)


def _kernel_candidate(pivots, red, modulus, ncols):
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    kernel = {j: {j: Fraction(1)} for j in free}
    for pc in pivots:
        for j, a in red[pc].items():
            if j == pc:
                continue
            q = _reconstruct(modulus - a, modulus)
            if q is None:
                return None
            kernel[j][pc] = q
    return [kernel[j] for j in free]


def _kernel_is_exact(int_rows, kernel):
    # exact check of M K = 0 with integer-scaled kernel vectors
    by_col = {}
    for j, vec in enumerate(kernel):
        s = lcm(*(v.denominator for v in vec.values()))
        for c, v in vec.items():
            by_col.setdefault(c, []).append((j, int(v * s)))
    for row in int_rows:
        acc = {}
        for c, v in row.items():
            for j, w in by_col.get(c, ()):
                acc[j] = acc.get(j, 0) + v * w
        if any(acc.values()):
            return False
    return True


def _modular(int_rows, ncols, max_primes=len(PRIMES)):
    """Rank and kernel via the compiled kernel over several primes; None if the lift fails.

    Residues of the reduced rows are combined by CRT until rational
    reconstruction gives a kernel that checks exactly over the integers.
    Primes giving a smaller rank (unlucky primes) are skipped.
    """
    best = None
    modulus = 1
    acc = None
    for p in PRIMES[:max_primes]:
        pivots, red = _elim_c.rref_mod_p(int_rows, ncols, p)
        if len(pivots) == ncols:
            return ncols, []
        red = dict(zip(pivots, red))
        key = frozenset(pivots)
        if best is None or len(key) > len(best):
            best, modulus, acc = key, p, red
        elif key != best:
            continue
        elif acc is not red:
            inv = pow(modulus % p, -1, p)
            merged = {}
            for pc, row in acc.items():
                new = red[pc]
                out = {}
                for j in set(row) | set(new):
                    a, b = row.get(j, 0), new.get(j, 0)
                    x = a + modulus * (((b - a) * inv) % p)
                    if x:
                        out[j] = x
                merged[pc] = out
            acc = merged
            modulus *= p
        kernel = _kernel_candidate(sorted(best), acc, modulus, ncols)
        if kernel is not None and _kernel_is_exact(int_rows, kernel):
            return len(best), kernel
    return None


# below this fill ratio sparse integer elimination beats the dense modular kernel
DENSE_THRESHOLD = 0.05


def _use_compiled(strategy, nnz, rows, cols):
    if _elim_c is None:
        return False
    if strategy == "compiled":
        return True
    return strategy == "auto" and rows * cols > 0 and nnz >= DENSE_THRESHOLD * rows * cols


def _rank_kernel_rows(int_rows, ncols, strategy="auto"):
    nnz = sum(len(r) for r in int_rows)
    if _use_compiled(strategy, nnz, len(int_rows), ncols):
        res = _modular(int_rows, ncols)
        if res is not None:
            return res
    return _elim_py.rank_and_kernel(int_rows, ncols, reverse=(strategy == "reverse"))


def rank_and_kernel(m, strategy="auto"):
    """Rank and a kernel basis of an ExactMatrix.

    ``strategy`` is ``"auto"`` (compiled kernel for dense enough input),
    ``"compiled"`` (compiled kernel whenever it is built), ``"forward"`` or
    ``"reverse"`` (pure elimination with leftmost or rightmost pivots).  Kernel vectors are returned as lists of Fractions.
    """
    rank, ker = _rank_kernel_rows(m.integer_rows(), m.cols, strategy)
    out = []
    for v in ker:
        dense = [Fraction(0)] * m.cols
        for c, x in v.items():
            dense[c] = x
        out.append(dense)
    return rank, out


def rank(m, strategy="auto"):
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    # eliminate in the orientation with fewer columns
    if m.cols > m.rows:
        m = m.transpose()
    if _use_compiled(strategy, m.nnz(), m.rows, m.cols):
        res = _modular(m.integer_rows(), m.cols)
        if res is not None:
            return res[0]
    return len(_elim_py.echelon(m.integer_rows(), m.cols, reverse=(strategy == "reverse")))


def check_composable(d_in, d_out):
    if d_in.rows != d_out.cols:
        raise DimensionError(
            f"d_in has {d_in.rows} rows but d_out has {d_out.cols} columns")
    prod = d_out @ d_in
    if not prod.is_zero():
        col = min(c for row in prod._rows.values() for c in row)
        raise NotAComplexError(col)


def betti_at(d_in, d_out, check=True):
    """dim ker(d_out) - rank(d_in) at the middle space of two maps."""
    if check:
        check_composable(d_in, d_out)
    elif d_in.rows != d_out.cols:
        raise DimensionError(
            f"d_in has {d_in.rows} rows but d_out has {d_out.cols} columns")
    return d_out.cols - rank(d_out) - rank(d_in)
