"""Exterior algebra over the standard oriented orthonormal frame of R^7.

Forms are stored densely: a degree-p form is a vector of length C(7, p)
indexed by the strictly increasing subsets of {0..6} in lexicographic
order.  Public index tuples (``Form.monomial``, ``Form.__getitem__``) are
1-based so that they read like e^{123}.

Two scalar backends are supported.  The exact backend stores
``fractions.Fraction`` objects in numpy object arrays; the float backend
stores float64.  Mixing the two promotes to float.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

import numpy as np

DIM = 7
SUBSETS = {p: list(itertools.combinations(range(DIM), p)) for p in range(DIM + 1)}
INDEX = {p: {s: i for i, s in enumerate(SUBSETS[p])} for p in range(DIM + 1)}


def perm_sign(seq):
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] == seq[j]:
                return 0
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# --- scalar backends -------------------------------------------------------

def exact(x):
    """Convert a number, sequence or array to the exact backend."""
    if isinstance(x, (list, tuple)):
        x = np.asarray(x)
    if isinstance(x, np.ndarray):
        out = np.empty(x.shape, dtype=object)
        flat = x.ravel()
        out_flat = out.ravel()
        for i, v in enumerate(flat):
            out_flat[i] = v if isinstance(v, Fraction) else Fraction(v)
        return out
    return x if isinstance(x, Fraction) else Fraction(x)


def is_exact(arr):
    return isinstance(arr, np.ndarray) and arr.dtype == object


def to_float(arr):
    return np.asarray(arr, dtype=float)


def zeros(shape, exact_backend=True):
    if exact_backend:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def _promote(a, b):
    if is_exact(a) and is_exact(b):
        return a, b
    return to_float(a), to_float(b)


def max_abs(arr):
    """Largest absolute entry, returned as Fraction on the exact backend."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return Fraction(0) if arr.dtype == object else 0.0
    if arr.dtype == object:
        return max(abs(v) for v in arr.ravel())
    return float(np.max(np.abs(arr)))


def to_scaled_int(arr):
    """Write a Fraction array as (int64 array N, int d) with arr = N / d exactly."""
    arr = np.asarray(arr)
    flat = [Fraction(v) for v in arr.ravel()]
    d = 1
    for v in flat:
        d = d * v.denominator // gcd(d, v.denominator)
    nums = [v.numerator * (d // v.denominator) for v in flat]
    if nums and max(abs(n) for n in nums) >= 2 ** 62:
        raise OverflowError("entries too large for scaled int64 arithmetic")
    return np.array(nums, dtype=np.int64).reshape(arr.shape), d


def from_scaled_int(N, d):
    out = np.empty(N.shape, dtype=object)
    flat = out.ravel()
    for i, n in enumerate(N.ravel()):
        flat[i] = Fraction(int(n), d)
    return out


def exact_matmul(a, b):
    """Exact product of Fraction matrices through scaled integers."""
    Na, da = to_scaled_int(a)
    Nb, db = to_scaled_int(b)
    bound = int(np.abs(Na).max(initial=0)) * int(np.abs(Nb).max(initial=0)) * max(Na.shape[-1], 1)
    if bound < 2 ** 62:
        return from_scaled_int(Na @ Nb, da * db)
    return np.asarray(a) @ np.asarray(b)


# --- combinatorial tables --------------------------------------------------

@lru_cache(maxsize=None)
def _wedge_table(p, q):
    """Nonzero products e^I ^ e^J = sign * e^K as a dict (i, j) -> (k, sign)."""
    table = {}
    if p + q > DIM:
        return table
    for i, s in enumerate(SUBSETS[p]):
        for j, t in enumerate(SUBSETS[q]):
            sign = perm_sign(s + t)
            if sign:
                table[(i, j)] = (INDEX[p + q][tuple(sorted(s + t))], sign)
    return table


@lru_cache(maxsize=None)
def _interior_table(p):
    """Entries of e_k _| e^I as a list of (k, i, out_index, sign)."""
    rows = []
    for i, s in enumerate(SUBSETS[p]):
        for pos, k in enumerate(s):
            rest = s[:pos] + s[pos + 1:]
            rows.append((k, i, INDEX[p - 1][rest], (-1) ** pos))
    return rows


@lru_cache(maxsize=None)
def _hodge_table(p):
    rows = []
    for i, s in enumerate(SUBSETS[p]):
        c = tuple(k for k in range(DIM) if k not in s)
        rows.append((i, INDEX[DIM - p][c], perm_sign(s + c)))
    return rows


# --- Form ------------------------------------------------------------------

class Form:
    """A homogeneous exterior form on R^7 with dense coefficients."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree, coeffs):
        if not 0 <= degree <= DIM:
            raise ValueError(f"degree must lie in 0..7, got {degree}")
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (comb(DIM, degree),):
            raise ValueError(f"degree-{degree} form needs {comb(DIM, degree)} coefficients")
        if coeffs.dtype != object:
            coeffs = coeffs.astype(float)
        self.degree = degree
        self.coeffs = coeffs

    @classmethod
    def zero(cls, degree, exact_backend=True):
        return cls(degree, zeros(comb(DIM, degree), exact_backend))

    @classmethod
    def monomial(cls, indices, coeff=1, exact_backend=True):
        """coeff * e^{i1...ip} for 1-based indices in any order."""
        idx = [i - 1 for i in indices]
        if any(not 0 <= i < DIM for i in idx):
            raise ValueError(f"indices must lie in 1..7, got {indices}")
        form = cls.zero(len(idx), exact_backend)
        sign = perm_sign(idx)
        if sign:
            c = exact(coeff) if exact_backend else float(coeff)
            form.coeffs[INDEX[len(idx)][tuple(sorted(idx))]] = sign * c
        return form

    @classmethod
    def from_terms(cls, degree, terms, exact_backend=True):
        """Sum of coeff * e^{indices} over (coeff, indices) pairs."""
        out = cls.zero(degree, exact_backend)
        for coeff, indices in terms:
            if len(indices) != degree:
                raise ValueError(f"monomial {indices} does not have degree {degree}")
            out = out + cls.monomial(indices, coeff, exact_backend)
        return out

    @classmethod
    def from_vector(cls, X):
        """The 1-form metrically dual to X."""
        return cls(1, np.asarray(X).copy())

    def vector(self):
        if self.degree != 1:
            raise ValueError("only 1-forms correspond to vectors")
        return self.coeffs.copy()

    @property
    def exact(self):
        return is_exact(self.coeffs)

    def as_float(self):
        return Form(self.degree, to_float(self.coeffs))

    def as_exact(self):
        return Form(self.degree, exact(self.coeffs))

    def __getitem__(self, indices):
        idx = [i - 1 for i in indices]
        if len(idx) != self.degree:
            raise KeyError(indices)
        sign = perm_sign(idx)
        if not sign:
            return self.coeffs.dtype.type(0) if not self.exact else Fraction(0)
        return sign * self.coeffs[INDEX[self.degree][tuple(sorted(idx))]]

    def terms(self):
        """Nonzero coefficients keyed by 1-based increasing index tuples."""
        return {tuple(k + 1 for k in s): c
                for s, c in zip(SUBSETS[self.degree], self.coeffs) if c != 0}

    def _check(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return _promote(self.coeffs, other.coeffs)

    def __add__(self, other):
        a, b = self._check(other)
        return Form(self.degree, a + b)

    def __sub__(self, other):
        a, b = self._check(other)
        return Form(self.degree, a - b)

    def __neg__(self):
        return Form(self.degree, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, Form):
            return NotImplemented
        if self.exact and isinstance(scalar, (int, Fraction)):
            return Form(self.degree, self.coeffs * Fraction(scalar))
        return Form(self.degree, to_float(self.coeffs) * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if self.degree != other.degree:
            return not self.terms() and not other.terms()
        a, b = _promote(self.coeffs, other.coeffs)
        return bool(np.all(a == b))

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.terms().items()))))

    def is_zero(self):
        return not self.terms()

    def __repr__(self):
        parts = []
        for idx, c in self.terms().items():
            label = "e^" + "".join(str(i) for i in idx) if idx else "1"
            parts.append(f"{c}*{label}")
        return f"Form({self.degree}: " + (" + ".join(parts) or "0") + ")"


def basis_form(degree, position, exact_backend=True):
    f = Form.zero(degree, exact_backend)
    f.coeffs[position] = Fraction(1) if exact_backend else 1.0
    return f


def volume_form(exact_backend=True):
    return Form.monomial(range(1, DIM + 1), 1, exact_backend)


# --- operations ------------------------------------------------------------

def wedge(u, v):
    """Exterior product; the zero 7-form stands in when degrees overflow."""
    p, q = u.degree, v.degree
    a, b = _promote(u.coeffs, v.coeffs)
    if p + q > DIM:
        return Form.zero(DIM, is_exact(a))
    out = zeros(comb(DIM, p + q), is_exact(a))
    table = _wedge_table(p, q)
    nz_a = [i for i in range(len(a)) if a[i] != 0]
    nz_b = [j for j in range(len(b)) if b[j] != 0]
    for i in nz_a:
        for j in nz_b:
            hit = table.get((i, j))
            if hit is not None:
                out[hit[0]] += hit[1] * a[i] * b[j]
    return Form(p + q, out)


def interior(X, u):
    """X _| u with (X _| u)(Y1, ...) = u(X, Y1, ...)."""
    X = np.asarray(X)
    if u.degree == 0:
        return Form.zero(0, u.exact and is_exact(X))
    a, x = _promote(u.coeffs, X)
    out = zeros(comb(DIM, u.degree - 1), is_exact(a))
    for k, i, o, sign in _interior_table(u.degree):
        if a[i] != 0 and x[k] != 0:
            out[o] += sign * x[k] * a[i]
    return Form(u.degree - 1, out)


def evaluate(u, *vectors):
    """u(X1, ..., Xp) with the determinant normalization e^{12}(e1, e2) = 1."""
    if len(vectors) != u.degree:
        raise ValueError(f"a degree-{u.degree} form takes {u.degree} vectors")
    out = u
    for X in vectors:
        out = interior(X, out)
    return out.coeffs[0]


def hodge(u):
    out = zeros(comb(DIM, DIM - u.degree), u.exact)
    for i, o, sign in _hodge_table(u.degree):
        out[o] = sign * u.coeffs[i]
    return Form(DIM - u.degree, out)


def form_inner(u, v):
    """Pointwise inner product making the monomials orthonormal."""
    if u.degree != v.degree:
        return Fraction(0) if (u.exact and v.exact) else 0.0
    a, b = _promote(u.coeffs, v.coeffs)
    if is_exact(a):
        return sum((x * y for x, y in zip(a, b)), Fraction(0))
    return float(a @ b)


def endo_extend(B, u):
    """B_* u = -B^*(e_i) ^ (e_i _| u), the natural action of B on forms."""
    B = np.asarray(B)
    ex = u.exact and is_exact(B)
    out = Form.zero(u.degree, ex)
    if u.degree == 0:
        return out
    for i in range(DIM):
        row = B[i, :]  # B^*(e_i) in an orthonormal frame
        if all(r == 0 for r in row):
            continue
        out = out - wedge(Form(1, row.copy()), interior(_unit(i, ex), u))
    return out


def endo_split(B):
    """Return (sym0, skew, trace) with B = sym0 + skew + (trace/7) Id."""
    B = np.asarray(B)
    ex = is_exact(B)
    half = Fraction(1, 2) if ex else 0.5
    tr = sum(B[i, i] for i in range(DIM))
    sym = (B + B.T) * half
    skew = (B - B.T) * half
    ident = identity(ex)
    sym0 = sym - ident * (tr / DIM if not ex else Fraction(tr) / DIM)
    return sym0, skew, tr


def identity(exact_backend=True, n=DIM):
    out = zeros((n, n), exact_backend)
    for i in range(n):
        out[i, i] = Fraction(1) if exact_backend else 1.0
    return out


def _unit(i, exact_backend=True):
    v = zeros(DIM, exact_backend)
    v[i] = Fraction(1) if exact_backend else 1.0
    return v


def unit_vector(i, exact_backend=True):
    """The frame vector e_i for a 1-based index i."""
    return _unit(i - 1, exact_backend)


# --- matrix forms of the operations (float backend, cached) ----------------

@lru_cache(maxsize=None)
def wedge_basis_matrices(p):
    """W[k] is the matrix of u -> e^k ^ u from degree p to degree p+1."""
    W = np.zeros((DIM, comb(DIM, p + 1), comb(DIM, p)))
    for k in range(DIM):
        for (i, j), (o, sign) in _wedge_table(1, p).items():
            if i == k:
                W[k, o, j] += sign
    W.setflags(write=False)
    return W


@lru_cache(maxsize=None)
def interior_basis_matrices(p):
    """I[k] is the matrix of u -> e_k _| u from degree p to degree p-1."""
    I = np.zeros((DIM, comb(DIM, p - 1) if p > 0 else 1, comb(DIM, p)))
    if p > 0:
        for k, i, o, sign in _interior_table(p):
            I[k, o, i] += sign
    I.setflags(write=False)
    return I


@lru_cache(maxsize=None)
def hodge_matrix(p):
    H = np.zeros((comb(DIM, DIM - p), comb(DIM, p)))
    for i, o, sign in _hodge_table(p):
        H[o, i] = sign
    H.setflags(write=False)
    return H


def wedge_matrix(u, q):
    """Matrix of v -> u ^ v from degree q to degree deg(u)+q (float)."""
    p = u.degree
    M = np.zeros((comb(DIM, p + q) if p + q <= DIM else 1, comb(DIM, q)))
    if p + q > DIM:
        return M
    a = to_float(u.coeffs)
    for (i, j), (o, sign) in _wedge_table(p, q).items():
        M[o, j] += sign * a[i]
    return M


def endo_matrix(B, p):
    """Matrix of u -> B_* u on degree-p forms (float)."""
    B = to_float(B)
    if p == 0:
        return np.zeros((1, 1))
    W = wedge_basis_matrices(p - 1)
    I = interior_basis_matrices(p)
    # B_* = -sum_i (B^* e_i) ^ (e_i _| .) = -sum_{i,k} B[i,k] W[k] I[i]
    return -np.einsum("ik,kab,ibc->ac", B, W, I)


@lru_cache(maxsize=None)
def endo_generators(p):
    """Integer tensor G with B_* = sum_{a,b} B[a, b] G[a, b] on degree-p forms."""
    n = comb(DIM, p)
    if p == 0:
        G = np.zeros((DIM, DIM, 1, 1), dtype=np.int64)
    else:
        W = wedge_basis_matrices(p - 1).astype(np.int64)
        I = interior_basis_matrices(p).astype(np.int64)
        G = -np.einsum("kab,ibc->ikac", W, I)
    assert G.shape[2:] == (n, n)
    G.setflags(write=False)
    return G


# Names used by the interface description.
formInner = form_inner
endoExtend = endo_extend
endoSplit = endo_split
