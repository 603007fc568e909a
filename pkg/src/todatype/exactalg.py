"""Exact polynomial algebra over the rationals.

Coefficients are kept as Python ``int`` when integral and as
``fractions.Fraction`` otherwise; both compare and hash exactly, so the
canonical form of a :class:`Poly` is simply its dict of nonzero terms.
"""
from __future__ import annotations

import operator
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rat = Union[int, Fraction]
Monomial = tuple  # exponent vector, one non-negative int per variable


class PoleError(ZeroDivisionError):
    """A rational function was evaluated where its denominator vanishes."""


def as_rat(value) -> Rat:
    """Coerce ints, Fractions and decimal/fraction strings to an exact rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, (str, float)):
        return as_rat(Fraction(value))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _norm(c: Rat) -> Rat:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class VarSet:
    """Ordered, immutable collection of distinct variable names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not _NAME_RE.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarSet({list(self.names)})"

    def index(self, var: Union[str, int]) -> int:
        if isinstance(var, int):
            if not 0 <= var < len(self.names):
                raise KeyError(f"variable index {var} out of range")
            return var
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"unknown variable {var!r} in {self!r}") from None

    def var(self, name: Union[str, int]) -> "Poly":
        i = self.index(name)
        exps = [0] * len(self.names)
        exps[i] = 1
        return Poly._raw(self, {tuple(exps): 1})

    def gens(self) -> list["Poly"]:
        return [self.var(i) for i in range(len(self.names))]

    def zero(self) -> "Poly":
        return Poly._raw(self, {})

    def const(self, c) -> "Poly":
        return Poly.constant(self, c)


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients.

    Instances are immutable; every operation returns a new polynomial in
    canonical form (no stored zero coefficients).
    """

    __slots__ = ("varset", "terms", "_hash")

    def __init__(self, varset: VarSet, terms: Mapping[Monomial, Rat] = ()):
        n = len(varset)
        clean = {}
        for mono, c in dict(terms).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent vector {mono} for {varset!r}")
            c = as_rat(c)
            if c:
                clean[mono] = _norm(clean.get(mono, 0) + c)
                if not clean[mono]:
                    del clean[mono]
        self.varset = varset
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, varset: VarSet, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p.varset = varset
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, varset: VarSet, c) -> "Poly":
        c = as_rat(c)
        return cls._raw(varset, {(0,) * len(varset): c} if c else {})

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.varset != self.varset:
                raise ValueError(
                    f"variable set mismatch: {self.varset!r} vs {other.varset!r}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(self.varset, other)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for mono, c in small.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = _norm(s)
            else:
                out.pop(mono, None)
        return Poly._raw(self.varset, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.varset, {m: -c for m, c in self.terms.items()})

    def __pos__(self) -> "Poly":
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly._raw(self.varset, {})
        out: dict = {}
        add = operator.add
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(map(add, m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly._raw(self.varset, {m: _norm(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero rational constant only."""
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise TypeError("Poly can only be divided by nonzero constants")
            other = other.constant_term()
        c = as_rat(other)
        if not c:
            raise ZeroDivisionError("division of Poly by zero")
        inv = Fraction(1, 1) / c
        return Poly._raw(
            self.varset, {m: _norm(v * inv) for m, v in self.terms.items()}
        )

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.varset, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.varset == other.varset and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == Poly.constant(self.varset, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.varset, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Rat:
        return self.terms.get((0,) * len(self.varset), 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def variables(self) -> list[str]:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return [self.varset.names[i] for i in sorted(used)]

    def sorted_terms(self) -> list[tuple[Monomial, Rat]]:
        """Terms in graded-lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __len__(self) -> int:
        return len(self.terms)

    # -- calculus and evaluation -------------------------------------------
    def diff(self, var: Union[str, int]) -> "Poly":
        i = self.varset.index(var)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                dm = m[:i] + (e - 1,) + m[i + 1:]
                out[dm] = c * e
        return Poly._raw(self.varset, out)

    def gradient(self) -> list["Poly"]:
        return [self.diff(i) for i in range(len(self.varset))]

    def eval(self, point: Sequence) -> Rat:
        if len(point) != len(self.varset):
            raise ValueError(
                f"point has {len(point)} coordinates, expected {len(self.varset)}"
            )
        pt = [as_rat(x) for x in point]
        total: Rat = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v = v * x**e
            total += v
        return _norm(total)

    def eval_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for m, c in self.terms.items():
            v = float(c)
            for x, e in zip(point, m):
                if e:
                    v *= x**e
            total += v
        return total

    def subst(self, images: Union[Mapping[str, "Poly"], Sequence["Poly"]],
              target: VarSet = None) -> "Poly":
        """Compose with a polynomial map.

        ``images`` gives, for each variable of ``self``, a Poly over a common
        target VarSet (either a name -> Poly mapping or a sequence aligned
        with ``self.varset``).
        """
        if isinstance(images, Mapping):
            seq = []
            for name in self.varset.names:
                if name not in images:
                    raise KeyError(f"no image supplied for variable {name!r}")
                seq.append(images[name])
        else:
            seq = list(images)
            if len(seq) != len(self.varset):
                raise ValueError("image count does not match variable count")
        if target is None:
            found = [p.varset for p in seq if isinstance(p, Poly)]
            if not found:
                raise ValueError("cannot infer target VarSet; pass target=")
            target = found[0]
        seq = [p if isinstance(p, Poly) else Poly.constant(target, p) for p in seq]
        for p in seq:
            if p.varset != target:
                raise ValueError("all images must share the target VarSet")
        powers: list[dict[int, Poly]] = [{} for _ in seq]

        def power(i: int, e: int) -> Poly:
            cache = powers[i]
            if e not in cache:
                cache[e] = seq[i] ** e
            return cache[e]

        result = Poly._raw(target, {})
        for m, c in self.terms.items():
            term = Poly.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    # -- text -----------------------------------------------------------------
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def _format_coeff(c: Rat) -> str:
    return str(c)


def _format_monomial(names: Sequence[str], m: Monomial) -> str:
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Render as a sum of signed monomials, e.g. ``2*a1^2 - b1*b2``."""
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = _format_monomial(p.varset.names, m)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    return tokens


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    # unary := ('-'|'+') unary | power ; power := atom (('^'|'**') int)?
    def __init__(self, tokens, varset: VarSet):
        self.toks = tokens
        self.i = 0
        self.vs = varset

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ValueError(f"expected {value or 'token'}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                val = val / rhs
        return val

    def unary(self):
        if self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            val = self.unary()
            return -val if op == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            kind, tok = self.take()
            if kind != "num" or "." in tok:
                raise ValueError("exponent must be a non-negative integer literal")
            return base ** int(tok)
        return base

    def atom(self):
        kind, tok = self.take()
        if kind == "num":
            return Poly.constant(self.vs, Fraction(tok))
        if kind == "name":
            return self.vs.var(tok)
        if tok == "(":
            val = self.expr()
            self.take(")")
            return val
        raise ValueError(f"unexpected token {tok!r}")


def parse_poly(text: str, varset: VarSet) -> Poly:
    """Parse the textual form produced by :func:`format_poly`.

    Also accepts parentheses, ``**`` for powers and division by constants.
    """
    parser = _Parser(_tokenize(text), varset)
    if not parser.toks:
        raise ValueError("empty polynomial text")
    val = parser.expr()
    if parser.i != len(parser.toks):
        raise ValueError(f"trailing input in {text!r}")
    return val


class RatFunc:
    """Quotient of two polynomials. Not reduced; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Union[Poly, int, Fraction] = 1):
        if not isinstance(den, Poly):
            den = Poly.constant(num.varset, den)
        if den.varset != num.varset:
            raise ValueError("numerator and denominator over different VarSets")
        if den.is_zero():
            raise ZeroDivisionError("RatFunc denominator is the zero polynomial")
        self.num = num
        self.den = den

    @property
    def varset(self) -> VarSet:
        return self.num.varset

    def eval(self, point: Sequence) -> Rat:
        d = self.den.eval(point)
        if d == 0:
            raise PoleError(f"denominator {self.den} vanishes at {list(point)}")
        return _norm(Fraction(self.num.eval(point)) / d)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            other = RatFunc(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __repr__(self) -> str:
        return f"RatFunc(({self.num}) / ({self.den}))"


def parse_ratfunc(num: str, den: str, varset: VarSet) -> RatFunc:
    return RatFunc(parse_poly(num, varset), parse_poly(den, varset))


class PolyMatrix:
    """Dense matrix of Poly over one VarSet."""

    __slots__ = ("varset", "rows")

    def __init__(self, varset: VarSet, rows: Sequence[Sequence]):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("PolyMatrix needs at least one row and column")
        ncols = len(rows[0])
        out = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            row = []
            for e in r:
                if not isinstance(e, Poly):
                    e = Poly.constant(varset, e)
                elif e.varset != varset:
                    raise ValueError("entry over a different VarSet")
                row.append(e)
            out.append(tuple(row))
        self.varset = varset
        self.rows = tuple(out)

    @classmethod
    def zeros(cls, varset: VarSet, nrows: int, ncols: int = None) -> "PolyMatrix":
        ncols = nrows if ncols is None else ncols
        z = varset.zero()
        return cls(varset, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, varset: VarSet, n: int) -> "PolyMatrix":
        return cls(varset, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, idx) -> Poly:
        i, j = idx
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    __hash__ = None

    def _check(self, other: "PolyMatrix"):
        if other.varset != self.varset:
            raise ValueError("matrices over different VarSets")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.varset, [[a + b for a, b in zip(r, s)]
                                        for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.varset, [[-a for a in r] for r in self.rows])

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(self.varset, [[a * c for a in r] for r in self.rows])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("inner dimensions differ")
        cols = list(zip(*other.rows))
        zero = self.varset.zero()
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.varset, out)

    def commutator(self, other: "PolyMatrix") -> "PolyMatrix":
        """Return ``self @ other - other @ self``."""
        return self @ other - other @ self

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.varset, list(zip(*self.rows)))

    @property
    def T(self) -> "PolyMatrix":
        return self.transpose()

    def trace(self) -> Poly:
        acc = self.varset.zero()
        for i in range(min(self.shape)):
            acc = acc + self.rows[i][i]
        return acc

    def power(self, k: int) -> "PolyMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("power of a non-square matrix")
        result = PolyMatrix.identity(self.varset, n)
        for _ in range(k):
            result = result @ self
        return result

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self.varset, [[self.rows[i][j] for j in cols] for i in rows])

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def is_antisymmetric(self) -> bool:
        return self == -self.transpose()

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.varset, [[fn(e) for e in r] for r in self.rows])

    def eval(self, point: Sequence) -> list[list[Rat]]:
        return [[e.eval(point) for e in r] for r in self.rows]

    def det(self) -> Poly:
        """Determinant by expansion over the sparsity pattern.

        Walks permutations through nonzero entries only, which is cheap for
        the banded/sparse Lax matrices used here.
        """
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        nz = [[j for j in range(n) if self.rows[i][j].terms] for i in range(n)]
        memo: dict = {}

        def minor(i: int, used: int) -> Poly:
            if i == n:
                return Poly.constant(self.varset, 1)
            key = (i, used)
            if key in memo:
                return memo[key]
            acc = self.varset.zero()
            for j in nz[i]:
                if used >> j & 1:
                    continue
                # sign: number of used columns to the right of j
                inv = bin(used >> (j + 1)).count("1")
                term = self.rows[i][j] * minor(i + 1, used | (1 << j))
                acc = acc - term if inv & 1 else acc + term
            memo[key] = acc
            return acc

        return minor(0, 0)

    def to_text(self) -> list[list[str]]:
        return [[format_poly(e) for e in r] for r in self.rows]

    def __repr__(self) -> str:
        return "PolyMatrix(" + repr(self.to_text()) + ")"


class PolyMap:
    """Polynomial map given by one image (over ``source``) per ``target`` variable."""

    __slots__ = ("source", "target", "images")

    def __init__(self, source: VarSet, target: VarSet, images: Sequence[Poly]):
        images = tuple(images)
        if len(images) != len(target):
            raise ValueError("need exactly one image per target variable")
        for p in images:
            if p.varset != source:
                raise ValueError("images must be polynomials over the source VarSet")
        self.source = source
        self.target = target
        self.images = images

    @classmethod
    def identity(cls, varset: VarSet) -> "PolyMap":
        return cls(varset, varset, varset.gens())

    def __getitem__(self, name: Union[str, int]) -> Poly:
        return self.images[self.target.index(name)]

    def pullback(self, p: Poly) -> Poly:
        """``p`` over the target, composed with this map."""
        if p.varset != self.target:
            raise ValueError("polynomial is not over the target VarSet")
        return p.subst(self.images, target=self.source)

    def as_dict(self) -> dict[str, str]:
        return {name: format_poly(img) for name, img in zip(self.target.names, self.images)}

    def __repr__(self) -> str:
        return f"PolyMap({self.as_dict()})"
