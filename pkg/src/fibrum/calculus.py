"""Forward-mode derivative-carrying scalars and exact Jacobians.

A :class:`DScalar` carries a value together with its gradient against a
fixed seed basis of length ``d``.  All arithmetic is written generically:
the value and the gradient entries may themselves be ``DScalar`` instances,
so nesting first-order scalars yields exact second (and higher) derivatives.
That nesting is what lets Lie brackets of fields whose coefficients already
contain first derivatives come out exact instead of finite-differenced.

Each differentiation pass seeds its scalars with a fresh tag.  When
scalars from different passes meet (an evaluator capturing a value from an
enclosing differentiation is the typical case), the younger tag is the
active one and the older operand is threaded through as a constant; this
is what keeps nested derivatives from contaminating each other.

Evaluators used with this module must be pure and *closed under DScalar
inputs*: they may only combine their arguments with ``+ - * / **`` and the
smooth functions exported here (``sin``, ``cos``, ...).
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence, Union

import numpy as np

from .errors import NonFiniteOutputError, SecondOrderUnavailableError

Scalar = Union[float, "DScalar"]
VectorFn = Callable[[Sequence[Scalar]], Sequence[Scalar]]

_TAGS = itertools.count(1)


def _fresh_tag() -> int:
    return next(_TAGS)


class DScalar:
    """Scalar with a gradient of fixed seed length; components may nest.

    ``tag`` identifies the differentiation pass the gradient belongs to;
    user-constructed scalars share tag 0 and combine elementwise.  ``hess``
    is never propagated by arithmetic; it is assembled once by
    :func:`evaluate_second_order` and is ``None`` everywhere else.
    """

    __slots__ = ("value", "grad", "hess", "tag")

    # Make numpy defer binary ops to our reflected methods instead of
    # broadcasting us into object arrays.
    __array_ufunc__ = None

    def __init__(self, value: Scalar, grad: Sequence[Scalar], hess=None,
                 tag: int = 0):
        self.value = value
        self.grad = tuple(grad)
        self.hess = hess
        self.tag = tag

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, DScalar):
            if other.tag == self.tag:
                return DScalar(self.value + other.value,
                               tuple(a + b for a, b in zip(self.grad, other.grad)),
                               tag=self.tag)
            if other.tag > self.tag:  # self is constant for other's pass
                return DScalar(self + other.value, other.grad, tag=other.tag)
            return DScalar(self.value + other, self.grad, tag=self.tag)
        return DScalar(self.value + float(other), self.grad, tag=self.tag)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DScalar):
            if other.tag == self.tag:
                return DScalar(self.value - other.value,
                               tuple(a - b for a, b in zip(self.grad, other.grad)),
                               tag=self.tag)
            if other.tag > self.tag:
                return DScalar(self - other.value,
                               tuple(-g for g in other.grad), tag=other.tag)
            return DScalar(self.value - other, self.grad, tag=self.tag)
        return DScalar(self.value - float(other), self.grad, tag=self.tag)

    def __rsub__(self, other):
        return DScalar(float(other) - self.value,
                       tuple(-g for g in self.grad), tag=self.tag)

    def __mul__(self, other):
        if isinstance(other, DScalar):
            if other.tag == self.tag:
                return DScalar(self.value * other.value,
                               tuple(self.value * gb + ga * other.value
                                     for ga, gb in zip(self.grad, other.grad)),
                               tag=self.tag)
            if other.tag > self.tag:
                return DScalar(self * other.value,
                               tuple(self * g for g in other.grad),
                               tag=other.tag)
            return DScalar(self.value * other,
                           tuple(g * other for g in self.grad), tag=self.tag)
        f = float(other)
        return DScalar(self.value * f, tuple(g * f for g in self.grad),
                       tag=self.tag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DScalar):
            return self * other ** -1
        f = float(other)
        return DScalar(self.value / f, tuple(g / f for g in self.grad),
                       tag=self.tag)

    def __rtruediv__(self, other):
        return float(other) * self ** -1

    def __neg__(self):
        return DScalar(-self.value, tuple(-g for g in self.grad), tag=self.tag)

    def __pos__(self):
        return self

    def __pow__(self, p):
        if not isinstance(p, (int, float)):
            raise TypeError("DScalar exponent must be a plain number")
        coeff = p * self.value ** (p - 1)
        return DScalar(self.value ** p, tuple(coeff * g for g in self.grad),
                       tag=self.tag)

    def __repr__(self):
        return f"DScalar({self.value!r}, grad={self.grad!r}, tag={self.tag})"


def is_dscalar(z) -> bool:
    return isinstance(z, DScalar)


def float_value(z) -> float:
    """Strip all derivative layers and return the underlying float."""
    while isinstance(z, DScalar):
        z = z.value
    return float(z)


# -- smooth functions, dispatching on float vs DScalar ---------------------

def sin(z: Scalar) -> Scalar:
    if isinstance(z, DScalar):
        c = cos(z.value)
        return DScalar(sin(z.value), tuple(c * g for g in z.grad), tag=z.tag)
    return math.sin(z)


def cos(z: Scalar) -> Scalar:
    if isinstance(z, DScalar):
        s = sin(z.value)
        return DScalar(cos(z.value), tuple(-s * g for g in z.grad), tag=z.tag)
    return math.cos(z)


def tan(z: Scalar) -> Scalar:
    return sin(z) / cos(z)


def exp(z: Scalar) -> Scalar:
    if isinstance(z, DScalar):
        e = exp(z.value)
        return DScalar(e, tuple(e * g for g in z.grad), tag=z.tag)
    return math.exp(z)


def log(z: Scalar) -> Scalar:
    if isinstance(z, DScalar):
        return DScalar(log(z.value), tuple(g / z.value for g in z.grad),
                       tag=z.tag)
    return math.log(z)


def sqrt(z: Scalar) -> Scalar:
    if isinstance(z, DScalar):
        r = sqrt(z.value)
        return DScalar(r, tuple(g / (2.0 * r) for g in z.grad), tag=z.tag)
    return math.sqrt(z)


def arctan(z: Scalar) -> Scalar:
    if isinstance(z, DScalar):
        denom = 1.0 + z.value * z.value
        return DScalar(arctan(z.value), tuple(g / denom for g in z.grad),
                       tag=z.tag)
    return math.atan(z)


# -- generic small linear algebra (entries float or DScalar) ---------------

def dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc = acc + x * y
    return acc


def mat_vec(rows: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> list:
    return [dot(row, v) for row in rows]


def vec_add(a: Sequence[Scalar], b: Sequence[Scalar]) -> list:
    return [x + y for x, y in zip(a, b)]


def vec_sub(a: Sequence[Scalar], b: Sequence[Scalar]) -> list:
    return [x - y for x, y in zip(a, b)]


def vec_scale(c: Scalar, a: Sequence[Scalar]) -> list:
    return [c * x for x in a]


def as_float_array(v: Sequence[Scalar]) -> np.ndarray:
    return np.array([float_value(x) for x in v], dtype=float)


# -- seeding and derivatives -----------------------------------------------

def seed_scalars(coords: Sequence[Scalar], tag: int | None = None
                 ) -> list[DScalar]:
    """Attach a unit seed basis with a fresh tag to a coordinate tuple.

    Entries of ``coords`` may already be DScalars from an enclosing pass;
    the seeds then nest and second derivatives propagate exactly.
    """
    if tag is None:
        tag = _fresh_tag()
    n = len(coords)
    return [DScalar(coords[j], tuple(1.0 if k == j else 0.0 for k in range(n)),
                    tag=tag)
            for j in range(n)]


def jacobian(fn: VectorFn, coords: Sequence[Scalar]):
    """Exact forward-mode Jacobian of ``fn`` at ``coords``.

    Column ``j`` is the directional derivative along basis vector ``e_j``.
    For plain float input returns a float ``(k, n)`` ndarray and checks the
    output for NaN/inf; when ``coords`` carries DScalars from an enclosing
    differentiation, returns nested lists whose entries belong to that
    enclosing pass.
    """
    coords = list(coords)
    n = len(coords)
    nested = any(isinstance(c, DScalar) for c in coords)
    tag = _fresh_tag()
    try:
        out = fn(seed_scalars(coords, tag))
    except (ZeroDivisionError, OverflowError) as exc:
        raise NonFiniteOutputError(
            f"evaluator is singular at this point: {exc}") from exc
    rows = []
    for comp in out:
        if isinstance(comp, DScalar) and comp.tag == tag:
            rows.append(list(comp.grad))
        else:
            rows.append([0.0] * n)  # constant w.r.t. this pass
    if nested:
        return rows
    mat = np.array([[float_value(entry) for entry in row] for row in rows])
    if not np.all(np.isfinite(mat)):
        raise NonFiniteOutputError(
            "jacobian produced non-finite entries; evaluator is singular here")
    return mat


def derivative(fn: Callable[[Scalar], Sequence[Scalar]], t: Scalar) -> list:
    """Derivative of a one-parameter map, as a list of scalars."""
    rows = jacobian(lambda args: fn(args[0]), [t])
    return [row[0] for row in rows]


def hessian(fn: VectorFn, coords: Sequence[float]) -> np.ndarray:
    """Exact Hessians of every output component, shape ``(k, n, n)``.

    Obtained by one nested first-order pass: the outer seeds ride inside
    the values of the inner seeds.
    """
    coords = [float(c) for c in coords]
    n = len(coords)
    outer = seed_scalars(coords)
    rows = jacobian(fn, outer)  # entries carry the outer pass
    k = len(rows)
    out = np.zeros((k, n, n))
    for i in range(k):
        for j in range(n):
            entry = rows[i][j]
            if isinstance(entry, DScalar):
                out[i, j, :] = [float_value(g) for g in entry.grad]
    return out


def evaluate_second_order(fn: Callable[[Sequence[Scalar]], Scalar],
                          coords: Sequence[float]) -> DScalar:
    """Evaluate a scalar map with value, gradient and Hessian attached.

    The Hessian is assembled from a single nested pass and stored on the
    returned DScalar's ``hess`` slot (the only place ``hess`` is ever set).
    """
    coords = [float(c) for c in coords]
    n = len(coords)
    inner = seed_scalars(coords)
    outer_tag = _fresh_tag()
    doubled = [DScalar(inner[j], tuple(1.0 if k == j else 0.0 for k in range(n)),
                       tag=outer_tag)
               for j in range(n)]
    try:
        res = fn(doubled)
    except (TypeError, AttributeError) as exc:
        raise SecondOrderUnavailableError(
            "evaluator is not closed under nested derivative-carrying "
            "scalars") from exc
    if not isinstance(res, DScalar):
        return DScalar(float(res), (0.0,) * n, hess=np.zeros((n, n)))
    value = float_value(res)
    if isinstance(res.value, DScalar):
        grad = tuple(float_value(g) for g in res.value.grad)
    else:
        grad = tuple(float_value(g) for g in res.grad)
    hess = np.zeros((n, n))
    for j in range(n):
        gj = res.grad[j] if j < len(res.grad) else 0.0
        if isinstance(gj, DScalar):
            hess[j, :] = [float_value(g) for g in gj.grad]
    return DScalar(value, grad, hess=hess)
