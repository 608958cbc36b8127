"""Curvature and cocurvature, computed by two routes.

Route one (``curv_via_lifts``) follows the integrability obstruction:
bracket the horizontal-lift fields and compare against the lift of the
bracket.  It is validated here against the classical coordinate tensor
and against holonomy, and is what this library treats as *the* curvature,

    CURV_s(u, v) = (H_[u,v] - [H_u, H_v]) o s .

Route two (``curv_via_covariant``) brackets the foliation-extended
covariant-derivative fields and subtracts the covariant derivative along
the bracket.  The two routes do NOT agree in general: expanding
[T_u, T_v] = T_[u,v] with T = nabla + H gives the exact identity

    (via_covariant - via_lifts)(x) = ([H_v, nabla_u] + [nabla_v, H_u])(s(x))

and the right-hand side does not vanish (a flat chart with s(x) = x,
u = d1, v = x1*d1 already gives -1).  The cross-bracket sum is exposed as
``cross_bracket_sum`` and the expansion identity above is the consistency
check that the machinery is exact; see the repository notes for the
analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bundle import (BaseVectorField, Point, SectionMap, TotalTangent,
                     TotalVectorField, base_lie_bracket, lie_bracket)
from .calculus import (Scalar, as_float_array, jacobian, mat_vec, vec_add,
                       vec_scale, vec_sub)
from .connection import (ConnectionField, ConnectionKind, constant_base_field,
                         covariant_derivative, extend_covariant_derivative,
                         horizontal_lift_field)
from .errors import (DomainError, LinearityRequiredError,
                     SecondOrderUnavailableError, TangentBundleRequiredError)


@dataclass(frozen=True, eq=False)
class VerticalValue:
    """A vertical tangent vector: fibre components at a total-space anchor."""

    anchor: Point
    fibre_part: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "fibre_part",
                           np.asarray(self.fibre_part, dtype=float))
        if self.fibre_part.shape != (self.anchor.bundle.fibre_dim,):
            raise DomainError("fibre_part has wrong dimension")


@dataclass(frozen=True, eq=False)
class CurvatureReportRow:
    """One sample of the two curvature routes and their disagreement."""

    point: Point
    via_lifts: np.ndarray
    via_covariant: np.ndarray
    residual: float
    cross_residual: float


def _pv_apply(conn: ConnectionField, x, y, vec):
    """Apply the vertical projector at (x, y) to a split total vector."""
    m = conn.bundle.base_dim
    base, fib = list(vec[:m]), list(vec[m:])
    g = conn.gamma(x, y, base)
    return [0.0] * m + vec_add(fib, g)


def _ph_apply(conn: ConnectionField, x, y, vec):
    m = conn.bundle.base_dim
    base = list(vec[:m])
    g = conn.gamma(x, y, base)
    return base + [-c for c in g]


def _const_lift_field(conn: ConnectionField, vec) -> TotalVectorField:
    """Horizontal-lift field of a constant-coefficient base field: the
    canonical extension of a single horizontal vector."""
    return horizontal_lift_field(conn,
                                 constant_base_field(conn.bundle, vec))


def curvature(conn: ConnectionField, e: Point, X: TotalTangent,
              Y: TotalTangent) -> VerticalValue:
    """Curvature two-form value R(X, Y) = -P_V [P_H X^, P_H Y^] at e.

    Tensoriality licenses any field extension of the projected arguments;
    we extend horizontally via constant-coefficient base fields (the
    vertical parts are annihilated by P_H and never enter).
    """
    if X.anchor is not e or Y.anchor is not e:
        if X.anchor.coords != e.coords or Y.anchor.coords != e.coords:
            raise DomainError("curvature arguments must be anchored at e")
    hx = _const_lift_field(conn, X.base_part)
    hy = _const_lift_field(conn, Y.base_part)
    br = lie_bracket(hx, hy)(e)
    x, y = conn.bundle.split(list(e.coords))
    pv = _pv_apply(conn, x, y, br)
    m = conn.bundle.base_dim
    return VerticalValue(e, -as_float_array(pv[m:]))


def cocurvature(conn: ConnectionField, e: Point, X: TotalTangent,
                Y: TotalTangent) -> TotalTangent:
    """Cocurvature value -P_H [V_X, V_Y] at e, with fibre-constant vertical
    extensions of the projected arguments.

    The vertical distribution is integrable (its leaves are the fibres),
    so this vanishes identically; the operation exists to make that
    checkable rather than assumed.
    """
    x, y = conn.bundle.split(list(e.coords))
    m = conn.bundle.base_dim
    wx = _pv_apply(conn, x, y, X.as_vector())[m:]
    wy = _pv_apply(conn, x, y, Y.as_vector())[m:]
    vx_field = TotalVectorField(conn.bundle,
                                lambda coords: [0.0] * m + list(wx))
    vy_field = TotalVectorField(conn.bundle,
                                lambda coords: [0.0] * m + list(wy))
    br = lie_bracket(vx_field, vy_field)(e)
    ph = _ph_apply(conn, x, y, br)
    vals = -as_float_array(ph)
    return TotalTangent(e, vals[:m], vals[m:])


def curv_via_lifts(conn: ConnectionField, s: SectionMap, u: BaseVectorField,
                   v: BaseVectorField, x: Point) -> VerticalValue:
    """CURV_s(u, v) = (H_[u,v] - [H_u, H_v]) evaluated at (x, s(x)).

    For linear (Christoffel) coefficients this equals the classical
    coordinate curvature contraction R^a_bcd s^b u^c v^d.
    """
    e = s.graph(x)
    hu = horizontal_lift_field(conn, u)
    hv = horizontal_lift_field(conn, v)
    hw = horizontal_lift_field(conn, base_lie_bracket(u, v))
    diff = vec_sub(hw(e), lie_bracket(hu, hv)(e))
    m = conn.bundle.base_dim
    return VerticalValue(e, as_float_array(diff[m:]))


def curv_via_vertical_projection(conn: ConnectionField, s: SectionMap,
                                 u: BaseVectorField, v: BaseVectorField,
                                 x: Point) -> VerticalValue:
    """Independent route for the same quantity: -P_V [H_u, H_v] at (x, s(x)).

    Equality with ``curv_via_lifts`` is exactly the statement that the lift
    of the bracket is the horizontal component of the bracket of the lifts.
    """
    e = s.graph(x)
    hu = horizontal_lift_field(conn, u)
    hv = horizontal_lift_field(conn, v)
    br = lie_bracket(hu, hv)(e)
    xs, ys = conn.bundle.split(list(e.coords))
    pv = _pv_apply(conn, xs, ys, br)
    m = conn.bundle.base_dim
    return VerticalValue(e, -as_float_array(pv[m:]))


def curv_via_covariant(conn: ConnectionField, s: SectionMap,
                       u: BaseVectorField, v: BaseVectorField, x: Point,
                       offset_shift: Optional[Sequence[float]] = None
                       ) -> VerticalValue:
    """Bracket of the extended covariant-derivative fields minus the
    covariant derivative along [u, v], evaluated at (x, s(x)).

    Bracketing differentiates fields whose coefficients already contain
    first derivatives of the section, so evaluators must be closed under
    nested derivative-carrying scalars (second-order mode).  See the module
    docstring: this does not reproduce ``curv_via_lifts`` in general.
    """
    e = s.graph(x)
    nu = extend_covariant_derivative(conn, s, u, offset_shift)
    nv = extend_covariant_derivative(conn, s, v, offset_shift)
    try:
        br = lie_bracket(nu, nv)(e)
    except (TypeError, AttributeError) as exc:
        raise SecondOrderUnavailableError(
            "bracketing the extended covariant derivatives needs evaluators "
            "closed under nested derivative-carrying scalars") from exc
    m = conn.bundle.base_dim
    nw = covariant_derivative(conn, s, base_lie_bracket(u, v), x)
    return VerticalValue(e, as_float_array(br[m:]) - nw)


def cross_bracket_sum(conn: ConnectionField, s: SectionMap,
                      u: BaseVectorField, v: BaseVectorField, x: Point,
                      offset_shift: Optional[Sequence[float]] = None
                      ) -> np.ndarray:
    """([H_v, nabla_u] + [nabla_v, H_u]) evaluated at (x, s(x)).

    By pure bracket bilinearity this equals via_covariant - via_lifts at
    the same point; it is the exact defect between the two curvature
    routes.
    """
    e = s.graph(x)
    hu = horizontal_lift_field(conn, u)
    hv = horizontal_lift_field(conn, v)
    nu = extend_covariant_derivative(conn, s, u, offset_shift)
    nv = extend_covariant_derivative(conn, s, v, offset_shift)
    term1 = lie_bracket(hv, nu)(e)
    term2 = lie_bracket(nv, hu)(e)
    return as_float_array(vec_add(term1, term2))


def compare_curvature_routes(conn: ConnectionField, s: SectionMap,
                             u: BaseVectorField, v: BaseVectorField,
                             samples: Sequence[Point]
                             ) -> list[CurvatureReportRow]:
    """Evaluate both curvature routes and the cross-bracket defect at each
    sample base point."""
    rows = []
    for x in samples:
        lifts = curv_via_lifts(conn, s, u, v, x).fibre_part
        cov = curv_via_covariant(conn, s, u, v, x).fibre_part
        cross = cross_bracket_sum(conn, s, u, v, x)
        rows.append(CurvatureReportRow(
            point=x,
            via_lifts=lifts,
            via_covariant=cov,
            residual=float(np.max(np.abs(cov - lifts))),
            cross_residual=float(np.max(np.abs(cross))),
        ))
    return rows


def tensoriality_check_curvature(conn: ConnectionField, e: Point,
                                 X: TotalTangent, Y: TotalTangent,
                                 scalar_field: Callable[[Sequence[Scalar]], Scalar]
                                 ) -> float:
    """Residual of R(f X, Y) - f(e) R(X, Y) and R(X, f Y) - f(e) R(X, Y),
    with the scaled argument extended explicitly as a field (no tensorial
    shortcut)."""
    hx = _const_lift_field(conn, X.base_part)
    hy = _const_lift_field(conn, Y.base_part)

    def scaled(field):
        def ev(coords):
            f = scalar_field(coords)
            return vec_scale(f, field.fn(coords))
        return TotalVectorField(conn.bundle, ev)

    xs, ys = conn.bundle.split(list(e.coords))
    m = conn.bundle.base_dim
    fe = float(scalar_field([float(c) for c in e.coords]))
    base_val = -as_float_array(_pv_apply(conn, xs, ys,
                                         lie_bracket(hx, hy)(e))[m:])
    worst = 0.0
    for bracket in (lie_bracket(scaled(hx), hy), lie_bracket(hx, scaled(hy))):
        val = -as_float_array(_pv_apply(conn, xs, ys, bracket(e))[m:])
        worst = max(worst, float(np.max(np.abs(val - fe * base_val))))
    return worst


# -- linear-connection specialization ----------------------------------------

def _cov_value(conn: ConnectionField, s_fn, v_fn, coords):
    """Ds v + gamma(x, s(x), v(x)) without chart validation (generic).

    Used where intermediate covariant derivatives may leave the fibre
    window: for linear coefficients the fibre is a genuine linear space and
    gamma extends canonically, so evaluating outside the box is sound.
    """
    vx = v_fn(coords)
    ds_v = mat_vec(jacobian(s_fn, coords), vx)
    g = conn.gamma(coords, s_fn(coords), vx)
    return vec_add(ds_v, g)


def _require_linear(conn: ConnectionField, what: str):
    if conn.kind is not ConnectionKind.LINEAR:
        raise LinearityRequiredError(
            f"{what} composes covariant derivatives, which needs the "
            "vertical-bundle identification of a linear connection")


def covariant_derivative_section(conn: ConnectionField, s: SectionMap,
                                 v: BaseVectorField) -> SectionMap:
    """nabla_v s as a new section of a vector bundle (VE ~ E identification)."""
    _require_linear(conn, "covariant_derivative_section")
    return SectionMap(conn.bundle,
                      lambda coords: _cov_value(conn, s.fn, v.fn, coords))


def base_covariant_derivative(conn: ConnectionField, u: BaseVectorField,
                              v: BaseVectorField) -> BaseVectorField:
    """nabla_u v on the tangent-bundle configuration (fields as sections)."""
    if conn.bundle.fibre_dim != conn.bundle.base_dim:
        raise TangentBundleRequiredError(
            "nabla_u v needs the tangent-bundle configuration (f = m)")
    return BaseVectorField(conn.bundle,
                           lambda coords: _cov_value(conn, v.fn, u.fn, coords))


def second_covariant_derivative(conn: ConnectionField, s: SectionMap,
                                u: BaseVectorField, v: BaseVectorField,
                                x: Point,
                                base_conn: Optional[ConnectionField] = None
                                ) -> np.ndarray:
    """Second covariant derivative nabla^2_uv s = nabla_u(nabla_v s)
    - nabla_{nabla_u v} s for a linear connection.

    ``base_conn`` supplies the connection on the base tangent bundle used
    for nabla_u v; on a tangent-bundle configuration it defaults to the
    connection itself.
    """
    _require_linear(conn, "second_covariant_derivative")
    if base_conn is None:
        if conn.bundle.fibre_dim != conn.bundle.base_dim:
            raise TangentBundleRequiredError(
                "supply base_conn: the bundle is not a tangent-bundle "
                "configuration, so nabla_u v is not defined by conn itself")
        base_conn = conn
    coords = list(x.coords)
    inner = covariant_derivative_section(conn, s, v)
    term1 = _cov_value(conn, inner.fn, u.fn, coords)
    w = base_covariant_derivative(base_conn, u, v)
    term2 = _cov_value(conn, s.fn, w.fn, coords)
    return as_float_array(vec_sub(term1, term2))


def composition_commutator(conn: ConnectionField, s: SectionMap,
                           u: BaseVectorField, v: BaseVectorField,
                           x: Point) -> np.ndarray:
    """(nabla_u nabla_v - nabla_v nabla_u - nabla_[u,v]) s at x, composing
    covariant derivatives as operators on sections (linear connections).

    This is the classical curvature expression on a vector bundle and
    agrees with ``curv_via_lifts``.
    """
    _require_linear(conn, "composition_commutator")
    coords = list(x.coords)
    nab_v_s = covariant_derivative_section(conn, s, v)
    nab_u_s = covariant_derivative_section(conn, s, u)
    t1 = _cov_value(conn, nab_v_s.fn, u.fn, coords)
    t2 = _cov_value(conn, nab_u_s.fn, v.fn, coords)
    w = base_lie_bracket(u, v)
    t3 = _cov_value(conn, s.fn, w.fn, coords)
    return as_float_array(vec_sub(vec_sub(t1, t2), t3))


def torsion(conn: ConnectionField, u: BaseVectorField, v: BaseVectorField,
            x: Point) -> np.ndarray:
    """Torsion nabla_u v - nabla_v u - [u, v] of a connection on TM.

    Antisymmetric; vanishes iff the coefficient is symmetric in its two
    lower slots.
    """
    if conn.bundle.fibre_dim != conn.bundle.base_dim:
        raise TangentBundleRequiredError(
            "torsion needs the tangent-bundle configuration (f = m)")
    coords = list(x.coords)
    a = _cov_value(conn, v.fn, u.fn, coords)   # nabla_u v
    b = _cov_value(conn, u.fn, v.fn, coords)   # nabla_v u
    w = base_lie_bracket(u, v)(coords)
    return as_float_array(vec_sub(vec_sub(a, b), w))


def leibniz_check(conn: ConnectionField, s: SectionMap,
                  scalar_field_on_base: Callable[[Sequence[Scalar]], Scalar],
                  v: BaseVectorField, x: Point) -> float:
    """Residual of nabla_v(f s) = (df . v) s + f nabla_v s at x."""
    _require_linear(conn, "leibniz_check")
    coords = list(x.coords)

    def fs(xp):
        return vec_scale(scalar_field_on_base(xp), s.fn(xp))

    lhs = as_float_array(_cov_value(conn, fs, v.fn, coords))
    df = jacobian(lambda xp: [scalar_field_on_base(xp)], coords)[0]
    vx = as_float_array(v.fn(coords))
    fx = float(scalar_field_on_base(coords))
    rhs = float(df @ vx) * as_float_array(s.fn(coords)) \
        + fx * as_float_array(_cov_value(conn, s.fn, v.fn, coords))
    return float(np.max(np.abs(lhs - rhs)))
