"""Curvature by independent routes, cocurvature, and the linear case.

The curvature oracle is the classical coordinate tensor

    R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb

hand-coded for the round sphere with analytic Christoffel derivatives; the
lift-route operations must reproduce its contraction R^a_bcd y^b u^c v^d.

The commutator route (bracketing the foliation-extended covariant
derivative fields) provably does NOT equal the lift route in general; the
exact relationship is the bilinear expansion

    via_covariant - via_lifts = ([H_v, nabla_u] + [nabla_v, H_u]) o s

which is asserted here to machine precision, together with frozen values
of the defect in cases worked out by hand.
"""

import math

import numpy as np
import pytest

from fibrum import (BaseVectorField, SectionMap, TotalTangent,
                    base_covariant_derivative, cocurvature,
                    compare_curvature_routes, composition_commutator,
                    covariant_derivative, cross_bracket_sum,
                    curv_via_covariant, curv_via_lifts,
                    curv_via_vertical_projection, curvature, horizontal_lift,
                    leibniz_check, lift_rank_check, make_custom_christoffel,
                    make_flat, random_base_field, random_base_point,
                    random_section, random_tangent, random_total_point,
                    second_covariant_derivative, sin,
                    tensoriality_check_curvature, torsion)
from fibrum.errors import (LinearityRequiredError, TangentBundleRequiredError)


# -- independent oracle: classical tensor on the round sphere ---------------

def sphere_R(theta):
    """R[a][b][c][d] with analytic Christoffel derivatives."""
    st, ct = math.sin(theta), math.cos(theta)
    cot = ct / st
    G = np.zeros((2, 2, 2))
    G[0, 1, 1] = -st * ct
    G[1, 0, 1] = cot
    G[1, 1, 0] = cot
    dG = np.zeros((2, 2, 2))  # d/dtheta of G^a_bc (no phi dependence)
    dG[0, 1, 1] = -math.cos(2.0 * theta)
    dG[1, 0, 1] = -1.0 / st ** 2
    dG[1, 1, 0] = -1.0 / st ** 2
    R = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    val = (dG[a, d, b] if c == 0 else 0.0) \
                        - (dG[a, c, b] if d == 0 else 0.0)
                    for e in range(2):
                        val += G[a, c, e] * G[e, d, b] \
                            - G[a, d, e] * G[e, c, b]
                    R[a, b, c, d] = val
    return R


def test_sphere_R_known_components():
    R = sphere_R(1.1)
    assert abs(R[0, 1, 0, 1] - math.sin(1.1) ** 2) < 1e-14  # R^th_ph,th,ph
    assert abs(R[1, 0, 0, 1] - (-1.0)) < 1e-14              # R^ph_th,th,ph


def test_curv_via_lifts_matches_classical_tensor(sphere_conn, rng):
    bundle = sphere_conn.bundle
    for _ in range(25):
        s = random_section(bundle, rng)
        u = random_base_field(bundle, rng)
        v = random_base_field(bundle, rng)
        x = random_base_point(bundle, rng)
        got = curv_via_lifts(sphere_conn, s, u, v, x).fibre_part
        R = sphere_R(x.coords[0])
        y = np.array(s(x), dtype=float)
        uu = np.array(u(list(x.coords)), dtype=float)
        vv = np.array(v(list(x.coords)), dtype=float)
        expect = np.einsum("abcd,b,c,d->a", R, y, uu, vv)
        assert np.max(np.abs(got - expect)) < 1e-11


def test_pointwise_curvature_hand_value(sphere_conn):
    # lifts of the coordinate fields at (pi/3, 0), y = (1, 0)
    e = sphere_conn.bundle.total_point([math.pi / 3, 0.0, 1.0, 0.0])
    X = horizontal_lift(sphere_conn, e, [1.0, 0.0])
    Y = horizontal_lift(sphere_conn, e, [0.0, 1.0])
    val = curvature(sphere_conn, e, X, Y)
    # classical contraction R^a_b,th,ph y^b = (0, -1) at any theta
    assert np.max(np.abs(val.fibre_part - np.array([0.0, -1.0]))) < 1e-12


def test_curvature_flat_vanishes(flat_conn, rng):
    for _ in range(20):
        e = random_total_point(flat_conn.bundle, rng)
        X = random_tangent(flat_conn, e, rng)
        Y = random_tangent(flat_conn, e, rng)
        assert np.max(np.abs(curvature(flat_conn, e, X, Y).fibre_part)) == 0.0


def test_curvature_kills_vertical_argument(any_conn, rng):
    m = any_conn.bundle.base_dim
    f = any_conn.bundle.fibre_dim
    for _ in range(10):
        e = random_total_point(any_conn.bundle, rng)
        vert = TotalTangent(e, np.zeros(m), rng.uniform(-1, 1, f))
        other = random_tangent(any_conn, e, rng)
        assert np.max(np.abs(
            curvature(any_conn, e, vert, other).fibre_part)) < 1e-10
        assert np.max(np.abs(
            curvature(any_conn, e, other, vert).fibre_part)) < 1e-10


def test_curvature_antisymmetric(any_conn, rng):
    for _ in range(10):
        e = random_total_point(any_conn.bundle, rng)
        X = random_tangent(any_conn, e, rng)
        Y = random_tangent(any_conn, e, rng)
        a = curvature(any_conn, e, X, Y).fibre_part
        b = curvature(any_conn, e, Y, X).fibre_part
        assert np.max(np.abs(a + b)) < 1e-10


def test_thm31_internal_identity(any_conn, rng):
    # (H_[u,v] - [H_u, H_v]) o s  vs  -P_V [H_u, H_v] o s
    for _ in range(20):
        s = random_section(any_conn.bundle, rng)
        u = random_base_field(any_conn.bundle, rng)
        v = random_base_field(any_conn.bundle, rng)
        x = random_base_point(any_conn.bundle, rng)
        a = curv_via_lifts(any_conn, s, u, v, x).fibre_part
        b = curv_via_vertical_projection(any_conn, s, u, v, x).fibre_part
        assert np.max(np.abs(a - b)) < 1e-9


def test_curv_via_lifts_antisymmetry_and_equal_fields(any_conn, rng):
    s = random_section(any_conn.bundle, rng)
    u = random_base_field(any_conn.bundle, rng)
    v = random_base_field(any_conn.bundle, rng)
    x = random_base_point(any_conn.bundle, rng)
    auv = curv_via_lifts(any_conn, s, u, v, x).fibre_part
    avu = curv_via_lifts(any_conn, s, v, u, x).fibre_part
    assert np.max(np.abs(auv + avu)) < 1e-10
    assert np.max(np.abs(
        curv_via_lifts(any_conn, s, u, u, x).fibre_part)) < 1e-12


def test_curv_via_lifts_tensorial_in_section(any_conn, rng):
    bundle = any_conn.bundle
    u = random_base_field(bundle, rng)
    v = random_base_field(bundle, rng)
    x = random_base_point(bundle, rng)
    s1 = random_section(bundle, rng)
    sx = [float(c) for c in np.asarray(s1(x), dtype=float)]
    s2 = SectionMap(bundle, lambda c: sx)
    a = curv_via_lifts(any_conn, s1, u, v, x).fibre_part
    b = curv_via_lifts(any_conn, s2, u, v, x).fibre_part
    assert np.max(np.abs(a - b)) < 1e-11


def test_cocurvature_vanishes(any_conn, rng):
    for _ in range(50):
        e = random_total_point(any_conn.bundle, rng)
        X = random_tangent(any_conn, e, rng)
        Y = random_tangent(any_conn, e, rng)
        val = cocurvature(any_conn, e, X, Y)
        assert np.max(np.abs(val.as_vector())) < 1e-10


def test_tensoriality_explicit_extensions(any_conn, rng):
    def poly(coords):
        m = any_conn.bundle.base_dim
        return coords[0] + coords[m] * coords[m]

    for _ in range(10):
        e = random_total_point(any_conn.bundle, rng)
        X = random_tangent(any_conn, e, rng)
        Y = random_tangent(any_conn, e, rng)
        assert tensoriality_check_curvature(any_conn, e, X, Y, poly) < 1e-9
        const = lambda coords: 1.0
        assert tensoriality_check_curvature(any_conn, e, X, Y, const) < 1e-12
        zero = lambda coords: 0.0
        assert tensoriality_check_curvature(any_conn, e, X, Y, zero) < 1e-15


# -- the two routes and their exact relationship ------------------------------

def test_routes_agree_when_cross_terms_vanish(flat_conn, rng):
    # flat coefficients + constant section: both routes are identically zero
    bundle = flat_conn.bundle
    s = SectionMap(bundle, lambda x: [0.3, -0.2])
    for _ in range(10):
        u = random_base_field(bundle, rng)
        v = random_base_field(bundle, rng)
        x = random_base_point(bundle, rng)
        assert np.max(np.abs(
            curv_via_lifts(flat_conn, s, u, v, x).fibre_part)) == 0.0
        assert np.max(np.abs(
            curv_via_covariant(flat_conn, s, u, v, x).fibre_part)) < 1e-15
        assert np.max(np.abs(cross_bracket_sum(flat_conn, s, u, v, x))) < 1e-15


def test_bracket_expansion_identity(any_conn, rng):
    # via_covariant - via_lifts = cross-bracket sum, exactly (bilinearity)
    m = any_conn.bundle.base_dim
    for _ in range(20):
        s = random_section(any_conn.bundle, rng)
        u = random_base_field(any_conn.bundle, rng)
        v = random_base_field(any_conn.bundle, rng)
        x = random_base_point(any_conn.bundle, rng)
        lifts = curv_via_lifts(any_conn, s, u, v, x).fibre_part
        cov = curv_via_covariant(any_conn, s, u, v, x).fibre_part
        cross = cross_bracket_sum(any_conn, s, u, v, x)
        assert np.max(np.abs(cross[:m])) < 1e-12
        assert np.max(np.abs(cov - lifts - cross[m:])) < 1e-12


def test_commutator_route_defect_flat_closed_form(flat_conn, rng):
    # with zero coefficients the commutator route evaluates to
    # -Ds(x) [u, v](x): frozen closed form of the defect
    bundle = flat_conn.bundle
    s = SectionMap(bundle, lambda x: [0.25 * x[0] * x[0], x[0] * x[1]])
    u = BaseVectorField(bundle, lambda x: [1.0, 0.0])
    v = BaseVectorField(bundle, lambda x: [x[0], 0.0])  # [u,v] = (1, 0)
    x = bundle.base_point([0.6, -0.3])
    got = curv_via_covariant(flat_conn, s, u, v, x).fibre_part
    ds = np.array([[0.5 * 0.6, 0.0], [-0.3, 0.6]])
    expect = -ds @ np.array([1.0, 0.0])
    assert np.max(np.abs(got - expect)) < 1e-14


def test_commutator_route_defect_sphere_closed_form(sphere_conn):
    # constant section y=(1,0), coordinate fields: the commutator route
    # gives (0, -cot^2 theta) while the curvature is (0, -1)
    bundle = sphere_conn.bundle
    s = SectionMap(bundle, lambda x: [1.0, 0.0])
    u = BaseVectorField(bundle, lambda x: [1.0, 0.0])
    v = BaseVectorField(bundle, lambda x: [0.0, 1.0])
    for theta in (0.7, math.pi / 3, 2.1):
        x = bundle.base_point([theta, 0.2])
        cov = curv_via_covariant(sphere_conn, s, u, v, x).fibre_part
        cot2 = (math.cos(theta) / math.sin(theta)) ** 2
        assert np.max(np.abs(cov - np.array([0.0, -cot2]))) < 1e-12
        lifts = curv_via_lifts(sphere_conn, s, u, v, x).fibre_part
        assert np.max(np.abs(lifts - np.array([0.0, -1.0]))) < 1e-12


def test_compare_curvature_routes_rows(sphere_conn, rng):
    s = random_section(sphere_conn.bundle, rng)
    u = random_base_field(sphere_conn.bundle, rng)
    v = random_base_field(sphere_conn.bundle, rng)
    samples = [random_base_point(sphere_conn.bundle, rng) for _ in range(5)]
    rows = compare_curvature_routes(sphere_conn, s, u, v, samples)
    assert len(rows) == 5
    for row in rows:
        assert row.residual == pytest.approx(
            float(np.max(np.abs(row.via_covariant - row.via_lifts))))
        cross = cross_bracket_sum(sphere_conn, s, u, v, row.point)
        m = sphere_conn.bundle.base_dim
        assert row.cross_residual == pytest.approx(
            float(np.max(np.abs(cross))), abs=1e-15)
        # the defect IS the cross sum
        assert np.max(np.abs(row.via_covariant - row.via_lifts
                             - cross[m:])) < 1e-12


def test_extension_offset_shift_does_not_move_commutator_route(any_conn, rng):
    f = any_conn.bundle.fibre_dim
    for _ in range(10):
        s = random_section(any_conn.bundle, rng)
        u = random_base_field(any_conn.bundle, rng)
        v = random_base_field(any_conn.bundle, rng)
        x = random_base_point(any_conn.bundle, rng)
        base = curv_via_covariant(any_conn, s, u, v, x).fibre_part
        pert = curv_via_covariant(any_conn, s, u, v, x,
                                  offset_shift=rng.uniform(-0.2, 0.2, f))
        assert np.max(np.abs(base - pert.fibre_part)) < 1e-12


def test_second_order_required_error(flat_conn):
    # an evaluator that breaks under derivative-carrying input surfaces as
    # the dedicated second-order error when the commutator route needs it
    import math as pymath
    from fibrum.errors import SecondOrderUnavailableError
    bundle = flat_conn.bundle
    bad = SectionMap(bundle, lambda x: [pymath.sin(x[0]), 0.0])  # not closed
    u = BaseVectorField(bundle, lambda x: [1.0, 0.0])
    v = BaseVectorField(bundle, lambda x: [0.0, 1.0])
    x = bundle.base_point([0.1, 0.2])
    with pytest.raises(SecondOrderUnavailableError):
        curv_via_covariant(flat_conn, bad, u, v, x)


# -- linear specialization (compositions, torsion, Leibniz) -------------------

def test_composition_commutator_equals_curvature(sphere_conn, rng):
    bundle = sphere_conn.bundle
    for _ in range(10):
        s = random_section(bundle, rng)
        u = random_base_field(bundle, rng)
        v = random_base_field(bundle, rng)
        x = random_base_point(bundle, rng)
        comp = composition_commutator(sphere_conn, s, u, v, x)
        lifts = curv_via_lifts(sphere_conn, s, u, v, x).fibre_part
        assert np.max(np.abs(comp - lifts)) < 1e-8


def test_second_covariant_torsion_form(sphere_conn, rng):
    bundle = sphere_conn.bundle
    for _ in range(10):
        s = random_section(bundle, rng)
        u = random_base_field(bundle, rng)
        v = random_base_field(bundle, rng)
        x = random_base_point(bundle, rng)
        d2uv = second_covariant_derivative(sphere_conn, s, u, v, x)
        d2vu = second_covariant_derivative(sphere_conn, s, v, u, x)
        tors = torsion(sphere_conn, u, v, x)
        w = BaseVectorField(bundle, lambda c, _t=tors: list(_t))
        nt = covariant_derivative(sphere_conn, s, w, x)
        lifts = curv_via_lifts(sphere_conn, s, u, v, x).fibre_part
        assert np.max(np.abs(d2uv - d2vu + nt - lifts)) < 1e-8


def test_second_covariant_symmetric_slot(sphere_conn, rng):
    # u = v: the curvature contribution cancels and the two orders agree
    bundle = sphere_conn.bundle
    s = random_section(bundle, rng)
    u = random_base_field(bundle, rng)
    x = random_base_point(bundle, rng)
    d2 = second_covariant_derivative(sphere_conn, s, u, u, x)
    assert np.max(np.abs(
        curv_via_lifts(sphere_conn, s, u, u, x).fibre_part)) < 1e-12
    assert np.all(np.isfinite(d2))


def test_sphere_torsion_free(sphere_conn, rng):
    for _ in range(10):
        u = random_base_field(sphere_conn.bundle, rng)
        v = random_base_field(sphere_conn.bundle, rng)
        x = random_base_point(sphere_conn.bundle, rng)
        assert np.max(np.abs(torsion(sphere_conn, u, v, x))) < 1e-12


def test_torsion_asymmetric_hand_value():
    # G^1_12 = 1, all others zero; constant coordinate fields:
    # T^a = G^a_bc u^b v^c - G^a_cb u^b v^c -> T = (1, 0)
    conn = make_custom_christoffel({"G_1_12": 1.0})
    bundle = conn.bundle
    u = BaseVectorField(bundle, lambda x: [1.0, 0.0])
    v = BaseVectorField(bundle, lambda x: [0.0, 1.0])
    x = bundle.base_point([0.3, -0.4])
    t = torsion(conn, u, v, x)
    assert np.max(np.abs(t - np.array([1.0, 0.0]))) < 1e-14
    assert np.max(np.abs(torsion(conn, v, u, x) + t)) < 1e-14
    assert np.max(np.abs(torsion(conn, u, u, x))) == 0.0


def test_torsion_requires_tangent_configuration(nonlinear_conn, rng):
    u = random_base_field(nonlinear_conn.bundle, rng)
    x = random_base_point(nonlinear_conn.bundle, rng)
    with pytest.raises(TangentBundleRequiredError):
        torsion(nonlinear_conn, u, u, x)


def test_linear_gates_reject_nonlinear(nonlinear_conn, rng):
    bundle = nonlinear_conn.bundle
    s = random_section(bundle, rng)
    u = random_base_field(bundle, rng)
    x = random_base_point(bundle, rng)
    with pytest.raises(LinearityRequiredError):
        second_covariant_derivative(nonlinear_conn, s, u, u, x)
    with pytest.raises(LinearityRequiredError):
        leibniz_check(nonlinear_conn, s, lambda c: 1.0, u, x)


def test_leibniz_rule(sphere_conn, rng):
    bundle = sphere_conn.bundle
    for _ in range(10):
        s = random_section(bundle, rng)
        v = random_base_field(bundle, rng)
        x = random_base_point(bundle, rng)
        assert leibniz_check(sphere_conn, s, lambda c: sin(c[0]), v, x) < 1e-10
        assert leibniz_check(sphere_conn, s, lambda c: 1.0, v, x) < 1e-14
        assert leibniz_check(sphere_conn, s, lambda c: 2.5, v, x) < 1e-14


def test_base_covariant_derivative_classical(sphere_conn):
    # nabla_{d_theta} d_phi on the round sphere = cot(theta) d_phi
    bundle = sphere_conn.bundle
    u = BaseVectorField(bundle, lambda x: [1.0, 0.0])
    v = BaseVectorField(bundle, lambda x: [0.0, 1.0])
    w = base_covariant_derivative(sphere_conn, u, v)
    theta = 1.2
    got = np.array(w([theta, 0.5]), dtype=float)
    assert np.max(np.abs(got - np.array([0.0, math.cos(theta)
                                         / math.sin(theta)]))) < 1e-14
