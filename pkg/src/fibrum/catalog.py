"""Built-in bundles/connections and seeded random test data.

Catalog contents:

* ``flat``          -- gamma = 0 on any dimensions; everything trivial.
* ``sphere``        -- tangent bundle of the unit round sphere in polar
                       coordinates, Levi-Civita Christoffels, with a polar
                       collar excluded (cot(theta) blows up at the poles).
* ``nonlinear-demo``-- f = 1 coefficient genuinely nonlinear in the fibre
                       coordinate, exercising the general (non-vector-bundle)
                       machinery.
* ``tm-custom-christoffel`` -- tangent-bundle configuration with user-given
                       constant or degree-one polynomial Christoffels.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .bundle import (BaseVectorField, Box, Point, SectionMap,
                     TotalTangent, TrivializedBundle)
from .calculus import cos, float_value, sin
from .connection import ConnectionField, ConnectionKind
from .errors import ConfigError, DomainError

SPHERE_COLLAR = 0.2
SPHERE_PHI_SLACK = 0.2  # widen past one period so closed loops stay inside


def make_flat(m: int = 2, f: int = 2, base_half: float = 2.0,
              fibre_half: float = 2.0) -> ConnectionField:
    bundle = TrivializedBundle(
        name="flat",
        base_box=Box((-base_half,) * m, (base_half,) * m),
        fibre_box=Box((-fibre_half,) * f, (fibre_half,) * f),
    )
    return ConnectionField(bundle, lambda x, y, v: [0.0] * f,
                           ConnectionKind.LINEAR)


def sphere_christoffels(x: Sequence) -> dict[tuple[int, int, int], object]:
    """Nonzero round-metric Christoffels G^a_bc at x = (theta, phi)."""
    th = x[0]
    cot = cos(th) / sin(th)
    return {
        (0, 1, 1): -sin(th) * cos(th),  # G^theta_phi,phi
        (1, 0, 1): cot,                 # G^phi_theta,phi
        (1, 1, 0): cot,                 # G^phi_phi,theta
    }


def make_sphere(fibre_half: float = 4.0) -> ConnectionField:
    lo = SPHERE_COLLAR
    hi = math.pi - SPHERE_COLLAR
    phi_half = math.pi + SPHERE_PHI_SLACK
    bundle = TrivializedBundle(
        name="sphere",
        base_box=Box((lo, -phi_half), (hi, phi_half)),
        fibre_box=Box((-fibre_half, -fibre_half), (fibre_half, fibre_half)),
        base_periods=(None, 2.0 * math.pi),
    )

    def gamma(x, y, v):
        g = sphere_christoffels(x)
        out = []
        for a in range(2):
            acc = 0.0
            for (aa, b, c), coeff in g.items():
                if aa == a:
                    acc = acc + coeff * v[b] * y[c]
            out.append(acc)
        return out

    return ConnectionField(bundle, gamma, ConnectionKind.LINEAR)


def make_nonlinear_demo(base_half: float = 1.0,
                        fibre_half: float = 1.5) -> ConnectionField:
    bundle = TrivializedBundle(
        name="nonlinear-demo",
        base_box=Box((-base_half, -base_half), (base_half, base_half)),
        fibre_box=Box((-fibre_half,), (fibre_half,)),
    )

    def gamma(x, y, v):
        yy = y[0]
        return [(yy + yy ** 3) * v[0] + x[0] * yy * v[1]]

    return ConnectionField(bundle, gamma, ConnectionKind.NONLINEAR)


def _parse_christoffel_key(key: str, m: int):
    """Parse 'G_a_bc' or 'G_a_bc_xk' (1-based indices) into tensor slots."""
    parts = key.split("_")
    ok = (len(parts) in (3, 4) and parts[0] == "G" and len(parts[1]) == 1
          and len(parts[2]) == 2)
    if not ok:
        raise ConfigError(f"malformed Christoffel coefficient '{key}'", field=key)
    try:
        a = int(parts[1]) - 1
        b = int(parts[2][0]) - 1
        c = int(parts[2][1]) - 1
        k = None
        if len(parts) == 4:
            if not parts[3].startswith("x"):
                raise ValueError
            k = int(parts[3][1:]) - 1
    except ValueError:
        raise ConfigError(f"malformed Christoffel coefficient '{key}'", field=key)
    for idx in (a, b, c) + ((k,) if k is not None else ()):
        if not 0 <= idx < m:
            raise ConfigError(f"index out of range in '{key}' for m={m}", field=key)
    return a, b, c, k


def make_custom_christoffel(coeffs: dict[str, float], m: int = 2,
                            base_half: float = 2.0,
                            fibre_half: float = 2.0) -> ConnectionField:
    """Tangent-bundle connection with Christoffels
    G^a_bc(x) = const + sum_k slope_k * x_k, all read from ``coeffs``."""
    const: dict[tuple[int, int, int], float] = {}
    slope: dict[tuple[int, int, int, int], float] = {}
    for key, val in coeffs.items():
        a, b, c, k = _parse_christoffel_key(key, m)
        if k is None:
            const[(a, b, c)] = float(val)
        else:
            slope[(a, b, c, k)] = float(val)

    bundle = TrivializedBundle(
        name="tm-custom-christoffel",
        base_box=Box((-base_half,) * m, (base_half,) * m),
        fibre_box=Box((-fibre_half,) * m, (fibre_half,) * m),
    )

    def gamma(x, y, v):
        out = []
        for a in range(m):
            acc = 0.0
            for b in range(m):
                for c in range(m):
                    g = const.get((a, b, c), 0.0)
                    for k in range(m):
                        sl = slope.get((a, b, c, k), 0.0)
                        if sl != 0.0:
                            g = g + sl * x[k]
                    if not (isinstance(g, float) and g == 0.0):
                        acc = acc + g * v[b] * y[c]
            out.append(acc)
        return out

    return ConnectionField(bundle, gamma, ConnectionKind.LINEAR)


CATALOG: dict[str, dict] = {
    "flat": {
        "builder": make_flat,
        "params": ["m", "f", "base_half", "fibre_half"],
        "description": "zero coefficient on an (m+f)-dimensional chart",
    },
    "sphere": {
        "builder": make_sphere,
        "params": ["fibre_half"],
        "description": "tangent bundle of the unit round sphere, polar chart "
                       f"with collar {SPHERE_COLLAR} excluded at both poles",
    },
    "nonlinear-demo": {
        "builder": make_nonlinear_demo,
        "params": ["base_half", "fibre_half"],
        "description": "scalar-fibre coefficient (y + y^3, x1*y), nonlinear "
                       "in the fibre coordinate",
    },
    "tm-custom-christoffel": {
        "builder": make_custom_christoffel,
        "params": ["m", "base_half", "fibre_half", "G_a_bc[_xk]..."],
        "description": "tangent-bundle chart with user-supplied constant or "
                       "degree-one Christoffel coefficients",
    },
}


def build_connection(name: str, params: dict | None = None) -> ConnectionField:
    if name not in CATALOG:
        raise ConfigError(f"unknown bundle '{name}'; catalog has "
                          f"{sorted(CATALOG)}", field="bundle_name")
    params = dict(params or {})
    if name == "tm-custom-christoffel":
        coeffs = {k: v for k, v in params.items() if k.startswith("G_")}
        rest = {k: v for k, v in params.items() if not k.startswith("G_")}
        _check_params(name, rest, {"m", "base_half", "fibre_half"})
        if "m" in rest:
            rest["m"] = int(rest["m"])
        return make_custom_christoffel(coeffs, **rest)
    allowed = {"flat": {"m", "f", "base_half", "fibre_half"},
               "sphere": {"fibre_half"},
               "nonlinear-demo": {"base_half", "fibre_half"}}[name]
    _check_params(name, params, allowed)
    for key in ("m", "f"):
        if key in params:
            params[key] = int(params[key])
    return CATALOG[name]["builder"](**params)


def _check_params(name: str, params: dict, allowed: set):
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown bundle_params {sorted(unknown)} for "
                          f"'{name}'", field="bundle_params")


# -- seeded random test data -------------------------------------------------

def random_base_point(bundle: TrivializedBundle,
                      rng: np.random.Generator) -> Point:
    return bundle.base_point(bundle.base_box.sample(rng))


def random_total_point(bundle: TrivializedBundle,
                       rng: np.random.Generator) -> Point:
    x = bundle.base_box.sample(rng)
    y = bundle.fibre_box.sample(rng)
    return bundle.total_point(np.concatenate([x, y]))


def _sin_combination(rng: np.random.Generator, n_inputs: int, constant_scale: float,
                     wave_scale: float):
    c0 = rng.uniform(-constant_scale, constant_scale)
    amps = rng.uniform(-wave_scale, wave_scale, size=n_inputs)
    freqs = rng.uniform(0.5, 1.5, size=n_inputs)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=n_inputs)

    def fn(coords):
        acc = c0
        for j in range(n_inputs):
            acc = acc + amps[j] * sin(freqs[j] * coords[j] + phases[j])
        return acc

    return fn


def random_section(bundle: TrivializedBundle, rng: np.random.Generator,
                   flatness: float = 1.0) -> SectionMap:
    """Random smooth section whose graph stays well inside the fibre box.

    ``flatness`` scales the wavy part down towards a constant section.
    """
    lo = np.asarray(bundle.fibre_box.lower)
    hi = np.asarray(bundle.fibre_box.upper)
    half = 0.5 * (hi - lo)
    centre = 0.5 * (hi + lo)
    comps = []
    for i in range(bundle.fibre_dim):
        comps.append(_sin_combination(rng, bundle.base_dim,
                                      constant_scale=0.45 * half[i],
                                      wave_scale=0.15 * half[i] * flatness))

    def fn(x):
        return [centre[i] + comps[i](x) for i in range(len(comps))]

    return SectionMap(bundle, fn)


def random_base_field(bundle: TrivializedBundle,
                      rng: np.random.Generator) -> BaseVectorField:
    comps = [_sin_combination(rng, bundle.base_dim, 0.8, 0.5)
             for _ in range(bundle.base_dim)]
    return BaseVectorField(bundle, lambda x: [c(x) for c in comps])


def random_total_scalar_field(bundle: TrivializedBundle,
                              rng: np.random.Generator):
    """Random smooth scalar evaluator on the total space."""
    return _sin_combination(rng, bundle.total_dim, 1.0, 0.6)


def random_base_scalar_field(bundle: TrivializedBundle,
                             rng: np.random.Generator):
    return _sin_combination(rng, bundle.base_dim, 1.0, 0.6)


def random_tangent(conn: ConnectionField, e: Point,
                   rng: np.random.Generator) -> TotalTangent:
    m, f = conn.bundle.base_dim, conn.bundle.fibre_dim
    return TotalTangent(e, rng.uniform(-1.0, 1.0, size=m),
                        rng.uniform(-1.0, 1.0, size=f))


# -- standard curves ----------------------------------------------------------

def segment_curve(bundle: TrivializedBundle, p: Sequence[float],
                  q: Sequence[float], t0: float = 0.0,
                  t1: float = 1.0):
    """Straight coordinate segment from p to q."""
    from .transport import CurveOnBase
    p = [float(c) for c in p]
    q = [float(c) for c in q]

    def fn(t):
        lam = (t - t0) / (t1 - t0)
        return [pi + lam * (qi - pi) for pi, qi in zip(p, q)]

    return CurveOnBase(bundle, fn, t0, t1)


def reversed_curve(curve):
    """The same image traversed backwards."""
    from .transport import CurveOnBase
    t0, t1 = curve.t0, curve.t1
    return CurveOnBase(curve.bundle,
                       lambda t: curve.fn(t0 + t1 - t), t0, t1)


def latitude_loop(bundle: TrivializedBundle, theta0: float,
                  t0: float = 0.0, t1: float = 2.0 * math.pi):
    """One full traversal of the latitude circle theta = theta0 on the
    sphere chart, at unit coordinate speed in phi; closed modulo the
    declared polar-angle period."""
    from .transport import CurveOnBase
    theta0 = float(theta0)

    def fn(t):
        lam = (t - t0) / (t1 - t0)
        return [theta0, -math.pi + 2.0 * math.pi * lam]

    return CurveOnBase(bundle, fn, t0, t1)


def circle_loop(bundle: TrivializedBundle, center: Sequence[float],
                radius: float, t0: float = 0.0, t1: float = 1.0):
    """Closed planar circle in the first two base coordinates."""
    from .transport import CurveOnBase
    if bundle.base_dim != 2:
        raise DomainError("circle_loop expects a two-dimensional base")
    cx, cy = float(center[0]), float(center[1])
    r = float(radius)

    def fn(t):
        ang = 2.0 * math.pi * (t - t0) / (t1 - t0)
        return [cx + r * cos(ang), cy + r * sin(ang)]

    return CurveOnBase(bundle, fn, t0, t1)


# -- sphere-specific helpers (round metric) ----------------------------------

def sphere_metric(x: Sequence[float]) -> np.ndarray:
    """Round metric in polar coordinates: diag(1, sin^2 theta)."""
    th = float_value(x[0])
    return np.diag([1.0, math.sin(th) ** 2])


def sphere_angle_between(x: Sequence[float], a: Sequence[float],
                         b: Sequence[float]) -> float:
    """Unsigned angle between tangent vectors w.r.t. the round metric."""
    g = sphere_metric(x)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = math.sqrt(a @ g @ a)
    nb = math.sqrt(b @ g @ b)
    c = (a @ g @ b) / (na * nb)
    return math.acos(max(-1.0, min(1.0, c)))


def sphere_latitude_gb_angle(conn: ConnectionField, theta0: float,
                             nodes: int = 801) -> float:
    """Holonomy angle of a latitude loop via the boundary form of the
    area theorem: 2*pi minus the total geodesic-curvature turning.

    Cap-area quadrature of the curvature itself would need the excluded
    polar collar, so the equivalent boundary line integral is used; the
    geodesic curvature comes from ``covariant_derivative_along_curve`` and
    the round metric, a code path independent of the transport integrator.
    """
    from .transport import covariant_derivative_along_curve
    loop = latitude_loop(conn.bundle, theta0)

    def velocity(t):
        from .calculus import derivative
        return derivative(loop.fn, t)

    def integrand(t: float) -> float:
        x = loop.point_at(t)
        tvec = loop.velocity(t)
        nab = covariant_derivative_along_curve(conn, loop, velocity, t)
        g = sphere_metric(x)
        speed = math.sqrt(tvec @ g @ tvec)
        # inward unit normal for a latitude traversed with increasing phi:
        # minus the theta direction (unit length in the round metric)
        n_hat = np.array([-1.0, 0.0])
        return float(nab @ g @ n_hat) / speed

    if nodes % 2 == 0:
        nodes += 1
    ts = np.linspace(loop.t0, loop.t1, nodes)
    vals = np.array([integrand(t) for t in ts])
    h = (loop.t1 - loop.t0) / (nodes - 1)
    simpson = (h / 3.0) * (vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum()
                           + 2.0 * vals[2:-1:2].sum())
    return 2.0 * math.pi - simpson
