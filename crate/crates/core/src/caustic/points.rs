//! Distinguished points: the self-intersections `E` of the surface-caustic
//! curves, the coordinate-plane intersection points `F`…`K`, and the two
//! caustic vertices on the axis.

use serde::{Serialize, Serializer};

use super::curves::{intersection_curve_point, intersection_domain, plane_curve_point, PlaneCurve};
use super::nodal::nodal_parametrization;
use super::Sheet;
use crate::geometry::{Paraboloid, SpacePoint};
use crate::scalar::{lit, Real, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    E1,
    E2,
    E3,
    E4,
    F1,
    F2,
    G1,
    G2,
    H1,
    H2,
    I1,
    I2,
    J1,
    J2,
    K1,
    K2,
    Vb,
    Va,
}

impl Label {
    pub fn name(self) -> &'static str {
        use Label::*;
        match self {
            E1 => "E1",
            E2 => "E2",
            E3 => "E3",
            E4 => "E4",
            F1 => "F1",
            F2 => "F2",
            G1 => "G1",
            G2 => "G2",
            H1 => "H1",
            H2 => "H2",
            I1 => "I1",
            I2 => "I2",
            J1 => "J1",
            J2 => "J2",
            K1 => "K1",
            K2 => "K2",
            Vb => "V_b",
            Va => "V_a",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Real,
    NotReal,
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NamedPoint<T> {
    pub label: Label,
    /// Present exactly when `status` is real.
    pub position: Option<SpacePoint<T>>,
    pub status: Status,
}

impl<T: Real> NamedPoint<T> {
    fn real(label: Label, x: T, y: T, z: T) -> Self {
        NamedPoint {
            label,
            position: Some(SpacePoint { x, y, z }),
            status: Status::Real,
        }
    }

    fn missing(label: Label, status: Status) -> Self {
        NamedPoint {
            label,
            position: None,
            status,
        }
    }
}

/// Relative band for the borderline pairs `b = 2a` and `b = 3a`.
fn band<T: Real>() -> T {
    T::epsilon() * lit(1e3)
}

/// `3a ≤ b` up to rounding.
pub fn e_points_real<T: Real>(p: &Paraboloid<T>) -> bool {
    lit::<T>(3.0) * p.a() <= p.b() * (T::one() + band::<T>())
}

/// `E1 = (x, y)`, `E2 = (−x, −y)`, `E3 = (x, −y)`, `E4 = (−x, y)`.
pub fn e_points<T: Real>(p: &Paraboloid<T>) -> [NamedPoint<T>; 4] {
    use Label::*;
    let labels = [E1, E2, E3, E4];
    if !e_points_real(p) {
        return labels.map(|l| NamedPoint::missing(l, Status::NotReal));
    }
    let (a, b) = (p.a(), p.b());
    let r8 = lit::<T>(8.0).sqrt();
    let s2 = (a + b) * (a + b);
    let three = lit::<T>(3.0);
    let x = (r8 * (b - a) * (b - three * a) / (a * s2)).max(T::zero());
    let y = r8 * (b - a) * (three * b - a) / (b * s2);
    let z = lit::<T>(4.0) * (a - b) * (a - b) / (a * b * (a + b));
    let signs = [
        (Sign::Plus, Sign::Plus),
        (Sign::Minus, Sign::Minus),
        (Sign::Plus, Sign::Minus),
        (Sign::Minus, Sign::Plus),
    ];
    let mut out = labels.map(|l| NamedPoint::missing(l, Status::NotReal));
    for (o, (sx, sy)) in out.iter_mut().zip(signs) {
        *o = NamedPoint::real(o.label, sx.apply(x), sy.apply(y), z);
    }
    out
}

/// The coordinate-plane points, the two axis vertices, then `E1..E4`.
pub fn special_points<T: Real>(p: &Paraboloid<T>) -> Vec<NamedPoint<T>> {
    use Label::*;
    let (a, b) = (p.a(), p.b());
    let two = lit::<T>(2.0);
    let r8 = lit::<T>(8.0).sqrt();
    let zero = T::zero();
    let mut out = Vec::with_capacity(22);

    let fy = r8 / b;
    out.push(NamedPoint::real(F1, zero, fy, lit::<T>(4.0) / b));
    out.push(NamedPoint::real(F2, zero, -fy, lit::<T>(4.0) / b));

    let gap = b - two * a;
    if gap.abs() <= band::<T>() * b {
        out.push(NamedPoint::missing(G1, Status::Infinite));
        out.push(NamedPoint::missing(G2, Status::Infinite));
    } else if gap < zero {
        out.push(NamedPoint::missing(G1, Status::NotReal));
        out.push(NamedPoint::missing(G2, Status::NotReal));
    } else {
        let d2 = (a - b) * (a - b);
        let gy = (two * d2 / (a * b * b * gap)).sqrt();
        let gz = d2 / (a * b * gap);
        out.push(NamedPoint::real(G1, zero, gy, gz));
        out.push(NamedPoint::real(G2, zero, -gy, gz));
    }

    let hy = ((b - a).powi(3) / (a.powi(3) * b * b)).sqrt();
    let hz = (lit::<T>(3.0) * b - a) / (two * a * b);
    out.push(NamedPoint::real(H1, zero, hy, hz));
    out.push(NamedPoint::real(H2, zero, -hy, hz));

    let ix = r8 / a;
    out.push(NamedPoint::real(I1, ix, zero, lit::<T>(4.0) / a));
    out.push(NamedPoint::real(I2, -ix, zero, lit::<T>(4.0) / a));

    out.push(NamedPoint::missing(J1, Status::NotReal));
    out.push(NamedPoint::missing(J2, Status::NotReal));

    let kx = (lit::<T>(8.0) * (b - a).powi(3) / (a * a * b.powi(3))).sqrt();
    let kz = (lit::<T>(4.0) * b - lit::<T>(3.0) * a) / (a * b);
    out.push(NamedPoint::real(K1, kx, zero, kz));
    out.push(NamedPoint::real(K2, -kx, zero, kz));

    out.push(NamedPoint::real(Vb, zero, zero, b.recip()));
    out.push(NamedPoint::real(Va, zero, zero, a.recip()));

    out.extend(e_points(p));
    out
}

pub fn find_point<T: Real>(points: &[NamedPoint<T>], label: Label) -> Option<NamedPoint<T>> {
    points.iter().find(|n| n.label == label).copied()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    On,
    Below,
}

/// How the two `x = 0` caustic sections meet at `H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangencyReport<T> {
    /// Largest distance between `H` and either section at its `H` parameter.
    pub meet_gap: T,
    /// `|t₁ × t₂|` of the unit tangents there.
    pub tangent_cross: T,
    /// `z − (a x² + b y²)/2` at `H`.
    pub height_above_surface: T,
    pub side: Side,
}

pub fn h_tangency_check<T: Real>(p: &Paraboloid<T>) -> TangencyReport<T> {
    let a = p.a();
    let h = find_point(&special_points(p), Label::H1).and_then(|n| n.position).unwrap();
    let t = -a.recip();
    let curves = [PlaneCurve::SemicubicalYz, PlaneCurve::ParabolaYz];
    let mut gap = T::zero();
    let mut tangents = [[T::zero(); 2]; 2];
    for (k, c) in curves.into_iter().enumerate() {
        let q = plane_curve_point(p, c, t, Sign::Plus).unwrap();
        gap = gap.max(q.dist(h));
        // Central difference of (y, z) along the parameter.
        let dt = lit::<T>(1e-5) * (T::one() + t.abs());
        let lo = plane_curve_point(p, c, t - dt, Sign::Plus).unwrap();
        let hi = plane_curve_point(p, c, (t + dt).min(c.t_max(p)), Sign::Plus).unwrap();
        let (dy, dz) = (hi.y - lo.y, hi.z - lo.z);
        let len = (dy * dy + dz * dz).sqrt();
        tangents[k] = [dy / len, dz / len];
    }
    let cross = (tangents[0][0] * tangents[1][1] - tangents[0][1] * tangents[1][0]).abs();
    let above = h.z - p.height(h.x, h.y);
    let tol = lit::<T>(1e3) * T::epsilon() * (T::one() + h.z.abs());
    let side = if above > tol {
        Side::Above
    } else if above < -tol {
        Side::Below
    } else {
        Side::On
    };
    TangencyReport {
        meet_gap: gap,
        tangent_cross: cross,
        height_above_surface: above,
        side,
    }
}

/// One sign choice of the sheet-2 parameter of `E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct S0Branch<T> {
    pub s0: T,
    /// Distance from the sheet-2 intersection curve at `s0` to `E1`.
    pub gap_to_e: T,
    /// Whether `s0` lies on the in-rectangle part of the sheet-2 curve;
    /// otherwise `−s0` lies on the sheet-1 curve.
    pub on_sheet_two: bool,
}

/// Evaluates both roots `s₀`; `None` when `E` is not real.
pub fn s0_branches<T: Real>(p: &Paraboloid<T>) -> Option<[S0Branch<T>; 2]> {
    let pair = nodal_parametrization(p).s0_pair?;
    let e = e_points(p)[0].position?;
    let dom = intersection_domain(p, Sheet::Two, T::infinity());
    let tol = lit::<T>(1e-9) * (T::one() + p.a().recip());
    Some(pair.map(|s0| {
        let gap = intersection_curve_point(p, Sheet::Two, s0, Sign::Plus, Sign::Plus)
            .map_or(T::infinity(), |q| q.dist(e));
        S0Branch {
            s0,
            gap_to_e: gap,
            on_sheet_two: dom.iter().any(|d| s0 >= d.lo - tol && s0 <= d.hi + tol),
        }
    }))
}
