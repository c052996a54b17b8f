//! Curves where the paraboloid meets each caustic sheet, and the sections
//! of the paraboloid and the caustic by the planes `x = 0` and `y = 0`.

use serde::Serialize;

use super::domain::{scan_domain, Interval};
use super::{Sheet, SheetCoords};
use crate::error::{Error, Result};
use crate::geometry::{domain as domain_err, radicand_tol, Paraboloid, SpacePoint};
use crate::scalar::{clamped_sqrt, lit, Real, Sign};

const SCAN: usize = 2048;

/// `(x², y², z)` of the paraboloid/sheet intersection at parameter `t`.
///
/// Sheet 1 uses `t = v₁` with `u₁ = t/((a+b)t+3)`; sheet 2 uses `s = u₂`
/// with `v₂ = −s/((a+b)s−3)`. The two forms agree under `s = −t`.
pub fn intersection_radicands<T: Real>(p: &Paraboloid<T>, sheet: Sheet, t: T) -> Result<(T, T, T)> {
    let (a, b) = (p.a(), p.b());
    let three = lit::<T>(3.0);
    let ab = a * b;
    let (den, w) = match sheet {
        Sheet::One => ((a + b) * t + three, t),
        Sheet::Two => ((a + b) * t - three, -t),
    };
    if den.abs() <= T::epsilon() * lit(16.0) * (T::one() + ((a + b) * t).abs()) {
        return Err(Error::Pole(t.to_f64().unwrap_or(f64::NAN)));
    }
    // Written in terms of w = v₁ so both sheets share one expression;
    // den flips sign together with w.
    let d = match sheet {
        Sheet::One => den,
        Sheet::Two => -den,
    };
    let x2 = b * (b * w + three) * (a * w + T::one()).powi(3) / (a * a * (a - b) * d);
    let y2 = -a * (a * w + three) * (b * w + T::one()).powi(3) / (b * b * (a - b) * d);
    let quad = three * ab * (a + b) * w * w + (a * a + lit::<T>(10.0) * ab + b * b) * w + three * (a + b);
    let z = -quad / (lit::<T>(2.0) * ab * d);
    Ok((x2, y2, z))
}

/// Sheet parameters of the intersection point at `t`.
pub fn intersection_sheet_coords<T: Real>(p: &Paraboloid<T>, sheet: Sheet, t: T) -> SheetCoords<T> {
    let three = lit::<T>(3.0);
    let s = p.a() + p.b();
    match sheet {
        Sheet::One => SheetCoords::new(sheet, t / (s * t + three), t),
        Sheet::Two => SheetCoords::new(sheet, t, -t / (s * t - three)),
    }
}

pub fn intersection_curve_point<T: Real>(
    p: &Paraboloid<T>,
    sheet: Sheet,
    t: T,
    sx: Sign,
    sy: Sign,
) -> Result<SpacePoint<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("curve parameter"));
    }
    let (x2, y2, z) = intersection_radicands(p, sheet, t)?;
    let tol = radicand_tol(z.abs() * p.b());
    let x = clamped_sqrt(x2, tol).ok_or_else(|| domain_err("intersection x radicand", x2))?;
    let y = clamped_sqrt(y2, tol).ok_or_else(|| domain_err("intersection y radicand", y2))?;
    SpacePoint::new(sx.apply(x), sy.apply(y), z)
}

/// Parameter intervals on which the intersection curve of `sheet` is real,
/// has sheet parameters inside the rectangle, and stays below `z_max`
/// (pass `∞` for the unbounded domain). Empty for sheet 1 when `b ≤ 2a`.
pub fn intersection_domain<T: Real>(p: &Paraboloid<T>, sheet: Sheet, z_max: T) -> Vec<Interval<T>> {
    let (ia, ib) = (p.a().recip(), p.b().recip());
    let tol = lit::<T>(1e3) * T::epsilon();
    let inside = |t: T| {
        let Ok((x2, y2, z)) = intersection_radicands(p, sheet, t) else {
            return false;
        };
        x2 >= T::zero()
            && y2 >= T::zero()
            && z <= z_max
            && z.is_finite()
            && intersection_sheet_coords(p, sheet, t).in_rectangle(p, tol * (T::one() + t.abs()))
    };
    let (lo, hi) = match sheet {
        Sheet::One => (-ia, -ib),
        Sheet::Two => (ia, lit::<T>(8.0) * ia),
    };
    scan_domain(lo, hi, SCAN, inside)
}

/// Sections of the paraboloid and of the caustic by the coordinate planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneCurve {
    /// Paraboloid in `x = 0`.
    ParaboloidYz,
    /// Paraboloid in `y = 0`.
    ParaboloidXz,
    /// Semicubical caustic section in `x = 0`, vertex `1/b`.
    SemicubicalYz,
    /// Parabolic caustic section in `x = 0`, vertex `1/a`.
    ParabolaYz,
    /// Semicubical caustic section in `y = 0`, vertex `1/a`.
    SemicubicalXz,
    /// Parabolic caustic section in `y = 0`, vertex `1/b`.
    ParabolaXz,
}

impl PlaneCurve {
    pub const ALL: [PlaneCurve; 6] = [
        PlaneCurve::ParaboloidYz,
        PlaneCurve::ParaboloidXz,
        PlaneCurve::SemicubicalYz,
        PlaneCurve::ParabolaYz,
        PlaneCurve::SemicubicalXz,
        PlaneCurve::ParabolaXz,
    ];

    /// Numeric identifier used on the command line and in exports.
    pub fn id(self) -> u8 {
        14 + Self::ALL.iter().position(|&c| c == self).unwrap() as u8
    }

    pub fn from_id(id: u8) -> Option<PlaneCurve> {
        id.checked_sub(14).and_then(|i| Self::ALL.get(i as usize).copied())
    }

    /// True for the section lying in the plane `x = 0`.
    pub fn in_yz(self) -> bool {
        matches!(
            self,
            PlaneCurve::ParaboloidYz | PlaneCurve::SemicubicalYz | PlaneCurve::ParabolaYz
        )
    }

    pub fn on_paraboloid(self) -> bool {
        matches!(self, PlaneCurve::ParaboloidYz | PlaneCurve::ParaboloidXz)
    }

    /// Largest admissible parameter: `−1/b` in `x = 0`, `−1/a` in `y = 0`.
    pub fn t_max<T: Real>(self, p: &Paraboloid<T>) -> T {
        if self.in_yz() {
            -p.b().recip()
        } else {
            -p.a().recip()
        }
    }

    /// Coefficients `(k, e, c₀, c₁)` with `w² = −k (ct+1)^e` and
    /// `z = c₀ + c₁ t`, where `c` is `b` in `x = 0` and `a` in `y = 0`.
    fn form<T: Real>(self, p: &Paraboloid<T>) -> (T, i32, T, T) {
        let (a, b) = (p.a(), p.b());
        let two = lit::<T>(2.0);
        let d2 = (b - a) * (b - a) / (a * a * b * b);
        match self {
            PlaneCurve::ParaboloidYz => (T::one() / (b * b), 1, -T::one() / (two * b), -T::one() / two),
            PlaneCurve::ParaboloidXz => (T::one() / (a * a), 1, -T::one() / (two * a), -T::one() / two),
            PlaneCurve::SemicubicalYz => (T::one() / (b * b), 3, -T::one() / (two * b), -lit::<T>(1.5)),
            PlaneCurve::ParabolaYz => (d2, 1, (two * b - a) / (two * a * b), -T::one() / two),
            PlaneCurve::SemicubicalXz => (T::one() / (a * a), 3, -T::one() / (two * a), -lit::<T>(1.5)),
            PlaneCurve::ParabolaXz => (d2, 1, (two * a - b) / (two * a * b), -T::one() / two),
        }
    }

    /// Parameter at which the curve has height `z`.
    pub fn t_at_height<T: Real>(self, p: &Paraboloid<T>, z: T) -> T {
        let (_, _, c0, c1) = self.form(p);
        (z - c0) / c1
    }

    /// Where a caustic section sits on the sheets, taking the rectangle
    /// representative; `None` for the paraboloid sections.
    pub fn sheet_coords<T: Real>(self, p: &Paraboloid<T>, t: T) -> Option<SheetCoords<T>> {
        let (ia, ib) = (p.a().recip(), p.b().recip());
        let c = match self {
            PlaneCurve::ParaboloidYz | PlaneCurve::ParaboloidXz => return None,
            PlaneCurve::SemicubicalYz => SheetCoords::new(Sheet::One, ia, t),
            PlaneCurve::ParabolaYz => SheetCoords::new(Sheet::One, -t, -ia),
            PlaneCurve::SemicubicalXz => SheetCoords::new(Sheet::One, ib, t),
            PlaneCurve::ParabolaXz => SheetCoords::new(Sheet::One, -t, -ib),
        };
        Some(if c.in_rectangle(p, T::zero()) { c } else { c.swapped() })
    }
}

impl std::fmt::Display for PlaneCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Point of a plane section; `sign` picks the branch of the off-axis
/// coordinate.
pub fn plane_curve_point<T: Real>(p: &Paraboloid<T>, curve: PlaneCurve, t: T, sign: Sign) -> Result<SpacePoint<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("curve parameter"));
    }
    let (k, e, c0, c1) = curve.form(p);
    let c = if curve.in_yz() { p.b() } else { p.a() };
    let w2 = -k * (c * t + T::one()).powi(e);
    let w = clamped_sqrt(w2, radicand_tol(t.abs() * p.b()))
        .ok_or_else(|| domain_err("plane curve radicand", w2))?;
    let w = sign.apply(w);
    let z = c0 + c1 * t;
    if curve.in_yz() {
        SpacePoint::new(T::zero(), w, z)
    } else {
        SpacePoint::new(w, T::zero(), z)
    }
}

/// Real domain `(−∞, t_max]`.
pub fn plane_curve_domain<T: Real>(p: &Paraboloid<T>, curve: PlaneCurve) -> Interval<T> {
    Interval::new(T::neg_infinity(), curve.t_max(p))
}
