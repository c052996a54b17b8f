//! The two caustic sheets (surfaces of centres) of the paraboloid in
//! parabolic coordinates, and the distinguished curves and points on them.
//!
//! Both sheets are evaluated over the same rectangle `u ≥ 1/a`,
//! `−1/a ≤ v ≤ −1/b`; sign choices give the four mirror copies.

pub mod curves;
pub mod domain;
pub mod nodal;
pub mod points;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{domain as domain_err, radicand_tol, Paraboloid, SpacePoint};
use crate::scalar::{clamped_sqrt, lit, Real, Sign};

pub use domain::{minimize_on, scan_domain, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    One,
    Two,
}

impl Sheet {
    pub const BOTH: [Sheet; 2] = [Sheet::One, Sheet::Two];

    pub fn index(self) -> u8 {
        match self {
            Sheet::One => 1,
            Sheet::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Sheet> {
        match i {
            1 => Some(Sheet::One),
            2 => Some(Sheet::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::One => Sheet::Two,
            Sheet::Two => Sheet::One,
        }
    }

    /// Exponents of `(au−1, av+1)` in the x radicand; the y radicand uses
    /// the same exponents on `(bu−1, bv+1)`.
    fn powers(self) -> (i32, i32) {
        match self {
            Sheet::One => (1, 3),
            Sheet::Two => (3, 1),
        }
    }

    /// `z = (ab(cu·u + cv·v) − a − b)/(2ab)`.
    fn height_coeffs(self) -> (f64, f64) {
        match self {
            Sheet::One => (1.0, -3.0),
            Sheet::Two => (3.0, -1.0),
        }
    }
}

impl std::fmt::Display for Sheet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl Serialize for Sheet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index())
    }
}

/// A parameter point on one sheet. The rectangle is only the canonical
/// domain; [`caustic_point`] accepts any `(u, v)` with real radicands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SheetCoords<T> {
    pub sheet: Sheet,
    pub u: T,
    pub v: T,
}

impl<T: Real> SheetCoords<T> {
    pub fn new(sheet: Sheet, u: T, v: T) -> Self {
        SheetCoords { sheet, u, v }
    }

    /// Same point expressed on the other sheet: `(u, v) → (−v, −u)`.
    pub fn swapped(self) -> Self {
        SheetCoords {
            sheet: self.sheet.other(),
            u: -self.v,
            v: -self.u,
        }
    }

    pub fn in_rectangle(&self, p: &Paraboloid<T>, tol: T) -> bool {
        let (ia, ib) = (p.a().recip(), p.b().recip());
        self.u >= ia - tol && self.v >= -ia - tol && self.v <= -ib + tol
    }
}

/// `(x², y²)` of the sheet at `c`, possibly negative.
pub fn sheet_radicands<T: Real>(p: &Paraboloid<T>, c: SheetCoords<T>) -> (T, T) {
    let (a, b) = (p.a(), p.b());
    let (pu, pv) = c.sheet.powers();
    let d = b - a;
    let x2 = b * (a * c.u - T::one()).powi(pu) * (a * c.v + T::one()).powi(pv) / (a * a * d);
    let y2 = -a * (b * c.u - T::one()).powi(pu) * (b * c.v + T::one()).powi(pv) / (b * b * d);
    (x2, y2)
}

pub fn sheet_height<T: Real>(p: &Paraboloid<T>, c: SheetCoords<T>) -> T {
    let (a, b) = (p.a(), p.b());
    let (cu, cv) = c.sheet.height_coeffs();
    (a * b * (lit::<T>(cu) * c.u + lit::<T>(cv) * c.v) - a - b) / (lit::<T>(2.0) * a * b)
}

pub fn caustic_point<T: Real>(p: &Paraboloid<T>, c: SheetCoords<T>, sx: Sign, sy: Sign) -> Result<SpacePoint<T>> {
    if !c.u.is_finite() || !c.v.is_finite() {
        return Err(Error::NonFinite("sheet coordinate"));
    }
    let (x2, y2) = sheet_radicands(p, c);
    let tol = radicand_tol(c.u.abs().max(c.v.abs()) * p.b());
    let x = clamped_sqrt(x2, tol).ok_or_else(|| domain_err("sheet x radicand", x2))?;
    let y = clamped_sqrt(y2, tol).ok_or_else(|| domain_err("sheet y radicand", y2))?;
    SpacePoint::new(sx.apply(x), sy.apply(y), sheet_height(p, c))
}

/// `u` giving height `z` on the sheet at fixed `v`.
fn u_for_height<T: Real>(p: &Paraboloid<T>, sheet: Sheet, v: T, z: T) -> T {
    let (a, b) = (p.a(), p.b());
    let (cu, cv) = sheet.height_coeffs();
    let s = (lit::<T>(2.0) * a * b * z + a + b) / (a * b);
    (s - lit::<T>(cv) * v) / lit::<T>(cu)
}

/// Upper end of the rendered `u` range: the sheet reaches height about
/// `3/a` along the edge `v = −1/a`.
pub fn default_u_max<T: Real>(p: &Paraboloid<T>, sheet: Sheet) -> T {
    let a = p.a();
    u_for_height(p, sheet, -a.recip(), lit::<T>(3.0) / a)
}

/// Result of projecting a point onto one sheet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Inversion<T> {
    pub coords: SheetCoords<T>,
    /// The sheet point, mirrored into the query's quadrant.
    pub point: SpacePoint<T>,
    pub distance: T,
}

/// Nearest point of `sheet` (over its rectangle and the four mirror copies)
/// to `q`. Seeds come from a scan along `v` at the query's height, then a
/// damped Gauss–Newton step works on the polynomial residuals
/// `(x² − qx², y² − qy², z − qz)`.
pub fn invert_sheet<T: Real>(p: &Paraboloid<T>, sheet: Sheet, q: SpacePoint<T>) -> Result<Inversion<T>> {
    if !q.x.is_finite() || !q.y.is_finite() || !q.z.is_finite() {
        return Err(Error::NonFinite("query point"));
    }
    let (a, b) = (p.a(), p.b());
    let (ia, ib) = (a.recip(), b.recip());
    let (qx, qy) = (q.x.abs(), q.y.abs());
    let project = |u: T, v: T| (u.max(ia), v.max(-ia).min(-ib));
    let dist_at = |u: T, v: T| -> Option<(T, SpacePoint<T>)> {
        let c = SheetCoords::new(sheet, u, v);
        let s = caustic_point(p, c, Sign::Plus, Sign::Plus).ok()?;
        let d = ((s.x - qx).powi(2) + (s.y - qy).powi(2) + (s.z - q.z).powi(2)).sqrt();
        Some((d, s))
    };

    let n = 257;
    let vs = Interval::new(-ia, -ib).linspace(n);
    let cost: Vec<T> = vs
        .iter()
        .map(|&v| {
            let (u, v) = project(u_for_height(p, sheet, v, q.z), v);
            dist_at(u, v).map_or(T::infinity(), |(d, _)| d)
        })
        .collect();
    let mut seeds: Vec<usize> = (0..n)
        .filter(|&i| {
            (i == 0 || cost[i] <= cost[i - 1]) && (i == n - 1 || cost[i] <= cost[i + 1]) && cost[i].is_finite()
        })
        .collect();
    seeds.sort_by(|&i, &j| cost[i].partial_cmp(&cost[j]).unwrap());
    seeds.truncate(4);

    let mut best: Option<Inversion<T>> = None;
    for i in seeds {
        let (mut u, mut v) = project(u_for_height(p, sheet, vs[i], q.z), vs[i]);
        let Some((mut d, _)) = dist_at(u, v) else { continue };
        let mut lambda = lit::<T>(1e-3);
        for _ in 0..100 {
            let (r, j) = residual_jacobian(p, sheet, u, v, qx, qy, q.z);
            // Normal equations with Levenberg damping.
            let mut m = [[T::zero(); 2]; 2];
            let mut g = [T::zero(); 2];
            for k in 0..3 {
                for c1 in 0..2 {
                    g[c1] = g[c1] + j[k][c1] * r[k];
                    for c2 in 0..2 {
                        m[c1][c2] = m[c1][c2] + j[k][c1] * j[k][c2];
                    }
                }
            }
            let mut improved = false;
            for _ in 0..30 {
                let m00 = m[0][0] * (T::one() + lambda);
                let m11 = m[1][1] * (T::one() + lambda);
                let det = m00 * m11 - m[0][1] * m[1][0];
                if det == T::zero() || !det.is_finite() {
                    lambda = lambda * lit(10.0);
                    continue;
                }
                let du = -(m11 * g[0] - m[0][1] * g[1]) / det;
                let dv = -(m00 * g[1] - m[1][0] * g[0]) / det;
                let (nu, nv) = project(u + du, v + dv);
                match dist_at(nu, nv) {
                    Some((nd, _)) if nd <= d => {
                        let moved = (nu - u).abs() + (nv - v).abs();
                        u = nu;
                        v = nv;
                        d = nd;
                        lambda = (lambda / lit(10.0)).max(lit(1e-12));
                        improved = moved > T::epsilon() * (T::one() + u.abs());
                        break;
                    }
                    _ => lambda = lambda * lit(10.0),
                }
            }
            if !improved {
                break;
            }
        }
        if let Some((d, s)) = dist_at(u, v) {
            if best.is_none_or(|b| d < b.distance) {
                best = Some(Inversion {
                    coords: SheetCoords::new(sheet, u, v),
                    point: s.mirrored(Sign::of(q.x), Sign::of(q.y)),
                    distance: d,
                });
            }
        }
    }
    best.ok_or_else(|| Error::IllConditioned("sheet inversion found no seed".into()))
}

/// Nearest point over both sheets.
pub fn nearest_caustic_point<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>) -> Result<Inversion<T>> {
    let one = invert_sheet(p, Sheet::One, q)?;
    let two = invert_sheet(p, Sheet::Two, q)?;
    Ok(if two.distance < one.distance { two } else { one })
}

#[allow(clippy::too_many_arguments)]
fn residual_jacobian<T: Real>(
    p: &Paraboloid<T>,
    sheet: Sheet,
    u: T,
    v: T,
    qx: T,
    qy: T,
    qz: T,
) -> ([T; 3], [[T; 2]; 3]) {
    let (a, b) = (p.a(), p.b());
    let d = b - a;
    let (pu, pv) = sheet.powers();
    let (cu, cv) = sheet.height_coeffs();
    let (fu, fv) = (T::from_i32(pu).unwrap(), T::from_i32(pv).unwrap());
    let (au, av) = (a * u - T::one(), a * v + T::one());
    let (bu, bv) = (b * u - T::one(), b * v + T::one());
    let kx = b / (a * a * d);
    let ky = -a / (b * b * d);
    let x2 = kx * au.powi(pu) * av.powi(pv);
    let y2 = ky * bu.powi(pu) * bv.powi(pv);
    let z = sheet_height(p, SheetCoords::new(sheet, u, v));
    let r = [x2 - qx * qx, y2 - qy * qy, z - qz];
    let j = [
        [
            kx * fu * a * au.powi(pu - 1) * av.powi(pv),
            kx * fv * a * au.powi(pu) * av.powi(pv - 1),
        ],
        [
            ky * fu * b * bu.powi(pu - 1) * bv.powi(pv),
            ky * fv * b * bu.powi(pu) * bv.powi(pv - 1),
        ],
        [lit::<T>(cu) / lit(2.0), lit::<T>(cv) / lit(2.0)],
    ];
    (r, j)
}

/// Empirically determined roles of the two sheets for one paraboloid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SheetLayout<T> {
    /// Sheet whose vertex on the z-axis is lower.
    pub lower: Sheet,
    pub upper: Sheet,
    pub lower_vertex_z: T,
    pub upper_vertex_z: T,
    /// Sheet that carries the centres of the smaller principal radius.
    pub small_radius: Sheet,
    /// Largest distance from a sampled small-radius centre to that sheet.
    pub pairing_residual: T,
}

/// Decides which sheet is lower and which carries the smaller-radius
/// centres by evaluation rather than by index.
pub fn sheet_layout<T: Real>(p: &Paraboloid<T>) -> Result<SheetLayout<T>> {
    let (ia, ib) = (p.a().recip(), p.b().recip());
    // Axis vertex of each sheet: the rectangle corner (1/a, −1/b).
    let vz = |s| sheet_height(p, SheetCoords::new(s, ia, -ib));
    let (z1, z2) = (vz(Sheet::One), vz(Sheet::Two));
    let (lower, upper) = if z1 <= z2 { (Sheet::One, Sheet::Two) } else { (Sheet::Two, Sheet::One) };

    let mut votes = [0usize; 2];
    let mut worst = [T::zero(); 2];
    let r = ia.sqrt();
    for i in 1..=6 {
        for j in 1..=6 {
            let x = r * T::from_i32(i).unwrap() / lit(3.0);
            let y = r * T::from_i32(j).unwrap() / lit(4.0);
            let (c1, _) = p.curvature_centers(x, y);
            let d1 = invert_sheet(p, Sheet::One, c1)?.distance;
            let d2 = invert_sheet(p, Sheet::Two, c1)?.distance;
            let k = usize::from(d2 < d1);
            votes[k] += 1;
            worst[k] = worst[k].max(d1.min(d2));
        }
    }
    let k = usize::from(votes[1] > votes[0]);
    Ok(SheetLayout {
        lower,
        upper,
        lower_vertex_z: z1.min(z2),
        upper_vertex_z: z1.max(z2),
        small_radius: if k == 0 { Sheet::One } else { Sheet::Two },
        pairing_residual: worst[k],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p14() -> Paraboloid<f64> {
        Paraboloid::new(1.0, 4.0).unwrap()
    }

    #[test]
    fn vertices_and_edges() {
        let p = p14();
        let c = SheetCoords::new(Sheet::One, 1.0, -0.25);
        let v = caustic_point(&p, c, Sign::Plus, Sign::Plus).unwrap();
        assert_eq!([v.x, v.y], [0.0, 0.0]);
        assert_relative_eq!(v.z, 0.25);
        let c = SheetCoords::new(Sheet::Two, 1.0, -0.25);
        assert_relative_eq!(caustic_point(&p, c, Sign::Plus, Sign::Plus).unwrap().z, 1.0);
        let e = caustic_point(&p, SheetCoords::new(Sheet::One, 3.0, -1.0), Sign::Plus, Sign::Plus).unwrap();
        assert_eq!(e.x, 0.0);
    }

    #[test]
    fn negative_radicand_is_domain_error() {
        let p = p14();
        let c = SheetCoords::new(Sheet::One, 0.5, -0.5);
        assert!(matches!(caustic_point(&p, c, Sign::Plus, Sign::Plus), Err(Error::Domain(_))));
    }

    #[test]
    fn swap_identity() {
        let p = p14();
        for (u, v) in [(1.0, -0.5), (2.5, -0.3), (7.0, -0.9)] {
            let c = SheetCoords::new(Sheet::One, u, v);
            let s1 = caustic_point(&p, c, Sign::Plus, Sign::Minus).unwrap();
            let s2 = caustic_point(&p, c.swapped(), Sign::Plus, Sign::Minus).unwrap();
            assert!(s1.dist(s2) < 1e-12);
        }
    }

    #[test]
    fn layout_for_1_4() {
        let l = sheet_layout(&p14()).unwrap();
        assert_eq!(l.lower, Sheet::One);
        assert_relative_eq!(l.lower_vertex_z, 0.25);
        assert_relative_eq!(l.upper_vertex_z, 1.0);
        assert_eq!(l.small_radius, Sheet::One);
        assert!(l.pairing_residual < 1e-8, "{}", l.pairing_residual);
    }

    #[test]
    fn inversion_recovers_coordinates() {
        let p = p14();
        for sheet in Sheet::BOTH {
            let c = SheetCoords::new(sheet, 2.0, -0.6);
            let q = caustic_point(&p, c, Sign::Minus, Sign::Plus).unwrap();
            let inv = invert_sheet(&p, sheet, q).unwrap();
            assert!(inv.distance < 1e-9, "{sheet}: {}", inv.distance);
            assert_relative_eq!(inv.coords.u, 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn u_max_reaches_three_over_a() {
        let p = p14();
        for s in Sheet::BOTH {
            let u = default_u_max(&p, s);
            assert_relative_eq!(sheet_height(&p, SheetCoords::new(s, u, -1.0)), 3.0, epsilon = 1e-14);
        }
        assert_relative_eq!(default_u_max(&p, Sheet::One), 4.25);
    }
}
