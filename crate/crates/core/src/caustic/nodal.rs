//! The nodal curve, along which the two caustic sheets cross.
//!
//! Two parametrizations are provided. The polynomial-in-`δ` one runs from
//! `K` (`t = δ`) to `H` (`t = 2δ`). The other goes through sheet-2
//! parameters `(u₂(t), v₂(t))` for `t ∈ [−1/a, −1/b]`, whose ends are
//! removable singularities evaluated by their limits (`H` and `K`).

use serde::Serialize;

use super::domain::{scan_domain, Interval};
use super::{caustic_point, Sheet, SheetCoords};
use crate::error::{Error, Result};
use crate::geometry::{domain as domain_err, radicand_tol, Paraboloid, SpacePoint};
use crate::scalar::{clamped_sqrt, lit, Real, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NodalParametrization<T> {
    /// `(b − a)/(2ab)`.
    pub delta: T,
    /// Parameter of the points `E` on the nodal curve: `(a + b)/(2ab)`.
    pub t0: T,
    /// Both sheet-2 parameters of `E`, smaller first; `None` when `3a > b`.
    pub s0_pair: Option<[T; 2]>,
    /// Spurious second root `−4(a−b)²/(ab(a+b))`; not a real point.
    pub t1: T,
}

pub fn nodal_parametrization<T: Real>(p: &Paraboloid<T>) -> NodalParametrization<T> {
    let (a, b) = (p.a(), p.b());
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let ab = a * b;
    let disc = three * (three * a - b) * (a - three * b);
    let s0_pair = if disc >= -radicand_tol(b / a) * a * b {
        let r = (b - a) * disc.max(T::zero()).sqrt();
        let m = three * a * a - two * ab + three * b * b;
        let den = two * ab * (a + b);
        Some([(m - r) / den, (m + r) / den])
    } else {
        None
    };
    NodalParametrization {
        delta: (b - a) / (two * ab),
        t0: (a + b) / (two * ab),
        s0_pair,
        t1: -lit::<T>(4.0) * (a - b) * (a - b) / (ab * (a + b)),
    }
}

/// `(x², y², z)` of the δ-parametrization.
pub fn caspari_radicands<T: Real>(p: &Paraboloid<T>, t: T) -> Result<(T, T, T)> {
    if t == T::zero() || !t.is_finite() {
        return Err(Error::Pole(t.to_f64().unwrap_or(f64::NAN)));
    }
    let (a, b) = (p.a(), p.b());
    let d = nodal_parametrization(p).delta;
    let two = lit::<T>(2.0);
    let eight = lit::<T>(8.0);
    let t4 = t.powi(4);
    let x2 = eight * a * d * d * (t + d).powi(3) * (t - two * d).powi(2) / t4;
    let y2 = eight * b * d * d * (t - d).powi(3) * (t + two * d).powi(2) / t4;
    let z = (eight * d * d - t * t) / t + (a + b) / (two * a * b);
    Ok((x2, y2, z))
}

pub fn nodal_point_caspari<T: Real>(p: &Paraboloid<T>, t: T, sx: Sign, sy: Sign) -> Result<SpacePoint<T>> {
    let (x2, y2, z) = caspari_radicands(p, t)?;
    let tol = radicand_tol(z.abs() * p.b());
    let x = clamped_sqrt(x2, tol).ok_or_else(|| domain_err("nodal x radicand", x2))?;
    let y = clamped_sqrt(y2, tol).ok_or_else(|| domain_err("nodal y radicand", y2))?;
    SpacePoint::new(sx.apply(x), sy.apply(y), z)
}

/// Parameters where both radicands are real, scanned over `[−8δ, 8δ]`.
/// The part beyond `2δ` is real but its two double normals are complex,
/// so the returned domain is clipped there: the result is `[δ, 2δ]`.
pub fn caspari_domain<T: Real>(p: &Paraboloid<T>) -> Vec<Interval<T>> {
    let d = nodal_parametrization(p).delta;
    let eight = lit::<T>(8.0);
    let real = |t: T| {
        caspari_radicands(p, t).is_ok_and(|(x2, y2, _)| x2 >= T::zero() && y2 >= T::zero())
    };
    scan_domain(-eight * d, eight * d, 4096, real)
        .into_iter()
        .filter_map(|iv| {
            let hi = iv.hi.min(lit::<T>(2.0) * d);
            (hi >= iv.lo).then(|| Interval::new(iv.lo, hi))
        })
        .collect()
}

/// Discriminant of the quadratic under the radical in `u₂(t)`,
/// `−288a²b²(a−b)²`; always negative so the radical is real.
pub fn nodal_uv_discriminant<T: Real>(p: &Paraboloid<T>) -> T {
    let (a, b) = (p.a(), p.b());
    let (qa, qb, qc) = uv_quadratic(a, b);
    qb * qb - lit::<T>(4.0) * qa * qc
}

fn uv_quadratic<T: Real>(a: T, b: T) -> (T, T, T) {
    let twelve = lit::<T>(12.0);
    let nine = lit::<T>(9.0);
    (
        twelve * a * a * b * b,
        twelve * a * b * (a + b),
        nine * a * a - lit::<T>(6.0) * a * b + nine * b * b,
    )
}

fn u2_and_slope<T: Real>(a: T, b: T, t: T) -> (T, T) {
    let (qa, qb, qc) = uv_quadratic(a, b);
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let r = (qa * t * t + qb * t + qc).sqrt();
    let u = (lit::<T>(4.0) * a * b * t + three * a + three * b + r) / (two * a * b);
    let du = (lit::<T>(4.0) * a * b + (two * qa * t + qb) / (two * r)) / (two * a * b);
    (u, du)
}

/// Sheet-2 parameters `(u₂, v₂)` of the nodal point at `t`.
///
/// Near `t = −1/a` the ratio `(au₂−1)/(at+1)` is 0/0 and is replaced by the
/// slope of `u₂` at the midpoint; the ratio with `b` is inverted so that
/// `t = −1/b` gives `v₂ = −1/b`.
pub fn nodal_uv_coords<T: Real>(p: &Paraboloid<T>, t: T) -> Result<SheetCoords<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("nodal parameter"));
    }
    let (a, b) = (p.a(), p.b());
    let (u, _) = u2_and_slope(a, b, t);
    let at1 = a * t + T::one();
    let q_ratio = if at1.abs() < lit::<T>(1e-5) {
        let mid = (t - a.recip()) / lit(2.0);
        u2_and_slope(a, b, mid).1
    } else {
        (a * u - T::one()) / at1
    };
    let q = q_ratio.powi(3);
    let bu1 = b * u - T::one();
    let bt1 = b * t + T::one();
    let v = if bt1.abs() <= bu1.abs() {
        let r = (bt1 / bu1).powi(3);
        (a * (r + T::one()) - b * (T::one() + q) * r) / (a * b * (q * r - T::one()))
    } else {
        let pp = (bu1 / bt1).powi(3);
        (a * (T::one() + pp) - b * (T::one() + q)) / (a * b * (q - pp))
    };
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::Pole(t.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(SheetCoords::new(Sheet::Two, u, v))
}

pub fn nodal_point_uv<T: Real>(p: &Paraboloid<T>, t: T, sx: Sign, sy: Sign) -> Result<SpacePoint<T>> {
    caustic_point(p, nodal_uv_coords(p, t)?, sx, sy)
}

/// Parameters whose `(u₂, v₂)` lies in the rectangle with real radicands;
/// `[−1/a, −1/b]` in every case tried.
pub fn nodal_uv_domain<T: Real>(p: &Paraboloid<T>) -> Vec<Interval<T>> {
    let (ia, ib) = (p.a().recip(), p.b().recip());
    let tol = lit::<T>(1e4) * T::epsilon() * (T::one() + ia);
    let ok = |t: T| {
        nodal_uv_coords(p, t).is_ok_and(|c| c.in_rectangle(p, tol) && caustic_point(p, c, Sign::Plus, Sign::Plus).is_ok())
    };
    let span = ia - ib;
    scan_domain(-ia - span, -ib + span, 4096, ok)
        .into_iter()
        .filter_map(|iv| {
            let lo = iv.lo.max(-ia);
            let hi = iv.hi.min(-ib);
            (hi > lo).then(|| Interval::new(lo, hi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p14() -> Paraboloid<f64> {
        Paraboloid::new(1.0, 4.0).unwrap()
    }

    #[test]
    fn constants_for_1_4() {
        let n = nodal_parametrization(&p14());
        assert_eq!(n.delta, 0.375);
        assert_eq!(n.t0, 0.625);
        assert_relative_eq!(n.t1, -1.8);
        let [s1, s2] = n.s0_pair.unwrap();
        assert!(s1 < s2);
        assert!(nodal_parametrization(&Paraboloid::new(1.0, 2.0).unwrap()).s0_pair.is_none());
        let [e1, e2] = nodal_parametrization(&Paraboloid::new(1.0, 3.0).unwrap()).s0_pair.unwrap();
        assert_relative_eq!(e1, e2, epsilon = 1e-12);
    }

    #[test]
    fn discriminant() {
        assert_eq!(nodal_uv_discriminant(&p14()), -288.0 * 16.0 * 9.0);
    }

    #[test]
    fn t0_hits_e_height() {
        let s = nodal_point_caspari(&p14(), 0.625, Sign::Plus, Sign::Plus).unwrap();
        assert_relative_eq!(s.z, 1.8, epsilon = 1e-14);
    }

    #[test]
    fn caspari_domain_and_ends() {
        let p = p14();
        let d = caspari_domain(&p);
        assert_eq!(d.len(), 1);
        assert_relative_eq!(d[0].lo, 0.375, epsilon = 1e-12);
        assert_eq!(d[0].hi, 0.75);
        let k = nodal_point_caspari(&p, 0.375, Sign::Plus, Sign::Plus).unwrap();
        assert_relative_eq!(k.x, 3.375f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(k.z, 3.25, epsilon = 1e-12);
        let h = nodal_point_caspari(&p, 0.75, Sign::Plus, Sign::Plus).unwrap();
        assert_eq!(h.x, 0.0);
        assert_relative_eq!(h.y, 0.75 * 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(h.z, 1.375, epsilon = 1e-12);
        assert!(matches!(caspari_radicands(&p, 0.0), Err(Error::Pole(_))));
    }

    #[test]
    fn uv_ends_are_limits() {
        let p = p14();
        let h = nodal_point_uv(&p, -1.0, Sign::Plus, Sign::Plus).unwrap();
        assert!(h.dist(SpacePoint::new(0.0, 0.75 * 3f64.sqrt(), 1.375).unwrap()) < 1e-9);
        let h2 = nodal_point_uv(&p, -1.0 + 1e-7, Sign::Plus, Sign::Plus).unwrap();
        assert!(h2.dist(h) < 1e-6);
        let k = nodal_point_uv(&p, -0.25, Sign::Plus, Sign::Plus).unwrap();
        assert!(k.dist(SpacePoint::new(3.375f64.sqrt(), 0.0, 3.25).unwrap()) < 1e-12);
        let d = nodal_uv_domain(&p);
        assert_eq!(d, vec![Interval::new(-1.0, -0.25)]);
    }
}
