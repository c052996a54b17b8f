//! Concurrent normals of the plane parabola `y = a x²/2` and its evolute,
//! Neile's semicubical parabola `(a y − 1)³ = (27/8) a² x²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyroots::{Root, RootSet};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parabola2<T> {
    a: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PlanePoint<T> {
    pub x: T,
    pub y: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NeileSide {
    Below,
    On,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Count2 {
    pub count: usize,
    pub on_boundary: bool,
}

impl<T: Real> PlanePoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(PlanePoint { x, y })
        } else {
            Err(Error::NonFinite("plane point coordinate"))
        }
    }
}

impl<T: Real> Parabola2<T> {
    pub fn new(a: T) -> Result<Self> {
        if a.is_finite() && a > T::zero() {
            Ok(Parabola2 { a })
        } else {
            Err(Error::InvalidArgument(format!("parabola needs a > 0, got {a}")))
        }
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn height(&self, x: T) -> T {
        self.a * x * x / lit(2.0)
    }

    /// `(p, q)` of the depressed form `x³ + p x + q` of `a²x³ − 2(am−1)x − 2l`.
    pub fn depressed(&self, q: PlanePoint<T>) -> (T, T) {
        let a2 = self.a * self.a;
        (
            -lit::<T>(2.0) * (self.a * q.y - T::one()) / a2,
            -lit::<T>(2.0) * q.x / a2,
        )
    }

    /// Feet x-coordinates with multiplicities; the multiplicities come from
    /// the discriminant band, not from root clustering.
    pub fn normal_feet_2d(&self, q: PlanePoint<T>) -> RootSet<T> {
        let (p, qq) = self.depressed(q);
        let roots = depressed_cubic_roots(p, qq);
        let residual = roots.iter().fold(T::zero(), |m, r| {
            let x = r.value;
            let s = T::one() + x.abs().powi(3) + (p * x).abs() + qq.abs();
            m.max((x * x * x + p * x + qq).abs() / s)
        });
        RootSet { roots, residual }
    }

    pub fn neile_classify(&self, q: PlanePoint<T>) -> NeileSide {
        let (p, qq) = self.depressed(q);
        match discriminant_side(p, qq) {
            std::cmp::Ordering::Less => NeileSide::Below,
            std::cmp::Ordering::Equal => NeileSide::On,
            std::cmp::Ordering::Greater => NeileSide::Above,
        }
    }

    /// `(a m − 1)³ − (27/8) a² l²`, zero exactly on the evolute.
    pub fn neile_residual(&self, q: PlanePoint<T>) -> T {
        let s = self.a * q.y - T::one();
        s * s * s - lit::<T>(27.0 / 8.0) * self.a * self.a * q.x * q.x
    }

    pub fn count_normals_2d(&self, q: PlanePoint<T>) -> Count2 {
        let rs = self.normal_feet_2d(q);
        Count2 {
            count: rs.distinct(),
            on_boundary: rs.has_multiple(),
        }
    }

    /// The two points where the parabola meets its evolute.
    pub fn c_points(&self) -> [PlanePoint<T>; 2] {
        let x = lit::<T>(2.0) * lit::<T>(2.0).sqrt() / self.a;
        let y = lit::<T>(4.0) / self.a;
        [PlanePoint { x, y }, PlanePoint { x: -x, y }]
    }

    /// Centre of curvature of the foot `x0`; traces the evolute.
    pub fn evolute_point(&self, x0: T) -> PlanePoint<T> {
        let a = self.a;
        PlanePoint {
            x: -a * a * x0 * x0 * x0,
            y: a.recip() + lit::<T>(1.5) * a * x0 * x0,
        }
    }
}

/// Band for a vanishing discriminant of `x³ + p x + q`.
fn disc_band<T: Real>(p: T, q: T) -> T {
    let eps = lit::<T>(1e-10).max(T::epsilon() * lit(1e4));
    eps * (T::one() + p.abs().powi(3) + q * q)
}

fn discriminant_side<T: Real>(p: T, q: T) -> std::cmp::Ordering {
    let disc = -lit::<T>(4.0) * p * p * p - lit::<T>(27.0) * q * q;
    let band = disc_band(p, q);
    if disc > band {
        std::cmp::Ordering::Greater
    } else if disc < -band {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Real roots of `x³ + p x + q`, increasing, with multiplicities.
pub fn depressed_cubic_roots<T: Real>(p: T, q: T) -> Vec<Root<T>> {
    let simple = |v| Root { value: v, multiplicity: 1 };
    let three = lit::<T>(3.0);
    let two = lit::<T>(2.0);
    let mut out = match discriminant_side(p, q) {
        std::cmp::Ordering::Greater => {
            // Three real roots, trigonometric form (p < 0 here).
            let r = two * (-p / three).sqrt();
            let arg = (three * q / (two * p) * (-three / p).sqrt()).max(-T::one()).min(T::one());
            let phi = arg.acos() / three;
            let tau = two * T::PI() / three;
            (0..3)
                .map(|k| simple(r * (phi - tau * T::from_i32(k).unwrap()).cos()))
                .collect::<Vec<_>>()
        }
        std::cmp::Ordering::Less => {
            let d = q * q / lit(4.0) + p * p * p / lit(27.0);
            let big = -q.signum() * (q.abs() / two + d.max(T::zero()).sqrt()).cbrt();
            let small = if big != T::zero() { -p / (three * big) } else { T::zero() };
            vec![simple(big + small)]
        }
        std::cmp::Ordering::Equal => {
            // The double and simple roots sit 9q/(2p) apart; merge them
            // under the usual root tolerance.
            let simple_root = three * q / p;
            let gap = (simple_root * lit(1.5)).abs();
            if p == T::zero() || !gap.is_finite() || gap <= T::MERGE * (T::one() + simple_root.abs()) {
                vec![Root {
                    value: T::zero(),
                    multiplicity: 3,
                }]
            } else {
                vec![
                    simple(simple_root),
                    Root {
                        value: -three * q / (two * p),
                        multiplicity: 2,
                    },
                ]
            }
        }
    };
    for r in out.iter_mut().filter(|r| r.multiplicity == 1) {
        // One Newton step tidies the closed forms.
        let x = r.value;
        let d = three * x * x + p;
        if d != T::zero() {
            let nx = x - (x * x * x + p * x + q) / d;
            if nx.is_finite() {
                r.value = nx;
            }
        }
    }
    out.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(x: f64, y: f64) -> PlanePoint<f64> {
        PlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn focus_is_triple() {
        let p = Parabola2::new(1.0).unwrap();
        let rs = p.normal_feet_2d(pt(0.0, 1.0));
        assert_eq!(rs.roots, vec![Root { value: 0.0, multiplicity: 3 }]);
        assert_eq!(p.neile_classify(pt(0.0, 1.0)), NeileSide::On);
        assert_eq!(p.count_normals_2d(pt(0.0, 1.0)).count, 1);
    }

    #[test]
    fn evolute_near_the_cusp_keeps_two_feet() {
        let p = Parabola2::new(1.0).unwrap();
        let rs = p.normal_feet_2d(p.evolute_point(0.0075));
        assert_eq!(rs.distinct(), 2);
        assert!(rs.roots.iter().any(|r| r.multiplicity == 2 && (r.value - 0.0075f64).abs() < 1e-12));
    }

    #[test]
    fn vertex_query() {
        let p = Parabola2::new(1.0).unwrap();
        let rs = p.normal_feet_2d(pt(0.0, 0.0));
        assert_eq!(rs.distinct(), 1);
        assert_relative_eq!(rs.roots[0].value, 0.0, epsilon = 1e-15);
        assert_eq!(p.depressed(pt(0.0, 0.0)), (2.0, 0.0));
        assert_eq!(p.neile_classify(pt(0.0, 0.0)), NeileSide::Below);
    }

    #[test]
    fn three_feet_above_evolute() {
        let p = Parabola2::new(1.0).unwrap();
        let v: Vec<f64> = p.normal_feet_2d(pt(0.0, 5.0)).values().collect();
        assert_eq!(v.len(), 3);
        assert_relative_eq!(v[0], -8f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(v[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(v[2], 8f64.sqrt(), epsilon = 1e-14);
        assert_eq!(p.neile_classify(pt(0.0, 5.0)), NeileSide::Above);
    }

    #[test]
    fn c_points_are_on_both_curves_with_two_normals() {
        for a in [1.0f64, 2.0, 0.5] {
            let p = Parabola2::new(a).unwrap();
            for c in p.c_points() {
                assert_relative_eq!(c.y, p.height(c.x), max_relative = 1e-12);
                assert!(p.neile_residual(c).abs() < 1e-12 * (1.0 + c.y.powi(3)));
                let n = p.count_normals_2d(c);
                assert_eq!(n, Count2 { count: 2, on_boundary: true });
            }
        }
        let c = Parabola2::new(2.0).unwrap().c_points();
        assert_relative_eq!(c[0].x, 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(c[0].y, 2.0);
        let c = Parabola2::new(1.0).unwrap().c_points();
        assert_relative_eq!(c[1].x, -2.8284271247461903);
    }

    #[test]
    fn three_normals_for_steep_parabola() {
        let p = Parabola2::new(2.0).unwrap();
        assert_eq!(p.count_normals_2d(pt(1.0, 10.0)).count, 3);
    }

    #[test]
    fn evolute_points_are_double() {
        let p = Parabola2::new(1.5f64).unwrap();
        for x0 in [-2.0, -0.3, 0.4, 1.7] {
            let e = p.evolute_point(x0);
            assert!(p.neile_residual(e).abs() < 1e-9 * (1.0 + e.y.abs().powi(3)));
            let rs = p.normal_feet_2d(e);
            let d = rs.roots.iter().find(|r| r.multiplicity == 2).unwrap();
            assert_relative_eq!(d.value, x0, max_relative = 1e-6);
        }
    }
}
