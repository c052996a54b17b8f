//! The elliptic paraboloid `z = (a x² + b y²)/2`, its parabolic coordinates
//! and its principal curvatures.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{clamped_sqrt, lit, Real, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Paraboloid<T> {
    a: T,
    b: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SpacePoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Parabolic coordinates; the surface domain is `u ≥ 1/a`, `−1/a ≤ v ≤ −1/b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParabolicCoords<T> {
    pub u: T,
    pub v: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureData<T> {
    /// Mean curvature.
    pub h: T,
    /// Gaussian curvature.
    pub k: T,
    /// Smaller principal radius.
    pub r1: T,
    /// Larger principal radius.
    pub r2: T,
}

impl<T: Real> SpacePoint<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(SpacePoint { x, y, z })
        } else {
            Err(Error::NonFinite("point coordinate"))
        }
    }

    pub fn from_array([x, y, z]: [T; 3]) -> Result<Self> {
        Self::new(x, y, z)
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn sub(self, o: Self) -> [T; 3] {
        [self.x - o.x, self.y - o.y, self.z - o.z]
    }

    pub fn dist(self, o: Self) -> T {
        norm(self.sub(o))
    }

    pub fn mirrored(self, sx: Sign, sy: Sign) -> Self {
        SpacePoint {
            x: sx.apply(self.x),
            y: sy.apply(self.y),
            z: self.z,
        }
    }

    /// Largest absolute coordinate, used to scale tolerances.
    pub fn magnitude(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn cast<U: Real>(self) -> SpacePoint<U> {
        let c = |v: T| U::from_f64(v.to_f64().unwrap()).unwrap();
        SpacePoint {
            x: c(self.x),
            y: c(self.y),
            z: c(self.z),
        }
    }
}

pub fn norm<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn cross<T: Real>(p: [T; 3], q: [T; 3]) -> [T; 3] {
    [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ]
}

impl<T: Real> Paraboloid<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        let err = |reason| Error::InvalidParaboloid {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
            reason,
        };
        if !a.is_finite() || !b.is_finite() {
            return Err(err("coefficients must be finite"));
        }
        if a <= T::zero() || b <= T::zero() {
            return Err(err("coefficients must be positive"));
        }
        if a == b {
            return Err(err("a = b is a paraboloid of revolution"));
        }
        if a > b {
            return Err(err("expected a < b"));
        }
        Ok(Paraboloid { a, b })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn height(&self, x: T, y: T) -> T {
        (self.a * x * x + self.b * y * y) / lit(2.0)
    }

    pub fn surface_point(&self, x: T, y: T) -> Result<SpacePoint<T>> {
        SpacePoint::new(x, y, self.height(x, y))
    }

    /// Height residual scaled by `1 + |z|`.
    pub fn residual(&self, s: SpacePoint<T>) -> T {
        (s.z - self.height(s.x, s.y)).abs() / (T::one() + s.z.abs())
    }

    pub fn check_on_surface(&self, s: SpacePoint<T>) -> Result<()> {
        let r = self.residual(s);
        if r <= T::SURFACE {
            Ok(())
        } else {
            Err(Error::NotOnSurface {
                residual: r.to_f64().unwrap_or(f64::INFINITY),
            })
        }
    }

    /// Both parabolic-coordinate radicands `(x², y²)` at `(u, v)`.
    pub fn parabolic_radicands(&self, c: ParabolicCoords<T>) -> (T, T) {
        let (a, b) = (self.a, self.b);
        let (au, av) = (a * c.u - T::one(), a * c.v + T::one());
        let (bu, bv) = (b * c.u - T::one(), b * c.v + T::one());
        (
            b * au * av / (a * a * (b - a)),
            -a * bu * bv / (b * b * (b - a)),
        )
    }

    pub fn surface_from_parabolic(&self, c: ParabolicCoords<T>, sx: Sign, sy: Sign) -> Result<SpacePoint<T>> {
        if !c.u.is_finite() || !c.v.is_finite() {
            return Err(Error::NonFinite("parabolic coordinate"));
        }
        let (a, b) = (self.a, self.b);
        let (x2, y2) = self.parabolic_radicands(c);
        let tol = radicand_tol(c.u.abs().max(c.v.abs()) * b);
        let x = clamped_sqrt(x2, tol).ok_or_else(|| domain("x radicand", x2))?;
        let y = clamped_sqrt(y2, tol).ok_or_else(|| domain("y radicand", y2))?;
        let z = (a * b * (c.u - c.v) - a - b) / (lit::<T>(2.0) * a * b);
        SpacePoint::new(sx.apply(x), sy.apply(y), z)
    }

    pub fn parabolic_from_surface(&self, s: SpacePoint<T>) -> Result<ParabolicCoords<T>> {
        self.check_on_surface(s)?;
        let (a, b) = (self.a, self.b);
        let two = lit::<T>(2.0);
        // u − v from the height, (au−1)(av+1) from x², then a quadratic for u and −v.
        let z = self.height(s.x, s.y);
        let sum = (two * a * b * z + a + b) / (a * b);
        let prod = a * a * (b - a) * s.x * s.x / b;
        let uv = (prod - a * sum + T::one()) / (a * a);
        let disc = (sum * sum + lit::<T>(4.0) * uv).max(T::zero());
        let u = (sum + disc.sqrt()) / two;
        let w = if u > T::zero() { -uv / u } else { sum - u };
        let u = u.max(a.recip());
        let v = (-w).max(-a.recip()).min(-b.recip());
        Ok(ParabolicCoords { u, v })
    }

    /// Unnormalised inner normal `(−a x, −b y, 1)` at a surface point.
    pub fn normal_direction(&self, s: SpacePoint<T>) -> Result<[T; 3]> {
        self.check_on_surface(s)?;
        Ok(self.normal_at(s.x, s.y))
    }

    pub fn normal_at(&self, x: T, y: T) -> [T; 3] {
        [-self.a * x, -self.b * y, T::one()]
    }

    pub fn curvature_at(&self, x: T, y: T) -> CurvatureData<T> {
        let (a, b) = (self.a, self.b);
        let w2 = T::one() + a * a * x * x + b * b * y * y;
        let w = w2.sqrt();
        let h = (a + b + a * a * b * x * x + a * b * b * y * y) / (lit::<T>(2.0) * w2 * w);
        let k = a * b / (w2 * w2);
        let gap = h * h - k;
        debug_assert!(gap >= -T::epsilon() * lit(16.0) * h * h, "H^2 < K");
        let root = gap.max(T::zero()).sqrt();
        // 1/(H − √·) written as (H + √·)/K to avoid cancellation.
        CurvatureData {
            h,
            k,
            r1: (h + root).recip(),
            r2: (h + root) / k,
        }
    }

    /// Centres of principal curvature `(smaller radius, larger radius)`.
    pub fn curvature_centers(&self, x: T, y: T) -> (SpacePoint<T>, SpacePoint<T>) {
        let s = SpacePoint {
            x,
            y,
            z: self.height(x, y),
        };
        let n = self.normal_at(x, y);
        let len = norm(n);
        let c = self.curvature_at(x, y);
        let at = |r: T| SpacePoint {
            x: s.x + r * n[0] / len,
            y: s.y + r * n[1] / len,
            z: s.z + r * n[2] / len,
        };
        (at(c.r1), at(c.r2))
    }
}

pub(crate) fn radicand_tol<T: Real>(scale: T) -> T {
    T::epsilon() * lit(64.0) * (T::one() + scale).powi(4)
}

pub(crate) fn domain<T: Real>(what: &str, value: T) -> Error {
    Error::Domain(format!("{what} is negative ({:e})", value.to_f64().unwrap_or(f64::NAN)))
}
