//! Brute-force normal counter: critical points of `|B(x, y) − A|²` over the
//! `(x, y)` chart of the paraboloid, found on a grid and polished by Newton.
//! Nothing here uses the normal equation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cross, norm, Paraboloid, SpacePoint};
use crate::scalar::{lit, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult<T> {
    /// Sorted by `(x, y)`.
    pub feet: Vec<SpacePoint<T>>,
    pub count: usize,
    /// Largest `|g|` left at a refined foot.
    pub min_gradient_norm: T,
    pub grid: usize,
}

/// `4·max(|l|, |m|, √(2|n|/a), 1/a)`.
pub fn default_half_width<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>) -> T {
    let r = (lit::<T>(2.0) * q.z.abs() / p.a()).sqrt();
    lit::<T>(4.0) * q.x.abs().max(q.y.abs()).max(r).max(p.a().recip())
}

/// Half the gradient of the squared distance.
fn gradient<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, x: T, y: T) -> [T; 2] {
    let h = p.height(x, y) - q.z;
    [x - q.x + h * p.a() * x, y - q.y + h * p.b() * y]
}

fn hessian<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, x: T, y: T) -> [[T; 2]; 2] {
    let (a, b) = (p.a(), p.b());
    let h = p.height(x, y) - q.z;
    let off = a * b * x * y;
    [[T::one() + a * h + a * a * x * x, off], [off, T::one() + b * h + b * b * y * y]]
}

fn gnorm<T: Real>(g: [T; 2]) -> T {
    (g[0] * g[0] + g[1] * g[1]).sqrt()
}

/// Root of `g[k]` along one coordinate inside `[lo, hi]`, if it changes sign.
fn bisect_axis<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T) -> Option<T> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo * fhi > T::zero() {
        return None;
    }
    for _ in 0..100 {
        let m = lo + (hi - lo) / lit(2.0);
        if m == lo || m == hi {
            break;
        }
        let fm = f(m);
        if (fm <= T::zero()) == (flo <= T::zero()) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    Some(lo + (hi - lo) / lit(2.0))
}

/// Damped Newton on `g` from `start`; when a step cannot be damped into a
/// decrease, one bisection sweep per component inside the cell.
fn refine<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, start: [T; 2], cell: T) -> Option<[T; 2]> {
    let [mut x, mut y] = start;
    let scale = T::one() + q.magnitude();
    let tol = T::epsilon() * lit(64.0) * scale;
    let mut g = gradient(p, q, x, y);
    for _ in 0..50 {
        let r = gnorm(g);
        if r <= tol {
            break;
        }
        let h = hessian(p, q, x, y);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let mut moved = false;
        if det.abs() > T::min_positive_value() {
            let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
            let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
            let mut s = T::one();
            for _ in 0..40 {
                let (nx, ny) = (x - s * dx, y - s * dy);
                let ng = gradient(p, q, nx, ny);
                if gnorm(ng) < r {
                    (x, y, g) = (nx, ny, ng);
                    moved = true;
                    break;
                }
                s = s / lit(2.0);
            }
        }
        if !moved {
            let (bx, by) = (x, y);
            if let Some(nx) = bisect_axis(|t| gradient(p, q, t, y)[0], x - cell, x + cell) {
                x = nx;
            }
            if let Some(ny) = bisect_axis(|t| gradient(p, q, x, t)[1], y - cell, y + cell) {
                y = ny;
            }
            let ng = gradient(p, q, x, y);
            if gnorm(ng) >= r || (x == bx && y == by) {
                (x, y) = (bx, by);
                break;
            }
            g = ng;
        }
    }
    (gnorm(g) <= T::epsilon() * lit(1e4) * scale * scale).then_some([x, y])
}

/// Sine of the angle between `A − B` and the surface normal at `B`.
fn alignment<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, b: SpacePoint<T>) -> T {
    let d = q.sub(b);
    let nd = norm(d);
    if nd <= T::epsilon() * (T::one() + q.magnitude()) {
        return T::zero();
    }
    let n = p.normal_at(b.x, b.y);
    norm(cross(d, n)) / (nd * norm(n))
}

/// Critical points of the squared distance from `q` on a
/// `resolution × resolution` grid over `[−w, w]²`.
pub fn critical_points<T: Real>(
    p: &Paraboloid<T>,
    q: SpacePoint<T>,
    half_width: T,
    resolution: usize,
) -> Result<OracleResult<T>> {
    let q = SpacePoint::new(q.x, q.y, q.z)?;
    if !(half_width > T::zero()) || resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "half_width {half_width} and resolution {resolution}"
        )));
    }
    let n = resolution;
    let h = (half_width + half_width) / T::from_usize(n).unwrap();
    let node = |i: usize| -half_width + h * T::from_usize(i).unwrap();
    let grid: Vec<Vec<[T; 2]>> = (0..=n)
        .into_par_iter()
        .map(|j| (0..=n).map(|i| gradient(p, q, node(i), node(j))).collect())
        .collect();

    let straddles = |vals: [T; 4]| {
        let lo = vals.iter().copied().fold(T::infinity(), T::min);
        let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
        lo <= T::zero() && hi >= T::zero()
    };
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| {
            let c = [grid[j][i], grid[j][i + 1], grid[j + 1][i], grid[j + 1][i + 1]];
            straddles(c.map(|g| g[0])) && straddles(c.map(|g| g[1]))
        })
        .collect();

    let half = h / lit(2.0);
    let refined: Vec<((usize, usize), [T; 2])> = cells
        .par_iter()
        .filter_map(|&(i, j)| refine(p, q, [node(i) + half, node(j) + half], h).map(|r| ((i, j), r)))
        .collect();

    let scale = T::one() + q.magnitude();
    let merge = lit::<T>(1e-5) * scale;
    let mut roots: Vec<[T; 2]> = Vec::new();
    let mut owner: Vec<usize> = Vec::with_capacity(refined.len());
    for (_, r) in &refined {
        match roots.iter().position(|s| gnorm([s[0] - r[0], s[1] - r[1]]) <= merge) {
            Some(k) => owner.push(k),
            None => {
                owner.push(roots.len());
                roots.push(*r);
            }
        }
    }

    // Adjacent candidate cells that polish to different roots lying within
    // a cell of both: the grid cannot tell them apart.
    for x in 0..refined.len() {
        for y in x + 1..refined.len() {
            let ((i1, j1), r1) = refined[x];
            let ((i2, j2), r2) = refined[y];
            if owner[x] == owner[y] || i1.abs_diff(i2) > 1 || j1.abs_diff(j2) > 1 {
                continue;
            }
            if gnorm([r1[0] - r2[0], r1[1] - r2[1]]) < h {
                return Err(Error::GridTooCoarse(format!(
                    "two critical points {} apart at resolution {n}",
                    gnorm([r1[0] - r2[0], r1[1] - r2[1]])
                )));
            }
        }
    }

    let mut feet: Vec<SpacePoint<T>> = roots
        .iter()
        .map(|r| SpacePoint {
            x: r[0],
            y: r[1],
            z: p.height(r[0], r[1]),
        })
        .collect();
    feet.sort_by(|u, v| (u.x, u.y).partial_cmp(&(v.x, v.y)).unwrap());
    for f in &feet {
        let r = alignment(p, q, *f);
        if r > lit::<T>(1e-6).max(T::epsilon().sqrt()) {
            return Err(Error::IllConditioned(format!("oracle foot misaligned by {r}")));
        }
    }
    let worst = feet
        .iter()
        .map(|f| gnorm(gradient(p, q, f.x, f.y)))
        .fold(T::zero(), T::max);
    Ok(OracleResult {
        count: feet.len(),
        feet,
        min_gradient_norm: worst,
        grid: n,
    })
}

pub const RESOLUTIONS: [usize; 3] = [64, 256, 1024];

/// Critical-point scan at increasing resolution until two consecutive
/// resolutions give the same count.
pub fn scan<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, half_width: Option<T>) -> Result<OracleResult<T>> {
    let w = half_width.unwrap_or_else(|| default_half_width(p, q));
    let mut counts = Vec::new();
    let mut last: Option<OracleResult<T>> = None;
    for n in RESOLUTIONS {
        let r = match critical_points(p, q, w, n) {
            Ok(r) => r,
            Err(e) if e.is_boundary_band() => {
                counts.push(0);
                last = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        counts.push(r.count);
        if last.as_ref().is_some_and(|l| l.count == r.count) {
            return Ok(r);
        }
        last = Some(r);
    }
    Err(Error::Unstable(counts))
}

/// Stable critical-point count with the default half-width.
pub fn count_from_scan<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>) -> Result<usize> {
    scan(p, q, None).map(|r| r.count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p14() -> Paraboloid<f64> {
        Paraboloid::new(1.0, 4.0).unwrap()
    }

    #[test]
    fn axis_point_has_five_feet() {
        let p = p14();
        let q = SpacePoint::new(0.0, 0.0, 5.0).unwrap();
        let r = scan(&p, q, None).unwrap();
        assert_eq!(r.count, 5);
        assert!(r.feet.iter().any(|f| f.x.abs() < 1e-12 && f.y.abs() < 1e-12));
        assert!(r.feet.iter().any(|f| (f.x - 8f64.sqrt()).abs() < 1e-9));
    }

    #[test]
    fn low_axis_point_has_one_foot() {
        let p = p14();
        let r = critical_points(&p, SpacePoint::new(0.0, 0.0, 0.1).unwrap(), 4.0, 64).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.feet[0].magnitude() < 1e-12);
    }

    #[test]
    fn hessian_matches_differences() {
        let p = p14();
        let q = SpacePoint::new(0.3, -0.2, 2.0).unwrap();
        let (x, y, e) = (0.7, 0.4, 1e-6);
        let h = hessian(&p, q, x, y);
        let gx = gradient(&p, q, x + e, y);
        let gm = gradient(&p, q, x - e, y);
        assert!(((gx[0] - gm[0]) / (2.0 * e) - h[0][0]).abs() < 1e-6);
        assert!(((gx[1] - gm[1]) / (2.0 * e) - h[1][0]).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_grid() {
        let p = p14();
        let q = SpacePoint::new(0.0, 0.0, 1.0).unwrap();
        assert!(critical_points(&p, q, 0.0, 64).is_err());
        assert!(critical_points(&p, q, 1.0, 1).is_err());
    }
}
