//! Feet of the normals of the paraboloid that pass through a query point.
//!
//! A foot `B` of a normal through `A = (l, m, n)` satisfies `A − B = −t·N(B)`,
//! so `B = (l/(1+at), m/(1+bt), n+t)` and `t` is a root of a quintic. Feet
//! whose `t` sits close to a pole `−1/a` or `−1/b` are badly conditioned in
//! `t`, so they are taken from the same equation written in `x` (or `y`).
//! Queries on the coordinate planes go through the plane-section cubic plus
//! the asymptote feet.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cross, norm, Paraboloid, SpacePoint};
use crate::parabola2d::{Parabola2, PlanePoint};
use crate::polyroots::{isolate_real_roots, isolate_uncertified, Polynomial, Root, RootSet, RootTolerance};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions<T> {
    pub roots: RootTolerance<T>,
    /// `|l| ≤ degenerate·(1+|m|+|n|)` routes to the plane-section branch.
    pub degenerate: T,
    /// Feet with `|1 + a t| ≤ pole_window` come from the x-space quintic.
    pub pole_window: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            roots: RootTolerance::default(),
            degenerate: lit::<T>(1e-12).max(T::epsilon() * lit(8.0)),
            pole_window: lit(1e-3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    General,
    /// `l = 0`
    XPlane,
    /// `m = 0`
    YPlane,
    /// `l = m = 0`
    Axis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FootSource {
    Quintic,
    NearPoleA,
    NearPoleB,
    InPlane,
    OffPlane,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Foot<T> {
    pub point: SpacePoint<T>,
    pub t: T,
    pub multiplicity: u32,
    pub source: FootSource,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalBundle<T> {
    pub query: SpacePoint<T>,
    pub degeneracy: Degeneracy,
    /// Parameters `t` with multiplicities.
    pub roots: RootSet<T>,
    pub feet: Vec<Foot<T>>,
    /// Feet on the asymptote lines (coordinate-plane queries only).
    pub degenerate_feet: Vec<SpacePoint<T>>,
    /// Foot multiplicities, largest first.
    pub pattern: Vec<u32>,
}

impl<T: Real> NormalBundle<T> {
    pub fn count(&self) -> usize {
        self.feet.len()
    }

    pub fn on_boundary(&self) -> bool {
        self.pattern.first().is_some_and(|&m| m > 1)
    }
}

/// The cleared normal equation
/// `2ab(t+n)(t+1/a)²(t+1/b)² − b l²(t+1/b)² − a m²(t+1/a)²`.
pub fn normal_equation<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>) -> Result<Polynomial<T>> {
    let opts = SolverOptions::<T>::default();
    if degeneracy(q, opts.degenerate) != Degeneracy::General {
        return Err(Error::DegenerateQuery("l·m = 0: use concurrent_normals"));
    }
    Ok(t_quintic(p, q))
}

pub fn t_quintic<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>) -> Polynomial<T> {
    let (a, b) = (p.a(), p.b());
    let (l, m, n) = (q.x, q.y, q.z);
    let pa = Polynomial::linear(a.recip(), T::one());
    let pb = Polynomial::linear(b.recip(), T::one());
    let pa2 = &pa * &pa;
    let pb2 = &pb * &pb;
    let lead = &Polynomial::linear(n, T::one()).scale(lit::<T>(2.0) * a * b) * &(&pa2 * &pb2);
    let rhs = &pb2.scale(b * l * l) + &pa2.scale(a * m * m);
    &lead - &rhs
}

/// The normal equation in the foot's x-coordinate (roots never at a pole):
/// `2anxD² + 2(l−x)D² − a²x³D² − a³bm²x³`, `D = (a−b)x + bl`.
pub fn x_quintic<T: Real>(a: T, b: T, l: T, m: T, n: T) -> Polynomial<T> {
    let two = lit::<T>(2.0);
    let d = Polynomial::linear(b * l, a - b);
    let d2 = &d * &d;
    let x = Polynomial::linear(T::zero(), T::one());
    let x3 = Polynomial::new(vec![T::zero(), T::zero(), T::zero(), T::one()]).unwrap();
    let inner = &(&x.scale(two * a * n) + &Polynomial::linear(two * l, -two)) - &x3.scale(a * a);
    &(&inner * &d2) - &x3.scale(a * a * a * b * m * m)
}

fn degeneracy<T: Real>(q: SpacePoint<T>, tol: T) -> Degeneracy {
    let l0 = q.x.abs() <= tol * (T::one() + q.y.abs() + q.z.abs());
    let m0 = q.y.abs() <= tol * (T::one() + q.x.abs() + q.z.abs());
    match (l0, m0) {
        (false, false) => Degeneracy::General,
        (true, false) => Degeneracy::XPlane,
        (false, true) => Degeneracy::YPlane,
        (true, true) => Degeneracy::Axis,
    }
}

/// All feet of normals through `q`.
pub fn concurrent_normals<T: Real>(
    p: &Paraboloid<T>,
    q: SpacePoint<T>,
    opts: &SolverOptions<T>,
) -> Result<NormalBundle<T>> {
    let q = SpacePoint::new(q.x, q.y, q.z)?;
    let deg = degeneracy(q, opts.degenerate);
    let (feet, degenerate_feet) = match deg {
        Degeneracy::General => (general_feet(p, q, opts)?, vec![]),
        Degeneracy::XPlane | Degeneracy::Axis => plane_feet(p, q, opts, false),
        Degeneracy::YPlane => plane_feet(p, q, opts, true),
    };
    let mut feet = merge_feet(feet, opts.roots.merge);
    feet.sort_by(|u, v| {
        (u.t, u.point.x, u.point.y)
            .partial_cmp(&(v.t, v.point.x, v.point.y))
            .unwrap()
    });
    let roots = RootSet::from_roots(
        feet.iter()
            .map(|f| Root {
                value: f.t,
                multiplicity: f.multiplicity,
            })
            .collect(),
        opts.roots.merge,
    );
    let mut pattern: Vec<u32> = feet.iter().map(|f| f.multiplicity).collect();
    pattern.sort_unstable_by(|x, y| y.cmp(x));
    let total: u32 = pattern.iter().sum();
    if feet.is_empty() || total > 5 {
        return Err(Error::IllConditioned(format!(
            "{} feet with total multiplicity {total}",
            feet.len()
        )));
    }
    Ok(NormalBundle {
        query: q,
        degeneracy: deg,
        roots,
        feet,
        degenerate_feet,
        pattern,
    })
}

/// `(count, on_boundary)`.
pub fn count_normals<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, opts: &SolverOptions<T>) -> Result<(usize, bool)> {
    let nb = concurrent_normals(p, q, opts)?;
    Ok((nb.count(), nb.on_boundary()))
}

fn solve<T: Real>(poly: &Polynomial<T>, tol: &RootTolerance<T>, strict: bool) -> Result<RootSet<T>> {
    match isolate_real_roots(poly, tol) {
        Err(Error::IllConditioned(_)) if !strict => Ok(isolate_uncertified(poly, tol)),
        r => r,
    }
}

fn general_feet<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, opts: &SolverOptions<T>) -> Result<Vec<Foot<T>>> {
    let (a, b) = (p.a(), p.b());
    let (l, m, n) = (q.x, q.y, q.z);
    let eta = opts.pole_window;
    let scale = T::one() + q.magnitude();
    // Near a coordinate plane a Sturm mismatch in t comes from the pole
    // clusters, which are re-solved in x or y below.
    let near_plane = l.abs().min(m.abs()) <= eta * scale;

    let mut feet = Vec::new();
    let tq = t_quintic(p, q);
    for r in &solve(&tq, &opts.roots, !near_plane)?.roots {
        let t = r.value;
        let (da, db) = (T::one() + a * t, T::one() + b * t);
        if da.abs() <= eta || db.abs() <= eta {
            continue;
        }
        feet.push(Foot {
            point: SpacePoint::new(l / da, m / db, n + t)?,
            t,
            multiplicity: r.multiplicity,
            source: FootSource::Quintic,
        });
    }
    let window = eta * (T::one() + lit(1e-6));
    let two = lit::<T>(2.0);
    // Pole −1/a in x, pole −1/b in y (same equation with the axes swapped).
    for swap in [false, true] {
        let (ca, cb, cl, cm) = if swap { (b, a, m, l) } else { (a, b, l, m) };
        // Feet obey |x| ≤ max(|l|, √(2n/a)); near-pole ones have |x| ≥ |l|/η.
        let reach = (two * n.max(T::zero()) / ca).sqrt() * lit(1.01);
        if cl.abs() > eta * reach {
            continue;
        }
        let xq = x_quintic(ca, cb, cl, cm, n);
        for r in &solve(&xq, &opts.roots, false)?.roots {
            let x = r.value;
            if x == T::zero() || (cl / x).abs() > window {
                continue;
            }
            let t = (cl / x - T::one()) / ca;
            let y = cm / (T::one() + cb * t);
            let (fx, fy) = if swap { (y, x) } else { (x, y) };
            feet.push(Foot {
                point: SpacePoint::new(fx, fy, n + t)?,
                t,
                multiplicity: r.multiplicity,
                source: if swap { FootSource::NearPoleB } else { FootSource::NearPoleA },
            });
        }
    }
    Ok(feet)
}

/// Feet for `l = 0` (or `m = 0` when `swap`): the plane-section cubic plus
/// the pair on the asymptote at `t = −1/a` (resp. `−1/b`).
fn plane_feet<T: Real>(
    p: &Paraboloid<T>,
    q: SpacePoint<T>,
    opts: &SolverOptions<T>,
    swap: bool,
) -> (Vec<Foot<T>>, Vec<SpacePoint<T>>) {
    // In the swapped frame the section plane is always "x = 0" with
    // in-plane curvature `cb` and off-plane curvature `ca`.
    let (ca, cb, cm) = if swap { (p.b(), p.a(), q.x) } else { (p.a(), p.b(), q.y) };
    let n = q.z;
    let two = lit::<T>(2.0);
    let unswap = |x: T, y: T, z: T| {
        if swap {
            SpacePoint { x: y, y: x, z }
        } else {
            SpacePoint { x, y, z }
        }
    };
    let section = Parabola2::new(cb).expect("positive curvature");
    let rs = section.normal_feet_2d(PlanePoint { x: cm, y: n });
    let mut feet: Vec<Foot<T>> = rs
        .roots
        .iter()
        .map(|r| {
            let z = cb * r.value * r.value / two;
            Foot {
                point: unswap(T::zero(), r.value, z),
                t: z - n,
                multiplicity: r.multiplicity,
                source: FootSource::InPlane,
            }
        })
        .collect();

    let y0 = cm * ca / (ca - cb);
    let z0 = n - ca.recip();
    let x2 = (two * z0 - cb * y0 * y0) / ca;
    let merge = opts.roots.merge * (T::one() + y0.abs() + z0.abs());
    let mut off = Vec::new();
    if x2 > merge * merge {
        let x = x2.sqrt();
        for s in [x, -x] {
            let pt = unswap(s, y0, z0);
            off.push(pt);
            feet.push(Foot {
                point: pt,
                t: -ca.recip(),
                multiplicity: 1,
                source: FootSource::OffPlane,
            });
        }
    } else if x2 >= -merge * merge {
        // The pair has closed up on the section plane.
        let pt = unswap(T::zero(), y0, z0);
        off.push(pt);
        feet.push(Foot {
            point: pt,
            t: -ca.recip(),
            multiplicity: 2,
            source: FootSource::OffPlane,
        });
    }
    (feet, off)
}

fn merge_feet<T: Real>(feet: Vec<Foot<T>>, merge: T) -> Vec<Foot<T>> {
    let mut out: Vec<Foot<T>> = Vec::with_capacity(feet.len());
    for f in feet {
        let hit = out.iter_mut().find(|g| {
            g.point.dist(f.point) <= merge * (T::one() + g.point.magnitude().max(f.point.magnitude()))
        });
        match hit {
            Some(g) => {
                // Two solvers reporting one foot at the window edge count once.
                let overlap = (g.source == FootSource::Quintic) != (f.source == FootSource::Quintic)
                    && ![g.source, f.source].iter().any(|s| matches!(s, FootSource::InPlane | FootSource::OffPlane));
                let total = if overlap {
                    g.multiplicity.max(f.multiplicity)
                } else {
                    g.multiplicity + f.multiplicity
                };
                if f.multiplicity > g.multiplicity {
                    g.point = f.point;
                    g.t = f.t;
                    g.source = f.source;
                }
                g.multiplicity = total;
            }
            None => out.push(f),
        }
    }
    out
}

/// `|(A − B) × N| / (|A − B||N|)`, zero when the normal at `B` passes through `A`.
pub fn alignment_residual<T: Real>(p: &Paraboloid<T>, q: SpacePoint<T>, foot: SpacePoint<T>) -> T {
    let d = q.sub(foot);
    let n = p.normal_at(foot.x, foot.y);
    let dn = norm(d);
    if dn == T::zero() {
        return T::zero();
    }
    norm(cross(d, n)) / (dn * norm(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p14() -> Paraboloid<f64> {
        Paraboloid::new(1.0, 4.0).unwrap()
    }

    fn pt(x: f64, y: f64, z: f64) -> SpacePoint<f64> {
        SpacePoint::new(x, y, z).unwrap()
    }

    fn bundle(q: SpacePoint<f64>) -> NormalBundle<f64> {
        concurrent_normals(&p14(), q, &SolverOptions::default()).unwrap()
    }

    fn check_feet(p: &Paraboloid<f64>, nb: &NormalBundle<f64>) {
        for f in &nb.feet {
            assert!(p.residual(f.point) < 1e-9, "off surface {:?}", f);
            assert!(alignment_residual(p, nb.query, f.point) < 1e-8, "misaligned {:?}", f);
        }
    }

    #[test]
    fn quintic_leading_coefficient() {
        let q = normal_equation(&p14(), pt(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(q.degree(), 5);
        assert_eq!(q.leading(), 8.0);
        assert!(matches!(
            normal_equation(&p14(), pt(0.0, 1.0, 0.0)),
            Err(Error::DegenerateQuery(_))
        ));
    }

    #[test]
    fn quintic_roots_give_surface_points() {
        let p = p14();
        let q = pt(0.1, 0.1, 5.0);
        let poly = normal_equation(&p, q).unwrap();
        let rs = isolate_real_roots(&poly, &RootTolerance::default()).unwrap();
        assert_eq!(rs.distinct(), 5);
        for t in rs.values() {
            let b = pt(0.1 / (1.0 + t), 0.1 / (1.0 + 4.0 * t), 5.0 + t);
            assert!(p.residual(b) < 1e-12);
        }
    }

    #[test]
    fn axis_counts() {
        assert_eq!(bundle(pt(0.0, 0.0, 0.1)).count(), 1);
        assert_eq!(bundle(pt(0.0, 0.0, 0.5)).count(), 3);
        assert_eq!(bundle(pt(0.0, 0.0, 5.0)).count(), 5);
        let v_b = bundle(pt(0.0, 0.0, 0.25));
        assert_eq!((v_b.count(), v_b.pattern.clone()), (1, vec![3]));
        let v_a = bundle(pt(0.0, 0.0, 1.0));
        assert_eq!((v_a.count(), v_a.pattern.clone()), (3, vec![3, 1, 1]));
        for n in [0.1, 0.5, 1.0, 5.0] {
            check_feet(&p14(), &bundle(pt(0.0, 0.0, n)));
        }
    }

    #[test]
    fn curvature_center_is_a_double_root() {
        let p = p14();
        let (c1, c2) = p.curvature_centers(0.3, 0.2);
        for c in [c1, c2] {
            let nb = bundle(c);
            check_feet(&p, &nb);
            let d = nb.feet.iter().find(|f| f.multiplicity >= 2).expect("double foot");
            assert!((d.point.x - 0.3).abs() < 1e-6 && (d.point.y - 0.2).abs() < 1e-6);
        }
    }

    #[test]
    fn near_plane_queries_match_plane_branch() {
        let p = p14();
        for n in [0.5, 2.0, 5.0] {
            let exact = bundle(pt(0.0, 0.3, n));
            for l in [1e-4, 1e-7, 1e-10] {
                let near = bundle(pt(l, 0.3, n));
                check_feet(&p, &near);
                assert_eq!(near.count(), exact.count(), "l = {l}, n = {n}");
            }
        }
    }

    #[test]
    fn mirror_equivariance() {
        let a = bundle(pt(0.7, -0.4, 2.3));
        let b = bundle(pt(-0.7, -0.4, 2.3));
        assert_eq!(a.count(), b.count());
        for (fa, fb) in a.feet.iter().zip(&b.feet) {
            assert!((fa.point.x + fb.point.x).abs() < 1e-10);
            assert!((fa.point.y - fb.point.y).abs() < 1e-10);
        }
    }

    #[test]
    fn single_precision() {
        let p = Paraboloid::<f32>::new(1.0, 4.0).unwrap();
        let nb = concurrent_normals(&p, SpacePoint::new(0.1, 0.1, 5.0).unwrap(), &SolverOptions::default()).unwrap();
        assert_eq!(nb.count(), 5);
    }
}
