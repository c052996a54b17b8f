//! Triangle meshes of the paraboloid and the caustic sheets, and sampled
//! polylines of the curves on them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::caustic::curves::{intersection_curve_point, intersection_domain, plane_curve_point, PlaneCurve};
use crate::caustic::nodal::{caspari_domain, nodal_point_caspari, nodal_point_uv, nodal_uv_domain};
use crate::caustic::{caustic_point, Interval, Sheet, SheetCoords};
use crate::error::{Error, Result};
use crate::geometry::{cross, norm, Paraboloid, SpacePoint};
use crate::scalar::{lit, Real, Sign};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Mesh<T> {
    pub vertices: Vec<SpacePoint<T>>,
    pub triangles: Vec<[usize; 3]>,
    /// 0 for the paraboloid, else the caustic sheet.
    pub sheet: Vec<u8>,
    /// Parabolic coordinates on the paraboloid, sheet parameters on a sheet.
    pub uv: Vec<[T; 2]>,
}

const FLAT: f64 = 1e-14;
const WELD: f64 = 1e-9;

fn area<T: Real>(p: SpacePoint<T>, q: SpacePoint<T>, r: SpacePoint<T>) -> T {
    norm(cross(q.sub(p), r.sub(p))) / lit(2.0)
}

impl<T: Real> Mesh<T> {
    /// Index check and degenerate-triangle check.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.sheet.len() != n || self.uv.len() != n {
            return Err(Error::InvalidArgument("attribute length mismatch".into()));
        }
        for t in &self.triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidArgument(format!("triangle {t:?} out of range")));
            }
            let [i, j, k] = *t;
            if area(self.vertices[i], self.vertices[j], self.vertices[k]) <= lit(FLAT) {
                return Err(Error::InvalidArgument(format!("degenerate triangle {t:?}")));
            }
        }
        Ok(())
    }

    /// Edges used by exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut uses: HashMap<[usize; 2], usize> = HashMap::new();
        for t in &self.triangles {
            for e in [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]] {
                *uses.entry([e[0].min(e[1]), e[0].max(e[1])]).or_default() += 1;
            }
        }
        let mut out: Vec<_> = uses.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        out.sort_unstable();
        out
    }
}

/// Collects four mirrored copies of one quadrant grid, welding vertices
/// that coincide on the coordinate planes.
struct Builder<T> {
    mesh: Mesh<T>,
    index: HashMap<[i64; 3], Vec<usize>>,
}

impl<T: Real> Builder<T> {
    fn new() -> Self {
        Builder {
            mesh: Mesh::default(),
            index: HashMap::new(),
        }
    }

    fn key(q: SpacePoint<T>) -> [i64; 3] {
        let w = lit::<T>(WELD);
        [q.x, q.y, q.z].map(|c| (c / w).round().to_i64().unwrap_or(i64::MAX))
    }

    fn vertex(&mut self, q: SpacePoint<T>, sheet: u8, uv: [T; 2]) -> usize {
        let k = Self::key(q);
        let tol = lit::<T>(WELD) * (T::one() + q.magnitude());
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let kk = [k[0] + dx, k[1] + dy, k[2] + dz];
                    if let Some(ids) = self.index.get(&kk) {
                        if let Some(&i) = ids.iter().find(|&&i| self.mesh.vertices[i].dist(q) <= tol) {
                            return i;
                        }
                    }
                }
            }
        }
        let i = self.mesh.vertices.len();
        self.mesh.vertices.push(q);
        self.mesh.sheet.push(sheet);
        self.mesh.uv.push(uv);
        self.index.entry(k).or_default().push(i);
        i
    }

    fn triangle(&mut self, t: [usize; 3]) {
        let v = &self.mesh.vertices;
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && area(v[t[0]], v[t[1]], v[t[2]]) > lit(FLAT) {
            self.mesh.triangles.push(t);
        }
    }

    /// `grid[j][i]` is a first-quadrant point with its attribute.
    fn add_quadrants(&mut self, grid: &[Vec<(SpacePoint<T>, [T; 2])>], sheet: u8) {
        let quadrants = [
            (Sign::Plus, Sign::Plus),
            (Sign::Minus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
            (Sign::Plus, Sign::Minus),
        ];
        for (sx, sy) in quadrants {
            let ids: Vec<Vec<usize>> = grid
                .iter()
                .map(|row| row.iter().map(|&(q, uv)| self.vertex(q.mirrored(sx, sy), sheet, uv)).collect())
                .collect();
            let flip = (sx == Sign::Minus) != (sy == Sign::Minus);
            for j in 0..ids.len() - 1 {
                for i in 0..ids[j].len() - 1 {
                    let (a, b, c, d) = (ids[j][i], ids[j][i + 1], ids[j + 1][i + 1], ids[j + 1][i]);
                    for mut t in [[a, b, c], [a, c, d]] {
                        if flip {
                            t.swap(1, 2);
                        }
                        self.triangle(t);
                    }
                }
            }
        }
    }
}

/// The paraboloid over `|x|, |y| ≤ x_max` on an `n × n` grid per quadrant.
pub fn tessellate_paraboloid<T: Real>(p: &Paraboloid<T>, x_max: T, n: usize) -> Result<Mesh<T>> {
    if n < 2 || !(x_max > T::zero()) {
        return Err(Error::InvalidArgument(format!("n = {n}, x_max = {x_max}")));
    }
    let axis = Interval::new(T::zero(), x_max).linspace(n);
    let grid: Vec<Vec<_>> = axis
        .iter()
        .map(|&y| {
            axis.iter()
                .map(|&x| {
                    let q = SpacePoint::new(x, y, p.height(x, y))?;
                    let c = p.parabolic_from_surface(q)?;
                    Ok((q, [c.u, c.v]))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut b = Builder::new();
    b.add_quadrants(&grid, 0);
    Ok(b.mesh)
}

/// One caustic sheet over `u ∈ [1/a, u_max]`, `v ∈ [−1/a, −1/b]`. The
/// rectangle edges are where a radicand vanishes, so the cusp ridges are
/// grid lines and the quadrant seams.
pub fn tessellate_caustic<T: Real>(p: &Paraboloid<T>, sheet: Sheet, u_max: T, n: usize) -> Result<Mesh<T>> {
    let (ia, ib) = (p.a().recip(), p.b().recip());
    if n < 2 || !(u_max > ia) {
        return Err(Error::InvalidArgument(format!("n = {n}, u_max = {u_max}")));
    }
    let us = Interval::new(ia, u_max).linspace(n);
    let vs = Interval::new(-ia, -ib).linspace(n);
    let mut grid = Vec::with_capacity(n);
    for (j, &v) in vs.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for (i, &u) in us.iter().enumerate() {
            let mut q = caustic_point(p, SheetCoords::new(sheet, u, v), Sign::Plus, Sign::Plus)?;
            // Exact zeros on the seams so that mirrored copies weld.
            if i == 0 || j == 0 {
                q.x = T::zero();
            }
            if j == n - 1 {
                q.y = T::zero();
            }
            row.push((q, [u, v]));
        }
        grid.push(row);
    }
    let mut b = Builder::new();
    b.add_quadrants(&grid, sheet.index());
    Ok(b.mesh)
}

/// Curves that can be sampled and exported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveSpec {
    /// Surface/caustic intersection in the parameter of one sheet's
    /// formula; id 8 for sheet 1, 9 for sheet 2.
    Intersection(Sheet),
    /// Nodal curve, two-double-root parametrization in `t ∈ [δ, 2δ]`.
    Nodal,
    /// Nodal curve through the sheet-2 parameters.
    NodalUv,
    Plane(PlaneCurve),
}

impl CurveSpec {
    pub fn all() -> Vec<CurveSpec> {
        let mut v = vec![
            CurveSpec::Intersection(Sheet::One),
            CurveSpec::Intersection(Sheet::Two),
            CurveSpec::Nodal,
            CurveSpec::NodalUv,
        ];
        v.extend(PlaneCurve::ALL.map(CurveSpec::Plane));
        v
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSpec::Intersection(Sheet::One) => f.write_str("8"),
            CurveSpec::Intersection(Sheet::Two) => f.write_str("9"),
            CurveSpec::Nodal => f.write_str("nodal"),
            CurveSpec::NodalUv => f.write_str("nodal-uv"),
            CurveSpec::Plane(c) => write!(f, "{}", c.id()),
        }
    }
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown curve id `{s}`"));
        match s {
            "8" => Ok(CurveSpec::Intersection(Sheet::One)),
            "9" => Ok(CurveSpec::Intersection(Sheet::Two)),
            "nodal" => Ok(CurveSpec::Nodal),
            "nodal-uv" => Ok(CurveSpec::NodalUv),
            _ => s
                .parse::<u8>()
                .ok()
                .and_then(PlaneCurve::from_id)
                .map(CurveSpec::Plane)
                .ok_or_else(bad),
        }
    }
}

impl Serialize for CurveSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One connected run of samples; runs are never joined across a gap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolylinePiece<T> {
    pub signs: [Sign; 2],
    /// Sheet the run lies on, for caustic curves.
    pub sheet: Option<Sheet>,
    pub range: Interval<T>,
    pub params: Vec<T>,
    pub points: Vec<SpacePoint<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline<T> {
    pub curve: CurveSpec,
    pub pieces: Vec<PolylinePiece<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveOptions<T> {
    /// Base number of samples per run before chord refinement.
    pub n: usize,
    /// Unbounded curves are cut at this height.
    pub z_max: T,
}

impl<T: Real> CurveOptions<T> {
    pub fn new(p: &Paraboloid<T>, n: usize) -> Self {
        CurveOptions {
            n,
            z_max: lit::<T>(6.0) / p.a(),
        }
    }
}

/// `n` uniform parameters, then chords longer than twice the mean are split
/// until none is.
fn adaptive<T: Real>(iv: Interval<T>, n: usize, f: &dyn Fn(T) -> Option<SpacePoint<T>>) -> (Vec<T>, Vec<SpacePoint<T>>) {
    let mut samples: Vec<(T, SpacePoint<T>)> = iv.linspace(n).into_iter().filter_map(|t| f(t).map(|q| (t, q))).collect();
    let len = samples.windows(2).fold(T::zero(), |s, w| s + w[0].1.dist(w[1].1));
    let h = lit::<T>(2.0) * len / T::from_usize(n.max(2)).unwrap();
    for _ in 0..12 {
        let mut out = Vec::with_capacity(samples.len());
        let mut split = false;
        for w in samples.windows(2) {
            out.push(w[0]);
            if w[0].1.dist(w[1].1) > h {
                let t = w[0].0 + (w[1].0 - w[0].0) / lit(2.0);
                if let Some(q) = f(t) {
                    out.push((t, q));
                    split = true;
                }
            }
        }
        if let Some(&last) = samples.last() {
            out.push(last);
        }
        samples = out;
        if !split {
            break;
        }
    }
    samples.into_iter().unzip()
}

const QUADRANTS: [[Sign; 2]; 4] = [
    [Sign::Plus, Sign::Plus],
    [Sign::Minus, Sign::Plus],
    [Sign::Minus, Sign::Minus],
    [Sign::Plus, Sign::Minus],
];

/// Samples a curve on its real domain, one run per domain component and
/// sign choice. Fails when the domain is empty.
pub fn sample_curve<T: Real>(p: &Paraboloid<T>, curve: CurveSpec, opts: &CurveOptions<T>) -> Result<Polyline<T>> {
    if opts.n < 2 {
        return Err(Error::InvalidArgument(format!("n = {}", opts.n)));
    }
    let mut pieces = Vec::new();
    let mut push = |signs: [Sign; 2], sheet: Option<Sheet>, iv: Interval<T>, f: &dyn Fn(T) -> Option<SpacePoint<T>>| {
        let (params, points) = adaptive(iv, opts.n, f);
        if points.len() >= 2 {
            pieces.push(PolylinePiece {
                signs,
                sheet,
                range: iv,
                params,
                points,
            });
        }
    };
    match curve {
        CurveSpec::Intersection(formula) => {
            // The other sheet's run is the same formula at the negated parameter.
            for on in Sheet::BOTH {
                let flip = if on == formula { T::one() } else { -T::one() };
                for iv in intersection_domain(p, on, opts.z_max) {
                    let (lo, hi) = (iv.lo * flip, iv.hi * flip);
                    let iv = Interval::new(lo.min(hi), lo.max(hi));
                    for [sx, sy] in QUADRANTS {
                        push([sx, sy], Some(on), iv, &|t| {
                            intersection_curve_point(p, formula, t, sx, sy).ok()
                        });
                    }
                }
            }
        }
        CurveSpec::Nodal | CurveSpec::NodalUv => {
            let domains = if curve == CurveSpec::Nodal {
                caspari_domain(p)
            } else {
                nodal_uv_domain(p)
            };
            for iv in domains {
                for [sx, sy] in QUADRANTS {
                    if curve == CurveSpec::Nodal {
                        push([sx, sy], None, iv, &|t| nodal_point_caspari(p, t, sx, sy).ok());
                    } else {
                        push([sx, sy], None, iv, &|t| nodal_point_uv(p, t, sx, sy).ok());
                    }
                }
            }
        }
        CurveSpec::Plane(c) => {
            let hi = c.t_max(p);
            let lo = c.t_at_height(p, opts.z_max);
            if lo < hi {
                for s in Sign::BOTH {
                    let signs = if c.in_yz() { [Sign::Plus, s] } else { [s, Sign::Plus] };
                    push(signs, None, Interval::new(lo, hi), &|t| plane_curve_point(p, c, t, s).ok());
                }
            }
        }
    }
    if pieces.is_empty() {
        return Err(Error::Domain(format!("curve {curve} has no real points below z = {}", opts.z_max)));
    }
    Ok(Polyline { curve, pieces })
}

/// A chain of runs joined end to end.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain<T> {
    pub points: Vec<SpacePoint<T>>,
    pub closed: bool,
}

impl<T: Real> Polyline<T> {
    /// Joins runs whose ends coincide within `tol`, reversing runs as
    /// needed. Runs that only touch another run's interior stay separate.
    pub fn stitched(&self, tol: T) -> Vec<Chain<T>> {
        let mut left: Vec<Vec<SpacePoint<T>>> = self.pieces.iter().map(|p| p.points.clone()).collect();
        let mut chains = Vec::new();
        while let Some(mut chain) = (!left.is_empty()).then(|| left.remove(0)) {
            loop {
                let head = chain[0];
                let tail = *chain.last().unwrap();
                if chain.len() > 2 && head.dist(tail) <= tol {
                    break;
                }
                let Some(k) = left.iter().position(|r| {
                    let (s, e) = (r[0], *r.last().unwrap());
                    s.dist(tail) <= tol || e.dist(tail) <= tol || s.dist(head) <= tol || e.dist(head) <= tol
                }) else {
                    break;
                };
                let mut r = left.remove(k);
                if r[0].dist(tail) <= tol {
                    chain.extend(r.drain(1..));
                } else if r.last().unwrap().dist(tail) <= tol {
                    r.reverse();
                    chain.extend(r.drain(1..));
                } else {
                    if r[0].dist(head) <= tol {
                        r.reverse();
                    }
                    r.pop();
                    r.extend(chain);
                    chain = r;
                }
            }
            let closed = chain.len() > 2 && chain[0].dist(*chain.last().unwrap()) <= tol;
            chains.push(Chain { points: chain, closed });
        }
        chains
    }

    pub fn point_count(&self) -> usize {
        self.pieces.iter().map(|p| p.points.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p14() -> Paraboloid<f64> {
        Paraboloid::new(1.0, 4.0).unwrap()
    }

    #[test]
    fn minimal_paraboloid_mesh() {
        let m = tessellate_paraboloid(&p14(), 1.0, 2).unwrap();
        m.validate().unwrap();
        assert_eq!(m.vertices.len(), 9);
        assert_eq!(m.triangles.len(), 8);
        assert_eq!(m.boundary_edges().len(), 8);
    }

    #[test]
    fn caustic_mesh_is_valid() {
        let p = p14();
        for sheet in Sheet::BOTH {
            let m = tessellate_caustic(&p, sheet, 3.0, 16).unwrap();
            m.validate().unwrap();
            assert!(m.sheet.iter().all(|&s| s == sheet.index()));
        }
        assert!(tessellate_caustic(&p, Sheet::One, 0.5, 16).is_err());
        assert!(tessellate_paraboloid(&p, 1.0, 1).is_err());
    }

    #[test]
    fn curve_ids_round_trip() {
        for c in CurveSpec::all() {
            assert_eq!(c.to_string().parse::<CurveSpec>().unwrap(), c);
        }
        assert!("10".parse::<CurveSpec>().is_err());
        assert!("x".parse::<CurveSpec>().is_err());
    }

    #[test]
    fn adaptive_splits_long_chords() {
        let (t, q) = adaptive(Interval::new(0.0, 1.0), 10, &|t: f64| SpacePoint::new(t.powi(8) * 100.0, 0.0, 0.0).ok());
        assert!(t.len() > 10);
        let len: f64 = q.windows(2).map(|w| w[0].dist(w[1])).sum();
        assert!(q.windows(2).all(|w| w[0].dist(w[1]) <= 2.0 * len / 10.0));
    }
}
