//! First-quadrant polygons bounded by the projected surface/caustic
//! intersection curves, used for the geometric side of on-surface
//! classification.

use serde::Serialize;

use crate::caustic::curves::{intersection_curve_point, intersection_domain};
use crate::caustic::{minimize_on, Interval, Sheet};
use crate::geometry::Paraboloid;
use crate::scalar::{lit, Real, Sign};

/// A projected intersection curve sampled in the first quadrant.
#[derive(Clone, Debug, Serialize)]
pub struct CurveTrace<T> {
    pub sheet: Sheet,
    pub params: Vec<T>,
    pub points: Vec<[T; 2]>,
}

impl<T: Real> CurveTrace<T> {
    fn sample(p: &Paraboloid<T>, sheet: Sheet, iv: Interval<T>, n: usize) -> Self {
        let eval = |t: T| intersection_curve_point(p, sheet, t, Sign::Plus, Sign::Plus).ok();
        let mut trace = CurveTrace {
            sheet,
            params: vec![],
            points: vec![],
        };
        for t in iv.linspace(n) {
            if let Some(s) = eval(t) {
                trace.params.push(t);
                trace.points.push([s.x, s.y]);
            }
        }
        // Uniform steps in t bunch up away from a pole; split long chords.
        for _ in 0..2 {
            let len: T = trace
                .points
                .windows(2)
                .fold(T::zero(), |acc, w| acc + dist2(w[0], w[1]));
            let h = len / T::from_usize(n.max(2)).unwrap();
            let mut params = vec![];
            let mut points = vec![];
            for i in 0..trace.points.len() {
                params.push(trace.params[i]);
                points.push(trace.points[i]);
                if i + 1 == trace.points.len() {
                    break;
                }
                let d = dist2(trace.points[i], trace.points[i + 1]);
                if d > h + h {
                    let k = (d / h).ceil().to_usize().unwrap_or(2).min(10 * n);
                    let sub = Interval::new(trace.params[i], trace.params[i + 1]).linspace(k + 1);
                    for &t in &sub[1..k] {
                        if let Some(s) = eval(t) {
                            params.push(t);
                            points.push([s.x, s.y]);
                        }
                    }
                }
            }
            trace.params = params;
            trace.points = points;
        }
        trace
    }

    /// Distance from `q` (first quadrant) to the polyline and the index of
    /// the nearest segment.
    fn polyline_distance(&self, q: [T; 2]) -> (T, usize) {
        let mut best = (T::infinity(), 0);
        for (i, w) in self.points.windows(2).enumerate() {
            let d = segment_distance(q, w[0], w[1]);
            if d < best.0 {
                best = (d, i);
            }
        }
        best
    }

    /// Distance to the true curve: polyline first, then a 1D minimisation
    /// over the parameter bracket around the nearest segment.
    pub fn distance(&self, p: &Paraboloid<T>, q: [T; 2]) -> T {
        if self.points.len() < 2 {
            return T::infinity();
        }
        let (d, i) = self.polyline_distance(q);
        let scale = T::one() + q[0].abs() + q[1].abs();
        if d > lit::<T>(1e-2) * scale {
            return d;
        }
        let lo = self.params[i.saturating_sub(1)];
        let hi = self.params[(i + 2).min(self.params.len() - 1)];
        let f = |t: T| {
            intersection_curve_point(p, self.sheet, t, Sign::Plus, Sign::Plus)
                .map_or(T::infinity(), |s| ((s.x - q[0]).powi(2) + (s.y - q[1]).powi(2)).sqrt())
        };
        minimize_on(Interval::new(lo, hi), 8, f).1.min(d)
    }
}

fn dist2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn segment_distance<T: Real>(q: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > T::zero() {
        (((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let (ex, ey) = (a[0] + s * dx - q[0], a[1] + s * dy - q[1]);
    (ex * ex + ey * ey).sqrt()
}

/// Even-odd ray crossing test.
pub fn point_in_polygon<T: Real>(q: [T; 2], poly: &[[T; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > q[1]) != (b[1] > q[1]) {
            let x = a[0] + (q[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if q[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Geometric region data for one paraboloid.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceRegions<T> {
    /// Sheet-2 intersection: an arc from the `x = 0` plane to `I`.
    pub loop_curve: CurveTrace<T>,
    /// Closed by the two axes through the origin; contains the vertex.
    pub loop_polygon: Vec<[T; 2]>,
    /// Sheet-1 intersection (absent when `b ≤ 2a`), from the `x = 0`
    /// plane out to beyond `far`.
    pub wedge_curve: Option<CurveTrace<T>>,
    /// Closed along the y-axis; contains the axis above its start.
    pub wedge_polygon: Vec<[T; 2]>,
}

/// Where a first-quadrant point sits relative to the two curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegionSignature {
    pub inside_loop: bool,
    pub beyond_wedge: bool,
    pub on_loop: bool,
    pub on_wedge: bool,
}

impl RegionSignature {
    /// Normal count implied by the region: 1 + 2 per crossed curve; a point
    /// on a curve has its two merging feet counted once.
    pub fn count(&self) -> usize {
        let outside = usize::from(!self.inside_loop);
        let beyond = usize::from(self.beyond_wedge);
        match (self.on_loop, self.on_wedge) {
            (true, true) => 3,
            (true, false) => 2 + 2 * beyond,
            (false, true) => 2 + 2 * outside,
            (false, false) => 1 + 2 * outside + 2 * beyond,
        }
    }
}

impl<T: Real> SurfaceRegions<T> {
    /// `far` must exceed the largest |y| that will be queried.
    pub fn new(p: &Paraboloid<T>, samples: usize, far: T) -> Self {
        let loop_iv = intersection_domain(p, Sheet::Two, T::infinity());
        let loop_curve = match loop_iv.first() {
            Some(&iv) => CurveTrace::sample(p, Sheet::Two, iv, samples),
            None => CurveTrace {
                sheet: Sheet::Two,
                params: vec![],
                points: vec![],
            },
        };
        let mut loop_polygon = vec![[T::zero(), T::zero()]];
        loop_polygon.extend(loop_curve.points.iter().copied());

        let mut wedge_curve = None;
        let mut wedge_polygon = vec![];
        let mut z_max = p.b() * far * far;
        for _ in 0..40 {
            let Some(&iv) = intersection_domain(p, Sheet::One, z_max).first() else { break };
            let c = CurveTrace::sample(p, Sheet::One, iv, samples);
            let done = c.points.len() > 1 && c.points.last().is_some_and(|q| q[1] > far);
            if done {
                let top = c.points.last().unwrap()[1];
                wedge_polygon = c.points.clone();
                wedge_polygon.push([T::zero(), top]);
                wedge_curve = Some(c);
                break;
            }
            z_max = z_max * lit(4.0);
        }
        SurfaceRegions {
            loop_curve,
            loop_polygon,
            wedge_curve,
            wedge_polygon,
        }
    }

    pub fn signature(&self, p: &Paraboloid<T>, x: T, y: T, on_band: T) -> RegionSignature {
        let q = [x.abs(), y.abs()];
        let d_loop = self.loop_curve.distance(p, q);
        let d_wedge = self.wedge_curve.as_ref().map_or(T::infinity(), |c| c.distance(p, q));
        RegionSignature {
            inside_loop: point_in_polygon(q, &self.loop_polygon),
            beyond_wedge: self.beyond_wedge(q),
            on_loop: d_loop <= on_band,
            on_wedge: d_wedge <= on_band,
        }
    }

    fn beyond_wedge(&self, q: [T; 2]) -> bool {
        let Some(c) = &self.wedge_curve else { return false };
        let n = c.points.len();
        let (p0, p1) = (c.points[n - 2], c.points[n - 1]);
        if q[1] >= p1[1] {
            // Past the sampled part: continue along the last chord.
            return q[0] < p1[0] + (q[1] - p1[1]) * (p1[0] - p0[0]) / (p1[1] - p0[1]);
        }
        point_in_polygon(q, &self.wedge_polygon)
    }

    /// Polyline distance to the nearer curve, without refinement.
    pub fn coarse_distance(&self, x: T, y: T) -> T {
        let q = [x.abs(), y.abs()];
        let d1 = if self.loop_curve.points.len() > 1 {
            self.loop_curve.polyline_distance(q).0
        } else {
            T::infinity()
        };
        let d2 = self
            .wedge_curve
            .as_ref()
            .map_or(T::infinity(), |c| c.polyline_distance(q).0);
        d1.min(d2)
    }
}
