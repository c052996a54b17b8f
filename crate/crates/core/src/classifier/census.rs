//! Region census: classify a jittered grid on the paraboloid and count the
//! connected groups of equal normal count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CaseClass, Classifier};
use crate::caustic::points::Label;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            samples: 20_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRegion<T> {
    pub count: usize,
    pub cells: usize,
    /// A sample inside the region.
    pub representative: [T; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport<T> {
    pub case: CaseClass,
    pub grid: [usize; 2],
    /// Half-widths of the sampled window in x and y.
    pub window: [T; 2],
    pub region_count: usize,
    pub regions: Vec<CensusRegion<T>>,
    /// Distinct counts over all regions, ascending.
    pub counts: Vec<usize>,
    /// Cells left out: solver failures, double feet, disagreement with the
    /// geometric answer, or a neighbourhood of a curve crossing.
    pub excluded: usize,
    pub disagreements: usize,
}

/// Window half-widths covering every real point where a curve meets a
/// coordinate plane or another curve, with a 50% margin.
fn window<T: Real>(c: &Classifier<T>) -> [T; 2] {
    use Label::*;
    let reach = |labels: &[Label], y: bool| {
        labels
            .iter()
            .filter_map(|&l| c.point(l))
            .fold(T::zero(), |m, q| m.max(if y { q.y.abs() } else { q.x.abs() }))
    };
    let wx = reach(&[I1, E1], false);
    let wy = reach(&[F1, G1, E1, H1], true);
    let k = lit::<T>(1.5);
    [k * wx, k * wy]
}

/// Count off the curves along the segment `p → q`, or `None` if it changes.
fn walk_count<T: Real>(c: &Classifier<T>, p: [T; 2], q: [T; 2], step: T) -> Option<usize> {
    let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
    let steps = (len / step).ceil().to_usize().unwrap_or(0).max(16);
    let at = |k: usize| {
        let f = T::from_usize(k).unwrap() / T::from_usize(steps).unwrap();
        let sig = c.regions().signature(c.paraboloid(), p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1]), T::zero());
        sig.count()
    };
    let first = at(0);
    (1..=steps).all(|k| at(k) == first).then_some(first)
}

/// A region narrowing to a tip leaves stray cells there that touch nothing
/// of their own count. Each small component is joined to the nearest cell of
/// another component with the same count when the straight walk between the
/// two never changes count.
fn merge_fragments<T: Real>(
    c: &Classifier<T>,
    cells: &[(Option<usize>, [T; 2], bool)],
    label: &[usize],
    regions: Vec<CensusRegion<T>>,
    h: T,
) -> Vec<CensusRegion<T>> {
    let small = (cells.len() / 100).max(1);
    let mut parent: Vec<usize> = (0..regions.len()).collect();
    fn root(parent: &mut [usize], mut r: usize) -> usize {
        while parent[r] != r {
            parent[r] = parent[parent[r]];
            r = parent[r];
        }
        r
    }
    let d2 = |a: [T; 2], b: [T; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    for (id, r) in regions.iter().enumerate() {
        if r.cells >= small {
            continue;
        }
        let mut best: Option<(T, usize, usize)> = None;
        for (k, cell) in cells.iter().enumerate() {
            if label[k] != id {
                continue;
            }
            for (kk, other) in cells.iter().enumerate() {
                let l = label[kk];
                if l == usize::MAX || l == id || other.0 != Some(r.count) {
                    continue;
                }
                let d = d2(cell.1, other.1);
                if best.is_none_or(|b| d < b.0) {
                    best = Some((d, k, kk));
                }
            }
        }
        if let Some((_, k, kk)) = best {
            if walk_count(c, cells[k].1, cells[kk].1, h / lit(8.0)) == Some(r.count) {
                let (a, b) = (root(&mut parent, id), root(&mut parent, label[kk]));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut merged: Vec<Option<CensusRegion<T>>> = vec![None; regions.len()];
    for (id, r) in regions.iter().enumerate() {
        let top = root(&mut parent, id);
        match &mut merged[top] {
            Some(m) => m.cells += r.cells,
            slot => *slot = Some(r.clone()),
        }
    }
    merged.into_iter().flatten().collect()
}

/// Samples the paraboloid on an `N × N` jittered grid (`N² ≥ samples`, `N`
/// even) and clusters cells of equal count by 8-neighbour adjacency.
pub fn region_census<T: Real>(c: &Classifier<T>, opts: &CensusOptions) -> CensusReport<T> {
    let mut n = (opts.samples.max(1) as f64).sqrt().ceil() as usize;
    n += n % 2;
    let [wx, wy] = window(c);
    let hx = (wx + wx) / T::from_usize(n).unwrap();
    let hy = (wy + wy) / T::from_usize(n).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let jitter: Vec<[f64; 2]> = (0..n * n)
        .map(|_| [rng.gen_range(0.25..0.75), rng.gen_range(0.25..0.75)])
        .collect();

    // Two opposite sectors at a crossing carry the same count and would
    // touch diagonally; cells near a crossing are left out.
    let crossings: Vec<[T; 2]> = [Label::E1, Label::E2, Label::E3, Label::E4]
        .iter()
        .filter_map(|&l| c.point(l))
        .map(|q| [q.x, q.y])
        .collect();
    let radius = lit::<T>(2.0) * hx.max(hy);

    let cells: Vec<(Option<usize>, [T; 2], bool)> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let x = -wx + hx * (T::from_usize(i).unwrap() + lit(jitter[k][0]));
            let y = -wy + hy * (T::from_usize(j).unwrap() + lit(jitter[k][1]));
            let near = crossings
                .iter()
                .any(|e| ((x - e[0]).powi(2) + (y - e[1]).powi(2)).sqrt() < radius);
            if near {
                return (None, [x, y], false);
            }
            let s = c.classify_on_surface(x, y);
            let solved = s.algebraic.as_ref();
            let disagree = solved.is_some() && s.boundary;
            let keep = solved.filter(|a| !s.boundary && a.pattern.first() == Some(&1));
            (keep.map(|a| a.count), [x, y], disagree)
        })
        .collect();

    let mut label = vec![usize::MAX; n * n];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n * n {
        let Some(count) = cells[start].0 else { continue };
        if label[start] != usize::MAX {
            continue;
        }
        let id = regions.len();
        label[start] = id;
        stack.push(start);
        let mut size = 0;
        while let Some(k) = stack.pop() {
            size += 1;
            let (i, j) = ((k % n) as isize, (k / n) as isize);
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (ii, jj) = (i + di, j + dj);
                    if ii < 0 || jj < 0 || ii >= n as isize || jj >= n as isize {
                        continue;
                    }
                    let kk = jj as usize * n + ii as usize;
                    if label[kk] == usize::MAX && cells[kk].0 == Some(count) {
                        label[kk] = id;
                        stack.push(kk);
                    }
                }
            }
        }
        regions.push(CensusRegion {
            count,
            cells: size,
            representative: cells[start].1,
        });
    }

    let regions = merge_fragments(c, &cells, &label, regions, hx.min(hy));
    let mut counts: Vec<usize> = regions.iter().map(|r| r.count).collect();
    counts.sort_unstable();
    counts.dedup();
    CensusReport {
        case: c.case(),
        grid: [n, n],
        window: [wx, wy],
        region_count: regions.len(),
        regions,
        counts,
        excluded: cells.iter().filter(|c| c.0.is_none()).count(),
        disagreements: cells.iter().filter(|c| c.2).count(),
    }
}
