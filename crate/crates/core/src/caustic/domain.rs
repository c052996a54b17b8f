//! Real domains of one-parameter closed forms, found by sign scanning.

use serde::Serialize;

use crate::scalar::{lit, Real};

/// Closed parameter interval; `lo` may be `-∞` for half-lines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn mid(&self) -> T {
        self.lo + self.width() / lit(2.0)
    }

    /// `n` evenly spaced parameters including both ends.
    pub fn linspace(&self, n: usize) -> Vec<T> {
        let n = n.max(2);
        let step = self.width() / T::from_usize(n - 1).unwrap();
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.hi
                } else {
                    self.lo + step * T::from_usize(i).unwrap()
                }
            })
            .collect()
    }
}

/// Maximal sub-intervals of `[lo, hi]` on which `inside` holds, located by a
/// uniform scan of `samples` points and bisection at every transition.
/// Components narrower than the scan step can be missed.
pub fn scan_domain<T: Real>(lo: T, hi: T, samples: usize, inside: impl Fn(T) -> bool) -> Vec<Interval<T>> {
    let n = samples.max(2);
    let grid = Interval::new(lo, hi).linspace(n);
    let flags: Vec<bool> = grid.iter().map(|&t| inside(t)).collect();
    let edge = |a: T, b: T, a_in: bool| {
        // Boundary between a and b, returned on the inside side.
        let (mut i, mut o) = if a_in { (a, b) } else { (b, a) };
        for _ in 0..200 {
            let m = i + (o - i) / lit(2.0);
            if m == i || m == o {
                break;
            }
            if inside(m) {
                i = m;
            } else {
                o = m;
            }
        }
        i
    };
    let mut out = Vec::new();
    let mut start: Option<T> = if flags[0] { Some(grid[0]) } else { None };
    for k in 1..n {
        match (flags[k - 1], flags[k]) {
            (false, true) => start = Some(edge(grid[k - 1], grid[k], false)),
            (true, false) => {
                let end = edge(grid[k - 1], grid[k], true);
                out.push(Interval::new(start.take().unwrap(), end));
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Interval::new(s, grid[n - 1]));
    }
    out
}

/// Parameter in `iv` minimising `dist(t)`: a dense scan followed by golden
/// section on the bracket around the best sample. Returns `(t, dist)`.
pub fn minimize_on<T: Real>(iv: Interval<T>, samples: usize, dist: impl Fn(T) -> T) -> (T, T) {
    let grid = iv.linspace(samples.max(3));
    let vals: Vec<T> = grid.iter().map(|&t| dist(t)).collect();
    let k = (0..vals.len())
        .filter(|&i| vals[i].is_finite())
        .min_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap())
        .unwrap_or(0);
    let mut lo = grid[k.saturating_sub(1)];
    let mut hi = grid[(k + 1).min(grid.len() - 1)];
    let g = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (dist(c), dist(d));
    for _ in 0..200 {
        if hi - lo <= T::epsilon() * (T::one() + lo.abs().max(hi.abs())) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = dist(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = dist(d);
        }
    }
    let mut best = (grid[k], vals[k]);
    for t in [lo, hi, c, d] {
        let v = dist(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}
