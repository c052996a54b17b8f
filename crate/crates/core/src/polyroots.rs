//! Real polynomials of low degree and real-root isolation with multiplicities.
//!
//! Roots are found by recursion on the derivative: the real roots of `P'`
//! split the line into intervals on which `P` is monotone, so each interval
//! holds at most one simple root, and a critical point at which `P` vanishes
//! (to rounding) is a root of multiplicity one more than its own. A Sturm
//! sequence then certifies the count.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_DEGREE: usize = 8;

/// Real polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    /// Checked constructor: finite coefficients, not identically zero, degree ≤ 8
    /// after trimming negligible leading terms.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficient"));
        }
        let p = Self::raw(coeffs);
        if p.coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("zero polynomial"));
        }
        if p.degree() > MAX_DEGREE {
            return Err(Error::InvalidPolynomial("degree above 8"));
        }
        Ok(p)
    }

    fn raw(mut coeffs: Vec<T>) -> Self {
        let max = coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        while let Some(&c) = coeffs.last() {
            if c == T::zero() || c.abs() <= T::NOISE * max {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::raw(vec![c])
    }

    /// `c0 + c1 x`
    pub fn linear(c0: T, c1: T) -> Self {
        Self::raw(vec![c0, c1])
    }

    /// `lead · Π (x − r)`
    pub fn from_roots(roots: &[T], lead: T) -> Result<Self> {
        let mut p = Self::constant(lead);
        for &r in roots {
            p = &p * &Self::linear(-r, T::one());
        }
        Self::new(p.coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().copied().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// Value together with the rounding scale `Σ |c_i| |x|^i`.
    pub fn eval_with_scale(&self, x: T) -> (T, T) {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold((T::zero(), T::zero()), |(v, s), &c| (v * x + c, s * ax + c.abs()))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * T::from_usize(i).unwrap())
            .collect();
        Self::raw(coeffs)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::raw(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Cauchy bound `1 + max |c_i / c_n|`: every root satisfies `|x| < bound`.
    pub fn cauchy_bound(&self) -> T {
        let lead = self.leading().abs();
        let n = self.degree();
        T::one()
            + self.coeffs[..n]
                .iter()
                .fold(T::zero(), |m, c| m.max(c.abs() / lead))
    }

    /// Euclidean division `self = q · d + r`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        if r.len() <= dn {
            return (Self::raw(vec![]), Self::raw(r));
        }
        let mut q = vec![T::zero(); r.len() - dn];
        let lead = d.leading();
        for k in (0..q.len()).rev() {
            let c = r[k + dn] / lead;
            q[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j] - c * dc;
            }
            r[k + dn] = T::zero();
        }
        r.truncate(dn);
        (Self::raw(q), Self::raw(r))
    }

    fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

impl<T: Real> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, o: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_else(T::zero)
                    + o.coeffs.get(i).copied().unwrap_or_else(T::zero)
            })
            .collect();
        Polynomial::raw(c)
    }
}

impl<T: Real> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::raw(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<T: Real> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, o: &Polynomial<T>) -> Polynomial<T> {
        self + &(-o)
    }
}

impl<T: Real> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, o: &Polynomial<T>) -> Polynomial<T> {
        if self.is_zero() || o.is_zero() {
            return Polynomial::raw(vec![]);
        }
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            for (j, &y) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j] + x * y;
            }
        }
        Polynomial::raw(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root<T> {
    pub value: T,
    pub multiplicity: u32,
}

/// Real roots in increasing order with multiplicities, plus the largest
/// scaled residual `|P(r)| / Σ|c_i||r|^i` over the roots.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSet<T> {
    pub roots: Vec<Root<T>>,
    pub residual: T,
}

impl<T: Real> RootSet<T> {
    pub fn distinct(&self) -> usize {
        self.roots.len()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn has_multiple(&self) -> bool {
        self.roots.iter().any(|r| r.multiplicity > 1)
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.roots.iter().map(|r| r.value)
    }

    /// Build from unsorted roots, merging entries closer than `merge·(1+|x|)`.
    pub fn from_roots(mut roots: Vec<Root<T>>, merge: T) -> Self {
        roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
        RootSet {
            roots: merge_close(roots, merge),
            residual: T::zero(),
        }
    }
}

/// Thresholds for [`isolate_real_roots`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootTolerance<T> {
    /// A critical point `c` is a root when `|P(c)| ≤ noise · Σ|c_i||c|^i`.
    pub noise: T,
    /// Roots closer than `merge · (1 + |x|)` are one root.
    pub merge: T,
}

impl<T: Real> Default for RootTolerance<T> {
    fn default() -> Self {
        RootTolerance {
            noise: T::NOISE,
            merge: T::MERGE,
        }
    }
}

/// All real roots of `p` with multiplicities, certified by a Sturm count.
pub fn isolate_real_roots<T: Real>(p: &Polynomial<T>, tol: &RootTolerance<T>) -> Result<RootSet<T>> {
    if p.is_zero() {
        return Err(Error::InvalidPolynomial("zero polynomial"));
    }
    if p.degree() == 0 {
        return Err(Error::InvalidPolynomial("constant polynomial has no roots to isolate"));
    }
    let bound = p.cauchy_bound();
    let set = isolate_uncertified(p, tol);

    let total = set.total_multiplicity() as usize;
    if total > p.degree() {
        return Err(Error::IllConditioned(format!(
            "{} roots with multiplicity for degree {}",
            total,
            p.degree()
        )));
    }
    let sturm = sturm_count(p, -bound, bound);
    let simple = set.roots.iter().filter(|r| r.multiplicity == 1).count();
    let consistent = if set.has_multiple() {
        (simple..=total).contains(&sturm)
    } else {
        sturm == set.distinct()
    };
    if !consistent {
        return Err(Error::IllConditioned(format!(
            "Sturm count {} against {} isolated roots",
            sturm,
            set.distinct()
        )));
    }
    Ok(set)
}

/// Isolation without the Sturm check, for callers that re-derive the
/// ill-conditioned clusters some other way.
pub fn isolate_uncertified<T: Real>(p: &Polynomial<T>, tol: &RootTolerance<T>) -> RootSet<T> {
    if p.degree() == 0 {
        return RootSet {
            roots: vec![],
            residual: T::zero(),
        };
    }
    let roots = isolate(p, tol, p.cauchy_bound());
    let residual = roots.iter().fold(T::zero(), |m, r| {
        let (v, s) = p.eval_with_scale(r.value);
        m.max(if s > T::zero() { v.abs() / s } else { T::zero() })
    });
    RootSet { roots, residual }
}

fn isolate<T: Real>(p: &Polynomial<T>, tol: &RootTolerance<T>, bound: T) -> Vec<Root<T>> {
    match p.degree() {
        0 => return vec![],
        1 => {
            let c = p.coeffs();
            return vec![Root {
                value: -c[0] / c[1],
                multiplicity: 1,
            }];
        }
        _ => {}
    }
    let dp = p.derivative();
    let crit = isolate(&dp, tol, bound);

    let mut found = Vec::new();
    // Breakpoints of the monotone pieces; `true` marks a critical point that is a root.
    let mut marks: Vec<(T, bool)> = Vec::with_capacity(crit.len() + 2);
    marks.push((-bound, false));
    for c in &crit {
        let is_root = vanishes_at(p, c.value, c.multiplicity, tol);
        if is_root {
            found.push(Root {
                value: c.value,
                multiplicity: c.multiplicity + 1,
            });
        }
        marks.push((c.value, is_root));
    }
    marks.push((bound, false));

    for w in marks.windows(2) {
        let ((x0, r0), (x1, r1)) = (w[0], w[1]);
        if r0 || r1 || !(x0 < x1) {
            continue;
        }
        let (f0, f1) = (p.eval(x0), p.eval(x1));
        if f0 == T::zero() || f1 == T::zero() || f0.signum() == f1.signum() {
            continue;
        }
        found.push(Root {
            value: bracketed_root(p, &dp, x0, x1, f0),
            multiplicity: 1,
        });
    }
    found.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    merge_close(found, tol.merge)
}

/// Does `p` vanish at a critical point of multiplicity `k`, either to
/// rounding or so nearly that the roots it would split into lie within the
/// merge radius?
fn vanishes_at<T: Real>(p: &Polynomial<T>, c: T, k: u32, tol: &RootTolerance<T>) -> bool {
    let (v, s) = p.eval_with_scale(c);
    if v.abs() <= tol.noise * s {
        return true;
    }
    // Taylor coefficient of order k+1 at c.
    let mut d = p.clone();
    let mut fact = T::one();
    for i in 1..=(k + 1) {
        d = d.derivative();
        fact = fact * T::from_u32(i).unwrap();
    }
    let q = d.eval(c).abs() / fact;
    if q == T::zero() {
        return false;
    }
    let order = T::from_u32(k + 1).unwrap();
    let split = (v.abs() / q).powf(order.recip());
    split <= tol.merge * (T::one() + c.abs())
}

/// Safeguarded Newton inside a sign-changing bracket on which `p` is monotone.
fn bracketed_root<T: Real>(p: &Polynomial<T>, dp: &Polynomial<T>, lo: T, hi: T, flo: T) -> T {
    let (mut lo, mut hi) = (lo, hi);
    let neg_at_lo = flo < T::zero();
    let mut x = lo + (hi - lo) / (T::one() + T::one());
    for _ in 0..200 {
        let f = p.eval(x);
        if f == T::zero() {
            return x;
        }
        if (f < T::zero()) == neg_at_lo {
            lo = x;
        } else {
            hi = x;
        }
        let mid = lo + (hi - lo) / (T::one() + T::one());
        if mid <= lo || mid >= hi {
            break;
        }
        let d = dp.eval(x);
        let newton = x - f / d;
        x = if d != T::zero() && newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            mid
        };
        if (hi - lo) <= T::epsilon() * (T::one() + x.abs()) {
            break;
        }
    }
    x
}

fn merge_close<T: Real>(sorted: Vec<Root<T>>, merge: T) -> Vec<Root<T>> {
    let mut out: Vec<Root<T>> = Vec::with_capacity(sorted.len());
    for r in sorted {
        if let Some(last) = out.last_mut() {
            if (r.value - last.value).abs() <= merge * (T::one() + r.value.abs().max(last.value.abs())) {
                // Keep the location of the higher-multiplicity member.
                if r.multiplicity > last.multiplicity {
                    last.value = r.value;
                }
                last.multiplicity += r.multiplicity;
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_count<T: Real>(p: &Polynomial<T>, lo: T, hi: T) -> usize {
    let chain = sturm_chain(p);
    let v_lo = sign_variations(&chain, lo);
    let v_hi = sign_variations(&chain, hi);
    v_lo.saturating_sub(v_hi)
}

/// Sturm sequence with each member normalised to unit max-norm; remainders
/// below the noise floor end the sequence.
pub fn sturm_chain<T: Real>(p: &Polynomial<T>) -> Vec<Polynomial<T>> {
    let normalise = |q: &Polynomial<T>| q.scale(q.max_abs().recip());
    let mut chain = vec![normalise(p)];
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(normalise(&d));
    let cut = T::STURM_CUT;
    while chain.len() <= MAX_DEGREE + 1 {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        let mut c: Vec<T> = r.coeffs().to_vec();
        while c.last().is_some_and(|x| x.abs() <= cut) {
            c.pop();
        }
        if c.is_empty() {
            break;
        }
        let r = -&Polynomial::raw(c);
        chain.push(normalise(&r));
    }
    chain
}

fn sign_variations<T: Real>(chain: &[Polynomial<T>], x: T) -> usize {
    let mut count = 0;
    let mut prev: Option<bool> = None;
    for q in chain {
        let v = q.eval(x);
        if v == T::zero() {
            continue;
        }
        let neg = v < T::zero();
        if prev.is_some_and(|p| p != neg) {
            count += 1;
        }
        prev = Some(neg);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(c: &[f64]) -> Polynomial<f64> {
        Polynomial::new(c.to_vec()).unwrap()
    }

    fn roots_of(c: &[f64]) -> RootSet<f64> {
        isolate_real_roots(&poly(c), &RootTolerance::default()).unwrap()
    }

    #[test]
    fn cubic_with_three_simple_roots() {
        // x^3 - 8x
        let rs = roots_of(&[0.0, -8.0, 0.0, 1.0]);
        let v: Vec<f64> = rs.values().collect();
        assert_eq!(rs.distinct(), 3);
        assert!(rs.roots.iter().all(|r| r.multiplicity == 1));
        assert_relative_eq!(v[0], -8f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(v[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(v[2], 8f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn triple_root_at_zero() {
        let rs = roots_of(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(rs.roots, vec![Root { value: 0.0, multiplicity: 3 }]);
    }

    #[test]
    fn constructed_double_root() {
        // (t-1)^2 (t+2) = t^3 - 3t + 2
        let rs = roots_of(&[2.0, -3.0, 0.0, 1.0]);
        assert_eq!(rs.distinct(), 2);
        assert_relative_eq!(rs.roots[0].value, -2.0, epsilon = 1e-13);
        assert_eq!(rs.roots[0].multiplicity, 1);
        assert_relative_eq!(rs.roots[1].value, 1.0, epsilon = 1e-12);
        assert_eq!(rs.roots[1].multiplicity, 2);
    }

    #[test]
    fn no_real_roots() {
        let rs = roots_of(&[1.0, 0.0, 1.0]);
        assert_eq!(rs.distinct(), 0);
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(sturm_count(&poly(&[-1.0, 0.0, 1.0]), -2.0, 2.0), 2);
        assert_eq!(sturm_count(&poly(&[1.0, 0.0, 1.0]), -10.0, 10.0), 0);
        // (x-1)^2 (x+2): distinct roots only
        assert_eq!(sturm_count(&poly(&[2.0, -3.0, 0.0, 1.0]), -5.0, 5.0), 2);
        // half-open interval
        assert_eq!(sturm_count(&poly(&[-1.0, 0.0, 1.0]), -1.0, 1.0), 1);
    }

    #[test]
    fn division_identity() {
        let p = poly(&[1.0, -2.0, 0.5, 3.0, -1.0]);
        let d = poly(&[0.5, 1.0, 2.0]);
        let (q, r) = p.div_rem(&d);
        let back = &(&q * &d) + &r;
        for (x, y) in back.coeffs().iter().zip(p.coeffs()) {
            assert_relative_eq!(x, y, epsilon = 1e-14);
        }
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn degree_limit_and_trimming() {
        assert!(Polynomial::new(vec![1.0f64; 10]).is_err());
        assert!(Polynomial::new(vec![0.0f64; 3]).is_err());
        assert!(Polynomial::new(vec![1.0, f64::NAN]).is_err());
        let p = poly(&[1.0, 2.0, 1e-20]);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn quintruple_and_mixed_multiplicities() {
        let p = Polynomial::from_roots(&[0.5; 5], 2.0).unwrap();
        let rs = isolate_real_roots(&p, &RootTolerance::default()).unwrap();
        assert_eq!(rs.distinct(), 1);
        assert_eq!(rs.roots[0].multiplicity, 5);

        let p = Polynomial::from_roots(&[-1.0, -1.0, 2.0, 2.0, 3.0], 1.0).unwrap();
        let rs = isolate_real_roots(&p, &RootTolerance::default()).unwrap();
        let m: Vec<u32> = rs.roots.iter().map(|r| r.multiplicity).collect();
        assert_eq!(m, vec![2, 2, 1]);
    }

    #[test]
    fn single_precision_instantiation() {
        let p = Polynomial::<f32>::new(vec![0.0, -8.0, 0.0, 1.0]).unwrap();
        let rs = isolate_real_roots(&p, &RootTolerance::default()).unwrap();
        assert_eq!(rs.distinct(), 3);
        assert!((rs.roots[2].value - 8f32.sqrt()).abs() < 1e-5);
    }
}
