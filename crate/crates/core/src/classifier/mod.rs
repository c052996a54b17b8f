//! Classification of query points by their number of concurrent normals,
//! and of points on the paraboloid by the region they fall in.

pub mod census;
pub mod region;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::caustic::curves::{intersection_domain, PlaneCurve};
use crate::caustic::points::{find_point, special_points, Label, NamedPoint};
use crate::caustic::{sheet_layout, Sheet, SheetLayout};
use crate::error::Result;
use crate::geometry::{Paraboloid, SpacePoint};
use crate::normals::{concurrent_normals, NormalBundle, SolverOptions};
use crate::scalar::{lit, Real};

pub use census::{region_census, CensusOptions, CensusRegion, CensusReport};
pub use region::{RegionSignature, SurfaceRegions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseId {
    Case1,
    Case2,
    Case3,
    Case4,
}

impl CaseId {
    /// Number of regions the surface/caustic curves cut the paraboloid into.
    pub fn regions(self) -> usize {
        match self {
            CaseId::Case1 => 2,
            CaseId::Case2 => 4,
            CaseId::Case3 => 5,
            CaseId::Case4 => 7,
        }
    }

    /// Normal counts met in the open regions.
    pub fn region_counts(self) -> &'static [usize] {
        match self {
            CaseId::Case1 => &[1, 3],
            _ => &[1, 3, 5],
        }
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Case{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CaseClass {
    pub case_id: CaseId,
    /// `b` within the band of `2a`.
    pub near_2a: bool,
    /// `b` within the band of `3a`.
    pub near_3a: bool,
}

/// Default relative band for the case thresholds.
pub const CASE_EPS: f64 = 1e-9;

/// `b ≤ 2a` → 1, `2a < b < 3a` → 2, `b = 3a` → 3, `b > 3a` → 4, with the
/// comparisons taken in a relative band `eps`.
pub fn case_of<T: Real>(p: &Paraboloid<T>, eps: T) -> CaseClass {
    let (a, b) = (p.a(), p.b());
    let (two, three) = (lit::<T>(2.0) * a, lit::<T>(3.0) * a);
    let near_2a = (b - two).abs() <= eps * two;
    let near_3a = (b - three).abs() <= eps * three;
    let case_id = if near_3a {
        CaseId::Case3
    } else if near_2a || b < two {
        CaseId::Case1
    } else if b < three {
        CaseId::Case2
    } else {
        CaseId::Case4
    };
    CaseClass {
        case_id,
        near_2a,
        near_3a,
    }
}

/// Where a query sits relative to the caustic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    InteriorBelow,
    InteriorBetween,
    InteriorAbove,
    OnLowerSheet,
    OnUpperSheet,
    OnNodal,
    /// A triple or higher foot away from the named points.
    Cusp,
    Named(Label),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Location::InteriorBelow => "interior_below",
            Location::InteriorBetween => "interior_between",
            Location::InteriorAbove => "interior_above",
            Location::OnLowerSheet => "on_lower_sheet",
            Location::OnUpperSheet => "on_upper_sheet",
            Location::OnNodal => "on_nodal",
            Location::Cusp => "cusp",
            Location::Named(l) => return write!(f, "named:{}", l.name()),
        };
        f.write_str(s)
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which principal radius a doubled foot's distance matches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusPairing {
    Smaller,
    Larger,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubledFoot<T> {
    pub foot: SpacePoint<T>,
    pub t: T,
    pub multiplicity: u32,
    /// `|A − B|`
    pub distance: T,
    pub radii: [T; 2],
    pub pairing: RadiusPairing,
    pub sheet: Sheet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointClassification<T> {
    pub query: SpacePoint<T>,
    pub count: usize,
    pub location: Location,
    pub pattern: Vec<u32>,
    pub doubled: Vec<DoubledFoot<T>>,
}

/// Both answers for a point of the paraboloid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceClassification<T> {
    /// `None` when the solver could not decide.
    pub algebraic: Option<PointClassification<T>>,
    pub geometric_count: usize,
    pub signature: RegionSignature,
    /// Named points the query matched.
    pub named: Vec<Label>,
    /// The two answers disagree, or the solver failed.
    pub boundary: bool,
}

impl<T: Real> SurfaceClassification<T> {
    /// Algebraic count when available, else the geometric one.
    pub fn count(&self) -> usize {
        self.algebraic.as_ref().map_or(self.geometric_count, |c| c.count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifierOptions<T> {
    /// Geometric nearness, scaled by `1 + |coordinates|`.
    pub geometric_eps: T,
    pub case_eps: T,
    /// Polyline samples per intersection curve.
    pub curve_samples: usize,
    pub solver: SolverOptions<T>,
}

impl<T: Real> Default for ClassifierOptions<T> {
    fn default() -> Self {
        ClassifierOptions {
            geometric_eps: lit(1e-7),
            case_eps: lit(CASE_EPS),
            curve_samples: 4000,
            solver: SolverOptions::default(),
        }
    }
}

/// Per-paraboloid data shared by many classifications.
#[derive(Clone, Debug)]
pub struct Classifier<T> {
    p: Paraboloid<T>,
    opts: ClassifierOptions<T>,
    case: CaseClass,
    points: Vec<NamedPoint<T>>,
    layout: SheetLayout<T>,
    regions: SurfaceRegions<T>,
}

impl<T: Real> Classifier<T> {
    pub fn new(p: Paraboloid<T>, opts: ClassifierOptions<T>) -> Result<Self> {
        let points = special_points(&p);
        let layout = sheet_layout(&p)?;
        let reach = points
            .iter()
            .filter_map(|n| n.position)
            .fold(T::zero(), |m, q| m.max(q.x.abs()).max(q.y.abs()));
        let regions = SurfaceRegions::new(&p, opts.curve_samples, lit::<T>(8.0) * reach);
        Ok(Classifier {
            case: case_of(&p, opts.case_eps),
            p,
            opts,
            points,
            layout,
            regions,
        })
    }

    pub fn paraboloid(&self) -> &Paraboloid<T> {
        &self.p
    }

    pub fn case(&self) -> CaseClass {
        self.case
    }

    pub fn layout(&self) -> &SheetLayout<T> {
        &self.layout
    }

    pub fn regions(&self) -> &SurfaceRegions<T> {
        &self.regions
    }

    pub fn special_points(&self) -> &[NamedPoint<T>] {
        &self.points
    }

    pub fn options(&self) -> &ClassifierOptions<T> {
        &self.opts
    }

    fn band(&self, q: SpacePoint<T>) -> T {
        self.opts.geometric_eps * (T::one() + q.x.abs() + q.y.abs() + q.z.abs())
    }

    fn named_at(&self, q: SpacePoint<T>) -> Vec<Label> {
        let band = self.band(q);
        self.points
            .iter()
            .filter(|n| n.position.is_some_and(|s| s.dist(q) <= band))
            .map(|n| n.label)
            .collect()
    }

    /// Count and location of a query point from the multiplicity pattern
    /// of its feet.
    pub fn classify_point(&self, q: SpacePoint<T>) -> Result<PointClassification<T>> {
        let nb = concurrent_normals(&self.p, q, &self.opts.solver)?;
        Ok(self.classify_bundle(&nb))
    }

    fn classify_bundle(&self, nb: &NormalBundle<T>) -> PointClassification<T> {
        let q = nb.query;
        let doubled: Vec<DoubledFoot<T>> = nb
            .feet
            .iter()
            .filter(|f| f.multiplicity >= 2)
            .map(|f| {
                let c = self.p.curvature_at(f.point.x, f.point.y);
                let d = f.point.dist(q);
                let pairing = if (d - c.r1).abs() <= (d - c.r2).abs() {
                    RadiusPairing::Smaller
                } else {
                    RadiusPairing::Larger
                };
                let sheet = match pairing {
                    RadiusPairing::Smaller => self.layout.small_radius,
                    RadiusPairing::Larger => self.layout.small_radius.other(),
                };
                DoubledFoot {
                    foot: f.point,
                    t: f.t,
                    multiplicity: f.multiplicity,
                    distance: d,
                    radii: [c.r1, c.r2],
                    pairing,
                    sheet,
                }
            })
            .collect();
        let count = nb.count();
        let top = nb.pattern.first().copied().unwrap_or(1);
        let doubles = nb.pattern.iter().filter(|&&m| m == 2).count();
        let location = if let Some(&l) = self.named_at(q).first() {
            Location::Named(l)
        } else if top >= 3 {
            Location::Cusp
        } else if doubles >= 2 {
            Location::OnNodal
        } else if doubles == 1 {
            if doubled[0].sheet == self.layout.lower {
                Location::OnLowerSheet
            } else {
                Location::OnUpperSheet
            }
        } else {
            match count {
                1 => Location::InteriorBelow,
                3 => Location::InteriorBetween,
                _ => Location::InteriorAbove,
            }
        };
        PointClassification {
            query: q,
            count,
            location,
            pattern: nb.pattern.clone(),
            doubled,
        }
    }

    /// Count at a named surface point where the two intersection curves
    /// cross or meet the `x = 0` plane together.
    fn named_surface_count(&self, named: &[Label]) -> Option<usize> {
        use Label::*;
        let is = |ls: &[Label]| named.iter().any(|l| ls.contains(l));
        match self.case.case_id {
            CaseId::Case3 if is(&[E1, E2, E3, E4, F1, F2, G1, G2, H1, H2]) => Some(2),
            CaseId::Case4 if is(&[E1, E2, E3, E4, G1, G2]) => Some(3),
            CaseId::Case2 if is(&[G1, G2]) => Some(3),
            _ => None,
        }
    }

    /// Classifies the point `(x, y, (ax² + by²)/2)` twice: by the region it
    /// falls in and by its normal count.
    pub fn classify_on_surface(&self, x: T, y: T) -> SurfaceClassification<T> {
        let q = SpacePoint {
            x,
            y,
            z: self.p.height(x, y),
        };
        let band = self.opts.geometric_eps * (T::one() + x.abs() + y.abs());
        let signature = self.regions.signature(&self.p, x, y, band);
        let named = self.named_at(q);
        let geometric_count = self.named_surface_count(&named).unwrap_or_else(|| signature.count());
        let algebraic = self.classify_point(q).ok();
        let boundary = algebraic.as_ref().is_none_or(|c| c.count != geometric_count);
        SurfaceClassification {
            algebraic,
            geometric_count,
            signature,
            named,
            boundary,
        }
    }

    /// Sheets whose intersection with the paraboloid is non-empty.
    pub fn intersecting_sheets(&self) -> Vec<Sheet> {
        Sheet::BOTH
            .into_iter()
            .filter(|&s| !intersection_domain(&self.p, s, T::infinity()).is_empty())
            .collect()
    }

    /// The named point with this label, if real.
    pub fn point(&self, label: Label) -> Option<SpacePoint<T>> {
        find_point(&self.points, label).and_then(|n| n.position)
    }
}

/// Position along a plane caustic section relative to its `H` or `K` point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvePosition {
    Above,
    At,
    Below,
}

/// Normal counts along the four plane sections of the caustic: above, at
/// and below `H` (ids 16, 17) or `K` (ids 18, 19). `None` for the
/// paraboloid's own sections.
pub fn section_expected_count(curve: PlaneCurve, pos: CurvePosition) -> Option<usize> {
    use CurvePosition::*;
    let row = match curve {
        PlaneCurve::SemicubicalYz => [2, 2, 2],
        PlaneCurve::ParabolaYz => [3, 2, 3],
        PlaneCurve::SemicubicalXz => [2, 2, 4],
        PlaneCurve::ParabolaXz => [3, 2, 1],
        PlaneCurve::ParaboloidYz | PlaneCurve::ParaboloidXz => return None,
    };
    Some(row[match pos {
        Above => 0,
        At => 1,
        Below => 2,
    }])
}

/// The point on a plane section where its counts change.
pub fn section_anchor(curve: PlaneCurve) -> Option<Label> {
    match curve {
        PlaneCurve::SemicubicalYz | PlaneCurve::ParabolaYz => Some(Label::H1),
        PlaneCurve::SemicubicalXz | PlaneCurve::ParabolaXz => Some(Label::K1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(a: f64, b: f64) -> CaseClass {
        case_of(&Paraboloid::new(a, b).unwrap(), CASE_EPS)
    }

    #[test]
    fn cases() {
        assert_eq!(case(1.0, 1.5).case_id, CaseId::Case1);
        assert_eq!(case(1.0, 2.5).case_id, CaseId::Case2);
        assert_eq!(case(1.0, 3.0).case_id, CaseId::Case3);
        assert_eq!(case(1.0, 4.0).case_id, CaseId::Case4);
        let c = case(1.0, 2.0);
        assert!(c.case_id == CaseId::Case1 && c.near_2a && !c.near_3a);
        let c = case(1.0, 3.0 + 1e-12);
        assert!(c.case_id == CaseId::Case3 && c.near_3a);
        assert_eq!(case(1.0, 3.0 + 1e-6).case_id, CaseId::Case4);
        assert_eq!(case(2.0, 4.0 + 1e-12).case_id, CaseId::Case1);
    }

    #[test]
    fn location_strings() {
        assert_eq!(Location::InteriorBetween.to_string(), "interior_between");
        assert_eq!(Location::Named(Label::H1).to_string(), "named:H1");
        assert_eq!(
            serde_json::to_string(&Location::OnLowerSheet).unwrap(),
            "\"on_lower_sheet\""
        );
    }

    #[test]
    fn section_table() {
        use CurvePosition::*;
        assert_eq!(section_expected_count(PlaneCurve::SemicubicalYz, Below), Some(2));
        assert_eq!(section_expected_count(PlaneCurve::SemicubicalXz, Below), Some(4));
        assert_eq!(section_expected_count(PlaneCurve::ParabolaXz, Below), Some(1));
        assert_eq!(section_expected_count(PlaneCurve::ParabolaYz, Above), Some(3));
        assert_eq!(section_expected_count(PlaneCurve::ParaboloidXz, At), None);
    }

    #[test]
    fn axis_points() {
        let c = Classifier::new(Paraboloid::new(1.0, 4.0).unwrap(), ClassifierOptions::default()).unwrap();
        let below = c.classify_point(SpacePoint::new(0.0, 0.0, 0.1).unwrap()).unwrap();
        assert_eq!((below.count, below.location), (1, Location::InteriorBelow));
        let vb = c.classify_point(SpacePoint::new(0.0, 0.0, 0.25).unwrap()).unwrap();
        assert_eq!((vb.count, vb.location), (1, Location::Named(Label::Vb)));
        let va = c.classify_point(SpacePoint::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((va.count, va.location), (3, Location::Named(Label::Va)));
    }
}
