//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the console.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use caustica::caustic::curves::{intersection_curve_point, intersection_domain, plane_curve_point, PlaneCurve};
use caustica::caustic::nodal::{caspari_domain, nodal_point_caspari, nodal_point_uv, nodal_uv_domain};
use caustica::caustic::points::{e_points, Label};
use caustica::caustic::{caustic_point, minimize_on, nearest_caustic_point, Interval, Sheet, SheetCoords};
use caustica::classifier::{
    section_anchor, section_expected_count, region_census, CaseId, CensusOptions, Classifier, ClassifierOptions,
    CurvePosition,
};
use caustica::normals::{concurrent_normals, SolverOptions};
use caustica::parabola2d::NeileSide;
use caustica::{oracle, Paraboloid, Parabola2, PlanePoint, Sign, SpacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const ORACLE_QUERIES: usize = 10_000;
const ORACLE_AGREEMENT: f64 = 0.999;
const EPS_BAND: f64 = 1e-6;
const CENTRE_SAMPLES: usize = 500;
const CENTRE_FOOT_TOL: f64 = 1e-6;
const E_POINT_REL: f64 = 1e-9;
const COINCIDENCE_TOL: f64 = 1e-10;
const CENSUS_SAMPLES: usize = 20_000;
const CENSUS_SEED: u64 = 2024;
const SECTION_SAMPLES: usize = 50;
const NODAL_SAMPLES: usize = 200;
const NODAL_TOL: f64 = 1e-6;
const SWAP_SAMPLES: usize = 1000;
const SWAP_TOL: f64 = 1e-10;
const PARABOLA_GRID: usize = 200;
const NEILE_BAND: f64 = 1e-8;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn p(a: f64, b: f64) -> Paraboloid {
    Paraboloid::new(a, b).unwrap()
}

fn solver() -> SolverOptions<f64> {
    SolverOptions::default()
}

fn classifier(a: f64, b: f64) -> Classifier<f64> {
    Classifier::new(p(a, b), ClassifierOptions::default()).unwrap()
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_agreement() -> Verdict {
    let p = p(1.0, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut compared, mut agree, mut excluded) = (0usize, 0usize, 0usize);
    let mut outside_band = Vec::new();
    for _ in 0..ORACLE_QUERIES {
        let q = SpacePoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-2.0..8.0)).unwrap();
        let scale = 1.0 + q.magnitude();
        let d = nearest_caustic_point(&p, q).map_or(0.0, |i| i.distance);
        if d < EPS_BAND * scale {
            excluded += 1;
            continue;
        }
        compared += 1;
        let s = concurrent_normals(&p, q, &solver());
        let o = oracle::scan(&p, q, None);
        let (sc, oc) = match (&s, &o) {
            (Ok(s), Ok(o)) if s.count() == o.count => {
                agree += 1;
                continue;
            }
            (Ok(s), Ok(o)) => (Some(s.count()), Some(o.count)),
            _ => (s.as_ref().ok().map(|s| s.count()), o.as_ref().ok().map(|o| o.count)),
        };
        // Within the boundary band: a flagged multiple root, a band error,
        // or closer to the caustic than one cell of the finest oracle grid.
        let cell = 2.0 * oracle::default_half_width(&p, q) / *oracle::RESOLUTIONS.last().unwrap() as f64;
        let banded = s.as_ref().map_or_else(|e| e.is_boundary_band(), |s| s.on_boundary())
            || o.as_ref().err().is_some_and(|e| e.is_boundary_band())
            || d < cell;
        eprintln!("  disagreement at {q:?}: solver {sc:?}, oracle {oc:?}, caustic distance {d:.3e}, banded {banded}");
        if !banded {
            outside_band.push(q);
        }
    }
    let rate = agree as f64 / compared as f64;
    check(
        rate >= ORACLE_AGREEMENT && outside_band.is_empty(),
        format!(
            "{agree}/{compared} agree ({:.3}%), {excluded} in the band, {} disagreements outside it",
            100.0 * rate,
            outside_band.len()
        ),
    )
}

fn axis_counts() -> Verdict {
    let p = p(1.0, 4.0);
    let count = |n: f64| concurrent_normals(&p, SpacePoint::new(0.0, 0.0, n).unwrap(), &solver()).unwrap().count();
    let mut bad = Vec::new();
    let spans = [(-2.0, 0.25, 1), (0.25, 1.0, 3), (1.0, 8.0, 5)];
    for (lo, hi, want) in spans {
        for k in 1..200 {
            let n = lo + (hi - lo) * k as f64 / 200.0;
            if count(n) != want {
                bad.push(n);
            }
        }
    }
    for (n, want) in [(0.25, 1), (1.0, 3)] {
        if count(n) != want {
            bad.push(n);
        }
    }
    check(bad.is_empty(), format!("{} axis heights off: {bad:?}", bad.len()))
}

fn curvature_centres() -> Verdict {
    let p = p(1.0, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for _ in 0..CENTRE_SAMPLES {
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.5));
        let b = p.surface_point(x, y).unwrap();
        let (c1, c2) = p.curvature_centers(x, y);
        for c in [c1, c2] {
            let nb = concurrent_normals(&p, c, &solver()).unwrap();
            match nb
                .feet
                .iter()
                .filter(|f| f.multiplicity >= 2)
                .map(|f| f.point.dist(b))
                .min_by(f64::total_cmp)
            {
                Some(d) => worst = worst.max(d),
                None => missing += 1,
            }
        }
    }
    check(
        missing == 0 && worst < CENTRE_FOOT_TOL,
        format!("{} centres, {missing} without a double root, worst foot gap {worst:.2e}", 2 * CENTRE_SAMPLES),
    )
}

/// Gauss–Newton on `(t, s)` for the crossing of the sheet-1 and sheet-2
/// intersection curves, residual `(x₁−x₂, y₁−y₂, z₁−z₂)`.
fn crossing(p: &Paraboloid, sx: Sign, sy: Sign, t: f64, s: f64) -> Option<(f64, f64)> {
    let f = |t: f64, s: f64| -> Option<[f64; 3]> {
        let one = intersection_curve_point(p, Sheet::One, t, sx, sy).ok()?;
        let two = intersection_curve_point(p, Sheet::Two, s, sx, sy).ok()?;
        Some(one.sub(two))
    };
    let (mut t, mut s) = (t, s);
    for _ in 0..50 {
        let r = f(t, s)?;
        let h = 1e-7;
        let diff = |g: [f64; 3]| -> Vec<f64> { g.iter().zip(&r).map(|(g, r)| (g - r) / h).collect() };
        let col_t = diff(f(t + h, s)?);
        let col_s = diff(f(t, s + h)?);
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
        let (a11, a12, a22) = (dot(&col_t, &col_t), dot(&col_t, &col_s), dot(&col_s, &col_s));
        let (g1, g2) = (dot(&col_t, &r), dot(&col_s, &r));
        let det = a11 * a22 - a12 * a12;
        if det == 0.0 {
            return None;
        }
        let (st, ss) = ((a22 * g1 - a12 * g2) / det, (a11 * g2 - a12 * g1) / det);
        t -= st;
        s -= ss;
        if st.abs() < 1e-15 * (1.0 + t.abs()) && ss.abs() < 1e-15 * (1.0 + s.abs()) {
            break;
        }
    }
    Some((t, s))
}

fn e_point_closed_form() -> Verdict {
    let p = p(1.0, 4.0);
    let d1 = intersection_domain(&p, Sheet::One, 10.0);
    let d2 = intersection_domain(&p, Sheet::Two, 10.0);
    let mut worst: f64 = 0.0;
    let mut z_exact = true;
    for e in e_points(&p) {
        let want = e.position.unwrap();
        let (sx, sy) = (Sign::of(want.x), Sign::of(want.y));
        // Seed from a coarse scan of both parameter ranges.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i1 in &d1 {
            for t in i1.linspace(200) {
                let Ok(a) = intersection_curve_point(&p, Sheet::One, t, sx, sy) else { continue };
                for i2 in &d2 {
                    let (s, d) = minimize_on(*i2, 200, |s| {
                        intersection_curve_point(&p, Sheet::Two, s, sx, sy).map_or(f64::INFINITY, |b| b.dist(a))
                    });
                    if d < best.0 {
                        best = (d, t, s);
                    }
                }
            }
        }
        let Some((t, _)) = crossing(&p, sx, sy, best.1, best.2) else {
            return Err(format!("{}: Gauss-Newton failed", e.label));
        };
        let got = intersection_curve_point(&p, Sheet::One, t, sx, sy).unwrap();
        worst = worst.max(got.dist(want) / want.magnitude());
        z_exact &= want.z == 1.8;
    }
    check(
        worst < E_POINT_REL && z_exact,
        format!("worst relative gap {worst:.2e}, z = 1.8 exactly: {z_exact}"),
    )
}

fn coincidence_at_3a() -> Verdict {
    let c = classifier(1.0, 3.0);
    let y0 = 8f64.sqrt() / 3.0;
    let mut worst: f64 = 0.0;
    use Label::*;
    for (l, sy) in [
        (E1, 1.0),
        (E2, -1.0),
        (E3, -1.0),
        (E4, 1.0),
        (F1, 1.0),
        (F2, -1.0),
        (G1, 1.0),
        (G2, -1.0),
        (H1, 1.0),
        (H2, -1.0),
    ] {
        let Some(q) = c.point(l) else {
            return Err(format!("{l} missing"));
        };
        worst = worst.max(q.dist(SpacePoint::new(0.0, sy * y0, 4.0 / 3.0).unwrap()));
    }
    let s = c.classify_on_surface(0.0, y0);
    check(
        worst < COINCIDENCE_TOL && s.count() == 2,
        format!("worst gap {worst:.2e}, count at the point {}", s.count()),
    )
}

fn census() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for (b, case) in [(1.5, CaseId::Case1), (2.5, CaseId::Case2), (3.0, CaseId::Case3), (4.0, CaseId::Case4)] {
        let c = classifier(1.0, b);
        let r = region_census(
            &c,
            &CensusOptions {
                samples: CENSUS_SAMPLES,
                seed: CENSUS_SEED,
            },
        );
        ok &= r.case.case_id == case && r.region_count == case.regions() && r.counts == case.region_counts();
        parts.push(format!("b={b}: {} regions {:?}", r.region_count, r.counts));
    }
    // Spot checks on the intersection curves and at E, G for (1, 4).
    let c = classifier(1.0, 4.0);
    let p = *c.paraboloid();
    let mut seen = [0usize; 2];
    let mut wrong = 0;
    let named: Vec<SpacePoint> = [Label::E1, Label::G1].iter().map(|&l| c.point(l).unwrap()).collect();
    for sheet in Sheet::BOTH {
        for iv in intersection_domain(&p, sheet, 8.0) {
            for t in iv.linspace(40) {
                let q = intersection_curve_point(&p, sheet, t, Sign::Plus, Sign::Plus).unwrap();
                if named.iter().any(|n| q.dist(*n) < 1e-2) {
                    continue;
                }
                let s = c.classify_on_surface(q.x, q.y);
                let sig = s.signature;
                let upper = if sig.on_loop { sig.beyond_wedge } else { !sig.inside_loop };
                seen[usize::from(upper)] += 1;
                wrong += usize::from(s.boundary || s.count() != if upper { 4 } else { 2 });
            }
        }
    }
    let threes = [Label::E1, Label::E2, Label::E3, Label::E4, Label::G1, Label::G2]
        .iter()
        .filter(|&&l| {
            let q = c.point(l).unwrap();
            c.classify_on_surface(q.x, q.y).count() == 3
        })
        .count();
    ok &= wrong == 0 && seen[0] > 0 && seen[1] > 0 && threes == 6;
    parts.push(format!(
        "curve checks {} lower / {} upper, {wrong} wrong, {threes}/6 named points give 3",
        seen[0], seen[1]
    ));
    check(ok, parts.join("; "))
}

fn section_table() -> Verdict {
    let c = classifier(1.0, 4.0);
    let p = *c.paraboloid();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = 0;
    let mut bad = Vec::new();
    for curve in [PlaneCurve::SemicubicalYz, PlaneCurve::ParabolaYz, PlaneCurve::SemicubicalXz, PlaneCurve::ParabolaXz] {
        let anchor = c.point(section_anchor(curve).unwrap()).unwrap();
        let ta = curve.t_at_height(&p, anchor.z);
        let tv = curve.t_max(&p);
        for pos in [CurvePosition::Above, CurvePosition::At, CurvePosition::Below] {
            let want = section_expected_count(curve, pos).unwrap();
            for _ in 0..SECTION_SAMPLES {
                let t = match pos {
                    CurvePosition::Above => rng.gen_range(ta - 2.0..ta - 1e-3),
                    CurvePosition::At => ta,
                    CurvePosition::Below => rng.gen_range(ta + 1e-3..tv - 1e-3),
                };
                let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
                let q = plane_curve_point(&p, curve, t, sign).unwrap();
                let got = concurrent_normals(&p, q, &solver()).map(|n| n.count());
                total += 1;
                if got.as_ref().ok() != Some(&want) {
                    bad.push(format!("{} {pos:?} t={t}: {got:?}", curve.id()));
                }
            }
        }
    }
    check(bad.is_empty(), format!("{}/{total} samples match {bad:?}", total - bad.len()))
}

fn nodal() -> Verdict {
    let p = p(1.0, 4.0);
    let dc = caspari_domain(&p)[0];
    let du = nodal_uv_domain(&p)[0];
    let caspari = |t: f64| nodal_point_caspari(&p, t, Sign::Plus, Sign::Plus).unwrap();
    let uv = |t: f64| nodal_point_uv(&p, t, Sign::Plus, Sign::Plus).unwrap();
    // Midpoint samples keep off the endpoints, where the two pairs merge.
    let mids = |d: Interval<f64>| -> Vec<f64> {
        (0..NODAL_SAMPLES)
            .map(|k| d.lo + (k as f64 + 0.5) / NODAL_SAMPLES as f64 * d.width())
            .collect()
    };
    let (tc, tu) = (mids(dc), mids(du));
    let scale = 1.0 + caspari(dc.lo).magnitude().max(caspari(dc.hi).magnitude());
    let mut hausdorff: f64 = 0.0;
    for &t in &tu {
        hausdorff = hausdorff.max(minimize_on(dc, 400, |s| caspari(s).dist(uv(t))).1);
    }
    for &t in &tc {
        hausdorff = hausdorff.max(minimize_on(du, 400, |s| uv(s).dist(caspari(t))).1);
    }
    let mut bad = 0;
    for q in tc.iter().map(|&t| caspari(t)).chain(tu.iter().map(|&t| uv(t))) {
        let pat = concurrent_normals(&p, q, &solver()).map(|n| n.pattern).unwrap_or_default();
        bad += usize::from(pat.iter().filter(|&&m| m == 2).count() != 2);
    }
    let c = classifier(1.0, 4.0);
    let (h, k) = (c.point(Label::H1).unwrap(), c.point(Label::K1).unwrap());
    let fold = |q: SpacePoint| SpacePoint::new(q.x.abs(), q.y.abs(), q.z).unwrap();
    let mut end_gap: f64 = 0.0;
    for ends in [[caspari(dc.lo), caspari(dc.hi)], [uv(du.lo), uv(du.hi)]] {
        let [e0, e1] = ends.map(fold);
        let straight = e0.dist(h).max(e1.dist(k));
        let crossed = e0.dist(k).max(e1.dist(h));
        end_gap = end_gap.max(straight.min(crossed));
    }
    check(
        hausdorff < NODAL_TOL * scale && bad == 0 && end_gap < NODAL_TOL,
        format!("Hausdorff {hausdorff:.2e}, {bad} samples without two double roots, endpoint gap {end_gap:.2e}"),
    )
}

fn swap_identity() -> Verdict {
    let p = p(1.0, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..SWAP_SAMPLES {
        let c = SheetCoords::new(Sheet::One, rng.gen_range(1.0..12.0), rng.gen_range(-1.0..=-0.25));
        let sx = if rng.gen() { Sign::Plus } else { Sign::Minus };
        let sy = if rng.gen() { Sign::Plus } else { Sign::Minus };
        let one = caustic_point(&p, c, sx, sy).unwrap();
        let two = caustic_point(&p, SheetCoords::new(Sheet::Two, -c.v, -c.u), sx, sy).unwrap();
        worst = worst.max(one.dist(two));
    }
    check(worst < SWAP_TOL, format!("worst gap {worst:.2e} over {SWAP_SAMPLES} samples"))
}

fn parabola() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [0.5, 1.0, 2.0] {
        let par = Parabola2::new(a).unwrap();
        let band = |q: PlanePoint| NEILE_BAND * (1.0 + (a * q.y - 1.0).abs().powi(3) + 27.0 / 8.0 * a * a * q.x * q.x);
        let (mut graded, mut wrong) = (0, 0);
        for i in 0..PARABOLA_GRID {
            for j in 0..PARABOLA_GRID {
                let x = -6.0 / a + 12.0 / a * i as f64 / (PARABOLA_GRID - 1) as f64;
                let y = -2.0 / a + 10.0 / a * j as f64 / (PARABOLA_GRID - 1) as f64;
                let q = PlanePoint::new(x, y).unwrap();
                let r = par.neile_residual(q);
                if r.abs() <= band(q) {
                    continue;
                }
                graded += 1;
                let (want, side) = if r > 0.0 { (3, NeileSide::Above) } else { (1, NeileSide::Below) };
                wrong += usize::from(par.count_normals_2d(q).count != want || par.neile_classify(q) != side);
            }
        }
        // The evolute itself: zero residual, zero discriminant, two feet.
        let mut off = 0;
        for k in 1..=400 {
            let x0 = -3.0 / a + 6.0 / a * k as f64 / 401.0;
            if x0.abs() < 1e-9 {
                continue;
            }
            let q = par.evolute_point(x0);
            off += usize::from(
                par.neile_residual(q).abs() > band(q)
                    || par.neile_classify(q) != NeileSide::On
                    || par.count_normals_2d(q).count != 2,
            );
        }
        let cs: Vec<usize> = par.c_points().iter().map(|&c| par.count_normals_2d(c).count).collect();
        let focus = par.count_normals_2d(PlanePoint::new(0.0, 1.0 / a).unwrap()).count;
        ok &= wrong == 0 && off == 0 && cs == [2, 2] && focus == 1;
        parts.push(format!("a={a}: {wrong}/{graded} grid mismatches, {off} evolute misses, C {cs:?}, focus {focus}"));
    }
    check(ok, parts.join("; "))
}

fn run_cli(dir: &Path, cfg: &Path, args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_caustica"))
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn determinism() -> Verdict {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = root.path().join("run.cfg");
    std::fs::write(&cfg, "a = 1\nb = 4\nsamples = 20000\nseed = 7\nn = 48\n").map_err(|e| e.to_string())?;
    let names = ["census.json", "caustic_sheet1.obj", "caustic_sheet2.ply"];
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let dir = root.path().join(run);
        run_cli(&dir, &cfg, &["census"])?;
        run_cli(&dir, &cfg, &["caustic-mesh", "--sheet", "1"])?;
        run_cli(&dir, &cfg, &["caustic-mesh", "--sheet", "2", "--format", "ply"])?;
        let files: Vec<Vec<u8>> = names.iter().map(|n| std::fs::read(dir.join(n)).unwrap_or_default()).collect();
        outputs.push(files);
    }
    let same = outputs[0] == outputs[1] && outputs[0].iter().all(|f| !f.is_empty());
    let bytes: usize = outputs[0].iter().map(Vec::len).sum();
    check(same, format!("{} files, {bytes} bytes, identical: {same}", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("oracle agreement", oracle_agreement),
        ("axis counts", axis_counts),
        ("curvature centres are double roots", curvature_centres),
        ("E points against the numeric crossing", e_point_closed_form),
        ("coincidence at b = 3a", coincidence_at_3a),
        ("region census", census),
        ("plane section table", section_table),
        ("nodal curve parametrizations", nodal),
        ("sheet swap identity", swap_identity),
        ("plane parabola", parabola),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
