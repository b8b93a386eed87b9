//! Point counts of the curve over extensions, the `Lambda3` identity, and the arc property.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::check::Check;
use crate::curve::DgzCurve;
use crate::error::{Error, Result};
use crate::gf::{build_field, Elem, Embedding, Field};
use crate::plane::{classify_lambda, plane_size, subplane_lines, LambdaClass, ProjLine, ProjPoint};
use crate::poly::Evaluator;

/// Largest plane swept point by point.
pub const MAX_CENSUS_POINTS: u64 = 20_000_000;
/// Largest `q` for the full line sweep of the arc.
pub const ARC_MAX_Q: u64 = 4;
/// Smallest extension degree that can carry curve points outside the `F_{q^2}` and `F_{q^3}` planes.
///
/// For a curve point `P` over `F_{q^i}`, the line through `P^{q^k}` and `P^{q^{k+1}}` also holds
/// `P^{q^{k+3}}`. For `i` in 4..=6 these lines coincide unless `P` is defined over `F_{q^3}`,
/// which puts `P, P^q, P^{q^2}` on one line and hence `P` in `C(F_{q^2})`.
pub const MIN_GENERIC_EXT: u32 = 7;
/// Lines tried per wanted sample before giving up on an extension.
const LINES_PER_SAMPLE: usize = 200;

/// Extension field `F_{q^i}` of the curve's base field, plus the embedding into it.
pub fn extension(curve: &DgzCurve, i: u32) -> Result<(Field, Embedding)> {
    let f = build_field(curve.p() as u64, curve.h() * i)?;
    let e = Embedding::new(curve.field(), &f)?;
    Ok((f, e))
}

fn check_plane(field: &Field) -> Result<u64> {
    let n = plane_size(field.order() as u64);
    if n > MAX_CENSUS_POINTS {
        return Err(Error::ScaleExceeded(format!("plane over a field of order {} has {n} points", field.order())));
    }
    Ok(n)
}

/// Point indices `P` of `PG(2, F_{q^i})` with `F(P) = 0`, ascending.
fn zero_indices(curve: &DgzCurve, i: u32) -> Result<(Field, Vec<u64>)> {
    let (f, e) = extension(curve, i)?;
    let n = check_plane(&f)?;
    let ev = Evaluator::new(&curve.f, &e)?;
    let mut idx: Vec<u64> = (0..n)
        .into_par_iter()
        .filter(|&k| {
            let p = ProjPoint::from_index(&f, k).expect("in range");
            ev.is_zero_at(p.coords())
        })
        .collect();
    idx.sort_unstable();
    Ok((f, idx))
}

/// `|C(F_{q^i})|` by evaluating `F` at every point.
pub fn count_points(curve: &DgzCurve, i: u32) -> Result<u64> {
    Ok(zero_indices(curve, i)?.1.len() as u64)
}

/// The points of `C(F_{q^i})` in enumeration order.
pub fn curve_points(curve: &DgzCurve, i: u32) -> Result<Vec<ProjPoint>> {
    let (f, idx) = zero_indices(curve, i)?;
    idx.into_iter().map(|k| ProjPoint::from_index(&f, k)).collect()
}

/// Closed-form `|C(F_{q^i})|` for `i <= 3`; no formula is known beyond that.
pub fn expected_count(q: u64, i: u32) -> Option<u64> {
    match i {
        1 => Some(0),
        2 => Some(q.pow(4) - q),
        3 => Some(q.pow(6) - q.pow(5) - q.pow(4) + q.pow(3)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub q: u64,
    /// `(i, N_i, expected N_i if known)`.
    pub counts: Vec<(u32, u64, Option<u64>)>,
}

impl CensusReport {
    pub fn checks(&self) -> Vec<Check> {
        self.counts
            .iter()
            .map(|&(i, n, want)| match want {
                Some(w) => Check::eq(format!("N_{i}"), n, w),
                None => Check::new(format!("N_{i}"), true, format!("{n} (no closed form)")),
            })
            .collect()
    }
}

pub fn census(curve: &DgzCurve, exts: &[u32]) -> Result<CensusReport> {
    let counts = exts
        .iter()
        .map(|&i| Ok((i, count_points(curve, i)?, expected_count(curve.q(), i))))
        .collect::<Result<_>>()?;
    Ok(CensusReport { q: curve.q(), counts })
}

/// `C(F_{q^3})` and `Lambda3` are the same point set.
pub fn verify_lambda3(curve: &DgzCurve) -> Result<Check> {
    let (f, zeros) = zero_indices(curve, 3)?;
    let n = plane_size(f.order() as u64);
    let lambda3: Vec<u64> = (0..n)
        .into_par_iter()
        .filter(|&k| {
            let p = ProjPoint::from_index(&f, k).expect("in range");
            classify_lambda(&p, curve.field()) == Ok(LambdaClass::Lambda3)
        })
        .collect();
    let mut lambda3 = lambda3;
    lambda3.sort_unstable();
    Ok(Check::new(
        "C(F_q^3) = Lambda3",
        zeros == lambda3,
        format!("|C(F_q^3)| = {}, |Lambda3| = {}", zeros.len(), lambda3.len()),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcReport {
    pub q: u64,
    pub k: u64,
    pub n: u64,
    /// Intersection size with the arc -> number of lines.
    pub histogram: BTreeMap<u64, u64>,
    pub complete: bool,
    pub checks: Vec<Check>,
}

/// Sweeps every line of `PG(2, F_{q^3})` against `C(F_{q^3})`.
pub fn verify_arc(curve: &DgzCurve) -> Result<ArcReport> {
    let q = curve.q();
    if q > ARC_MAX_Q {
        return Err(Error::ScaleExceeded(format!("arc sweep for q = {q} > {ARC_MAX_Q}")));
    }
    let (f, zeros) = zero_indices(curve, 3)?;
    let n_pts = plane_size(f.order() as u64) as usize;
    let mut on_arc = vec![false; n_pts];
    for &k in &zeros {
        on_arc[k as usize] = true;
    }
    let k = zeros.len() as u64;
    let lines: Vec<ProjLine> = crate::plane::enumerate_lines(&f)?.collect();
    let sizes: Vec<(u64, Vec<u64>)> = lines
        .par_iter()
        .map(|l| {
            let pts: Vec<u64> = l.points().iter().map(ProjPoint::index).collect();
            let c = pts.iter().filter(|&&i| on_arc[i as usize]).count() as u64;
            (c, pts)
        })
        .collect();
    let n = sizes.iter().map(|s| s.0).max().unwrap_or(0);
    let mut histogram = BTreeMap::new();
    for (c, _) in &sizes {
        *histogram.entry(*c).or_insert(0u64) += 1;
    }

    // Lines through exactly one point of the F_q-subplane, and the F_q-lines themselves.
    let sub = build_field(curve.p() as u64, curve.h())?;
    let emb = Embedding::new(&sub, &f)?;
    let rational: Vec<bool> = {
        let mut r = vec![false; n_pts];
        for p in crate::plane::enumerate_points(&sub)? {
            r[p.embed(&emb)?.index() as usize] = true;
        }
        r
    };
    let fq_lines: Vec<ProjLine> = subplane_lines(&sub, &f)?;
    let fq_line_hits: u64 = fq_lines
        .iter()
        .map(|l| l.points().iter().filter(|p| on_arc[p.index() as usize]).count() as u64)
        .sum();
    let mut one_point_lines = 0u64;
    let mut one_point_bad = 0u64;
    let mut covered = vec![false; n_pts];
    for (c, pts) in &sizes {
        let r = pts.iter().filter(|&&i| rational[i as usize]).count();
        if r == 1 {
            one_point_lines += 1;
            if *c != q * q * q - q * q {
                one_point_bad += 1;
            }
        }
        if *c == n {
            for &i in pts {
                covered[i as usize] = true;
            }
        }
    }
    let exterior_uncovered = (0..n_pts).filter(|&i| !on_arc[i] && !covered[i]).count();
    let complete = exterior_uncovered == 0;
    let incidences: u64 = histogram.iter().map(|(c, m)| c * m).sum();
    let q3 = q * q * q;
    let checks = vec![
        Check::eq("arc size", k, q.pow(6) - q.pow(5) - q.pow(4) + q3),
        Check::eq("max line intersection", n, q3 - q * q),
        Check::eq("F_q-lines meet the arc", fq_line_hits, 0),
        Check::new(
            "lines through one subplane point meet the arc in q^3-q^2 points",
            one_point_bad == 0,
            format!("{one_point_lines} such lines, {one_point_bad} deviating"),
        ),
        Check::eq("incidence double count", incidences, k * (q3 + 1)),
        Check::new("complete", complete, format!("{exterior_uncovered} exterior points uncovered")),
    ];
    Ok(ArcReport { q, k, n, histogram, complete, checks })
}

/// Random points of `C(F_{q^i})` outside the planes over `F_{q^2}` and `F_{q^3}`.
///
/// Each sample is the first root of `F` along a random line, so samples are deterministic in `seed`.
pub fn sample_generic_points(curve: &DgzCurve, i: u32, count: usize, seed: u64) -> Result<Vec<ProjPoint>> {
    let (f, e) = extension(curve, i)?;
    let lifted = curve.f.embed(&e)?;
    let q = curve.q();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64) << 32) ^ q);
    let mut out: Vec<ProjPoint> = Vec::with_capacity(count);
    let random_point = |rng: &mut ChaCha8Rng| loop {
        let c = [0; 3].map(|_| Elem::from_index(rng.gen_range(0..f.order())));
        if let Ok(p) = ProjPoint::new(&f, c) {
            return p;
        }
    };
    let attempts = LINES_PER_SAMPLE * count.max(1);
    for _ in 0..attempts {
        if out.len() == count {
            break;
        }
        let a = random_point(&mut rng);
        let b = random_point(&mut rng);
        if a == b {
            continue;
        }
        let r = lifted.restrict_to_line(&a, &b)?;
        if r.is_zero() {
            continue;
        }
        let roots = r.roots(&mut rng);
        let found = roots.iter().find_map(|&t| {
            let c = [0, 1, 2].map(|j| f.add(a.coords()[j], f.mul(t, b.coords()[j])));
            let p = ProjPoint::new(&f, c).ok()?;
            let generic = !p.is_rational_over(q * q) && !p.is_rational_over(q * q * q);
            (generic && !out.contains(&p)).then_some(p)
        });
        if let Some(p) = found {
            out.push(p);
        }
    }
    if out.len() < count {
        return Err(Error::ScaleExceeded(format!("found only {} of {count} generic points", out.len())));
    }
    Ok(out)
}

/// Generic samples from the smallest extension `F_{q^i}`, `i >= 7`, where any are found.
pub fn sample_generic(curve: &DgzCurve, count: usize, seed: u64) -> Result<(u32, Vec<ProjPoint>)> {
    let mut i = MIN_GENERIC_EXT;
    while curve.h() * i <= crate::gf::MAX_DEGREE {
        // A cheap probe first: an empty extension would otherwise cost the full attempt budget.
        if sample_generic_points(curve, i, 1, seed).is_ok() {
            return Ok((i, sample_generic_points(curve, i, count, seed)?));
        }
        i += 1;
    }
    Err(Error::ScaleExceeded(format!("no generic points of C found for q = {} within field caps", curve.q())))
}
