//! Local invariants of the curve at a point: multiplicity, tangent, line orders, and weights.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::check::Check;
use crate::curve::DgzCurve;
use crate::error::{Error, Result};
use crate::gf::{Elem, Embedding, Field};
use crate::plane::{ProjLine, ProjPoint};
use crate::poly::{binomial_mod, lucas_expansion, Monomial, TriPoly, UniPoly};

/// Which of the three point classes of the curve a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PointClass {
    /// Defined over `F_{q^2}` (the singular points).
    Fq2,
    /// Defined over `F_{q^3}`.
    Fq3,
    /// Anything else.
    Generic,
}

impl PointClass {
    pub fn of(p: &ProjPoint, q: u64) -> PointClass {
        if p.is_rational_over(q * q) {
            PointClass::Fq2
        } else if p.is_rational_over(q * q * q) {
            PointClass::Fq3
        } else {
            PointClass::Generic
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PointClass::Fq2 => "C(F_q^2)",
            PointClass::Fq3 => "C(F_q^3)",
            PointClass::Generic => "generic",
        }
    }

    pub fn expected_orders(self, q: u64) -> [u64; 3] {
        match self {
            PointClass::Fq2 => [0, q - 1, q],
            PointClass::Fq3 => [0, 1, q + 1],
            PointClass::Generic => [0, 1, q],
        }
    }

    pub fn expected_v_r(self, q: u64) -> u64 {
        match self {
            PointClass::Fq2 => q - 2,
            PointClass::Fq3 => 1,
            PointClass::Generic => 0,
        }
    }

    pub fn expected_v_s(self) -> u64 {
        match self {
            PointClass::Fq3 => 1,
            _ => 0,
        }
    }
}

/// Generic order sequence `(0, 1, q)` of the curve with respect to lines.
pub fn epsilon(q: u64) -> [u64; 3] {
    [0, 1, q]
}

/// Frobenius orders `(0, q)`.
pub fn nu(q: u64) -> [u64; 2] {
    [0, q]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub point: String,
    pub multiplicity: u64,
    pub class: Option<PointClass>,
    pub tangent: Option<String>,
    pub orders: Option<[u64; 3]>,
    pub v_r: Option<u64>,
    pub v_s: Option<u64>,
}

/// The curve's equation lifted to the field of the points under study.
pub struct Local<'a> {
    curve: &'a DgzCurve,
    field: Field,
    f: TriPoly,
}

/// Lowest-order data at a point in an affine chart: `F` with `x_k = 1`, `x_i = a + u`, `x_j = b + v`.
struct Chart {
    k: usize,
    i: usize,
    j: usize,
    a: Elem,
    b: Elem,
}

impl Chart {
    fn at(p: &ProjPoint) -> Chart {
        let c = p.coords();
        let k = c.iter().position(|e| !e.is_zero()).expect("nonzero point");
        let (i, j) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        // Normalized points have c[k] = 1.
        Chart { k, i, j, a: c[i], b: c[j] }
    }

    /// The projective line `alpha u + beta v = 0`.
    fn line(&self, field: &Field, alpha: Elem, beta: Elem) -> Result<ProjLine> {
        let mut l = [Elem::ZERO; 3];
        l[self.i] = alpha;
        l[self.j] = beta;
        l[self.k] = field.neg(field.add(field.mul(alpha, self.a), field.mul(beta, self.b)));
        ProjLine::new(field, l)
    }
}

impl<'a> Local<'a> {
    pub fn new(curve: &'a DgzCurve, field: &Field) -> Result<Local<'a>> {
        let e = Embedding::new(curve.field(), field)?;
        Ok(Local { curve, field: field.clone(), f: curve.f.embed(&e)? })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn check(&self, p: &ProjPoint) -> Result<()> {
        if *p.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn is_on_curve(&self, p: &ProjPoint) -> Result<bool> {
        self.check(p)?;
        Ok(self.f.eval_coords(p.coords()).is_zero())
    }

    /// Terms of total degree `<= max_deg` of `F` in local coordinates `(u, v)` at `p`.
    /// The result uses the `x`, `y` slots for `u`, `v`.
    fn jet(&self, p: &ProjPoint, max_deg: u32) -> (Chart, TriPoly) {
        let fld = &self.field;
        let ch = Chart::at(p);
        let pf = fld.p();
        let mut pow_cache: HashMap<(bool, u32), Elem> = HashMap::new();
        let mut pw = |second: bool, n: u32| {
            *pow_cache
                .entry((second, n))
                .or_insert_with(|| fld.pow(if second { ch.b } else { ch.a }, n as u64))
        };
        let mut exp_cache: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        let mut acc: HashMap<Monomial, Elem> = HashMap::new();
        for &(m, c) in self.f.terms() {
            let e = m.exps();
            let (ei, ej) = (e[ch.i], e[ch.j]);
            let xi: Vec<(u32, u32)> = exp_cache.entry(ei).or_insert_with(|| lucas_expansion(ei, pf)).clone();
            let xj: Vec<(u32, u32)> = exp_cache.entry(ej).or_insert_with(|| lucas_expansion(ej, pf)).clone();
            for &(k1, b1) in xi.iter().take_while(|t| t.0 <= max_deg) {
                let c1 = fld.mul(fld.mul(c, fld.from_int(b1 as i64)), pw(false, ei - k1));
                if c1.is_zero() {
                    continue;
                }
                for &(k2, b2) in xj.iter().take_while(|t| t.0 + k1 <= max_deg) {
                    let c2 = fld.mul(fld.mul(c1, fld.from_int(b2 as i64)), pw(true, ej - k2));
                    let slot = acc.entry(Monomial::new(k1, k2, 0)).or_insert(Elem::ZERO);
                    *slot = fld.add(*slot, c2);
                }
            }
        }
        (ch, TriPoly::from_terms(fld, acc))
    }

    /// Lowest total degree of `F` in local coordinates at `p`; zero off the curve.
    pub fn multiplicity(&self, p: &ProjPoint) -> Result<u64> {
        self.check(p)?;
        if !self.f.eval_coords(p.coords()).is_zero() {
            return Ok(0);
        }
        let cap = self.curve.q() as u32 + 2;
        let (_, jet) = self.jet(p, cap);
        // Terms are sorted by descending degree.
        jet.terms()
            .last()
            .map(|(m, _)| m.degree() as u64)
            .ok_or_else(|| Error::ScaleExceeded(format!("multiplicity above {cap} at {p}")))
    }

    /// The tangent line at a curve point. The lowest form must be a power of one linear form.
    pub fn tangent(&self, p: &ProjPoint) -> Result<ProjLine> {
        self.check(p)?;
        if !self.f.eval_coords(p.coords()).is_zero() {
            return Err(Error::PointNotOnCurve);
        }
        let fld = &self.field;
        let cap = self.curve.q() as u32 + 2;
        let (ch, jet) = self.jet(p, cap);
        let m = jet.terms().last().map(|(mo, _)| mo.degree()).ok_or(Error::TangentConeNotPower)?;
        let cone = TriPoly::from_terms(fld, jet.terms().iter().copied().filter(|(mo, _)| mo.degree() == m));
        let cu = cone.coeff(Monomial::new(m, 0, 0));
        let (alpha, beta) = if cu.is_zero() {
            (Elem::ZERO, Elem::ONE)
        } else {
            // cone(1, s) = cu (1 + beta s)^m has the single root s = -1/beta, or none when beta = 0.
            let dense: Vec<Elem> = (0..=m).map(|k| cone.coeff(Monomial::new(m - k, k, 0))).collect();
            let roots = UniPoly::new(fld, dense).roots(&mut ChaCha8Rng::seed_from_u64(0));
            match roots.as_slice() {
                [] => (Elem::ONE, Elem::ZERO),
                [s] => (Elem::ONE, fld.neg(fld.inv(*s)?)),
                _ => return Err(Error::TangentConeNotPower),
            }
        };
        let lin = TriPoly::from_terms(fld, [(Monomial::new(1, 0, 0), alpha), (Monomial::new(0, 1, 0), beta)]);
        let lead = if cu.is_zero() { cone.coeff(Monomial::new(0, m, 0)) } else { cu };
        if lin.pow(m as u64).scale(lead) != cone {
            return Err(Error::TangentConeNotPower);
        }
        ch.line(fld, alpha, beta)
    }

    /// Intersection multiplicity at `p` of the curve with the line through `p` and `other`.
    pub fn order_along(&self, p: &ProjPoint, other: &ProjPoint) -> Result<u64> {
        let r = self.f.restrict_to_line(p, other)?;
        // A zero restriction would mean the line is a component.
        r.vanishing_order().map(|k| k as u64).ok_or(Error::SingularCurve)
    }

    /// A point of `line` other than `p`, preferring coordinate points and then low indices.
    fn second_point(&self, line: &ProjLine, p: &ProjPoint) -> Result<ProjPoint> {
        let fld = &self.field;
        for l2 in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            let axis = ProjLine::from_ints(fld, l2)?;
            if axis == *line {
                continue;
            }
            let x = line.meet(&axis)?;
            if x != *p {
                return Ok(x);
            }
        }
        unreachable!("three coordinate lines cannot all meet a line only at p")
    }

    /// A point off `line`, so that it spans with `p` a line different from `line`.
    fn point_off(&self, line: &ProjLine) -> Result<ProjPoint> {
        for c in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]] {
            let x = ProjPoint::from_ints(&self.field, c)?;
            if !line.contains(&x) {
                return Ok(x);
            }
        }
        unreachable!("a line misses one of four points in general position")
    }

    /// `(j0, j1, j2)`: orders along a non-tangent line and along the tangent.
    pub fn order_sequence(&self, p: &ProjPoint) -> Result<[u64; 3]> {
        let t = self.tangent(p)?;
        let j2 = self.order_along(p, &self.second_point(&t, p)?)?;
        let j1 = self.order_along(p, &self.point_off(&t)?)?;
        Ok([0, j1, j2])
    }

    /// Every line through `p` with its intersection multiplicity at `p`.
    pub fn pencil(&self, p: &ProjPoint) -> Result<Vec<(ProjLine, u64)>> {
        self.check(p)?;
        let fld = &self.field;
        let base = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .into_iter()
            .map(|c| ProjLine::from_ints(fld, c))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|l| !l.contains(p))
            .expect("some coordinate line misses p");
        base.points()
            .into_iter()
            .map(|x| Ok((ProjLine::through(p, &x)?, self.order_along(p, &x)?)))
            .collect()
    }

    /// All local data at a point; off the curve only the multiplicity is filled.
    pub fn local_data(&self, p: &ProjPoint) -> Result<LocalData> {
        let q = self.curve.q();
        let mult = self.multiplicity(p)?;
        if mult == 0 {
            return Ok(LocalData {
                point: p.to_string(),
                multiplicity: 0,
                class: None,
                tangent: None,
                orders: None,
                v_r: None,
                v_s: None,
            });
        }
        let class = PointClass::of(p, q);
        let tangent = self.tangent(p)?;
        let orders = self.order_sequence(p)?;
        let v_r = weight_r(orders, q, self.field.p())?;
        if v_r != class.expected_v_r(q) {
            return Err(Error::ClassificationMismatch {
                class: class.label().into(),
                computed: v_r,
                expected: class.expected_v_r(q),
            });
        }
        Ok(LocalData {
            point: p.to_string(),
            multiplicity: mult,
            class: Some(class),
            tangent: Some(tangent.to_string()),
            orders: Some(orders),
            v_r: Some(v_r),
            v_s: Some(class.expected_v_s()),
        })
    }

    /// For a nonsingular point: the tangent passes through `P^q`.
    pub fn frobenius_tangency(&self, p: &ProjPoint) -> Result<bool> {
        let t = self.tangent(p)?;
        Ok(t.contains(&p.frobenius(self.curve.q())))
    }
}

/// `sum (j_i - eps_i)`, exact when `det [C(j_i, eps_k)]` is nonzero mod p.
pub fn weight_r(j: [u64; 3], q: u64, p: u32) -> Result<u64> {
    let eps = epsilon(q);
    let p = p as u64;
    let m: Vec<Vec<i64>> = j
        .iter()
        .map(|&ji| eps.iter().map(|&ek| binomial_mod(ji, ek, p) as i64).collect())
        .collect();
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.rem_euclid(p as i64) == 0 {
        return Err(Error::IndeterminateWeight);
    }
    Ok(j.iter().zip(eps).map(|(a, b)| a - b).sum())
}

pub fn genus(q: u64) -> u64 {
    q * (q - 1) * (q * q * q - 2 * q - 2) / 2 + 1
}

/// Genus of the quotient by the Sylow `p`-subgroup `Q`.
pub fn quotient_genus(q: u64) -> i64 {
    let q = q as i64;
    (q - 1) * (q * q - 2 * q - 2) / 2 + 1
}

/// Number of gaps of the numerical semigroup generated by two coprime integers.
pub fn semigroup_gaps(a: u64, b: u64) -> u64 {
    if a == 1 || b == 1 {
        return 0;
    }
    let bound = a * b;
    let mut reach = vec![false; bound as usize + 1];
    reach[0] = true;
    for n in 1..=bound as usize {
        reach[n] = (n >= a as usize && reach[n - a as usize]) || (n >= b as usize && reach[n - b as usize]);
    }
    reach.iter().filter(|r| !**r).count() as u64
}

/// Genus from degree and the `q^4 - q` unibranch singularities, against the closed form.
pub fn genus_check(q: u64) -> Vec<Check> {
    let d = (q * q * q - q * q) as i64;
    let delta = semigroup_gaps(q - 1, q) as i64;
    let sing = (q.pow(4) - q) as i64;
    let plucker = (d - 1) * (d - 2) / 2 - sing * delta;
    let g = genus(q) as i64;
    let gy = quotient_genus(q);
    let q_ = q as i64;
    let hurwitz_rhs = q_ * q_ * (2 * gy - 2) + 2 * (q_ * q_ - 1) * (q_ * q_ - q_);
    vec![
        Check::eq(format!("delta at q={q}"), delta, (q_ - 1) * (q_ - 2) / 2),
        Check::eq(format!("genus at q={q}"), plucker, g),
        Check::eq(format!("Hurwitz for the Q-quotient at q={q}"), 2 * g - 2, hurwitz_rhs),
    ]
}

/// Degrees of the ramification and Frobenius divisors against the per-class weights.
pub fn divisor_degree_check(q: u64) -> Vec<Check> {
    let g = genus(q) as i64;
    let q = q as i64;
    let n2 = q.pow(4) - q;
    let n3 = q.pow(6) - q.pow(5) - q.pow(4) + q.pow(3);
    let deg_r = (q + 1) * (2 * g - 2) + 3 * (q * q * q - q * q);
    let deg_s = q * (2 * g - 2) + (q + 2) * (q * q * q - q * q);
    let closed_r = q * (q - 1) * (q.pow(4) + q.pow(3) - 2 * q * q - q - 2);
    vec![
        Check::eq(format!("deg R class sum at q={q}"), (q - 2) * n2 + n3, deg_r),
        Check::eq(format!("deg R closed form at q={q}"), closed_r, deg_r),
        Check::eq(format!("deg S class sum at q={q}"), n3, deg_s),
    ]
}
