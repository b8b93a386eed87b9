//! `PGL(3, q)` elements, named subgroups, and orbits on plane points.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::check::Check;
use crate::error::{Error, Result};
use crate::gf::{build_field, prime_factors, Elem, Embedding, Field};
use crate::matrix::Mat3;
use crate::plane::{classify_lambda, enumerate_points, LambdaClass, ProjPoint};

/// Largest group we enumerate element by element (`|PGL(3,5)|`).
pub const MAX_GROUP_ENUM: u64 = 372_000;
/// Largest orbit we close point by point.
pub const MAX_ORBIT: u64 = 4_000_000;

/// An invertible matrix scaled so its first nonzero entry (row-major) is one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupElem(Mat3);

impl GroupElem {
    pub fn new(field: &Field, m: &Mat3) -> Result<GroupElem> {
        if !m.is_invertible(field) {
            return Err(Error::SingularMatrix);
        }
        let lead = m.0.iter().flatten().find(|e| !e.is_zero()).copied().expect("invertible");
        Ok(GroupElem(m.scale(field, field.inv(lead)?)))
    }

    pub fn identity() -> GroupElem {
        GroupElem(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn compose(&self, field: &Field, other: &GroupElem) -> GroupElem {
        GroupElem::new(field, &self.0.mul(field, &other.0)).expect("product of invertibles")
    }

    /// Image of a point; `e` maps the group's field into the point's field.
    pub fn act(&self, p: &ProjPoint, e: &Embedding) -> ProjPoint {
        let m = self.0.embed(e);
        ProjPoint::new(p.field(), m.apply(p.field(), *p.coords())).expect("invertible image")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SubgroupName {
    T,
    Q,
    Phi,
    Psi,
    Dil,
    Singer,
    Full,
}

impl SubgroupName {
    pub const ALL: [SubgroupName; 7] = [
        SubgroupName::T,
        SubgroupName::Q,
        SubgroupName::Phi,
        SubgroupName::Psi,
        SubgroupName::Dil,
        SubgroupName::Singer,
        SubgroupName::Full,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubgroupName::T => "T",
            SubgroupName::Q => "Q",
            SubgroupName::Phi => "Phi",
            SubgroupName::Psi => "Psi",
            SubgroupName::Dil => "Dil",
            SubgroupName::Singer => "Singer",
            SubgroupName::Full => "Full",
        }
    }

    /// Order of the subgroup of `PGL(3, q)`.
    pub fn expected_order(self, q: u64) -> u64 {
        match self {
            SubgroupName::T => q * q,
            SubgroupName::Q => q * q * q,
            SubgroupName::Phi => q,
            SubgroupName::Psi => (q - 1) * (q - 1),
            SubgroupName::Dil => q - 1,
            SubgroupName::Singer => q * q + q + 1,
            SubgroupName::Full => pgl3_order(q),
        }
    }
}

impl fmt::Display for SubgroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubgroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SubgroupName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

pub fn pgl3_order(q: u64) -> u64 {
    q.pow(3) * (q.pow(3) - 1) * (q * q - 1)
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    pub name: SubgroupName,
    field: Field,
    pub generators: Vec<GroupElem>,
}

/// `F_p`-basis `1, t, ..., t^{h-1}` of the field.
fn prime_basis(field: &Field) -> Vec<Elem> {
    (0..field.m()).map(|k| Elem::from_index(field.p().pow(k))).collect()
}

/// Companion matrix of `x^3 + c2 x^2 + c1 x + c0`.
fn companion(field: &Field, c: [Elem; 3]) -> Mat3 {
    let mut m = Mat3([[Elem::ZERO; 3]; 3]);
    m.0[1][0] = Elem::ONE;
    m.0[2][1] = Elem::ONE;
    for (i, ci) in c.iter().enumerate() {
        m.0[i][2] = field.neg(*ci);
    }
    m
}

/// Coefficients `(c0, c1, c2)` of the smallest monic cubic whose companion matrix has order `q^3 - 1`.
pub fn smallest_primitive_cubic(field: &Field) -> [Elem; 3] {
    let q = field.order() as u64;
    let n = q * q * q - 1;
    let primes = prime_factors(n);
    for c0 in field.elements().skip(1) {
        for c1 in field.elements() {
            for c2 in field.elements() {
                let m = companion(field, [c0, c1, c2]);
                if m.pow(field, n) == Mat3::identity()
                    && primes.iter().all(|&r| m.pow(field, n / r) != Mat3::identity())
                {
                    return [c0, c1, c2];
                }
            }
        }
    }
    unreachable!("primitive cubics exist over every finite field")
}

impl Subgroup {
    pub fn new(name: SubgroupName, field: &Field) -> Subgroup {
        let basis = prime_basis(field);
        let w = field.primitive_element();
        let (o, l) = (Elem::ZERO, Elem::ONE);
        let elem = |rows: [[Elem; 3]; 3]| GroupElem::new(field, &Mat3(rows)).expect("invertible generator");
        let shear = |i: usize, j: usize, c: Elem| {
            let mut m = Mat3::identity();
            m.0[i][j] = c;
            GroupElem::new(field, &m).expect("invertible")
        };
        let translations = || {
            basis.iter().flat_map(|&b| [shear(0, 2, b), shear(1, 2, b)]).collect::<Vec<_>>()
        };
        let phis = || basis.iter().map(|&b| shear(1, 0, b)).collect::<Vec<_>>();
        let generators = match name {
            SubgroupName::T => translations(),
            SubgroupName::Phi => phis(),
            SubgroupName::Q => {
                let mut g = translations();
                g.extend(phis());
                g
            }
            SubgroupName::Psi => vec![elem([[w, o, o], [o, l, o], [o, o, l]]), elem([[l, o, o], [o, w, o], [o, o, l]])],
            SubgroupName::Dil => vec![elem([[w, o, o], [o, w, o], [o, o, l]])],
            SubgroupName::Singer => {
                vec![GroupElem::new(field, &companion(field, smallest_primitive_cubic(field))).expect("invertible")]
            }
            SubgroupName::Full => {
                let mut g = Vec::new();
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            g.extend(basis.iter().map(|&b| shear(i, j, b)));
                        }
                    }
                }
                g.push(elem([[w, o, o], [o, l, o], [o, o, l]]));
                g
            }
        };
        // Trivial generators (q = 2 makes Psi and Dil trivial) are dropped.
        let generators = generators.into_iter().filter(|g| *g != GroupElem::identity()).collect();
        Subgroup { name, field: field.clone(), generators }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }

    /// All elements by closure under right multiplication by generators.
    pub fn elements(&self) -> Result<Vec<GroupElem>> {
        if self.name.expected_order(self.q()) > MAX_GROUP_ENUM {
            return Err(Error::ScaleExceeded(format!(
                "enumerating {} for q = {}",
                self.name,
                self.q()
            )));
        }
        let id = GroupElem::identity();
        let mut seen: HashSet<GroupElem> = HashSet::from([id]);
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            let g = out[i];
            for s in &self.generators {
                let h = g.compose(&self.field, s);
                if seen.insert(h) {
                    if seen.len() as u64 > MAX_GROUP_ENUM {
                        return Err(Error::ScaleExceeded(format!("{} closure", self.name)));
                    }
                    out.push(h);
                }
            }
            i += 1;
        }
        Ok(out)
    }

    pub fn generated_order(&self) -> Result<u64> {
        Ok(self.elements()?.len() as u64)
    }

    /// Orbit of a point whose field contains the group's field.
    pub fn orbit(&self, p: &ProjPoint) -> Result<Vec<ProjPoint>> {
        let e = Embedding::new(&self.field, p.field())?;
        let gens: Vec<Mat3> = self.generators.iter().map(|g| g.matrix().embed(&e)).collect();
        let pf = p.field();
        let mut seen: HashSet<ProjPoint> = HashSet::from([p.clone()]);
        let mut queue = VecDeque::from([p.clone()]);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            for m in &gens {
                let y = ProjPoint::new(pf, m.apply(pf, *x.coords()))?;
                if !seen.contains(&y) {
                    if seen.len() as u64 >= MAX_ORBIT {
                        return Err(Error::ScaleExceeded(format!("orbit larger than {MAX_ORBIT}")));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
            out.push(x);
        }
        Ok(out)
    }

    pub fn orbit_record(&self, p: &ProjPoint) -> Result<OrbitRecord> {
        let size = self.orbit(p)?.len() as u64;
        let order = self.name.expected_order(self.q());
        Ok(OrbitRecord {
            subgroup: self.name,
            q: self.q(),
            representative: p.to_string(),
            orbit_size: size,
            stabilizer_order: order / size,
            group_order: order,
        })
    }

    /// Partition of a finite point set into orbits, each sorted by point index.
    pub fn orbits_on(&self, points: &[ProjPoint]) -> Result<Vec<Vec<ProjPoint>>> {
        let mut left: HashSet<ProjPoint> = points.iter().cloned().collect();
        let mut out = Vec::new();
        for p in points {
            if !left.contains(p) {
                continue;
            }
            let mut orb = self.orbit(p)?;
            for x in &orb {
                left.remove(x);
            }
            orb.sort_by_key(|x| x.index());
            out.push(orb);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub subgroup: SubgroupName,
    pub q: u64,
    pub representative: String,
    pub orbit_size: u64,
    pub stabilizer_order: u64,
    pub group_order: u64,
}

/// Generated orders of every named subgroup against their expected values.
pub fn verify_subgroup_orders(field: &Field) -> Vec<Check> {
    let q = field.order() as u64;
    SubgroupName::ALL
        .into_iter()
        .filter(|n| n.expected_order(q) <= MAX_GROUP_ENUM)
        .map(|n| match Subgroup::new(n, field).generated_order() {
            Ok(o) => Check::eq(format!("|{n}|"), o, n.expected_order(q)),
            Err(e) => Check::new(format!("|{n}|"), false, e.to_string()),
        })
        .collect()
}

/// The short orbits of `PGL(3, q)` on the curve: `PG(2, q^2) \ PG(2, q)` and `Lambda3`.
///
/// `long` are further curve points expected to have trivial stabilizer.
pub fn verify_two_short_orbits(field: &Field, long: &[ProjPoint]) -> Result<Vec<Check>> {
    let q = field.order() as u64;
    let (p, h) = (field.p() as u64, field.m());
    let full = Subgroup::new(SubgroupName::Full, field);
    let mut checks = Vec::new();

    let f2 = build_field(p, 2 * h)?;
    let omega_rep = ProjPoint::new(&f2, [Elem::ONE, f2.primitive_element(), Elem::ZERO])?;
    let omega = full.orbit(&omega_rep)?;
    let all_irrational = omega.iter().all(|x| !x.is_rational_over(q));
    checks.push(Check::new(
        "Omega is PG(2,q^2) minus PG(2,q)",
        all_irrational && omega.len() as u64 == q.pow(4) - q,
        format!("orbit size {}", omega.len()),
    ));
    checks.push(Check::eq("stabilizer of Omega point", pgl3_order(q) / omega.len() as u64, q * q * (q * q - 1)));

    let f3 = build_field(p, 3 * h)?;
    let delta_rep = enumerate_points(&f3)?
        .find(|x| classify_lambda(x, field).map(|c| c == LambdaClass::Lambda3).unwrap_or(false))
        .expect("Lambda3 is nonempty");
    let delta = full.orbit(&delta_rep)?;
    let in_l3 = delta.iter().all(|x| classify_lambda(x, field) == Ok(LambdaClass::Lambda3));
    let l3 = q.pow(6) - q.pow(5) - q.pow(4) + q.pow(3);
    checks.push(Check::new(
        "Delta is Lambda3",
        in_l3 && delta.len() as u64 == l3,
        format!("orbit size {}", delta.len()),
    ));
    checks.push(Check::eq("stabilizer of Delta point", pgl3_order(q) / delta.len() as u64, q * q + q + 1));

    for x in long {
        let r = full.orbit_record(x)?;
        checks.push(Check::eq(format!("stabilizer of {x}"), r.stabilizer_order, 1));
    }
    Ok(checks)
}

/// Stabilizer sizes in `Q` of curve points: `q^2` on `z = 0`, `q` on the lines `x = c z` with `c` in `F_q`,
/// and `1` elsewhere. `Q` itself fixes `(0:1:0)`.
pub fn verify_q_fixed_points(field: &Field, curve_points: &[ProjPoint]) -> Result<Vec<Check>> {
    let q = field.order() as u64;
    let q_elems = Subgroup::new(SubgroupName::Q, field).elements()?;
    let id = Embedding::identity(field);
    let y_inf = ProjPoint::from_ints(field, [0, 1, 0])?;
    let fixes_y = q_elems.iter().all(|g| g.act(&y_inf, &id) == y_inf);
    let mut embeds: Vec<Embedding> = Vec::new();
    let mut wrong = 0usize;
    let mut histogram: BTreeMap<u64, usize> = BTreeMap::new();
    for pt in curve_points {
        let e = match embeds.iter().find(|e| e.target() == pt.field()) {
            Some(e) => e.clone(),
            None => {
                let e = Embedding::new(field, pt.field())?;
                embeds.push(e.clone());
                e
            }
        };
        let stab = q_elems.iter().filter(|g| g.act(pt, &e) == *pt).count() as u64;
        let [x, _, z] = *pt.coords();
        let f = pt.field();
        let expected = if z.is_zero() {
            q * q
        } else {
            let ratio = f.div(x, z)?;
            if f.pow(ratio, q) == ratio { q } else { 1 }
        };
        if stab != expected {
            wrong += 1;
        }
        *histogram.entry(stab).or_default() += 1;
    }
    let detail = histogram.iter().map(|(s, n)| format!("{n} points with |Q_P| = {s}")).collect::<Vec<_>>().join(", ");
    Ok(vec![
        Check::new("Q fixes (0:1:0)", fixes_y, ""),
        Check::new(
            "stabilizers in Q of curve points",
            wrong == 0,
            if wrong == 0 { detail } else { format!("{wrong} mismatches; {detail}") },
        ),
    ])
}

/// Orbit sizes of `Q` and of `Q Psi` on the points `(1:m:0)`, `m` in `F_{q^2} \ F_q`.
pub fn line_at_infinity_orbits(field: &Field) -> Result<(Vec<usize>, Vec<usize>)> {
    let q = field.order() as u64;
    let f2 = build_field(field.p() as u64, 2 * field.m())?;
    let pts: Vec<ProjPoint> = f2
        .elements()
        .filter(|&m| f2.pow(m, q) != m)
        .map(|m| ProjPoint::new(&f2, [Elem::ONE, m, Elem::ZERO]))
        .collect::<Result<_>>()?;
    let q_grp = Subgroup::new(SubgroupName::Q, field);
    let mut q_psi = q_grp.clone();
    q_psi.generators.extend(Subgroup::new(SubgroupName::Psi, field).generators);
    let sizes = |g: &Subgroup| -> Result<Vec<usize>> {
        let mut s: Vec<usize> = g.orbits_on(&pts)?.iter().map(Vec::len).collect();
        s.sort_unstable();
        Ok(s)
    };
    Ok((sizes(&q_grp)?, sizes(&q_psi)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_is_canonical() {
        let f = build_field(3, 1).unwrap();
        let m = Mat3::from_ints(&f, [[0, 2, 1], [1, 0, 0], [0, 0, 2]]);
        let g = GroupElem::new(&f, &m).unwrap();
        assert_eq!(g.matrix().get(0, 1), Elem::ONE);
        assert_eq!(GroupElem::new(&f, g.matrix()).unwrap(), g);
        assert_eq!(GroupElem::new(&f, &m.scale(&f, f.from_int(2))).unwrap(), g);
        let sing = Mat3::from_ints(&f, [[1, 1, 1], [1, 1, 1], [0, 0, 1]]);
        assert_eq!(GroupElem::new(&f, &sing), Err(Error::SingularMatrix));
    }

    #[test]
    fn subgroup_orders() {
        for q in [2u64, 3, 4, 5] {
            let (p, h) = crate::gf::prime_power(q).unwrap();
            let f = build_field(p as u64, h).unwrap();
            for c in verify_subgroup_orders(&f) {
                assert!(c.passed, "q={q} {c:?}");
            }
        }
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(Subgroup::new(SubgroupName::T, &f3).generated_order().unwrap(), 9);
        assert_eq!(Subgroup::new(SubgroupName::Q, &f3).generated_order().unwrap(), 27);
        let f2 = build_field(2, 1).unwrap();
        assert_eq!(Subgroup::new(SubgroupName::Singer, &f2).generated_order().unwrap(), 7);
        assert_eq!(Subgroup::new(SubgroupName::Full, &f2).generated_order().unwrap(), 168);
        assert_eq!(Subgroup::new(SubgroupName::Full, &f3).generated_order().unwrap(), 5616);
    }

    #[test]
    fn full_group_caps() {
        let f7 = build_field(7, 1).unwrap();
        assert!(matches!(Subgroup::new(SubgroupName::Full, &f7).elements(), Err(Error::ScaleExceeded(_))));
        assert_eq!("singer".parse::<SubgroupName>(), Ok(SubgroupName::Singer));
        assert_eq!("X".parse::<SubgroupName>(), Err(Error::UnknownName("X".into())));
    }

    #[test]
    fn primitive_cubic_by_brute_force() {
        // Oracle: a monic cubic is primitive iff it has no roots in F_q and x has order q^3-1 modulo it.
        for (p, h) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let f = build_field(p, h).unwrap();
            let c = smallest_primitive_cubic(&f);
            let m = companion(&f, c);
            let q = f.order() as u64;
            let mut x = Mat3::identity();
            let mut order = 0u64;
            for k in 1..=q * q * q {
                x = x.mul(&f, &m);
                if x == Mat3::identity() {
                    order = k;
                    break;
                }
            }
            assert_eq!(order, q * q * q - 1);
        }
        let f2 = build_field(2, 1).unwrap();
        // Comparing c0 first, x^3 + x^2 + 1 precedes x^3 + x + 1.
        assert_eq!(smallest_primitive_cubic(&f2), [Elem::ONE, Elem::ZERO, Elem::ONE]);
    }

    #[test]
    fn short_orbits_small_q() {
        for q in [2u64, 3] {
            let f = build_field(q, 1).unwrap();
            for c in verify_two_short_orbits(&f, &[]).unwrap() {
                assert!(c.passed, "q={q} {c:?}");
            }
        }
        let f3 = build_field(3, 1).unwrap();
        let f9 = build_field(3, 2).unwrap();
        let pt = ProjPoint::new(&f9, [f9.generator(), Elem::ZERO, Elem::ONE]).unwrap();
        let r = Subgroup::new(SubgroupName::Full, &f3).orbit_record(&pt).unwrap();
        assert_eq!((r.orbit_size, r.stabilizer_order), (78, 72));
    }

    #[test]
    fn infinity_orbits() {
        for q in [3u64, 4, 5] {
            let (p, h) = crate::gf::prime_power(q).unwrap();
            let f = build_field(p as u64, h).unwrap();
            let (q_sizes, q_psi_sizes) = line_at_infinity_orbits(&f).unwrap();
            assert_eq!(q_sizes, vec![q as usize; q as usize - 1]);
            // m -> a m + b acts freely on F_{q^2} \ F_q.
            assert_eq!(q_psi_sizes, vec![(q * q - q) as usize]);
        }
    }

    #[test]
    fn q_stabilizers_of_curve_points() {
        use crate::census::curve_points;
        use crate::curve::DgzCurve;
        for q in [2u64, 3] {
            let c = DgzCurve::build(q).unwrap();
            let mut pts = curve_points(&c, 2).unwrap();
            pts.extend(curve_points(&c, 3).unwrap());
            let checks = verify_q_fixed_points(c.field(), &pts).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{checks:?}");
            // q^2 - q points on z = 0 and q(q^2 - q) on the lines x = c z.
            let want = format!("{} points with |Q_P| = {q}", q * (q * q - q));
            assert!(checks[1].detail.contains(&want), "{}", checks[1].detail);
        }
    }
}
