//! Points and lines of the projective plane over a finite field.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::gf::{Elem, Embedding, Field};

/// Largest field order whose plane we enumerate point by point.
pub const MAX_ENUM_ORDER: u32 = 1 << 10;

fn normalize(field: &Field, c: [Elem; 3]) -> Result<[Elem; 3]> {
    let lead = c.iter().find(|e| !e.is_zero()).ok_or(Error::ZeroPoint)?;
    if *lead == Elem::ONE {
        return Ok(c);
    }
    let inv = field.inv(*lead)?;
    Ok(c.map(|e| field.mul(e, inv)))
}

fn fmt_triple(field: &Field, c: &[Elem; 3], open: char, close: char) -> String {
    let parts: Vec<String> = c.iter().map(|&e| field.format_elem(e)).collect();
    format!("{open}{}{close}", parts.join(":"))
}

fn parse_triple(field: &Field, s: &str, open: char, close: char) -> Result<[Elem; 3]> {
    let inner = s
        .trim()
        .strip_prefix(open)
        .and_then(|r| r.strip_suffix(close))
        .ok_or_else(|| Error::Parse(format!("expected {open}a:b:c{close}, got {s:?}")))?;
    let parts: Vec<&str> = inner.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("expected three coordinates in {s:?}")));
    }
    Ok([field.parse_elem(parts[0])?, field.parse_elem(parts[1])?, field.parse_elem(parts[2])?])
}

/// A point `(a:b:c)` with its first nonzero coordinate equal to one.
#[derive(Clone)]
pub struct ProjPoint {
    field: Field,
    coords: [Elem; 3],
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.field == other.field
    }
}

impl Eq for ProjPoint {}

impl Hash for ProjPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_triple(&self.field, &self.coords, '(', ')'))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_triple(&self.field, &self.coords, '(', ')'))
    }
}

impl ProjPoint {
    pub fn new(field: &Field, coords: [Elem; 3]) -> Result<ProjPoint> {
        Ok(ProjPoint { field: field.clone(), coords: normalize(field, coords)? })
    }

    pub fn from_ints(field: &Field, c: [i64; 3]) -> Result<ProjPoint> {
        Self::new(field, c.map(|x| field.from_int(x)))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[Elem; 3] {
        &self.coords
    }

    /// Position in the enumeration order of [`enumerate_points`].
    pub fn index(&self) -> u64 {
        let s = self.field.order() as u64;
        let [a, b, c] = self.coords.map(|e| e.index() as u64);
        if a != 0 {
            b * s + c
        } else if b != 0 {
            s * s + c
        } else {
            s * s + s
        }
    }

    pub fn from_index(field: &Field, idx: u64) -> Result<ProjPoint> {
        let s = field.order() as u64;
        let e = |i: u64| Elem::from_index(i as u32);
        let coords = if idx < s * s {
            [Elem::ONE, e(idx / s), e(idx % s)]
        } else if idx < s * s + s {
            [Elem::ZERO, Elem::ONE, e(idx - s * s)]
        } else if idx == s * s + s {
            [Elem::ZERO, Elem::ZERO, Elem::ONE]
        } else {
            return Err(Error::Parse(format!("point index {idx} out of range")));
        };
        Ok(ProjPoint { field: field.clone(), coords })
    }

    pub fn embed(&self, e: &Embedding) -> Result<ProjPoint> {
        if *e.source() != self.field {
            return Err(Error::FieldMismatch);
        }
        // Leading coordinate stays 1, so no renormalization is needed.
        Ok(ProjPoint { field: e.target().clone(), coords: self.coords.map(|c| e.apply(c)) })
    }

    /// `(a^q : b^q : c^q)`.
    pub fn frobenius(&self, q: u64) -> ProjPoint {
        let f = &self.field;
        // Normalized leading 1 maps to 1.
        ProjPoint { field: f.clone(), coords: self.coords.map(|c| f.pow(c, q)) }
    }

    /// Whether every coordinate lies in the subfield of order `q`.
    pub fn is_rational_over(&self, q: u64) -> bool {
        self.coords.iter().all(|&c| self.field.pow(c, q) == c)
    }

    pub fn parse(field: &Field, s: &str) -> Result<ProjPoint> {
        Self::new(field, parse_triple(field, s, '(', ')')?)
    }
}

/// A line `ux + vy + wz = 0`, dual coordinates normalized like points.
#[derive(Clone, PartialEq, Eq)]
pub struct ProjLine {
    field: Field,
    coords: [Elem; 3],
}

impl Hash for ProjLine {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_triple(&self.field, &self.coords, '[', ']'))
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_triple(&self.field, &self.coords, '[', ']'))
    }
}

fn cross(f: &Field, a: &[Elem; 3], b: &[Elem; 3]) -> [Elem; 3] {
    let m = |i: usize, j: usize| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
    [m(1, 2), m(2, 0), m(0, 1)]
}

impl ProjLine {
    pub fn new(field: &Field, coords: [Elem; 3]) -> Result<ProjLine> {
        Ok(ProjLine { field: field.clone(), coords: normalize(field, coords)? })
    }

    pub fn from_ints(field: &Field, c: [i64; 3]) -> Result<ProjLine> {
        Self::new(field, c.map(|x| field.from_int(x)))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[Elem; 3] {
        &self.coords
    }

    /// The unique line through two distinct points.
    pub fn through(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
        if p.field != q.field {
            return Err(Error::FieldMismatch);
        }
        if p == q {
            return Err(Error::IdenticalPoints);
        }
        Self::new(&p.field, cross(&p.field, &p.coords, &q.coords))
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        let f = &self.field;
        let s = (0..3).fold(Elem::ZERO, |acc, i| f.add(acc, f.mul(self.coords[i], p.coords[i])));
        s.is_zero()
    }

    /// Intersection point of two distinct lines.
    pub fn meet(&self, other: &ProjLine) -> Result<ProjPoint> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self == other {
            return Err(Error::IdenticalPoints);
        }
        ProjPoint::new(&self.field, cross(&self.field, &self.coords, &other.coords))
    }

    /// All `s + 1` points on the line.
    pub fn points(&self) -> Vec<ProjPoint> {
        let f = &self.field;
        let [u, v, w] = self.coords;
        // Two independent points spanning the line, then P0 + t P1 and P1 itself.
        let (p0, p1) = if !u.is_zero() {
            // u = 1: x = -(v y + w z)
            ([f.neg(v), Elem::ONE, Elem::ZERO], [f.neg(w), Elem::ZERO, Elem::ONE])
        } else if !v.is_zero() {
            ([Elem::ONE, Elem::ZERO, Elem::ZERO], [Elem::ZERO, f.neg(w), Elem::ONE])
        } else {
            ([Elem::ONE, Elem::ZERO, Elem::ZERO], [Elem::ZERO, Elem::ONE, Elem::ZERO])
        };
        let mut out: Vec<ProjPoint> = f
            .elements()
            .map(|t| {
                let c = [0, 1, 2].map(|i| f.add(p0[i], f.mul(t, p1[i])));
                ProjPoint::new(f, c).expect("independent spanning points")
            })
            .collect();
        out.push(ProjPoint::new(f, p1).expect("nonzero"));
        out
    }

    pub fn embed(&self, e: &Embedding) -> Result<ProjLine> {
        if *e.source() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(ProjLine { field: e.target().clone(), coords: self.coords.map(|c| e.apply(c)) })
    }

    pub fn parse(field: &Field, s: &str) -> Result<ProjLine> {
        Self::new(field, parse_triple(field, s, '[', ']')?)
    }
}

fn check_enumerable(field: &Field) -> Result<()> {
    if field.order() > MAX_ENUM_ORDER {
        return Err(Error::FieldTooLarge { p: field.p(), m: field.m() });
    }
    Ok(())
}

/// Number of points of the plane over a field of order `s`.
pub fn plane_size(s: u64) -> u64 {
    s * s + s + 1
}

/// All points in the order `(1:b:c)`, `(0:1:c)`, `(0:0:1)` with field elements in index order.
pub fn enumerate_points(field: &Field) -> Result<impl Iterator<Item = ProjPoint> + '_> {
    check_enumerable(field)?;
    let n = plane_size(field.order() as u64);
    Ok((0..n).map(move |i| ProjPoint::from_index(field, i).expect("index in range")))
}

/// All lines, in the same order as points (dual coordinates).
pub fn enumerate_lines(field: &Field) -> Result<impl Iterator<Item = ProjLine> + '_> {
    Ok(enumerate_points(field)?.map(|p| ProjLine { field: p.field, coords: p.coords }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaClass {
    /// Points of the base plane.
    Lambda1,
    /// Other points on a line defined over the base field.
    Lambda2,
    /// Points on no base-field line.
    Lambda3,
}

impl LambdaClass {
    pub fn name(self) -> &'static str {
        match self {
            LambdaClass::Lambda1 => "Lambda1",
            LambdaClass::Lambda2 => "Lambda2",
            LambdaClass::Lambda3 => "Lambda3",
        }
    }
}

fn check_cubic_extension(point: &Field, base: &Field) -> Result<()> {
    if point.p() != base.p() || point.m() != 3 * base.m() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Value of `det[[a,b,c],[a^q,b^q,c^q],[a^{q^2},b^{q^2},c^{q^2}]]` at the stored representative.
pub fn moore_value(p: &ProjPoint, q: u64) -> Elem {
    let f = p.field();
    let r0 = *p.coords();
    let r1 = r0.map(|c| f.pow(c, q));
    let r2 = r1.map(|c| f.pow(c, q));
    crate::matrix::Mat3([r0, r1, r2]).det(f)
}

/// Classifies a point of the plane over `F_{q^3}` relative to the base field `F_q`.
///
/// A point is on some `F_q`-line exactly when `P`, `P^q`, `P^{q^2}` are collinear.
pub fn classify_lambda(p: &ProjPoint, base: &Field) -> Result<LambdaClass> {
    check_cubic_extension(p.field(), base)?;
    let q = base.order() as u64;
    Ok(if p.is_rational_over(q) {
        LambdaClass::Lambda1
    } else if moore_value(p, q).is_zero() {
        LambdaClass::Lambda2
    } else {
        LambdaClass::Lambda3
    })
}

/// Same classification by testing incidence with each embedded base-field line.
pub fn classify_lambda_by_lines(p: &ProjPoint, lines: &[ProjLine], q: u64) -> LambdaClass {
    if p.is_rational_over(q) {
        LambdaClass::Lambda1
    } else if lines.iter().any(|l| l.contains(p)) {
        LambdaClass::Lambda2
    } else {
        LambdaClass::Lambda3
    }
}

/// The `q^2 + q + 1` lines with base-field dual coordinates, embedded in the target plane.
pub fn subplane_lines(base: &Field, target: &Field) -> Result<Vec<ProjLine>> {
    let e = Embedding::new(base, target)?;
    enumerate_lines(base)?.map(|l| l.embed(&e)).collect()
}

/// Expected sizes of the three classes for base order `q`.
pub fn lambda_sizes(q: u64) -> [u64; 3] {
    let l1 = q * q + q + 1;
    let l2 = l1 * (q * q * q - q);
    let l3 = q.pow(6) - q.pow(5) - q.pow(4) + q.pow(3);
    [l1, l2, l3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;
    use std::collections::HashSet;

    #[test]
    fn plane_sizes() {
        for (p, m, n) in [(2u64, 1u32, 7usize), (2, 3, 73), (3, 3, 757)] {
            let f = build_field(p, m).unwrap();
            let pts: Vec<ProjPoint> = enumerate_points(&f).unwrap().collect();
            assert_eq!(pts.len(), n);
            assert_eq!(pts.iter().collect::<HashSet<_>>().len(), n);
            for (i, pt) in pts.iter().enumerate() {
                assert_eq!(pt.index(), i as u64);
            }
        }
        let big = build_field(2, 11).unwrap();
        assert!(matches!(enumerate_points(&big), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn incidence_axioms() {
        for (p, m) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2)] {
            let f = build_field(p, m).unwrap();
            let s = f.order() as usize;
            let pts: Vec<ProjPoint> = enumerate_points(&f).unwrap().collect();
            let lines: Vec<ProjLine> = enumerate_lines(&f).unwrap().collect();
            for l in &lines {
                let on: Vec<&ProjPoint> = pts.iter().filter(|p| l.contains(p)).collect();
                assert_eq!(on.len(), s + 1);
                let listed: HashSet<ProjPoint> = l.points().into_iter().collect();
                assert_eq!(listed.len(), s + 1);
                assert!(on.iter().all(|p| listed.contains(*p)));
            }
            for p in &pts {
                assert_eq!(lines.iter().filter(|l| l.contains(p)).count(), s + 1);
            }
            for (i, a) in pts.iter().enumerate().step_by(3) {
                for b in pts.iter().skip(i + 1).step_by(5) {
                    let l = ProjLine::through(a, b).unwrap();
                    assert!(l.contains(a) && l.contains(b));
                    assert_eq!(lines.iter().filter(|m| m.contains(a) && m.contains(b)).count(), 1);
                }
            }
        }
    }

    #[test]
    fn incidence_exhaustive_over_f27() {
        let f = build_field(3, 3).unwrap();
        let lines: Vec<ProjLine> = enumerate_lines(&f).unwrap().collect();
        for p in enumerate_points(&f).unwrap() {
            assert_eq!(lines.iter().filter(|l| l.contains(&p)).count(), 28);
        }
    }

    #[test]
    fn frobenius_images() {
        let f4 = build_field(2, 2).unwrap();
        let w = f4.generator();
        let p = ProjPoint::new(&f4, [Elem::ONE, w, Elem::ZERO]).unwrap();
        let img = p.frobenius(2);
        assert_eq!(img.coords()[1], f4.add(w, Elem::ONE));
        let f27 = build_field(3, 3).unwrap();
        for pt in enumerate_points(&f27).unwrap() {
            assert_eq!(pt.frobenius(3).frobenius(3).frobenius(3), pt);
        }
    }

    #[test]
    fn lambda_partition_matches_formulas_and_line_cover() {
        for q in [2u64, 3, 4] {
            let (p, h) = crate::gf::prime_power(q).unwrap();
            let base = build_field(p as u64, h).unwrap();
            let big = build_field(p as u64, 3 * h).unwrap();
            let lines = subplane_lines(&base, &big).unwrap();
            assert_eq!(lines.len() as u64, q * q + q + 1);
            let mut counts = [0u64; 3];
            for pt in enumerate_points(&big).unwrap() {
                let c = classify_lambda(&pt, &base).unwrap();
                assert_eq!(c, classify_lambda_by_lines(&pt, &lines, q));
                assert_eq!(classify_lambda(&pt.frobenius(q), &base).unwrap(), c);
                counts[c as usize] += 1;
            }
            assert_eq!(counts, lambda_sizes(q), "q={q}");
        }
        let f = build_field(2, 2).unwrap();
        let pt = ProjPoint::from_ints(&f, [1, 0, 0]).unwrap();
        assert_eq!(classify_lambda(&pt, &build_field(2, 1).unwrap()), Err(Error::FieldMismatch));
    }

    #[test]
    fn lambda_sizes_sum() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            assert_eq!(lambda_sizes(q).iter().sum::<u64>(), q.pow(6) + q.pow(3) + 1);
        }
        assert_eq!(lambda_sizes(2), [7, 42, 24]);
    }

    #[test]
    fn literals_round_trip() {
        let f = build_field(3, 2).unwrap();
        for pt in enumerate_points(&f).unwrap() {
            assert_eq!(ProjPoint::parse(&f, &pt.to_string()).unwrap(), pt);
        }
        let l = ProjLine::from_ints(&f, [0, 2, 1]).unwrap();
        assert_eq!(ProjLine::parse(&f, &l.to_string()).unwrap(), l);
        assert!(ProjPoint::parse(&f, "(0:0:0)").is_err());
        assert!(ProjPoint::parse(&f, "1:2:3").is_err());
    }
}
