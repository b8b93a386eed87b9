//! Sparse trivariate polynomials over a finite field.
//!
//! Terms are kept sorted in descending graded-lexicographic order (`x > y > z`)
//! with no zero coefficients. Bivariate polynomials are the special case where
//! every `z` exponent is zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Elem, Embedding, Field};
use crate::matrix::{Elementary, Mat3};
use crate::plane::ProjPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0, z: 0 };

    pub fn new(x: u32, y: u32, z: u32) -> Self {
        Monomial { x, y, z }
    }

    pub fn degree(&self) -> u32 {
        self.x + self.y + self.z
    }

    pub fn exps(&self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_exps(e: [u32; 3]) -> Self {
        Monomial { x: e[0], y: e[1], z: e[2] }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.x <= other.x && self.y <= other.y && self.z <= other.z
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }

    fn div(&self, o: &Monomial) -> Monomial {
        Monomial { x: self.x - o.x, y: self.y - o.y, z: self.z - o.z }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
            .then(self.y.cmp(&other.y))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Binomial coefficient `C(n, k) mod p` by Lucas' theorem.
pub fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        acc = acc * small_binomial(ni, ki) % p;
        n /= p;
        k /= p;
    }
    acc
}

fn small_binomial(n: u64, k: u64) -> u64 {
    // n < p here, so the exact value fits comfortably for the primes in use.
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num as u64
}

/// All `(k, C(n, k) mod p)` with nonzero binomial, `k` ascending.
pub fn lucas_expansion(n: u32, p: u32) -> Vec<(u32, u32)> {
    let mut digits = Vec::new();
    let mut r = n;
    while r > 0 {
        digits.push(r % p);
        r /= p;
    }
    let mut out = vec![(0u32, 1u32)];
    let mut place = 1u32;
    for &d in &digits {
        let mut next = Vec::with_capacity(out.len() * (d as usize + 1));
        for kd in 0..=d {
            let b = small_binomial(d as u64, kd as u64) % p as u64;
            for &(k, c) in &out {
                next.push((k + kd * place, ((c as u64 * b) % p as u64) as u32));
            }
        }
        out = next;
        place = place.saturating_mul(p);
    }
    out.sort_unstable();
    out
}

#[derive(Clone)]
pub struct TriPoly {
    field: Field,
    terms: Vec<(Monomial, Elem)>,
}

impl PartialEq for TriPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms
    }
}

impl Eq for TriPoly {}

impl fmt::Debug for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriPoly[{:?}]({})", self.field, self)
    }
}

impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = String::new();
                if *c != Elem::ONE || m.degree() == 0 {
                    let coords = self.field.format_elem(*c);
                    if coords.contains(',') {
                        s.push_str(&format!("[{coords}]"));
                    } else {
                        s.push_str(&coords);
                    }
                }
                for (v, e) in [("x", m.x), ("y", m.y), ("z", m.z)] {
                    match e {
                        0 => {}
                        1 => s.push_str(v),
                        _ => s.push_str(&format!("{v}^{e}")),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl TriPoly {
    pub fn zero(field: &Field) -> Self {
        TriPoly { field: field.clone(), terms: Vec::new() }
    }

    pub fn constant(field: &Field, c: Elem) -> Self {
        Self::monomial(field, Monomial::ONE, c)
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(field, Elem::ONE)
    }

    pub fn monomial(field: &Field, m: Monomial, c: Elem) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        TriPoly { field: field.clone(), terms }
    }

    pub fn x(field: &Field) -> Self {
        Self::monomial(field, Monomial::new(1, 0, 0), Elem::ONE)
    }

    pub fn y(field: &Field) -> Self {
        Self::monomial(field, Monomial::new(0, 1, 0), Elem::ONE)
    }

    pub fn z(field: &Field) -> Self {
        Self::monomial(field, Monomial::new(0, 0, 1), Elem::ONE)
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(field: &Field, terms: impl IntoIterator<Item = (Monomial, Elem)>) -> Self {
        let mut acc: HashMap<Monomial, Elem> = HashMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(Elem::ZERO);
            *e = field.add(*e, c);
        }
        Self::from_map(field, acc)
    }

    /// `sum c * x^a y^b z^c` with integer coefficients reduced mod p.
    pub fn from_int_terms(field: &Field, terms: &[(i64, [u32; 3])]) -> Self {
        Self::from_terms(field, terms.iter().map(|&(c, e)| (Monomial::from_exps(e), field.from_int(c))))
    }

    fn from_map(field: &Field, map: HashMap<Monomial, Elem>) -> Self {
        let mut terms: Vec<(Monomial, Elem)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        TriPoly { field: field.clone(), terms }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> &[(Monomial, Elem)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> Elem {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1)
            .unwrap_or(Elem::ZERO)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    /// The common degree of all terms, if the polynomial is homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.degree()?;
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    pub fn leading_term(&self) -> Option<(Monomial, Elem)> {
        self.terms.first().copied()
    }

    fn check_field(&self, other: &TriPoly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn combine(&self, other: &TriPoly, negate: bool) -> Result<TriPoly> {
        self.check_field(other)?;
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => b.0.cmp(&a.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    let (m, c) = other.terms[j];
                    out.push((m, if negate { f.neg(c) } else { c }));
                    j += 1;
                }
                Ordering::Equal => {
                    let (m, a) = self.terms[i];
                    let b = other.terms[j].1;
                    let c = if negate { f.sub(a, b) } else { f.add(a, b) };
                    if !c.is_zero() {
                        out.push((m, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(TriPoly { field: f.clone(), terms: out })
    }

    pub fn add(&self, other: &TriPoly) -> Result<TriPoly> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &TriPoly) -> Result<TriPoly> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> TriPoly {
        let f = &self.field;
        TriPoly { field: f.clone(), terms: self.terms.iter().map(|&(m, c)| (m, f.neg(c))).collect() }
    }

    pub fn scale(&self, c: Elem) -> TriPoly {
        if c.is_zero() {
            return TriPoly::zero(&self.field);
        }
        let f = &self.field;
        TriPoly { field: f.clone(), terms: self.terms.iter().map(|&(m, a)| (m, f.mul(a, c))).collect() }
    }

    pub fn mul(&self, other: &TriPoly) -> Result<TriPoly> {
        self.check_field(other)?;
        let f = &self.field;
        let mut acc: HashMap<Monomial, Elem> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let e = acc.entry(ma.mul(&mb)).or_insert(Elem::ZERO);
                *e = f.add(*e, f.mul(ca, cb));
            }
        }
        Ok(Self::from_map(f, acc))
    }

    pub fn pow(&self, mut e: u64) -> TriPoly {
        let mut result = TriPoly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same field");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        result
    }

    /// Exact quotient `self / divisor` by graded-lex long division.
    ///
    /// Fails with `RemainderNonzero` as soon as a remainder term appears.
    pub fn exact_divide(&self, divisor: &TriPoly) -> Result<TriPoly> {
        self.check_field(divisor)?;
        let f = &self.field;
        let (lm, lc) = divisor.leading_term().ok_or(Error::DivisionByZero)?;
        let lc_inv = f.inv(lc)?;
        let mut rem: BTreeMap<Monomial, Elem> = self.terms.iter().copied().collect();
        let mut quotient = Vec::new();
        while let Some((&m, &c)) = rem.iter().next_back() {
            if !lm.divides(&m) {
                return Err(Error::RemainderNonzero);
            }
            let qm = m.div(&lm);
            let qc = f.mul(c, lc_inv);
            quotient.push((qm, qc));
            for &(dm, dc) in &divisor.terms {
                let key = dm.mul(&qm);
                let delta = f.mul(qc, dc);
                let slot = rem.entry(key).or_insert(Elem::ZERO);
                *slot = f.sub(*slot, delta);
                if slot.is_zero() {
                    rem.remove(&key);
                }
            }
        }
        // Quotient terms were produced in strictly descending order.
        Ok(TriPoly { field: f.clone(), terms: quotient })
    }

    /// Formal partial derivatives `(f_x, f_y, f_z)` in characteristic p.
    pub fn partials(&self) -> (TriPoly, TriPoly, TriPoly) {
        let f = &self.field;
        let d = |idx: usize| {
            Self::from_terms(
                f,
                self.terms.iter().filter_map(|&(m, c)| {
                    let mut e = m.exps();
                    if e[idx] == 0 {
                        return None;
                    }
                    let k = f.from_int(e[idx] as i64);
                    e[idx] -= 1;
                    Some((Monomial::from_exps(e), f.mul(c, k)))
                }),
            )
        };
        (d(0), d(1), d(2))
    }

    /// `f(A v)`: substitutes `x_i -> sum_j A_ij x_j`.
    pub fn substitute_linear(&self, a: &Mat3) -> Result<TriPoly> {
        let mut out = self.clone();
        for e in a.elementary_factors(&self.field)? {
            out = out.substitute_elementary(e);
        }
        Ok(out)
    }

    fn substitute_elementary(&self, e: Elementary) -> TriPoly {
        let f = &self.field;
        match e {
            Elementary::Swap(i, j) => Self::from_terms(
                f,
                self.terms.iter().map(|&(m, c)| {
                    let mut ex = m.exps();
                    ex.swap(i, j);
                    (Monomial::from_exps(ex), c)
                }),
            ),
            Elementary::Scale(i, s) => {
                let terms = self
                    .terms
                    .iter()
                    .map(|&(m, c)| (m, f.mul(c, f.pow(s, m.exps()[i] as u64))))
                    .collect();
                TriPoly { field: f.clone(), terms }
            }
            Elementary::Shear { target, source, c: s } => {
                let p = f.p();
                let mut acc: HashMap<Monomial, Elem> = HashMap::with_capacity(self.terms.len() * 4);
                let mut spow_cache: HashMap<u32, Elem> = HashMap::new();
                for &(m, c) in &self.terms {
                    let ex = m.exps();
                    let n = ex[target];
                    for (k, b) in lucas_expansion(n, p) {
                        // x_t^k (s x_s)^(n-k)
                        let sp = *spow_cache.entry(n - k).or_insert_with(|| f.pow(s, (n - k) as u64));
                        let coeff = f.mul(f.mul(c, f.from_int(b as i64)), sp);
                        if coeff.is_zero() {
                            continue;
                        }
                        let mut ne = ex;
                        ne[target] = k;
                        ne[source] += n - k;
                        let slot = acc.entry(Monomial::from_exps(ne)).or_insert(Elem::ZERO);
                        *slot = f.add(*slot, coeff);
                    }
                }
                Self::from_map(f, acc)
            }
        }
    }

    /// Substitutes polynomials for the three variables.
    pub fn compose(&self, subs: [&TriPoly; 3]) -> Result<TriPoly> {
        for s in subs {
            self.check_field(s)?;
        }
        let f = &self.field;
        let mut caches: [HashMap<u32, TriPoly>; 3] = Default::default();
        let mut out = TriPoly::zero(f);
        for &(m, c) in &self.terms {
            let mut term = TriPoly::constant(f, c);
            for (v, e) in m.exps().into_iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = caches[v].entry(e).or_insert_with(|| subs[v].pow(e as u64)).clone();
                term = term.mul(&pw)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Maps every coefficient through an embedding.
    pub fn embed(&self, e: &Embedding) -> Result<TriPoly> {
        if *e.source() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(TriPoly {
            field: e.target().clone(),
            terms: self.terms.iter().map(|&(m, c)| (m, e.apply(c))).collect(),
        })
    }

    /// Sets `z = 1`.
    pub fn dehomogenize_z(&self) -> TriPoly {
        Self::from_terms(&self.field, self.terms.iter().map(|&(m, c)| (Monomial::new(m.x, m.y, 0), c)))
    }

    /// Value at a coordinate triple in the polynomial's own field.
    pub fn eval_coords(&self, v: &[Elem; 3]) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for &(m, c) in &self.terms {
            let t = f.mul(
                f.mul(c, f.pow(v[0], m.x as u64)),
                f.mul(f.pow(v[1], m.y as u64), f.pow(v[2], m.z as u64)),
            );
            acc = f.add(acc, t);
        }
        acc
    }

    /// Value at a point of a plane over an extension field, coefficients mapped by `e`.
    /// Only zero/nonzero is representative independent.
    pub fn evaluate(&self, point: &ProjPoint, e: &Embedding) -> Result<Elem> {
        if *e.source() != self.field || *e.target() != *point.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(Evaluator::new(self, e)?.eval(point.coords()))
    }

    /// `t -> f(P0 + t P1)` on the stored representatives.
    pub fn restrict_to_line(&self, p0: &ProjPoint, p1: &ProjPoint) -> Result<UniPoly> {
        if *p0.field() != self.field || *p1.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if p0 == p1 {
            return Err(Error::IdenticalPoints);
        }
        let f = &self.field;
        let p = f.p();
        let (a, b) = (p0.coords(), p1.coords());
        let deg = self.degree().unwrap_or(0) as usize;
        let mut out = vec![Elem::ZERO; deg + 1];
        let mut cache: [HashMap<u32, Vec<(u32, Elem)>>; 3] = Default::default();
        let mut expand = |v: usize, n: u32| -> Vec<(u32, Elem)> {
            cache[v]
                .entry(n)
                .or_insert_with(|| {
                    lucas_expansion(n, p)
                        .into_iter()
                        .map(|(k, c)| {
                            let val = f.mul(
                                f.from_int(c as i64),
                                f.mul(f.pow(a[v], (n - k) as u64), f.pow(b[v], k as u64)),
                            );
                            (k, val)
                        })
                        .filter(|(_, c)| !c.is_zero())
                        .collect()
                })
                .clone()
        };
        for &(m, c) in &self.terms {
            let ex = expand(0, m.x);
            let ey = expand(1, m.y);
            let ez = expand(2, m.z);
            for &(i, ci) in &ex {
                let cxi = f.mul(c, ci);
                for &(j, cj) in &ey {
                    let cij = f.mul(cxi, cj);
                    for &(k, ck) in &ez {
                        let slot = &mut out[(i + j + k) as usize];
                        *slot = f.add(*slot, f.mul(cij, ck));
                    }
                }
            }
        }
        Ok(UniPoly::new(f, out))
    }

    /// Text form: a header line then one `coeff-coords:ex,ey,ez` line per term.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.field.spec());
        for &(m, c) in &self.terms {
            s.push_str(&format!("{}:{},{},{}\n", self.field.format_elem(c), m.x, m.y, m.z));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<TriPoly> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty polynomial file".into()))?;
        let mut p = None;
        let mut poly = None;
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header token {tok:?}")))?;
            match k {
                "p" => p = Some(v.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?),
                "m" => {}
                "poly" => poly = Some(crate::gf::parse_coords(v)?),
                _ => return Err(Error::Parse(format!("unknown header key {k:?}"))),
            }
        }
        let (Some(p), Some(poly)) = (p, poly) else {
            return Err(Error::Parse("header needs p= and poly=".into()));
        };
        let field = Field::with_modulus(p, poly)?;
        let mut terms = Vec::new();
        for line in lines {
            let (c, e) = line
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad term line {line:?}")))?;
            let coeff = field.parse_elem(c)?;
            let ex = crate::gf::parse_coords(e)?;
            if ex.len() != 3 {
                return Err(Error::Parse(format!("expected three exponents in {line:?}")));
            }
            terms.push((Monomial::new(ex[0], ex[1], ex[2]), coeff));
        }
        Ok(Self::from_terms(&field, terms))
    }
}

/// Batch evaluator with coefficients already mapped into the target field.
pub struct Evaluator {
    field: Field,
    terms: Vec<(Monomial, Elem)>,
    max: [u32; 3],
}

impl Evaluator {
    pub fn new(poly: &TriPoly, e: &Embedding) -> Result<Evaluator> {
        let lifted = poly.embed(e)?;
        Ok(Self::lifted(&lifted))
    }

    pub fn lifted(poly: &TriPoly) -> Evaluator {
        let mut max = [0u32; 3];
        for (m, _) in poly.terms() {
            for (slot, e) in max.iter_mut().zip(m.exps()) {
                *slot = (*slot).max(e);
            }
        }
        Evaluator { field: poly.field().clone(), terms: poly.terms().to_vec(), max }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn eval(&self, v: &[Elem; 3]) -> Elem {
        let f = &self.field;
        let powers = |a: Elem, n: u32| {
            let mut out = Vec::with_capacity(n as usize + 1);
            let mut x = Elem::ONE;
            out.push(x);
            for _ in 0..n {
                x = f.mul(x, a);
                out.push(x);
            }
            out
        };
        let px = powers(v[0], self.max[0]);
        let py = powers(v[1], self.max[1]);
        let pz = powers(v[2], self.max[2]);
        let mut acc = Elem::ZERO;
        for &(m, c) in &self.terms {
            let t = f.mul(f.mul(c, px[m.x as usize]), f.mul(py[m.y as usize], pz[m.z as usize]));
            acc = f.add(acc, t);
        }
        acc
    }

    pub fn is_zero_at(&self, v: &[Elem; 3]) -> bool {
        self.eval(v).is_zero()
    }
}

/// Dense univariate polynomial, low degree first, trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<u32> = self.coeffs.iter().map(|e| e.index()).collect();
        write!(f, "UniPoly{c:?}")
    }
}

impl UniPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field: field.clone(), coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Multiplicity of `t = 0` as a root; `None` for the zero polynomial.
    pub fn vanishing_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, t: Elem) -> Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, t), c))
    }

    /// Roots in the coefficient field by exhaustive evaluation.
    pub fn roots_exhaustive(&self) -> Vec<Elem> {
        self.field.elements().filter(|&t| self.eval(t).is_zero()).collect()
    }

    fn from_slice(&self, c: &[Elem]) -> UniPoly {
        UniPoly::new(&self.field, c.to_vec())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(Elem::ZERO);
                let b = other.coeffs.get(i).copied().unwrap_or(Elem::ZERO);
                f.add(a, b)
            })
            .collect();
        UniPoly::new(f, c)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let f = &self.field;
        self.add(&UniPoly::new(f, other.coeffs.iter().map(|&c| f.neg(c)).collect()))
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return self.from_slice(&[]);
        }
        let f = &self.field;
        let mut c = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, c)
    }

    /// Remainder modulo a nonzero polynomial.
    pub fn rem(&self, m: &UniPoly) -> UniPoly {
        let f = &self.field;
        let dm = m.degree().expect("nonzero modulus");
        let lead_inv = f.inv(m.coeffs[dm]).expect("nonzero");
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let top = *r.last().expect("nonempty");
            let shift = r.len() - 1 - dm;
            if !top.is_zero() {
                let c = f.mul(top, lead_inv);
                for (k, &mc) in m.coeffs.iter().enumerate() {
                    r[shift + k] = f.sub(r[shift + k], f.mul(c, mc));
                }
            }
            r.pop();
        }
        UniPoly::new(f, r)
    }

    pub fn monic(&self) -> UniPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = self.field.inv(l).expect("nonzero");
                UniPoly::new(&self.field, self.coeffs.iter().map(|&c| self.field.mul(c, inv)).collect())
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &UniPoly) -> UniPoly {
        let mut result = self.from_slice(&[Elem::ONE]).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        result
    }

    /// Distinct roots in the coefficient field, ascending by index.
    ///
    /// Takes `gcd(self, t^Q - t)` and splits it with random equal-degree factorization;
    /// `rng` only affects the running time.
    pub fn roots<R: rand::Rng>(&self, rng: &mut R) -> Vec<Elem> {
        if self.is_zero() {
            return self.field.elements().collect();
        }
        let f = &self.field;
        let t = self.from_slice(&[Elem::ZERO, Elem::ONE]);
        let m = self.monic();
        let split = t.pow_mod(f.order() as u64, &m).sub(&t).gcd(&m);
        let mut out = Vec::new();
        let mut stack = vec![split];
        while let Some(g) = stack.pop() {
            match g.degree() {
                None | Some(0) => {}
                Some(1) => out.push(f.neg(g.coeffs[0])),
                Some(d) => loop {
                    let h = self.splitter(&g, rng);
                    let c = g.gcd(&h);
                    let dc = c.degree().unwrap_or(0);
                    if dc > 0 && dc < d {
                        let other = exact_quotient(&g, &c);
                        stack.push(c);
                        stack.push(other);
                        break;
                    }
                },
            }
        }
        out.sort_unstable();
        out
    }

    /// A random polynomial sharing a nontrivial factor with `g` with probability about 1/2.
    fn splitter<R: rand::Rng>(&self, g: &UniPoly, rng: &mut R) -> UniPoly {
        let f = &self.field;
        let a = Elem::from_index(rng.gen_range(0..f.order()));
        if f.p() == 2 {
            // Trace of a t: sum of (a t)^{2^j}, j < m.
            let mut term = self.from_slice(&[Elem::ZERO, a]).rem(g);
            let mut acc = term.clone();
            for _ in 1..f.m() {
                term = term.mul(&term).rem(g);
                acc = acc.add(&term);
            }
            acc
        } else {
            let base = self.from_slice(&[a, Elem::ONE]);
            base.pow_mod((f.order() as u64 - 1) / 2, g).sub(&self.from_slice(&[Elem::ONE]))
        }
    }
}

/// `a / b` for a divisor `b` of `a`.
fn exact_quotient(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let f = &a.field;
    let db = b.degree().expect("nonzero");
    let lead_inv = f.inv(b.coeffs[db]).expect("nonzero");
    let mut r = a.coeffs.clone();
    let mut q = vec![Elem::ZERO; r.len().saturating_sub(db)];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = f.mul(*r.last().expect("nonempty"), lead_inv);
        q[shift] = c;
        for (k, &bc) in b.coeffs.iter().enumerate() {
            r[shift + k] = f.sub(r[shift + k], f.mul(c, bc));
        }
        r.pop();
    }
    UniPoly::new(f, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_homogeneous(f: &Field, deg: u32, nterms: usize, rng: &mut ChaCha8Rng) -> TriPoly {
        let terms = (0..nterms).map(|_| {
            let a = rng.gen_range(0..=deg);
            let b = rng.gen_range(0..=deg - a);
            let c = Elem::from_index(rng.gen_range(1..f.order()));
            (Monomial::new(a, b, deg - a - b), c)
        });
        TriPoly::from_terms(f, terms)
    }

    fn random_invertible(f: &Field, rng: &mut ChaCha8Rng) -> Mat3 {
        loop {
            let m = Mat3([[0u8; 3]; 3].map(|r| r.map(|_| Elem::from_index(rng.gen_range(0..f.order())))));
            if m.is_invertible(f) {
                return m;
            }
        }
    }

    /// Oracle for `substitute_linear`: expand every term as a product of powers of linear forms.
    fn substitute_by_expansion(poly: &TriPoly, a: &Mat3) -> TriPoly {
        let f = poly.field();
        let vars = [TriPoly::x(f), TriPoly::y(f), TriPoly::z(f)];
        let forms: Vec<TriPoly> = (0..3)
            .map(|i| {
                (0..3).fold(TriPoly::zero(f), |acc, j| acc.add(&vars[j].scale(a.get(i, j))).unwrap())
            })
            .collect();
        let mut out = TriPoly::zero(f);
        for &(m, c) in poly.terms() {
            let mut t = TriPoly::constant(f, c);
            for (i, e) in m.exps().into_iter().enumerate() {
                t = t.mul(&forms[i].pow(e as u64)).unwrap();
            }
            out = out.add(&t).unwrap();
        }
        out
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(2, 0, 0);
        let b = Monomial::new(1, 1, 0);
        let c = Monomial::new(0, 0, 3);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial::new(0, 2, 0) > Monomial::new(0, 1, 1));
    }

    #[test]
    fn freshman_square_in_char_2() {
        let f = build_field(2, 1).unwrap();
        let s = TriPoly::x(&f).add(&TriPoly::y(&f)).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, TriPoly::from_int_terms(&f, &[(1, [2, 0, 0]), (1, [0, 2, 0])]));
        assert_eq!(s.mul(&TriPoly::one(&f)).unwrap(), s);
    }

    #[test]
    fn schoolbook_product_over_f3() {
        let f = build_field(3, 1).unwrap();
        let a = TriPoly::from_int_terms(&f, &[(1, [1, 0, 0]), (1, [0, 1, 0]), (1, [0, 0, 1])]);
        let b = TriPoly::from_int_terms(&f, &[(1, [1, 0, 0]), (2, [0, 1, 0])]);
        // x^2 + 2xy + xy + 2y^2 + zx + 2yz
        let expected = TriPoly::from_int_terms(
            &f,
            &[(1, [2, 0, 0]), (3, [1, 1, 0]), (2, [0, 2, 0]), (1, [1, 0, 1]), (2, [0, 1, 1])],
        );
        assert_eq!(a.mul(&b).unwrap(), expected);
        assert_eq!(expected.num_terms(), 4);
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f2 = build_field(2, 1).unwrap();
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(TriPoly::x(&f2).mul(&TriPoly::x(&f3)), Err(Error::FieldMismatch));
        assert_eq!(TriPoly::x(&f2).add(&TriPoly::x(&f3)), Err(Error::FieldMismatch));
    }

    #[test]
    fn exact_division_cases() {
        let f = build_field(5, 1).unwrap();
        let num = TriPoly::from_int_terms(&f, &[(1, [2, 0, 0]), (1, [1, 1, 0])]);
        let q = num.exact_divide(&TriPoly::x(&f)).unwrap();
        assert_eq!(q, TriPoly::from_int_terms(&f, &[(1, [1, 0, 0]), (1, [0, 1, 0])]));
        let bad = TriPoly::from_int_terms(&f, &[(1, [2, 0, 0]), (1, [0, 1, 1])]);
        assert_eq!(bad.exact_divide(&TriPoly::x(&f)), Err(Error::RemainderNonzero));
        assert_eq!(num.exact_divide(&TriPoly::zero(&f)), Err(Error::DivisionByZero));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_homogeneous(&f, 5, 6, &mut rng);
            assert_eq!(g.exact_divide(&g).unwrap(), TriPoly::one(&f));
        }
    }

    #[test]
    fn partials_in_char_p() {
        let f = build_field(3, 1).unwrap();
        let x3 = TriPoly::from_int_terms(&f, &[(1, [3, 0, 0])]);
        assert!(x3.partials().0.is_zero());
        // Euler: x f_x + y f_y + z f_z = deg f * f.
        let f5 = build_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for deg in [3u32, 4, 6, 7] {
            let g = random_homogeneous(&f5, deg, 8, &mut rng);
            let (gx, gy, gz) = g.partials();
            let lhs = TriPoly::x(&f5)
                .mul(&gx)
                .unwrap()
                .add(&TriPoly::y(&f5).mul(&gy).unwrap())
                .unwrap()
                .add(&TriPoly::z(&f5).mul(&gz).unwrap())
                .unwrap();
            assert_eq!(lhs, g.scale(f5.from_int(deg as i64)));
        }
    }

    #[test]
    fn linear_substitution_matches_expansion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, m) in [(3u64, 1u32), (2, 2), (5, 1), (3, 2)] {
            let f = build_field(p, m).unwrap();
            for _ in 0..15 {
                let g = random_homogeneous(&f, 7, 6, &mut rng);
                let a = random_invertible(&f, &mut rng);
                let fast = g.substitute_linear(&a).unwrap();
                assert_eq!(fast, substitute_by_expansion(&g, &a));
                assert_eq!(fast.homogeneous_degree(), g.homogeneous_degree());
                let back = fast.substitute_linear(&a.inverse(&f).unwrap()).unwrap();
                assert_eq!(back, g);
            }
        }
    }

    #[test]
    fn substitution_identity_and_permutation() {
        let f = build_field(3, 1).unwrap();
        let g = TriPoly::from_int_terms(&f, &[(1, [2, 1, 0]), (2, [0, 0, 3])]);
        assert_eq!(g.substitute_linear(&Mat3::identity()).unwrap(), g);
        // (Av) = (y, z, x): x -> y.
        let cyc = Mat3::from_ints(&f, [[0, 1, 0], [0, 0, 1], [1, 0, 0]]);
        assert_eq!(TriPoly::x(&f).substitute_linear(&cyc).unwrap(), TriPoly::y(&f));
        let sing = Mat3::from_ints(&f, [[1, 1, 0], [1, 1, 0], [0, 0, 1]]);
        assert_eq!(g.substitute_linear(&sing), Err(Error::SingularMatrix));
    }

    #[test]
    fn substitution_is_multiplicative() {
        let f = build_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let g = random_homogeneous(&f, 4, 5, &mut rng);
            let h = random_homogeneous(&f, 3, 5, &mut rng);
            let a = random_invertible(&f, &mut rng);
            let lhs = g.mul(&h).unwrap().substitute_linear(&a).unwrap();
            let rhs = g.substitute_linear(&a).unwrap().mul(&h.substitute_linear(&a).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn restriction_to_lines() {
        let f = build_field(3, 1).unwrap();
        let p0 = ProjPoint::from_ints(&f, [0, 1, 0]).unwrap();
        let p1 = ProjPoint::from_ints(&f, [1, 0, 0]).unwrap();
        let r = TriPoly::x(&f).restrict_to_line(&p0, &p1).unwrap();
        assert_eq!(r.coeffs(), &[Elem::ZERO, Elem::ONE]);
        assert!(TriPoly::zero(&f).restrict_to_line(&p0, &p1).unwrap().is_zero());
        assert_eq!(TriPoly::x(&f).restrict_to_line(&p0, &p0), Err(Error::IdenticalPoints));

        // Oracle: evaluate at every t and compare with the direct value.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f9 = build_field(3, 2).unwrap();
        for _ in 0..10 {
            let g = random_homogeneous(&f9, 6, 7, &mut rng);
            let a = ProjPoint::from_ints(&f9, [1, 2, 0]).unwrap();
            let b = ProjPoint::new(&f9, [Elem::from_index(5), Elem::ONE, Elem::from_index(7)]).unwrap();
            let r = g.restrict_to_line(&a, &b).unwrap();
            assert!(r.degree().unwrap_or(0) <= 6);
            for t in f9.elements() {
                let v: Vec<Elem> =
                    (0..3).map(|i| f9.add(a.coords()[i], f9.mul(t, b.coords()[i]))).collect();
                assert_eq!(r.eval(t), g.eval_coords(&[v[0], v[1], v[2]]));
            }
        }
    }

    #[test]
    fn evaluation_at_projective_points() {
        let f = build_field(3, 1).unwrap();
        let s = TriPoly::from_int_terms(&f, &[(1, [1, 0, 0]), (1, [0, 1, 0]), (1, [0, 0, 1])]);
        let e = Embedding::identity(&f);
        let pt = ProjPoint::from_ints(&f, [1, 1, 1]).unwrap();
        assert!(s.evaluate(&pt, &e).unwrap().is_zero());
        let f9 = build_field(3, 2).unwrap();
        let pt9 = ProjPoint::from_ints(&f9, [1, 1, 1]).unwrap();
        assert_eq!(s.evaluate(&pt9, &e), Err(Error::FieldMismatch));
        let e9 = Embedding::new(&f, &f9).unwrap();
        assert!(s.evaluate(&pt9, &e9).unwrap().is_zero());
    }

    #[test]
    fn lucas_matches_pascal() {
        for p in [2u32, 3, 5, 7] {
            let mut row = vec![1u64];
            for n in 0..60u32 {
                let nonzero: Vec<(u32, u32)> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c % p as u64 != 0)
                    .map(|(k, &c)| (k as u32, (c % p as u64) as u32))
                    .collect();
                assert_eq!(lucas_expansion(n, p), nonzero, "n={n} p={p}");
                let mut next = vec![1u64; row.len() + 1];
                for k in 1..row.len() {
                    next[k] = (row[k - 1] + row[k]) % (p as u64 * 1_000_000);
                }
                row = next;
            }
        }
    }

    #[test]
    fn root_finding_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (p, m) in [(2u64, 1u32), (2, 4), (2, 7), (3, 2), (3, 5), (5, 2), (7, 1)] {
            let f = build_field(p, m).unwrap();
            for _ in 0..30 {
                let deg = rng.gen_range(1..12);
                let mut c: Vec<Elem> = (0..=deg).map(|_| Elem::from_index(rng.gen_range(0..f.order()))).collect();
                // Plant a few roots so the interesting branch is exercised.
                let planted = rng.gen_range(0..3);
                let mut u = UniPoly::new(&f, std::mem::take(&mut c));
                for _ in 0..planted {
                    let r = Elem::from_index(rng.gen_range(0..f.order()));
                    u = u.mul(&UniPoly::new(&f, vec![f.neg(r), Elem::ONE]));
                }
                if u.is_zero() {
                    continue;
                }
                assert_eq!(u.roots(&mut rng), u.roots_exhaustive(), "p={p} m={m} {u:?}");
            }
        }
    }

    #[test]
    fn univariate_gcd_and_remainder() {
        let f = build_field(5, 1).unwrap();
        let e = |c: &[i64]| UniPoly::new(&f, c.iter().map(|&x| f.from_int(x)).collect());
        // (t-1)(t-2) and (t-1)(t-3)
        let a = e(&[2, -3, 1]);
        let b = e(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), e(&[-1, 1]));
        assert_eq!(a.mul(&b).rem(&a), e(&[]));
        assert_eq!(exact_quotient(&a.mul(&b), &a), b);
        assert_eq!(e(&[0, 1]).pow_mod(5, &a), e(&[0, 1]).rem(&a));
    }

    #[test]
    fn text_format_round_trip() {
        let f = build_field(2, 2).unwrap();
        let g = TriPoly::from_terms(
            &f,
            [(Monomial::new(3, 1, 0), f.generator()), (Monomial::new(0, 0, 4), Elem::ONE)],
        );
        let text = g.to_text();
        assert!(text.starts_with("p=2 m=2 poly=1,1,1\n"));
        assert!(text.contains("0,1:3,1,0"));
        assert_eq!(TriPoly::from_text(&text).unwrap(), g);
        assert!(TriPoly::from_text("p=2 m=1 poly=0,1\n1:1,2\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws_and_division(seed in any::<u64>()) {
            let f = build_field(3, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_homogeneous(&f, 3, 4, &mut rng);
            let b = random_homogeneous(&f, 2, 4, &mut rng);
            let c = random_homogeneous(&f, 2, 3, &mut rng);
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            if !b.is_zero() {
                prop_assert_eq!(a.mul(&b).unwrap().exact_divide(&b).unwrap(), a);
            }
        }
    }
}
