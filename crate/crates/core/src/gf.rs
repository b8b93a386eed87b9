//! Finite fields `F_{p^m}` in a power basis over the prime field.
//!
//! An element is stored as its enumeration index `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`,
//! where `c_i` is the coordinate of `t^i`. Index order is the fixed enumeration
//! order used everywhere else in the crate. Fields of order at most `2^16` carry
//! log/antilog/Zech tables; larger ones fall back to schoolbook arithmetic on the
//! coordinate vectors. Both paths give identical results.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 14;
/// Fields up to this order get log and Zech tables.
pub const TABLE_LIMIT: u64 = 1 << 16;

const NO_LOG: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn from_index(i: u32) -> Self {
        Elem(i)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Identifies a field: the prime, the degree and the monic defining polynomial
/// (coefficients low degree first, `m + 1` entries).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub defining_poly: Vec<u32>,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.defining_poly.iter().map(|c| c.to_string()).collect();
        write!(f, "p={} m={} poly={}", self.p, self.m, coeffs.join(","))
    }
}

struct Tables {
    log: Vec<u32>,
    /// `exp[i] = g^i` for `0 <= i < 2(n-1)` so that products of logs need no reduction.
    exp: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, or `NO_LOG` when `1 + g^i = 0`.
    zech: Vec<u32>,
}

struct Inner {
    spec: FieldSpec,
    order: u32,
    /// `p^i` for `i = 0..=m`.
    pows: Vec<u64>,
    tables: Option<Tables>,
}

/// Shared handle to a finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.m())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `n`.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q` as `p^h`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut h = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        h += 1;
    }
    Some((p as u32, h))
}

// --- dense polynomials over F_p, low degree first, used for construction only ---

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let inv_lead = modinv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] * inv_lead % p;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn modinv(a: u64, p: u64) -> u64 {
    modpow(a % p, p - 2, p)
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Ben-Or irreducibility test for a monic polynomial over `F_p`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let p = p as u64;
    let f: Vec<u64> = poly.iter().map(|&c| c as u64 % p).collect();
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let t = vec![0u64, 1];
    let mut tp = t.clone();
    for _ in 0..m / 2 {
        tp = poly_powmod(&tp, p, &f, p);
        let mut diff = tp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = poly_gcd(&f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `m` over `F_p`,
/// comparing coefficients from the constant term upwards.
pub fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let total = (p as u64).pow(m);
    for idx in 0..total {
        // c_0 is the most significant digit of idx.
        let mut poly = vec![0u32; m as usize + 1];
        let mut r = idx;
        for j in (0..m as usize).rev() {
            poly[j] = (r % p as u64) as u32;
            r /= p as u64;
        }
        poly[m as usize] = 1;
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Builds `F_{p^m}` with the lexicographically smallest monic irreducible modulus.
pub fn build_field(p: u64, m: u32) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if m == 0 || m > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(m));
    }
    if p > u32::MAX as u64 || (p as f64).powi(m as i32) > u32::MAX as f64 {
        return Err(Error::FieldTooLarge { p: p as u32, m });
    }
    let poly = smallest_irreducible(p as u32, m);
    Field::with_modulus(p as u32, poly)
}

impl Field {
    /// Builds a field from an explicit monic irreducible modulus.
    pub fn with_modulus(p: u32, defining_poly: Vec<u32>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        let m = defining_poly.len().saturating_sub(1) as u32;
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(m));
        }
        if defining_poly[m as usize] != 1 || !is_irreducible(&defining_poly, p) {
            return Err(Error::Parse(format!(
                "defining polynomial {defining_poly:?} is not monic irreducible mod {p}"
            )));
        }
        let order = (p as u64).checked_pow(m).filter(|&n| n <= u32::MAX as u64);
        let Some(order) = order else {
            return Err(Error::FieldTooLarge { p, m });
        };
        let pows: Vec<u64> = (0..=m).map(|i| (p as u64).pow(i)).collect();
        let mut inner = Inner {
            spec: FieldSpec { p, m, defining_poly },
            order: order as u32,
            pows,
            tables: None,
        };
        if order <= TABLE_LIMIT && order > 2 {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Field(Arc::new(inner)))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    pub fn m(&self) -> u32 {
        self.0.spec.m
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.0.order).map(Elem)
    }

    pub fn from_int(&self, c: i64) -> Elem {
        let p = self.p() as i64;
        Elem(c.rem_euclid(p) as u32)
    }

    /// Image of the polynomial variable `t` (the power-basis generator).
    pub fn generator(&self) -> Elem {
        if self.m() == 1 {
            // F_p[t]/(t + c_0): t = -c_0.
            self.from_int(-(self.0.spec.defining_poly[0] as i64))
        } else {
            Elem(self.p())
        }
    }

    pub fn coords(&self, a: Elem) -> Vec<u32> {
        let (d, m) = self.digits(a);
        d[..m].iter().map(|&c| c as u32).collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Elem> {
        if coords.len() > self.m() as usize {
            return Err(Error::FieldMismatch);
        }
        let mut idx = 0u64;
        for (i, &c) in coords.iter().enumerate() {
            if c >= self.p() {
                return Err(Error::Parse(format!("coordinate {c} is not reduced mod {}", self.p())));
            }
            idx += c as u64 * self.0.pows[i];
        }
        Ok(Elem(idx as u32))
    }

    #[inline]
    fn digits(&self, a: Elem) -> ([u64; MAX_DEGREE as usize], usize) {
        let p = self.p() as u64;
        let m = self.m() as usize;
        let mut d = [0u64; MAX_DEGREE as usize];
        let mut r = a.0 as u64;
        for slot in d.iter_mut().take(m) {
            *slot = r % p;
            r /= p;
        }
        (d, m)
    }

    #[inline]
    fn undigits(&self, d: &[u64]) -> Elem {
        let mut idx = 0u64;
        for (i, &c) in d.iter().enumerate().take(self.m() as usize) {
            idx += c * self.0.pows[i];
        }
        Elem(idx as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p() == 2 {
            return Elem(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        if let Some(t) = &self.0.tables {
            let la = t.log[a.0 as usize];
            let lb = t.log[b.0 as usize];
            let n1 = self.0.order - 1;
            let d = if lb >= la { lb - la } else { lb + n1 - la };
            let z = t.zech[d as usize];
            if z == NO_LOG {
                return Elem::ZERO;
            }
            return Elem(t.exp[(la + z) as usize]);
        }
        self.add_generic(a, b)
    }

    fn add_generic(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p() as u64;
        let (da, m) = self.digits(a);
        let (db, _) = self.digits(b);
        let mut s = [0u64; MAX_DEGREE as usize];
        for i in 0..m {
            s[i] = (da[i] + db[i]) % p;
        }
        self.undigits(&s[..m])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p() == 2 || a.0 == 0 {
            return a;
        }
        if let Some(t) = &self.0.tables {
            let half = (self.0.order - 1) / 2;
            return Elem(t.exp[(t.log[a.0 as usize] + half) as usize]);
        }
        let p = self.p() as u64;
        let (d, m) = self.digits(a);
        let mut s = [0u64; MAX_DEGREE as usize];
        for i in 0..m {
            s[i] = (p - d[i]) % p;
        }
        self.undigits(&s[..m])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if let Some(t) = &self.0.tables {
            return Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]);
        }
        self.mul_generic(a, b)
    }

    fn mul_generic(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p() as u64;
        let (da, m) = self.digits(a);
        let (db, _) = self.digits(b);
        let mut prod = [0u64; 2 * MAX_DEGREE as usize];
        for i in 0..m {
            if da[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        let f = &self.0.spec.defining_poly;
        for top in (m..2 * m - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            // t^m = -(f_0 + ... + f_{m-1} t^{m-1})
            for k in 0..m {
                let fk = f[k] as u64;
                prod[top - m + k] = (prod[top - m + k] + (p - fk) * c) % p;
            }
        }
        self.undigits(&prod[..m])
    }

    /// Multiplicative inverse; `DivisionByZero` for zero.
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.0.tables {
            let n1 = self.0.order - 1;
            let l = t.log[a.0 as usize];
            return Ok(Elem(t.exp[((n1 - l) % n1) as usize]));
        }
        Ok(self.inv_euclid(a))
    }

    /// Inverse by the extended Euclidean algorithm on representative polynomials.
    pub fn inv_euclid(&self, a: Elem) -> Elem {
        assert!(!a.is_zero(), "inverse of zero");
        let p = self.p() as u64;
        let (d, m) = self.digits(a);
        let mut r0: Vec<u64> = self.0.spec.defining_poly.iter().map(|&c| c as u64).collect();
        let mut r1: Vec<u64> = d[..m].to_vec();
        trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while r1.len() > 1 {
            // r0 = quot * r1 + rem
            let (quot, rem) = poly_divmod(&r0, &r1, p);
            let qs = poly_mul_plain(&quot, &s1, p);
            let s2 = poly_sub(&s0, &qs, p);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant c: s1 * a = c mod f.
        let c_inv = modinv(r1[0], p);
        let mut out = [0u64; MAX_DEGREE as usize];
        let s1 = poly_rem(&s1, &self.0.spec.defining_poly.iter().map(|&c| c as u64).collect::<Vec<_>>(), p);
        for (i, &c) in s1.iter().enumerate() {
            out[i] = c * c_inv % p;
        }
        self.undigits(&out[..m])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        if let Some(t) = &self.0.tables {
            let n1 = (self.0.order - 1) as u64;
            let l = t.log[a.0 as usize] as u64;
            return Elem(t.exp[((l * (e % n1)) % n1) as usize]);
        }
        let mut result = Elem::ONE;
        let mut b = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_generic(result, b);
            }
            b = self.mul_generic(b, b);
            e >>= 1;
        }
        result
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Elem, k: u32) -> Elem {
        let k = k % self.m();
        if k == 0 || a.0 == 0 {
            return a;
        }
        if let Some(t) = &self.0.tables {
            let n1 = (self.0.order - 1) as u64;
            let pk = modpow(self.p() as u64, k as u64, n1);
            let l = t.log[a.0 as usize] as u64;
            return Elem(t.exp[(l * pk % n1) as usize]);
        }
        let mut r = a;
        for _ in 0..k {
            r = self.pow(r, self.p() as u64);
        }
        r
    }

    /// Whether `a` lies in the subfield `F_{p^d}`, i.e. `a^(p^d) = a`.
    pub fn in_subfield(&self, a: Elem, d: u32) -> Result<bool> {
        if d == 0 || !self.m().is_multiple_of(d) {
            return Err(Error::NonDivisor { d, m: self.m() });
        }
        Ok(self.frobenius(a, d) == a)
    }

    /// Whether `a^(p^k) = a`; unlike [`Field::in_subfield`] `k` need not divide `m`.
    pub fn fixed_by_frobenius(&self, a: Elem, k: u32) -> bool {
        self.frobenius(a, k) == a
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Elem) -> u64 {
        assert!(!a.is_zero());
        let n1 = (self.order() - 1) as u64;
        let mut ord = n1;
        for r in prime_factors(n1) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == Elem::ONE {
                ord /= r;
            }
        }
        ord
    }

    /// First element in enumeration order that generates the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        if let Some(t) = &self.0.tables {
            return Elem(t.exp[1]);
        }
        if self.order() == 2 {
            return Elem::ONE;
        }
        find_primitive(self)
    }

    /// `sum c_i x^i` with coefficients given as prime-field residues.
    pub fn eval_prime_poly(&self, coeffs: &[u32], x: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), self.from_int(c as i64));
        }
        acc
    }

    /// Comma-separated prime-field coordinates, low degree first.
    pub fn format_elem(&self, a: Elem) -> String {
        let c: Vec<String> = self.coords(a).iter().map(|c| c.to_string()).collect();
        c.join(",")
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let coords = parse_coords(s)?;
        self.from_coords(&coords)
    }
}

pub(crate) fn parse_coords(s: &str) -> Result<Vec<u32>> {
    s.trim()
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad coordinate {c:?}: {e}")))
        })
        .collect()
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quot = vec![0u64; r.len() - db];
    let inv_lead = modinv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] * inv_lead % p;
        quot[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        trim(&mut r);
    }
    trim(&mut quot);
    (quot, r)
}

fn poly_mul_plain(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

fn find_primitive(field: &Field) -> Elem {
    let n1 = (field.order() - 1) as u64;
    let factors = prime_factors(n1);
    for a in field.elements().skip(1) {
        if factors.iter().all(|&r| field.pow(a, n1 / r) != Elem::ONE) {
            return a;
        }
    }
    unreachable!("multiplicative group of a finite field is cyclic")
}

fn build_tables(inner: &Inner) -> Tables {
    // Arithmetic through a table-less handle.
    let plain = Field(Arc::new(Inner {
        spec: inner.spec.clone(),
        order: inner.order,
        pows: inner.pows.clone(),
        tables: None,
    }));
    let n = inner.order as usize;
    let g = find_primitive(&plain);
    let mut exp = vec![0u32; 2 * (n - 1)];
    let mut log = vec![NO_LOG; n];
    let mut x = Elem::ONE;
    for i in 0..n - 1 {
        exp[i] = x.0;
        log[x.0 as usize] = i as u32;
        x = plain.mul_generic(x, g);
    }
    for i in n - 1..2 * (n - 1) {
        exp[i] = exp[i - (n - 1)];
    }
    let mut zech = vec![NO_LOG; n - 1];
    for (i, z) in zech.iter_mut().enumerate() {
        let s = plain.add_generic(Elem::ONE, Elem(exp[i]));
        if !s.is_zero() {
            *z = log[s.0 as usize];
        }
    }
    Tables { log, exp, zech }
}

/// Ring embedding `F_{p^d} -> F_{p^m}` for `d | m`, determined by the image of the
/// source generator: the first root of the source modulus in target enumeration order.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Field,
    target: Field,
    image_of_generator: Elem,
    map: Vec<Elem>,
}

impl Embedding {
    pub fn new(source: &Field, target: &Field) -> Result<Embedding> {
        if source.p() != target.p() {
            return Err(Error::FieldMismatch);
        }
        if !target.m().is_multiple_of(source.m()) {
            return Err(Error::NonDivisor { d: source.m(), m: target.m() });
        }
        let modulus = &source.spec().defining_poly;
        let image = if source.m() == 1 {
            target.from_int(-(modulus[0] as i64))
        } else {
            target
                .elements()
                .find(|&x| target.eval_prime_poly(modulus, x).is_zero())
                .expect("subfield modulus splits in the extension")
        };
        let mut e = Embedding {
            source: source.clone(),
            target: target.clone(),
            image_of_generator: image,
            map: Vec::new(),
        };
        if source.order() as u64 <= TABLE_LIMIT {
            e.map = source.elements().map(|a| e.compute(a)).collect();
        }
        Ok(e)
    }

    /// The identity embedding of a field into itself.
    pub fn identity(field: &Field) -> Embedding {
        Embedding::new(field, field).expect("identity embedding")
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn image_of_generator(&self) -> Elem {
        self.image_of_generator
    }

    fn compute(&self, a: Elem) -> Elem {
        let coords = self.source.coords(a);
        self.target.eval_prime_poly(&coords, self.image_of_generator)
    }

    /// Maps a source element into the target field.
    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        if let Some(&b) = self.map.get(a.0 as usize) {
            return b;
        }
        self.compute(a)
    }

    /// Checked variant of [`Embedding::apply`].
    pub fn embed(&self, a: Elem) -> Result<Elem> {
        if a.0 >= self.source.order() {
            return Err(Error::FieldMismatch);
        }
        Ok(self.apply(a))
    }
}
