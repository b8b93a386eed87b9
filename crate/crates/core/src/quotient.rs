//! Polynomial identities behind the quotient by the Sylow `p`-subgroup, and p-rank bookkeeping.
//!
//! Bivariate polynomials reuse [`TriPoly`] with `X`, `Y` in the `x`, `y` slots and no `z`.

use serde::Serialize;

use crate::check::Check;
use crate::curve::{split_q, DgzCurve};
use crate::error::{Error, Result};
use crate::gf::{build_field, Elem, Field};
use crate::local::genus;
use crate::poly::{Monomial, TriPoly};

/// Largest `q` accepted by the identity checks.
pub const MAX_IDENTITY_Q: u64 = 9;
/// Largest Fermat degree accepted by [`hasse_witt_fermat`].
pub const MAX_FERMAT_DEGREE: u32 = 12;

fn field_for(q: u64) -> Result<Field> {
    let (p, h) = split_q(q)?;
    if q > MAX_IDENTITY_Q {
        return Err(Error::ScaleExceeded(format!("quotient identities need q <= {MAX_IDENTITY_Q}")));
    }
    build_field(p as u64, h)
}

fn mono(f: &Field, x: u64, y: u64, c: i64) -> TriPoly {
    TriPoly::monomial(f, Monomial::new(x as u32, y as u32, 0), f.from_int(c))
}

/// `X - X^q` in one variable slot.
fn additive(f: &Field, q: u64, slot_y: bool) -> TriPoly {
    if slot_y {
        mono(f, 0, 1, 1).sub(&mono(f, 0, q, 1)).unwrap()
    } else {
        mono(f, 1, 0, 1).sub(&mono(f, q, 0, 1)).unwrap()
    }
}

/// `H(X,Y) = (X^{q^2-1} - Y^{q^2-1}) / (X^{q-1} - Y^{q-1}) + 1`.
pub fn h_poly(f: &Field, q: u64) -> Result<TriPoly> {
    let num = mono(f, q * q - 1, 0, 1).sub(&mono(f, 0, q * q - 1, 1))?;
    let den = mono(f, q - 1, 0, 1).sub(&mono(f, 0, q - 1, 1))?;
    num.exact_divide(&den)?.add(&TriPoly::one(f))
}

/// `M_rat(X,Y) = (X - X^{q^2}) / (X - X^q) + Y^{q^2-q}`.
pub fn m_rat(f: &Field, q: u64) -> Result<TriPoly> {
    let num = mono(f, 1, 0, 1).sub(&mono(f, q * q, 0, 1))?;
    num.exact_divide(&additive(f, q, false))?.add(&mono(f, 0, q * q - q, 1))
}

/// The expanded form printed for `M`: `1 + X^{q-1} - X^{q(q-1)} + Y^{q(q-1)}`.
pub fn m_expanded(f: &Field, q: u64) -> Result<TriPoly> {
    TriPoly::one(f)
        .add(&mono(f, q - 1, 0, 1))?
        .sub(&mono(f, q * (q - 1), 0, 1))?
        .add(&mono(f, 0, q * (q - 1), 1))
}

/// `1 + (X^q - X)^{q-1} + Y^{q(q-1)}`.
pub fn m_closed(f: &Field, q: u64) -> Result<TriPoly> {
    TriPoly::one(f)
        .add(&additive(f, q, false).neg().pow(q - 1))?
        .add(&mono(f, 0, q * (q - 1), 1))
}

/// `F(x,y,1)` against `H(xi, eta)` with `xi = x^q - x`, `eta = y^q - y`.
pub fn verify_h_identity(curve: &DgzCurve) -> Result<Vec<Check>> {
    let q = curve.q();
    let f = field_for(q)?;
    if *curve.field() != f {
        return Err(Error::FieldMismatch);
    }
    let xi = additive(&f, q, false).neg();
    let eta = additive(&f, q, true).neg();
    let one = TriPoly::one(&f);
    let faff = curve.f.dehomogenize_z();
    let den = xi.pow(q - 1).sub(&eta.pow(q - 1))?;
    let rhs = xi.pow(q * q - 1).sub(&eta.pow(q * q - 1))?.add(&den)?;
    let h = h_poly(&f, q)?;
    let h_sub = h.compose([&xi, &eta, &one])?;
    Ok(vec![
        Check::new(format!("F(x,y,1) cleared identity at q={q}"), faff.mul(&den)? == rhs, "difference is zero"),
        Check::new(format!("H(xi,eta) = F(x,y,1) at q={q}"), h_sub == faff, "difference is zero"),
        Check::eq(format!("deg H at q={q}"), h.degree().unwrap_or(0) as u64, q * q - q),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MFormReport {
    pub q: u64,
    pub m_rat: String,
    pub matches_expanded: bool,
    pub matches_closed: bool,
}

/// Compares `M_rat` with the printed expansion and with the closed form.
pub fn verify_m_forms(q: u64) -> Result<MFormReport> {
    let f = field_for(q)?;
    let m = m_rat(&f, q)?;
    Ok(MFormReport {
        q,
        m_rat: format_xy(&m),
        matches_expanded: m == m_expanded(&f, q)?,
        matches_closed: m == m_closed(&f, q)?,
    })
}

/// `R(theta, Y) = M_rat(X, Y)` with `theta = X - X^q`, and `R(s^q, t) = (1 + s^{q-1} + t^{q-1})^q`.
pub fn verify_r_and_fermat(q: u64) -> Result<Vec<Check>> {
    let f = field_for(q)?;
    let r = TriPoly::one(&f).add(&mono(&f, q - 1, 0, 1))?.add(&mono(&f, 0, q * (q - 1), 1))?;
    let theta = additive(&f, q, false);
    let y = TriPoly::y(&f);
    let one = TriPoly::one(&f);
    let chain = r.compose([&theta, &y, &one])? == m_rat(&f, q)?;
    let sq = mono(&f, q, 0, 1);
    let fermat = TriPoly::one(&f).add(&mono(&f, q - 1, 0, 1))?.add(&mono(&f, 0, q - 1, 1))?;
    let frob = r.compose([&sq, &y, &one])? == fermat.pow(q);
    Ok(vec![
        Check::new(format!("R(X - X^q, Y) = M_rat at q={q}"), chain, "difference is zero"),
        Check::new(format!("R(s^q, t) = (1 + s^(q-1) + t^(q-1))^q at q={q}"), frob, "difference is zero"),
    ])
}

/// `X`, `Y` rendering of a bivariate polynomial, highest terms first.
pub fn format_xy(poly: &TriPoly) -> String {
    let f = poly.field();
    if poly.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, &(m, c)) in poly.terms().iter().enumerate() {
        let neg = f.neg(c);
        let (sign, c) = if f.p() != 2 && neg.index() < c.index() { ("-", neg) } else { ("+", c) };
        if i > 0 {
            out.push_str(&format!(" {sign} "));
        } else if sign == "-" {
            out.push('-');
        }
        let mut parts = Vec::new();
        if c == Elem::ONE && m.x == 0 && m.y == 0 {
            parts.push("1".into());
        } else if c != Elem::ONE {
            parts.push(f.format_elem(c));
        }
        for (v, e) in [("X", m.x), ("Y", m.y)] {
            match e {
                0 => {}
                1 => parts.push(v.to_string()),
                _ => parts.push(format!("{v}^{e}")),
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

fn rank_mod(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_multiple_of(p)) else { continue };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], p - 2, p);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let k = a[r][c] * inv % p;
                for j in 0..cols {
                    a[r][j] = (a[r][j] + (p - k) * a[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j] % p).sum::<u64>() % p).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HasseWitt {
    pub n: u32,
    pub p: u32,
    pub genus: u64,
    /// Rank of the Hasse–Witt matrix itself.
    pub rank: usize,
    /// Rank of its `genus`-th power: the p-rank.
    pub p_rank: usize,
}

/// Hasse–Witt matrix of the Fermat curve `x^n + y^n + z^n` over `F_p`.
///
/// Rows and columns are indexed by exponent vectors `(i1, i2, i3)` with every entry `>= 1` and sum `n`.
/// The entry at `(i, j)` is the coefficient of `x^{p i - j}` in `(x^n + y^n + z^n)^{p-1}`.
pub fn hasse_witt_fermat(n: u32, p: u32) -> Result<HasseWitt> {
    let field = build_field(p as u64, 1)?;
    if n == 0 || n > MAX_FERMAT_DEGREE {
        return Err(Error::ScaleExceeded(format!("Fermat degree must be in 1..={MAX_FERMAT_DEGREE}")));
    }
    if n.is_multiple_of(p) {
        return Err(Error::SingularCurve);
    }
    let f = TriPoly::from_int_terms(&field, &[(1, [n, 0, 0]), (1, [0, n, 0]), (1, [0, 0, n])]);
    let fp = f.pow(p as u64 - 1);
    let interior: Vec<[u32; 3]> = (1..n)
        .flat_map(|a| (1..n).filter(move |b| a + b < n).map(move |b| [a, b, n - a - b]))
        .collect();
    let a: Vec<Vec<u64>> = interior
        .iter()
        .map(|i| {
            interior
                .iter()
                .map(|j| {
                    let e: Option<Vec<u32>> = (0..3).map(|k| (p * i[k]).checked_sub(j[k])).collect();
                    e.map_or(0, |e| fp.coeff(Monomial::new(e[0], e[1], e[2])).index() as u64)
                })
                .collect()
        })
        .collect();
    let g = interior.len();
    let rank = rank_mod(a.clone(), p as u64);
    let mut power = a.clone();
    for _ in 1..g {
        power = mat_mul(&power, &a, p as u64);
    }
    let p_rank = if g == 0 { 0 } else { rank_mod(power, p as u64) };
    Ok(HasseWitt { n, p, genus: g as u64, rank, p_rank })
}

/// p-rank of the curve from the p-rank of the Fermat quotient via Deuring–Shafarevich.
pub fn ds_prank_relation(q: u64, gamma_fermat: u64) -> i64 {
    let q = q as i64;
    let g = gamma_fermat as i64;
    q.pow(3) * (g - 1) + (q * q - q) * (q * q - 1) + q * (q * q - q) * (q - 1) + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PRankReport {
    pub q: u64,
    pub fermat: HasseWitt,
    pub gamma_c: i64,
    pub genus: u64,
    /// Only asserted when `q` is prime.
    pub ordinary: Option<bool>,
}

/// Fermat p-rank of degree `q - 1` over `F_p`, pushed through [`ds_prank_relation`].
pub fn prank_report(q: u64) -> Result<PRankReport> {
    let (p, h) = split_q(q)?;
    let fermat = hasse_witt_fermat(q as u32 - 1, p)?;
    let gamma_c = ds_prank_relation(q, fermat.p_rank as u64);
    let g = genus(q);
    Ok(PRankReport { q, fermat, gamma_c, genus: g, ordinary: (h == 1).then_some(gamma_c == g as i64) })
}
