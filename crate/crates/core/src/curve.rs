//! The curve `F = D1 / D2` built from Moore determinants.

use crate::check::Check;
use crate::error::{Error, Result};
use crate::gf::{build_field, prime_power, Elem, Field};
use crate::matrix::Mat3;
use crate::plane::{enumerate_lines, enumerate_points};
use crate::poly::{Monomial, TriPoly};

/// Largest `q` accepted by [`DgzCurve::build`].
pub const MAX_Q: u64 = 32;

/// `det [[x, x^q, x^{q^e}], [y, y^q, y^{q^e}], [z, z^q, z^{q^e}]]` as a six-term polynomial.
pub fn moore_minor(field: &Field, q: u64, e: u32) -> TriPoly {
    let ex = [1u32, q as u32, q.pow(e) as u32];
    let one = Elem::ONE;
    let m1 = field.neg(one);
    // Sum over permutations s of sign(s) * x^{ex[s0]} y^{ex[s1]} z^{ex[s2]}.
    let perms: [([usize; 3], Elem); 6] = [
        ([0, 1, 2], one),
        ([1, 2, 0], one),
        ([2, 0, 1], one),
        ([0, 2, 1], m1),
        ([2, 1, 0], m1),
        ([1, 0, 2], m1),
    ];
    TriPoly::from_terms(
        field,
        perms.iter().map(|(s, c)| (Monomial::new(ex[s[0]], ex[s[1]], ex[s[2]]), *c)),
    )
}

#[derive(Clone, Debug)]
pub struct DgzCurve {
    q: u64,
    field: Field,
    pub d1: TriPoly,
    pub d2: TriPoly,
    pub f: TriPoly,
    pub g0: TriPoly,
    pub g1: TriPoly,
    pub g2: TriPoly,
}

/// Parses `q` as `p^h`, rejecting non prime powers.
pub fn split_q(q: u64) -> Result<(u32, u32)> {
    prime_power(q).ok_or(Error::InvalidQ(q))
}

impl DgzCurve {
    pub fn build(q: u64) -> Result<DgzCurve> {
        let (p, h) = split_q(q)?;
        if q > MAX_Q {
            return Err(Error::ScaleExceeded(format!("q = {q} > {MAX_Q}")));
        }
        let field = build_field(p as u64, h)?;
        let d1 = moore_minor(&field, q, 3);
        let d2 = moore_minor(&field, q, 2);
        let f = d1.exact_divide(&d2)?;
        let qq = (q * q) as u32;
        let g = |terms: [([u32; 3], i64); 2]| {
            TriPoly::from_terms(&field, terms.map(|(e, c)| (Monomial::from_exps(e), field.from_int(c))))
        };
        let g1 = g([([0, 1, qq], 1), ([0, qq, 1], -1)]);
        let g2 = g([([qq, 0, 1], 1), ([1, 0, qq], -1)]);
        let g0 = g([([1, qq, 0], 1), ([qq, 1, 0], -1)]);
        Ok(DgzCurve { q, field, d1, d2, f, g0, g1, g2 })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn h(&self) -> u32 {
        self.field.m()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> u64 {
        self.q * self.q * (self.q - 1)
    }

    /// Degree and exact-quotient bookkeeping.
    pub fn structure_checks(&self) -> Vec<Check> {
        let q = self.q;
        let prime_coeffs = self.f.terms().iter().all(|&(_, c)| c.index() < self.p());
        vec![
            Check::eq("deg D1", self.d1.homogeneous_degree().unwrap_or(0) as u64, q * q * q + q + 1),
            Check::eq("deg D2", self.d2.homogeneous_degree().unwrap_or(0) as u64, q * q + q + 1),
            Check::eq("deg F", self.f.homogeneous_degree().unwrap_or(0) as u64, q * q * q - q * q),
            Check::new(
                "D1 = D2 * F",
                self.d2.mul(&self.f).map(|x| x == self.d1).unwrap_or(false),
                format!("{} terms in F", self.f.num_terms()),
            ),
            Check::new("F has prime-field coefficients", prime_coeffs, ""),
        ]
    }

    /// `D1(Av) = det(A) D1(v)`, `D2(Av) = det(A) D2(v)` and `F(Av) = F(v)`.
    pub fn verify_invariance(&self, a: &Mat3) -> Result<Vec<Check>> {
        let det = a.det(&self.field);
        let mut out = Vec::with_capacity(3);
        for (name, poly, scale) in
            [("D1", &self.d1, det), ("D2", &self.d2, det), ("F", &self.f, Elem::ONE)]
        {
            let moved = poly.substitute_linear(a)?;
            out.push(Check::new(
                format!("{name} o A = {} {name}", if scale == Elem::ONE { "1 *" } else { "det(A) *" }),
                moved == poly.scale(scale),
                format!("det(A) = {}", self.field.format_elem(det)),
            ));
        }
        Ok(out)
    }

    /// `D2 F = G1^q x + G2^q y + G0^q z`.
    pub fn verify_nonclassical(&self) -> Check {
        let lhs = self.d2.mul(&self.f).expect("same field");
        let rhs = self.frobenius_combination(self.q, [TriPoly::x(&self.field), TriPoly::y(&self.field), TriPoly::z(&self.field)]);
        let deg = lhs.homogeneous_degree().unwrap_or(0);
        Check::new(
            "D2 F = G1^q x + G2^q y + G0^q z",
            lhs == rhs,
            format!("degree {deg}"),
        )
    }

    /// `G1 x + G2 y + G0 z = 0` and `G1 x^{q^2} + G2 y^{q^2} + G0 z^{q^2} = 0`.
    pub fn verify_frobenius_nc(&self) -> Vec<Check> {
        let fld = &self.field;
        let qq = (self.q * self.q) as u32;
        let mono = |e: [u32; 3]| TriPoly::monomial(fld, Monomial::from_exps(e), Elem::ONE);
        let first = self.frobenius_combination(1, [mono([1, 0, 0]), mono([0, 1, 0]), mono([0, 0, 1])]);
        let second = self.frobenius_combination(1, [mono([qq, 0, 0]), mono([0, qq, 0]), mono([0, 0, qq])]);
        vec![
            Check::new("G1 x + G2 y + G0 z = 0", first.is_zero(), format!("{} terms", first.num_terms())),
            Check::new(
                "G1 x^(q^2) + G2 y^(q^2) + G0 z^(q^2) = 0",
                second.is_zero(),
                format!("{} terms", second.num_terms()),
            ),
        ]
    }

    /// `G1^e u + G2^e v + G0^e w`.
    fn frobenius_combination(&self, e: u64, [u, v, w]: [TriPoly; 3]) -> TriPoly {
        let t = |g: &TriPoly, m: &TriPoly| g.pow(e).mul(m).expect("same field");
        t(&self.g1, &u).add(&t(&self.g2, &v)).and_then(|s| s.add(&t(&self.g0, &w))).expect("same field")
    }

    /// Product of the `q^2 + q + 1` linear forms with `F_q` coefficients, divided by `D2`.
    /// A constant quotient certifies that `D2` splits into the rational lines.
    pub fn d2_line_factor(&self) -> Result<Option<Elem>> {
        let fld = &self.field;
        let mut prod = TriPoly::one(fld);
        for l in enumerate_lines(fld)? {
            let [u, v, w] = *l.coords();
            let form = TriPoly::from_terms(
                fld,
                [(Monomial::new(1, 0, 0), u), (Monomial::new(0, 1, 0), v), (Monomial::new(0, 0, 1), w)],
            );
            prod = prod.mul(&form)?;
        }
        Ok(match prod.exact_divide(&self.d2) {
            Ok(c) if c.homogeneous_degree() == Some(0) => c.leading_term().map(|t| t.1),
            _ => None,
        })
    }

    /// Number of points of `PG(2, F_q)` where `F` vanishes.
    pub fn rational_zeros(&self) -> Result<usize> {
        Ok(enumerate_points(&self.field)?.filter(|p| self.f.eval_coords(p.coords()).is_zero()).count())
    }

    /// Generators of `GL(3, F_q)`: a primitive scalar on `x`, the 3-cycle, and one shear.
    pub fn gl_generators(&self) -> Vec<Mat3> {
        let fld = &self.field;
        let mut diag = Mat3::identity();
        diag.0[0][0] = fld.primitive_element();
        vec![
            diag,
            Mat3::from_ints(fld, [[0, 0, 1], [1, 0, 0], [0, 1, 0]]),
            Mat3::from_ints(fld, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
            Mat3::from_ints(fld, [[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_passed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moore_minor_shapes() {
        let f2 = build_field(2, 1).unwrap();
        let d2 = moore_minor(&f2, 2, 2);
        assert_eq!(d2.num_terms(), 6);
        assert_eq!(d2.homogeneous_degree(), Some(7));
        assert_eq!(moore_minor(&f2, 2, 3).homogeneous_degree(), Some(11));
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(moore_minor(&f3, 3, 2).homogeneous_degree(), Some(13));
    }

    #[test]
    fn quartic_for_q2() {
        let c = DgzCurve::build(2).unwrap();
        let want = TriPoly::from_int_terms(
            c.field(),
            &[
                (1, [4, 0, 0]),
                (1, [2, 2, 0]),
                (1, [2, 1, 1]),
                (1, [2, 0, 2]),
                (1, [1, 2, 1]),
                (1, [1, 1, 2]),
                (1, [0, 4, 0]),
                (1, [0, 2, 2]),
                (1, [0, 0, 4]),
            ],
        );
        assert_eq!(c.f, want);
        // Independent check of the partial derivative: d/dx D1 = y^2 z^8 + y^8 z^2 over F_2.
        let dx = c.d1.partials().0;
        assert_eq!(dx, TriPoly::from_int_terms(c.field(), &[(1, [0, 2, 8]), (1, [0, 8, 2])]));
    }

    #[test]
    fn structure_for_small_q() {
        for q in [2u64, 3, 4, 5] {
            let c = DgzCurve::build(q).unwrap();
            assert!(all_passed(&c.structure_checks()), "q={q}");
            assert!(c.verify_nonclassical().passed, "q={q}");
            assert!(all_passed(&c.verify_frobenius_nc()), "q={q}");
            assert_eq!(c.rational_zeros().unwrap(), 0);
        }
        assert_eq!(DgzCurve::build(3).unwrap().degree(), 18);
        assert_eq!(DgzCurve::build(4).unwrap().degree(), 48);
        assert_eq!(DgzCurve::build(6).unwrap_err(), Error::InvalidQ(6));
        assert!(matches!(DgzCurve::build(64), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn d2_splits_into_rational_lines() {
        for q in [2u64, 3, 4] {
            let c = DgzCurve::build(q).unwrap();
            assert!(c.d2_line_factor().unwrap().is_some(), "q={q}");
        }
    }

    #[test]
    fn invariance_under_gl3() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for q in [2u64, 3, 4] {
            let c = DgzCurve::build(q).unwrap();
            let fld = c.field().clone();
            let mut mats = c.gl_generators();
            mats.push(Mat3::identity());
            while mats.len() < 24 {
                let m = Mat3([[0u8; 3]; 3].map(|r| r.map(|_| Elem::from_index(rng.gen_range(0..fld.order())))));
                if m.is_invertible(&fld) {
                    mats.push(m);
                }
            }
            for a in &mats {
                assert!(all_passed(&c.verify_invariance(a).unwrap()), "q={q} A={a:?}");
            }
        }
    }

    #[test]
    fn non_invertible_breaks_invariance() {
        let c = DgzCurve::build(3).unwrap();
        let sing = Mat3::from_ints(c.field(), [[1, 1, 0], [1, 1, 0], [0, 0, 1]]);
        assert_eq!(c.verify_invariance(&sing), Err(Error::SingularMatrix));
    }
}
