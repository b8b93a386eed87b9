//! 3x3 matrices over a finite field.

use crate::error::{Error, Result};
use crate::gf::{Elem, Embedding, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat3(pub [[Elem; 3]; 3]);

/// Elementary factor of an invertible matrix. Each variant is the matrix it names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    /// Permutation matrix exchanging rows `i` and `j`.
    Swap(usize, usize),
    /// Identity with `c` at `(i, i)`.
    Scale(usize, Elem),
    /// Identity plus `c` at `(target, source)`.
    Shear { target: usize, source: usize, c: Elem },
}

impl Mat3 {
    /// Uniform over invertible matrices, by rejection.
    pub fn random_invertible<R: rand::Rng>(field: &Field, rng: &mut R) -> Mat3 {
        loop {
            let m = Mat3([[(); 3]; 3].map(|r| r.map(|_| Elem::from_index(rng.gen_range(0..field.order())))));
            if m.is_invertible(field) {
                return m;
            }
        }
    }

    pub fn identity() -> Mat3 {
        let mut m = [[Elem::ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Elem::ONE;
        }
        Mat3(m)
    }

    pub fn from_ints(field: &Field, rows: [[i64; 3]; 3]) -> Mat3 {
        Mat3(rows.map(|r| r.map(|c| field.from_int(c))))
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.0[i][j]
    }

    pub fn mul(&self, field: &Field, other: &Mat3) -> Mat3 {
        let mut out = [[Elem::ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = Elem::ZERO;
                for k in 0..3 {
                    acc = field.add(acc, field.mul(self.0[i][k], other.0[k][j]));
                }
                *slot = acc;
            }
        }
        Mat3(out)
    }

    pub fn apply(&self, field: &Field, v: [Elem; 3]) -> [Elem; 3] {
        let mut out = [Elem::ZERO; 3];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Elem::ZERO;
            for (k, &vk) in v.iter().enumerate() {
                acc = field.add(acc, field.mul(self.0[i][k], vk));
            }
            *slot = acc;
        }
        out
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self, field: &Field) -> Elem {
        let a = &self.0;
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
            field.sub(field.mul(a[r1][c1], a[r2][c2]), field.mul(a[r1][c2], a[r2][c1]))
        };
        let t0 = field.mul(a[0][0], minor(1, 2, 1, 2));
        let t1 = field.mul(a[0][1], minor(1, 2, 0, 2));
        let t2 = field.mul(a[0][2], minor(1, 2, 0, 1));
        field.add(field.sub(t0, t1), t2)
    }

    pub fn is_invertible(&self, field: &Field) -> bool {
        !self.det(field).is_zero()
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self, field: &Field) -> Result<Mat3> {
        let det = self.det(field);
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let dinv = field.inv(det)?;
        let a = &self.0;
        let mut out = [[Elem::ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                // cofactor C_{ji}
                let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
                let m = field.sub(
                    field.mul(a[rows[0]][cols[0]], a[rows[1]][cols[1]]),
                    field.mul(a[rows[0]][cols[1]], a[rows[1]][cols[0]]),
                );
                let c = if (i + j) % 2 == 0 { m } else { field.neg(m) };
                *slot = field.mul(c, dinv);
            }
        }
        Ok(Mat3(out))
    }

    pub fn scale(&self, field: &Field, c: Elem) -> Mat3 {
        Mat3(self.0.map(|r| r.map(|e| field.mul(e, c))))
    }

    pub fn pow(&self, field: &Field, mut e: u64) -> Mat3 {
        let mut result = Mat3::identity();
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(field, &b);
            }
            b = b.mul(field, &b);
            e >>= 1;
        }
        result
    }

    pub fn embed(&self, e: &Embedding) -> Mat3 {
        Mat3(self.0.map(|r| r.map(|c| e.apply(c))))
    }

    /// Writes `self` as a product `E_1 E_2 ... E_k` of elementary matrices.
    pub fn elementary_factors(&self, field: &Field) -> Result<Vec<Elementary>> {
        // Row-reduce: R_r ... R_1 A = I, so A = R_1^{-1} ... R_r^{-1}.
        let mut a = self.0;
        let mut ops = Vec::new();
        for col in 0..3 {
            let pivot = (col..3).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            if pivot != col {
                a.swap(pivot, col);
                ops.push(Elementary::Swap(pivot, col));
            }
            let pv = a[col][col];
            if pv != Elem::ONE {
                let inv = field.inv(pv)?;
                for c in 0..3 {
                    a[col][c] = field.mul(a[col][c], inv);
                }
                ops.push(Elementary::Scale(col, inv));
            }
            for r in 0..3 {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let c = field.neg(a[r][col]);
                for k in 0..3 {
                    a[r][k] = field.add(a[r][k], field.mul(c, a[col][k]));
                }
                ops.push(Elementary::Shear { target: r, source: col, c });
            }
        }
        let mut factors = Vec::with_capacity(ops.len());
        for op in ops {
            factors.push(match op {
                Elementary::Swap(i, j) => Elementary::Swap(i, j),
                Elementary::Scale(i, c) => Elementary::Scale(i, field.inv(c)?),
                Elementary::Shear { target, source, c } => {
                    Elementary::Shear { target, source, c: field.neg(c) }
                }
            });
        }
        Ok(factors)
    }
}

impl Elementary {
    pub fn to_matrix(self) -> Mat3 {
        let mut m = Mat3::identity();
        match self {
            Elementary::Swap(i, j) => {
                m.0.swap(i, j);
            }
            Elementary::Scale(i, c) => m.0[i][i] = c,
            Elementary::Shear { target, source, c } => m.0[target][source] = c,
        }
        m
    }
}
