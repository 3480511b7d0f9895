//! Small fixed-size complex matrices for two-mode and two-particle algebra.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::math;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// e^{i theta}.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(math::cos(theta), math::sin(theta))
}

/// Complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// Complex 4x4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn adjoint(&self) -> Self {
        let m = self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    /// Maximum absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm_sqr());
            }
        }
        math::sqrt(d)
    }

    /// Operator-norm distance, computed exactly for 2x2 via singular values.
    pub fn op_distance(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        let m = d.0;
        let fro2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let det2 = det.norm_sqr();
        let disc = (fro2 * fro2 - 4.0 * det2).max(0.0);
        math::sqrt(0.5 * (fro2 + math::sqrt(disc)))
    }

    /// Largest entry of |M^dagger M - I|.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::identity())
    }

    /// Kronecker product `self (x) other`, index 2x + y.
    pub fn kron(&self, other: &Mat2) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[i / 2][j / 2] * other.0[i % 2][j % 2];
            }
        }
        Mat4(out)
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = self.0;
        let b = rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mat4 {
    pub const fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Mat4(m)
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[j][i].conj();
            }
        }
        Mat4(out)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// |v><v| for a (not necessarily normalised) vector.
    pub fn outer(v: &[Complex64; 4]) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = v[i] * v[j].conj();
            }
        }
        Mat4(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        for z in out.iter_mut().flatten() {
            *z *= s;
        }
        Mat4(out)
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm_sqr());
            }
        }
        math::sqrt(d)
    }

    /// Largest entry of |M - M^dagger|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Cholesky attempt on a Hermitian matrix shifted by `shift * I`.
    ///
    /// Returns true when the shifted matrix is positive definite, i.e. the
    /// smallest eigenvalue exceeds `-shift`.
    pub fn is_positive_with_shift(&self, shift: f64) -> bool {
        let mut a = self.0;
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += Complex64::new(shift, 0.0);
        }
        let mut l = [[ZERO; 4]; 4];
        for j in 0..4 {
            let mut d = a[j][j].re;
            for lk in l[j].iter().take(j) {
                d -= lk.norm_sqr();
            }
            if d <= 0.0 || d.is_nan() {
                return false;
            }
            let djj = math::sqrt(d);
            l[j][j] = Complex64::new(djj, 0.0);
            for i in (j + 1)..4 {
                let mut s = a[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k].conj();
                }
                l[i][j] = s / djj;
            }
        }
        true
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let mut s = ZERO;
                for k in 0..4 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                *v = s;
            }
        }
        Mat4(out)
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        let mut out = self.0;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += rhs.0[i][j];
            }
        }
        Mat4(out)
    }
}

/// Solve a small dense real system `a x = b` by Gaussian elimination with
/// partial pivoting. Returns `None` for a (numerically) singular matrix.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let mut piv = col;
        let mut best = math::abs(a[col * n + col]);
        for r in (col + 1)..n {
            let v = math::abs(a[r * n + col]);
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > 1e-300) {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}
