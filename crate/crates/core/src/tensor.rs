//! Fixed-size index helpers for 4-dimensional tensors.
//!
//! World (tetrad) indices are moved with the Minkowski matrix
//! `diag(+1, -1, -1, -1)`; the Levi-Civita symbol has `eps_{0123} = +1`,
//! hence `eps^{0123} = -1`.

use std::array::from_fn;

use nalgebra::Matrix4;

pub type Vec4 = [f64; 4];
pub type Rank2 = [[f64; 4]; 4];
pub type Rank3 = [[[f64; 4]; 4]; 4];
pub type Rank4 = [[[[f64; 4]; 4]; 4]; 4];

pub const ETA: Vec4 = [1.0, -1.0, -1.0, -1.0];

pub fn eta_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&ETA.into())
}

pub fn tensor1(f: impl FnMut(usize) -> f64) -> Vec4 {
    from_fn(f)
}

pub fn tensor2(mut f: impl FnMut(usize, usize) -> f64) -> Rank2 {
    from_fn(|i| from_fn(|j| f(i, j)))
}

pub fn tensor3(mut f: impl FnMut(usize, usize, usize) -> f64) -> Rank3 {
    from_fn(|i| from_fn(|j| from_fn(|k| f(i, j, k))))
}

pub fn tensor4(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Rank4 {
    from_fn(|i| from_fn(|j| from_fn(|k| from_fn(|l| f(i, j, k, l)))))
}

pub fn sum1(mut f: impl FnMut(usize) -> f64) -> f64 {
    (0..4).map(&mut f).sum()
}

pub fn sum2(mut f: impl FnMut(usize, usize) -> f64) -> f64 {
    sum1(|i| sum1(|j| f(i, j)))
}

pub fn sum3(mut f: impl FnMut(usize, usize, usize) -> f64) -> f64 {
    sum1(|i| sum1(|j| sum1(|k| f(i, j, k))))
}

pub fn sum4(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> f64 {
    sum1(|i| sum1(|j| sum1(|k| sum1(|l| f(i, j, k, l)))))
}

/// Totally antisymmetric symbol with lower indices, `eps_{0123} = +1`.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let p = [a, b, c, d];
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Levi-Civita symbol with all indices raised by the Minkowski metric.
pub fn levi_civita_up(a: usize, b: usize, c: usize, d: usize) -> f64 {
    -levi_civita(a, b, c, d)
}

pub fn lower(v: &Vec4) -> Vec4 {
    tensor1(|a| ETA[a] * v[a])
}

/// Minkowski inner product of two world vectors (both upper).
pub fn dot(a: &Vec4, b: &Vec4) -> f64 {
    sum1(|i| ETA[i] * a[i] * b[i])
}

pub fn max_abs<const N: usize>(v: [f64; N]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs2(t: &Rank2) -> f64 {
    t.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs3(t: &Rank3) -> f64 {
    t.iter().flatten().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs4(t: &Rank4) -> f64 {
    t.iter().flatten().flatten().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn matrix_to_rank2(m: &Matrix4<f64>) -> Rank2 {
    tensor2(|i, j| m[(i, j)])
}

pub fn rank2_to_matrix(t: &Rank2) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| t[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_sign_and_raising() {
        assert_eq!(levi_civita(0, 1, 2, 3), 1.0);
        assert_eq!(levi_civita(1, 0, 2, 3), -1.0);
        assert_eq!(levi_civita(1, 2, 3, 0), -1.0);
        assert_eq!(levi_civita(0, 0, 2, 3), 0.0);
        assert_eq!(levi_civita_up(0, 1, 2, 3), -1.0);
        // eps_{abcd} eps^{abcd} = -24 in Lorentzian signature
        let full = sum4(|a, b, c, d| levi_civita(a, b, c, d) * levi_civita_up(a, b, c, d));
        assert_eq!(full, -24.0);
    }
}
