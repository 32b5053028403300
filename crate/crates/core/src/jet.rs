//! Second-order jets over the four chart coordinates.
//!
//! A [`Jet`] carries a value together with its exact gradient and Hessian at
//! a point. Products follow the Leibniz rule, so matrix-valued jets built
//! from symbolic field derivatives stay exact up to rounding.

use std::ops::{Add, Neg, Sub};

use nalgebra::{ComplexField, Matrix4};
use num_complex::Complex64;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    pub value: T,
    pub grad: [T; 4],
    pub hess: [[T; 4]; 4],
}

impl<T: Clone> Jet<T> {
    pub fn new(value: T, grad: [T; 4], hess: [[T; 4]; 4]) -> Self {
        Self { value, grad, hess }
    }

    /// Applies a linear map to every jet component.
    pub fn map_linear<U>(&self, f: impl Fn(&T) -> U) -> Jet<U> {
        Jet {
            value: f(&self.value),
            grad: std::array::from_fn(|m| f(&self.grad[m])),
            hess: std::array::from_fn(|m| std::array::from_fn(|n| f(&self.hess[m][n]))),
        }
    }
}

impl<T: Clone + Zero> Jet<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: std::array::from_fn(|_| T::zero()),
            hess: std::array::from_fn(|_| std::array::from_fn(|_| T::zero())),
        }
    }
}

/// Leibniz product of two jets through a bilinear operation.
pub fn bilinear<A, B, C>(a: &Jet<A>, b: &Jet<B>, op: impl Fn(&A, &B) -> C) -> Jet<C>
where
    C: Add<Output = C>,
{
    Jet {
        value: op(&a.value, &b.value),
        grad: std::array::from_fn(|m| op(&a.grad[m], &b.value) + op(&a.value, &b.grad[m])),
        hess: std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                op(&a.hess[m][n], &b.value)
                    + op(&a.grad[m], &b.grad[n])
                    + op(&a.grad[n], &b.grad[m])
                    + op(&a.value, &b.hess[m][n])
            })
        }),
    }
}

impl<T: Clone + Add<Output = T>> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            value: self.value.clone() + o.value.clone(),
            grad: std::array::from_fn(|m| self.grad[m].clone() + o.grad[m].clone()),
            hess: std::array::from_fn(|m| std::array::from_fn(|n| self.hess[m][n].clone() + o.hess[m][n].clone())),
        }
    }
}

impl<T: Clone + Sub<Output = T>> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            value: self.value.clone() - o.value.clone(),
            grad: std::array::from_fn(|m| self.grad[m].clone() - o.grad[m].clone()),
            hess: std::array::from_fn(|m| std::array::from_fn(|n| self.hess[m][n].clone() - o.hess[m][n].clone())),
        }
    }
}

impl<T: Clone + Neg<Output = T>> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map_linear(|x| -x.clone())
    }
}

impl Jet<f64> {
    pub fn variable(value: f64, index: usize) -> Self {
        let mut j = Jet::constant(value);
        j.grad[index] = 1.0;
        j
    }

    /// Chain rule for a scalar function with known first and second derivatives.
    pub fn compose(&self, f: f64, df: f64, ddf: f64) -> Self {
        Jet {
            value: f,
            grad: std::array::from_fn(|m| df * self.grad[m]),
            hess: std::array::from_fn(|m| {
                std::array::from_fn(|n| ddf * self.grad[m] * self.grad[n] + df * self.hess[m][n])
            }),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map_linear(|x| k * x)
    }

    pub fn mul(&self, o: &Self) -> Self {
        bilinear(self, o, |a, b| a * b)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let x = self.value;
        self.compose(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn recip(&self) -> Self {
        let x = self.value;
        self.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn powi(&self, n: i32) -> Self {
        let x = self.value;
        let nf = n as f64;
        self.compose(x.powi(n), nf * x.powi(n - 1), nf * (nf - 1.0) * x.powi(n - 2))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn tan(&self) -> Self {
        let t = self.value.tan();
        let d = 1.0 + t * t;
        self.compose(t, d, 2.0 * t * d)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(c, s, c)
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let d = 1.0 - t * t;
        self.compose(t, d, -2.0 * t * d)
    }

    pub fn cot(&self) -> Self {
        let c = 1.0 / self.value.tan();
        let d = -(1.0 + c * c);
        self.compose(c, d, -2.0 * c * d)
    }

    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * r * r))
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.value;
        self.compose(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    /// Chain rule for a function of two jets given its partial derivatives
    /// `[f, f_a, f_b, f_aa, f_ab, f_bb]`.
    pub fn compose2(a: &Self, b: &Self, d: [f64; 6]) -> Self {
        let [f, fa, fb, faa, fab, fbb] = d;
        Jet {
            value: f,
            grad: std::array::from_fn(|m| fa * a.grad[m] + fb * b.grad[m]),
            hess: std::array::from_fn(|m| {
                std::array::from_fn(|n| {
                    faa * a.grad[m] * a.grad[n]
                        + fab * (a.grad[m] * b.grad[n] + a.grad[n] * b.grad[m])
                        + fbb * b.grad[m] * b.grad[n]
                        + fa * a.hess[m][n]
                        + fb * b.hess[m][n]
                })
            }),
        }
    }

    /// `atan2(self, x)`.
    pub fn atan2(&self, x: &Self) -> Self {
        let (yv, xv) = (self.value, x.value);
        let r2 = xv * xv + yv * yv;
        let r4 = r2 * r2;
        Self::compose2(
            self,
            x,
            [
                yv.atan2(xv),
                xv / r2,
                -yv / r2,
                -2.0 * xv * yv / r4,
                (yv * yv - xv * xv) / r4,
                2.0 * xv * yv / r4,
            ],
        )
    }

    /// `self^e` for a non-constant exponent, through `exp(e ln self)`.
    pub fn pow(&self, e: &Self) -> Self {
        let (a, b) = (self.value, e.value);
        let f = a.powf(b);
        let la = a.ln();
        Self::compose2(
            self,
            e,
            [
                f,
                b * a.powf(b - 1.0),
                f * la,
                b * (b - 1.0) * a.powf(b - 2.0),
                a.powf(b - 1.0) * (1.0 + b * la),
                f * la * la,
            ],
        )
    }

    /// Lifts a real jet into a complex-valued one.
    pub fn to_complex(&self) -> Jet<Complex64> {
        self.map_linear(|x| Complex64::new(*x, 0.0))
    }
}

impl<T: ComplexField<RealField = f64> + Copy> Jet<Matrix4<T>> {
    pub fn mat_mul(&self, o: &Self) -> Self {
        bilinear(self, o, |a, b| a * b)
    }

    pub fn transpose(&self) -> Self {
        self.map_linear(|m| m.transpose())
    }

    /// Jet of the matrix inverse; `None` when the value is singular.
    pub fn try_inverse(&self) -> Option<Self> {
        let inv = self.value.try_inverse()?;
        let grad: [Matrix4<T>; 4] = std::array::from_fn(|m| -(inv * self.grad[m] * inv));
        let hess = std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                inv * (self.grad[m] * inv * self.grad[n] + self.grad[n] * inv * self.grad[m] - self.hess[m][n]) * inv
            })
        });
        Some(Jet { value: inv, grad, hess })
    }

    pub fn scale(&self, k: T) -> Self {
        self.map_linear(|m| m * k)
    }

    /// Scales every component by a real jet.
    pub fn scale_by(&self, s: &Jet<f64>) -> Self {
        bilinear(s, self, |a, m| m * T::from_real(*a))
    }
}

/// Operations needed by the scaling-and-squaring exponential.
pub trait ExpAlgebra: Clone {
    fn identity_like(&self) -> Self;
    fn product(&self, o: &Self) -> Self;
    fn sum(&self, o: &Self) -> Self;
    fn scaled(&self, k: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl<T: ComplexField<RealField = f64> + Copy> ExpAlgebra for Matrix4<T> {
    fn identity_like(&self) -> Self {
        Matrix4::identity()
    }
    fn product(&self, o: &Self) -> Self {
        self * o
    }
    fn sum(&self, o: &Self) -> Self {
        self + o
    }
    fn scaled(&self, k: f64) -> Self {
        self * T::from_real(k)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl<T: ComplexField<RealField = f64> + Copy> ExpAlgebra for Jet<Matrix4<T>> {
    fn identity_like(&self) -> Self {
        Jet::constant(Matrix4::identity())
    }
    fn product(&self, o: &Self) -> Self {
        self.mat_mul(o)
    }
    fn sum(&self, o: &Self) -> Self {
        self + o
    }
    fn scaled(&self, k: f64) -> Self {
        self.scale(T::from_real(k))
    }
    fn magnitude(&self) -> f64 {
        self.value.norm()
    }
}

const TAYLOR_TERMS: usize = 18;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// Works on plain matrices and on matrix jets alike, so derivatives of the
/// exponential come out of the same arithmetic as the value.
pub fn expm<A: ExpAlgebra>(x: &A) -> A {
    let norm = x.magnitude();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let y = x.scaled(0.5f64.powi(squarings as i32));
    // Horner: I + y(I + y/2(I + y/3(...)))
    let id = y.identity_like();
    let mut acc = id.clone();
    for k in (1..=TAYLOR_TERMS).rev() {
        acc = id.sum(&y.product(&acc).scaled(1.0 / k as f64));
    }
    for _ in 0..squarings {
        acc = acc.product(&acc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> Matrix4<f64>>(f: F, t: f64) -> Matrix4<f64> {
        let h = 1e-4;
        (f(t - 2.0 * h) - f(t - h) * 8.0 + f(t + h) * 8.0 - f(t + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn scalar_chain_rule_matches_closed_form() {
        // f(x, y) = exp(x) * sin(y) at (0.3, 0.7)
        let x = Jet::variable(0.3, 0);
        let y = Jet::variable(0.7, 1);
        let f = x.exp().mul(&y.sin());
        let (ex, sy, cy) = (0.3f64.exp(), 0.7f64.sin(), 0.7f64.cos());
        assert!((f.value - ex * sy).abs() < 1e-15);
        assert!((f.grad[0] - ex * sy).abs() < 1e-15);
        assert!((f.grad[1] - ex * cy).abs() < 1e-15);
        assert!((f.hess[0][1] - ex * cy).abs() < 1e-15);
        assert!((f.hess[1][1] + ex * sy).abs() < 1e-15);
    }

    #[test]
    fn binary_functions_match_finite_differences() {
        let f = |x: f64, y: f64| y.atan2(x) + x.powf(y);
        let (x0, y0) = (1.3, 0.6);
        let x = Jet::variable(x0, 0);
        let y = Jet::variable(y0, 1);
        let j = &y.atan2(&x) + &x.pow(&y);
        let h = 1e-4;
        let dx = (f(x0 + h, y0) - f(x0 - h, y0)) / (2.0 * h);
        let dxy = (f(x0 + h, y0 + h) - f(x0 + h, y0 - h) - f(x0 - h, y0 + h) + f(x0 - h, y0 - h)) / (4.0 * h * h);
        assert!((j.value - f(x0, y0)).abs() < 1e-15);
        assert!((j.grad[0] - dx).abs() < 1e-7);
        assert!((j.hess[0][1] - dxy).abs() < 1e-6);
        assert!((j.hess[1][0] - j.hess[0][1]).abs() < 1e-15);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let mut g = Matrix4::<f64>::zeros();
        g[(1, 2)] = -1.0;
        g[(2, 1)] = 1.0;
        let t = 2.3;
        let r = expm(&(g * t));
        assert!((r[(1, 1)] - t.cos()).abs() < 1e-14);
        assert!((r[(2, 1)] - t.sin()).abs() < 1e-14);
        assert!((r[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn expm_jet_derivatives_match_finite_differences() {
        // X(t) = t*A + t^2*B, non-commuting A and B
        let a = Matrix4::from_fn(|i, j| ((i * 3 + j) as f64 * 0.37).sin());
        let b = Matrix4::from_fn(|i, j| ((i + 2 * j) as f64 * 0.61).cos() * 0.5);
        let t0 = 0.8;
        let t = Jet::variable(t0, 0);
        let x = (&Jet::constant(a).scale_by(&t)) + (&Jet::constant(b).scale_by(&t.mul(&t)));
        let e = expm(&x);
        let f = |t: f64| expm(&(a * t + b * (t * t)));
        assert!((e.value - f(t0)).norm() < 1e-12);
        assert!((e.grad[0] - fd(f, t0)).norm() < 1e-8);
        let d2 = fd(|s| fd(f, s), t0);
        assert!((e.hess[0][0] - d2).norm() < 1e-5);
    }

    #[test]
    fn inverse_jet_is_consistent() {
        let t = Jet::variable(0.4, 2);
        let a = Matrix4::from_fn(|i, j| if i == j { 2.0 } else { 0.1 * (i + j) as f64 });
        let b = Matrix4::from_fn(|i, j| 0.2 * ((i * j) as f64).cos());
        let m = &Jet::constant(a) + &Jet::constant(b).scale_by(&t.sin());
        let inv = m.try_inverse().unwrap();
        let id = m.mat_mul(&inv);
        assert!((id.value - Matrix4::identity()).norm() < 1e-14);
        assert!(id.grad[2].norm() < 1e-14);
        assert!(id.hess[2][2].norm() < 1e-13);
    }
}
