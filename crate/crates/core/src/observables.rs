//! Spinor bilinears and the algebraic relations among them.

use nalgebra::RowVector4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{basis, c, CMat4, CVec4, GammaBasis, Spinor, I};
use crate::error::{Error, Result};
use crate::tensor::{dot, levi_civita, levi_civita_up, lower, sum2, tensor2, Rank2, Vec4, ETA};

/// Imaginary residues above this (relative to `max(1, |psi|^2)`) are errors.
pub const NON_REAL_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bilinears {
    pub theta: f64,
    pub phi: f64,
    pub u: Vec4,
    pub s: Vec4,
    pub m: Rank2,
    pub sigma: Rank2,
}

impl Bilinears {
    /// `Theta^2 + Phi^2`.
    pub fn invariant(&self) -> f64 {
        self.theta * self.theta + self.phi * self.phi
    }

    pub fn m_lower(&self) -> Rank2 {
        tensor2(|a, b| ETA[a] * ETA[b] * self.m[a][b])
    }
}

pub(crate) fn sandwich(bar: &RowVector4<Complex64>, m: &CMat4, psi: &CVec4) -> Complex64 {
    (bar * m * psi)[(0, 0)]
}

pub fn bilinears(psi: &Spinor) -> Result<Bilinears> {
    bilinears_with(basis(), psi)
}

/// Bilinears computed with an arbitrary gamma basis; a basis that is not a
/// valid representation shows up as [`Error::NonRealBilinear`].
pub fn bilinears_with(basis: &GammaBasis, psi: &Spinor) -> Result<Bilinears> {
    let v = &psi.components;
    let bar = v.adjoint() * basis.gamma[0];
    let mut worst: f64 = 0.0;
    let mut real = |z: Complex64| {
        worst = worst.max(z.im.abs());
        z.re
    };
    let phi = real(sandwich(&bar, &CMat4::identity(), v));
    let theta = real(I * sandwich(&bar, &basis.pi, v));
    let u: Vec4 = std::array::from_fn(|a| real(sandwich(&bar, &basis.gamma[a], v)));
    let s: Vec4 = std::array::from_fn(|a| real(sandwich(&bar, &(basis.gamma[a] * basis.pi), v)));
    let mut m = [[0.0; 4]; 4];
    let mut sigma = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            m[a][b] = real(c(2.0) * I * sandwich(&bar, &basis.sigma[a][b], v));
            sigma[a][b] = real(c(2.0) * sandwich(&bar, &(basis.sigma[a][b] * basis.pi), v));
        }
    }
    let scale = 1f64.max(v.norm_squared());
    if worst > NON_REAL_THRESHOLD * scale {
        return Err(Error::NonRealBilinear { residue: worst / scale });
    }
    Ok(Bilinears {
        theta,
        phi,
        u,
        s,
        m,
        sigma,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FierzResiduals {
    /// `U.U - (Theta^2 + Phi^2)`
    pub norm_u: f64,
    /// `S.S + (Theta^2 + Phi^2)`
    pub norm_s: f64,
    /// `U.S`
    pub orthogonal: f64,
    /// `M_ab (Phi^2 + Theta^2) - Phi U^j S^k eps_jkab - Theta U_[a S_b]`
    pub m_relation: f64,
    /// `Sigma^ij + 1/2 eps^abij M_ab`
    pub hodge: f64,
}

impl FierzResiduals {
    pub fn max(&self) -> f64 {
        [self.norm_u, self.norm_s, self.orthogonal, self.m_relation, self.hodge]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Residuals of the quadratic and quartic bilinear relations, each divided
/// by the matching power of `max(1, Theta^2 + Phi^2)`.
pub fn fierz_residuals(b: &Bilinears) -> FierzResiduals {
    let inv = b.invariant();
    let scale = 1f64.max(inv);
    let (ul, sl) = (lower(&b.u), lower(&b.s));
    let ml = b.m_lower();
    let mut m_rel: f64 = 0.0;
    let mut hodge: f64 = 0.0;
    for a in 0..4 {
        for bb in 0..4 {
            let eps_term = sum2(|j, k| b.u[j] * b.s[k] * levi_civita(j, k, a, bb));
            let wedge = ul[a] * sl[bb] - ul[bb] * sl[a];
            let r = ml[a][bb] * inv - b.phi * eps_term - b.theta * wedge;
            m_rel = m_rel.max(r.abs());
            let dual = -0.5 * sum2(|x, y| levi_civita_up(x, y, a, bb) * ml[x][y]);
            hodge = hodge.max((b.sigma[a][bb] - dual).abs());
        }
    }
    FierzResiduals {
        norm_u: (dot(&b.u, &b.u) - inv).abs() / scale,
        norm_s: (dot(&b.s, &b.s) + inv).abs() / scale,
        orthogonal: dot(&b.u, &b.s).abs() / scale,
        m_relation: m_rel / scale.powf(1.5),
        hodge: hodge / scale.sqrt(),
    }
}

/// `sum_{mu nu} w_mu z_nu sigma^{mu nu}` for lower-index world vectors.
fn contract_sigma(w: &Vec4, z: &Vec4) -> CMat4 {
    let b = basis();
    let mut out = CMat4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let k = w[m] * z[n];
            if k != 0.0 {
                out += b.sigma[m][n] * c(k);
            }
        }
    }
    out
}

/// Norm of `2 U_mu S_nu sigma^{mu nu} pi psi + (U.U) psi`, relative to
/// `max(1, |psi|^3)`.
pub fn aux_residual(psi: &Spinor) -> Result<f64> {
    let b = bilinears(psi)?;
    let op = contract_sigma(&lower(&b.u), &lower(&b.s)) * basis().pi * c(2.0);
    let r = op * psi.components + psi.components * c(dot(&b.u, &b.u));
    Ok(r.norm() / 1f64.max(psi.norm().powi(3)))
}

/// Norm of `u_[mu s_nu] sigma^{mu nu} pi psi + psi` for the normalized
/// velocity and spin, relative to `|psi|`.
pub fn aux_residual_normalized(psi: &Spinor) -> Result<f64> {
    let b = bilinears(psi)?;
    let inv = b.invariant();
    let threshold = crate::polar::SINGULAR_THRESHOLD * psi.norm().powi(4);
    if inv <= threshold {
        return Err(Error::SingularSpinor {
            invariant: inv,
            threshold,
        });
    }
    let k = 1.0 / inv.sqrt();
    let u = lower(&b.u).map(|x| x * k);
    let s = lower(&b.s).map(|x| x * k);
    let op = (contract_sigma(&u, &s) - contract_sigma(&s, &u)) * basis().pi;
    let r = op * psi.components + psi.components;
    Ok(r.norm() / psi.norm())
}

/// Spinors with real and imaginary parts uniform in `[-1, 1]`.
pub struct SpinorSampler {
    rng: ChaCha8Rng,
}

impl SpinorSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self) -> Spinor {
        let mut z = || Complex64::new(self.rng.random_range(-1.0..=1.0), self.rng.random_range(-1.0..=1.0));
        Spinor::from_array([z(), z(), z(), z()])
    }
}

impl Iterator for SpinorSampler {
    type Item = Spinor;
    fn next(&mut self) -> Option<Spinor> {
        Some(self.sample())
    }
}

/// `n` reproducible random spinors.
pub fn random_spinors(seed: u64, n: usize) -> Vec<Spinor> {
    SpinorSampler::new(seed).take(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::exp_spin;
    use crate::tensor::max_abs;

    #[test]
    fn rest_spinor_bilinears() {
        let b = bilinears(&Spinor::rest()).unwrap();
        assert_eq!(b.phi, 2.0);
        assert_eq!(b.theta, 0.0);
        assert_eq!(b.u, [2.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.s, [0.0, 0.0, 0.0, 2.0]);
        assert_eq!(dot(&b.u, &b.u), 4.0);
    }

    #[test]
    fn zero_spinor_has_zero_bilinears() {
        let b = bilinears(&Spinor::from_real([0.0; 4])).unwrap();
        assert_eq!(b, Bilinears::default());
    }

    #[test]
    fn chiral_rotation_exchanges_scalar_and_pseudoscalar() {
        let beta = std::f64::consts::FRAC_PI_2;
        let rot = CMat4::identity() * c((beta / 2.0).cos()) - basis().pi * I * c((beta / 2.0).sin());
        let b = bilinears(&Spinor::rest().apply(&rot)).unwrap();
        assert!(b.phi.abs() < 1e-15);
        assert!((b.theta - 2.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_violation_is_detected() {
        let mut b = bilinears(&Spinor::rest()).unwrap();
        b.s = b.u;
        let r = fierz_residuals(&b);
        assert!((r.orthogonal * 4.0 - dot(&b.u, &b.u)).abs() < 1e-15);
    }

    #[test]
    fn random_spinors_obey_relations() {
        for psi in random_spinors(7, 200) {
            let b = bilinears(&psi).unwrap();
            assert!(fierz_residuals(&b).max() < 1e-12);
            assert!(aux_residual(&psi).unwrap() < 1e-12);
            assert!(aux_residual_normalized(&psi).unwrap() < 1e-10);
            assert!(b.u[0] > 0.0);
        }
    }

    #[test]
    fn flag_spinor_is_singular() {
        let flag = Spinor::from_real([1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            aux_residual_normalized(&flag),
            Err(Error::SingularSpinor { .. })
        ));
        assert!(aux_residual(&flag).unwrap() < 1e-15);
    }

    #[test]
    fn broken_basis_gives_non_real_bilinears() {
        let b = basis();
        let mut g = b.gamma;
        g[2] = g[2] * c(3.0) + g[1];
        let broken = GammaBasis::from_parts(g, CMat4::identity() * I);
        let err = bilinears_with(&broken, &Spinor::from_real([0.3, -0.5, 0.9, 0.1])).unwrap_err();
        assert!(matches!(err, Error::NonRealBilinear { .. }));
    }

    #[test]
    fn bilinears_transform_covariantly() {
        let g = exp_spin([0.3, -0.2, 0.5], [0.4, 0.1, -0.7], 0.9, 1.0);
        for psi in random_spinors(11, 20) {
            let b0 = bilinears(&psi).unwrap();
            let b1 = bilinears(&psi.apply(&g.spin)).unwrap();
            // psi -> S psi sends U^a to Lambda^a_b U^b
            let inv = g.lorentz;
            let tu: Vec4 = std::array::from_fn(|a| (0..4).map(|k| inv[(a, k)] * b0.u[k]).sum());
            let ts: Vec4 = std::array::from_fn(|a| (0..4).map(|k| inv[(a, k)] * b0.s[k]).sum());
            assert!(max_abs(std::array::from_fn::<f64, 4, _>(|a| tu[a] - b1.u[a])) < 1e-12);
            assert!(max_abs(std::array::from_fn::<f64, 4, _>(|a| ts[a] - b1.s[a])) < 1e-12);
            assert!((b0.phi - b1.phi).abs() < 1e-12);
            assert!((b0.theta - b1.theta).abs() < 1e-12);
        }
    }
}
