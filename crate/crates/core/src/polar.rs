//! Polar form of a Dirac spinor: module, chiral angle, velocity, spin and the
//! Goldstone transformation.
//!
//! `psi = phi exp(-i beta pi / 2) exp(i gauge_phase) L^-1 (1, 0, 1, 0)`.
//!
//! The frame transformation `L^-1` is built as a boost followed by a rotation.
//! Its real image `Lambda(L^-1)` sends `e_0` to `u` and `e_3` to `s`; the
//! stored Goldstone element `L` carries the inverse.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    basis, c, exp_spin, lorentz_residual, representation_residual, CMat4, SpinGroupElement, Spinor, I,
};
use crate::error::{Error, Result};
use crate::observables::bilinears;
use crate::tensor::{dot, Vec4, ETA};

/// `Phi^2 + Theta^2` below this times `|psi|^4` counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PolarData {
    pub phi: f64,
    pub beta: f64,
    pub u: Vec4,
    pub s: Vec4,
    /// Goldstone transformation `L`; `L^-1` takes the rest frame to `(u, s)`.
    pub goldstone: SpinGroupElement,
    pub gauge_phase: f64,
}

/// Boost rapidities and rotation angles of a frame transformation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameParameters {
    pub rapidities: [f64; 3],
    pub angles: [f64; 3],
}

impl FrameParameters {
    /// `exp(boost) exp(rotation)`.
    pub fn element(&self) -> SpinGroupElement {
        let boost = exp_spin(self.rapidities, [0.0; 3], 0.0, 0.0);
        let rot = exp_spin([0.0; 3], self.angles, 0.0, 0.0);
        boost.compose(&rot)
    }
}

impl PolarData {
    /// `Lambda(L^-1)`: columns 0 and 3 are `u` and `s`.
    pub fn frame_transform(&self) -> Matrix4<f64> {
        self.goldstone
            .lorentz
            .try_inverse()
            .unwrap_or_else(|| Matrix4::from_element(f64::NAN))
    }

    /// Rest-frame data with module `phi` and chiral angle `beta`.
    pub fn rest(phi: f64, beta: f64) -> Self {
        Self {
            phi,
            beta,
            u: [1.0, 0.0, 0.0, 0.0],
            s: [0.0, 0.0, 0.0, 1.0],
            goldstone: SpinGroupElement::identity(),
            gauge_phase: 0.0,
        }
    }

    /// Largest violation of the normalization, orthogonality and frame
    /// consistency constraints, relative to `max(1, (u^0)^2)`.
    pub fn constraint_residual(&self) -> f64 {
        let m = self.frame_transform();
        let mut r = [
            (dot(&self.u, &self.u) - 1.0).abs(),
            (dot(&self.s, &self.s) + 1.0).abs(),
            dot(&self.u, &self.s).abs(),
            lorentz_residual(&self.goldstone.lorentz),
            representation_residual(&self.goldstone.spin, &self.goldstone.lorentz),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        for a in 0..4 {
            r = r.max((m[(a, 0)] - self.u[a]).abs()).max((m[(a, 3)] - self.s[a]).abs());
        }
        r / 1f64.max(self.u[0] * self.u[0])
    }
}

/// `exp(-i beta pi / 2) = cos(beta/2) - i sin(beta/2) pi`, using `pi^2 = 1`.
pub fn chiral_rotation(beta: f64) -> CMat4 {
    CMat4::identity() * c((beta / 2.0).cos()) - basis().pi * I * c((beta / 2.0).sin())
}

/// Boost along `u` followed by the rotation taking the third axis to the
/// rest-frame spin direction.
pub fn frame_parameters(u: &Vec4, s: &Vec4) -> FrameParameters {
    let spatial = [u[1], u[2], u[3]];
    let speed = spatial.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut rapidities = [0.0; 3];
    if speed > 0.0 {
        let r = speed.asinh();
        for k in 0..3 {
            rapidities[k] = r * spatial[k] / speed;
        }
    }
    let boost = exp_spin(rapidities, [0.0; 3], 0.0, 0.0).lorentz;
    let back = boost.try_inverse().expect("boosts are invertible");
    let rest: Vec4 = std::array::from_fn(|a| (0..4).map(|b| back[(a, b)] * s[b]).sum());
    let n = {
        let v = [rest[1], rest[2], rest[3]];
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.map(|x| x / len)
    };
    // axis = z x n, angle = acos(n_z)
    let axis = [-n[1], n[0], 0.0];
    let sin = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();
    let angle = sin.atan2(n[2]);
    let angles = if sin > 1e-15 {
        axis.map(|x| x / sin * angle)
    } else if n[2] < 0.0 {
        [std::f64::consts::PI, 0.0, 0.0]
    } else {
        [0.0; 3]
    };
    FrameParameters { rapidities, angles }
}

/// Frame element read off the chiral halves of `psi`, which avoids the
/// conditioning loss of going through `u`, `s` and angles. The rotation
/// about the spin axis, which the spinor does not fix, is taken from
/// `approx`.
fn exact_frame(psi: &Spinor, phi: f64, beta: f64, approx: &SpinGroupElement) -> SpinGroupElement {
    let v = &psi.components;
    // psi_L = phi e^{i beta/2} e^{i theta} A e1, psi_R = phi e^{-i beta/2} e^{i theta} (A^+)^-1 e1
    let kl = Complex64::from_polar(phi, beta / 2.0);
    let kr = Complex64::from_polar(phi, -beta / 2.0);
    let (a1, a2) = (v[0] / kl, v[1] / kl);
    let (b1, b2) = (v[2] / kr, v[3] / kr);
    let mut spin = CMat4::zeros();
    // A = [a, (-conj b2, conj b1)], det A = conj(b^+ a) = 1
    spin[(0, 0)] = a1;
    spin[(1, 0)] = a2;
    spin[(0, 1)] = -b2.conj();
    spin[(1, 1)] = b1.conj();
    // (A^+)^-1 = [b, (-conj a2, conj a1)]
    spin[(2, 2)] = b1;
    spin[(3, 2)] = b2;
    spin[(2, 3)] = -a2.conj();
    spin[(3, 3)] = a1.conj();
    let g0 = basis().gamma[0];
    let inverse = g0 * spin.adjoint() * g0;
    // approx = spin R_z(chi) up to rounding; R_z(chi) = diag(e^{-i chi/2}, e^{i chi/2}, ...)
    let r = inverse * approx.spin;
    let chi = -2.0 * r[(0, 0)].arg();
    let rot = exp_spin([0.0; 3], [0.0, 0.0, chi], 0.0, 0.0);
    let spin = spin * rot.spin;
    let lorentz = real_lorentz_of(&spin).unwrap_or(approx.lorentz);
    SpinGroupElement {
        spin,
        lorentz,
        phase: 0.0,
    }
}

/// `S^-1 = gamma^0 S^+ gamma^0`, `Lambda^-1 = eta Lambda^T eta`.
fn exact_inverse(g: &SpinGroupElement) -> SpinGroupElement {
    let g0 = basis().gamma[0];
    let eta = crate::tensor::eta_matrix();
    SpinGroupElement {
        spin: g0 * g.spin.adjoint() * g0,
        lorentz: eta * g.lorentz.transpose() * eta,
        phase: 0.0,
    }
}

/// Splits a non-singular spinor into its polar data.
pub fn polar_decompose(psi: &Spinor) -> Result<PolarData> {
    let b = bilinears(psi)?;
    let inv = b.invariant();
    let threshold = SINGULAR_THRESHOLD * psi.norm().powi(4);
    if inv <= threshold || inv == 0.0 {
        return Err(Error::SingularSpinor {
            invariant: inv,
            threshold,
        });
    }
    let two_phi2 = inv.sqrt();
    let phi = (two_phi2 / 2.0).sqrt();
    let mut beta = b.theta.atan2(b.phi);
    if beta <= -std::f64::consts::PI {
        beta += 2.0 * std::f64::consts::PI;
    }
    let u = b.u.map(|x| x / two_phi2);
    let s = b.s.map(|x| x / two_phi2);
    let frame = exact_frame(psi, phi, beta, &frame_parameters(&u, &s).element());

    let candidate = chiral_rotation(beta) * frame.spin * Spinor::rest().components * c(phi);
    let v = &psi.components;
    let big = v.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    let k = (0..4).find(|&k| v[k].norm() > 0.5 * big).unwrap_or(0);
    let gauge_phase = (v[k] / candidate[k]).arg();

    Ok(PolarData {
        phi,
        beta,
        u,
        s,
        goldstone: exact_inverse(&frame),
        gauge_phase,
    })
}

/// Rebuilds the spinor from polar data.
pub fn polar_reconstruct(p: &PolarData) -> Result<Spinor> {
    let r = p.constraint_residual();
    if !(r <= 1e-8) || !(p.phi >= 0.0) {
        return Err(Error::InvalidPolarData(format!(
            "constraint residual {r:e}, phi = {}",
            p.phi
        )));
    }
    let frame = p
        .goldstone
        .spin
        .try_inverse()
        .ok_or_else(|| Error::InvalidPolarData("singular Goldstone matrix".into()))?;
    let phase = Complex64::from_polar(p.phi, p.gauge_phase);
    Ok(Spinor::new(
        chiral_rotation(p.beta) * frame * Spinor::rest().components * phase,
    ))
}

/// `Lambda^i_j = tr(L^-1 gamma^i L gamma_j) / 4`, the real Lorentz matrix of
/// a spin matrix.
pub fn real_lorentz_of(l: &CMat4) -> Result<Matrix4<f64>> {
    let inv = l
        .try_inverse()
        .ok_or_else(|| Error::NotSpinGroup("matrix is singular".into()))?;
    let g = &basis().gamma;
    let mut lam = Matrix4::zeros();
    let mut imag: f64 = 0.0;
    for i in 0..4 {
        let conj = inv * g[i] * l;
        for j in 0..4 {
            let z = (conj * g[j]).trace() * c(0.25 * ETA[j]);
            lam[(i, j)] = z.re;
            imag = imag.max(z.im.abs());
        }
    }
    let orth = lorentz_residual(&lam);
    let det = l.determinant().norm();
    if orth > 1e-6 || imag > 1e-6 || (det - 1.0).abs() > 1e-6 {
        return Err(Error::NotSpinGroup(format!(
            "orthogonality residual {orth:e}, imaginary part {imag:e}, |det| = {det}"
        )));
    }
    Ok(lam)
}
