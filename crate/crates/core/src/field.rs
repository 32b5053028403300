//! Polar spinor fields on a chart.
//!
//! A field is given by its module `phi`, chiral angle `beta`, gauge phase
//! `zeta`, gauge potential `A` and the boost/rotation parameters of the frame
//! transformation `L^-1`, all as expressions in the chart coordinates:
//!
//! `psi = phi exp(-i beta pi / 2) exp(-i q zeta) L^-1 (1, 0, 1, 0)`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{basis, generator_parameters, lorentz_generator, CMat4, CVec4, SpinGroupElement, Spinor, I};
use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::SpacetimeChart;
use crate::jet::{bilinear, expm, Jet};
use crate::polar::PolarData;
use crate::tensor::{lower, Vec4};

fn zero() -> String {
    "0".into()
}

fn zeros<const N: usize>() -> [String; N] {
    std::array::from_fn(|_| zero())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    #[serde(default = "zeros")]
    pub rapidities: [String; 3],
    #[serde(default = "zeros")]
    pub angles: [String; 3],
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            rapidities: zeros(),
            angles: zeros(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarFieldSpec {
    pub phi: String,
    #[serde(default = "zero")]
    pub beta: String,
    #[serde(rename = "L", default)]
    pub frame: FrameSpec,
    #[serde(rename = "A", default = "zeros")]
    pub potential: [String; 4],
    #[serde(default)]
    pub q: f64,
    #[serde(default = "zero")]
    pub zeta: String,
}

impl PolarFieldSpec {
    /// Constant module, everything else trivial.
    pub fn constant(phi: f64) -> Self {
        Self {
            phi: phi.to_string(),
            beta: zero(),
            frame: FrameSpec::default(),
            potential: zeros(),
            q: 0.0,
            zeta: zero(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolarField {
    pub phi: Expr,
    pub beta: Expr,
    pub zeta: Expr,
    pub rapidities: [Expr; 3],
    pub angles: [Expr; 3],
    pub potential: [Expr; 4],
    pub charge: f64,
    pub spec: PolarFieldSpec,
}

impl PolarField {
    pub fn new(spec: &PolarFieldSpec, chart: &SpacetimeChart) -> Result<Self> {
        let p = |t: &str| chart.parse_expr(t);
        let three = |v: &[String; 3]| -> Result<[Expr; 3]> { Ok([p(&v[0])?, p(&v[1])?, p(&v[2])?]) };
        Ok(Self {
            phi: p(&spec.phi)?,
            beta: p(&spec.beta)?,
            zeta: p(&spec.zeta)?,
            rapidities: three(&spec.frame.rapidities)?,
            angles: three(&spec.frame.angles)?,
            potential: [
                p(&spec.potential[0])?,
                p(&spec.potential[1])?,
                p(&spec.potential[2])?,
                p(&spec.potential[3])?,
            ],
            charge: spec.q,
            spec: spec.clone(),
        })
    }

    pub fn from_json(text: &str, chart: &SpacetimeChart) -> Result<Self> {
        Self::new(&serde_json::from_str(text)?, chart)
    }

    pub fn at(&self, x: &[f64; 4]) -> FieldPoint {
        let jet = |e: &Expr| e.eval_jet(x);
        let rap = self.rapidities.each_ref().map(jet);
        let ang = self.angles.each_ref().map(jet);
        let (spin, frame) = frame_jets(&rap, &ang);
        let phi = jet(&self.phi);
        let beta = jet(&self.beta);
        let zeta = jet(&self.zeta);

        let half = beta.scale(0.5);
        let (cb, sb) = (half.cos(), half.sin());
        let pi = basis().pi;
        let chiral =
            &cb.map_linear(|v| CMat4::identity() * Complex64::new(*v, 0.0)) + &sb.map_linear(|v| pi * (-I * *v));
        let qz = zeta.scale(self.charge);
        let (cq, sq) = (qz.cos(), qz.sin());
        let gauge = &cq.map_linear(|v| CMat4::identity() * Complex64::new(*v, 0.0))
            + &sq.map_linear(|v| CMat4::identity() * (-I * *v));
        let op = chiral.mat_mul(&gauge).mat_mul(&spin).scale_by(&phi);
        let rest = Spinor::rest().components;
        let spinor = op.map_linear(|m| m * rest);
        FieldPoint {
            x: *x,
            phi,
            beta,
            zeta,
            potential: self.potential.each_ref().map(jet),
            charge: self.charge,
            spin,
            frame,
            spinor,
        }
    }
}

/// Jets of `S = exp(boost) exp(rotation)` and of its real image.
pub fn frame_jets(rap: &[Jet<f64>; 3], ang: &[Jet<f64>; 3]) -> (Jet<CMat4>, Jet<Matrix4<f64>>) {
    let generators = |params: &[Jet<f64>; 3], boost: bool| {
        let mut spin = Jet::constant(CMat4::zeros());
        let mut real = Jet::constant(Matrix4::zeros());
        for (k, p) in params.iter().enumerate() {
            let mut unit = [0.0; 3];
            unit[k] = 1.0;
            let omega = if boost {
                generator_parameters(unit, [0.0; 3])
            } else {
                generator_parameters([0.0; 3], unit)
            };
            spin = &spin + &Jet::constant(basis().spin_generator(&omega)).scale_by(p);
            real = &real + &Jet::constant(lorentz_generator(&omega)).scale_by(p);
        }
        (expm(&spin), expm(&real))
    };
    let (bs, bl) = generators(rap, true);
    let (rs, rl) = generators(ang, false);
    (bs.mat_mul(&rs), bl.mat_mul(&rl))
}

/// Field data with exact first and second derivatives at one point.
#[derive(Clone, Debug)]
pub struct FieldPoint {
    pub x: [f64; 4],
    pub phi: Jet<f64>,
    pub beta: Jet<f64>,
    pub zeta: Jet<f64>,
    pub potential: [Jet<f64>; 4],
    pub charge: f64,
    /// `L^-1`
    pub spin: Jet<CMat4>,
    /// `Lambda(L^-1)`; columns 0 and 3 are `u^a` and `s^a`.
    pub frame: Jet<Matrix4<f64>>,
    pub spinor: Jet<CVec4>,
}

impl FieldPoint {
    pub fn u(&self) -> Vec4 {
        std::array::from_fn(|a| self.frame.value[(a, 0)])
    }

    pub fn s(&self) -> Vec4 {
        std::array::from_fn(|a| self.frame.value[(a, 3)])
    }

    pub fn u_lower(&self) -> Vec4 {
        lower(&self.u())
    }

    pub fn s_lower(&self) -> Vec4 {
        lower(&self.s())
    }

    /// `d_mu u^a` as `[mu][a]`.
    pub fn du(&self) -> [Vec4; 4] {
        std::array::from_fn(|m| std::array::from_fn(|a| self.frame.grad[m][(a, 0)]))
    }

    pub fn ds(&self) -> [Vec4; 4] {
        std::array::from_fn(|m| std::array::from_fn(|a| self.frame.grad[m][(a, 3)]))
    }

    pub fn spinor_value(&self) -> Spinor {
        Spinor::new(self.spinor.value)
    }

    pub fn dspinor(&self, mu: usize) -> CVec4 {
        self.spinor.grad[mu]
    }

    pub fn potential_value(&self) -> Vec4 {
        std::array::from_fn(|m| self.potential[m].value)
    }

    /// `d_mu ln phi`; infinite when `phi = 0`.
    pub fn dlnphi(&self) -> Vec4 {
        std::array::from_fn(|m| self.phi.grad[m] / self.phi.value)
    }

    pub fn dbeta(&self) -> Vec4 {
        self.beta.grad
    }

    /// `P_mu = q (d_mu zeta - A_mu)`.
    pub fn gauge_momentum(&self) -> Vec4 {
        std::array::from_fn(|m| self.charge * (self.zeta.grad[m] - self.potential[m].value))
    }

    /// Polar data of the spinor value; the Goldstone element is `L`.
    pub fn polar_data(&self) -> PolarData {
        let frame = SpinGroupElement {
            spin: self.spin.value,
            lorentz: self.frame.value,
            phase: 0.0,
        };
        PolarData {
            phi: self.phi.value,
            beta: self.beta.value,
            u: self.u(),
            s: self.s(),
            goldstone: frame.inverse(),
            gauge_phase: -self.charge * self.zeta.value,
        }
    }
}

/// `d_mu (bar psi) Gamma psi + bar psi Gamma d_mu psi` and the value, as
/// `(value, gradient)`.
pub fn bilinear_jet(psi: &Jet<CVec4>, gamma: &CMat4) -> (Complex64, [Complex64; 4]) {
    let g0 = basis().gamma[0];
    let j = bilinear(psi, psi, |a, b| (a.adjoint() * g0 * gamma * b)[(0, 0)]);
    (j.value, j.grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::exp_spin;
    use crate::expr::fd_step;
    use crate::observables::bilinears;
    use crate::polar::polar_reconstruct;

    fn generic_spec() -> PolarFieldSpec {
        PolarFieldSpec {
            phi: "1 + sin(r)*cos(theta)/10".into(),
            beta: "3*r/10 - t/5".into(),
            frame: FrameSpec {
                rapidities: ["sin(r)/5".into(), "t/10".into(), "3*cos(theta)/10".into()],
                angles: ["2*phi/5".into(), "r/5".into(), "-3*theta*r/10".into()],
            },
            potential: ["1/(5*r)".into(), "t/20".into(), "sin(theta)/10".into(), "0.3".into()],
            q: 1.3,
            zeta: "t/2 + phi/10".into(),
        }
    }

    #[test]
    fn value_matches_exp_spin() {
        let chart = SpacetimeChart::preset("flat-spherical").unwrap();
        let f = PolarField::new(&generic_spec(), &chart).unwrap();
        let x = [0.3, 2.5, 1.1, 0.4];
        let p = f.at(&x);
        let rap: [f64; 3] = f.rapidities.each_ref().map(|e| e.eval(&x));
        let ang: [f64; 3] = f.angles.each_ref().map(|e| e.eval(&x));
        let g = exp_spin(rap, [0.0; 3], 0.0, 0.0).compose(&exp_spin([0.0; 3], ang, 0.0, 0.0));
        assert!((p.spin.value - g.spin).camax() < 1e-13);
        assert!((p.frame.value - g.lorentz).amax() < 1e-13);
        let b = bilinears(&p.spinor_value()).unwrap();
        let k = 2.0 * p.phi.value * p.phi.value;
        for a in 0..4 {
            assert!((b.u[a] - k * p.u()[a]).abs() < 1e-12);
            assert!((b.s[a] - k * p.s()[a]).abs() < 1e-12);
        }
        let back = polar_reconstruct(&p.polar_data()).unwrap();
        assert!((back.components - p.spinor.value).camax() < 1e-12);
    }

    #[test]
    fn jets_match_finite_differences() {
        let chart = SpacetimeChart::preset("flat-spherical").unwrap();
        let f = PolarField::new(&generic_spec(), &chart).unwrap();
        let x = [0.3, 2.5, 1.1, 0.4];
        let p = f.at(&x);
        for m in 0..4 {
            let h = fd_step(&x, m);
            let at = |k: f64| {
                let mut y = x;
                y[m] += k * h;
                f.at(&y)
            };
            let (a, b, c, d) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
            let fd = (-a.spinor.value + b.spinor.value * Complex64::new(8.0, 0.0)
                - c.spinor.value * Complex64::new(8.0, 0.0)
                + d.spinor.value)
                / Complex64::new(12.0 * h, 0.0);
            assert!((fd - p.spinor.grad[m]).camax() < 1e-8, "{m}");
            let fd = (-a.frame.value + b.frame.value * 8.0 - c.frame.value * 8.0 + d.frame.value) / (12.0 * h);
            assert!((fd - p.frame.grad[m]).amax() < 1e-8, "{m}");
            for n in 0..4 {
                let fd =
                    (-a.frame.grad[n] + b.frame.grad[n] * 8.0 - c.frame.grad[n] * 8.0 + d.frame.grad[n]) / (12.0 * h);
                assert!((fd - p.frame.hess[m][n]).amax() < 1e-7, "{m}{n}");
            }
        }
    }

    #[test]
    fn spec_defaults() {
        let spec: PolarFieldSpec = serde_json::from_str(r#"{"phi": "1"}"#).unwrap();
        assert_eq!(spec, PolarFieldSpec::constant(1.0));
        let chart = SpacetimeChart::preset("flat-cartesian").unwrap();
        let p = PolarField::new(&spec, &chart).unwrap().at(&[0.0; 4]);
        assert_eq!(p.u(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.s(), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.spinor.value, Spinor::rest().components);
    }
}
