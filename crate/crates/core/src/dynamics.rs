//! Dirac equation in polar variables: the `Z`, `Y` vectors, the compact and
//! raw forms of the field equations, the momentum and the energy tensor.
//!
//! Frame components are used throughout; `K = P - V`.

use serde::{Deserialize, Serialize};

use crate::clifford::{basis, c, CVec4, I};
use crate::connection::Kinematics;
use crate::error::{Error, Result};
use crate::field::PolarField;
use crate::geometry::SpacetimeChart;
use crate::tensor::{
    levi_civita, levi_civita_up, lower, max_abs, max_abs2, sum1, sum2, sum3, tensor2, tensor3, Rank2, Rank3, Vec4, ETA,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DynamicsContext {
    pub mass: f64,
}

/// `Z_mu` and `Y_mu`, coordinate components.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZYPair {
    pub z: Vec4,
    pub y: Vec4,
}

/// Frame-index view of the kinematic quantities.
struct Frame {
    u: Vec4,
    s: Vec4,
    ul: Vec4,
    sl: Vec4,
    /// `F_{ab c}`
    f: Rank3,
    p: Vec4,
    v: Vec4,
    dbeta: Vec4,
    dlnphi: Vec4,
    /// `nabla_c u_i`
    nu: Rank2,
    ns: Rank2,
    phi: f64,
    beta: f64,
}

impl Frame {
    fn new(k: &Kinematics) -> Self {
        let g = &k.geo;
        let to = |v: &Vec4| g.covector_to_frame(v);
        let conv2 = |t: &Rank2| tensor2(|cc, i| sum1(|m| g.ei(cc, m) * t[m][i]));
        Self {
            u: k.u,
            s: k.s,
            ul: lower(&k.u),
            sl: lower(&k.s),
            f: tensor3(|a, b, cc| sum1(|m| k.conn.f[a][b][m] * g.ei(cc, m))),
            p: to(&k.conn.p),
            v: to(&k.conn.v),
            dbeta: to(&k.field.dbeta()),
            dlnphi: to(&k.field.dlnphi()),
            nu: conv2(&k.nabla_u),
            ns: conv2(&k.nabla_s),
            phi: k.field.phi.value,
            beta: k.field.beta.value,
        }
    }

    fn k_up(&self) -> Vec4 {
        std::array::from_fn(|a| ETA[a] * (self.p[a] - self.v[a]))
    }

    /// `nabla_c u_i s^i`
    fn uks(&self) -> Vec4 {
        std::array::from_fn(|cc| sum1(|i| self.nu[cc][i] * self.s[i]))
    }

    /// `2 Z_m`, `2 Y_m` with lower frame index.
    fn zy2(&self) -> (Vec4, Vec4) {
        let (u, s, ul, sl) = (&self.u, &self.s, &self.ul, &self.sl);
        let (nu, ns) = (&self.nu, &self.ns);
        let div_u = sum1(|cc| ETA[cc] * nu[cc][cc]);
        let div_s = sum1(|cc| ETA[cc] * ns[cc][cc]);
        let uks = self.uks();
        let z2 = std::array::from_fn(|m| {
            2.0 * self.dlnphi[m] + ul[m] * div_u - sl[m] * div_s - sum1(|cc| u[cc] * nu[cc][m])
                + sum1(|cc| s[cc] * ns[cc][m])
                + sum1(|cc| (ul[m] * s[cc] - sl[m] * u[cc]) * uks[cc])
        });
        // nabla^n u^b
        let nuu = tensor2(|n, b| ETA[n] * nu[n][b] * ETA[b]);
        let nss = tensor2(|n, b| ETA[n] * ns[n][b] * ETA[b]);
        let uksu: Vec4 = std::array::from_fn(|n| ETA[n] * uks[n]);
        let y2 = std::array::from_fn(|m| {
            self.dbeta[m] - sum3(|a, n, b| levi_civita(m, a, n, b) * u[a] * nuu[n][b])
                + sum3(|b, n, a| levi_civita(m, b, n, a) * s[b] * nss[n][a])
                + sum3(|a, b, n| levi_civita(m, a, b, n) * u[a] * s[b] * uksu[n])
        });
        (z2, y2)
    }

    fn wedge_contract(&self, k_up: &Vec4, m: usize) -> f64 {
        sum1(|i| k_up[i] * (self.ul[i] * self.sl[m] - self.sl[i] * self.ul[m]))
    }

    fn eps_contract(&self, k_up: &Vec4, m: usize) -> f64 {
        sum3(|r, n, a| levi_civita(m, r, n, a) * k_up[r] * self.u[n] * self.s[a])
    }
}

fn require_regular(k: &Kinematics) -> Result<()> {
    let phi = k.field.phi.value;
    if !(phi.abs() > 0.0) || !phi.is_finite() {
        return Err(Error::SingularSpinor {
            invariant: 4.0 * phi.powi(4),
            threshold: 0.0,
        });
    }
    Ok(())
}

pub fn zy_from(k: &Kinematics) -> Result<ZYPair> {
    require_regular(k)?;
    let (z2, y2) = Frame::new(k).zy2();
    let to = |v: Vec4| k.geo.covector_to_coords(&v.map(|x| 0.5 * x));
    Ok(ZYPair { z: to(z2), y: to(y2) })
}

pub fn zy_vectors(field: &PolarField, chart: &SpacetimeChart, x: &[f64; 4]) -> Result<ZYPair> {
    zy_from(&Kinematics::new(chart, field, x)?)
}

/// Residual 4-vectors of the field equations, lower frame index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiracResiduals {
    /// `Z - eps(K, u, s) + m s sin(beta)`
    pub sm: Vec4,
    /// `Y - K^i u_[i s_m] + m s cos(beta)`
    pub ca: Vec4,
    /// Raw forms written with `F` and `P`.
    pub d1: Vec4,
    pub d2: Vec4,
    /// `max |D1 - 2 SM|, |D2 - 2 CA|`
    pub formulation_gap: f64,
    /// `|i gamma^mu nabla_mu psi - m psi| / max(1, |psi|)`
    pub spinor: f64,
}

impl DiracResiduals {
    pub fn max(&self) -> f64 {
        max_abs(self.sm).max(max_abs(self.ca))
    }
}

pub fn dirac_from(k: &Kinematics, ctx: &DynamicsContext) -> Result<DiracResiduals> {
    require_regular(k)?;
    let fr = Frame::new(k);
    let m = ctx.mass;
    let (z2, y2) = fr.zy2();
    let kk = fr.k_up();
    let p_up: Vec4 = std::array::from_fn(|a| ETA[a] * fr.p[a]);
    let (sb, cb) = fr.beta.sin_cos();
    let sm: Vec4 = std::array::from_fn(|i| 0.5 * z2[i] - fr.eps_contract(&kk, i) + m * fr.sl[i] * sb);
    let ca: Vec4 = std::array::from_fn(|i| 0.5 * y2[i] - fr.wedge_contract(&kk, i) + m * fr.sl[i] * cb);
    let f = &fr.f;
    let f_up = tensor3(|a, b, cc| ETA[a] * ETA[b] * ETA[cc] * f[a][b][cc]);
    let d1: Vec4 = std::array::from_fn(|i| {
        2.0 * fr.dlnphi[i] + sum1(|b| ETA[b] * f[i][b][b]) - 2.0 * fr.eps_contract(&p_up, i) + 2.0 * m * fr.sl[i] * sb
    });
    let d2: Vec4 = std::array::from_fn(|i| {
        fr.dbeta[i] + 0.5 * sum3(|a, n, j| levi_civita(i, a, n, j) * f_up[a][n][j]) - 2.0 * fr.wedge_contract(&p_up, i)
            + 2.0 * m * fr.sl[i] * cb
    });
    let gap = max_abs(std::array::from_fn::<f64, 8, _>(|i| {
        if i < 4 {
            d1[i] - 2.0 * sm[i]
        } else {
            d2[i - 4] - 2.0 * ca[i - 4]
        }
    }));
    let nab = k.nabla_spinor();
    let psi = k.field.spinor.value;
    let mut r = psi * c(-m);
    for a in 0..4 {
        let d: CVec4 = (0..4).fold(CVec4::zeros(), |acc, mu| acc + nab[mu] * c(k.geo.ei(a, mu)));
        r += basis().gamma[a] * d * I;
    }
    Ok(DiracResiduals {
        sm,
        ca,
        d1,
        d2,
        formulation_gap: gap,
        spinor: r.norm() / 1f64.max(psi.norm()),
    })
}

pub fn dirac_residuals(
    field: &PolarField,
    chart: &SpacetimeChart,
    ctx: &DynamicsContext,
    x: &[f64; 4],
) -> Result<DiracResiduals> {
    dirac_from(&Kinematics::new(chart, field, x)?, ctx)
}

/// The momentum formula applied to arbitrary `Z`, `Y` (lower frame index),
/// returning upper frame components.
fn momentum_formula(fr: &Frame, mass: f64, z: &Vec4, y: &Vec4) -> Vec4 {
    let (u, s) = (&fr.u, &fr.s);
    std::array::from_fn(|h| {
        mass * fr.beta.cos() * u[h]
            + sum1(|m| y[m] * (u[m] * s[h] - s[m] * u[h]))
            + sum3(|m, p, t| levi_civita_up(m, p, t, h) * z[m] * fr.ul[p] * fr.sl[t])
    })
}

/// `P - V` predicted by the field equations, lower coordinate components.
pub fn momentum_from(k: &Kinematics, ctx: &DynamicsContext) -> Result<Vec4> {
    require_regular(k)?;
    let fr = Frame::new(k);
    let (z2, y2) = fr.zy2();
    let up = momentum_formula(&fr, ctx.mass, &z2.map(|x| 0.5 * x), &y2.map(|x| 0.5 * x));
    Ok(k.geo.covector_to_coords(&lower(&up)))
}

pub fn momentum(field: &PolarField, chart: &SpacetimeChart, ctx: &DynamicsContext, x: &[f64; 4]) -> Result<Vec4> {
    momentum_from(&Kinematics::new(chart, field, x)?, ctx)
}

/// `momentum - (P - V)` written through the equation residuals; zero for
/// any field, which makes the inversion testable off shell.
pub fn momentum_identity_residual(k: &Kinematics, ctx: &DynamicsContext) -> Result<f64> {
    let predicted = momentum_from(k, ctx)?;
    let d = dirac_from(k, ctx)?;
    let fr = Frame::new(k);
    let through = momentum_formula(&fr, 0.0, &d.sm, &d.ca);
    let through = k.geo.covector_to_coords(&lower(&through));
    let actual: Vec4 = std::array::from_fn(|m| k.conn.p[m] - k.conn.v[m]);
    Ok(max_abs(std::array::from_fn::<f64, 4, _>(|m| {
        predicted[m] - actual[m] - through[m]
    })))
}

/// Energy tensor `T^{ab}` (frame, both indices up) in its three forms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTensor {
    /// From the spinor and its covariant derivative.
    pub spinorial: Rank2,
    /// Polar form with `P` and `F`.
    pub polar: Rank2,
    /// Polar form with `P - V` and `nabla u`.
    pub energy: Rank2,
}

impl EnergyTensor {
    pub fn symmetry_residual(&self) -> f64 {
        max_abs2(&tensor2(|a, b| self.spinorial[a][b] - self.spinorial[b][a]))
    }

    pub fn form_gap(&self) -> f64 {
        let d1 = max_abs2(&tensor2(|a, b| self.spinorial[a][b] - self.polar[a][b]));
        let d2 = max_abs2(&tensor2(|a, b| self.spinorial[a][b] - self.energy[a][b]));
        d1.max(d2)
    }

    /// `T_{ab} w^a w^b` for a frame vector `w`.
    pub fn contract(&self, w: &Vec4) -> f64 {
        sum2(|a, b| ETA[a] * ETA[b] * self.energy[a][b] * w[a] * w[b])
    }
}

pub fn energy_from(k: &Kinematics) -> EnergyTensor {
    let b = basis();
    let psi = k.field.spinor.value;
    let bar = psi.adjoint() * b.gamma[0];
    let nab = k.nabla_spinor();
    // nabla^a psi
    let nab_up: [CVec4; 4] =
        std::array::from_fn(|a| (0..4).fold(CVec4::zeros(), |acc, m| acc + nab[m] * c(ETA[a] * k.geo.ei(a, m))));
    let bar_nab: Vec<_> = nab_up.iter().map(|v| v.adjoint() * b.gamma[0]).collect();
    let term = |r: usize, s: usize| {
        let z = (bar * b.gamma[r] * nab_up[s])[(0, 0)] - (bar_nab[s] * b.gamma[r] * psi)[(0, 0)];
        (I * z * 0.25).re
    };
    let spinorial = tensor2(|r, s| term(r, s) + term(s, r));

    let fr = Frame::new(k);
    let phi2 = fr.phi * fr.phi;
    let (u, s, sl, ul) = (&fr.u, &fr.s, &fr.sl, &fr.ul);
    let up = |v: &Vec4| -> Vec4 { std::array::from_fn(|a| ETA[a] * v[a]) };
    let p_up = up(&fr.p);
    let k_up = fr.k_up();
    let db_up = up(&fr.dbeta);
    // F_{an}^s
    let f_mixed = tensor3(|a, n, ss| fr.f[a][n][ss] * ETA[ss]);
    let beta_part = |r: usize, ss: usize| 0.5 * (db_up[r] * s[ss] + s[r] * db_up[ss]);
    let f_part =
        |r: usize, ss: usize| -0.25 * sum3(|a, n, kk| f_mixed[a][n][ss] * sl[kk] * levi_civita_up(r, a, n, kk));
    let polar =
        tensor2(|r, ss| phi2 * (p_up[r] * u[ss] + u[r] * p_up[ss] + beta_part(r, ss) + f_part(r, ss) + f_part(ss, r)));
    // nabla^s u_n
    let nu_mixed = tensor2(|ss, n| ETA[ss] * fr.nu[ss][n]);
    let u_part =
        |r: usize, ss: usize| -0.5 * sum3(|kk, a, n| sl[kk] * ul[a] * nu_mixed[ss][n] * levi_civita_up(r, n, kk, a));
    let energy =
        tensor2(|r, ss| phi2 * (k_up[r] * u[ss] + u[r] * k_up[ss] + beta_part(r, ss) + u_part(r, ss) + u_part(ss, r)));
    EnergyTensor {
        spinorial,
        polar,
        energy,
    }
}

pub fn energy_tensor(field: &PolarField, chart: &SpacetimeChart, x: &[f64; 4]) -> Result<EnergyTensor> {
    Ok(energy_from(&Kinematics::new(chart, field, x)?))
}

/// `nabla_a S^a` for `S^a = 2 phi^2 s^a`, from exact derivatives.
pub fn spin_divergence(k: &Kinematics) -> f64 {
    let phi = &k.field.phi;
    let ds = k.field.ds();
    let s = &k.s;
    sum2(|a, m| {
        let d = 4.0 * phi.value * phi.grad[m] * s[a]
            + 2.0 * phi.value * phi.value * (ds[m][a] + sum1(|b| k.geo.connection[a][b][m] * s[b]));
        k.geo.ei(a, m) * d
    })
}

/// `nabla_a S^a - 4 m phi^2 sin(beta)`.
pub fn spin_divergence_residual(k: &Kinematics, ctx: &DynamicsContext) -> f64 {
    let phi = k.field.phi.value;
    spin_divergence(k) - 4.0 * ctx.mass * phi * phi * k.field.beta.value.sin()
}

/// `|nabla_a S^a - 4 m phi^2 sin(beta) - 4 phi^2 SM_a s^a|`; holds off shell.
pub fn spin_divergence_identity(k: &Kinematics, ctx: &DynamicsContext) -> Result<f64> {
    let d = dirac_from(k, ctx)?;
    let sm_s = sum1(|a| d.sm[a] * k.s[a]);
    Ok((spin_divergence_residual(k, ctx) - 4.0 * k.field.phi.value.powi(2) * sm_s).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FrameSpec, PolarFieldSpec};

    fn flat() -> SpacetimeChart {
        SpacetimeChart::preset("flat-cartesian").unwrap()
    }

    fn plane_wave(m: f64, q: f64, phi: f64) -> PolarFieldSpec {
        let mut spec = PolarFieldSpec::constant(phi);
        spec.q = q;
        spec.zeta = format!("{}*t", m / q);
        spec
    }

    fn generic() -> PolarFieldSpec {
        PolarFieldSpec {
            phi: "1 + sin(x)*cos(y)/10".into(),
            beta: "3*x/10 - t/5".into(),
            frame: FrameSpec {
                rapidities: ["sin(x)/5".into(), "t/10".into(), "3*cos(y)/10".into()],
                angles: ["2*z/5".into(), "x/5".into(), "-3*y*x/10".into()],
            },
            potential: ["1/(5+x)".into(), "t/20".into(), "sin(y)/10".into(), "0.3".into()],
            q: 1.3,
            zeta: "t/2 + z/10".into(),
        }
    }

    #[test]
    fn constant_rest_field_has_vanishing_zy() {
        let chart = flat();
        let f = PolarField::new(&PolarFieldSpec::constant(1.0), &chart).unwrap();
        let zy = zy_vectors(&f, &chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(zy, ZYPair::default());
    }

    #[test]
    fn module_and_chiral_gradients() {
        let chart = flat();
        let mut spec = PolarFieldSpec::constant(1.0);
        spec.phi = "exp(0.3*x)".into();
        let f = PolarField::new(&spec, &chart).unwrap();
        let zy = zy_vectors(&f, &chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!((2.0 * zy.z[1] - 0.6).abs() < 1e-15);
        assert_eq!(zy.y, [0.0; 4]);
        let mut spec = PolarFieldSpec::constant(1.0);
        spec.beta = "0.7*z".into();
        let f = PolarField::new(&spec, &chart).unwrap();
        let zy = zy_vectors(&f, &chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!((2.0 * zy.y[3] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn plane_wave_solves_the_equations() {
        let chart = flat();
        let (m, q) = (0.8, 1.5);
        let f = PolarField::new(&plane_wave(m, q, 1.2), &chart).unwrap();
        let ctx = DynamicsContext { mass: m };
        let x = [0.4, 0.1, -0.2, 0.3];
        let d = dirac_residuals(&f, &chart, &ctx, &x).unwrap();
        assert!(d.max() < 1e-12 && d.spinor < 1e-12, "{d:?}");
        let mom = momentum(&f, &chart, &ctx, &x).unwrap();
        assert!((mom[0] - m).abs() < 1e-14 && max_abs([mom[1], mom[2], mom[3]]) < 1e-14);
        let k = Kinematics::new(&chart, &f, &x).unwrap();
        let t = energy_from(&k);
        assert!((t.energy[0][0] - 2.0 * 1.44 * m).abs() < 1e-12);
        assert!(max_abs2(&tensor2(|a, b| if a == 0 && b == 0 { 0.0 } else { t.energy[a][b] })) < 1e-14);
        assert!(spin_divergence_residual(&k, &ctx).abs() < 1e-14);
    }

    #[test]
    fn half_momentum_leaves_a_spin_residual() {
        let chart = flat();
        let m = 0.8;
        let f = PolarField::new(&plane_wave(m / 2.0, 1.0, 1.0), &chart).unwrap();
        let d = dirac_residuals(&f, &chart, &DynamicsContext { mass: m }, &[0.0; 4]).unwrap();
        assert!(max_abs(d.sm) < 1e-15);
        // (m/2) s_m with s = e_3
        assert!((d.ca[3] + m / 2.0).abs() < 1e-15);
        assert!(max_abs([d.ca[0], d.ca[1], d.ca[2]]) < 1e-15);
    }

    #[test]
    fn massless_constant_field() {
        let chart = flat();
        let f = PolarField::new(&PolarFieldSpec::constant(1.0), &chart).unwrap();
        let ctx = DynamicsContext { mass: 0.0 };
        let d = dirac_residuals(&f, &chart, &ctx, &[0.0; 4]).unwrap();
        assert_eq!(d.max(), 0.0);
        assert_eq!(momentum(&f, &chart, &ctx, &[0.0; 4]).unwrap(), [0.0; 4]);
    }

    #[test]
    fn formulations_agree_on_generic_fields() {
        let ctx = DynamicsContext { mass: 0.8 };
        for name in crate::geometry::PRESETS {
            let chart = SpacetimeChart::preset(name).unwrap();
            let mut spec = generic();
            if chart.is_spherical() {
                let s = |v: &str| v.replace('x', "r").replace('y', "theta").replace('z', "phi");
                spec.phi = s(&spec.phi);
                spec.beta = s(&spec.beta);
                spec.zeta = s(&spec.zeta);
                spec.frame.rapidities = spec.frame.rapidities.map(|v| s(&v));
                spec.frame.angles = spec.frame.angles.map(|v| s(&v));
                spec.potential = spec.potential.map(|v| s(&v));
            }
            let f = PolarField::new(&spec, &chart).unwrap();
            for x in [[0.3, 2.5, 1.1, 0.4], [-0.7, 3.1, 2.0, 1.9]] {
                let k = Kinematics::new(&chart, &f, &x).unwrap();
                let d = dirac_from(&k, &ctx).unwrap();
                assert!(d.formulation_gap < 1e-10, "{name} {:e}", d.formulation_gap);
                assert!(momentum_identity_residual(&k, &ctx).unwrap() < 1e-10, "{name}");
                let t = energy_from(&k);
                assert!(t.symmetry_residual() < 1e-12, "{name}");
                assert!(t.form_gap() < 1e-10, "{name} {:e}", t.form_gap());
                // nabla.S - 4 m phi^2 sin(beta) = 4 phi^2 (SM . s)
                let sm_s = sum1(|a| d.sm[a] * k.s[a]);
                let phi2 = k.field.phi.value.powi(2);
                assert!(
                    (spin_divergence_residual(&k, &ctx) - 4.0 * phi2 * sm_s).abs() < 1e-10,
                    "{name}"
                );
                assert!(spin_divergence_identity(&k, &ctx).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn vanishing_module_gives_vanishing_energy() {
        let chart = flat();
        let mut spec = generic();
        spec.phi = "0".into();
        let f = PolarField::new(&spec, &chart).unwrap();
        let t = energy_tensor(&f, &chart, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(max_abs2(&t.energy), 0.0);
        assert!(matches!(
            zy_vectors(&f, &chart, &[0.1, 0.2, 0.3, 0.4]),
            Err(Error::SingularSpinor { .. })
        ));
    }
}
