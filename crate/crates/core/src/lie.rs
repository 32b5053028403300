//! Lie derivatives of spinor fields and of their bilinears along Killing
//! fields, the polar decomposition of the spinor Lie derivative and the
//! scalar condition for weak invariance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{basis, c, CMat4, CVec4, I};
use crate::connection::Kinematics;
use crate::error::{Error, Result};
use crate::field::PolarField;
use crate::geometry::{KillingField, KillingPoint, SpacetimeChart};
use crate::jet::{bilinear, Jet};
use crate::tensor::{levi_civita_up, lower, max_abs, max_abs2, sum1, sum2, tensor2, Rank2, Vec4, ETA};

/// Killing residuals above this make the spinor Lie derivative undefined.
pub const KILLING_LIMIT: f64 = 1e-6;

/// Weak invariance is assumed below this bilinear Lie derivative.
pub const WEAK_LIMIT: f64 = 1e-8;

/// A field and a vector field evaluated together at one point.
#[derive(Clone, Debug)]
pub struct LiePoint {
    pub kin: Kinematics,
    pub xi: KillingPoint,
    pub name: String,
}

impl LiePoint {
    /// Evaluates without checking the Killing equation.
    pub fn unchecked(chart: &SpacetimeChart, field: &PolarField, xi: &KillingField, x: &[f64; 4]) -> Result<Self> {
        let kin = Kinematics::new(chart, field, x)?;
        let kp = xi.at(&kin.geo);
        Ok(Self {
            kin,
            xi: kp,
            name: xi.name.clone(),
        })
    }

    pub fn new(chart: &SpacetimeChart, field: &PolarField, xi: &KillingField, x: &[f64; 4]) -> Result<Self> {
        let p = Self::unchecked(chart, field, xi, x)?;
        let residual = p.xi.residual();
        if !(residual <= KILLING_LIMIT) {
            return Err(Error::NotKilling {
                name: xi.name.clone(),
                point: *x,
                residual,
            });
        }
        Ok(p)
    }

    fn psi(&self) -> CVec4 {
        self.kin.field.spinor.value
    }

    /// `(d xi)_{ab}` with frame indices.
    pub fn curl_frame(&self) -> Rank2 {
        let g = &self.kin.geo;
        tensor2(|a, b| sum2(|m, n| g.ei(a, m) * g.ei(b, n) * self.xi.curl[m][n]))
    }

    /// `xi^a` frame components.
    pub fn xi_frame(&self) -> Vec4 {
        let g = &self.kin.geo;
        std::array::from_fn(|a| sum1(|m| g.e(a, m) * self.xi.xi[m]))
    }

    /// `xi^mu nabla_mu psi + 1/4 (d xi)_{mu nu} sigma^{mu nu} psi`.
    pub fn lie_spinor(&self) -> CVec4 {
        let nab = self.kin.nabla_spinor();
        let psi = self.psi();
        let curl = self.curl_frame();
        let mut out = (0..4).fold(CVec4::zeros(), |acc, m| acc + nab[m] * c(self.xi.xi[m]));
        out += sigma_contract(&curl, 0.25) * psi;
        out
    }

    /// Tetrad form: `xi.d psi + 1/2 (L_xi e_k)^alpha sigma_alpha^k psi + i q xi.A psi`.
    pub fn lie_spinor_tetrad(&self) -> CVec4 {
        let g = &self.kin.geo;
        let f = &self.kin.field;
        let psi = self.psi();
        let xi = &self.xi.xi;
        // (L_xi e_k)^alpha = xi^m d_m e_k^alpha - e_k^m d_m xi^alpha
        let le =
            tensor2(|al, k| sum1(|m| xi[m] * g.inverse.grad[m][(al, k)]) - sum1(|m| g.ei(k, m) * self.xi.dxi[m][al]));
        let b = basis();
        let mut gen = CMat4::zeros();
        for al in 0..4 {
            for k in 0..4 {
                for a in 0..4 {
                    // sigma_a^k = eta_aa sigma^{ak}
                    let w = 0.5 * le[al][k] * g.e(a, al) * ETA[a];
                    if w != 0.0 {
                        gen += b.sigma[a][k] * c(w);
                    }
                }
            }
        }
        let xa = sum1(|m| xi[m] * f.potential[m].value);
        let mut out = (0..4).fold(CVec4::zeros(), |acc, m| acc + f.dspinor(m) * c(xi[m]));
        out += gen * psi + psi * (I * f.charge * xa);
        out
    }

    /// `bar psi L_xi gamma^alpha psi` for every coordinate `alpha`.
    pub fn lie_gamma(&self) -> [Complex64; 4] {
        let g = &self.kin.geo;
        let b = basis();
        let psi = self.psi();
        let bar = psi.adjoint() * b.gamma[0];
        let gamma_coord =
            |al: usize| -> CMat4 { (0..4).fold(CMat4::zeros(), |acc, a| acc + b.gamma[a] * c(g.ei(a, al))) };
        // nabla_mu xi^alpha
        let cov_up = tensor2(|m, al| sum1(|n| g.g_inv(al, n) * self.xi.cov[m][n]));
        let spin = sigma_contract(&self.curl_frame(), 0.25);
        std::array::from_fn(|al| {
            let mut op = spin * gamma_coord(al) - gamma_coord(al) * spin;
            for m in 0..4 {
                op -= gamma_coord(m) * c(cov_up[m][al]);
            }
            (bar * op * psi)[(0, 0)]
        })
    }

    /// `bar psi L_xi gamma^alpha psi + 1/2 (bar psi gamma_nu psi)(nabla^alpha xi^nu + nabla^nu xi^alpha)`.
    pub fn lie_gamma_identity(&self) -> f64 {
        let g = &self.kin.geo;
        let lg = self.lie_gamma();
        let phi2 = self.kin.field.phi.value.powi(2);
        // bar psi gamma_nu psi = 2 phi^2 u_nu
        let u_coord = g.covector_to_coords(&lower(&self.kin.u)).map(|v| 2.0 * phi2 * v);
        let sym =
            tensor2(|al, nu| sum2(|m, n| g.g_inv(al, m) * g.g_inv(nu, n) * (self.xi.cov[m][n] + self.xi.cov[n][m])));
        let r: Vec<f64> = (0..4)
            .map(|al| (lg[al] + Complex64::new(0.5 * sum1(|nu| u_coord[nu] * sym[al][nu]), 0.0)).norm())
            .collect();
        r.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Lie derivatives of the bilinears, coordinate components.
    pub fn bilinear_derivatives(&self) -> BilinearLie {
        let g = &self.kin.geo;
        let f = &self.kin.field;
        let b = basis();
        let g0 = b.gamma[0];
        let psi = &f.spinor;
        let form = |gamma: &CMat4, k: Complex64| -> Jet<f64> {
            bilinear(psi, psi, |a, bb| (k * (a.adjoint() * g0 * gamma * bb)[(0, 0)]).re)
        };
        let one = Complex64::new(1.0, 0.0);
        let phi = form(&CMat4::identity(), one);
        let theta = form(&b.pi, I);
        let u: Vec<Jet<f64>> = (0..4).map(|a| form(&b.gamma[a], one)).collect();
        let s: Vec<Jet<f64>> = (0..4).map(|a| form(&(b.gamma[a] * b.pi), one)).collect();
        let m: Vec<Vec<Jet<f64>>> = (0..4)
            .map(|a| (0..4).map(|bb| form(&b.sigma[a][bb], I * 2.0)).collect())
            .collect();
        let xi = &self.xi.xi;
        let dxi = &self.xi.dxi;
        let scalar = |j: &Jet<f64>| sum1(|mu| xi[mu] * j.grad[mu]);
        // frame vector -> coordinate vector jet components
        let vector = |w: &[Jet<f64>]| -> Vec4 {
            let comp = |al: usize| -> Jet<f64> {
                let e = Jet {
                    value: g.ei(0, al),
                    grad: std::array::from_fn(|r| g.inverse.grad[r][(al, 0)]),
                    hess: [[0.0; 4]; 4],
                };
                (1..4).fold(e.mul(&w[0]), |acc, a| {
                    let e = Jet {
                        value: g.ei(a, al),
                        grad: std::array::from_fn(|r| g.inverse.grad[r][(al, a)]),
                        hess: [[0.0; 4]; 4],
                    };
                    &acc + &e.mul(&w[a])
                })
            };
            let cs: Vec<Jet<f64>> = (0..4).map(comp).collect();
            std::array::from_fn(|al| sum1(|mu| xi[mu] * cs[al].grad[mu]) - sum1(|mu| cs[mu].value * dxi[mu][al]))
        };
        let ei_jet = |a: usize, al: usize| Jet {
            value: g.ei(a, al),
            grad: std::array::from_fn(|r| g.inverse.grad[r][(al, a)]),
            hess: [[0.0; 4]; 4],
        };
        let mc: Vec<Vec<Jet<f64>>> = (0..4)
            .map(|al| {
                (0..4)
                    .map(|be| {
                        let mut acc = Jet::constant(0.0);
                        for a in 0..4 {
                            for bb in 0..4 {
                                acc = &acc + &ei_jet(a, al).mul(&ei_jet(bb, be)).mul(&m[a][bb]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let tensor = tensor2(|al, be| {
            sum1(|mu| xi[mu] * mc[al][be].grad[mu])
                - sum1(|mu| mc[mu][be].value * dxi[mu][al])
                - sum1(|mu| mc[al][mu].value * dxi[mu][be])
        });
        BilinearLie {
            theta: scalar(&theta),
            phi: scalar(&phi),
            u: vector(&u),
            s: vector(&s),
            m: tensor,
        }
    }

    /// The same derivatives rebuilt from `L_xi psi`, using `L_xi gamma = 0`.
    pub fn bilinears_of_lie(&self) -> BilinearLie {
        let g = &self.kin.geo;
        let b = basis();
        let psi = self.psi();
        let lpsi = self.lie_spinor();
        let g0 = b.gamma[0];
        let vary = |gamma: &CMat4, k: Complex64| {
            (k * ((lpsi.adjoint() * g0 * gamma * psi)[(0, 0)] + (psi.adjoint() * g0 * gamma * lpsi)[(0, 0)])).re
        };
        let one = Complex64::new(1.0, 0.0);
        let uf: Vec4 = std::array::from_fn(|a| vary(&b.gamma[a], one));
        let sf: Vec4 = std::array::from_fn(|a| vary(&(b.gamma[a] * b.pi), one));
        let mf = tensor2(|a, bb| vary(&b.sigma[a][bb], I * 2.0));
        BilinearLie {
            theta: vary(&b.pi, I),
            phi: vary(&CMat4::identity(), one),
            u: g.vector_to_coords(&uf),
            s: g.vector_to_coords(&sf),
            m: tensor2(|al, be| sum2(|a, bb| g.ei(a, al) * g.ei(bb, be) * mf[a][bb])),
        }
    }

    /// `u^mu`, `s^mu` coordinate components with their Lie derivatives.
    fn coordinate_frame_lie(&self) -> (Vec4, Vec4, Vec4, Vec4) {
        let g = &self.kin.geo;
        let (du, ds) = (self.kin.field.du(), self.kin.field.ds());
        let (u, s) = (&self.kin.u, &self.kin.s);
        let xi = &self.xi.xi;
        let lift = |w: &Vec4, dw: &[Vec4; 4]| -> (Vec4, Vec4) {
            let val: Vec4 = std::array::from_fn(|al| sum1(|a| g.ei(a, al) * w[a]));
            let grad = tensor2(|m, al| sum1(|a| g.inverse.grad[m][(al, a)] * w[a] + g.ei(a, al) * dw[m][a]));
            let lie = std::array::from_fn(|al| sum1(|m| xi[m] * grad[m][al]) - sum1(|m| val[m] * self.xi.dxi[m][al]));
            (val, lie)
        };
        let (uc, lu) = lift(u, &du);
        let (sc, ls) = lift(s, &ds);
        (uc, lu, sc, ls)
    }

    /// `omega^{ab}` (frame) from projecting `1/2 (d xi)` orthogonally to `u`, `s`.
    pub fn omega(&self) -> Rank2 {
        let (u, s) = (&self.kin.u, &self.kin.s);
        let proj = tensor2(|a, b| {
            let eta = if a == b { ETA[a] } else { 0.0 };
            eta - u[a] * u[b] + s[a] * s[b]
        });
        let curl = self.curl_frame();
        tensor2(|a, r| 0.5 * sum2(|m, n| curl[m][n] * proj[a][m] * proj[r][n]))
    }

    /// `xi . (P - V)`
    pub fn xi_k(&self) -> f64 {
        let x = &self.xi.xi;
        sum1(|m| x[m] * (self.kin.conn.p[m] - self.kin.conn.v[m]))
    }

    /// `[1/2 omega_{ab} sigma^{ab} - i xi.(P - V)] psi`.
    pub fn bracket(&self) -> CVec4 {
        let w = self.omega();
        let w_low = tensor2(|a, b| ETA[a] * ETA[b] * w[a][b]);
        (sigma_contract(&w_low, 0.5) - CMat4::identity() * (I * self.xi_k())) * self.psi()
    }

    /// Right side of the polar decomposition of `L_xi psi`.
    pub fn polar_decomposition(&self) -> CVec4 {
        let g = &self.kin.geo;
        let f = &self.kin.field;
        let psi = self.psi();
        let xi = &self.xi.xi;
        let lb = sum1(|m| xi[m] * f.dbeta()[m]);
        let ll = sum1(|m| xi[m] * f.dlnphi()[m]);
        let (_, lu, _, ls) = self.coordinate_frame_lie();
        let to_frame = |v: &Vec4| -> Vec4 { std::array::from_fn(|a| sum1(|m| g.e(a, m) * v[m])) };
        let (lu, ls) = (to_frame(&lu), to_frame(&ls));
        let (u, s) = (&self.kin.u, &self.kin.s);
        let sl = lower(s);
        let s_lu = sum1(|a| sl[a] * lu[a]);
        // sigma_{ab} X^a Y^b
        let pair = |x: &Vec4, y: &Vec4| sigma_contract(&tensor2(|a, b| ETA[a] * ETA[b] * x[a] * y[b]), 1.0);
        let b = basis();
        let op =
            b.pi * (-0.5 * I * lb) + CMat4::identity() * c(ll) - pair(u, &lu) - pair(&ls, s) - pair(u, s) * c(s_lu);
        op * psi + self.bracket()
    }

    /// `1/4 (d xi)_{ab} s_c u_d eps^{abcd} - 2 xi.(P - V)`.
    pub fn cond_scalar(&self) -> f64 {
        let curl = self.curl_frame();
        let (ul, sl) = (lower(&self.kin.u), lower(&self.kin.s));
        let lhs = 0.25 * sum2(|a, b| curl[a][b] * sum2(|cc, d| levi_civita_up(a, b, cc, d) * sl[cc] * ul[d]));
        lhs - 2.0 * self.xi_k()
    }

    pub fn report(&self) -> LieReport {
        let psi = self.psi();
        let norm = psi.norm();
        let scale = 1f64.max(norm);
        let strong = self.lie_spinor();
        let weak = self.bilinear_derivatives().residuals();
        let consistency = self.bilinear_derivatives().distance(&self.bilinears_of_lie());
        let lg = self.lie_gamma();
        LieReport {
            point: self.kin.geo.x,
            field: self.name.clone(),
            strong_residual: strong.norm(),
            weak_residuals: weak,
            cond_residual: self.cond_scalar(),
            lie_gamma_residual: lg.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            lie_gamma_identity: self.lie_gamma_identity(),
            form_agreement: (strong - self.lie_spinor_tetrad()).norm() / scale,
            bilinear_consistency: consistency,
            final_equation: (strong - self.polar_decomposition()).norm() / scale,
            bracket_norm: if norm > 0.0 { self.bracket().norm() / norm } else { 0.0 },
        }
    }
}

/// `k X_{ab} sigma^{ab}` for a lower-index frame tensor `X`.
fn sigma_contract(x: &Rank2, k: f64) -> CMat4 {
    let b = basis();
    let mut out = CMat4::zeros();
    for a in 0..4 {
        for bb in 0..4 {
            if x[a][bb] != 0.0 {
                out += b.sigma[a][bb] * c(k * x[a][bb]);
            }
        }
    }
    out
}

/// Lie derivatives of the bilinear tensors, coordinate components.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BilinearLie {
    pub theta: f64,
    pub phi: f64,
    pub u: Vec4,
    pub s: Vec4,
    pub m: Rank2,
}

impl BilinearLie {
    pub fn residuals(&self) -> WeakResiduals {
        WeakResiduals {
            theta: self.theta.abs(),
            phi: self.phi.abs(),
            u: max_abs(self.u),
            s: max_abs(self.s),
            m: max_abs2(&self.m),
        }
    }

    pub fn distance(&self, o: &BilinearLie) -> f64 {
        [
            (self.theta - o.theta).abs(),
            (self.phi - o.phi).abs(),
            max_abs(std::array::from_fn::<f64, 4, _>(|a| self.u[a] - o.u[a])),
            max_abs(std::array::from_fn::<f64, 4, _>(|a| self.s[a] - o.s[a])),
            max_abs2(&tensor2(|a, b| self.m[a][b] - o.m[a][b])),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeakResiduals {
    pub theta: f64,
    pub phi: f64,
    pub u: f64,
    pub s: f64,
    pub m: f64,
}

impl WeakResiduals {
    pub fn max(&self) -> f64 {
        [self.theta, self.phi, self.u, self.s, self.m]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LieReport {
    pub point: [f64; 4],
    pub field: String,
    /// `|L_xi psi|`
    pub strong_residual: f64,
    pub weak_residuals: WeakResiduals,
    /// The scalar condition; zero exactly when the bracket annihilates `psi`.
    pub cond_residual: f64,
    /// `|bar psi L_xi gamma psi|`
    pub lie_gamma_residual: f64,
    pub lie_gamma_identity: f64,
    /// Tetrad form against covariant form, relative to `max(1, |psi|)`.
    pub form_agreement: f64,
    /// Bilinear Lie derivatives against the ones rebuilt from `L_xi psi`.
    pub bilinear_consistency: f64,
    /// Polar decomposition of `L_xi psi` against `L_xi psi`.
    pub final_equation: f64,
    /// `|bracket psi| / |psi|`
    pub bracket_norm: f64,
}

pub fn lie_spinor(field: &PolarField, chart: &SpacetimeChart, xi: &KillingField, x: &[f64; 4]) -> Result<CVec4> {
    Ok(LiePoint::new(chart, field, xi, x)?.lie_spinor())
}

pub fn lie_bilinears(
    field: &PolarField,
    chart: &SpacetimeChart,
    xi: &KillingField,
    x: &[f64; 4],
) -> Result<BilinearLie> {
    Ok(LiePoint::new(chart, field, xi, x)?.bilinear_derivatives())
}

/// `|bar psi L_xi gamma^alpha psi|`; defined for any vector field.
pub fn lie_gamma_residual(field: &PolarField, chart: &SpacetimeChart, xi: &KillingField, x: &[f64; 4]) -> Result<f64> {
    let p = LiePoint::unchecked(chart, field, xi, x)?;
    Ok(p.lie_gamma().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

pub fn polar_lie_decomposition(
    field: &PolarField,
    chart: &SpacetimeChart,
    xi: &KillingField,
    x: &[f64; 4],
) -> Result<(CVec4, f64)> {
    let p = LiePoint::new(chart, field, xi, x)?;
    require_regular(&p)?;
    let rhs = p.polar_decomposition();
    let r = (p.lie_spinor() - rhs).norm() / 1f64.max(p.psi().norm());
    Ok((rhs, r))
}

fn require_regular(p: &LiePoint) -> Result<()> {
    let phi = p.kin.field.phi.value;
    if !(phi.abs() > 0.0) {
        return Err(Error::SingularSpinor {
            invariant: 0.0,
            threshold: 0.0,
        });
    }
    Ok(())
}

pub fn cond_scalar(field: &PolarField, chart: &SpacetimeChart, xi: &KillingField, x: &[f64; 4]) -> Result<f64> {
    let p = LiePoint::unchecked(chart, field, xi, x)?;
    require_regular(&p)?;
    Ok(p.cond_scalar())
}

/// Numerical check that the bracket annihilates `psi` exactly when the
/// scalar condition holds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub point: [f64; 4],
    /// `|bracket psi| / |psi|`
    pub bracket_norm: f64,
    pub cond: f64,
    /// `bracket_norm / |cond|`; `None` when `cond` vanishes.
    pub slope: Option<f64>,
    /// Slope in units of the spinor representation factor `1/2`.
    pub normalized_slope: Option<f64>,
    pub omega: Rank2,
}

pub fn equivalence_check(
    field: &PolarField,
    chart: &SpacetimeChart,
    xi: &KillingField,
    x: &[f64; 4],
) -> Result<Equivalence> {
    let p = LiePoint::new(chart, field, xi, x)?;
    require_regular(&p)?;
    let weak = p.bilinear_derivatives().residuals().max();
    if !(weak <= WEAK_LIMIT) {
        return Err(Error::NotWeaklyInvariant {
            name: xi.name.clone(),
            residual: weak,
        });
    }
    Ok(equivalence_at(&p))
}

pub fn equivalence_at(p: &LiePoint) -> Equivalence {
    let cond = p.cond_scalar();
    let bracket_norm = p.bracket().norm() / p.psi().norm();
    let slope = (cond != 0.0).then(|| bracket_norm / cond.abs());
    Equivalence {
        point: p.kin.geo.x,
        bracket_norm,
        cond,
        slope,
        normalized_slope: slope.map(|s| 2.0 * s),
        omega: p.omega(),
    }
}

/// Least-squares slope through the origin and the extreme ratios of
/// `bracket_norm / |cond|` over a set of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    pub slope: f64,
    pub normalized_slope: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub points: usize,
}

pub fn slope_summary(checks: &[Equivalence]) -> Option<SlopeSummary> {
    let used: Vec<_> = checks.iter().filter(|e| e.cond.abs() > 1e-12).collect();
    if used.is_empty() {
        return None;
    }
    let sxy: f64 = used.iter().map(|e| e.cond.abs() * e.bracket_norm).sum();
    let sxx: f64 = used.iter().map(|e| e.cond * e.cond).sum();
    let ratios: Vec<f64> = used.iter().map(|e| e.bracket_norm / e.cond.abs()).collect();
    let slope = sxy / sxx;
    Some(SlopeSummary {
        slope,
        normalized_slope: 2.0 * slope,
        min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        points: used.len(),
    })
}
