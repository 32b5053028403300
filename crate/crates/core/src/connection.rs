//! Tensorial connections of a polar field and the identities relating them
//! to the covariant derivatives of velocity, spin and spinor.

use serde::{Deserialize, Serialize};

use crate::clifford::{basis, c, CMat4, CVec4, I};
use crate::error::Result;
use crate::field::{FieldPoint, PolarField};
use crate::geometry::{PointGeometry, SpacetimeChart};
use crate::tensor::{
    levi_civita, levi_civita_up, lower, max_abs, max_abs2, max_abs3, sum1, sum2, tensor2, tensor3, tensor4, Rank2,
    Rank3, Rank4, Vec4, ETA,
};

/// `F_{ab mu}` (frame indices lowered), `P_mu` and `V_mu` at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorialConnection {
    pub f: Rank3,
    pub p: Vec4,
    pub v: Vec4,
}

impl TensorialConnection {
    /// `F^{ab}_mu`
    pub fn f_up(&self) -> Rank3 {
        tensor3(|a, b, m| ETA[a] * ETA[b] * self.f[a][b][m])
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        max_abs3(&tensor3(|a, b, m| self.f[a][b][m] + self.f[b][a][m]))
    }
}

/// `V_mu = 1/4 F_{ij mu} eps^{ijcd} u_c s_d` for frame-lower `F` and
/// frame-upper `u`, `s`.
pub fn v_vector(f: &Rank3, u: &Vec4, s: &Vec4) -> Vec4 {
    let (ul, sl) = (lower(u), lower(s));
    std::array::from_fn(|m| 0.25 * sum2(|i, j| f[i][j][m] * sum2(|c, d| levi_civita_up(i, j, c, d) * ul[c] * sl[d])))
}

/// Everything derived from a field and the geometry at one point.
#[derive(Clone, Debug)]
pub struct Kinematics {
    pub geo: PointGeometry,
    pub field: FieldPoint,
    pub conn: TensorialConnection,
    /// Goldstone connection `Omega^{ij}_mu`.
    pub omega: Rank3,
    /// `d_r F_{ij mu}` as `[r][i][j][mu]`.
    pub f_grad: Rank4,
    /// `d_r P_mu` as `[r][mu]`.
    pub p_grad: Rank2,
    pub u: Vec4,
    pub s: Vec4,
    /// `nabla_mu u_i` as `[mu][i]`.
    pub nabla_u: Rank2,
    pub nabla_s: Rank2,
}

impl Kinematics {
    pub fn new(chart: &SpacetimeChart, field: &PolarField, x: &[f64; 4]) -> Result<Self> {
        let geo = chart.geometry(x)?;
        Ok(Self::from_parts(geo, field.at(x)))
    }

    pub fn from_parts(geo: PointGeometry, field: FieldPoint) -> Self {
        let mt = &field.frame;
        // Omega^{ij}_mu = -sum_k eta^kk M^j_k d_mu M^i_k
        let omega = tensor3(|i, j, m| -sum1(|k| ETA[k] * mt.value[(j, k)] * mt.grad[m][(i, k)]));
        let f_up = tensor3(|i, j, m| omega[i][j][m] - geo.c_up(i, j, m));
        let f = tensor3(|i, j, m| ETA[i] * ETA[j] * f_up[i][j][m]);
        let f_grad = tensor4(|r, i, j, m| {
            let d_omega = -sum1(|k| {
                ETA[k] * (mt.grad[r][(j, k)] * mt.grad[m][(i, k)] + mt.value[(j, k)] * mt.hess[r][m][(i, k)])
            });
            let d_c = geo.connection_grad[r][i][j][m] * ETA[j];
            ETA[i] * ETA[j] * (d_omega - d_c)
        });
        let q = field.charge;
        let p = field.gauge_momentum();
        let p_grad = tensor2(|r, m| q * (field.zeta.hess[r][m] - field.potential[m].grad[r]));
        let u = field.u();
        let s = field.s();
        let v = v_vector(&f, &u, &s);
        let (du, ds) = (field.du(), field.ds());
        let nabla = |d: &[Vec4; 4], w: &Vec4| tensor2(|m, i| ETA[i] * d[m][i] + sum1(|b| geo.c_low(i, b, m) * w[b]));
        let nabla_u = nabla(&du, &u);
        let nabla_s = nabla(&ds, &s);
        Self {
            conn: TensorialConnection { f, p, v },
            omega,
            f_grad,
            p_grad,
            u,
            s,
            nabla_u,
            nabla_s,
            geo,
            field,
        }
    }

    pub fn u_lower(&self) -> Vec4 {
        lower(&self.u)
    }

    pub fn s_lower(&self) -> Vec4 {
        lower(&self.s)
    }

    /// Covariant derivative of the spinor, `[mu]`.
    pub fn nabla_spinor(&self) -> [CVec4; 4] {
        let b = basis();
        let psi = self.field.spinor.value;
        let a = self.field.potential_value();
        std::array::from_fn(|m| {
            let mut gen = CMat4::zeros();
            for i in 0..4 {
                for j in 0..4 {
                    let k = self.geo.c_low(i, j, m);
                    if k != 0.0 {
                        gen += b.sigma[i][j] * c(0.5 * k);
                    }
                }
            }
            self.field.dspinor(m) + gen * psi + psi * (I * self.field.charge * a[m])
        })
    }

    /// Right side of the polar decomposition of the spinor derivative:
    /// `(-i/2 d beta pi + d ln phi - i P - 1/2 F_{ij} sigma^{ij}) psi`.
    pub fn polar_spinor_derivative(&self) -> [CVec4; 4] {
        let b = basis();
        let psi = self.field.spinor.value;
        let (db, dl) = (self.field.dbeta(), self.field.dlnphi());
        let p = &self.conn.p;
        std::array::from_fn(|m| {
            let mut op = b.pi * (-0.5 * I * db[m]) + CMat4::identity() * c(dl[m]) - CMat4::identity() * (I * p[m]);
            for i in 0..4 {
                for j in 0..4 {
                    op -= b.sigma[i][j] * c(0.5 * self.conn.f[i][j][m]);
                }
            }
            op * psi
        })
    }

    /// `F_{ab mu}` rebuilt from the covariant derivatives of `u`, `s` and `V`.
    pub fn reconstructed_f(&self) -> Rank3 {
        let (u, s) = (&self.u, &self.s);
        let (ul, sl) = (self.u_lower(), self.s_lower());
        let nu = &self.nabla_u;
        let ns = &self.nabla_s;
        let v = &self.conn.v;
        tensor3(|a, b, m| {
            let uks = sum1(|k| nu[m][k] * s[k]);
            ul[a] * nu[m][b] - ul[b] * nu[m][a] + sl[b] * ns[m][a] - sl[a] * ns[m][b]
                + (ul[a] * sl[b] - ul[b] * sl[a]) * uks
                + 2.0 * sum2(|i, j| levi_civita(a, b, i, j) * u[i] * s[j]) * v[m]
        })
    }

    /// Lorentz-covariant derivative `D_r F_{ab mu}` (frame indices only).
    fn f_covariant_grad(&self) -> Rank4 {
        let f = &self.conn.f;
        let cc = &self.geo.connection;
        tensor4(|r, a, b, m| self.f_grad[r][a][b][m] - sum1(|k| cc[k][a][r] * f[k][b][m] + cc[k][b][r] * f[a][k][m]))
    }

    pub fn transport_residuals(&self) -> TransportResiduals {
        let f = &self.conn.f;
        let (u, s) = (&self.u, &self.s);
        let du = tensor2(|m, i| self.nabla_u[m][i] - sum1(|j| f[j][i][m] * u[j]));
        let ds = tensor2(|m, i| self.nabla_s[m][i] - sum1(|j| f[j][i][m] * s[j]));
        let rec = self.reconstructed_f();
        let rfull = max_abs3(&tensor3(|a, b, m| rec[a][b][m] - f[a][b][m]));
        let mt = &self.field.frame;
        let goldstone = |col: usize| {
            max_abs2(&tensor2(|m, a| {
                mt.grad[m][(a, col)] + sum1(|b| self.omega[a][b][m] * ETA[b] * mt.value[(b, col)])
            }))
        };
        let lhs = self.nabla_spinor();
        let rhs = self.polar_spinor_derivative();
        let scale = 1f64.max(self.field.spinor.value.norm());
        let decspinder = (0..4).map(|m| (lhs[m] - rhs[m]).norm()).fold(0.0, f64::max) / scale;
        // in the frame where u = e_0 and s = e_3, 2 V_mu = F_{12 mu}
        let lam = &self.field.frame.value;
        let rest_frame_v = max_abs(std::array::from_fn::<f64, 4, _>(|m| {
            let f12 = sum2(|i, j| f[i][j][m] * lam[(i, 1)] * lam[(j, 2)]);
            0.5 * f12 - self.conn.v[m]
        }));
        TransportResiduals {
            du: max_abs2(&du),
            ds: max_abs2(&ds),
            rfull,
            goldstone_u: goldstone(0),
            goldstone_s: goldstone(3),
            decspinder,
            f_antisymmetry: self.conn.antisymmetry_residual(),
            rest_frame_v,
        }
    }

    /// Residuals of the Riemann reconstruction from `F` and of the gauge
    /// field strength from `P`.
    pub fn curvature_residuals(&self) -> CurvatureResiduals {
        let f = &self.conn.f;
        let df = self.f_covariant_grad();
        let r = self.geo.riemann();
        let riemann = max_abs(std::array::from_fn::<f64, 256, _>(|idx| {
            let (a, b, m, n) = (idx / 64, (idx / 16) % 4, (idx / 4) % 4, idx % 4);
            let quad = sum1(|k| ETA[k] * (f[a][k][m] * f[k][b][n] - f[a][k][n] * f[k][b][m]));
            ETA[a] * r[a][b][m][n] + df[m][a][b][n] - df[n][a][b][m] + quad
        }));
        let q = self.field.charge;
        let pot = &self.field.potential;
        let faraday = max_abs2(&tensor2(|m, n| {
            let field_strength = pot[n].grad[m] - pot[m].grad[n];
            q * field_strength + (self.p_grad[m][n] - self.p_grad[n][m])
        }));
        CurvatureResiduals { riemann, faraday }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransportResiduals {
    /// `nabla_mu u_i - F_{ji mu} u^j`
    pub du: f64,
    /// `nabla_mu s_i - F_{ji mu} s^j`
    pub ds: f64,
    /// `F` rebuilt from `nabla u`, `nabla s` and `V` against `F`.
    pub rfull: f64,
    /// Goldstone transport of `u` and `s`.
    pub goldstone_u: f64,
    pub goldstone_s: f64,
    /// Spinor covariant derivative against its polar decomposition.
    pub decspinder: f64,
    pub f_antisymmetry: f64,
    /// `2 V_mu` against `F_{12 mu}` in the rest frame.
    pub rest_frame_v: f64,
}

impl TransportResiduals {
    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("transport_du", self.du),
            ("transport_ds", self.ds),
            ("rfull", self.rfull),
            ("goldstone_u", self.goldstone_u),
            ("goldstone_s", self.goldstone_s),
            ("decspinder", self.decspinder),
            ("f_antisymmetry", self.f_antisymmetry),
            ("rest_frame_v", self.rest_frame_v),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvatureResiduals {
    pub riemann: f64,
    pub faraday: f64,
}

pub fn tensorial_f(field: &PolarField, chart: &SpacetimeChart, x: &[f64; 4]) -> Result<Rank3> {
    Ok(Kinematics::new(chart, field, x)?.conn.f)
}

pub fn tensorial_p(field: &PolarField, chart: &SpacetimeChart, x: &[f64; 4]) -> Result<Vec4> {
    chart.check_point(x)?;
    Ok(field.at(x).gauge_momentum())
}

pub fn transport_residuals(field: &PolarField, chart: &SpacetimeChart, x: &[f64; 4]) -> Result<TransportResiduals> {
    Ok(Kinematics::new(chart, field, x)?.transport_residuals())
}

pub fn curvature_residuals(field: &PolarField, chart: &SpacetimeChart, x: &[f64; 4]) -> Result<CurvatureResiduals> {
    Ok(Kinematics::new(chart, field, x)?.curvature_residuals())
}
