//! The 4-dimensional Clifford algebra in the chiral representation.
//!
//! `gamma^0` has off-diagonal identity blocks, `gamma^k` off-diagonal
//! `(+sigma_k, -sigma_k)` Pauli blocks, and `pi = diag(-1, -1, 1, 1)`. The
//! sign of `pi` is the one compatible with `2i sigma_ab = eps_abcd pi sigma^cd`
//! for `eps_0123 = +1`; with it the rest spinor `(1, 0, 1, 0)` has spin along
//! `+z`.

use std::sync::OnceLock;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::jet::expm;
use crate::tensor::{levi_civita, ETA};

pub type CMat4 = Matrix4<Complex64>;
pub type CVec4 = Vector4<Complex64>;

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cmat(rows: [[Complex64; 4]; 4]) -> CMat4 {
    CMat4::from_fn(|i, j| rows[i][j])
}

#[derive(Clone, Debug)]
pub struct GammaBasis {
    pub gamma: [CMat4; 4],
    pub pi: CMat4,
    pub sigma: [[CMat4; 4]; 4],
}

impl GammaBasis {
    pub fn chiral() -> Self {
        let (o, l, i) = (c(0.0), c(1.0), I);
        let g0 = cmat([[o, o, l, o], [o, o, o, l], [l, o, o, o], [o, l, o, o]]);
        let g1 = cmat([[o, o, o, l], [o, o, l, o], [o, -l, o, o], [-l, o, o, o]]);
        let g2 = cmat([[o, o, o, -i], [o, o, i, o], [o, i, o, o], [-i, o, o, o]]);
        let g3 = cmat([[o, o, l, o], [o, o, o, -l], [-l, o, o, o], [o, l, o, o]]);
        let pi = CMat4::from_diagonal(&Vector4::new(-l, -l, l, l));
        Self::from_parts([g0, g1, g2, g3], pi)
    }

    /// Builds a basis from arbitrary gamma and pi matrices; the generators are
    /// recomputed as `sigma^ab = [gamma^a, gamma^b] / 4`.
    pub fn from_parts(gamma: [CMat4; 4], pi: CMat4) -> Self {
        let sigma =
            std::array::from_fn(|a| std::array::from_fn(|b| (gamma[a] * gamma[b] - gamma[b] * gamma[a]) * c(0.25)));
        Self { gamma, pi, sigma }
    }

    pub fn gamma_lower(&self, a: usize) -> CMat4 {
        self.gamma[a] * c(ETA[a])
    }

    pub fn sigma_lower(&self, a: usize, b: usize) -> CMat4 {
        self.sigma[a][b] * c(ETA[a] * ETA[b])
    }

    /// `1/2 omega_ab sigma^ab` for an antisymmetric `omega` with lower indices.
    pub fn spin_generator(&self, omega: &[[f64; 4]; 4]) -> CMat4 {
        let mut g = CMat4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                if omega[a][b] != 0.0 {
                    g += self.sigma[a][b] * c(0.5 * omega[a][b]);
                }
            }
        }
        g
    }

    pub fn check_identities(&self) -> AlgebraResiduals {
        check_algebra_identities(self)
    }
}

/// The shared chiral basis.
pub fn basis() -> &'static GammaBasis {
    static BASIS: OnceLock<GammaBasis> = OnceLock::new();
    BASIS.get_or_init(GammaBasis::chiral)
}

pub fn build_gamma_basis() -> GammaBasis {
    GammaBasis::chiral()
}

/// Maximum absolute residual of each representation identity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgebraResiduals {
    /// `{gamma^a, gamma^b} - 2 eta^ab`
    pub anticommutator: f64,
    /// `sigma^ab - [gamma^a, gamma^b] / 4`
    pub sigma_definition: f64,
    /// `2i sigma_ab - eps_abcd pi sigma^cd`
    pub duality: f64,
    /// `[sigma^nr, gamma^a] - (eta^ar gamma^n - eta^an gamma^r)`
    pub sigma_gamma_commutator: f64,
    /// `2{sigma_ab, sigma_cd} - (eta_ad eta_bc - eta_ac eta_bd) - i eps_abcd pi`
    pub sigma_anticommutator: f64,
    /// `gamma_s [gamma_i, gamma_j] gamma^s`
    pub four_dim_contraction: f64,
}

impl AlgebraResiduals {
    pub fn max(&self) -> f64 {
        [
            self.anticommutator,
            self.sigma_definition,
            self.duality,
            self.sigma_gamma_commutator,
            self.sigma_anticommutator,
            self.four_dim_contraction,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("anticommutator", self.anticommutator),
            ("sigma_definition", self.sigma_definition),
            ("duality", self.duality),
            ("sigma_gamma_commutator", self.sigma_gamma_commutator),
            ("sigma_anticommutator", self.sigma_anticommutator),
            ("four_dim_contraction", self.four_dim_contraction),
        ]
    }
}

fn max_entry(m: &CMat4) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn check_algebra_identities(basis: &GammaBasis) -> AlgebraResiduals {
    let g = &basis.gamma;
    let id = CMat4::identity();
    let mut r = AlgebraResiduals::default();
    for a in 0..4 {
        for b in 0..4 {
            let eta_ab = if a == b { ETA[a] } else { 0.0 };
            let anti = g[a] * g[b] + g[b] * g[a] - id * c(2.0 * eta_ab);
            r.anticommutator = r.anticommutator.max(max_entry(&anti));

            let def = basis.sigma[a][b] - (g[a] * g[b] - g[b] * g[a]) * c(0.25);
            r.sigma_definition = r.sigma_definition.max(max_entry(&def));

            let mut dual = basis.sigma_lower(a, b) * c(2.0) * I;
            for cc in 0..4 {
                for d in 0..4 {
                    let e = levi_civita(a, b, cc, d);
                    if e != 0.0 {
                        dual -= basis.pi * basis.sigma[cc][d] * c(e);
                    }
                }
            }
            r.duality = r.duality.max(max_entry(&dual));

            for al in 0..4 {
                let s = &basis.sigma[a][b];
                let comm = s * g[al] - g[al] * s;
                let eta_ar = if al == b { ETA[al] } else { 0.0 };
                let eta_an = if al == a { ETA[al] } else { 0.0 };
                let rhs = g[a] * c(eta_ar) - g[b] * c(eta_an);
                r.sigma_gamma_commutator = r.sigma_gamma_commutator.max(max_entry(&(comm - rhs)));
            }

            for cc in 0..4 {
                for d in 0..4 {
                    let (sab, scd) = (basis.sigma_lower(a, b), basis.sigma_lower(cc, d));
                    let lhs = (sab * scd + scd * sab) * c(2.0);
                    let e = |x: usize, y: usize| if x == y { ETA[x] } else { 0.0 };
                    let rhs =
                        id * c(e(a, d) * e(b, cc) - e(a, cc) * e(b, d)) + basis.pi * I * c(levi_civita(a, b, cc, d));
                    r.sigma_anticommutator = r.sigma_anticommutator.max(max_entry(&(lhs - rhs)));
                }
            }

            let mut contraction = CMat4::zeros();
            let comm = g[a] * g[b] - g[b] * g[a];
            for s in 0..4 {
                contraction += basis.gamma_lower(s) * comm * g[s];
            }
            r.four_dim_contraction = r.four_dim_contraction.max(max_entry(&contraction));
        }
    }
    r
}

/// Identifier of the tetrad a spinor's components refer to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameId(pub u64);

impl FrameId {
    /// Stable identifier derived from a chart name (FNV-1a).
    pub fn from_name(name: &str) -> Self {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in name.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        FrameId(h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor {
    pub components: CVec4,
    pub frame: FrameId,
}

impl Spinor {
    pub fn new(components: CVec4) -> Self {
        Self {
            components,
            frame: FrameId::default(),
        }
    }

    pub fn from_array(c: [Complex64; 4]) -> Self {
        Self::new(CVec4::from(c))
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Self::new(CVec4::from_fn(|i, _| Complex64::new(c[i], 0.0)))
    }

    /// The rest spinor with spin along the third axis, `(1, 0, 1, 0)`.
    pub fn rest() -> Self {
        Self::from_real([1.0, 0.0, 1.0, 0.0])
    }

    pub fn in_frame(mut self, frame: FrameId) -> Self {
        self.frame = frame;
        self
    }

    /// Dirac adjoint `psi^dagger gamma^0` as a row.
    pub fn adjoint(&self) -> nalgebra::RowVector4<Complex64> {
        self.components.adjoint() * basis().gamma[0]
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn apply(&self, m: &CMat4) -> Spinor {
        Spinor {
            components: m * self.components,
            frame: self.frame,
        }
    }

    pub fn scale(&self, k: Complex64) -> Spinor {
        Spinor {
            components: self.components * k,
            frame: self.frame,
        }
    }
}

/// A spinor transformation together with its real Lorentz image.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinGroupElement {
    pub spin: CMat4,
    pub lorentz: Matrix4<f64>,
    pub phase: f64,
}

impl SpinGroupElement {
    pub fn identity() -> Self {
        Self {
            spin: CMat4::identity(),
            lorentz: Matrix4::identity(),
            phase: 0.0,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            spin: self.spin * other.spin,
            lorentz: self.lorentz * other.lorentz,
            phase: self.phase + other.phase,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            spin: self.spin.try_inverse().expect("spin-group elements are invertible"),
            lorentz: self.lorentz.try_inverse().expect("Lorentz matrices are invertible"),
            phase: -self.phase,
        }
    }

    /// Max residual of `S^-1 gamma^a S - Lambda^a_b gamma^b`.
    pub fn representation_residual(&self) -> f64 {
        representation_residual(&self.spin, &self.lorentz)
    }

    /// Max residual of `Lambda^T eta Lambda - eta`.
    pub fn orthogonality_residual(&self) -> f64 {
        lorentz_residual(&self.lorentz)
    }
}

pub fn representation_residual(spin: &CMat4, lorentz: &Matrix4<f64>) -> f64 {
    let Some(inv) = spin.try_inverse() else {
        return f64::INFINITY;
    };
    let g = &basis().gamma;
    (0..4)
        .map(|a| {
            let mut m = inv * g[a] * spin;
            for b in 0..4 {
                m -= g[b] * c(lorentz[(a, b)]);
            }
            max_entry(&m)
        })
        .fold(0.0, f64::max)
}

pub fn lorentz_residual(l: &Matrix4<f64>) -> f64 {
    let eta = crate::tensor::eta_matrix();
    (l.transpose() * eta * l - eta).amax()
}

/// Antisymmetric `omega_ab` (lower indices) from boost rapidities and
/// rotation angles: `omega_0k = rapidity_k`, `omega_ij = eps_ijk angle_k`.
pub fn generator_parameters(rapidities: [f64; 3], angles: [f64; 3]) -> [[f64; 4]; 4] {
    let mut w = [[0.0; 4]; 4];
    for k in 0..3 {
        w[0][k + 1] = rapidities[k];
        w[k + 1][0] = -rapidities[k];
    }
    let (a1, a2, a3) = (angles[0], angles[1], angles[2]);
    w[1][2] = a3;
    w[2][1] = -a3;
    w[2][3] = a1;
    w[3][2] = -a1;
    w[3][1] = a2;
    w[1][3] = -a2;
    w
}

/// Real Lorentz generator `(omega)^a_b = eta^aa omega_ab`.
pub fn lorentz_generator(omega: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|a, b| ETA[a] * omega[a][b])
}

/// `S = exp(1/2 omega_ab sigma^ab) e^{i q phase}` and the matching real
/// Lorentz transformation `Lambda = exp(omega)`.
pub fn exp_spin(rapidities: [f64; 3], angles: [f64; 3], phase: f64, charge: f64) -> SpinGroupElement {
    let omega = generator_parameters(rapidities, angles);
    let spin = expm(&basis().spin_generator(&omega)) * Complex64::from_polar(1.0, charge * phase);
    let lorentz = expm(&lorentz_generator(&omega));
    SpinGroupElement {
        spin,
        lorentz,
        phase: charge * phase,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn chiral_basis_satisfies_all_identities() {
        let r = build_gamma_basis().check_identities();
        for (name, v) in r.named() {
            assert!(v < 1e-14, "{name}: {v:e}");
        }
    }

    #[test]
    fn gamma_squares() {
        let b = build_gamma_basis();
        let id = CMat4::identity();
        assert!(max_entry(&(b.gamma[0] * b.gamma[0] - id)) == 0.0);
        assert!(max_entry(&(b.gamma[1] * b.gamma[1] + id)) == 0.0);
        assert!(max_entry(&(b.pi * b.pi - id)) == 0.0);
        for a in 0..4 {
            assert!(max_entry(&(b.pi * b.gamma[a] + b.gamma[a] * b.pi)) == 0.0);
        }
    }

    #[test]
    fn scaled_gamma_breaks_anticommutator_by_six() {
        let b = build_gamma_basis();
        let mut g = b.gamma;
        g[1] *= c(2.0);
        let broken = GammaBasis::from_parts(g, b.pi);
        let r = broken.check_identities();
        assert!((r.anticommutator - 6.0).abs() < 1e-14, "{}", r.anticommutator);
    }

    #[test]
    fn identity_pi_breaks_duality() {
        let b = build_gamma_basis();
        let broken = GammaBasis::from_parts(b.gamma, CMat4::identity());
        assert!(broken.check_identities().duality > 1.0);
    }

    #[test]
    fn zero_parameters_give_identity() {
        let s = exp_spin([0.0; 3], [0.0; 3], 0.0, 0.0);
        assert!((s.spin - CMat4::identity()).camax() < 1e-15);
        assert!((s.lorentz - Matrix4::identity()).amax() < 1e-15);
    }

    #[test]
    fn full_turn_is_minus_identity_on_spinors() {
        let s = exp_spin([0.0; 3], [0.0, 0.0, 2.0 * PI], 0.0, 0.0);
        assert!((s.lorentz - Matrix4::identity()).amax() < 1e-12);
        assert!((s.spin + CMat4::identity()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn boost_along_z_mixes_t_and_z() {
        let r = 0.9;
        let s = exp_spin([0.0, 0.0, r], [0.0; 3], 0.0, 0.0);
        assert!((s.lorentz[(0, 0)] - r.cosh()).abs() < 1e-13);
        assert!((s.lorentz[(3, 3)] - r.cosh()).abs() < 1e-13);
        assert!((s.lorentz[(0, 3)] - r.sinh()).abs() < 1e-13);
        assert!((s.lorentz[(3, 0)] - r.sinh()).abs() < 1e-13);
        assert!((s.lorentz[(1, 1)] - 1.0).abs() < 1e-13);
        assert!(s.representation_residual() < 1e-12);
    }

    #[test]
    fn quarter_turn_maps_x_to_y() {
        let s = exp_spin([0.0; 3], [0.0, 0.0, PI / 2.0], 0.0, 0.0);
        assert!((s.lorentz[(2, 1)] - 1.0).abs() < 1e-14);
        assert!((s.lorentz[(1, 2)] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauge_phase_multiplies_spin_part() {
        let s = exp_spin([0.0; 3], [0.0; 3], 0.5, 2.0);
        assert!((s.spin - CMat4::identity() * Complex64::from_polar(1.0, 1.0)).camax() < 1e-15);
        assert!((s.lorentz - Matrix4::identity()).amax() < 1e-15);
    }
}
