//! Stationary spherically symmetric charts, the radial spinor ansatz, the
//! parity constraints it must obey and the resulting no-go certificate.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::{FieldPoint, FrameSpec, PolarField, PolarFieldSpec};
use crate::geometry::{spherical_killing_fields, ChartSpec, PointGeometry, SpacetimeChart};
use crate::lie::LiePoint;
use crate::sampling::{sample_points, SampleRegion};
use crate::tensor::{lower, sum2, Vec4};

/// Metric functions `A, B, C, eta` and ansatz functions `alpha, phi, beta`,
/// all expressions in `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalScenario {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    #[serde(default = "zero")]
    pub eta: String,
    #[serde(default = "zero")]
    pub alpha: String,
    #[serde(default = "one")]
    pub phi: String,
    #[serde(default = "zero")]
    pub beta: String,
    /// Optional gauge phase; does not enter any bilinear.
    #[serde(default = "zero")]
    pub zeta: String,
    #[serde(default = "unit")]
    pub q: f64,
    /// Rotation angle of the `e^2, e^3` legs, an expression in `theta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
    /// Extra domain guards, e.g. `r > 1`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<String>,
    #[serde(default)]
    pub samples: Vec<[f64; 4]>,
}

fn zero() -> String {
    "0".into()
}
fn one() -> String {
    "1".into()
}
fn unit() -> f64 {
    1.0
}

const RADIAL: [&str; 7] = ["A", "B", "C", "eta", "alpha", "phi", "beta"];

impl SphericalScenario {
    pub fn new(a: &str, b: &str, c: &str, eta: &str) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            eta: eta.into(),
            alpha: zero(),
            phi: one(),
            beta: zero(),
            zeta: zero(),
            q: 1.0,
            twist: None,
            domain: vec![],
            samples: vec![],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `A = ln(1 - 2M/r)/2`, `B = -A`, `C = ln r`, `eta = 0`, with `M = 1/2`.
    pub fn schwarzschild() -> Self {
        let mut s = Self::new("ln(1 - 1/r)/2", "-ln(1 - 1/r)/2", "ln(r)", "0");
        s.alpha = "r/10".into();
        s.phi = "1 + 1/(2*r)".into();
        s.domain = vec!["r > 1".into()];
        s
    }

    /// Generic stationary metric with a nonzero cross term.
    pub fn stationary() -> Self {
        let mut s = Self::new("-1/(4*r)", "1/(4*r)", "ln(r) + 1/(10*r)", "r/5");
        s.alpha = "sin(r)/3".into();
        s.phi = "1 + 1/(3*r)".into();
        s.beta = "1/(5*r)".into();
        s
    }

    /// A scenario with random smooth radial functions; every fifth seed
    /// is static (`eta = 0`) and every third uses `C = ln r`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut k = || -> f64 { (rng.random_range(-0.5..0.5) * 1000.0_f64).round() / 1000.0 };
        let (a1, a0, b1, c1, e1, e0, al1, al0, p1, b0) = (k(), k(), k(), k(), k(), k(), k(), k(), k(), k());
        let eta = if seed.is_multiple_of(5) {
            zero()
        } else {
            format!("{e1}/r + {e0}*sin(r)")
        };
        let c = if seed.is_multiple_of(3) {
            "ln(r)".to_string()
        } else {
            format!("ln(r) + {c1}/r")
        };
        let mut s = Self::new(&format!("{a1}/r + {a0}"), &format!("{b1}/r"), &c, &eta);
        s.alpha = format!("{al1}*cos(r) + {al0}");
        s.phi = format!("1 + {}/r", p1.abs());
        s.beta = format!("{b0}/r");
        s
    }

    pub fn with_twist(mut self, f: &str) -> Self {
        self.twist = Some(f.into());
        self
    }

    pub fn chart_spec(&self) -> ChartSpec {
        let mut functions = BTreeMap::new();
        for (k, v) in [
            ("A", &self.a),
            ("B", &self.b),
            ("C", &self.c),
            ("eta", &self.eta),
            ("alpha", &self.alpha),
        ] {
            functions.insert(k.to_string(), format!("({v})"));
        }
        let mut spec = ChartSpec::stationary_spherical(functions);
        spec.name = Some("spherical-ansatz".into());
        if let Some(f) = &self.twist {
            spec.functions.insert("twist".into(), format!("({f})"));
            spec.tetrad[2] = ["0", "0", "exp(C)*cos(twist)", "exp(C)*sin(theta)*sin(twist)"]
                .map(String::from)
                .to_vec();
            spec.tetrad[3] = ["0", "0", "-exp(C)*sin(twist)", "exp(C)*sin(theta)*cos(twist)"]
                .map(String::from)
                .to_vec();
        }
        spec.domain.extend(self.domain.iter().cloned());
        spec
    }

    pub fn chart(&self) -> Result<SpacetimeChart> {
        let chart = SpacetimeChart::from_spec(&self.chart_spec())?;
        for name in RADIAL {
            let text = match name {
                "phi" => &self.phi,
                "beta" => &self.beta,
                _ => name,
            };
            let e = chart.parse_expr(text)?;
            if [0, 2, 3].iter().any(|&k| e.depends_on(k)) {
                return Err(Error::InvalidScenario(format!("`{name}` must depend on r only")));
            }
        }
        if let Some(f) = &self.twist {
            let e = chart.parse_expr(f)?;
            if [0, 1, 3].iter().any(|&k| e.depends_on(k)) {
                return Err(Error::InvalidScenario("`twist` must depend on theta only".into()));
            }
        }
        Ok(chart)
    }

    pub fn field_spec(&self) -> PolarFieldSpec {
        PolarFieldSpec {
            phi: self.phi.clone(),
            beta: self.beta.clone(),
            frame: FrameSpec {
                rapidities: ["alpha + eta".into(), "0".into(), "0".into()],
                angles: ["0".into(), "pi/2".into(), "0".into()],
            },
            potential: ["0".into(), "0".into(), "0".into(), "0".into()],
            q: self.q,
            zeta: self.zeta.clone(),
        }
    }

    /// The given samples, or `n` seeded points in the default box.
    pub fn sample_points(&self, chart: &SpacetimeChart, n: usize, seed: u64) -> Result<Vec<[f64; 4]>> {
        if self.samples.is_empty() {
            return sample_points(chart, &SampleRegion::default_for(chart), n, seed);
        }
        for x in &self.samples {
            chart.check_point(x)?;
        }
        Ok(self.samples.clone())
    }
}

/// The ansatz field on the scenario chart.
pub fn ansatz_field(scn: &SphericalScenario) -> Result<(SpacetimeChart, PolarField)> {
    let chart = scn.chart()?;
    let field = PolarField::new(&scn.field_spec(), &chart)?;
    Ok((chart, field))
}

/// Radial functions evaluated at a point.
#[derive(Clone, Copy, Debug)]
struct Radial {
    a: f64,
    b: f64,
    c: f64,
    eta: f64,
    alpha: f64,
}

struct Functions([Expr; 5]);

impl Functions {
    fn new(chart: &SpacetimeChart) -> Result<Self> {
        Ok(Self([
            chart.parse_expr("A")?,
            chart.parse_expr("B")?,
            chart.parse_expr("C")?,
            chart.parse_expr("eta")?,
            chart.parse_expr("alpha")?,
        ]))
    }

    fn at(&self, x: &[f64; 4]) -> Radial {
        let v: Vec<f64> = self.0.iter().map(|e| e.eval(x)).collect();
        Radial {
            a: v[0],
            b: v[1],
            c: v[2],
            eta: v[3],
            alpha: v[4],
        }
    }
}

impl Radial {
    fn u(&self) -> Vec4 {
        [
            self.a.exp() * (self.alpha + self.eta).cosh(),
            -self.b.exp() * self.alpha.sinh(),
            0.0,
            0.0,
        ]
    }

    fn s(&self) -> Vec4 {
        [
            self.a.exp() * (self.alpha + self.eta).sinh(),
            -self.b.exp() * self.alpha.cosh(),
            0.0,
            0.0,
        ]
    }
}

/// Coordinate covector components `u_mu`, `s_mu` of a field.
pub fn coordinate_frame(geo: &PointGeometry, f: &FieldPoint) -> (Vec4, Vec4) {
    (
        geo.covector_to_coords(&lower(&f.u())),
        geo.covector_to_coords(&lower(&f.s())),
    )
}

fn metric_norm(geo: &PointGeometry, v: &Vec4) -> f64 {
    sum2(|m, n| geo.g_inv(m, n) * v[m] * v[n])
}

/// `theta -> pi - theta`
pub fn mirror(x: &[f64; 4]) -> [f64; 4] {
    [x[0], x[1], PI - x[2], x[3]]
}

/// Diagonal of the parity Jacobian; its determinant is `-1`.
pub const PARITY_JACOBIAN: Vec4 = [1.0, 1.0, -1.0, 1.0];

/// Values at `x` and their parity images: the pullback from the mirror
/// point, with the extra determinant sign on axial quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityImage {
    pub point: [f64; 4],
    pub u: Vec4,
    pub u_image: Vec4,
    pub s: Vec4,
    pub s_image: Vec4,
    pub beta: f64,
    pub beta_image: f64,
    pub phi: f64,
    pub phi_image: f64,
}

impl ParityImage {
    /// Parity-invariant part of `s`: what survives once invariance is imposed.
    pub fn s_even(&self) -> Vec4 {
        std::array::from_fn(|m| 0.5 * (self.s[m] + self.s_image[m]))
    }
}

pub fn parity_image(chart: &SpacetimeChart, field: &PolarField, x: &[f64; 4]) -> Result<ParityImage> {
    let det = -1.0;
    let xm = mirror(x);
    let (geo, geo_m) = (chart.geometry(x)?, chart.geometry(&xm)?);
    let (f, fm) = (field.at(x), field.at(&xm));
    let (u, s) = coordinate_frame(&geo, &f);
    let (um, sm) = coordinate_frame(&geo_m, &fm);
    Ok(ParityImage {
        point: *x,
        u,
        u_image: std::array::from_fn(|m| PARITY_JACOBIAN[m] * um[m]),
        s,
        s_image: std::array::from_fn(|m| det * PARITY_JACOBIAN[m] * sm[m]),
        beta: f.beta.value,
        beta_image: det * fm.beta.value,
        phi: f.phi.value,
        phi_image: fm.phi.value,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintStatus {
    /// Holds for the given scenario.
    Satisfied,
    /// Can hold only on a restricted family of ansatz functions.
    Restricts,
    /// Cannot hold for any choice of ansatz functions.
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub quantity: String,
    pub equation: String,
    pub status: ConstraintStatus,
    pub reason: String,
    /// Largest `|quantity + image|`: zero when the quantity is parity odd.
    pub odd_residual: f64,
    pub max_abs: f64,
    /// Analytic lower bound of `|quantity|` over the samples, if any.
    pub lower_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub constraints: Vec<Constraint>,
    /// Largest angular component of `u` and `s`.
    pub angular_components: f64,
    /// Largest `|x - image|` over the parity-even quantities `u, phi`.
    pub even_residual: f64,
}

impl ParityReport {
    pub fn get(&self, quantity: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.quantity == quantity)
    }
}

/// Constraints that parity invariance imposes on the ansatz at `samples`.
pub fn parity_constraints(scn: &SphericalScenario, samples: &[[f64; 4]]) -> Result<ParityReport> {
    let (chart, field) = ansatz_field(scn)?;
    let fns = Functions::new(&chart)?;
    let images = samples
        .iter()
        .map(|x| parity_image(&chart, &field, x))
        .collect::<Result<Vec<_>>>()?;
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let odd = |k: usize| fold(&mut images.iter().map(|p| (p.s[k] + p.s_image[k]).abs()));
    let size = |k: usize| fold(&mut images.iter().map(|p| p.s[k].abs()));
    let eb = samples.iter().map(|x| fns.at(x).b.exp()).fold(f64::INFINITY, f64::min);
    let beta_max = fold(&mut images.iter().map(|p| p.beta.abs()));
    let constraints = vec![
        Constraint {
            quantity: "s_t".into(),
            equation: format!("exp({}) * sinh({} + {}) = 0", scn.a, scn.alpha, scn.eta),
            status: ConstraintStatus::Restricts,
            reason: "holds only where alpha = -eta".into(),
            odd_residual: odd(0),
            max_abs: size(0),
            lower_bound: None,
        },
        Constraint {
            quantity: "s_r".into(),
            equation: format!("exp({}) * cosh({}) = 0", scn.b, scn.alpha),
            status: ConstraintStatus::Unsatisfiable,
            reason: "exp(B) > 0 and cosh(alpha) >= 1".into(),
            odd_residual: odd(1),
            max_abs: size(1),
            lower_bound: Some(if samples.is_empty() { 0.0 } else { eb }),
        },
        Constraint {
            quantity: "beta".into(),
            equation: format!("{} = 0", scn.beta),
            status: if beta_max == 0.0 {
                ConstraintStatus::Satisfied
            } else {
                ConstraintStatus::Restricts
            },
            reason: if beta_max == 0.0 {
                "beta vanishes already".into()
            } else {
                "beta is a pseudo-scalar and must be set to zero".into()
            },
            odd_residual: fold(&mut images.iter().map(|p| (p.beta + p.beta_image).abs())),
            max_abs: beta_max,
            lower_bound: None,
        },
    ];
    let angular = fold(
        &mut images
            .iter()
            .flat_map(|p| [p.u[2], p.u[3], p.s[2], p.s[3]].map(f64::abs)),
    );
    let even = fold(&mut images.iter().flat_map(|p| {
        let mut v: Vec<f64> = (0..4).map(|m| (p.u[m] - p.u_image[m]).abs()).collect();
        v.push((p.phi - p.phi_image).abs());
        v
    }));
    Ok(ParityReport {
        constraints,
        angular_components: angular,
        even_residual: even,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KillingCheck {
    pub name: String,
    pub max_residual: f64,
    /// Largest weak (bilinear) Lie derivative of the ansatz.
    pub weak_residual: f64,
    /// Largest `|L_xi psi|` of the ansatz.
    pub strong_residual: f64,
}

/// One-dimensional search over `alpha` at fixed `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridWitness {
    pub r: f64,
    pub alpha_range: [f64; 2],
    pub points: usize,
    /// `min_alpha max(|s_t|, |s_r|)`
    pub min_max: f64,
    pub min_abs_s_r: f64,
    pub argmin_alpha: f64,
    /// `exp(B(r))`
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NogoCertificate {
    pub scenario: SphericalScenario,
    pub samples: usize,
    pub killing: Vec<KillingCheck>,
    /// `|[xi1, xi2] +- xi3|`
    pub closure_residual: f64,
    /// Metric against its closed form.
    pub metric_residual: f64,
    /// `u_mu, s_mu` against their closed forms.
    pub ansatz_residual: f64,
    /// Largest of `|u.u - 1|, |s.s + 1|, |u.s|` before constraints.
    pub normalization_residual: f64,
    pub parity: ParityReport,
    pub deduction: Vec<String>,
    pub required_norm: f64,
    /// Largest `|s.s|` once the parity constraints are imposed.
    pub constrained_norm: f64,
    pub discrepancy: f64,
    pub witness: GridWitness,
    pub established: bool,
}

/// Checks the full chain: Killing fields, weak invariance of the ansatz,
/// parity constraints and the contradiction with `s.s = -1`.
pub fn nogo_certificate(scn: &SphericalScenario, samples: &[[f64; 4]]) -> Result<NogoCertificate> {
    if samples.is_empty() {
        return Err(Error::InvalidScenario("no sample points".into()));
    }
    let (chart, field) = ansatz_field(scn)?;
    let fns = Functions::new(&chart)?;
    let xis = spherical_killing_fields(&chart)?;
    let mut killing: Vec<KillingCheck> = xis
        .iter()
        .map(|k| KillingCheck {
            name: k.name.clone(),
            max_residual: 0.0,
            weak_residual: 0.0,
            strong_residual: 0.0,
        })
        .collect();
    let (mut closure, mut metric_res, mut ansatz_res, mut norm_res, mut constrained, mut disc) =
        (0f64, 0f64, 0f64, 0f64, 0f64, f64::INFINITY);
    for x in samples {
        let geo = chart.geometry(x)?;
        let fp = field.at(x);
        let rad = fns.at(x);
        for (k, xi) in xis.iter().enumerate() {
            let p = LiePoint::unchecked(&chart, &field, xi, x)?;
            let check = &mut killing[k];
            check.max_residual = check.max_residual.max(p.xi.residual());
            check.weak_residual = check.weak_residual.max(p.bilinear_derivatives().residuals().max());
            check.strong_residual = check.strong_residual.max(p.lie_spinor().norm());
        }
        let br = xis[1].bracket(&xis[2], x);
        let x3 = xis[3].value(x);
        let plus = (0..4).map(|m| (br[m] + x3[m]).abs()).fold(0.0, f64::max);
        let minus = (0..4).map(|m| (br[m] - x3[m]).abs()).fold(0.0, f64::max);
        closure = closure.max(plus.min(minus));
        let st = x[2].sin();
        let expected = [
            [(2.0 * rad.a).exp(), (rad.a + rad.b).exp() * rad.eta.sinh(), 0.0, 0.0],
            [(rad.a + rad.b).exp() * rad.eta.sinh(), -(2.0 * rad.b).exp(), 0.0, 0.0],
            [0.0, 0.0, -(2.0 * rad.c).exp(), 0.0],
            [0.0, 0.0, 0.0, -(2.0 * rad.c).exp() * st * st],
        ];
        for m in 0..4 {
            for n in 0..4 {
                metric_res = metric_res.max((geo.g(m, n) - expected[m][n]).abs());
            }
        }
        let (u, s) = coordinate_frame(&geo, &fp);
        let (ue, se) = (rad.u(), rad.s());
        for m in 0..4 {
            ansatz_res = ansatz_res.max((u[m] - ue[m]).abs()).max((s[m] - se[m]).abs());
        }
        let us = sum2(|m, n| geo.g_inv(m, n) * u[m] * s[n]);
        norm_res = norm_res
            .max((metric_norm(&geo, &u) - 1.0).abs())
            .max((metric_norm(&geo, &s) + 1.0).abs())
            .max(us.abs());
        let image = parity_image(&chart, &field, x)?;
        let se = image.s_even();
        let ss = metric_norm(&geo, &se);
        constrained = constrained.max(ss.abs());
        disc = disc.min((ss - (-1.0)).abs());
    }
    let parity = parity_constraints(scn, samples)?;
    let witness = grid_witness(&chart, &fns, samples)?;
    let deduction = vec![
        "weak invariance under the four Killing fields leaves u and s in the (t, r) plane with radial coefficients"
            .into(),
        "parity theta -> pi - theta flips s_t and s_r (axial vector) and beta (pseudo-scalar)".into(),
        "invariance under parity therefore requires s_t = 0, s_r = 0 and beta = 0".into(),
        "with s_theta = s_phi = 0 this gives s_nu = 0 and hence s_a s^a = 0".into(),
        "the normalization requires s_a s^a = -1".into(),
        "the discrepancy |0 - (-1)| = 1 cannot be removed: the ansatz admits no parity and Killing invariant spinor"
            .into(),
    ];
    let weak_ok = killing.iter().all(|k| k.max_residual < 1e-10 && k.weak_residual < 1e-8);
    let s_r_ok = parity
        .get("s_r")
        .map(|c| c.status == ConstraintStatus::Unsatisfiable && c.odd_residual < 1e-12)
        .unwrap_or(false);
    let established = weak_ok
        && s_r_ok
        && closure < 1e-8
        && norm_res < 1e-10
        && (disc - 1.0).abs() < 1e-12
        && witness.min_abs_s_r >= witness.bound * (1.0 - 1e-12);
    Ok(NogoCertificate {
        scenario: scn.clone(),
        samples: samples.len(),
        killing,
        closure_residual: closure,
        metric_residual: metric_res,
        ansatz_residual: ansatz_res,
        normalization_residual: norm_res,
        parity,
        deduction,
        required_norm: -1.0,
        constrained_norm: constrained,
        discrepancy: disc,
        witness,
        established,
    })
}

/// Scans `alpha` in `[-5, 5]` at `r = 1`, or at the first sample radius
/// when `r = 1` lies outside the domain.
fn grid_witness(chart: &SpacetimeChart, fns: &Functions, samples: &[[f64; 4]]) -> Result<GridWitness> {
    let probe = [0.0, 1.0, PI / 2.0, 0.0];
    let x = if chart.check_point(&probe).is_ok() {
        probe
    } else {
        [0.0, samples[0][1], PI / 2.0, 0.0]
    };
    let rad = fns.at(&x);
    let points = 2001;
    let (lo, hi) = (-5.0, 5.0);
    let mut best = (f64::INFINITY, f64::INFINITY, 0.0);
    for i in 0..points {
        let alpha = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let r = Radial { alpha, ..rad };
        let s = r.s();
        let mm = s[0].abs().max(s[1].abs());
        if s[1].abs() < best.1 {
            best.1 = s[1].abs();
            best.2 = alpha;
        }
        best.0 = best.0.min(mm);
    }
    Ok(GridWitness {
        r: x[1],
        alpha_range: [lo, hi],
        points,
        min_max: best.0,
        min_abs_s_r: best.1,
        argmin_alpha: best.2,
        bound: rad.b.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(scn: &SphericalScenario, n: usize) -> Vec<[f64; 4]> {
        let chart = scn.chart().unwrap();
        scn.sample_points(&chart, n, 3).unwrap()
    }

    #[test]
    fn rest_frame_radial_spin() {
        let scn = SphericalScenario::new("0", "0", "ln(r)", "0");
        let (chart, field) = ansatz_field(&scn).unwrap();
        let x = [0.0, 2.0, 1.0, 0.5];
        let f = field.at(&x);
        let (u, s) = coordinate_frame(&chart.geometry(&x).unwrap(), &f);
        assert_eq!(f.u(), [1.0, 0.0, 0.0, 0.0]);
        assert!((u[0] - 1.0).abs() < 1e-15 && u[1].abs() < 1e-15);
        assert!((s[1] + 1.0).abs() < 1e-15 && s[0].abs() < 1e-15);
    }

    #[test]
    fn ansatz_matches_closed_form() {
        let mut scn = SphericalScenario::stationary();
        scn.alpha = "r/10".into();
        let (chart, field) = ansatz_field(&scn).unwrap();
        let fns = Functions::new(&chart).unwrap();
        for x in samples(&scn, 10).iter().chain([[0.0, 1.0, 1.2, 0.0]].iter()) {
            let geo = chart.geometry(x).unwrap();
            let (u, s) = coordinate_frame(&geo, &field.at(x));
            let rad = fns.at(x);
            for m in 0..4 {
                assert!((u[m] - rad.u()[m]).abs() < 1e-12);
                assert!((s[m] - rad.s()[m]).abs() < 1e-12);
            }
            assert!((metric_norm(&geo, &u) - 1.0).abs() < 1e-12);
            assert!((metric_norm(&geo, &s) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_set() {
        let scn = SphericalScenario::stationary();
        let r = parity_constraints(&scn, &samples(&scn, 6)).unwrap();
        let names: Vec<_> = r.constraints.iter().map(|c| c.quantity.as_str()).collect();
        assert_eq!(names, ["s_t", "s_r", "beta"]);
        for c in &r.constraints {
            assert!(c.odd_residual < 1e-12, "{c:?}");
        }
        assert_eq!(r.get("beta").unwrap().status, ConstraintStatus::Restricts);
        assert_eq!(r.angular_components, 0.0);
        assert!(r.even_residual < 1e-12);
    }

    #[test]
    fn s_r_is_unsatisfiable_in_rest_frame() {
        let scn = SphericalScenario::new("0", "1/r", "ln(r)", "0");
        let pts = samples(&scn, 4);
        let r = parity_constraints(&scn, &pts).unwrap();
        let c = r.get("s_r").unwrap();
        assert_eq!(c.status, ConstraintStatus::Unsatisfiable);
        let eb = pts.iter().map(|x| (1.0 / x[1]).exp()).fold(f64::INFINITY, f64::min);
        assert!((c.lower_bound.unwrap() - eb).abs() < 1e-15);
        assert_eq!(r.get("beta").unwrap().status, ConstraintStatus::Satisfied);
    }

    #[test]
    fn schwarzschild_certificate() {
        let scn = SphericalScenario::schwarzschild();
        let cert = nogo_certificate(&scn, &samples(&scn, 8)).unwrap();
        assert_eq!(cert.discrepancy, 1.0);
        assert_eq!(cert.constrained_norm, 0.0);
        assert!(cert.established, "{cert:?}");
        assert!(cert.metric_residual < 1e-12);
        assert!(cert.witness.r > 1.0);
        for k in &cert.killing {
            assert!(k.max_residual < 1e-10 && k.weak_residual < 1e-9, "{k:?}");
        }
    }

    #[test]
    fn eta_independent() {
        let scn = SphericalScenario::stationary();
        let cert = nogo_certificate(&scn, &samples(&scn, 8)).unwrap();
        assert_eq!(cert.discrepancy, 1.0);
        assert!(cert.established);
        assert!(cert.metric_residual < 1e-12);
        assert!((cert.witness.min_abs_s_r - cert.witness.bound).abs() < 1e-15);
        assert_eq!(cert.witness.argmin_alpha, 0.0);
    }

    #[test]
    fn twist_leaves_certificate_unchanged() {
        let scn = SphericalScenario::stationary();
        let pts = samples(&scn, 6);
        let plain = nogo_certificate(&scn, &pts).unwrap();
        let twisted = nogo_certificate(&scn.clone().with_twist("theta^2/3 + 0.4"), &pts).unwrap();
        assert_eq!(plain.discrepancy, twisted.discrepancy);
        assert!(twisted.established);
        assert!(twisted.metric_residual < 1e-12);
        assert!(twisted.ansatz_residual < 1e-12);
        // same components in a rotated frame: a different spinor field
        let gap = (plain.killing[1].strong_residual - twisted.killing[1].strong_residual).abs();
        assert!(gap > 1e-3, "{gap}");
    }

    #[test]
    fn randomized_family() {
        for seed in 0..6 {
            let scn = SphericalScenario::random(seed);
            let cert = nogo_certificate(&scn, &samples(&scn, 5)).unwrap();
            assert_eq!(cert.discrepancy, 1.0, "{seed}");
            assert!(cert.established, "{seed} {cert:?}");
        }
    }

    #[test]
    fn angular_dependence_is_rejected() {
        let mut scn = SphericalScenario::stationary();
        scn.alpha = "r*theta".into();
        assert!(matches!(scn.chart(), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn json_round_trip() {
        let scn = SphericalScenario::stationary().with_twist("theta");
        let text = serde_json::to_string(&scn).unwrap();
        assert!(text.contains("\"A\""));
        assert_eq!(SphericalScenario::from_json(&text).unwrap(), scn);
        let minimal = SphericalScenario::from_json(r#"{"A": "0", "B": "0", "C": "ln(r)"}"#).unwrap();
        assert_eq!(minimal.phi, "1");
    }
}
