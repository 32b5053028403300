//! Charts described by a tetrad, and everything derived from it at a point:
//! metric, Christoffel symbols, the Levi-Civita spin connection and the
//! Riemann tensor, all with exact derivatives.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::clifford::FrameId;
use crate::error::{Error, Result};
use crate::expr::{self, Bindings, Domain, Expr};
use crate::jet::{bilinear, Jet};
use crate::tensor::{
    eta_matrix, max_abs2, max_abs3, max_abs4, sum1, sum2, tensor2, tensor3, tensor4, Rank2, Rank3, Rank4, Vec4, ETA,
};

/// Tetrads whose normalized determinant falls below this are degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-10;

/// Serializable chart description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub coords: Vec<String>,
    /// `tetrad[a][mu]` is `e^a_mu`.
    pub tetrad: Vec<Vec<String>>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Named helper functions of the coordinates, substituted into the tetrad.
    #[serde(default)]
    pub functions: BTreeMap<String, String>,
    #[serde(default)]
    pub domain: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SpacetimeChart {
    pub name: String,
    pub coords: Vec<String>,
    pub tetrad: [[Expr; 4]; 4],
    pub params: BTreeMap<String, f64>,
    pub domain: Domain,
    pub frame: FrameId,
    /// Bindings used to build the tetrad; fields on the chart reuse them.
    pub bindings: Bindings,
    pub spec: ChartSpec,
}

pub const PRESETS: [&str; 4] = [
    "flat-cartesian",
    "flat-spherical",
    "schwarzschild",
    "stationary-spherical",
];

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn diag(entries: [&str; 4]) -> Vec<Vec<String>> {
    (0..4)
        .map(|a| {
            (0..4)
                .map(|m| if a == m { entries[a].to_string() } else { "0".into() })
                .collect()
        })
        .collect()
}

const SPHERICAL_DOMAIN: [&str; 3] = ["r > 0", "theta > 0", "theta < pi"];

impl ChartSpec {
    pub fn preset(name: &str) -> Result<ChartSpec> {
        let spherical = strings(&["t", "r", "theta", "phi"]);
        let spec = match name {
            "flat-cartesian" => ChartSpec {
                name: Some(name.into()),
                coords: strings(&["t", "x", "y", "z"]),
                tetrad: diag(["1", "1", "1", "1"]),
                params: BTreeMap::new(),
                functions: BTreeMap::new(),
                domain: vec![],
            },
            "flat-spherical" => ChartSpec {
                name: Some(name.into()),
                coords: spherical,
                tetrad: diag(["1", "1", "r", "r*sin(theta)"]),
                params: BTreeMap::new(),
                functions: BTreeMap::new(),
                domain: strings(&SPHERICAL_DOMAIN),
            },
            "schwarzschild" => ChartSpec {
                name: Some(name.into()),
                coords: spherical,
                tetrad: diag(["sqrt(1 - 2*M/r)", "1/sqrt(1 - 2*M/r)", "r", "r*sin(theta)"]),
                params: [("M".to_string(), 0.5)].into(),
                functions: BTreeMap::new(),
                domain: strings(&["r > 2*M", "theta > 0", "theta < pi"]),
            },
            "stationary-spherical" => {
                let mut functions = BTreeMap::new();
                functions.insert("A".into(), "-1/(4*r)".into());
                functions.insert("B".into(), "1/(4*r)".into());
                functions.insert("C".into(), "ln(r) + 1/(10*r)".into());
                functions.insert("eta".into(), "1/(5*r)".into());
                Self::stationary_spherical(functions)
            }
            _ => {
                return Err(Error::UnknownName {
                    kind: "chart",
                    name: name.into(),
                })
            }
        };
        Ok(spec)
    }

    /// `e^0 = e^A dt + e^B sinh(eta) dr`, `e^1 = e^B cosh(eta) dr`,
    /// `e^2 = e^C dtheta`, `e^3 = e^C sin(theta) dphi`, with `A, B, C, eta`
    /// supplied as functions of `r`.
    pub fn stationary_spherical(functions: BTreeMap<String, String>) -> ChartSpec {
        let row = |v: [&str; 4]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        ChartSpec {
            name: Some("stationary-spherical".into()),
            coords: strings(&["t", "r", "theta", "phi"]),
            tetrad: vec![
                row(["exp(A)", "exp(B)*sinh(eta)", "0", "0"]),
                row(["0", "exp(B)*cosh(eta)", "0", "0"]),
                row(["0", "0", "exp(C)", "0"]),
                row(["0", "0", "0", "exp(C)*sin(theta)"]),
            ],
            params: BTreeMap::new(),
            functions,
            domain: strings(&SPHERICAL_DOMAIN),
        }
    }
}

impl SpacetimeChart {
    pub fn preset(name: &str) -> Result<Self> {
        Self::from_spec(&ChartSpec::preset(name)?)
    }

    /// Preset with numeric parameters overridden.
    pub fn preset_with(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut spec = ChartSpec::preset(name)?;
        for (k, v) in params {
            spec.params.insert(k.clone(), *v);
        }
        Self::from_spec(&spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn from_spec(spec: &ChartSpec) -> Result<Self> {
        if spec.coords.len() != 4 {
            return Err(Error::InvalidScenario(format!(
                "a chart needs 4 coordinates, got {}",
                spec.coords.len()
            )));
        }
        if spec.tetrad.len() != 4 || spec.tetrad.iter().any(|r| r.len() != 4) {
            return Err(Error::InvalidScenario("tetrad must be a 4x4 array".into()));
        }
        let mut bindings = expr::numeric_bindings(&spec.params);
        // helper functions may refer to parameters and to each other in order
        for (name, text) in &spec.functions {
            let e = expr::parse(text)?.substitute(&bindings);
            bindings.insert(name.clone(), e);
        }
        let mut tetrad: [[Expr; 4]; 4] = Default::default();
        for a in 0..4 {
            for m in 0..4 {
                tetrad[a][m] = Expr::parse_bound(&spec.tetrad[a][m], &spec.coords, &bindings)?;
            }
        }
        let domain = Domain::parse(&spec.domain, &spec.coords, &bindings)?;
        let name = spec.name.clone().unwrap_or_else(|| "custom".into());
        Ok(Self {
            frame: FrameId::from_name(&name),
            name,
            coords: spec.coords.clone(),
            tetrad,
            params: spec.params.clone(),
            domain,
            bindings,
            spec: spec.clone(),
        })
    }

    /// Parses an expression in this chart's coordinates and parameters.
    pub fn parse_expr(&self, text: &str) -> Result<Expr> {
        Expr::parse_bound(text, &self.coords, &self.bindings)
    }

    pub fn is_spherical(&self) -> bool {
        self.coords == ["t", "r", "theta", "phi"]
    }

    pub fn tetrad_jet(&self, x: &[f64; 4]) -> Jet<Matrix4<f64>> {
        let entries: Vec<Vec<Jet<f64>>> = self
            .tetrad
            .iter()
            .map(|row| row.iter().map(|e| e.eval_jet(x)).collect())
            .collect();
        Jet {
            value: Matrix4::from_fn(|a, m| entries[a][m].value),
            grad: std::array::from_fn(|r| Matrix4::from_fn(|a, m| entries[a][m].grad[r])),
            hess: std::array::from_fn(|r| std::array::from_fn(|s| Matrix4::from_fn(|a, m| entries[a][m].hess[r][s]))),
        }
    }

    pub fn tetrad_at(&self, x: &[f64; 4]) -> Matrix4<f64> {
        Matrix4::from_fn(|a, m| self.tetrad[a][m].eval(x))
    }

    pub fn metric_at(&self, x: &[f64; 4]) -> Matrix4<f64> {
        let e = self.tetrad_at(x);
        e.transpose() * eta_matrix() * e
    }

    /// `|det e| / prod |e^a|`, which is 1 for orthogonal rows and 0 for a
    /// degenerate tetrad.
    pub fn hadamard_ratio(&self, x: &[f64; 4]) -> f64 {
        let e = self.tetrad_at(x);
        let rows: f64 = (0..4).map(|a| e.row(a).norm()).product();
        if rows == 0.0 {
            0.0
        } else {
            e.determinant().abs() / rows
        }
    }

    /// Domain guard plus nondegeneracy of the tetrad.
    pub fn check_point(&self, x: &[f64; 4]) -> Result<()> {
        self.domain.check(x)?;
        let ratio = self.hadamard_ratio(x);
        if !(ratio >= DEGENERACY_RATIO) {
            return Err(Error::DegenerateTetrad { point: *x, ratio });
        }
        Ok(())
    }

    /// True when the metric has one positive and three negative eigenvalues.
    pub fn signature_ok(&self, x: &[f64; 4]) -> bool {
        let eig = SymmetricEigen::new(self.metric_at(x)).eigenvalues;
        eig.iter().filter(|v| **v > 0.0).count() == 1 && eig.iter().filter(|v| **v < 0.0).count() == 3
    }

    pub fn geometry(&self, x: &[f64; 4]) -> Result<PointGeometry> {
        self.check_point(x)?;
        PointGeometry::from_tetrad(*x, self.tetrad_jet(x)).ok_or(Error::DegenerateTetrad { point: *x, ratio: 0.0 })
    }

    /// Worst symbolic-versus-finite-difference discrepancy over all tetrad
    /// entries.
    pub fn fd_crosscheck(&self, x: &[f64; 4]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for row in &self.tetrad {
            for e in row {
                worst = worst.max(expr::fd_crosscheck(e, x, &self.domain)?);
            }
        }
        Ok(worst)
    }
}

/// Geometry at one point. Coordinate indices are Greek, frame indices Latin.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub x: [f64; 4],
    /// `e^a_mu` at `(a, mu)`.
    pub tetrad: Jet<Matrix4<f64>>,
    /// `e_a^mu` at `(mu, a)`.
    pub inverse: Jet<Matrix4<f64>>,
    pub metric: Jet<Matrix4<f64>>,
    pub metric_inv: Jet<Matrix4<f64>>,
    /// `Gamma^l_{mu nu}` as `[l][mu][nu]`.
    pub christoffel: Rank3,
    /// `d_r Gamma^l_{mu nu}` as `[r][l][mu][nu]`.
    pub christoffel_grad: Rank4,
    /// `C^a_{b mu}` as `[a][b][mu]`.
    pub connection: Rank3,
    /// `d_r C^a_{b mu}` as `[r][a][b][mu]`.
    pub connection_grad: Rank4,
}

impl PointGeometry {
    pub fn from_tetrad(x: [f64; 4], tetrad: Jet<Matrix4<f64>>) -> Option<Self> {
        let inverse = tetrad.try_inverse()?;
        let eta = Jet::constant(eta_matrix());
        let metric = tetrad.transpose().mat_mul(&eta.mat_mul(&tetrad));
        let metric_inv = metric.try_inverse()?;

        let gi = &metric_inv;
        let dg = |r: usize, a: usize, b: usize| metric.grad[r][(a, b)];
        let ddg = |r: usize, s: usize, a: usize, b: usize| metric.hess[r][s][(a, b)];
        let lowered = |l: usize, m: usize, n: usize| 0.5 * (dg(m, l, n) + dg(n, l, m) - dg(l, m, n));
        let christoffel = tensor3(|l, m, n| sum1(|k| gi.value[(l, k)] * lowered(k, m, n)));
        let christoffel_grad = tensor4(|r, l, m, n| {
            sum1(|k| {
                gi.grad[r][(l, k)] * lowered(k, m, n)
                    + gi.value[(l, k)] * 0.5 * (ddg(r, m, k, n) + ddg(r, n, k, m) - ddg(r, k, m, n))
            })
        });

        // X^nu_{b mu} = d_mu e_b^nu + Gamma^nu_{mu l} e_b^l
        let e = &tetrad;
        let ei = &inverse;
        let xs = tensor3(|n, b, m| ei.grad[m][(n, b)] + sum1(|l| christoffel[n][m][l] * ei.value[(l, b)]));
        let dxs = tensor4(|r, n, b, m| {
            ei.hess[r][m][(n, b)]
                + sum1(|l| christoffel_grad[r][n][m][l] * ei.value[(l, b)] + christoffel[n][m][l] * ei.grad[r][(l, b)])
        });
        let connection = tensor3(|a, b, m| sum1(|n| e.value[(a, n)] * xs[n][b][m]));
        let connection_grad =
            tensor4(|r, a, b, m| sum1(|n| e.grad[r][(a, n)] * xs[n][b][m] + e.value[(a, n)] * dxs[r][n][b][m]));
        Some(Self {
            x,
            tetrad,
            inverse,
            metric,
            metric_inv,
            christoffel,
            christoffel_grad,
            connection,
            connection_grad,
        })
    }

    /// `e^a_mu`
    pub fn e(&self, a: usize, mu: usize) -> f64 {
        self.tetrad.value[(a, mu)]
    }

    /// `e_a^mu`
    pub fn ei(&self, a: usize, mu: usize) -> f64 {
        self.inverse.value[(mu, a)]
    }

    pub fn g(&self, m: usize, n: usize) -> f64 {
        self.metric.value[(m, n)]
    }

    pub fn g_inv(&self, m: usize, n: usize) -> f64 {
        self.metric_inv.value[(m, n)]
    }

    /// `C^{ab}_mu`
    pub fn c_up(&self, a: usize, b: usize, mu: usize) -> f64 {
        self.connection[a][b][mu] * ETA[b]
    }

    /// `C_{ab mu}`
    pub fn c_low(&self, a: usize, b: usize, mu: usize) -> f64 {
        ETA[a] * self.connection[a][b][mu]
    }

    /// Frame components of a coordinate covector: `v_a = e_a^mu v_mu`.
    pub fn covector_to_frame(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|a| sum1(|m| self.ei(a, m) * v[m]))
    }

    /// Coordinate components of a frame vector: `v^mu = e_a^mu v^a`.
    pub fn vector_to_coords(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|m| sum1(|a| self.ei(a, m) * v[a]))
    }

    /// Coordinate components of a frame covector: `v_mu = e^a_mu v_a`.
    pub fn covector_to_coords(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|m| sum1(|a| self.e(a, m) * v[a]))
    }

    /// `R^a_{b mu nu}` from the spin connection.
    pub fn riemann(&self) -> Rank4 {
        let c = &self.connection;
        let dc = &self.connection_grad;
        tensor4(|a, b, m, n| {
            dc[m][a][b][n] - dc[n][a][b][m] + sum1(|k| c[a][k][m] * c[k][b][n] - c[a][k][n] * c[k][b][m])
        })
    }

    /// `R^a_{b mu nu}` through the coordinate Riemann tensor of the
    /// Christoffel symbols; an independent route used as an oracle.
    pub fn riemann_from_christoffel(&self) -> Rank4 {
        let g = &self.christoffel;
        let dg = &self.christoffel_grad;
        let coord = tensor4(|r, s, m, n| {
            dg[m][r][n][s] - dg[n][r][m][s] + sum1(|l| g[r][m][l] * g[l][n][s] - g[r][n][l] * g[l][m][s])
        });
        tensor4(|a, b, m, n| sum2(|r, s| self.e(a, r) * coord[r][s][m][n] * self.ei(b, s)))
    }

    /// `R^{ab}_{cd}` with all indices in the frame.
    pub fn riemann_frame(&self) -> Rank4 {
        let r = self.riemann();
        let mixed = tensor4(|a, b, m, n| r[a][b][m][n] * ETA[b]);
        tensor4(|a, b, c, d| sum2(|m, n| mixed[a][b][m][n] * self.ei(c, m) * self.ei(d, n)))
    }

    /// Max of `|d_r g_{mu nu} - Gamma^l_{r mu} g_{l nu} - Gamma^l_{r nu} g_{mu l}|`.
    pub fn metric_compatibility(&self) -> f64 {
        let g = &self.metric;
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let v = g.grad[r][(m, n)]
                        - sum1(|l| {
                            self.christoffel[l][r][m] * g.value[(l, n)] + self.christoffel[l][r][n] * g.value[(m, l)]
                        });
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// Max of `|d_mu e^a_nu - Gamma^l_{mu nu} e^a_l + C^a_{b mu} e^b_nu|`.
    pub fn tetrad_postulate(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let v = self.tetrad.grad[m][(a, n)] - sum1(|l| self.christoffel[l][m][n] * self.e(a, l))
                        + sum1(|b| self.connection[a][b][m] * self.e(b, n));
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// Max of `|C_{ab mu} + C_{ba mu}|`.
    pub fn connection_antisymmetry(&self) -> f64 {
        max_abs3(&tensor3(|a, b, m| self.c_low(a, b, m) + self.c_low(b, a, m)))
    }

    /// Max of `|R^a_{[bcd]}|` in frame components.
    pub fn bianchi_residual(&self) -> f64 {
        let r = self.riemann();
        let frame = tensor4(|a, b, c, d| sum2(|m, n| r[a][b][m][n] * self.ei(c, m) * self.ei(d, n)));
        max_abs4(&tensor4(|a, b, c, d| {
            frame[a][b][c][d] + frame[a][c][d][b] + frame[a][d][b][c]
        }))
    }
}

/// `C^{ab}_mu` at `x`.
pub fn spin_connection(chart: &SpacetimeChart, x: &[f64; 4]) -> Result<Rank3> {
    let g = chart.geometry(x)?;
    Ok(tensor3(|a, b, m| g.c_up(a, b, m)))
}

/// `R^{ab}_{mu nu}` at `x`.
pub fn riemann(chart: &SpacetimeChart, x: &[f64; 4]) -> Result<Rank4> {
    let g = chart.geometry(x)?;
    let r = g.riemann();
    Ok(tensor4(|a, b, m, n| r[a][b][m][n] * ETA[b]))
}

/// A vector field given by coordinate components.
#[derive(Clone, Debug)]
pub struct KillingField {
    pub name: String,
    pub components: [Expr; 4],
}

/// Killing-field data at a point, coordinate indices throughout.
#[derive(Clone, Debug)]
pub struct KillingPoint {
    pub xi: Vec4,
    /// `d_mu xi^nu` as `[mu][nu]`.
    pub dxi: Rank2,
    pub xi_lower: Vec4,
    /// `nabla_mu xi_nu`
    pub cov: Rank2,
    /// `(d xi)_{mu nu} = d_mu xi_nu - d_nu xi_mu`
    pub curl: Rank2,
}

impl KillingPoint {
    /// `max |nabla_mu xi_nu + nabla_nu xi_mu|`
    pub fn residual(&self) -> f64 {
        max_abs2(&tensor2(|m, n| self.cov[m][n] + self.cov[n][m]))
    }
}

impl KillingField {
    pub fn new(name: &str, components: [Expr; 4]) -> Self {
        Self {
            name: name.into(),
            components,
        }
    }

    pub fn parse(name: &str, texts: &[&str; 4], chart: &SpacetimeChart) -> Result<Self> {
        let mut components: [Expr; 4] = Default::default();
        for m in 0..4 {
            components[m] = chart.parse_expr(texts[m])?;
        }
        Ok(Self::new(name, components))
    }

    pub fn at(&self, geo: &PointGeometry) -> KillingPoint {
        let jets: Vec<Jet<f64>> = self.components.iter().map(|e| e.eval_jet(&geo.x)).collect();
        let xi: Vec4 = std::array::from_fn(|m| jets[m].value);
        let dxi = tensor2(|m, n| jets[n].grad[m]);
        let g = &geo.metric;
        let xi_lower: Vec4 = std::array::from_fn(|n| sum1(|l| g.value[(n, l)] * xi[l]));
        let dlow = tensor2(|m, n| sum1(|l| g.grad[m][(n, l)] * xi[l] + g.value[(n, l)] * dxi[m][l]));
        let cov = tensor2(|m, n| dlow[m][n] - sum1(|l| geo.christoffel[l][m][n] * xi_lower[l]));
        let curl = tensor2(|m, n| dlow[m][n] - dlow[n][m]);
        KillingPoint {
            xi,
            dxi,
            xi_lower,
            cov,
            curl,
        }
    }

    pub fn value(&self, x: &[f64; 4]) -> Vec4 {
        std::array::from_fn(|m| self.components[m].eval(x))
    }

    /// Coordinate components of the Lie bracket `[self, other]` at `x`.
    pub fn bracket(&self, other: &KillingField, x: &[f64; 4]) -> Vec4 {
        let a: Vec<Jet<f64>> = self.components.iter().map(|e| e.eval_jet(x)).collect();
        let b: Vec<Jet<f64>> = other.components.iter().map(|e| e.eval_jet(x)).collect();
        std::array::from_fn(|n| sum1(|m| a[m].value * b[n].grad[m] - b[m].value * a[n].grad[m]))
    }
}

/// `max |nabla_mu xi_nu + nabla_nu xi_mu|` at `x`.
pub fn killing_residual(chart: &SpacetimeChart, xi: &KillingField, x: &[f64; 4]) -> Result<f64> {
    Ok(xi.at(&chart.geometry(x)?).residual())
}

/// Named vector fields available on a chart: translations, rotations and
/// boosts on the Cartesian chart, the four stationary and rotational fields
/// on spherical charts, plus non-Killing examples for diagnostics.
pub fn named_fields(chart: &SpacetimeChart) -> Vec<(&'static str, [&'static str; 4])> {
    if chart.is_spherical() {
        vec![
            ("xi0", ["1", "0", "0", "0"]),
            ("xi1", ["0", "0", "-cos(phi)", "sin(phi)*cot(theta)"]),
            ("xi2", ["0", "0", "sin(phi)", "cos(phi)*cot(theta)"]),
            ("xi3", ["0", "0", "0", "1"]),
            ("dilation", ["0", "r", "0", "0"]),
        ]
    } else if chart.coords == ["t", "x", "y", "z"] {
        vec![
            ("t", ["1", "0", "0", "0"]),
            ("x", ["0", "1", "0", "0"]),
            ("y", ["0", "0", "1", "0"]),
            ("z", ["0", "0", "0", "1"]),
            ("rx", ["0", "0", "-z", "y"]),
            ("ry", ["0", "z", "0", "-x"]),
            ("rz", ["0", "-y", "x", "0"]),
            ("bx", ["x", "t", "0", "0"]),
            ("by", ["y", "0", "t", "0"]),
            ("bz", ["z", "0", "0", "t"]),
            ("dilation", ["0", "x", "0", "0"]),
        ]
    } else {
        vec![("t", ["1", "0", "0", "0"])]
    }
}

pub fn named_field(chart: &SpacetimeChart, name: &str) -> Result<KillingField> {
    let aliases = [
        ("dt", "t"),
        ("xi_0", "xi0"),
        ("xi_1", "xi1"),
        ("xi_2", "xi2"),
        ("xi_3", "xi3"),
    ];
    let key = aliases
        .iter()
        .find(|(a, _)| *a == name)
        .map(|(_, b)| *b)
        .unwrap_or(name);
    let key = if chart.is_spherical() && key == "t" { "xi0" } else { key };
    named_fields(chart)
        .into_iter()
        .find(|(n, _)| *n == key)
        .ok_or_else(|| Error::UnknownName {
            kind: "vector field",
            name: name.into(),
        })
        .and_then(|(n, c)| KillingField::parse(n, &c, chart))
}

/// The four Killing fields of a stationary spherically symmetric chart.
pub fn spherical_killing_fields(chart: &SpacetimeChart) -> Result<[KillingField; 4]> {
    if !chart.is_spherical() {
        return Err(Error::InvalidScenario(format!(
            "chart `{}` does not use (t, r, theta, phi) coordinates",
            chart.name
        )));
    }
    Ok([
        named_field(chart, "xi0")?,
        named_field(chart, "xi1")?,
        named_field(chart, "xi2")?,
        named_field(chart, "xi3")?,
    ])
}

/// Symmetric matrix helper used by reports.
pub fn metric_components(chart: &SpacetimeChart, x: &[f64; 4]) -> Rank2 {
    let g = chart.metric_at(x);
    tensor2(|m, n| g[(m, n)])
}

/// Leibniz helper kept public for downstream jet algebra.
pub fn jet_product(a: &Jet<Matrix4<f64>>, b: &Jet<Matrix4<f64>>) -> Jet<Matrix4<f64>> {
    bilinear(a, b, |x, y| x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_points() -> Vec<[f64; 4]> {
        vec![
            [0.3, 2.5, 1.1, 0.4],
            [-1.0, 3.7, 0.4, 2.9],
            [2.0, 1.6, 2.6, -1.2],
            [0.0, 5.0, PI / 2.0, 0.0],
        ]
    }

    #[test]
    fn flat_cartesian_connection_vanishes() {
        let chart = SpacetimeChart::preset("flat-cartesian").unwrap();
        let c = spin_connection(&chart, &[0.1, 0.2, -0.3, 4.0]).unwrap();
        assert_eq!(max_abs3(&c), 0.0);
    }

    #[test]
    fn flat_spherical_is_flat() {
        let chart = SpacetimeChart::preset("flat-spherical").unwrap();
        let g = chart.geometry(&[0.0, 2.0, PI / 2.0, 0.3]).unwrap();
        assert!(max_abs3(&g.connection) > 0.1);
        for x in sample_points() {
            let g = chart.geometry(&x).unwrap();
            assert!(max_abs4(&g.riemann()) < 1e-12);
            assert!(max_abs4(&g.riemann_from_christoffel()) < 1e-12);
        }
    }

    #[test]
    fn schwarzschild_curvature_matches_closed_form() {
        let chart = SpacetimeChart::preset("schwarzschild").unwrap();
        let m = chart.params["M"];
        for x in sample_points() {
            let g = chart.geometry(&x).unwrap();
            let r = g.riemann_frame();
            let k = m / x[1].powi(3);
            let expected = |a: usize, b: usize| match (a.min(b), a.max(b)) {
                (0, 1) | (2, 3) => -2.0 * k,
                _ => k,
            };
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    assert!((r[a][b][a][b] - expected(a, b)).abs() < 1e-10 * k.max(1.0), "{a}{b}");
                }
            }
            let other = g.riemann_from_christoffel();
            let own = g.riemann();
            assert!(max_abs4(&tensor4(|a, b, c, d| own[a][b][c][d] - other[a][b][c][d])) < 1e-10);
        }
    }

    #[test]
    fn compatibility_and_postulate_hold_on_every_preset() {
        for name in PRESETS {
            let chart = SpacetimeChart::preset(name).unwrap();
            for x in sample_points() {
                let g = chart.geometry(&x).unwrap();
                assert!(g.metric_compatibility() < 1e-10, "{name}");
                assert!(g.tetrad_postulate() < 1e-10, "{name}");
                assert!(g.connection_antisymmetry() < 1e-12, "{name}");
                assert!(g.bianchi_residual() < 1e-8, "{name}");
                assert!(chart.signature_ok(&x), "{name}");
                assert!(chart.fd_crosscheck(&x).unwrap() < 1e-8, "{name}");
            }
        }
    }

    #[test]
    fn stationary_metric_components() {
        let chart = SpacetimeChart::preset("stationary-spherical").unwrap();
        let x = [0.0, 2.0, 1.0, 0.0];
        let g = chart.metric_at(&x);
        let (a, b, c, eta): (f64, f64, f64, f64) = (-1.0 / 8.0, 1.0 / 8.0, 2f64.ln() + 0.05, 0.1);
        assert!((g[(0, 0)] - (2.0 * a).exp()).abs() < 1e-12);
        assert!((g[(0, 1)] - (a + b).exp() * eta.sinh()).abs() < 1e-12);
        assert!((g[(1, 1)] + (2.0 * b).exp()).abs() < 1e-12);
        assert!((g[(2, 2)] + (2.0 * c).exp()).abs() < 1e-12);
        assert!((g[(3, 3)] + (2.0 * c).exp() * 1f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn killing_fields() {
        let flat = SpacetimeChart::preset("flat-cartesian").unwrap();
        let x = [0.2, 0.7, -0.4, 1.3];
        for name in ["t", "x", "rz", "rx", "bx"] {
            let xi = named_field(&flat, name).unwrap();
            assert!(killing_residual(&flat, &xi, &x).unwrap() < 1e-15, "{name}");
        }
        let dil = named_field(&flat, "dilation").unwrap();
        assert_eq!(killing_residual(&flat, &dil, &x).unwrap(), 2.0);

        for name in ["flat-spherical", "schwarzschild", "stationary-spherical"] {
            let chart = SpacetimeChart::preset(name).unwrap();
            let fields = spherical_killing_fields(&chart).unwrap();
            for x in sample_points() {
                for xi in &fields {
                    assert!(killing_residual(&chart, xi, &x).unwrap() < 1e-10, "{name} {}", xi.name);
                }
                let b = fields[1].bracket(&fields[2], &x);
                let x3 = fields[3].value(&x);
                let closes = (0..4).all(|m| (b[m] - x3[m]).abs() < 1e-8) || (0..4).all(|m| (b[m] + x3[m]).abs() < 1e-8);
                assert!(closes, "{b:?}");
            }
        }
    }

    #[test]
    fn xi1_read_off() {
        let chart = SpacetimeChart::preset("flat-spherical").unwrap();
        let xi = named_field(&chart, "xi1").unwrap();
        let v = xi.value(&[0.0, 1.0, PI / 2.0, 0.0]);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[2], -1.0);
        assert!(v[3].abs() < 1e-16);
    }

    #[test]
    fn domain_and_degeneracy_errors() {
        let chart = SpacetimeChart::preset("schwarzschild").unwrap();
        assert!(matches!(
            chart.geometry(&[0.0, 0.9, 1.0, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
        let flat = SpacetimeChart::preset("flat-spherical").unwrap();
        assert!(matches!(
            flat.geometry(&[0.0, 1.0, 0.0, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
        let mut spec = ChartSpec::preset("flat-cartesian").unwrap();
        spec.tetrad[3][3] = "x".into();
        let bad = SpacetimeChart::from_spec(&spec).unwrap();
        assert!(matches!(
            bad.geometry(&[0.0, 0.0, 1.0, 1.0]),
            Err(Error::DegenerateTetrad { .. })
        ));
        assert!(bad.geometry(&[0.0, 1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn chart_from_json() {
        let text = r#"{"coords": ["t", "r", "theta", "phi"],
            "tetrad": [["sqrt(1-2*M/r)", "0", "0", "0"], ["0", "1/sqrt(1-2*M/r)", "0", "0"],
                       ["0", "0", "r", "0"], ["0", "0", "0", "r*sin(theta)"]],
            "params": {"M": 1.0}, "domain": ["r > 2*M", "theta > 0", "theta < pi"]}"#;
        let chart = SpacetimeChart::from_json(text).unwrap();
        let g = chart.geometry(&[0.0, 4.0, 1.0, 0.0]).unwrap();
        assert!((g.g(0, 0) - 0.5).abs() < 1e-15);
        assert!(matches!(
            chart.geometry(&[0.0, 1.5, 1.0, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
    }
}
