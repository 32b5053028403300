//! Scenario files, built-in scenarios and the three verification runs
//! behind the command-line front end.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{basis, check_algebra_identities, Spinor};
use crate::connection::{CurvatureResiduals, Kinematics, TransportResiduals};
use crate::dynamics::{
    dirac_from, energy_from, momentum_identity_residual, spin_divergence_identity, spin_divergence_residual,
    DiracResiduals, DynamicsContext,
};
use crate::error::{Error, Result};
use crate::field::{FrameSpec, PolarField, PolarFieldSpec};
use crate::geometry::{named_field, named_fields, ChartSpec, KillingField, SpacetimeChart};
use crate::lie::{equivalence_at, slope_summary, Equivalence, LiePoint, LieReport, SlopeSummary, WEAK_LIMIT};
use crate::observables::{aux_residual_normalized, bilinears, fierz_residuals, random_spinors};
use crate::polar::{polar_decompose, polar_reconstruct};
use crate::sampling::{sample_points, SampleRegion};
use crate::spherical::{nogo_certificate, NogoCertificate, SphericalScenario};
use crate::tensor::sum1;

pub const SCHEMA_VERSION: u32 = 1;

/// A preset name or a full chart description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChartRef {
    Preset(String),
    Spec(ChartSpec),
}

/// A named vector field of the chart or explicit coordinate components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KillingRef {
    Named(String),
    Custom { name: String, components: [String; 4] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub clifford: f64,
    pub fierz: f64,
    pub polar: f64,
    pub geometry: f64,
    pub transport: f64,
    pub curvature: f64,
    pub faraday: f64,
    pub dynamics: f64,
    pub killing: f64,
    pub lie: f64,
    pub theorem: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            clifford: 1e-14,
            fierz: 1e-10,
            polar: 1e-10,
            geometry: 1e-9,
            transport: 1e-8,
            curvature: 1e-6,
            faraday: 1e-10,
            dynamics: 1e-8,
            killing: 1e-10,
            lie: 1e-8,
            theorem: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn uniform(t: f64) -> Self {
        Self {
            clifford: t,
            fierz: t,
            polar: t,
            geometry: t,
            transport: t,
            curvature: t,
            faraday: t,
            dynamics: t,
            killing: t,
            lie: t,
            theorem: t,
        }
    }
}

fn default_count() -> usize {
    20
}

fn default_spinors() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<PolarFieldSpec>,
    /// Spherical ansatz; replaces `chart` and `field` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spherical: Option<SphericalScenario>,
    #[serde(default)]
    pub mass: f64,
    /// Checks the field equations as well.
    #[serde(default)]
    pub on_shell: bool,
    #[serde(default)]
    pub killing: Vec<KillingRef>,
    #[serde(default)]
    pub samples: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<SampleRegion>,
    #[serde(default = "default_count")]
    pub sample_count: usize,
    /// Random spinors for the algebraic suites.
    #[serde(default = "default_spinors")]
    pub spinor_count: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub killing: Vec<String>,
}

pub const BUILTINS: [&str; 9] = [
    "flat-plane-wave",
    "flat-vortex",
    "flat-constant",
    "flat-generic",
    "spherical-generic",
    "schwarzschild-generic",
    "stationary-generic",
    "spherical-ansatz",
    "schwarzschild-ansatz",
];

/// A generic smooth field in `(t, x, y, z)` or `(t, r, theta, phi)`.
pub fn generic_field(coords: [&str; 4]) -> PolarFieldSpec {
    let [t, a, b, c] = coords;
    PolarFieldSpec {
        phi: format!("1 + sin({a})*cos({b})/10"),
        beta: format!("3*{a}/10 - {t}/5"),
        frame: FrameSpec {
            rapidities: [format!("sin({a})/5"), format!("{t}/10"), format!("3*cos({b})/10")],
            angles: [format!("2*{c}/5"), format!("{a}/5"), format!("-3*{b}*{a}/10")],
        },
        potential: [
            format!("1/(5 + {a}^2)"),
            format!("{t}/20"),
            format!("sin({b})/10"),
            "3/10".into(),
        ],
        q: 1.3,
        zeta: format!("{t}/2 + {c}/10"),
    }
}

/// Rest field with phase `k atan2(y, x)`, `k = (1 - cond)/2`: weakly
/// invariant along `rz` with the given value of the scalar condition.
pub fn vortex_field(cond: f64) -> PolarFieldSpec {
    let mut spec = PolarFieldSpec::constant(1.0);
    spec.q = 1.0;
    spec.zeta = format!("{}*atan2(y, x)", (1.0 - cond) / 2.0);
    spec
}

/// Plane wave of mass `m` boosted along `x` with the given rapidity.
pub fn plane_wave(m: f64, rapidity: f64) -> PolarFieldSpec {
    let mut spec = PolarFieldSpec::constant(1.0);
    spec.q = 1.0;
    spec.frame.rapidities[0] = format!("{rapidity}");
    spec.zeta = format!("{m}*({}*t - {}*x)", rapidity.cosh(), rapidity.sinh());
    spec
}

fn away_from_axis() -> SampleRegion {
    SampleRegion {
        lo: [-1.0, 0.2, 0.2, -1.0],
        hi: [1.0, 1.0, 1.0, 1.0],
    }
}

impl Scenario {
    fn base(name: &str, chart: &str, field: PolarFieldSpec, killing: &[&str]) -> Self {
        Self {
            name: name.into(),
            chart: Some(ChartRef::Preset(chart.into())),
            field: Some(field),
            spherical: None,
            mass: 0.0,
            on_shell: false,
            killing: killing.iter().map(|k| KillingRef::Named(k.to_string())).collect(),
            samples: vec![],
            region: None,
            sample_count: default_count(),
            spinor_count: default_spinors(),
            tolerances: Tolerances::default(),
            seed: 0,
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let flat = ["t", "x", "y", "z", "rx", "ry", "rz", "bx", "by", "bz"];
        let sph = ["xi0", "xi1", "xi2", "xi3"];
        let spherical = ["t", "r", "theta", "phi"];
        let s = match name {
            "flat-plane-wave" => {
                let mut s = Self::base(name, "flat-cartesian", plane_wave(1.0, 0.3), &["t", "x", "y", "z"]);
                s.mass = 1.0;
                s.on_shell = true;
                s
            }
            "flat-vortex" => {
                let mut s = Self::base(name, "flat-cartesian", vortex_field(0.0), &["rz", "t", "z"]);
                s.region = Some(away_from_axis());
                s
            }
            "flat-constant" => Self::base(
                name,
                "flat-cartesian",
                PolarFieldSpec::constant(1.0),
                &["t", "x", "y", "z"],
            ),
            "flat-generic" => Self::base(name, "flat-cartesian", generic_field(["t", "x", "y", "z"]), &flat),
            "spherical-generic" => Self::base(name, "flat-spherical", generic_field(spherical), &sph),
            "schwarzschild-generic" => Self::base(name, "schwarzschild", generic_field(spherical), &sph),
            "stationary-generic" => Self::base(name, "stationary-spherical", generic_field(spherical), &sph),
            "spherical-ansatz" | "schwarzschild-ansatz" => {
                let mut scn = if name == "spherical-ansatz" {
                    SphericalScenario::stationary()
                } else {
                    SphericalScenario::schwarzschild()
                };
                scn.zeta = "3*t/10".into();
                Self {
                    chart: None,
                    field: None,
                    spherical: Some(scn),
                    ..Self::base(name, "flat-spherical", PolarFieldSpec::constant(1.0), &sph)
                }
            }
            _ => {
                return Err(Error::UnknownName {
                    kind: "scenario",
                    name: name.into(),
                })
            }
        };
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a scenario file, or a built-in scenario when no such file exists.
    pub fn load(source: &str) -> Result<Self> {
        let path = Path::new(source);
        if path.exists() {
            return Self::from_json(&std::fs::read_to_string(path)?);
        }
        if let Some(name) = source.strip_prefix("builtin:") {
            return Self::builtin(name);
        }
        if BUILTINS.contains(&source) {
            return Self::builtin(source);
        }
        Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("`{source}` is neither a readable file nor a built-in scenario"),
        )))
    }

    pub fn chart(&self) -> Result<SpacetimeChart> {
        if let Some(s) = &self.spherical {
            if self.chart.is_some() || self.field.is_some() {
                return Err(Error::InvalidScenario(
                    "give either a spherical section or chart and field, not both".into(),
                ));
            }
            return s.chart();
        }
        match &self.chart {
            Some(ChartRef::Preset(name)) => SpacetimeChart::preset(name),
            Some(ChartRef::Spec(spec)) => SpacetimeChart::from_spec(spec),
            None => Err(Error::InvalidScenario("scenario has no chart".into())),
        }
    }

    fn field_spec(&self) -> Result<PolarFieldSpec> {
        match (&self.spherical, &self.field) {
            (Some(s), _) => Ok(s.field_spec()),
            (None, Some(f)) => Ok(f.clone()),
            (None, None) => Err(Error::InvalidScenario("scenario has no field".into())),
        }
    }

    pub fn prepare(&self, opts: &RunOptions) -> Result<Prepared> {
        let chart = self.chart()?;
        let field = PolarField::new(&self.field_spec()?, &chart)?;
        let seed = opts.seed.unwrap_or(self.seed);
        let mut samples = if !self.samples.is_empty() {
            self.samples.clone()
        } else if let Some(s) = self.spherical.as_ref().filter(|s| !s.samples.is_empty()) {
            s.samples.clone()
        } else {
            let region = self.region.clone().unwrap_or_else(|| SampleRegion::default_for(&chart));
            sample_points(&chart, &region, opts.samples.unwrap_or(self.sample_count), seed)?
        };
        if let Some(n) = opts.samples {
            samples.truncate(n);
        }
        if samples.is_empty() {
            return Err(Error::InvalidScenario("no sample points".into()));
        }
        for x in &samples {
            chart.check_point(x)?;
        }
        let names: Vec<KillingRef> = if opts.killing.is_empty() {
            self.killing.clone()
        } else {
            opts.killing.iter().map(|k| KillingRef::Named(k.clone())).collect()
        };
        let killing = names
            .iter()
            .map(|k| match k {
                KillingRef::Named(n) => named_field(&chart, n),
                KillingRef::Custom { name, components } => {
                    let c: [&str; 4] = std::array::from_fn(|m| components[m].as_str());
                    KillingField::parse(name, &c, &chart)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Prepared {
            name: self.name.clone(),
            chart,
            field,
            samples,
            killing,
            mass: self.mass,
            on_shell: self.on_shell,
            spinor_count: self.spinor_count,
            tolerances: opts
                .tolerance
                .map(Tolerances::uniform)
                .unwrap_or_else(|| self.tolerances.clone()),
            tolerance_override: opts.tolerance,
            seed,
            spherical: self.spherical.clone(),
        })
    }
}

/// A scenario with its chart, field, samples and vector fields resolved.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    pub chart: SpacetimeChart,
    pub field: PolarField,
    pub samples: Vec<[f64; 4]>,
    pub killing: Vec<KillingField>,
    pub mass: f64,
    pub on_shell: bool,
    pub spinor_count: usize,
    pub tolerances: Tolerances,
    pub tolerance_override: Option<f64>,
    pub seed: u64,
    pub spherical: Option<SphericalScenario>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<[f64; 4]>,
}

impl Check {
    /// Largest residual over the values; NaN counts as a failure.
    pub fn over(name: &str, tolerance: f64, values: impl IntoIterator<Item = (Option<[f64; 4]>, f64)>) -> Self {
        let mut worst = (None, 0.0);
        for (x, v) in values {
            if v.is_nan() || v > worst.1 {
                worst = (x, v);
                if v.is_nan() {
                    break;
                }
            }
        }
        Self {
            name: name.into(),
            max_residual: worst.1,
            tolerance,
            passed: worst.1 <= tolerance,
            worst_point: worst.0,
        }
    }

    pub fn single(name: &str, tolerance: f64, value: f64) -> Self {
        Self::over(name, tolerance, [(None, value)])
    }
}

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn failures(checks: &[Check]) -> Vec<String> {
    checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
}

/// Results of the identity suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    pub chart: String,
    pub seed: u64,
    pub samples: Vec<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_override: Option<f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub failures: Vec<String>,
}

struct PointChecks {
    x: [f64; 4],
    geometry: f64,
    transport: TransportResiduals,
    curvature: CurvatureResiduals,
    spinor_fierz: f64,
    spinor_round_trip: f64,
    formulation_gap: f64,
    dirac: DiracResiduals,
    momentum: f64,
    energy_gap: f64,
    energy_symmetry: f64,
    divergence: f64,
    divergence_on_shell: f64,
    killing: Vec<f64>,
}

fn round_trip_error(psi: &Spinor) -> Result<f64> {
    let back = polar_reconstruct(&polar_decompose(psi)?)?;
    Ok((back.components - psi.components).camax() / 1f64.max(psi.components.camax()))
}

fn point_checks(p: &Prepared, x: &[f64; 4]) -> Result<PointChecks> {
    let kin = Kinematics::new(&p.chart, &p.field, x)?;
    let geo = &kin.geo;
    let ctx = DynamicsContext { mass: p.mass };
    let psi = kin.field.spinor_value();
    let dirac = dirac_from(&kin, &ctx)?;
    let energy = energy_from(&kin);
    Ok(PointChecks {
        x: *x,
        geometry: geo
            .metric_compatibility()
            .max(geo.tetrad_postulate())
            .max(geo.connection_antisymmetry()),
        transport: kin.transport_residuals(),
        curvature: kin.curvature_residuals(),
        spinor_fierz: fierz_residuals(&bilinears(&psi)?).max(),
        spinor_round_trip: round_trip_error(&psi)?,
        formulation_gap: dirac.formulation_gap,
        momentum: momentum_identity_residual(&kin, &ctx)?,
        energy_gap: energy.form_gap(),
        energy_symmetry: energy.symmetry_residual(),
        divergence: spin_divergence_identity(&kin, &ctx)?,
        divergence_on_shell: spin_divergence_residual(&kin, &ctx).abs(),
        killing: p.killing.iter().map(|k| k.at(geo).residual()).collect(),
        dirac,
    })
}

pub fn run_verify(p: &Prepared) -> Result<VerifyReport> {
    let t = &p.tolerances;
    let mut checks = vec![Check::single(
        "clifford",
        t.clifford,
        check_algebra_identities(basis()).max(),
    )];
    let spinors = random_spinors(p.seed, p.spinor_count);
    let algebraic: Vec<(f64, f64, f64)> = spinors
        .par_iter()
        .map(|psi| -> Result<(f64, f64, f64)> {
            Ok((
                fierz_residuals(&bilinears(psi)?).max(),
                aux_residual_normalized(psi)?,
                round_trip_error(psi)?,
            ))
        })
        .collect::<Result<_>>()?;
    checks.push(Check::over("fierz", t.fierz, algebraic.iter().map(|r| (None, r.0))));
    checks.push(Check::over("fierz_aux", t.fierz, algebraic.iter().map(|r| (None, r.1))));
    checks.push(Check::over(
        "polar_round_trip",
        t.polar,
        algebraic.iter().map(|r| (None, r.2)),
    ));

    let points: Vec<PointChecks> = p
        .samples
        .par_iter()
        .map(|x| point_checks(p, x))
        .collect::<Result<_>>()?;
    let over = |name: &str, tol: f64, f: &dyn Fn(&PointChecks) -> f64| {
        Check::over(name, tol, points.iter().map(|pc| (Some(pc.x), f(pc))))
    };
    checks.push(over("geometry", t.geometry, &|pc| pc.geometry));
    checks.push(over("field_fierz", t.fierz, &|pc| pc.spinor_fierz));
    checks.push(over("field_round_trip", t.polar, &|pc| pc.spinor_round_trip));
    for (k, (name, _)) in TransportResiduals::default().named().iter().enumerate() {
        checks.push(over(name, t.transport, &|pc| pc.transport.named()[k].1));
    }
    checks.push(over("riemann", t.curvature, &|pc| pc.curvature.riemann));
    checks.push(over("faraday", t.faraday, &|pc| pc.curvature.faraday));
    checks.push(over("dirac_forms", t.dynamics, &|pc| pc.formulation_gap));
    checks.push(over("momentum_identity", t.dynamics, &|pc| pc.momentum));
    checks.push(over("energy_forms", t.dynamics, &|pc| pc.energy_gap));
    checks.push(over("energy_symmetry", t.dynamics, &|pc| pc.energy_symmetry));
    checks.push(over("spin_divergence", t.dynamics, &|pc| pc.divergence));
    if p.on_shell {
        checks.push(over("dirac_equation", t.dynamics, &|pc| pc.dirac.max()));
        checks.push(over("dirac_spinor", t.dynamics, &|pc| pc.dirac.spinor));
        checks.push(over("spin_divergence_on_shell", t.dynamics, &|pc| {
            pc.divergence_on_shell
        }));
    }
    for (k, xi) in p.killing.iter().enumerate() {
        checks.push(over(&format!("killing_{}", xi.name), t.killing, &|pc| pc.killing[k]));
    }
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify".into(),
        scenario: p.name.clone(),
        chart: p.chart.name.clone(),
        seed: p.seed,
        samples: p.samples.clone(),
        tolerance_override: p.tolerance_override,
        passed: all_passed(&checks),
        failures: failures(&checks),
        checks,
    })
}

/// Lie data for one vector field at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointLie {
    #[serde(flatten)]
    pub report: LieReport,
    /// `T_{mu nu} xi^mu xi^nu`
    pub energy_contraction: f64,
    pub weakly_invariant: bool,
    pub strongly_invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldInvariance {
    pub name: String,
    pub points: Vec<PointLie>,
    /// Points where the bilinears are invariant.
    pub equivalence: Vec<Equivalence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    pub chart: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_override: Option<f64>,
    pub fields: Vec<FieldInvariance>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Killing fields to use when the scenario names none.
fn default_killing(chart: &SpacetimeChart) -> Result<Vec<KillingField>> {
    let names: Vec<&str> = if chart.is_spherical() {
        vec!["xi0", "xi1", "xi2", "xi3"]
    } else {
        named_fields(chart)
            .into_iter()
            .map(|(n, _)| n)
            .filter(|n| *n != "dilation")
            .collect()
    };
    names.into_iter().map(|n| named_field(chart, n)).collect()
}

fn lie_point(p: &Prepared, xi: &KillingField, x: &[f64; 4]) -> Result<PointLie> {
    let lp = LiePoint::new(&p.chart, &p.field, xi, x)?;
    let report = lp.report();
    let g = &lp.kin.geo;
    let w: [f64; 4] = std::array::from_fn(|a| sum1(|m| g.e(a, m) * lp.xi.xi[m]));
    let norm = lp.kin.field.spinor.value.norm();
    Ok(PointLie {
        energy_contraction: energy_from(&lp.kin).contract(&w),
        weakly_invariant: report.weak_residuals.max() <= WEAK_LIMIT,
        strongly_invariant: report.strong_residual <= p.tolerances.theorem * 1f64.max(norm),
        report,
    })
}

pub fn run_invariance(p: &Prepared) -> Result<InvarianceReport> {
    let t = &p.tolerances;
    let fields = if p.killing.is_empty() {
        default_killing(&p.chart)?
    } else {
        p.killing.clone()
    };
    let mut out = Vec::with_capacity(fields.len());
    let mut checks = Vec::new();
    for xi in &fields {
        let points: Vec<(PointLie, Option<Equivalence>)> = p
            .samples
            .par_iter()
            .map(|x| -> Result<_> {
                let pl = lie_point(p, xi, x)?;
                let eq = if pl.weakly_invariant && p.field.at(x).phi.value != 0.0 {
                    Some(equivalence_at(&LiePoint::new(&p.chart, &p.field, xi, x)?))
                } else {
                    None
                };
                Ok((pl, eq))
            })
            .collect::<Result<_>>()?;
        let over = |what: &str, tol: f64, f: &dyn Fn(&PointLie) -> f64| {
            Check::over(
                &format!("{}_{what}", xi.name),
                tol,
                points.iter().map(|(pl, _)| (Some(pl.report.point), f(pl))),
            )
        };
        checks.push(over("lie_forms", t.lie, &|pl| pl.report.form_agreement));
        checks.push(over("lie_gamma", t.lie, &|pl| pl.report.lie_gamma_residual));
        checks.push(over("lie_gamma_identity", t.lie, &|pl| pl.report.lie_gamma_identity));
        checks.push(over("bilinear_consistency", t.lie, &|pl| {
            pl.report.bilinear_consistency
        }));
        checks.push(over("final_equation", t.lie, &|pl| pl.report.final_equation));
        let equivalence: Vec<Equivalence> = points.iter().filter_map(|(_, e)| e.clone()).collect();
        checks.push(Check::over(
            &format!("{}_theorem", xi.name),
            t.theorem,
            equivalence
                .iter()
                .map(|e| (Some(e.point), (e.bracket_norm - 0.5 * e.cond.abs()).abs())),
        ));
        out.push(FieldInvariance {
            name: xi.name.clone(),
            slope: slope_summary(&equivalence),
            points: points.into_iter().map(|(pl, _)| pl).collect(),
            equivalence,
        });
    }
    Ok(InvarianceReport {
        schema_version: SCHEMA_VERSION,
        command: "invariance".into(),
        scenario: p.name.clone(),
        chart: p.chart.name.clone(),
        seed: p.seed,
        tolerance_override: p.tolerance_override,
        fields: out,
        passed: all_passed(&checks),
        failures: failures(&checks),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NogoReport {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    pub certificate: NogoCertificate,
    pub passed: bool,
}

pub fn run_nogo(p: &Prepared) -> Result<NogoReport> {
    if !p.chart.is_spherical() {
        return Err(Error::InvalidScenario(format!(
            "chart `{}` is not spherical; the no-go certificate needs (t, r, theta, phi)",
            p.chart.name
        )));
    }
    let scn = p
        .spherical
        .as_ref()
        .ok_or_else(|| Error::InvalidScenario("the no-go certificate needs a `spherical` ansatz section".into()))?;
    let certificate = nogo_certificate(scn, &p.samples)?;
    Ok(NogoReport {
        schema_version: SCHEMA_VERSION,
        command: "nogo".into(),
        scenario: p.name.clone(),
        passed: certificate.established,
        certificate,
    })
}
