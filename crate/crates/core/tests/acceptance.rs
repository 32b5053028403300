//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use polar_dirac::clifford::check_algebra_identities;
use polar_dirac::connection::Kinematics;
use polar_dirac::dynamics::energy_from;
use polar_dirac::error::Error;
use polar_dirac::field::{PolarField, PolarFieldSpec};
use polar_dirac::geometry::{named_field, spherical_killing_fields, SpacetimeChart};
use polar_dirac::harness::{generic_field, vortex_field};
use polar_dirac::lie::{equivalence_check, slope_summary, LiePoint};
use polar_dirac::observables::{aux_residual_normalized, bilinears, fierz_residuals, random_spinors};
use polar_dirac::polar::{polar_decompose, polar_reconstruct};
use polar_dirac::sampling::{sample_points, SampleRegion};
use polar_dirac::spherical::{nogo_certificate, SphericalScenario};
use polar_dirac::{basis, Spinor};

const CHARTS: [&str; 4] = [
    "flat-cartesian",
    "flat-spherical",
    "schwarzschild",
    "stationary-spherical",
];
const SPHERICAL: [&str; 3] = ["flat-spherical", "schwarzschild", "stationary-spherical"];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn fmax(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter()
        .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn coords(chart: &str) -> [&'static str; 4] {
    if chart == "flat-cartesian" {
        ["t", "x", "y", "z"]
    } else {
        ["t", "r", "theta", "phi"]
    }
}

fn setup(name: &str, n: usize, seed: u64) -> (SpacetimeChart, PolarField, Vec<[f64; 4]>) {
    let chart = SpacetimeChart::preset(name).unwrap();
    let field = PolarField::new(&generic_field(coords(name)), &chart).unwrap();
    let pts = sample_points(&chart, &SampleRegion::default_for(&chart), n, seed).unwrap();
    (chart, field, pts)
}

fn clifford() -> Outcome {
    let start = Instant::now();
    let r = check_algebra_identities(basis());
    let secs = start.elapsed().as_secs_f64();
    let worst = fmax(r.named().iter().map(|(_, v)| *v));
    outcome(
        worst < 1e-14 && secs < 1.0,
        format!("max residual {worst:.1e} over 6 identities, {secs:.3} s"),
    )
}

fn fierz() -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    for psi in random_spinors(2024, 1000) {
        let b = bilinears(&psi).unwrap();
        worst = fmax([worst, fierz_residuals(&b).max(), aux_residual_normalized(&psi).unwrap()]);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-10 && secs < 5.0,
        format!("max relative residual {worst:.1e} on 1000 spinors, {secs:.3} s"),
    )
}

fn round_trip() -> Outcome {
    let mut worst = 0f64;
    for psi in random_spinors(2025, 1000) {
        let back = polar_reconstruct(&polar_decompose(&psi).unwrap()).unwrap();
        worst = worst.max((back.components - psi.components).camax());
    }
    let flags = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 2.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ];
    let rejected = flags.iter().all(|v| {
        matches!(
            polar_decompose(&Spinor::from_real(*v)),
            Err(Error::SingularSpinor { .. })
        )
    });
    outcome(
        worst < 1e-10 && rejected,
        format!("max componentwise error {worst:.1e} on 1000 spinors, flag spinors rejected: {rejected}"),
    )
}

fn transport() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for name in CHARTS {
        let (chart, field, pts) = setup(name, 20, 4);
        let worst = fmax(pts.iter().map(|x| {
            let r = Kinematics::new(&chart, &field, x).unwrap().transport_residuals();
            fmax([r.du, r.ds, r.rfull])
        }));
        ok &= worst < 1e-8;
        parts.push(format!("{name} {worst:.1e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && secs < 30.0,
        format!("20 points each: {}; {secs:.2} s", parts.join(", ")),
    )
}

fn polynomial_potential(name: &str) -> PolarFieldSpec {
    let mut spec = generic_field(coords(name));
    let [t, a, b, c] = coords(name);
    spec.potential = [
        format!("{t}*{a}/10"),
        format!("{b}^2/5 + {t}"),
        format!("{a}*{c}/3"),
        format!("{t}^2/7 - {a}*{b}"),
    ];
    spec
}

fn curvature() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in CHARTS {
        let chart = SpacetimeChart::preset(name).unwrap();
        let field = PolarField::new(&polynomial_potential(name), &chart).unwrap();
        let pts = sample_points(&chart, &SampleRegion::default_for(&chart), 20, 5).unwrap();
        let (mut riem, mut far) = (0f64, 0f64);
        for x in &pts {
            let r = Kinematics::new(&chart, &field, x).unwrap().curvature_residuals();
            riem = fmax([riem, r.riemann]);
            far = fmax([far, r.faraday]);
        }
        let limit = if name.starts_with("flat") { 1e-9 } else { 1e-6 };
        ok &= riem < limit && far < 1e-10;
        parts.push(format!("{name} riemann {riem:.1e} faraday {far:.1e}"));
    }
    outcome(ok, parts.join(", "))
}

fn flat_fields() -> Vec<&'static str> {
    vec!["t", "x", "y", "z", "rx", "ry", "rz"]
}

fn lie_identity() -> Outcome {
    let (mut forms, mut gamma, mut pairs) = (0f64, 0f64, 0);
    for name in CHARTS {
        let (chart, field, pts) = setup(name, 10, 6);
        let fields = if chart.is_spherical() {
            spherical_killing_fields(&chart).unwrap().to_vec()
        } else {
            flat_fields().iter().map(|n| named_field(&chart, n).unwrap()).collect()
        };
        for xi in &fields {
            for x in &pts {
                let r = LiePoint::new(&chart, &field, xi, x).unwrap().report();
                forms = fmax([forms, r.form_agreement]);
                gamma = fmax([gamma, r.lie_gamma_residual]);
                pairs += 1;
            }
        }
    }
    outcome(
        forms < 1e-8 && gamma < 1e-10,
        format!("{pairs} point-field pairs: tetrad vs covariant form {forms:.1e}, gamma residual {gamma:.1e}"),
    )
}

fn final_equation() -> Outcome {
    let mut worst = 0f64;
    let mut pairs = 0;
    for name in CHARTS {
        let (chart, field, pts) = setup(name, 8, 7);
        let fields = if chart.is_spherical() {
            spherical_killing_fields(&chart).unwrap().to_vec()
        } else {
            flat_fields().iter().map(|n| named_field(&chart, n).unwrap()).collect()
        };
        for xi in &fields {
            for x in &pts {
                worst = fmax([
                    worst,
                    LiePoint::new(&chart, &field, xi, x).unwrap().report().final_equation,
                ]);
                pairs += 1;
            }
        }
    }
    for scn in [SphericalScenario::stationary(), SphericalScenario::schwarzschild()] {
        let chart = scn.chart().unwrap();
        let field = PolarField::new(&scn.field_spec(), &chart).unwrap();
        for xi in spherical_killing_fields(&chart).unwrap() {
            for x in scn.sample_points(&chart, 8, 8).unwrap() {
                worst = fmax([
                    worst,
                    LiePoint::new(&chart, &field, &xi, &x).unwrap().report().final_equation,
                ]);
                pairs += 1;
            }
        }
    }
    outcome(
        worst < 1e-8 && pairs >= 100,
        format!("max residual {worst:.1e} over {pairs} pairs"),
    )
}

fn theorem() -> Outcome {
    let chart = SpacetimeChart::preset("flat-cartesian").unwrap();
    let rz = named_field(&chart, "rz").unwrap();
    let region = SampleRegion {
        lo: [-1.0, 0.2, 0.2, -1.0],
        hi: [1.0, 1.0, 1.0, 1.0],
    };
    let pts = sample_points(&chart, &region, 10, 9).unwrap();
    let mut enforced = 0f64;
    let f0 = PolarField::new(&vortex_field(0.0), &chart).unwrap();
    for x in &pts {
        enforced = fmax([enforced, equivalence_check(&f0, &chart, &rz, x).unwrap().bracket_norm]);
    }
    let mut checks = Vec::new();
    for c in [0.1, 0.2, 0.5] {
        let f = PolarField::new(&vortex_field(c), &chart).unwrap();
        for x in &pts {
            checks.push(equivalence_check(&f, &chart, &rz, x).unwrap());
        }
    }
    let s = slope_summary(&checks).unwrap();
    let spread = (s.max_ratio - s.min_ratio) / s.slope;
    outcome(
        enforced < 1e-8 && (s.normalized_slope - 1.0).abs() < 0.1 && spread < 1e-6,
        format!(
            "bracket {enforced:.1e} at cond = 0; slope {:.6} raw, {:.6} normalized, over {} detuned points",
            s.slope, s.normalized_slope, s.points
        ),
    )
}

fn energy() -> Outcome {
    let chart = SpacetimeChart::preset("flat-cartesian").unwrap();
    let xi = named_field(&chart, "t").unwrap();
    let m = 1.0;
    let mut spec = generic_field(["0", "x", "y", "z"]);
    spec.potential[0] = "0".into();
    let pts = sample_points(&chart, &SampleRegion::default_for(&chart), 10, 10).unwrap();
    let contraction = |spec: &PolarFieldSpec, x: &[f64; 4]| -> (f64, f64, f64) {
        let field = PolarField::new(spec, &chart).unwrap();
        let p = LiePoint::new(&chart, &field, &xi, x).unwrap();
        let w: [f64; 4] = std::array::from_fn(|a| (0..4).map(|mu| p.kin.geo.e(a, mu) * p.xi.xi[mu]).sum());
        let t = energy_from(&p.kin).contract(&w);
        (t, p.kin.field.phi.value.powi(2), p.cond_scalar())
    };
    let (mut held, mut weak) = (0f64, 0f64);
    for x in &pts {
        let field = PolarField::new(&spec, &chart).unwrap();
        weak = fmax([
            weak,
            LiePoint::new(&chart, &field, &xi, x)
                .unwrap()
                .report()
                .weak_residuals
                .max(),
        ]);
        let (t, phi2, cond) = contraction(&spec, x);
        held = fmax([held, t.abs() / (phi2 * m), cond.abs()]);
    }
    let delta = 1e-3;
    let mut detuned = spec.clone();
    detuned.zeta = format!("{} + {delta}*t", spec.zeta);
    let ratios: Vec<f64> = pts
        .iter()
        .map(|x| {
            let (t, phi2, _) = contraction(&detuned, x);
            t.abs() / (phi2 * delta)
        })
        .collect();
    let (lo, hi) = (
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        fmax(ratios.iter().cloned()),
    );
    outcome(
        held < 1e-8 && weak < 1e-12 && lo > 0.1 && hi < 10.0,
        format!("|T(xi,xi)|/(phi^2 m) {held:.1e} with cond = 0; detuned by {delta:e}: |T|/(phi^2 delta) in [{lo:.3}, {hi:.3}]"),
    )
}

fn nogo() -> Outcome {
    let start = Instant::now();
    let mut scenarios: Vec<SphericalScenario> = (0..6).map(SphericalScenario::random).collect();
    scenarios.push(SphericalScenario::schwarzschild());
    let static_ln = scenarios.iter().any(|s| s.eta == "0" && s.c == "ln(r)");
    let mut discrepancies = Vec::new();
    let mut established = true;
    for scn in &scenarios {
        let chart = scn.chart().unwrap();
        let pts = scn.sample_points(&chart, 10, 11).unwrap();
        let cert = nogo_certificate(scn, &pts).unwrap();
        discrepancies.push(cert.discrepancy);
        established &= cert.established;
    }
    let secs = start.elapsed().as_secs_f64();
    let exact = discrepancies.iter().all(|d| *d == 1.0);
    outcome(
        exact && established && static_ln && secs < 5.0,
        format!(
            "{} scenarios, discrepancy exactly 1 in all: {exact}, static ln r case: {static_ln}, {secs:.2} s",
            scenarios.len()
        ),
    )
}

fn killing() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in SPHERICAL {
        let chart = SpacetimeChart::preset(name).unwrap();
        let region = SampleRegion {
            lo: [-1.0, 1.5, 0.1, 0.0],
            hi: [1.0, 6.0, PI - 0.1, 2.0 * PI],
        };
        let pts = sample_points(&chart, &region, 20, 12).unwrap();
        let worst = fmax(spherical_killing_fields(&chart).unwrap().iter().flat_map(|xi| {
            pts.iter()
                .map(|x| xi.at(&chart.geometry(x).unwrap()).residual())
                .collect::<Vec<_>>()
        }));
        ok &= worst < 1e-10;
        parts.push(format!("{name} {worst:.1e}"));
    }
    outcome(ok, format!("4 fields x 20 points: {}", parts.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let criteria: [Criterion; 11] = [
        ("clifford identities", clifford),
        ("fierz identities", fierz),
        ("polar round trip", round_trip),
        ("transport identities", transport),
        ("curvature reconstruction", curvature),
        ("lie derivative identity", lie_identity),
        ("polar lie decomposition", final_equation),
        ("invariance theorem", theorem),
        ("energy corollary", energy),
        ("spherical no-go", nogo),
        ("killing verification", killing),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(f).unwrap_or_else(|_| outcome(false, "panicked".into()));
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
