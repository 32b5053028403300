//! Fixtures shared by the criterion benches.

use polar_dirac::geometry::named_field;
use polar_dirac::harness::generic_field;
use polar_dirac::sampling::{sample_points, SampleRegion};
use polar_dirac::{KillingField, PolarField, SpacetimeChart};

pub struct Fixture {
    pub chart: SpacetimeChart,
    pub field: PolarField,
    pub xi: KillingField,
    pub point: [f64; 4],
}

/// Generic field on a preset chart, with one Killing field and one sample point.
pub fn fixture(chart: &str) -> Fixture {
    let chart_ref = SpacetimeChart::preset(chart).expect("preset chart");
    let coords = if chart == "flat-cartesian" {
        ["t", "x", "y", "z"]
    } else {
        ["t", "r", "theta", "phi"]
    };
    let field = PolarField::new(&generic_field(coords), &chart_ref).expect("generic field");
    let xi = named_field(&chart_ref, if chart_ref.is_spherical() { "xi1" } else { "rz" }).expect("named field");
    let point = sample_points(&chart_ref, &SampleRegion::default_for(&chart_ref), 1, 3).expect("sample")[0];
    Fixture {
        chart: chart_ref,
        field,
        xi,
        point,
    }
}
