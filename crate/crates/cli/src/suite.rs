//! The built-in verification suite behind `verify --suite`.

use std::collections::BTreeMap;

use crate::spec::{Check, SweepSpec};

/// Left and right endpoints of the 5×5 interval grid.
pub const GRID_A: [f64; 5] = [0.1, 0.5, 1.0, 1.5, 2.0];
pub const GRID_B: [f64; 5] = [2.5, 3.0, 3.25, 3.5, 4.0];

/// All `a < b` pairs from `{0.1, 0.3, 0.6, 1}`.
pub const UNIT_PAIRS: [[f64; 2]; 6] = [
    [0.1, 0.3],
    [0.1, 0.6],
    [0.1, 1.0],
    [0.3, 0.6],
    [0.3, 1.0],
    [0.6, 1.0],
];

pub const BOUND_S: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const POWER_MEAN_Q: [f64; 3] = [1.0, 2.0, 5.0];
pub const HOLDER_Q: [f64; 3] = [1.5, 2.0, 4.0];
pub const PROPOSITION_S: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

pub const CATALOG_POWERS: [f64; 5] = [-1.0, 0.5, 1.0, 2.0, 3.0];

fn on_grid(function: &str, params: &[(&str, f64)], checks: &[Check]) -> SweepSpec {
    SweepSpec {
        function: Some(function.to_string()),
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<BTreeMap<_, _>>(),
        a: GRID_A.to_vec(),
        b: GRID_B.to_vec(),
        checks: checks.to_vec(),
        ..Default::default()
    }
}

fn power_family(checks: &[Check], s: &[f64], q: &[f64]) -> SweepSpec {
    SweepSpec {
        function: Some("x^s/s".to_string()),
        intervals: UNIT_PAIRS.to_vec(),
        s: s.to_vec(),
        q: q.to_vec(),
        checks: checks.to_vec(),
        ..Default::default()
    }
}

pub fn full_suite() -> Vec<SweepSpec> {
    let mut sweeps = Vec::new();
    for p in CATALOG_POWERS {
        let mut checks = vec![Check::Lemma, Check::Chain];
        // x^p is convex on positive reals for p outside (0, 1)
        if !(0.0..1.0).contains(&p) {
            checks.push(Check::Hh);
        }
        sweeps.push(on_grid("x^p", &[("p", p)], &checks));
    }
    sweeps.push(on_grid(
        "exp(x)",
        &[],
        &[Check::Lemma, Check::Chain, Check::Hh],
    ));
    sweeps.push(on_grid("2*sqrt(x)", &[], &[Check::Lemma]));
    sweeps.push(on_grid("c", &[("c", 2.0)], &[Check::Chain, Check::Hh]));

    sweeps.push(power_family(
        &[Check::Convexity, Check::Thm21],
        &BOUND_S,
        &POWER_MEAN_Q,
    ));
    sweeps.push(power_family(&[Check::Thm22], &BOUND_S, &HOLDER_Q));
    sweeps.push(power_family(
        &[Check::Prop31],
        &PROPOSITION_S,
        &POWER_MEAN_Q,
    ));
    sweeps.push(power_family(&[Check::Prop32], &PROPOSITION_S, &HOLDER_Q));
    sweeps
}
