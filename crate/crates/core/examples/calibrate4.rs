//! Fourth calibration pass: two-hop rate structure and access-fraction
//! optimization across slave densities and schemes at a 10-slot frame.

use mmtdd_core::interference::EvalOptions;
use mmtdd_core::netmodel::{AccessScheme, BackhaulScheme, NetworkParams, NetworkParamsConfig};
use mmtdd_core::rate::{self, RateObjective};
use std::time::Instant;

fn main() {
    let deltas: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();

    for (scheme_a, scheme_b) in [
        (AccessScheme::Static, BackhaulScheme::Sab),
        (AccessScheme::Static, BackhaulScheme::Uab),
        (AccessScheme::Dynamic, BackhaulScheme::Uab),
    ] {
        for lam_s in [20.0, 40.0, 60.0, 80.0] {
            let mut cfg = NetworkParamsConfig::default();
            cfg.lambda_m_per_km2 = 20.0;
            cfg.lambda_s_per_km2 = lam_s;
            cfg.frame_slots = 10;
            cfg.access_scheme = scheme_a;
            cfg.backhaul_scheme = scheme_b;
            let params = NetworkParams::from_config(&cfg).unwrap();
            let t0 = Instant::now();
            let (best, report, _) = rate::optimize_delta(
                &params,
                EvalOptions::default(),
                &deltas,
                RateObjective::Overall,
            )
            .unwrap();
            println!(
                "{scheme_a:?}/{scheme_b:?} lam_s={lam_s}: delta*={best:.1} overall={:.3e} two-hop={:.3e}  [{:?}]",
                report.r_overall,
                0.5 * (report.r_ul_s + report.r_dl_s),
                t0.elapsed()
            );
        }
    }

    // Two-hop objective comparison at the scheme-comparison grid.
    for eta in [0.1, 0.5, 0.9] {
        for (scheme_a, scheme_b) in [
            (AccessScheme::Static, BackhaulScheme::Sab),
            (AccessScheme::Dynamic, BackhaulScheme::Uab),
        ] {
            let mut cfg = NetworkParamsConfig::default();
            cfg.frame_slots = 10;
            cfg.eta = eta;
            cfg.access_scheme = scheme_a;
            cfg.backhaul_scheme = scheme_b;
            let params = NetworkParams::from_config(&cfg).unwrap();
            let t0 = Instant::now();
            let (best, report, _) = rate::optimize_delta(
                &params,
                EvalOptions::default(),
                &deltas,
                RateObjective::TwoHop,
            )
            .unwrap();
            println!(
                "eta={eta} {scheme_a:?}/{scheme_b:?}: delta*={best:.1} two-hop={:.3e} [{:?}]",
                RateObjective::TwoHop.value(&report, eta),
                t0.elapsed()
            );
        }
    }
}
