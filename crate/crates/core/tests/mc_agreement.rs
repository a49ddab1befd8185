//! Cross-validation of the analytical coverage engine against the spatial
//! simulator on moderately sized runs; the acceptance suite repeats the key
//! comparisons at full sample counts.

use mmtdd_core::coverage::{self, LinkKind};
use mmtdd_core::frame::Layout;
use mmtdd_core::interference::ModelCtx;
use mmtdd_core::mcsim::{self, BackhaulPalm, MeasurementSpec, SimConfig};
use mmtdd_core::netmodel::{NetworkParams, NetworkParamsConfig};

fn max_gap(analytical: &[f64], empirical: &[f64]) -> f64 {
    analytical
        .iter()
        .zip(empirical)
        .map(|(a, e)| (a - e).abs())
        .fold(0.0, f64::max)
}

fn curve_values(curve: &coverage::CoverageCurve) -> Vec<f64> {
    curve.points.iter().map(|p| p.coverage).collect()
}

#[test]
fn static_tdd_access_curves_match_simulation() {
    let params = NetworkParams::from_config(&NetworkParamsConfig::default()).unwrap();
    let ctx = ModelCtx::from_params(params.clone()).unwrap();
    let grid = coverage::tau_grid_db(-10.0, 30.0, 2.0);
    let sim = SimConfig::new(424242, 4000);

    let ul_layout = Layout::new(1, 1, 0, Some(0)).unwrap();
    let dl_layout = Layout::new(1, 1, 0, Some(1)).unwrap();
    let specs = [
        MeasurementSpec {
            link: LinkKind::UlAccess,
            layout: ul_layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
        MeasurementSpec {
            link: LinkKind::DlAccess,
            layout: dl_layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
    ];
    let samples = mcsim::simulate_sinr(&params, &specs, &sim).unwrap();

    let ul = coverage::ul_access_coverage(&ctx, &ul_layout, 1, None, &grid).unwrap();
    let emp = mcsim::empirical_curve(LinkKind::UlAccess, 1, &samples[0], &grid);
    let gap = max_gap(&curve_values(&ul), &emp.coverage);
    println!("UL access static: max gap {gap:.4} over {} samples", emp.samples);
    assert!(gap < 0.06, "UL access gap {gap}");

    let dl = coverage::dl_access_coverage(&ctx, &dl_layout, 1, None, &grid).unwrap();
    let emp = mcsim::empirical_curve(LinkKind::DlAccess, 1, &samples[1], &grid);
    let gap = max_gap(&curve_values(&dl), &emp.coverage);
    println!("DL access static: max gap {gap:.4} over {} samples", emp.samples);
    assert!(gap < 0.06, "DL access gap {gap}");
}

#[test]
fn backhaul_curves_match_simulation() {
    let params = NetworkParams::from_config(&NetworkParamsConfig::default()).unwrap();
    let ctx = ModelCtx::from_params(params.clone()).unwrap();
    let grid = coverage::tau_grid_db(-10.0, 30.0, 2.0);
    let sim = SimConfig::new(777, 4000);

    let ulb_layout = Layout::new(1, 0, 0, Some(0)).unwrap();
    let dlb_layout = Layout::new(1, 0, 1, Some(0)).unwrap();
    let specs = [
        MeasurementSpec {
            link: LinkKind::UlBackhaul,
            layout: ulb_layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
        MeasurementSpec {
            link: LinkKind::DlBackhaul,
            layout: dlb_layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
    ];
    let samples = mcsim::simulate_sinr(&params, &specs, &sim).unwrap();

    let ulb = coverage::ul_backhaul_coverage(&ctx, &ulb_layout, 1, &grid).unwrap();
    let emp = mcsim::empirical_curve(LinkKind::UlBackhaul, 1, &samples[0], &grid);
    let gap = max_gap(&curve_values(&ulb), &emp.coverage);
    println!("UL backhaul: max gap {gap:.4} over {} samples", emp.samples);
    assert!(gap < 0.06, "UL backhaul gap {gap}");

    let dlb = coverage::dl_backhaul_coverage(&ctx, &dlb_layout, 1, &grid).unwrap();
    let emp = mcsim::empirical_curve(LinkKind::DlBackhaul, 1, &samples[1], &grid);
    let gap = max_gap(&curve_values(&dlb), &emp.coverage);
    println!("DL backhaul: max gap {gap:.4} over {} samples", emp.samples);
    assert!(gap < 0.06, "DL backhaul gap {gap}");
}

#[test]
fn dynamic_tdd_access_matches_simulation() {
    let mut cfg = NetworkParamsConfig::default();
    cfg.access_scheme = mmtdd_core::netmodel::AccessScheme::Dynamic;
    let params = NetworkParams::from_config(&cfg).unwrap();
    let ctx = ModelCtx::from_params(params.clone()).unwrap();
    let grid = coverage::tau_grid_db(-10.0, 30.0, 2.0);
    let sim = SimConfig::new(31337, 4000);
    let layout = Layout::new(1, 1, 0, None).unwrap();
    let specs = [
        MeasurementSpec {
            link: LinkKind::UlAccess,
            layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
        MeasurementSpec {
            link: LinkKind::DlAccess,
            layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
    ];
    let samples = mcsim::simulate_sinr(&params, &specs, &sim).unwrap();

    let ul = coverage::ul_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
    let emp = mcsim::empirical_curve(LinkKind::UlAccess, 1, &samples[0], &grid);
    let gap = max_gap(&curve_values(&ul), &emp.coverage);
    println!("UL access dynamic: max gap {gap:.4} over {} samples", emp.samples);
    assert!(gap < 0.07, "UL access dynamic gap {gap}");

    let dl = coverage::dl_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
    let emp = mcsim::empirical_curve(LinkKind::DlAccess, 1, &samples[1], &grid);
    let gap = max_gap(&curve_values(&dl), &emp.coverage);
    println!("DL access dynamic: max gap {gap:.4} over {} samples", emp.samples);
    assert!(gap < 0.07, "DL access dynamic gap {gap}");
}
