//! Third calibration pass: dynamic-TDD slot curves against the simulator at
//! the frame-size validation config, plus the literal-density slot shift.

use mmtdd_core::coverage::{self, LinkKind};
use mmtdd_core::frame::Layout;
use mmtdd_core::interference::ModelCtx;
use mmtdd_core::mcsim::{self, BackhaulPalm, MeasurementSpec, SimConfig};
use mmtdd_core::netmodel::{AccessScheme, NetworkParams, NetworkParamsConfig};

fn main() {
    let mut cfg = NetworkParamsConfig::default();
    cfg.lambda_m_per_km2 = 100.0;
    cfg.lambda_s_per_km2 = 0.0;
    cfg.lambda_u_per_km2 = 1000.0;
    cfg.frame_slots = 5;
    cfg.delta = 1.0;
    cfg.access_scheme = AccessScheme::Dynamic;
    let params = NetworkParams::from_config(&cfg).unwrap();
    let ctx = ModelCtx::from_params(params.clone()).unwrap();
    let layout = Layout::new(5, 5, 0, None).unwrap();
    let grid = coverage::tau_grid_db(-10.0, 40.0, 2.0);

    let specs = [
        MeasurementSpec {
            link: LinkKind::UlAccess,
            layout,
            slot: 1,
            palm: BackhaulPalm::Typical,
        },
        MeasurementSpec {
            link: LinkKind::UlAccess,
            layout,
            slot: 5,
            palm: BackhaulPalm::Typical,
        },
    ];
    let sim = SimConfig::new(90210, 1200);
    let samples = mcsim::simulate_sinr(&params, &specs, &sim).unwrap();
    for (k, slot) in [1u32, 5].into_iter().enumerate() {
        let analytical = coverage::ul_access_coverage(&ctx, &layout, slot, None, &grid).unwrap();
        let emp = mcsim::empirical_curve(LinkKind::UlAccess, slot, &samples[k], &grid);
        let mut max_gap = 0.0f64;
        for (a, e) in analytical.points.iter().zip(&emp.coverage) {
            max_gap = max_gap.max((a.coverage - e).abs());
        }
        println!("slot {slot}: max analytical-vs-MC gap {max_gap:.4} over {} samples", emp.samples);
        for db in [0, 10, 20, 30] {
            let idx = grid.iter().position(|&g| g == db as f64).unwrap();
            println!(
                "  tau={db} dB: analytical {:.4}, empirical {:.4}",
                analytical.points[idx].coverage, emp.coverage[idx]
            );
        }
    }

    // Literal-density slot shift for comparison.
    let mut cfg2 = cfg.clone();
    cfg2.lambda_u_per_km2 = 500.0;
    let params2 = NetworkParams::from_config(&cfg2).unwrap();
    let ctx2 = ModelCtx::from_params(params2).unwrap();
    let gridw = coverage::default_tau_grid();
    let c1 = coverage::ul_access_coverage(&ctx2, &layout, 1, None, &gridw).unwrap();
    let c5 = coverage::ul_access_coverage(&ctx2, &layout, 5, None, &gridw).unwrap();
    println!(
        "lam_u=500 total: shift at 0.5 = {:.2} dB",
        c5.threshold_at_coverage(0.5).unwrap() - c1.threshold_at_coverage(0.5).unwrap()
    );
}
