//! Second calibration pass: lower-bound transform variant, finer user-density
//! grid, and slot-shift sensitivity.

use mmtdd_core::coverage::{self};
use mmtdd_core::frame::Layout;
use mmtdd_core::interference::{EvalOptions, ModelCtx};
use mmtdd_core::netmodel::{AccessScheme, NetworkParams, NetworkParamsConfig};
use mmtdd_core::rate;

fn ratios(lam_u: f64, f: u32, eta: f64, exact: bool) -> (f64, f64) {
    let mut cfg = NetworkParamsConfig::default();
    cfg.lambda_m_per_km2 = 100.0;
    cfg.lambda_s_per_km2 = 0.0;
    cfg.lambda_u_per_km2 = lam_u;
    cfg.eta = eta;
    cfg.frame_slots = f;
    cfg.delta = 1.0;
    let mut opts = EvalOptions::default();
    opts.exact_bs_laplace = exact;
    cfg.access_scheme = AccessScheme::Static;
    let ps = NetworkParams::from_config(&cfg).unwrap();
    cfg.access_scheme = AccessScheme::Dynamic;
    let pd = NetworkParams::from_config(&cfg).unwrap();
    let rs = rate::mean_rates(&ModelCtx::new(ps, opts).unwrap()).unwrap();
    let rd = rate::mean_rates(&ModelCtx::new(pd, opts).unwrap()).unwrap();
    (rd.r_ul / rs.r_ul, rd.r_dl / rs.r_dl)
}

fn main() {
    for exact in [true, false] {
        for lam_u in [400.0, 500.0, 600.0, 750.0] {
            let (ul1, dl1) = ratios(lam_u, 1, 0.1, exact);
            let (ul5, dl5) = ratios(lam_u, 1, 0.5, exact);
            println!(
                "exact={exact} lam_u={lam_u}: eta0.1 UL {ul1:.3} DL {dl1:.3} | eta0.5 UL {ul5:.3} DL {dl5:.3}"
            );
        }
    }

    // Slot shift sensitivity: exact vs lower bound, and measurement level.
    for exact in [true, false] {
        let mut cfg = NetworkParamsConfig::default();
        cfg.lambda_m_per_km2 = 100.0;
        cfg.lambda_s_per_km2 = 0.0;
        cfg.lambda_u_per_km2 = 1000.0;
        cfg.frame_slots = 5;
        cfg.delta = 1.0;
        cfg.access_scheme = AccessScheme::Dynamic;
        let params = NetworkParams::from_config(&cfg).unwrap();
        let mut opts = EvalOptions::default();
        opts.exact_bs_laplace = exact;
        let ctx = ModelCtx::new(params, opts).unwrap();
        let layout = Layout::new(5, 5, 0, None).unwrap();
        let grid = coverage::default_tau_grid();
        let c1 = coverage::ul_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
        let c5 = coverage::ul_access_coverage(&ctx, &layout, 5, None, &grid).unwrap();
        for level in [0.3, 0.5, 0.7] {
            let t1 = c1.threshold_at_coverage(level).unwrap();
            let t5 = c5.threshold_at_coverage(level).unwrap();
            println!("exact={exact} level={level}: shift {:.2} dB ({t1:.2} -> {t5:.2})", t5 - t1);
        }
    }
}
