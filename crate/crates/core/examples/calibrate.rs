//! Scratch calibration: prints the slot-separation and dynamic/static rate
//! ratios for candidate experiment configurations.

use mmtdd_core::coverage::{self};
use mmtdd_core::frame::Layout;
use mmtdd_core::interference::ModelCtx;
use mmtdd_core::netmodel::{AccessScheme, NetworkParams, NetworkParamsConfig};
use mmtdd_core::rate;

fn main() {
    // Slot-separation check at the validation-figure config.
    let mut cfg = NetworkParamsConfig::default();
    cfg.lambda_m_per_km2 = 100.0;
    cfg.lambda_s_per_km2 = 0.0;
    cfg.lambda_u_per_km2 = 1000.0;
    cfg.frame_slots = 5;
    cfg.delta = 1.0;
    cfg.access_scheme = AccessScheme::Dynamic;
    let params = NetworkParams::from_config(&cfg).unwrap();
    let ctx = ModelCtx::from_params(params).unwrap();
    let layout = Layout::new(5, 5, 0, None).unwrap();
    let grid = coverage::default_tau_grid();
    let c1 = coverage::ul_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
    let c5 = coverage::ul_access_coverage(&ctx, &layout, 5, None, &grid).unwrap();
    let t1 = c1.threshold_at_coverage(0.5).unwrap();
    let t5 = c5.threshold_at_coverage(0.5).unwrap();
    println!("slot1 median {t1:.2} dB, slot5 median {t5:.2} dB, shift {:.2} dB", t5 - t1);

    // Rate-ratio scan.
    for (label, carrier, bw, lam_u) in [
        ("28GHz/200MHz lam_u=200", 28.0, 200.0, 200.0),
        ("28GHz/200MHz lam_u=500", 28.0, 200.0, 500.0),
        ("28GHz/200MHz lam_u=1000", 28.0, 200.0, 1000.0),
        ("73GHz/2GHz lam_u=200", 73.0, 2000.0, 200.0),
        ("73GHz/2GHz lam_u=500", 73.0, 2000.0, 500.0),
    ] {
        for f in [1u32, 5] {
            for eta in [0.1, 0.5, 0.9] {
                let mut cfg = NetworkParamsConfig::default();
                cfg.lambda_m_per_km2 = 100.0;
                cfg.lambda_s_per_km2 = 0.0;
                cfg.lambda_u_per_km2 = lam_u;
                cfg.carrier_ghz = carrier;
                cfg.bandwidth_mhz = bw;
                cfg.eta = eta;
                cfg.frame_slots = f;
                cfg.delta = 1.0;
                cfg.access_scheme = AccessScheme::Static;
                let p_static = NetworkParams::from_config(&cfg).unwrap();
                cfg.access_scheme = AccessScheme::Dynamic;
                let p_dyn = NetworkParams::from_config(&cfg).unwrap();
                let rs = rate::mean_rates(&ModelCtx::from_params(p_static).unwrap()).unwrap();
                let rd = rate::mean_rates(&ModelCtx::from_params(p_dyn).unwrap()).unwrap();
                println!(
                    "{label} F={f} eta={eta}: UL ratio {:.3} ({:.2e}/{:.2e}) DL ratio {:.3} ({:.2e}/{:.2e})",
                    rd.r_ul / rs.r_ul,
                    rd.r_ul,
                    rs.r_ul,
                    rd.r_dl / rs.r_dl,
                    rd.r_dl,
                    rs.r_dl,
                );
            }
        }
    }
}
