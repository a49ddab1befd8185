//! Command implementations: each run kind reads the validated configuration,
//! evaluates the engine and emits CSV/JSON under the output directory.

use std::path::{Path, PathBuf};

use log::info;

use mmtdd_core::coverage::{self, LinkKind};
use mmtdd_core::frame::Layout;
use mmtdd_core::interference::ModelCtx;
use mmtdd_core::mcsim::{self, BackhaulPalm, MeasurementSpec, SimConfig};
use mmtdd_core::netmodel::NetworkParams;
use mmtdd_core::rate::{self, RateReport};

use crate::config::{
    apply_sweep_param, feasible_slots, parse_schemes, ExperimentConfig, RunKind,
};
use crate::output::{
    coverage_rows, mc_coverage_rows, rate_row, scheme_labels, CsvFile, COVERAGE_HEADER,
    MC_COVERAGE_HEADER, RATE_HEADER,
};

pub fn execute(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    match cfg.run {
        RunKind::Coverage => run_coverage(cfg, out_dir),
        RunKind::Rate => run_rate(cfg, out_dir),
        RunKind::OptimizeDelta => run_optimize_delta(cfg, out_dir),
        RunKind::McValidate => run_mc_validate(cfg, out_dir),
        RunKind::Sweep => run_sweep(cfg, out_dir),
    }
}

fn requested_slots(cfg: &ExperimentConfig, params: &NetworkParams, layout: &Layout, link: LinkKind) -> Vec<u32> {
    let feasible = feasible_slots(params, layout, link);
    if cfg.slots.is_empty() {
        feasible
    } else {
        cfg.slots
            .iter()
            .copied()
            .filter(|s| feasible.contains(s))
            .collect()
    }
}

fn analytical_curve(
    ctx: &ModelCtx,
    layout: &Layout,
    link: LinkKind,
    slot: u32,
    tier: Option<mmtdd_core::netmodel::Tier>,
    grid: &[f64],
) -> anyhow::Result<coverage::CoverageCurve> {
    Ok(match link {
        LinkKind::UlAccess => coverage::ul_access_coverage(ctx, layout, slot, tier, grid)?,
        LinkKind::DlAccess => coverage::dl_access_coverage(ctx, layout, slot, tier, grid)?,
        LinkKind::UlBackhaul => coverage::ul_backhaul_coverage(ctx, layout, slot, grid)?,
        LinkKind::DlBackhaul => coverage::dl_backhaul_coverage(ctx, layout, slot, grid)?,
    })
}

fn run_coverage(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    let params = cfg.params()?;
    let ctx = ModelCtx::new(params.clone(), cfg.eval_options())?;
    let grid = cfg.tau_grid.build();
    let schemes = scheme_labels(params.access_scheme, params.backhaul_scheme);
    let mut csv = CsvFile::create(&out_dir.join("coverage.csv"), &cfg.hash(), COVERAGE_HEADER)?;
    for &link in &cfg.links {
        let layout = cfg.layout_for(&params, link)?;
        for slot in requested_slots(cfg, &params, &layout, link) {
            info!("coverage: {} slot {slot} under {layout:?}", link.label());
            let tiers: Vec<Option<mmtdd_core::netmodel::Tier>> = match link {
                LinkKind::UlAccess | LinkKind::DlAccess => vec![None],
                _ => vec![None],
            };
            for tier in tiers {
                let curve = analytical_curve(&ctx, &layout, link, slot, tier, &grid)?;
                coverage_rows(&mut csv, &curve, schemes)?;
            }
        }
    }
    csv.finish()?;
    info!("coverage written to {}", out_dir.join("coverage.csv").display());
    Ok(())
}

fn rate_json(path: &Path, cfg: &ExperimentConfig, report: &RateReport) -> anyhow::Result<()> {
    let doc = serde_json::json!({
        "version": mmtdd_core::VERSION,
        "config_hash": cfg.hash(),
        "rates_bps": report,
    });
    std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn run_rate(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    let params = cfg.params()?;
    let schemes = scheme_labels(params.access_scheme, params.backhaul_scheme);
    let ctx = ModelCtx::new(params.clone(), cfg.eval_options())?;
    let report = rate::mean_rates(&ctx)?;
    let mut csv = CsvFile::create(&out_dir.join("rate.csv"), &cfg.hash(), RATE_HEADER)?;
    csv.row(&rate_row(
        schemes,
        params.eta,
        params.delta,
        params.p_ul,
        params.p_dl,
        &report,
    ))?;
    csv.finish()?;
    rate_json(&out_dir.join("rate.json"), cfg, &report)?;
    info!("rate written to {}", out_dir.join("rate.csv").display());
    Ok(())
}

fn run_optimize_delta(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    let params = cfg.params()?;
    let schemes = scheme_labels(params.access_scheme, params.backhaul_scheme);
    let (best, best_report, sweep) =
        rate::optimize_delta(&params, cfg.eval_options(), &cfg.delta_set, cfg.objective)?;
    let mut csv = CsvFile::create(&out_dir.join("delta_sweep.csv"), &cfg.hash(), RATE_HEADER)?;
    for point in &sweep {
        csv.row(&rate_row(
            schemes,
            params.eta,
            point.delta,
            params.p_ul,
            params.p_dl,
            &point.report,
        ))?;
    }
    csv.finish()?;
    let doc = serde_json::json!({
        "version": mmtdd_core::VERSION,
        "config_hash": cfg.hash(),
        "objective": cfg.objective,
        "best_delta": best,
        "best_rates_bps": best_report,
    });
    std::fs::write(out_dir.join("delta_best.json"), serde_json::to_string_pretty(&doc)?)?;
    info!("optimum access fraction {best}");
    Ok(())
}

fn run_mc_validate(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    let params = cfg.params()?;
    let ctx = ModelCtx::new(params.clone(), cfg.eval_options())?;
    let grid = cfg.tau_grid.build();
    let schemes = scheme_labels(params.access_scheme, params.backhaul_scheme);
    let sim = SimConfig {
        seed: cfg.mc.seed,
        drops: cfg.mc.drops,
        window_m: cfg.mc.window_m,
        frames_per_drop: cfg.mc.frames_per_drop,
    };

    // Assemble one spec per (link, slot) so every drop feeds all of them.
    let mut specs = Vec::new();
    let mut spec_meta = Vec::new();
    for &link in &cfg.links {
        let layout = cfg.layout_for(&params, link)?;
        for slot in requested_slots(cfg, &params, &layout, link) {
            specs.push(MeasurementSpec {
                link,
                layout,
                slot,
                palm: BackhaulPalm::Typical,
            });
            spec_meta.push((link, layout, slot));
        }
    }
    info!("mc-validate: {} measurements over {} drops", specs.len(), sim.drops);
    let samples = mcsim::simulate_sinr(&params, &specs, &sim)?;

    let mut analytic_csv =
        CsvFile::create(&out_dir.join("coverage.csv"), &cfg.hash(), COVERAGE_HEADER)?;
    let mut mc_csv =
        CsvFile::create(&out_dir.join("mc_coverage.csv"), &cfg.hash(), MC_COVERAGE_HEADER)?;
    let mut gaps = Vec::new();
    for (k, (link, layout, slot)) in spec_meta.iter().enumerate() {
        let analytical = analytical_curve(&ctx, layout, *link, *slot, None, &grid)?;
        coverage_rows(&mut analytic_csv, &analytical, schemes)?;
        let empirical = mcsim::empirical_curve(*link, *slot, &samples[k], &grid);
        mc_coverage_rows(&mut mc_csv, &empirical, "mix", schemes)?;
        let gap = analytical
            .points
            .iter()
            .zip(&empirical.coverage)
            .map(|(a, e)| (a.coverage - e).abs())
            .fold(0.0, f64::max);
        info!(
            "mc-validate {} slot {slot}: max gap {gap:.4} ({} samples)",
            link.label(),
            empirical.samples
        );
        gaps.push(serde_json::json!({
            "link": link.label(),
            "slot": slot,
            "max_abs_gap": gap,
            "samples": empirical.samples,
        }));
    }
    analytic_csv.finish()?;
    mc_csv.finish()?;
    let doc = serde_json::json!({
        "version": mmtdd_core::VERSION,
        "config_hash": cfg.hash(),
        "drops": sim.drops,
        "gaps": gaps,
    });
    std::fs::write(out_dir.join("mc_summary.json"), serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    let hash = cfg.hash();
    let csv_path = out_dir.join("sweep.csv");
    let manifest_path = out_dir.join("sweep.manifest");

    // Cartesian product of axis values.
    let mut points: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for axis in &cfg.sweep.axes {
        let mut next = Vec::new();
        for point in &points {
            for &v in &axis.values {
                let mut p = point.clone();
                p.push((axis.param.clone(), v));
                next.push(p);
            }
        }
        points = next;
    }
    let schemes: Vec<(String, String)> = if cfg.sweep.schemes.is_empty() {
        vec![("".into(), "".into())]
    } else {
        cfg.sweep.schemes.clone()
    };

    // Resume: skip completed point indices recorded under the same config.
    let done: std::collections::HashSet<usize> = match std::fs::read_to_string(&manifest_path) {
        Ok(text) => {
            let mut lines = text.lines();
            if lines.next() == Some(hash.as_str()) {
                lines.filter_map(|l| l.parse().ok()).collect()
            } else {
                Default::default()
            }
        }
        Err(_) => Default::default(),
    };
    if done.is_empty() {
        let csv = CsvFile::create(&csv_path, &hash, &sweep_header(cfg))?;
        csv.finish()?;
        std::fs::write(&manifest_path, format!("{hash}\n"))?;
    }

    let mut index = 0usize;
    for point in &points {
        for (sa, sb) in &schemes {
            index += 1;
            if done.contains(&index) {
                continue;
            }
            let mut net = cfg.network.clone();
            for (name, value) in point {
                apply_sweep_param(&mut net, name, *value);
            }
            if let Some(total) = cfg.sweep.fix_lambda_b_per_km2 {
                net.lambda_s_per_km2 = (total - net.lambda_m_per_km2).max(0.0);
            }
            if !sa.is_empty() {
                let (a, b) = parse_schemes(sa, sb)?;
                net.access_scheme = a;
                net.backhaul_scheme = b;
            }
            let params = NetworkParams::from_config(&net)?;
            let labels = scheme_labels(params.access_scheme, params.backhaul_scheme);
            let (delta, report) = if cfg.sweep.optimize_delta {
                let (d, r, _) =
                    rate::optimize_delta(&params, cfg.eval_options(), &cfg.delta_set, cfg.objective)?;
                (d, r)
            } else {
                let ctx = ModelCtx::new(params.clone(), cfg.eval_options())?;
                (params.delta, rate::mean_rates(&ctx)?)
            };
            let mut axis_cells = String::new();
            for (_, value) in point {
                axis_cells.push_str(&format!("{value:.6},"));
            }
            let line = format!(
                "{axis_cells}{}",
                rate_row(labels, params.eta, delta, params.p_ul, params.p_dl, &report)
            );
            append_row(&csv_path, &line)?;
            append_manifest(&manifest_path, index)?;
            info!("sweep point {index}/{} done", points.len() * schemes.len());
        }
    }
    Ok(())
}

fn sweep_header(cfg: &ExperimentConfig) -> String {
    let mut header = String::new();
    for axis in &cfg.sweep.axes {
        header.push_str(&format!("axis_{},", axis.param));
    }
    header.push_str(RATE_HEADER);
    header
}

fn append_row(path: &PathBuf, line: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new().append(true).open(path)?;
    writeln!(f, "{line}")?;
    Ok(())
}

fn append_manifest(path: &PathBuf, index: usize) -> anyhow::Result<()> {
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new().append(true).open(path)?;
    writeln!(f, "{index}")?;
    Ok(())
}
