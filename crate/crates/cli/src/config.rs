//! Experiment configuration: one JSON file describes the network, the run
//! kind, grids, Monte Carlo controls and sweep axes.

use serde::{Deserialize, Serialize};

use mmtdd_core::coverage::LinkKind;
use mmtdd_core::frame::Layout;
use mmtdd_core::interference::EvalOptions;
use mmtdd_core::netmodel::{NetworkParams, NetworkParamsConfig};
use mmtdd_core::rate::RateObjective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Coverage,
    Rate,
    OptimizeDelta,
    McValidate,
    Sweep,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGridSpec {
    pub lo_db: f64,
    pub hi_db: f64,
    pub step_db: f64,
}

impl Default for TauGridSpec {
    fn default() -> Self {
        TauGridSpec {
            lo_db: -20.0,
            hi_db: 60.0,
            step_db: 1.0,
        }
    }
}

impl TauGridSpec {
    pub fn build(&self) -> Vec<f64> {
        mmtdd_core::coverage::tau_grid_db(self.lo_db, self.hi_db, self.step_db)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSpec {
    pub seed: u64,
    pub drops: u32,
    /// 0 selects the automatic window.
    pub window_m: f64,
    pub frames_per_drop: u32,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            seed: 1,
            drops: 2000,
            window_m: 0.0,
            frames_per_drop: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub f_a: u32,
    pub f_bd: u32,
    pub f_ad: Option<u32>,
}

/// One sweep axis: a numeric network parameter and its values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    /// Scheme combinations evaluated at every grid point,
    /// e.g. [["static","sab"],["dynamic","uab"]].
    pub schemes: Vec<(String, String)>,
    /// Re-optimize the access fraction at every point.
    pub optimize_delta: bool,
    /// Keep the total BS density fixed by deriving the slave density from a
    /// swept master density (per km²).
    pub fix_lambda_b_per_km2: Option<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            axes: Vec::new(),
            schemes: Vec::new(),
            optimize_delta: false,
            fix_lambda_b_per_km2: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub run: RunKind,
    pub network: NetworkParamsConfig,
    pub tau_grid: TauGridSpec,
    pub mc: McSpec,
    /// Links evaluated by coverage and mc-validate runs.
    pub links: Vec<LinkKind>,
    /// Slots evaluated; empty selects every feasible slot per link.
    pub slots: Vec<u32>,
    /// Frame layout conditioning the curves; defaults to the most probable
    /// feasible layout atom per link.
    pub layout: Option<LayoutSpec>,
    pub delta_set: Vec<f64>,
    pub objective: RateObjective,
    pub sweep: SweepSpec,
    pub strict_paper: bool,
    pub exact_bs_laplace: bool,
    /// Worker threads; 0 uses every core.
    pub parallelism: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            run: RunKind::Rate,
            network: NetworkParamsConfig::default(),
            tau_grid: TauGridSpec::default(),
            mc: McSpec::default(),
            links: vec![
                LinkKind::UlAccess,
                LinkKind::DlAccess,
                LinkKind::UlBackhaul,
                LinkKind::DlBackhaul,
            ],
            slots: Vec::new(),
            layout: None,
            delta_set: (1..=10).map(|k| k as f64 / 10.0).collect(),
            objective: RateObjective::Overall,
            sweep: SweepSpec::default(),
            strict_paper: false,
            exact_bs_laplace: true,
            parallelism: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> anyhow::Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        NetworkParams::from_config(&self.network)?;
        if self.tau_grid.step_db <= 0.0 || self.tau_grid.hi_db <= self.tau_grid.lo_db {
            anyhow::bail!("tau_grid: requires lo < hi and a positive step");
        }
        if matches!(self.run, RunKind::OptimizeDelta) && self.delta_set.is_empty() {
            anyhow::bail!("delta_set: empty access-fraction set");
        }
        if matches!(self.run, RunKind::Sweep) {
            if self.sweep.axes.is_empty() && self.sweep.schemes.is_empty() {
                anyhow::bail!("sweep: no axes configured");
            }
            let mut points = 1usize;
            for axis in &self.sweep.axes {
                if axis.values.is_empty() {
                    anyhow::bail!("sweep axis `{}`: empty value list", axis.param);
                }
                sweep_param_check(&axis.param)?;
                points = points.saturating_mul(axis.values.len());
            }
            points = points.saturating_mul(self.sweep.schemes.len().max(1));
            if self.sweep.optimize_delta {
                points = points.saturating_mul(self.delta_set.len().max(1));
            }
            if points > 10_000 {
                anyhow::bail!("sweep: {points} points exceed the 10000-point guard");
            }
            for (a, b) in &self.sweep.schemes {
                parse_schemes(a, b)?;
            }
        }
        if matches!(self.run, RunKind::Coverage | RunKind::McValidate) && self.links.is_empty() {
            anyhow::bail!("links: nothing to evaluate");
        }
        Ok(())
    }

    pub fn params(&self) -> anyhow::Result<NetworkParams> {
        Ok(NetworkParams::from_config(&self.network)?)
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            exact_bs_laplace: self.exact_bs_laplace,
            strict_paper: self.strict_paper,
            ..EvalOptions::default()
        }
    }

    pub fn layout_for(&self, params: &NetworkParams, link: LinkKind) -> anyhow::Result<Layout> {
        if let Some(spec) = &self.layout {
            return Ok(Layout::new(params.frame_slots, spec.f_a, spec.f_bd, spec.f_ad)?);
        }
        // Most probable layout atom in which the link has a feasible slot.
        let mut atoms = mmtdd_core::frame::layout_atoms(params)?;
        atoms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        for (layout, _) in &atoms {
            if !feasible_slots(params, layout, link).is_empty() {
                return Ok(*layout);
            }
        }
        anyhow::bail!("link {}: no feasible layout under this configuration", link.label())
    }

    /// Canonical serialization (round-trips through the parsed struct).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical serialization, stamped into outputs.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical_json().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

/// Slots of `layout` in which the link is actually served (honoring the
/// scheme; static TDD confines each direction to its side of the DL
/// boundary).
pub fn feasible_slots(params: &NetworkParams, layout: &Layout, link: LinkKind) -> Vec<u32> {
    use mmtdd_core::netmodel::{AccessScheme, BackhaulScheme};
    let uab = params.backhaul_scheme == BackhaulScheme::Uab && params.lambda_s > 0.0;
    let access_window = |downlink: bool| -> Vec<u32> {
        match params.access_scheme {
            AccessScheme::Dynamic => layout.access_slots().collect(),
            AccessScheme::Static => {
                let f_ad = layout.f_ad.unwrap_or(0);
                layout
                    .access_slots()
                    .filter(|&i| if downlink { i <= f_ad } else { i > f_ad })
                    .collect()
            }
        }
    };
    match link {
        LinkKind::UlAccess => {
            let mut v = access_window(false);
            if uab {
                v.extend(layout.ul_backhaul_slots());
            }
            v
        }
        LinkKind::DlAccess => {
            let mut v = access_window(true);
            if uab {
                v.extend(layout.dl_backhaul_slots());
            }
            v
        }
        LinkKind::UlBackhaul => {
            if params.lambda_s > 0.0 {
                layout.ul_backhaul_slots().collect()
            } else {
                Vec::new()
            }
        }
        LinkKind::DlBackhaul => {
            if params.lambda_s > 0.0 {
                layout.dl_backhaul_slots().collect()
            } else {
                Vec::new()
            }
        }
    }
}

pub fn sweep_param_check(name: &str) -> anyhow::Result<()> {
    const KNOWN: [&str; 8] = [
        "eta",
        "delta",
        "lambda_m_per_km2",
        "lambda_s_per_km2",
        "lambda_u_per_km2",
        "p_ul",
        "p_dl",
        "bandwidth_mhz",
    ];
    if KNOWN.contains(&name) {
        Ok(())
    } else {
        anyhow::bail!("sweep axis `{name}`: unknown parameter (supported: {KNOWN:?})")
    }
}

pub fn apply_sweep_param(cfg: &mut NetworkParamsConfig, name: &str, value: f64) {
    match name {
        "eta" => cfg.eta = value,
        "delta" => cfg.delta = value,
        "lambda_m_per_km2" => cfg.lambda_m_per_km2 = value,
        "lambda_s_per_km2" => cfg.lambda_s_per_km2 = value,
        "lambda_u_per_km2" => cfg.lambda_u_per_km2 = value,
        "p_ul" => cfg.p_ul = value,
        "p_dl" => cfg.p_dl = value,
        "bandwidth_mhz" => cfg.bandwidth_mhz = value,
        _ => unreachable!("validated sweep parameter"),
    }
}

pub fn parse_schemes(
    access: &str,
    backhaul: &str,
) -> anyhow::Result<(
    mmtdd_core::netmodel::AccessScheme,
    mmtdd_core::netmodel::BackhaulScheme,
)> {
    use mmtdd_core::netmodel::{AccessScheme, BackhaulScheme};
    let a = match access {
        "static" => AccessScheme::Static,
        "dynamic" => AccessScheme::Dynamic,
        other => anyhow::bail!("unknown access scheme `{other}`"),
    };
    let b = match backhaul {
        "sab" => BackhaulScheme::Sab,
        "uab" => BackhaulScheme::Uab,
        other => anyhow::bail!("unknown backhaul scheme `{other}`"),
    };
    Ok((a, b))
}
