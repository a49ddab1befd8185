//! Mean user rates: per-tier UL/DL rates with tagged-load scheduling
//! weights, the min(access, backhaul) coupling for two-hop users, the
//! expectation over network-wide frame layouts, and discrete optimization of
//! the access/backhaul split.
//!
//! Rates come out in bits/s. Slot duration cancels throughout (every data
//! volume is divided by the frame duration), and the spectral-efficiency
//! integral ∫ S(τ)/(1+τ) dτ gets the 1/ln2 base conversion unless
//! strict-paper mode asks for the printed form.

use serde::{Deserialize, Serialize};

use crate::coverage::{self, tau_grid_db};
use crate::error::Result;
use crate::frame::{self, Layout};
use crate::interference::{EvalOptions, ModelCtx};
use crate::loadmodel::{self, JointKind, JointTable};
use crate::netmodel::{AccessScheme, BackhaulScheme, NetworkParams, Tier};

/// Mean rates for one parameter point, in bits/s.
///
/// Per-tier entries are conditional on the user's serving tier; `ra_*` and
/// `rb_*` are the layout-averaged access and backhaul components of the
/// two-hop rate before the min coupling.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub r_ul: f64,
    pub r_dl: f64,
    pub r_overall: f64,
    pub r_ul_m: f64,
    pub r_ul_s: f64,
    pub r_dl_m: f64,
    pub r_dl_s: f64,
    pub ra_ul: f64,
    pub rb_ul: f64,
    pub ra_dl: f64,
    pub rb_dl: f64,
}

/// Threshold grid for spectral-efficiency integrals: wider than the display
/// grid so the head and tail corrections stay negligible.
pub fn rate_tau_grid() -> Vec<f64> {
    tau_grid_db(-30.0, 80.0, 1.0)
}

/// ∫ S(τ)/(1+τ) dτ over (0, ∞) from samples on a dB grid: trapezoid in
/// ln(1+τ) plus closed head and power-tail corrections.
pub fn spectral_efficiency_nats(grid_db: &[f64], coverage: &[f64], alpha_los: f64) -> f64 {
    let taus: Vec<f64> = grid_db.iter().map(|&db| 10f64.powf(db / 10.0)).collect();
    let xs: Vec<f64> = taus.iter().map(|&t| (1.0 + t).ln()).collect();
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (coverage[i] + coverage[i - 1]) * (xs[i] - xs[i - 1]);
    }
    // Head: S ≈ S(τ_min) ≈ 1 below the grid.
    acc += coverage[0] * xs[0];
    // Tail: S decays like τ^(-2/α) once noise dominates, so the remaining
    // mass is about S(τ_max)·α/2.
    acc += coverage[coverage.len() - 1] * alpha_los / 2.0;
    acc
}

/// E[1/N] under the tagged load PMF, with the empty-mean limit of a single
/// served device.
fn mean_inverse_tagged_or_one(eps: f64) -> Result<f64> {
    if eps <= 1e-12 {
        return Ok(1.0);
    }
    loadmodel::mean_inverse_tagged(eps)
}

/// Per-layout spectral-efficiency sums for one direction.
struct DirectionAtoms {
    /// Scheduling-weighted access sum for master-attached users
    /// (nats per frame before the bandwidth scaling).
    single_hop: f64,
    /// Access and backhaul components of the slave-attached term.
    access: f64,
    backhaul: f64,
}

/// Evaluate one direction (UL or DL) under one frame layout.
fn direction_under_layout(
    ctx: &ModelCtx,
    layout: &Layout,
    grid_db: &[f64],
    tagged: &[Option<JointTable>; 2],
    downlink: bool,
) -> Result<DirectionAtoms> {
    let p = &ctx.params;
    let f_a = layout.f_a;

    // Spectral efficiency of every feasible access slot, per serving tier.
    // Under static TDD the interference composition is constant inside each
    // window, so one curve per window side suffices.
    let mut se_access: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (ti, t) in Tier::BOTH.into_iter().enumerate() {
        if ctx.assoc.prob(t) <= 0.0 || p.tier_density(t) == 0.0 {
            continue;
        }
        let mut per_slot = vec![0.0; f_a as usize + 1];
        let eval_slot = |i: u32| -> Result<f64> {
            let curve = if downlink {
                coverage::dl_access_coverage(ctx, layout, i, Some(t), grid_db)?
            } else {
                coverage::ul_access_coverage(ctx, layout, i, Some(t), grid_db)?
            };
            let vals: Vec<f64> = curve.points.iter().map(|pt| pt.coverage).collect();
            Ok(spectral_efficiency_nats(grid_db, &vals, p.alpha_los))
        };
        match p.access_scheme {
            AccessScheme::Static => {
                // Only the direction's own window contributes to its rate.
                let f_ad = layout.f_ad.unwrap_or(0);
                if downlink {
                    if f_ad >= 1 {
                        let se = eval_slot(1)?;
                        for i in 1..=f_ad {
                            per_slot[i as usize] = se;
                        }
                    }
                } else if f_ad < f_a {
                    let se = eval_slot(f_ad + 1)?;
                    for i in (f_ad + 1)..=f_a {
                        per_slot[i as usize] = se;
                    }
                }
            }
            AccessScheme::Dynamic => {
                for i in 1..=f_a {
                    per_slot[i as usize] = eval_slot(i)?;
                }
            }
        }
        se_access[ti] = per_slot;
    }

    // Poached-slot and backhaul spectral efficiencies are constant inside
    // their windows (the transforms depend on the window, not the slot).
    let has_sbs = ctx.assoc.prob_sbs > 0.0 && p.lambda_s > 0.0;
    let window = if downlink {
        layout.f_bd
    } else {
        layout.f - layout.f_a - layout.f_bd
    };
    let window_start = if downlink { f_a + 1 } else { f_a + layout.f_bd + 1 };
    let uab = p.backhaul_scheme == BackhaulScheme::Uab;
    let se_poach = if has_sbs && uab && window > 0 {
        let curve = if downlink {
            coverage::dl_access_coverage(ctx, layout, window_start, Some(Tier::Sbs), grid_db)?
        } else {
            coverage::ul_access_coverage(ctx, layout, window_start, Some(Tier::Sbs), grid_db)?
        };
        let vals: Vec<f64> = curve.points.iter().map(|pt| pt.coverage).collect();
        spectral_efficiency_nats(grid_db, &vals, p.alpha_los)
    } else {
        0.0
    };
    let se_backhaul = if has_sbs && window > 0 {
        let curve = if downlink {
            coverage::dl_backhaul_coverage(ctx, layout, window_start, grid_db)?
        } else {
            coverage::ul_backhaul_coverage(ctx, layout, window_start, grid_db)?
        };
        let vals: Vec<f64> = curve.points.iter().map(|pt| pt.coverage).collect();
        spectral_efficiency_nats(grid_db, &vals, p.alpha_los)
    } else {
        0.0
    };

    // Tagged-load expectation of the scheduled access sum: the served cell's
    // DL boundary follows its loads (plus the served user), and uniform
    // per-slot selection contributes 1/(count+1).
    let access_term = |ti: usize| -> f64 {
        let table = match &tagged[ti] {
            Some(t) => t,
            None => return 0.0,
        };
        let se = &se_access[ti];
        if se.is_empty() {
            return 0.0;
        }
        // window_sum[k]: spectral-efficiency total of the direction's slots
        // when the DL boundary sits at k.
        let mut window_sum = vec![0.0; f_a as usize + 1];
        for (k, slot_sum) in window_sum.iter_mut().enumerate() {
            let mut acc = 0.0;
            if downlink {
                for v in se.iter().take(k + 1).skip(1) {
                    acc += v;
                }
            } else {
                for v in se.iter().take(f_a as usize + 1).skip(k + 1) {
                    acc += v;
                }
            }
            *slot_sum = acc;
        }
        let mut total = 0.0;
        for (n_ul, n_dl, prob) in table.iter() {
            let sched = if downlink {
                1.0 / (n_dl + 1) as f64
            } else {
                1.0 / (n_ul + 1) as f64
            };
            let expected_window = match p.access_scheme {
                AccessScheme::Static => window_sum[layout.f_ad.unwrap_or(0) as usize],
                AccessScheme::Dynamic => {
                    let (n_d, n_u) = if downlink {
                        (n_dl + 1, n_ul)
                    } else {
                        (n_dl, n_ul + 1)
                    };
                    let gamma = if n_d == 0 {
                        0.0
                    } else {
                        n_d as f64 / (n_d + n_u) as f64
                    };
                    frame::rounding_pmf(gamma * f_a as f64)
                        .into_iter()
                        .map(|(k, w)| w * window_sum[k as usize])
                        .sum()
                }
            };
            total += prob * sched * expected_window;
        }
        total
    };

    let single_hop = access_term(0);
    let mut access = access_term(1);
    let mut backhaul = 0.0;

    if has_sbs {
        let loads_s = ctx.frame.loads(Tier::Sbs);
        let eps_dir = if downlink { loads_s.eps_dl } else { loads_s.eps_ul };
        // Mean reciprocal user count at the tagged slave BS.
        let inv_users = mean_inverse_tagged_or_one(eps_dir)?;
        // Mean reciprocal count of direction-active slaves at the master
        // serving the tagged slave.
        let eps_sched = if downlink {
            ctx.frame.eff.lambda_sd / p.lambda_m
        } else {
            ctx.frame.eff.lambda_su / p.lambda_m
        };
        let inv_sched = mean_inverse_tagged_or_one(eps_sched)?;
        if uab && window > 0 {
            let p_poach = if downlink { p.p_dl } else { p.p_ul };
            access += (1.0 - inv_sched) * p_poach * inv_users * window as f64 * se_poach;
        }
        if window > 0 {
            backhaul = inv_sched * inv_users * window as f64 * se_backhaul;
        }
    }

    Ok(DirectionAtoms {
        single_hop,
        access,
        backhaul,
    })
}

/// Mean UL, DL and overall rates for the configured parameter point.
pub fn mean_rates(ctx: &ModelCtx) -> Result<RateReport> {
    mean_rates_on_grid(ctx, &rate_tau_grid())
}

pub fn mean_rates_on_grid(ctx: &ModelCtx, grid_db: &[f64]) -> Result<RateReport> {
    let p = &ctx.params;
    // Tagged joint load tables (the served cell's other users) per tier.
    let mut tagged: [Option<JointTable>; 2] = [None, None];
    for (ti, t) in Tier::BOTH.into_iter().enumerate() {
        let loads = ctx.frame.loads(t);
        if ctx.assoc.prob(t) > 0.0 && p.tier_density(t) > 0.0 && loads.eps_total > 0.0 {
            tagged[ti] = Some(JointTable::build(
                loads.eps_total,
                p.eta,
                JointKind::Tagged,
                ctx.opts.load_tail_tol,
            )?);
        }
    }

    let mut r_ul_m = 0.0;
    let mut r_ul_s = 0.0;
    let mut r_dl_m = 0.0;
    let mut r_dl_s = 0.0;
    let mut ra_ul = 0.0;
    let mut rb_ul = 0.0;
    let mut ra_dl = 0.0;
    let mut rb_dl = 0.0;

    for (layout, weight) in frame::layout_atoms(p)? {
        let ul = direction_under_layout(ctx, &layout, grid_db, &tagged, false)?;
        let dl = direction_under_layout(ctx, &layout, grid_db, &tagged, true)?;
        r_ul_m += weight * ul.single_hop;
        r_dl_m += weight * dl.single_hop;
        r_ul_s += weight * ul.access.min(ul.backhaul);
        r_dl_s += weight * dl.access.min(dl.backhaul);
        ra_ul += weight * ul.access;
        rb_ul += weight * ul.backhaul;
        ra_dl += weight * dl.access;
        rb_dl += weight * dl.backhaul;
    }

    // nats → bits (unless reproducing the printed integrals), times W/F.
    let base = if ctx.opts.strict_paper {
        1.0
    } else {
        1.0 / std::f64::consts::LN_2
    };
    let scale = base * p.bandwidth_hz / p.frame_slots as f64;
    for v in [
        &mut r_ul_m, &mut r_ul_s, &mut r_dl_m, &mut r_dl_s, &mut ra_ul, &mut rb_ul, &mut ra_dl,
        &mut rb_dl,
    ] {
        *v *= scale;
    }

    let (a_m, a_s) = (ctx.assoc.prob_mbs, ctx.assoc.prob_sbs);
    let r_ul = a_m * r_ul_m + a_s * r_ul_s;
    let r_dl = a_m * r_dl_m + a_s * r_dl_s;
    Ok(RateReport {
        r_ul,
        r_dl,
        r_overall: p.eta * r_dl + (1.0 - p.eta) * r_ul,
        r_ul_m,
        r_ul_s,
        r_dl_m,
        r_dl_s,
        ra_ul,
        rb_ul,
        ra_dl,
        rb_dl,
    })
}

/// Objective for the access-fraction optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateObjective {
    /// Mean rate of the typical user.
    Overall,
    /// Mean rate of a typical slave-attached (two-hop) user.
    TwoHop,
}

impl RateObjective {
    pub fn value(self, report: &RateReport, eta: f64) -> f64 {
        match self {
            RateObjective::Overall => report.r_overall,
            RateObjective::TwoHop => eta * report.r_dl_s + (1.0 - eta) * report.r_ul_s,
        }
    }
}

/// One point of an access-fraction sweep.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaSweepPoint {
    pub delta: f64,
    pub objective: f64,
    pub report: RateReport,
}

/// Evaluate the rate at every access fraction in `deltas` and return the
/// argmax of the objective (ties toward the smaller fraction) with the full
/// sweep.
pub fn optimize_delta(
    params: &NetworkParams,
    opts: EvalOptions,
    deltas: &[f64],
    objective: RateObjective,
) -> Result<(f64, RateReport, Vec<DeltaSweepPoint>)> {
    assert!(!deltas.is_empty(), "empty access-fraction set");
    let mut sweep = Vec::with_capacity(deltas.len());
    let mut best: Option<usize> = None;
    let mut sorted: Vec<f64> = deltas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &delta in &sorted {
        let mut p = params.clone();
        p.delta = delta;
        let ctx = ModelCtx::new(p, opts)?;
        let report = mean_rates(&ctx)?;
        let value = objective.value(&report, params.eta);
        sweep.push(DeltaSweepPoint {
            delta,
            objective: value,
            report,
        });
        match best {
            None => best = Some(sweep.len() - 1),
            Some(i) if value > sweep[i].objective => best = Some(sweep.len() - 1),
            _ => {}
        }
    }
    let i = best.unwrap();
    Ok((sweep[i].delta, sweep[i].report.clone(), sweep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::NetworkParamsConfig;
    use approx::assert_relative_eq;

    fn ctx_with(f: impl FnOnce(&mut NetworkParamsConfig)) -> ModelCtx {
        let mut cfg = NetworkParamsConfig::default();
        f(&mut cfg);
        ModelCtx::from_params(NetworkParams::from_config(&cfg).unwrap()).unwrap()
    }

    fn coarse_grid() -> Vec<f64> {
        tau_grid_db(-30.0, 80.0, 2.0)
    }

    #[test]
    fn spectral_efficiency_exponential_oracle() {
        // For SINR ~ Exp(1): P(X > τ) = e^{-τ} and E[ln(1+X)] = e·E1(1)
        // ≈ 0.596347; check the grid integrator against it.
        let grid = tau_grid_db(-40.0, 50.0, 0.25);
        let cov: Vec<f64> = grid.iter().map(|db| (-10f64.powf(db / 10.0)).exp()).collect();
        // Tail correction assumes a power law; the exponential tail is far
        // smaller, so a vanishing alpha keeps the correction out of the way.
        let se = spectral_efficiency_nats(&grid, &cov, 1e-9);
        assert_relative_eq!(se, 0.5963473623, max_relative = 1e-3);
    }

    #[test]
    fn eta_mixture_identity() {
        let ctx = ctx_with(|c| c.eta = 0.3);
        let r = mean_rates_on_grid(&ctx, &coarse_grid()).unwrap();
        assert_relative_eq!(
            r.r_overall,
            0.3 * r.r_dl + 0.7 * r.r_ul,
            max_relative = 1e-12
        );
        // Association mixture identity.
        assert_relative_eq!(
            r.r_ul,
            ctx.assoc.prob_mbs * r.r_ul_m + ctx.assoc.prob_sbs * r.r_ul_s,
            max_relative = 1e-12
        );
        // Two-hop rate below both of its components.
        assert!(r.r_ul_s <= r.ra_ul + 1e-9 && r.r_ul_s <= r.rb_ul + 1e-9);
        assert!(r.r_dl_s <= r.ra_dl + 1e-9 && r.r_dl_s <= r.rb_dl + 1e-9);
    }

    #[test]
    fn eta_extremes() {
        let ctx = ctx_with(|c| c.eta = 1.0);
        let r = mean_rates_on_grid(&ctx, &coarse_grid()).unwrap();
        assert_relative_eq!(r.r_overall, r.r_dl, max_relative = 1e-12);
        // Load-aware static TDD leaves no UL slots when all traffic is DL.
        assert_relative_eq!(r.r_ul, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn rates_scale_linearly_in_bandwidth_with_fixed_noise() {
        let base = ctx_with(|c| c.noise_dbm_override = Some(-86.0));
        let double = ctx_with(|c| {
            c.noise_dbm_override = Some(-86.0);
            c.bandwidth_mhz = 400.0;
        });
        let g = coarse_grid();
        let r1 = mean_rates_on_grid(&base, &g).unwrap();
        let r2 = mean_rates_on_grid(&double, &g).unwrap();
        assert_relative_eq!(r2.r_overall, 2.0 * r1.r_overall, max_relative = 1e-9);
        // Physical mode: noise grows with bandwidth, so the gain is sublinear.
        let phys = ctx_with(|c| c.bandwidth_mhz = 400.0);
        let r3 = mean_rates_on_grid(&phys, &g).unwrap();
        assert!(r3.r_overall < 2.0 * r1.r_overall);
    }

    #[test]
    fn single_tier_collapse() {
        // Without slaves the rate is the master-conditional rate and carries
        // no backhaul component.
        let ctx = ctx_with(|c| {
            c.lambda_s_per_km2 = 0.0;
            c.lambda_m_per_km2 = 100.0;
        });
        let r = mean_rates_on_grid(&ctx, &coarse_grid()).unwrap();
        assert_relative_eq!(r.r_ul, r.r_ul_m, max_relative = 1e-12);
        assert_eq!(r.rb_ul, 0.0);
        assert_eq!(r.r_ul_s, 0.0);
        assert!(r.r_ul > 0.0 && r.r_dl > 0.0);
    }

    #[test]
    fn strict_paper_drops_base_conversion() {
        let mut opts = EvalOptions::default();
        opts.strict_paper = true;
        let cfg = NetworkParamsConfig::default();
        let params = NetworkParams::from_config(&cfg).unwrap();
        let strict = ModelCtx::new(params.clone(), opts).unwrap();
        let normal = ModelCtx::from_params(params).unwrap();
        let g = coarse_grid();
        let a = mean_rates_on_grid(&strict, &g).unwrap();
        let b = mean_rates_on_grid(&normal, &g).unwrap();
        assert_relative_eq!(
            a.r_overall / std::f64::consts::LN_2,
            b.r_overall,
            max_relative = 1e-12
        );
    }

    #[test]
    fn delta_optimum_trivial_case() {
        // Master-only network: every slot spent on backhaul is wasted, so the
        // optimum access fraction is the largest offered.
        let mut cfg = NetworkParamsConfig::default();
        cfg.lambda_s_per_km2 = 0.0;
        cfg.lambda_m_per_km2 = 100.0;
        cfg.frame_slots = 2;
        let params = NetworkParams::from_config(&cfg).unwrap();
        let (best, _, sweep) = optimize_delta(
            &params,
            EvalOptions::default(),
            &[0.25, 0.5, 0.75, 1.0],
            RateObjective::Overall,
        )
        .unwrap();
        assert_eq!(best, 1.0);
        assert_eq!(sweep.len(), 4);
    }
}
