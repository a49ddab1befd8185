//! SINR coverage (CCDF) curves per link type, slot and scheme: the outer
//! integral of noise attenuation times the interference Laplace transform
//! against the serving-distance density, with the association exclusion
//! products.
//!
//! Curves are evaluated on a whole threshold grid at once over a fixed
//! composite Gauss-Legendre radial grid, so the expensive per-radius
//! geometry of the dynamic-TDD transform is built once per node and reused
//! across thresholds. Radial nodes fan out in parallel and reduce in index
//! order, keeping results deterministic under any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Layout;
use crate::interference::{self, DynamicBsExact, ModelCtx};
use crate::netmodel::{AccessScheme, BackhaulScheme, DeviceClass, LinkType, Tier};
use crate::quad;

/// Which of the four tagged links a curve describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    UlAccess,
    UlBackhaul,
    DlAccess,
    DlBackhaul,
}

impl LinkKind {
    pub fn label(self) -> &'static str {
        match self {
            LinkKind::UlAccess => "ul_access",
            LinkKind::UlBackhaul => "ul_backhaul",
            LinkKind::DlAccess => "dl_access",
            LinkKind::DlBackhaul => "dl_backhaul",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoveragePoint {
    pub tau_db: f64,
    pub tau: f64,
    pub coverage: f64,
}

/// SINR CCDF on a threshold grid for one (link, slot, tier) combination;
/// `tier = None` is the association mixture over serving tiers.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageCurve {
    pub link: LinkKind,
    pub slot: u32,
    pub tier: Option<Tier>,
    pub points: Vec<CoveragePoint>,
}

impl CoverageCurve {
    /// Linear interpolation of the threshold (dB) where the curve crosses
    /// `level`.
    pub fn threshold_at_coverage(&self, level: f64) -> Option<f64> {
        for w in self.points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.coverage >= level && b.coverage <= level && a.coverage != b.coverage {
                let frac = (a.coverage - level) / (a.coverage - b.coverage);
                return Some(a.tau_db + frac * (b.tau_db - a.tau_db));
            }
        }
        None
    }
}

/// Uniform threshold grid in dB, inclusive of both ends.
pub fn tau_grid_db(lo_db: f64, hi_db: f64, step_db: f64) -> Vec<f64> {
    let n = ((hi_db - lo_db) / step_db).round() as usize;
    (0..=n).map(|i| lo_db + i as f64 * step_db).collect()
}

/// The default curve grid: -20..60 dB at 1 dB spacing.
pub fn default_tau_grid() -> Vec<f64> {
    tau_grid_db(-20.0, 60.0, 1.0)
}

fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

// ---------------------------------------------------------------------------
// Radial grids
// ---------------------------------------------------------------------------

/// Composite radial quadrature adapted to the serving-distance density of
/// tier `t`, link type `mu`: nodes inside the LOS ball plus (for NLOS) a
/// second panel out to where the void probability kills the density.
fn serving_radius_grid(ctx: &ModelCtx, t: Tier, mu: LinkType) -> (Vec<f64>, Vec<f64>) {
    let p = &ctx.params;
    let lam = p.tier_density(t);
    match mu {
        LinkType::Los => quad::gl_grid(32, 0.0, p.d_los),
        LinkType::Nlos => {
            let r_max = (36.8 / (std::f64::consts::PI * lam) + p.p_los * p.d_los * p.d_los).sqrt();
            let (mut xs, mut ws) = quad::gl_grid(32, 0.0, p.d_los.min(r_max));
            if r_max > p.d_los {
                let (xs2, ws2) = quad::gl_grid(48, p.d_los, r_max);
                xs.extend(xs2);
                ws.extend(ws2);
            }
            (xs, ws)
        }
    }
}

/// Association-exclusion product over the non-serving (tier, link type)
/// combinations at serving distance `radius`.
fn exclusion_product(ctx: &ModelCtx, t: Tier, mu: LinkType, radius: f64) -> f64 {
    let p = &ctx.params;
    let serving_loss = radius.powf(p.alpha(mu));
    let w_t = p.assoc_weight(t);
    let mut prod = 1.0;
    for t2 in Tier::BOTH {
        if p.tier_density(t2) == 0.0 {
            continue;
        }
        let ratio = p.assoc_weight(t2) / w_t;
        for mu2 in LinkType::BOTH {
            if t2 == t && mu2 == mu {
                continue;
            }
            let excl = (serving_loss * ratio).powf(1.0 / p.alpha(mu2));
            prod *= p.void_probability(t2, mu2, excl).unwrap_or(1.0);
        }
    }
    prod
}

// ---------------------------------------------------------------------------
// Access links
// ---------------------------------------------------------------------------

fn access_conditional(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    t: Tier,
    grid_db: &[f64],
    downlink: bool,
) -> Result<Vec<f64>> {
    let p = &ctx.params;
    if p.tier_density(t) == 0.0 {
        return Err(Error::InfeasibleQuery(format!("tier {t:?} has zero density")));
    }
    let in_access = layout.is_access_slot(slot);
    if !in_access {
        // Poached slots exist only at slave BSs under UAB; direction decides
        // the window.
        let window_ok = if downlink {
            layout.is_dl_backhaul_slot(slot)
        } else {
            layout.is_ul_backhaul_slot(slot)
        };
        if !(window_ok && t == Tier::Sbs && p.backhaul_scheme == BackhaulScheme::Uab) {
            return Err(Error::InfeasibleQuery(format!(
                "access link in slot {slot} infeasible under {layout:?}"
            )));
        }
    }
    let taus: Vec<f64> = grid_db.iter().map(|&db| db_to_lin(db)).collect();
    let tx_power = if downlink {
        p.power(t.device_class())
    } else {
        p.power(DeviceClass::Ue)
    };
    let link_gain =
        p.ref_path_loss * tx_power * p.main_gain(DeviceClass::Ue) * p.main_gain(t.device_class());
    let noise = p.noise_w;
    let dynamic = p.access_scheme == AccessScheme::Dynamic;

    // Radial grids for both serving link types, plus the Laplace-argument
    // range they will visit.
    let grids: Vec<(LinkType, Vec<f64>, Vec<f64>)> = LinkType::BOTH
        .into_iter()
        .map(|mu| {
            let (radii, weights) = serving_radius_grid(ctx, t, mu);
            (mu, radii, weights)
        })
        .collect();
    let (tau_lo, tau_hi) = (taus[0], taus[taus.len() - 1]);
    let mut s_min = f64::INFINITY;
    let mut s_max = 0.0f64;
    for (mu, radii, _) in &grids {
        let alpha = p.alpha(*mu);
        for &r in [radii[0], radii[radii.len() - 1]].iter() {
            s_min = s_min.min(tau_lo * r.powf(alpha) / link_gain);
            s_max = s_max.max(tau_hi * r.powf(alpha) / link_gain);
        }
    }

    // Radius-independent transform factors, tabulated once per curve.
    let bg_table = if in_access {
        if downlink {
            interference::ExponentTable::build(s_min, s_max, |s| {
                interference::dl_access_bg_exponent(ctx, layout, slot, t, s)
            })?
        } else {
            interference::ExponentTable::build(s_min, s_max, |s| {
                interference::access_ue_exponent(ctx, layout, slot, t, t.device_class(), s)
            })?
        }
    } else if downlink {
        interference::ExponentTable::build(s_min, s_max, |s| {
            interference::dl_access_bg_exponent(ctx, layout, slot, t, s)
        })?
    } else {
        interference::ExponentTable::build(s_min, s_max, |s| {
            interference::ul_access_poach_exponent(ctx, layout, slot, t, s)
        })?
    };
    // Dynamic-TDD BS interference on UL without the exact planar form is
    // also radius-independent.
    let bs_lower_table = if !downlink && in_access && dynamic && !ctx.opts.exact_bs_laplace {
        let act = |nu: Tier| {
            ctx.frame
                .dl_activity(AccessScheme::Dynamic, nu, slot, layout)
                .unwrap_or(0.0)
        };
        Some(interference::ExponentTable::build(s_min, s_max, |s| {
            interference::dynamic_bs_lower_bound_exponent(ctx, t, s, act)
        })?)
    } else {
        None
    };
    let need_exact_bs = !downlink && in_access && dynamic && ctx.opts.exact_bs_laplace;

    let mut acc = vec![0.0; taus.len()];
    for (mu, radii, weights) in &grids {
        let mu = *mu;
        let alpha = p.alpha(mu);
        let contribs: Vec<Vec<f64>> = radii
            .par_iter()
            .zip(weights.par_iter())
            .map(|(&radius, &w)| {
                let geom = w
                    * p.serving_distance_pdf(t, mu, radius).unwrap_or(0.0)
                    * exclusion_product(ctx, t, mu, radius);
                if geom <= 0.0 {
                    return Ok(vec![0.0; taus.len()]);
                }
                let loss = radius.powf(alpha);
                let bs_exact = if need_exact_bs {
                    let act = |nu: Tier| {
                        ctx.frame
                            .dl_activity(AccessScheme::Dynamic, nu, slot, layout)
                            .unwrap_or(0.0)
                    };
                    Some(DynamicBsExact::new(ctx, t, mu, radius, act))
                } else {
                    None
                };
                let mut vals = Vec::with_capacity(taus.len());
                for &tau in &taus {
                    let s = tau * loss / link_gain;
                    let mut exponent = s * noise + bg_table.eval(s);
                    if downlink {
                        exponent +=
                            interference::dl_access_bs_exponent(ctx, layout, slot, loss, s)?;
                    } else if let Some(batch) = &bs_exact {
                        exponent += batch.exponent(s);
                    } else if let Some(tbl) = &bs_lower_table {
                        exponent += tbl.eval(s);
                    }
                    vals.push(geom * (-exponent).exp());
                }
                Ok(vals)
            })
            .collect::<Result<_>>()?;
        for c in contribs {
            for (a, v) in acc.iter_mut().zip(c) {
                *a += v;
            }
        }
    }
    let a_t = ctx.assoc.prob(t);
    if a_t <= 0.0 {
        return Err(Error::InfeasibleQuery(format!(
            "tier {t:?} has zero association probability"
        )));
    }
    for v in &mut acc {
        *v = (*v / a_t).clamp(0.0, 1.0);
    }
    Ok(acc)
}

fn mixture_or_conditional(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    tier: Option<Tier>,
    grid_db: &[f64],
    downlink: bool,
) -> Result<Vec<f64>> {
    match tier {
        Some(t) => access_conditional(ctx, layout, slot, t, grid_db, downlink),
        None => {
            let mut acc = vec![0.0; grid_db.len()];
            for t in Tier::BOTH {
                let a_t = ctx.assoc.prob(t);
                if a_t <= 0.0 || ctx.params.tier_density(t) == 0.0 {
                    continue;
                }
                let cond = access_conditional(ctx, layout, slot, t, grid_db, downlink)?;
                for (a, v) in acc.iter_mut().zip(cond) {
                    *a += a_t * v;
                }
            }
            Ok(acc)
        }
    }
}

fn build_curve(
    link: LinkKind,
    slot: u32,
    tier: Option<Tier>,
    grid_db: &[f64],
    values: Vec<f64>,
) -> CoverageCurve {
    CoverageCurve {
        link,
        slot,
        tier,
        points: grid_db
            .iter()
            .zip(values)
            .map(|(&db, coverage)| CoveragePoint {
                tau_db: db,
                tau: db_to_lin(db),
                coverage,
            })
            .collect(),
    }
}

/// UL access SINR CCDF in slot `slot`; `tier = None` mixes over the serving
/// tier with the association probabilities.
pub fn ul_access_coverage(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    tier: Option<Tier>,
    grid_db: &[f64],
) -> Result<CoverageCurve> {
    let tier = normalize_tier(ctx, layout, slot, tier, false)?;
    let values = mixture_or_conditional(ctx, layout, slot, tier, grid_db, false)?;
    Ok(build_curve(LinkKind::UlAccess, slot, tier, grid_db, values))
}

/// DL access SINR CCDF in slot `slot`.
pub fn dl_access_coverage(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    tier: Option<Tier>,
    grid_db: &[f64],
) -> Result<CoverageCurve> {
    let tier = normalize_tier(ctx, layout, slot, tier, true)?;
    let values = mixture_or_conditional(ctx, layout, slot, tier, grid_db, true)?;
    Ok(build_curve(LinkKind::DlAccess, slot, tier, grid_db, values))
}

/// Poached access slots are only defined at slave BSs; promote the mixture
/// to the slave-conditional curve there. Single-tier networks collapse the
/// mixture to the master tier.
fn normalize_tier(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    tier: Option<Tier>,
    downlink: bool,
) -> Result<Option<Tier>> {
    let in_backhaul = if downlink {
        layout.is_dl_backhaul_slot(slot)
    } else {
        layout.is_ul_backhaul_slot(slot)
    };
    if !layout.is_access_slot(slot) && in_backhaul {
        match tier {
            Some(Tier::Mbs) => {
                return Err(Error::InfeasibleQuery(
                    "poached access slots exist only at slave BSs".into(),
                ))
            }
            _ => return Ok(Some(Tier::Sbs)),
        }
    }
    if tier.is_none() && ctx.params.lambda_s == 0.0 {
        return Ok(Some(Tier::Mbs));
    }
    Ok(tier)
}

// ---------------------------------------------------------------------------
// Backhaul links
// ---------------------------------------------------------------------------

fn backhaul_values(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    grid_db: &[f64],
    downlink: bool,
) -> Result<Vec<f64>> {
    let p = &ctx.params;
    let taus: Vec<f64> = grid_db.iter().map(|&db| db_to_lin(db)).collect();
    let tx_power = if downlink {
        p.power(DeviceClass::Mbs)
    } else {
        p.power(DeviceClass::Sbs)
    };
    let link_gain =
        p.ref_path_loss * tx_power * p.main_gain(DeviceClass::Mbs) * p.main_gain(DeviceClass::Sbs);
    let noise = p.noise_w;
    let grids: Vec<(LinkType, Vec<f64>, Vec<f64>)> = LinkType::BOTH
        .into_iter()
        .map(|mu| {
            let (radii, weights) = serving_radius_grid(ctx, Tier::Mbs, mu);
            (mu, radii, weights)
        })
        .collect();
    let (tau_lo, tau_hi) = (taus[0], taus[taus.len() - 1]);
    let mut s_min = f64::INFINITY;
    let mut s_max = 0.0f64;
    for (mu, radii, _) in &grids {
        let alpha = p.alpha(*mu);
        for &r in [radii[0], radii[radii.len() - 1]].iter() {
            s_min = s_min.min(tau_lo * r.powf(alpha) / link_gain);
            s_max = s_max.max(tau_hi * r.powf(alpha) / link_gain);
        }
    }
    // Radius-independent part of the transform.
    let bg_table = if downlink {
        interference::ExponentTable::build(s_min, s_max, |s| {
            interference::dl_backhaul_poach_exponent(ctx, layout, slot, s)
        })?
    } else {
        interference::ExponentTable::build(s_min, s_max, |s| {
            interference::ul_backhaul_exponent(ctx, layout, slot, s)
        })?
    };
    let mut acc = vec![0.0; taus.len()];
    for (mu, radii, weights) in &grids {
        let mu = *mu;
        let alpha = p.alpha(mu);
        let alpha_other = p.alpha(mu.other());
        let contribs: Vec<Vec<f64>> = radii
            .par_iter()
            .zip(weights.par_iter())
            .map(|(&radius, &w)| {
                let loss = radius.powf(alpha);
                let excl = loss.powf(1.0 / alpha_other);
                let geom = w
                    * p.serving_distance_pdf(Tier::Mbs, mu, radius).unwrap_or(0.0)
                    * p.void_probability(Tier::Mbs, mu.other(), excl).unwrap_or(1.0);
                if geom <= 0.0 {
                    return Ok(vec![0.0; taus.len()]);
                }
                let mut vals = Vec::with_capacity(taus.len());
                for &tau in &taus {
                    let s = tau * loss / link_gain;
                    let mut exponent = s * noise + bg_table.eval(s);
                    if downlink {
                        exponent +=
                            interference::dl_backhaul_mbs_exponent(ctx, layout, slot, s, radius)?;
                    }
                    vals.push(geom * (-exponent).exp());
                }
                Ok(vals)
            })
            .collect::<Result<_>>()?;
        for c in contribs {
            for (a, v) in acc.iter_mut().zip(c) {
                *a += v;
            }
        }
    }
    for v in &mut acc {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(acc)
}

/// UL backhaul SINR CCDF of a typical slave BS link in slot `slot`.
pub fn ul_backhaul_coverage(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    grid_db: &[f64],
) -> Result<CoverageCurve> {
    if !layout.is_ul_backhaul_slot(slot) {
        return Err(Error::InfeasibleQuery(format!(
            "slot {slot} outside the UL backhaul subframe of {layout:?}"
        )));
    }
    let values = backhaul_values(ctx, layout, slot, grid_db, false)?;
    Ok(build_curve(LinkKind::UlBackhaul, slot, None, grid_db, values))
}

/// DL backhaul SINR CCDF of a typical slave BS link in slot `slot`.
pub fn dl_backhaul_coverage(
    ctx: &ModelCtx,
    layout: &Layout,
    slot: u32,
    grid_db: &[f64],
) -> Result<CoverageCurve> {
    if !layout.is_dl_backhaul_slot(slot) {
        return Err(Error::InfeasibleQuery(format!(
            "slot {slot} outside the DL backhaul subframe of {layout:?}"
        )));
    }
    let values = backhaul_values(ctx, layout, slot, grid_db, true)?;
    Ok(build_curve(LinkKind::DlBackhaul, slot, None, grid_db, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{NetworkParams, NetworkParamsConfig};
    use approx::assert_relative_eq;

    fn ctx_with(f: impl FnOnce(&mut NetworkParamsConfig)) -> ModelCtx {
        let mut cfg = NetworkParamsConfig::default();
        f(&mut cfg);
        ModelCtx::from_params(NetworkParams::from_config(&cfg).unwrap()).unwrap()
    }

    #[test]
    fn coverage_limits_and_monotonicity() {
        let ctx = ctx_with(|_| {});
        let layout = Layout::new(1, 1, 0, Some(0)).unwrap();
        let grid = tau_grid_db(-40.0, 60.0, 2.0);
        let curve = ul_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
        assert!(
            curve.points[0].coverage > 0.995,
            "low-threshold coverage {}",
            curve.points[0].coverage
        );
        let mut prev = f64::INFINITY;
        for pt in &curve.points {
            assert!(pt.coverage >= -1e-12 && pt.coverage <= 1.0);
            assert!(pt.coverage <= prev + 1e-9, "coverage not monotone at {} dB", pt.tau_db);
            prev = pt.coverage;
        }
    }

    #[test]
    fn mixture_is_affine_combination() {
        let ctx = ctx_with(|_| {});
        let layout = Layout::new(1, 1, 0, Some(1)).unwrap();
        let grid = tau_grid_db(-10.0, 30.0, 5.0);
        let mix = dl_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
        let m = dl_access_coverage(&ctx, &layout, 1, Some(Tier::Mbs), &grid).unwrap();
        let s = dl_access_coverage(&ctx, &layout, 1, Some(Tier::Sbs), &grid).unwrap();
        for i in 0..grid.len() {
            let expect =
                ctx.assoc.prob_mbs * m.points[i].coverage + ctx.assoc.prob_sbs * s.points[i].coverage;
            assert_relative_eq!(mix.points[i].coverage, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn noise_only_matches_independent_quadrature() {
        // With a vanishing user density, static TDD has no active interferer
        // and the UL access curve reduces to the SNR CCDF; integrate that
        // with the adaptive engine as an independent route.
        let ctx = ctx_with(|c| c.lambda_u_per_km2 = 1e-5);
        let layout = Layout::new(1, 1, 0, Some(0)).unwrap();
        let grid = [-10.0, 0.0, 10.0, 20.0];
        let curve = ul_access_coverage(&ctx, &layout, 1, None, &grid).unwrap();
        let p = &ctx.params;
        for (k, &db) in grid.iter().enumerate() {
            let tau = db_to_lin(db);
            let mut oracle = 0.0;
            for t in Tier::BOTH {
                let link_gain = p.ref_path_loss
                    * p.power(DeviceClass::Ue)
                    * p.main_gain(DeviceClass::Ue)
                    * p.main_gain(t.device_class());
                for mu in LinkType::BOTH {
                    let alpha = p.alpha(mu);
                    oracle += quad::adaptive_upper(
                        |r| {
                            let s = tau * r.powf(alpha) / link_gain;
                            p.serving_distance_pdf(t, mu, r).unwrap()
                                * exclusion_product(&ctx, t, mu, r)
                                * (-s * p.noise_w).exp()
                        },
                        0.0,
                        150.0,
                        1e-12,
                        1e-9,
                    )
                    .unwrap();
                }
            }
            assert_relative_eq!(curve.points[k].coverage, oracle, max_relative = 2e-4);
        }
    }

    #[test]
    fn backhaul_sab_dominates_uab() {
        let layout = Layout::new(2, 0, 1, Some(0)).unwrap();
        let grid = tau_grid_db(-10.0, 30.0, 5.0);
        let sab = ctx_with(|c| c.backhaul_scheme = BackhaulScheme::Sab);
        let uab = ctx_with(|c| c.backhaul_scheme = BackhaulScheme::Uab);
        let cu = ul_backhaul_coverage(&uab, &layout, 2, &grid).unwrap();
        let cs = ul_backhaul_coverage(&sab, &layout, 2, &grid).unwrap();
        for (a, b) in cs.points.iter().zip(&cu.points) {
            assert!(a.coverage >= b.coverage - 1e-9);
        }
        let cu = dl_backhaul_coverage(&uab, &layout, 1, &grid).unwrap();
        let cs = dl_backhaul_coverage(&sab, &layout, 1, &grid).unwrap();
        for (a, b) in cs.points.iter().zip(&cu.points) {
            assert!(a.coverage >= b.coverage - 1e-9);
        }
    }

    #[test]
    fn static_dominates_dynamic_ul_access() {
        let grid = tau_grid_db(-10.0, 30.0, 5.0);
        let st = ctx_with(|_| {});
        let dy = ctx_with(|c| c.access_scheme = AccessScheme::Dynamic);
        // UL window of the static layout against the dynamic slot-1 curve of
        // the same frame.
        let layout_s = Layout::new(1, 1, 0, Some(0)).unwrap();
        let layout_d = Layout::new(1, 1, 0, None).unwrap();
        let cs = ul_access_coverage(&st, &layout_s, 1, None, &grid).unwrap();
        let cd = ul_access_coverage(&dy, &layout_d, 1, None, &grid).unwrap();
        for (a, b) in cs.points.iter().zip(&cd.points) {
            assert!(
                a.coverage >= b.coverage - 1e-6,
                "static {} < dynamic {} at {} dB",
                a.coverage,
                b.coverage,
                a.tau_db
            );
        }
    }

    #[test]
    fn infeasible_slots_error() {
        let ctx = ctx_with(|_| {});
        let layout = Layout::new(1, 1, 0, Some(0)).unwrap();
        assert!(ul_backhaul_coverage(&ctx, &layout, 1, &[0.0]).is_err());
        assert!(dl_backhaul_coverage(&ctx, &layout, 1, &[0.0]).is_err());
        // Poached UL access at a master BS is infeasible.
        let layout = Layout::new(2, 1, 0, Some(0)).unwrap();
        let uab = ctx_with(|c| c.backhaul_scheme = BackhaulScheme::Uab);
        assert!(ul_access_coverage(&uab, &layout, 2, Some(Tier::Mbs), &[0.0]).is_err());
        assert!(ul_access_coverage(&uab, &layout, 2, None, &[0.0]).is_ok());
    }

    #[test]
    fn threshold_interpolation() {
        let curve = CoverageCurve {
            link: LinkKind::UlAccess,
            slot: 1,
            tier: None,
            points: vec![
                CoveragePoint { tau_db: 0.0, tau: 1.0, coverage: 0.9 },
                CoveragePoint { tau_db: 10.0, tau: 10.0, coverage: 0.3 },
            ],
        };
        let x = curve.threshold_at_coverage(0.5).unwrap();
        assert_relative_eq!(x, 10.0 * (0.4 / 0.6), epsilon = 1e-12);
    }
}
