//! TDD frame arithmetic: randomized access/backhaul split of the frame,
//! static and dynamic DL-subframe-size distributions, per-slot activity
//! probabilities of interfering devices, and the thinned densities that feed
//! the poaching interference terms.
//!
//! Slot duration cancels in every rate expression, so no numeric slot length
//! appears anywhere; frames are pure slot counts.

use crate::error::{Error, Result};
use crate::loadmodel::{self, JointKind, JointTable};
use crate::netmodel::{AccessScheme, Association, NetworkParams, Tier};

/// One realization of the frame split, conditioning everything downstream.
/// `f_ad` is present only under static TDD, where the DL/UL boundary of the
/// access subframe is synchronized network-wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub f: u32,
    pub f_a: u32,
    pub f_bd: u32,
    pub f_ad: Option<u32>,
}

impl Layout {
    pub fn new(f: u32, f_a: u32, f_bd: u32, f_ad: Option<u32>) -> Result<Layout> {
        if f_a > f {
            return Err(Error::invalid("f_a", "access subframe larger than frame"));
        }
        if f_bd > f - f_a {
            return Err(Error::invalid("f_bd", "DL backhaul subframe larger than backhaul subframe"));
        }
        if let Some(f_ad) = f_ad {
            if f_ad > f_a {
                return Err(Error::invalid("f_ad", "DL access subframe larger than access subframe"));
            }
        }
        Ok(Layout { f, f_a, f_bd, f_ad })
    }

    pub fn is_access_slot(&self, i: u32) -> bool {
        i >= 1 && i <= self.f_a
    }

    pub fn is_dl_backhaul_slot(&self, i: u32) -> bool {
        i > self.f_a && i <= self.f_a + self.f_bd
    }

    pub fn is_ul_backhaul_slot(&self, i: u32) -> bool {
        i > self.f_a + self.f_bd && i <= self.f
    }

    pub fn access_slots(&self) -> impl Iterator<Item = u32> {
        1..=self.f_a
    }

    pub fn dl_backhaul_slots(&self) -> impl Iterator<Item = u32> {
        self.f_a + 1..=self.f_a + self.f_bd
    }

    pub fn ul_backhaul_slots(&self) -> impl Iterator<Item = u32> {
        self.f_a + self.f_bd + 1..=self.f
    }
}

/// Two-atom PMF from randomized rounding of a fractional slot count:
/// ceil with probability frac(x), floor otherwise.
pub fn rounding_pmf(x: f64) -> Vec<(u32, f64)> {
    let floor = x.floor();
    let frac = x - floor;
    if frac < 1e-12 {
        vec![(floor as u32, 1.0)]
    } else if frac > 1.0 - 1e-12 {
        vec![(floor as u32 + 1, 1.0)]
    } else {
        vec![(floor as u32, 1.0 - frac), (floor as u32 + 1, frac)]
    }
}

/// PMF of the access subframe size for an access fraction `delta` of an
/// `f`-slot frame.
pub fn access_subframe_pmf(delta: f64, f: u32) -> Result<Vec<(u32, f64)>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid("delta", "access fraction outside [0, 1]"));
    }
    if f == 0 {
        return Err(Error::invalid("frame_slots", "empty frame"));
    }
    Ok(rounding_pmf(delta * f as f64))
}

/// PMF of the DL access subframe size under static TDD with DL share `gamma`.
pub fn static_fad_pmf(gamma: f64, f_a: u32) -> Result<Vec<(u32, f64)>> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid("gamma", "DL share outside [0, 1]"));
    }
    Ok(rounding_pmf(gamma * f_a as f64))
}

/// PMF of the DL access subframe size of a typical BS under dynamic TDD:
/// the exact expectation of the rounding coin over the joint UL/DL load,
/// with the empty-cell indicator forcing zero DL slots.
///
/// Enumerating the load atoms evaluates the defining expectation exactly at
/// the table's truncation accuracy, which is what the integral form computes
/// by sweeping the rounding threshold.
pub fn dynamic_fad_pmf(loads: &JointTable, f_a: u32) -> Vec<f64> {
    let mut pmf = vec![0.0; f_a as usize + 1];
    if f_a == 0 {
        pmf[0] = 1.0;
        return pmf;
    }
    for (n_ul, n_dl, p) in loads.iter() {
        let gamma = if n_dl == 0 {
            0.0
        } else {
            n_dl as f64 / (n_ul + n_dl) as f64
        };
        for (n, w) in rounding_pmf(gamma * f_a as f64) {
            pmf[n as usize] += p * w;
        }
    }
    pmf
}

/// Mean UL/DL/total loads of a typical BS of one tier.
#[derive(Debug, Clone, Copy)]
pub struct TierLoadProfile {
    pub eps_total: f64,
    pub eps_ul: f64,
    pub eps_dl: f64,
    /// Mean number of SBSs per MBS (zero for the SBS tier itself).
    pub eps_sbs: f64,
}

pub fn tier_loads(params: &NetworkParams, assoc: &Association, tier: Tier) -> TierLoadProfile {
    let lam = params.tier_density(tier);
    if lam <= 0.0 {
        return TierLoadProfile {
            eps_total: 0.0,
            eps_ul: 0.0,
            eps_dl: 0.0,
            eps_sbs: 0.0,
        };
    }
    let eps_total = params.lambda_u * assoc.prob(tier) / lam;
    TierLoadProfile {
        eps_total,
        eps_ul: (1.0 - params.eta) * eps_total,
        eps_dl: params.eta * eps_total,
        eps_sbs: match tier {
            Tier::Mbs => params.lambda_s / params.lambda_m,
            Tier::Sbs => 0.0,
        },
    }
}

/// Thinned point-process densities entering the backhaul-subframe Laplace
/// transforms (all per m²), plus the activity probabilities built from them.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveDensities {
    /// Density of SBSs holding at least one UL user.
    pub lambda_su: f64,
    /// Density of SBSs holding at least one DL user.
    pub lambda_sd: f64,
    /// Probability that an MBS has at least one UL-backhaul-active SBS.
    pub p_mbs_ul_busy: f64,
    /// Probability that an MBS has at least one DL-backhaul-active SBS.
    pub p_mbs_dl_busy: f64,
    /// Density of SBSs left unscheduled by their serving MBS in a slot.
    pub lambda_unscheduled: f64,
    /// Density of UL-poaching SBSs (their scheduled UE transmits).
    pub lambda_poach_ul: f64,
    /// Density of DL-poaching SBSs.
    pub lambda_poach_dl: f64,
}

impl EffectiveDensities {
    pub fn compute(params: &NetworkParams, assoc: &Association) -> EffectiveDensities {
        if params.lambda_s == 0.0 {
            return EffectiveDensities {
                lambda_su: 0.0,
                lambda_sd: 0.0,
                p_mbs_ul_busy: 0.0,
                p_mbs_dl_busy: 0.0,
                lambda_unscheduled: 0.0,
                lambda_poach_ul: 0.0,
                lambda_poach_dl: 0.0,
            };
        }
        let loads_s = tier_loads(params, assoc, Tier::Sbs);
        let occupied_ul = 1.0 - loadmodel::empty_probability(loads_s.eps_ul);
        let occupied_dl = 1.0 - loadmodel::empty_probability(loads_s.eps_dl);
        let lambda_su = params.lambda_s * occupied_ul;
        let lambda_sd = params.lambda_s * occupied_dl;
        // One SBS per non-empty MBS is scheduled per backhaul slot; the rest
        // are candidates for poaching (positive part).
        let scheduled = params.lambda_m * (1.0 - loadmodel::empty_probability(params.lambda_s / params.lambda_m));
        let lambda_unscheduled = (params.lambda_s - scheduled).max(0.0);
        EffectiveDensities {
            lambda_su,
            lambda_sd,
            p_mbs_ul_busy: 1.0 - loadmodel::empty_probability(lambda_su / params.lambda_m),
            p_mbs_dl_busy: 1.0 - loadmodel::empty_probability(lambda_sd / params.lambda_m),
            lambda_unscheduled,
            lambda_poach_ul: params.p_ul * occupied_ul * lambda_unscheduled,
            lambda_poach_dl: params.p_dl * occupied_dl * lambda_unscheduled,
        }
    }
}

/// Everything slot-activity computations need, precomputed once per
/// parameter point: per-tier loads, the dynamic DL-split PMF for every
/// feasible access-subframe size, and the effective densities.
#[derive(Debug, Clone)]
pub struct FrameModel {
    loads: [TierLoadProfile; 2],
    /// `fad_dynamic[tier][f_a][n]` = P(F_ad = n | F_a = f_a) for a typical BS.
    fad_dynamic: [Vec<Vec<f64>>; 2],
    pub eff: EffectiveDensities,
    pub eta: f64,
}

impl FrameModel {
    pub fn new(params: &NetworkParams, assoc: &Association, tail_tol: f64) -> Result<FrameModel> {
        let mut fad_dynamic: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        let mut loads = [TierLoadProfile {
            eps_total: 0.0,
            eps_ul: 0.0,
            eps_dl: 0.0,
            eps_sbs: 0.0,
        }; 2];
        for (ti, tier) in Tier::BOTH.into_iter().enumerate() {
            let profile = tier_loads(params, assoc, tier);
            loads[ti] = profile;
            let table = if profile.eps_total > 0.0 {
                Some(JointTable::build(
                    profile.eps_total,
                    params.eta,
                    JointKind::Typical,
                    tail_tol,
                )?)
            } else {
                None
            };
            for f_a in 0..=params.frame_slots {
                let pmf = match &table {
                    Some(t) => dynamic_fad_pmf(t, f_a),
                    None => {
                        // Empty tier or no users: every BS idles at zero DL slots.
                        let mut pmf = vec![0.0; f_a as usize + 1];
                        pmf[0] = 1.0;
                        pmf
                    }
                };
                fad_dynamic[ti].push(pmf);
            }
        }
        Ok(FrameModel {
            loads,
            fad_dynamic,
            eff: EffectiveDensities::compute(params, assoc),
            eta: params.eta,
        })
    }

    pub fn loads(&self, tier: Tier) -> &TierLoadProfile {
        &self.loads[tier_index(tier)]
    }

    pub fn dynamic_fad(&self, tier: Tier, f_a: u32) -> &[f64] {
        &self.fad_dynamic[tier_index(tier)][f_a as usize]
    }

    /// Probability that an interfering tier-`tier` BS transmits DL access in
    /// slot `i` of the access subframe.
    pub fn dl_activity(&self, scheme: AccessScheme, tier: Tier, i: u32, layout: &Layout) -> Result<f64> {
        if !layout.is_access_slot(i) {
            return Err(Error::InfeasibleQuery(format!(
                "slot {i} outside access subframe of {layout:?}"
            )));
        }
        match scheme {
            AccessScheme::Static => {
                let f_ad = layout.f_ad.ok_or_else(|| {
                    Error::InfeasibleQuery("static TDD requires f_ad in the layout".into())
                })?;
                if i <= f_ad {
                    Ok(1.0 - loadmodel::empty_probability(self.loads(tier).eps_dl))
                } else {
                    Ok(0.0)
                }
            }
            AccessScheme::Dynamic => {
                let pmf = self.dynamic_fad(tier, layout.f_a);
                Ok(pmf[i as usize..].iter().sum())
            }
        }
    }

    /// Probability that an interfering tier-`tier` BS has a scheduled UL user
    /// transmitting in slot `i` of the access subframe.
    pub fn ul_activity(&self, scheme: AccessScheme, tier: Tier, i: u32, layout: &Layout) -> Result<f64> {
        if !layout.is_access_slot(i) {
            return Err(Error::InfeasibleQuery(format!(
                "slot {i} outside access subframe of {layout:?}"
            )));
        }
        let p_no_ul = loadmodel::empty_probability(self.loads(tier).eps_ul);
        match scheme {
            AccessScheme::Static => {
                let f_ad = layout.f_ad.ok_or_else(|| {
                    Error::InfeasibleQuery("static TDD requires f_ad in the layout".into())
                })?;
                if i > f_ad {
                    Ok(1.0 - p_no_ul)
                } else {
                    Ok(0.0)
                }
            }
            AccessScheme::Dynamic => {
                // P(F_ad < i <= F_a) minus the all-DL void term, as printed;
                // clamped into [0, 1] since the subtraction is an upper-bound
                // argument that can undershoot for extreme traffic mixes.
                let pmf = self.dynamic_fad(tier, layout.f_a);
                let cdf: f64 = pmf[..i as usize].iter().sum();
                Ok((cdf - p_no_ul).clamp(0.0, 1.0))
            }
        }
    }
}

fn tier_index(tier: Tier) -> usize {
    match tier {
        Tier::Mbs => 0,
        Tier::Sbs => 1,
    }
}

/// Enumerate the joint atoms of the network-wide frame layout
/// (access size, DL backhaul size, and the static DL access boundary).
pub fn layout_atoms(params: &NetworkParams) -> Result<Vec<(Layout, f64)>> {
    let f = params.frame_slots;
    let mut atoms = Vec::new();
    for (f_a, p_a) in access_subframe_pmf(params.delta, f)? {
        let f_b = f - f_a;
        for (f_bd, p_bd) in static_fad_pmf(params.eta, f_b)? {
            match params.access_scheme {
                AccessScheme::Static => {
                    for (f_ad, p_ad) in static_fad_pmf(params.eta, f_a)? {
                        atoms.push((Layout::new(f, f_a, f_bd, Some(f_ad))?, p_a * p_bd * p_ad));
                    }
                }
                AccessScheme::Dynamic => {
                    atoms.push((Layout::new(f, f_a, f_bd, None)?, p_a * p_bd));
                }
            }
        }
    }
    Ok(atoms)
}
