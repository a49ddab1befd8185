//! Physical-layer and geometric primitives: network parameters, LOS-ball
//! blockage, sectored antenna gain distributions, propagation-process
//! intensities, tier association probabilities and serving-distance laws.
//!
//! Everything here is a pure function of immutable parameter values. All
//! quantities are SI/linear internally; dBm, dB, degrees, GHz/MHz and per-km²
//! exist only in [`NetworkParamsConfig`].

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;

/// Base-station tier: fiber-backhauled master or wirelessly backhauled slave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Mbs,
    Sbs,
}

impl Tier {
    pub const BOTH: [Tier; 2] = [Tier::Mbs, Tier::Sbs];

    pub fn device_class(self) -> DeviceClass {
        match self {
            Tier::Mbs => DeviceClass::Mbs,
            Tier::Sbs => DeviceClass::Sbs,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Tier::Mbs => "m",
            Tier::Sbs => "s",
        }
    }
}

/// Line-of-sight state of a link under the LOS-ball blockage model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkType {
    Los,
    Nlos,
}

impl LinkType {
    pub const BOTH: [LinkType; 2] = [LinkType::Los, LinkType::Nlos];

    pub fn other(self) -> LinkType {
        match self {
            LinkType::Los => LinkType::Nlos,
            LinkType::Nlos => LinkType::Los,
        }
    }
}

/// Transmitter/receiver device class for antenna gain lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceClass {
    Mbs,
    Sbs,
    Ue,
}

impl DeviceClass {
    fn index(self) -> usize {
        match self {
            DeviceClass::Mbs => 0,
            DeviceClass::Sbs => 1,
            DeviceClass::Ue => 2,
        }
    }
}

/// UL/DL split policy in the access subframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessScheme {
    /// Network-wide load-aware split: DL fraction fixed to the DL user share.
    Static,
    /// Each BS splits according to its own instantaneous UL/DL user counts.
    Dynamic,
}

/// Access-backhaul coordination in the backhaul subframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackhaulScheme {
    /// Synchronized: unscheduled slave BSs stay silent in backhaul slots.
    Sab,
    /// Unsynchronized: slaves poach direction-matched unscheduled backhaul
    /// slots for access with probabilities `p_ul` / `p_dl`.
    Uab,
}

// ---------------------------------------------------------------------------
// Configuration (unit-suffixed) and validated SI parameters
// ---------------------------------------------------------------------------

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Network configuration as read from JSON. Field names carry units
/// explicitly; defaults are the 28 GHz urban setup used throughout the
/// numerical experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkParamsConfig {
    pub lambda_m_per_km2: f64,
    pub lambda_s_per_km2: f64,
    pub lambda_u_per_km2: f64,
    pub p_m_dbm: f64,
    pub p_s_dbm: f64,
    pub p_u_dbm: f64,
    pub main_gain_m_db: f64,
    pub main_gain_s_db: f64,
    pub main_gain_u_db: f64,
    pub side_gain_m_db: f64,
    pub side_gain_s_db: f64,
    pub side_gain_u_db: f64,
    pub beamwidth_m_deg: f64,
    pub beamwidth_s_deg: f64,
    pub beamwidth_u_deg: f64,
    pub bias_m_db: f64,
    pub bias_s_db: f64,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub noise_figure_db: f64,
    /// When set, overrides the thermal-noise formula with a fixed value.
    /// Diagnostic knob for bandwidth-scaling checks.
    pub noise_dbm_override: Option<f64>,
    pub p_los: f64,
    pub d_los_m: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub eta: f64,
    pub delta: f64,
    pub frame_slots: u32,
    pub p_ul: f64,
    pub p_dl: f64,
    pub access_scheme: AccessScheme,
    pub backhaul_scheme: BackhaulScheme,
}

impl Default for NetworkParamsConfig {
    fn default() -> Self {
        NetworkParamsConfig {
            lambda_m_per_km2: 20.0,
            lambda_s_per_km2: 80.0,
            lambda_u_per_km2: 200.0,
            p_m_dbm: 30.0,
            p_s_dbm: 30.0,
            p_u_dbm: 20.0,
            main_gain_m_db: 24.0,
            main_gain_s_db: 24.0,
            main_gain_u_db: 6.0,
            side_gain_m_db: -4.0,
            side_gain_s_db: -4.0,
            side_gain_u_db: -14.0,
            beamwidth_m_deg: 10.0,
            beamwidth_s_deg: 10.0,
            beamwidth_u_deg: 60.0,
            bias_m_db: 0.0,
            bias_s_db: 0.0,
            carrier_ghz: 28.0,
            bandwidth_mhz: 200.0,
            noise_figure_db: 5.0,
            noise_dbm_override: None,
            p_los: 0.3,
            d_los_m: 200.0,
            alpha_los: 2.1,
            alpha_nlos: 3.4,
            eta: 0.5,
            delta: 0.5,
            frame_slots: 1,
            p_ul: 1.0,
            p_dl: 1.0,
            access_scheme: AccessScheme::Static,
            backhaul_scheme: BackhaulScheme::Sab,
        }
    }
}

/// Validated network parameters in SI units and linear scale.
#[derive(Debug, Clone)]
pub struct NetworkParams {
    /// Tier densities, points per m².
    pub lambda_m: f64,
    pub lambda_s: f64,
    pub lambda_u: f64,
    /// Transmit powers, watts, indexed by device class.
    powers: [f64; 3],
    /// Main/side lobe gains (linear) and half-power beamwidths (radians).
    main_gain: [f64; 3],
    side_gain: [f64; 3],
    beamwidth: [f64; 3],
    /// Association biases (linear) per tier.
    bias: [f64; 2],
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Omnidirectional path loss at 1 m reference distance (linear).
    pub ref_path_loss: f64,
    /// Thermal noise power, watts.
    pub noise_w: f64,
    pub p_los: f64,
    pub d_los: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Fraction of users with downlink traffic.
    pub eta: f64,
    /// Fraction of frame slots allocated to access.
    pub delta: f64,
    pub frame_slots: u32,
    pub p_ul: f64,
    pub p_dl: f64,
    pub access_scheme: AccessScheme,
    pub backhaul_scheme: BackhaulScheme,
}

/// Reference path loss at 1 m for carrier `f_c` (free-space, linear gain).
pub fn reference_path_loss(carrier_hz: f64) -> Result<f64> {
    if carrier_hz <= 0.0 {
        return Err(Error::invalid("carrier_hz", "must be positive"));
    }
    let x = 3.0e8 / (4.0 * PI * carrier_hz);
    Ok(x * x)
}

/// Thermal noise power in watts over bandwidth `w_hz` with the given noise
/// figure: -174 dBm/Hz + 10 log10(W) + NF.
pub fn noise_power_w(w_hz: f64, noise_figure_db: f64) -> Result<f64> {
    if w_hz <= 0.0 {
        return Err(Error::invalid("bandwidth_hz", "must be positive"));
    }
    Ok(dbm_to_watts(-174.0 + 10.0 * w_hz.log10() + noise_figure_db))
}

impl NetworkParams {
    pub fn from_config(cfg: &NetworkParamsConfig) -> Result<Self> {
        let per_km2 = 1e-6;
        let check_unit = |name: &'static str, v: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} outside [0, 1]")));
            }
            Ok(())
        };
        if cfg.lambda_m_per_km2 <= 0.0 {
            return Err(Error::invalid("lambda_m_per_km2", "must be positive"));
        }
        if cfg.lambda_s_per_km2 < 0.0 || cfg.lambda_u_per_km2 <= 0.0 {
            return Err(Error::invalid("lambda_s_per_km2/lambda_u_per_km2", "negative density"));
        }
        check_unit("p_los", cfg.p_los)?;
        check_unit("eta", cfg.eta)?;
        check_unit("delta", cfg.delta)?;
        check_unit("p_ul", cfg.p_ul)?;
        check_unit("p_dl", cfg.p_dl)?;
        if cfg.d_los_m <= 0.0 {
            return Err(Error::invalid("d_los_m", "must be positive"));
        }
        // alpha > 2 keeps the interference shot noise integrable.
        if !(cfg.alpha_los > 2.0) {
            return Err(Error::invalid("alpha_los", "path-loss exponents must exceed 2"));
        }
        if cfg.alpha_nlos < cfg.alpha_los {
            return Err(Error::invalid("alpha_nlos", "must be >= alpha_los"));
        }
        if cfg.frame_slots == 0 {
            return Err(Error::invalid("frame_slots", "frame must hold at least one slot"));
        }
        for (name, bw) in [
            ("beamwidth_m_deg", cfg.beamwidth_m_deg),
            ("beamwidth_s_deg", cfg.beamwidth_s_deg),
            ("beamwidth_u_deg", cfg.beamwidth_u_deg),
        ] {
            if !(bw > 0.0 && bw < 360.0) {
                return Err(Error::invalid(name, format!("{bw} outside (0, 360)")));
            }
        }
        for (name, main, side) in [
            ("m", cfg.main_gain_m_db, cfg.side_gain_m_db),
            ("s", cfg.main_gain_s_db, cfg.side_gain_s_db),
            ("u", cfg.main_gain_u_db, cfg.side_gain_u_db),
        ] {
            if main < side {
                return Err(Error::invalid(
                    "main_gain_db",
                    format!("class {name}: main lobe below side lobe"),
                ));
            }
        }
        let carrier_hz = cfg.carrier_ghz * 1e9;
        let bandwidth_hz = cfg.bandwidth_mhz * 1e6;
        let ref_path_loss = reference_path_loss(carrier_hz)?;
        let noise_w = match cfg.noise_dbm_override {
            Some(dbm) => dbm_to_watts(dbm),
            None => noise_power_w(bandwidth_hz, cfg.noise_figure_db)?,
        };
        Ok(NetworkParams {
            lambda_m: cfg.lambda_m_per_km2 * per_km2,
            lambda_s: cfg.lambda_s_per_km2 * per_km2,
            lambda_u: cfg.lambda_u_per_km2 * per_km2,
            powers: [
                dbm_to_watts(cfg.p_m_dbm),
                dbm_to_watts(cfg.p_s_dbm),
                dbm_to_watts(cfg.p_u_dbm),
            ],
            main_gain: [
                db_to_linear(cfg.main_gain_m_db),
                db_to_linear(cfg.main_gain_s_db),
                db_to_linear(cfg.main_gain_u_db),
            ],
            side_gain: [
                db_to_linear(cfg.side_gain_m_db),
                db_to_linear(cfg.side_gain_s_db),
                db_to_linear(cfg.side_gain_u_db),
            ],
            beamwidth: [
                cfg.beamwidth_m_deg.to_radians(),
                cfg.beamwidth_s_deg.to_radians(),
                cfg.beamwidth_u_deg.to_radians(),
            ],
            bias: [db_to_linear(cfg.bias_m_db), db_to_linear(cfg.bias_s_db)],
            carrier_hz,
            bandwidth_hz,
            ref_path_loss,
            noise_w,
            p_los: cfg.p_los,
            d_los: cfg.d_los_m,
            alpha_los: cfg.alpha_los,
            alpha_nlos: cfg.alpha_nlos,
            eta: cfg.eta,
            delta: cfg.delta,
            frame_slots: cfg.frame_slots,
            p_ul: cfg.p_ul,
            p_dl: cfg.p_dl,
            access_scheme: cfg.access_scheme,
            backhaul_scheme: cfg.backhaul_scheme,
        })
    }

    pub fn defaults() -> Self {
        Self::from_config(&NetworkParamsConfig::default()).expect("default config is valid")
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_m + self.lambda_s
    }

    pub fn tier_density(&self, t: Tier) -> f64 {
        match t {
            Tier::Mbs => self.lambda_m,
            Tier::Sbs => self.lambda_s,
        }
    }

    pub fn power(&self, c: DeviceClass) -> f64 {
        self.powers[c.index()]
    }

    pub fn main_gain(&self, c: DeviceClass) -> f64 {
        self.main_gain[c.index()]
    }

    pub fn side_gain(&self, c: DeviceClass) -> f64 {
        self.side_gain[c.index()]
    }

    pub fn beamwidth(&self, c: DeviceClass) -> f64 {
        self.beamwidth[c.index()]
    }

    pub fn bias(&self, t: Tier) -> f64 {
        match t {
            Tier::Mbs => self.bias[0],
            Tier::Sbs => self.bias[1],
        }
    }

    /// Biased beamformed EIRP-like product P·G·B that drives association.
    pub fn assoc_weight(&self, t: Tier) -> f64 {
        self.power(t.device_class()) * self.main_gain(t.device_class()) * self.bias(t)
    }

    /// Path-loss exponent for a link type.
    pub fn alpha(&self, link: LinkType) -> f64 {
        match link {
            LinkType::Los => self.alpha_los,
            LinkType::Nlos => self.alpha_nlos,
        }
    }

    /// LOS probability of a link of length `d` (inclusive at the ball edge).
    pub fn los_probability(&self, d: f64) -> Result<f64> {
        if d < 0.0 {
            return Err(Error::invalid("distance", "negative link length"));
        }
        Ok(if d <= self.d_los { self.p_los } else { 0.0 })
    }

    /// Probability that a link of length `d` has the given type.
    pub fn link_probability(&self, link: LinkType, d: f64) -> f64 {
        let p = if d <= self.d_los { self.p_los } else { 0.0 };
        match link {
            LinkType::Los => p,
            LinkType::Nlos => 1.0 - p,
        }
    }

    // -- propagation process -------------------------------------------------

    /// Intensity measure of the path-loss process of tier `t` seen from a
    /// fixed point: expected number of tier-t BSs whose marked path loss is
    /// below `tau`.
    pub fn path_loss_intensity(&self, t: Tier, tau: f64) -> Result<f64> {
        if tau <= 0.0 {
            return Err(Error::invalid("tau", "path-loss argument must be positive"));
        }
        let lam = self.tier_density(t);
        let p = self.p_los;
        let knot_l = self.d_los.powf(self.alpha_los);
        let knot_n = self.d_los.powf(self.alpha_nlos);
        let v = if tau < knot_l {
            p * tau.powf(2.0 / self.alpha_los) + (1.0 - p) * tau.powf(2.0 / self.alpha_nlos)
        } else if tau <= knot_n {
            p * self.d_los * self.d_los + (1.0 - p) * tau.powf(2.0 / self.alpha_nlos)
        } else {
            tau.powf(2.0 / self.alpha_nlos)
        };
        Ok(PI * lam * v)
    }

    /// Density of [`Self::path_loss_intensity`] with respect to `tau`.
    pub fn path_loss_intensity_density(&self, t: Tier, tau: f64) -> Result<f64> {
        if tau <= 0.0 {
            return Err(Error::invalid("tau", "path-loss argument must be positive"));
        }
        let lam = self.tier_density(t);
        let p = self.p_los;
        let knot_l = self.d_los.powf(self.alpha_los);
        let knot_n = self.d_los.powf(self.alpha_nlos);
        let nlos_part = (2.0 * (1.0 - p) / self.alpha_nlos) * tau.powf(2.0 / self.alpha_nlos - 1.0);
        let v = if tau < knot_l {
            (2.0 * p / self.alpha_los) * tau.powf(2.0 / self.alpha_los - 1.0) + nlos_part
        } else if tau <= knot_n {
            nlos_part
        } else {
            (2.0 / self.alpha_nlos) * tau.powf(2.0 / self.alpha_nlos - 1.0)
        };
        Ok(PI * lam * v)
    }

    /// CCDF of the smallest tier-`t` path loss (void probability of the
    /// propagation process below `tau`).
    pub fn min_loss_ccdf(&self, t: Tier, tau: f64) -> Result<f64> {
        Ok((-self.path_loss_intensity(t, tau)?).exp())
    }

    // -- serving-distance law -------------------------------------------------

    /// Void probability: no tier-`t` BS of link type `link` within radius `r`.
    pub fn void_probability(&self, t: Tier, link: LinkType, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::invalid("radius", "negative radius"));
        }
        let lam = self.tier_density(t);
        let clipped = r.min(self.d_los);
        let v = match link {
            LinkType::Los => self.p_los * clipped * clipped,
            LinkType::Nlos => r * r - self.p_los * clipped * clipped,
        };
        Ok((-PI * lam * v).exp())
    }

    /// Density of the distance to the nearest tier-`t` BS of link type `link`
    /// (defective: integrates to the probability such a BS exists).
    pub fn serving_distance_pdf(&self, t: Tier, link: LinkType, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::invalid("radius", "negative radius"));
        }
        let lam = self.tier_density(t);
        let p_link = self.link_probability(link, r);
        Ok(2.0 * PI * lam * r * p_link * self.void_probability(t, link, r)?)
    }
}

// ---------------------------------------------------------------------------
// Antenna gains
// ---------------------------------------------------------------------------

/// Discrete PMF of the product of transmit and receive antenna gains on an
/// interfering link.
#[derive(Debug, Clone)]
pub struct GainPmf {
    /// (gain, probability) atoms; probabilities sum to one.
    pub atoms: Vec<(f64, f64)>,
}

impl GainPmf {
    pub fn expectation(&self) -> f64 {
        self.atoms.iter().map(|&(g, p)| g * p).sum()
    }

    /// E[ 1 / (1 + r / (scale * gain)) ] over the gain atoms; the workhorse
    /// kernel of every interference Laplace transform.
    #[inline]
    pub fn lorentzian_mean(&self, r: f64, scale: f64) -> f64 {
        if scale <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for &(g, p) in &self.atoms {
            acc += p / (1.0 + r / (scale * g));
        }
        acc
    }
}

/// Gain PMF between an interfering transmitter of class `tx` and a receiver
/// of class `rx` under the sectored two-lobe pattern with uniformly random
/// orientations.
pub fn gain_pmf(tx: DeviceClass, rx: DeviceClass, params: &NetworkParams) -> GainPmf {
    let q1 = params.beamwidth(rx) / (2.0 * PI);
    let q2 = params.beamwidth(tx) / (2.0 * PI);
    let (big1, small1) = (params.main_gain(rx), params.side_gain(rx));
    let (big2, small2) = (params.main_gain(tx), params.side_gain(tx));
    let atoms = if tx == rx {
        vec![
            (big1 * big1, q1 * q1),
            (big1 * small1, 2.0 * q1 * (1.0 - q1)),
            (small1 * small1, (1.0 - q1) * (1.0 - q1)),
        ]
    } else {
        vec![
            (big1 * big2, q1 * q2),
            (big1 * small2, q1 * (1.0 - q2)),
            (small1 * big2, (1.0 - q1) * q2),
            (small1 * small2, (1.0 - q1) * (1.0 - q2)),
        ]
    };
    GainPmf { atoms }
}

// ---------------------------------------------------------------------------
// Association
// ---------------------------------------------------------------------------

/// Tier association probabilities of the typical user.
#[derive(Debug, Clone, Copy)]
pub struct Association {
    pub prob_mbs: f64,
    pub prob_sbs: f64,
}

impl Association {
    pub fn prob(&self, t: Tier) -> f64 {
        match t {
            Tier::Mbs => self.prob_mbs,
            Tier::Sbs => self.prob_sbs,
        }
    }
}

/// Probability that the typical user associates with the MBS tier under
/// biased maximum received power, integrated over the path-loss process.
pub fn association_probability(params: &NetworkParams) -> Result<Association> {
    if params.lambda_s == 0.0 {
        return Ok(Association {
            prob_mbs: 1.0,
            prob_sbs: 0.0,
        });
    }
    // Fast path: with equal biased EIRP the propagation processes differ only
    // in density and the integral collapses to a density ratio.
    let wm = params.assoc_weight(Tier::Mbs);
    let ws = params.assoc_weight(Tier::Sbs);
    let ratio = ws / wm;
    let prob_mbs = if (ratio - 1.0).abs() < 1e-12 {
        params.lambda_m / params.lambda_b()
    } else {
        integrate_association(params, ratio)?
    };
    if !(0.0..=1.0 + 1e-9).contains(&prob_mbs) {
        return Err(Error::numeric(
            "netmodel::association_probability",
            format!("result {prob_mbs} outside [0, 1]"),
        ));
    }
    let prob_mbs = prob_mbs.clamp(0.0, 1.0);
    Ok(Association {
        prob_mbs,
        prob_sbs: 1.0 - prob_mbs,
    })
}

fn integrate_association(params: &NetworkParams, ratio: f64) -> Result<f64> {
    // A_m = ∫ V_s(ratio·τ) v_m(τ) dτ with v_m(τ) = Λ_m'(τ) exp(-Λ_m(τ)).
    let integrand = |tau: f64| -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let vs = params.min_loss_ccdf(Tier::Sbs, ratio * tau).unwrap_or(0.0);
        let dens = params.path_loss_intensity_density(Tier::Mbs, tau).unwrap_or(0.0);
        let surv = params.min_loss_ccdf(Tier::Mbs, tau).unwrap_or(0.0);
        vs * dens * surv
    };
    // Split the improper integral at the intensity knots where the density
    // jumps, then map the tail through τ = knot + scale·u/(1-u).
    let knot_l = params.d_los.powf(params.alpha_los);
    let knot_n = params.d_los.powf(params.alpha_nlos);
    // Characteristic loss where roughly one BS is closer.
    let lam = params.lambda_b();
    let tau_star = (1.0 / (PI * lam)).powf(params.alpha_nlos / 2.0);
    let mut total = 0.0;
    total += quad::adaptive(&integrand, 0.0, knot_l.min(tau_star), 1e-9, 1e-7)?;
    if tau_star > knot_l {
        total += quad::adaptive(&integrand, knot_l, tau_star, 1e-9, 1e-7)?;
    }
    let lower = knot_l.max(tau_star);
    if knot_n > lower {
        total += quad::adaptive(&integrand, lower, knot_n, 1e-9, 1e-7)?;
    }
    let tail_start = knot_n.max(lower);
    total += quad::adaptive_upper(&integrand, tail_start, tail_start.max(tau_star), 1e-9, 1e-7)?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn defaults() -> NetworkParams {
        NetworkParams::defaults()
    }

    #[test]
    fn reference_path_loss_values() {
        // 28 GHz: about -61.4 dB.
        let c0 = reference_path_loss(28e9).unwrap();
        assert_relative_eq!(c0, 7.2724e-7, max_relative = 1e-3);
        // Identity carrier.
        let c0 = reference_path_loss(3.0e8 / (4.0 * PI)).unwrap();
        assert_relative_eq!(c0, 1.0, max_relative = 1e-12);
        // 73 GHz.
        let c0 = reference_path_loss(73e9).unwrap();
        let expected = (3.0e8 / (4.0 * PI * 73e9)).powi(2);
        assert_relative_eq!(c0, expected, max_relative = 1e-12);
        assert!(reference_path_loss(0.0).is_err());
    }

    #[test]
    fn noise_power_values() {
        let n = noise_power_w(200e6, 5.0).unwrap();
        assert_relative_eq!(watts_to_dbm(n), -85.9897, max_relative = 1e-5);
        let n = noise_power_w(1.0, 5.0).unwrap();
        assert_relative_eq!(watts_to_dbm(n), -169.0, max_relative = 1e-9);
        let n = noise_power_w(2e9, 5.0).unwrap();
        assert_relative_eq!(watts_to_dbm(n), -75.9897, max_relative = 1e-5);
        assert!(noise_power_w(-1.0, 5.0).is_err());
    }

    #[test]
    fn los_ball_boundary_is_inclusive() {
        let p = defaults();
        assert_relative_eq!(p.los_probability(100.0).unwrap(), 0.3);
        assert_relative_eq!(p.los_probability(200.0).unwrap(), 0.3);
        assert_relative_eq!(p.los_probability(201.0).unwrap(), 0.0);
        assert!(p.los_probability(-1.0).is_err());
    }

    #[test]
    fn gain_pmf_atoms() {
        let p = defaults();
        // Distinct classes: MBS interferer to UE receiver.
        let pmf = gain_pmf(DeviceClass::Mbs, DeviceClass::Ue, &p);
        assert_eq!(pmf.atoms.len(), 4);
        let total: f64 = pmf.atoms.iter().map(|a| a.1).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        // Main-main atom: (10/360)(60/360) at 24+6 = 30 dB.
        let (g, prob) = pmf.atoms[1 - 1];
        assert_relative_eq!(prob, (10.0 / 360.0) * (60.0 / 360.0), max_relative = 1e-12);
        assert_relative_eq!(g, db_to_linear(30.0), max_relative = 1e-12);
        // Identical classes: three atoms with the mixed one doubled.
        let pmf = gain_pmf(DeviceClass::Mbs, DeviceClass::Mbs, &p);
        assert_eq!(pmf.atoms.len(), 3);
        let total: f64 = pmf.atoms.iter().map(|a| a.1).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            pmf.atoms[1].1,
            2.0 * (10.0 / 360.0) * (350.0 / 360.0),
            max_relative = 1e-12
        );
        assert!(pmf.expectation() > 0.0 && pmf.expectation().is_finite());
    }

    #[test]
    fn intensity_continuity_and_limits() {
        let p = defaults();
        let knot_l = p.d_los.powf(p.alpha_los);
        let knot_n = p.d_los.powf(p.alpha_nlos);
        for t in Tier::BOTH {
            for knot in [knot_l, knot_n] {
                let below = p.path_loss_intensity(t, knot * (1.0 - 1e-9)).unwrap();
                let above = p.path_loss_intensity(t, knot * (1.0 + 1e-9)).unwrap();
                assert_relative_eq!(below, above, max_relative = 1e-7);
            }
            // τ -> 0 limit.
            assert!(p.path_loss_intensity(t, 1e-30).unwrap() < 1e-10);
            assert!(p.path_loss_intensity(t, 0.0).is_err());
        }
        // Blockage-free limit collapses to the pure NLOS form.
        let mut cfg = NetworkParamsConfig::default();
        cfg.p_los = 0.0;
        let p0 = NetworkParams::from_config(&cfg).unwrap();
        for tau in [1e2f64, 1e5, 1e9] {
            let expected = PI * p0.lambda_m * tau.powf(2.0 / p0.alpha_nlos);
            assert_relative_eq!(
                p0.path_loss_intensity(Tier::Mbs, tau).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn intensity_density_matches_finite_differences() {
        let p = defaults();
        for tau in [1e3, 5e4, 1e6, 1e9] {
            let h = tau * 1e-6;
            let fd = (p.path_loss_intensity(Tier::Sbs, tau + h).unwrap()
                - p.path_loss_intensity(Tier::Sbs, tau - h).unwrap())
                / (2.0 * h);
            let analytic = p.path_loss_intensity_density(Tier::Sbs, tau).unwrap();
            assert_relative_eq!(fd, analytic, max_relative = 1e-5);
        }
    }

    #[test]
    fn association_equal_weights_is_density_ratio() {
        let p = defaults();
        let a = association_probability(&p).unwrap();
        assert_relative_eq!(a.prob_mbs, 0.2, epsilon = 1e-9);
        assert_relative_eq!(a.prob_mbs + a.prob_sbs, 1.0, epsilon = 1e-12);

        // Quadrature route must agree with the closed form when weights are
        // *numerically* equal but taken through the integral path.
        let am = integrate_association(&p, 1.0 + 1e-13).unwrap();
        assert_relative_eq!(am, 0.2, epsilon = 1e-6);

        let mut cfg = NetworkParamsConfig::default();
        cfg.lambda_s_per_km2 = 0.0;
        let p = NetworkParams::from_config(&cfg).unwrap();
        assert_relative_eq!(association_probability(&p).unwrap().prob_mbs, 1.0);
    }

    #[test]
    fn association_bias_shifts_toward_sbs() {
        let mut cfg = NetworkParamsConfig::default();
        cfg.bias_s_db = 10.0;
        let p = NetworkParams::from_config(&cfg).unwrap();
        let a = association_probability(&p).unwrap();
        assert!(a.prob_mbs < 0.2, "prob_mbs = {}", a.prob_mbs);
        // Scale invariance: multiplying every P·G·B by a common factor leaves
        // the association untouched.
        let mut cfg2 = cfg.clone();
        cfg2.p_m_dbm += 7.0;
        cfg2.p_s_dbm += 7.0;
        let p2 = NetworkParams::from_config(&cfg2).unwrap();
        let a2 = association_probability(&p2).unwrap();
        assert_relative_eq!(a.prob_mbs, a2.prob_mbs, epsilon = 1e-9);
    }

    #[test]
    fn association_monotone_in_mbs_density() {
        let mut last = 0.0;
        for lm in [5.0, 10.0, 20.0, 40.0] {
            let mut cfg = NetworkParamsConfig::default();
            cfg.lambda_m_per_km2 = lm;
            cfg.bias_s_db = 3.0; // force the quadrature path
            let p = NetworkParams::from_config(&cfg).unwrap();
            let a = association_probability(&p).unwrap();
            assert!(a.prob_mbs > last);
            last = a.prob_mbs;
        }
    }

    #[test]
    fn serving_distance_identities() {
        let p = defaults();
        // LOS pdf vanishes beyond the ball.
        assert_eq!(
            p.serving_distance_pdf(Tier::Mbs, LinkType::Los, p.d_los + 1.0).unwrap(),
            0.0
        );
        // ∫ f_{t,l} = 1 - exp(-π λ p d²)
        let mass = quad::adaptive(
            |r| p.serving_distance_pdf(Tier::Sbs, LinkType::Los, r).unwrap(),
            0.0,
            p.d_los,
            1e-12,
            1e-10,
        )
        .unwrap();
        let expected = 1.0 - (-PI * p.lambda_s * p.p_los * p.d_los * p.d_los).exp();
        assert_relative_eq!(mass, expected, max_relative = 1e-9);
        // F_{t,n}(0) = 1.
        assert_relative_eq!(p.void_probability(Tier::Mbs, LinkType::Nlos, 0.0).unwrap(), 1.0);
        // The four defective pdfs of the nearest candidate BS, each multiplied
        // by the void factors of the other three, integrate to one in total.
        let mut total = 0.0;
        for t in Tier::BOTH {
            for mu in LinkType::BOTH {
                total += quad::adaptive_upper(
                    |r| {
                        let mut v = p.serving_distance_pdf(t, mu, r).unwrap();
                        for t2 in Tier::BOTH {
                            for mu2 in LinkType::BOTH {
                                if t2 != t || mu2 != mu {
                                    // equal weights: exclusion radius maps through exponents
                                    let x = r.powf(p.alpha(mu)).powf(1.0 / p.alpha(mu2));
                                    v *= p.void_probability(t2, mu2, x).unwrap();
                                }
                            }
                        }
                        v
                    },
                    0.0,
                    200.0,
                    1e-11,
                    1e-8,
                )
                .unwrap();
            }
        }
        assert_relative_eq!(total, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let mut cfg = NetworkParamsConfig::default();
        cfg.alpha_los = 2.0;
        assert!(NetworkParams::from_config(&cfg).is_err());
        let mut cfg = NetworkParamsConfig::default();
        cfg.eta = 1.5;
        assert!(NetworkParams::from_config(&cfg).is_err());
        let mut cfg = NetworkParamsConfig::default();
        cfg.frame_slots = 0;
        assert!(NetworkParams::from_config(&cfg).is_err());
        let mut cfg = NetworkParamsConfig::default();
        cfg.main_gain_u_db = -20.0;
        assert!(NetworkParams::from_config(&cfg).is_err());
    }
}
