//! Closed-form load distributions for typical and tagged base stations and
//! the joint UL/DL load PMF, plus the truncation policy used to turn every
//! infinite load sum into a finite one.
//!
//! All gamma-function ratios are evaluated in log space: Γ(n + 3.5) overflows
//! an f64 near n = 165, well inside the support these sums visit at high
//! densities.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// The cell-size exponent of the Poisson-Voronoi area approximation.
const SHAPE: f64 = 3.5;

/// Selects which of the two printed joint PMFs is evaluated: the typical BS
/// (shape 3.5) or the BS serving the user at origin, counting the remaining
/// users (shape 4.5).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Typical,
    Tagged,
}

impl JointKind {
    fn shape_offset(self) -> f64 {
        match self {
            JointKind::Typical => SHAPE,
            JointKind::Tagged => SHAPE + 1.0,
        }
    }
}

/// PMF of the number of devices connected to a typical BS with mean load
/// `eps`.
pub fn typical_pmf(eps: f64, n: u64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::invalid("eps", "mean load must be positive"));
    }
    let nf = n as f64;
    let ln = SHAPE * SHAPE.ln() + ln_gamma(nf + SHAPE) + nf * eps.ln()
        - (nf + SHAPE) * (SHAPE + eps).ln()
        - ln_gamma(nf + 1.0)
        - ln_gamma(SHAPE);
    Ok(ln.exp())
}

/// PMF of the number of devices connected to a tagged BS (the one serving a
/// reference device), supported on n >= 1.
pub fn tagged_pmf(eps: f64, n: u64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::invalid("eps", "mean load must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "a tagged BS serves at least one device"));
    }
    let nf = n as f64;
    let ln = SHAPE * SHAPE.ln() + ln_gamma(nf + SHAPE) + (nf - 1.0) * eps.ln()
        - (nf + SHAPE) * (SHAPE + eps).ln()
        - ln_gamma(nf)
        - ln_gamma(SHAPE);
    Ok(ln.exp())
}

/// Joint PMF of (UL count, DL count) at a BS with total mean load `eps` and
/// DL user fraction `eta`.
pub fn joint_pmf(eps: f64, eta: f64, n_ul: u64, n_dl: u64, kind: JointKind) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::invalid("eps", "mean load must be positive"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", "DL fraction outside [0, 1]"));
    }
    // Degenerate thinning: zero probability mass on the impossible direction.
    if (eta == 0.0 && n_dl > 0) || (eta == 1.0 && n_ul > 0) {
        return Ok(0.0);
    }
    let k = kind.shape_offset();
    let (n1, n2) = (n_ul as f64, n_dl as f64);
    let mut ln = SHAPE * SHAPE.ln() - ln_gamma(SHAPE) + ln_gamma(n1 + n2 + k)
        - ln_gamma(n1 + 1.0)
        - ln_gamma(n2 + 1.0)
        - k * eps.ln()
        - (n1 + n2 + k) * (1.0 + SHAPE / eps).ln();
    if n_dl > 0 {
        ln += n2 * eta.ln();
    }
    if n_ul > 0 {
        ln += n1 * (1.0 - eta).ln();
    }
    Ok(ln.exp())
}

/// Probability that a typical BS with mean load `eps` is empty.
pub fn empty_probability(eps: f64) -> f64 {
    if eps <= 0.0 {
        return 1.0;
    }
    (1.0 + eps / SHAPE).powf(-SHAPE)
}

/// Number of terms kept when truncating load sums: six times the mean with a
/// floor of twenty, which keeps the discarded tail mass below 1e-3.
pub fn truncation_limit(eps: f64) -> u64 {
    ((6.0 * eps).ceil() as u64).max(20)
}

/// Smallest truncation point whose discarded typical-PMF tail mass is below
/// `tail_tol`, starting from [`truncation_limit`].
pub fn truncation_limit_for(eps: f64, tail_tol: f64) -> Result<u64> {
    let mut n_max = truncation_limit(eps);
    loop {
        let mass: f64 = (0..=n_max).map(|n| typical_pmf(eps, n).unwrap_or(0.0)).sum();
        if 1.0 - mass <= tail_tol {
            return Ok(n_max);
        }
        if n_max > 100_000 {
            return Err(Error::numeric(
                "loadmodel::truncation_limit_for",
                format!("tail mass {:.3e} above {tail_tol:.1e} at n_max = {n_max}", 1.0 - mass),
            ));
        }
        n_max *= 2;
    }
}

/// E[1/N] under the tagged PMF, truncated adaptively.
pub fn mean_inverse_tagged(eps: f64) -> Result<f64> {
    let n_max = truncation_limit_for(eps, 1e-10)?;
    let mut acc = 0.0;
    for n in 1..=n_max {
        acc += tagged_pmf(eps, n)? / n as f64;
    }
    Ok(acc)
}

/// Dense table of the joint UL/DL load PMF, truncated so the discarded mass
/// is below `tail_tol` and renormalized to sum exactly to one.
#[derive(Debug, Clone)]
pub struct JointTable {
    pub eps: f64,
    pub eta: f64,
    pub kind: JointKind,
    /// Inclusive per-direction truncation point.
    pub n_max: u64,
    values: Vec<f64>,
    stride: usize,
}

impl JointTable {
    pub fn build(eps: f64, eta: f64, kind: JointKind, tail_tol: f64) -> Result<JointTable> {
        // The total count follows the same family; bounding its tail bounds
        // the joint tail, so per-direction truncation at the same point is
        // conservative.
        let total_eps = match kind {
            JointKind::Typical => eps,
            // Tagged-minus-origin total count is stochastically larger;
            // generous padding keeps its tail inside tolerance too.
            JointKind::Tagged => eps + 2.0,
        };
        let n_max = truncation_limit_for(total_eps, tail_tol * 0.1)?.max(8);
        let stride = (n_max + 1) as usize;
        let mut values = vec![0.0; stride * stride];
        let mut mass = 0.0;
        for n1 in 0..=n_max {
            for n2 in 0..=n_max {
                let v = joint_pmf(eps, eta, n1, n2, kind)?;
                values[n1 as usize * stride + n2 as usize] = v;
                mass += v;
            }
        }
        if !(mass > 0.0) {
            return Err(Error::numeric(
                "loadmodel::JointTable::build",
                format!("degenerate joint table for eps={eps}, eta={eta}"),
            ));
        }
        let inv = 1.0 / mass;
        for v in &mut values {
            *v *= inv;
        }
        Ok(JointTable {
            eps,
            eta,
            kind,
            n_max,
            values,
            stride,
        })
    }

    #[inline]
    pub fn prob(&self, n_ul: u64, n_dl: u64) -> f64 {
        if n_ul > self.n_max || n_dl > self.n_max {
            return 0.0;
        }
        self.values[n_ul as usize * self.stride + n_dl as usize]
    }

    /// Iterate over (n_ul, n_dl, probability) with non-negligible mass.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64, f64)> + '_ {
        let stride = self.stride;
        self.values.iter().enumerate().filter_map(move |(i, &p)| {
            if p > 0.0 {
                Some(((i / stride) as u64, (i % stride) as u64, p))
            } else {
                None
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn typical_pmf_values() {
        // Unit mean, empty cell.
        let v = typical_pmf(1.0, 0).unwrap();
        assert_relative_eq!(v, (1.0 + 1.0 / 3.5f64).powf(-3.5), max_relative = 1e-12);
        assert_relative_eq!(v, 0.414949, max_relative = 1e-5);
        assert_relative_eq!(empty_probability(1.0), v, max_relative = 1e-12);
        // Normalization and mean for several loads.
        for eps in [0.3, 1.0, 5.0, 40.0] {
            let n_max = truncation_limit_for(eps, 1e-12).unwrap();
            let mut mass = 0.0;
            let mut mean = 0.0;
            for n in 0..=n_max {
                let p = typical_pmf(eps, n).unwrap();
                mass += p;
                mean += n as f64 * p;
            }
            assert_relative_eq!(mass, 1.0, epsilon = 1e-9);
            assert_relative_eq!(mean, eps, max_relative = 1e-6);
        }
    }

    #[test]
    fn tagged_pmf_values() {
        let v = tagged_pmf(1.0, 1).unwrap();
        assert_relative_eq!(v, (3.5f64 / 4.5).powf(4.5), max_relative = 1e-12);
        assert_relative_eq!(v, 0.32276, max_relative = 1e-4);
        assert!(tagged_pmf(1.0, 0).is_err());
        // Normalization and the size-biasing relation κ*(n) = n κ(n) / ε.
        for eps in [0.5, 2.0, 10.0] {
            let n_max = truncation_limit_for(eps, 1e-12).unwrap() + 10;
            let mut mass = 0.0;
            for n in 1..=n_max {
                let t = tagged_pmf(eps, n).unwrap();
                mass += t;
                let k = typical_pmf(eps, n).unwrap();
                assert_relative_eq!(t, n as f64 * k / eps, max_relative = 1e-10);
            }
            assert_relative_eq!(mass, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn joint_pmf_identities() {
        // Collapse at the origin cell.
        let v = joint_pmf(2.0, 0.3, 0, 0, JointKind::Typical).unwrap();
        assert_relative_eq!(v, typical_pmf(2.0, 0).unwrap(), max_relative = 1e-12);
        // Binomial-thinning: the diagonal sums reproduce the total-count PMF.
        for n in 0..=20u64 {
            let mut diag = 0.0;
            for n1 in 0..=n {
                diag += joint_pmf(2.0, 0.3, n1, n - n1, JointKind::Typical).unwrap();
            }
            assert_relative_eq!(diag, typical_pmf(2.0, n).unwrap(), epsilon = 1e-10);
        }
        // All mass on the DL axis when every user is DL.
        assert_eq!(joint_pmf(2.0, 1.0, 3, 2, JointKind::Typical).unwrap(), 0.0);
        assert!(joint_pmf(2.0, 1.0, 0, 2, JointKind::Typical).unwrap() > 0.0);
        // Tagged marginal: summing the 4.5-shape joint over the DL count gives
        // the tagged UL PMF shifted by the origin user.
        let (eps, eta) = (3.0, 0.4);
        let eps_ul = (1.0 - eta) * eps;
        for n1 in 0..15u64 {
            let mut marg = 0.0;
            for n2 in 0..200u64 {
                marg += joint_pmf(eps, eta, n1, n2, JointKind::Tagged).unwrap();
            }
            assert_relative_eq!(marg, tagged_pmf(eps_ul, n1 + 1).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn truncation_policy() {
        assert_eq!(truncation_limit(5.0), 30);
        assert_eq!(truncation_limit(1.0), 20);
        assert_eq!(truncation_limit(10.0), 60);
        // The 6x rule leaves under a 1e-3 tail at eps = 10.
        let mass: f64 = (0..=60).map(|n| typical_pmf(10.0, n).unwrap()).sum();
        assert!(1.0 - mass < 1e-3, "tail = {}", 1.0 - mass);
    }

    #[test]
    fn joint_table_normalized() {
        let t = JointTable::build(5.0, 0.5, JointKind::Typical, 1e-9).unwrap();
        let total: f64 = t.iter().map(|(_, _, p)| p).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        let mean: f64 = t.iter().map(|(n1, n2, p)| (n1 + n2) as f64 * p).sum();
        assert_relative_eq!(mean, 5.0, max_relative = 1e-6);
    }
}
