//! Rate and radar-SINR evaluation, plus binary assignment extraction.
//!
//! The decision variable is a `(K + 1) x N` [`PowerMatrix`]: rows `0..K` hold
//! the per-user communication powers `w[k][n]`, row `K` the radar powers.
//! A column with a single non-zero communication entry is a binary
//! subcarrier assignment; columns shared by several users are charged an
//! `eta`-weighted interference penalty by the relaxed rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{ChannelSet, ScenarioConfig};

/// Which channel gain scales the sharing penalty seen by user `k` from
/// power `w[i][n]` assigned to another user `i` on the same subcarrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceGain {
    /// `alpha[n][k]`: the interfering power reaches user `k` over its own channel.
    #[default]
    Receiver,
    /// `alpha[n][i]`: the gain of the user the power was meant for.
    Transmitter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerMatrix {
    n_users: usize,
    n_subcarriers: usize,
    data: Vec<f64>,
}

impl PowerMatrix {
    pub fn zeros(n_users: usize, n_subcarriers: usize) -> Self {
        Self {
            n_users,
            n_subcarriers,
            data: vec![0.0; (n_users + 1) * n_subcarriers],
        }
    }

    /// Builds from row-major data of length `(n_users + 1) * n_subcarriers`.
    pub fn from_rows(n_users: usize, n_subcarriers: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != (n_users + 1) * n_subcarriers {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", (n_users + 1) * n_subcarriers),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self {
            n_users,
            n_subcarriers,
            data,
        })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn comm(&self, k: usize, n: usize) -> f64 {
        self.data[k * self.n_subcarriers + n]
    }

    pub fn set_comm(&mut self, k: usize, n: usize, value: f64) {
        self.data[k * self.n_subcarriers + n] = value;
    }

    pub fn radar(&self, n: usize) -> f64 {
        self.data[self.n_users * self.n_subcarriers + n]
    }

    pub fn set_radar(&mut self, n: usize, value: f64) {
        self.data[self.n_users * self.n_subcarriers + n] = value;
    }

    pub fn comm_rows(&self) -> &[f64] {
        &self.data[..self.n_users * self.n_subcarriers]
    }

    pub fn radar_row(&self) -> &[f64] {
        &self.data[self.n_users * self.n_subcarriers..]
    }

    /// Total communication power on subcarrier `n`.
    pub fn column_comm(&self, n: usize) -> f64 {
        (0..self.n_users).map(|k| self.comm(k, n)).sum()
    }

    pub fn total_comm(&self) -> f64 {
        self.comm_rows().iter().sum()
    }

    pub fn total_radar(&self) -> f64 {
        self.radar_row().iter().sum()
    }

    /// True when no subcarrier carries communication power for two users.
    pub fn is_single_owner(&self) -> bool {
        (0..self.n_subcarriers).all(|n| (0..self.n_users).filter(|&k| self.comm(k, n) > 0.0).count() <= 1)
    }

    fn check_shape(&self, n_users: usize, n_subcarriers: usize) -> Result<()> {
        if self.n_users != n_users || self.n_subcarriers != n_subcarriers {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} power matrix", n_users + 1, n_subcarriers),
                got: format!("{}x{}", self.n_users + 1, self.n_subcarriers),
            });
        }
        Ok(())
    }
}

/// Noise-normalized gains.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    n_subcarriers: usize,
    n_users: usize,
    /// `h2 / sigma_c^2`, indexed `[n * K + k]`.
    pub alpha: Vec<f64>,
    /// `s2 / sigma_c^2`, indexed `[n * K + k]`.
    pub beta: Vec<f64>,
    /// `g2 / sigma_r^2`.
    pub xi: Vec<f64>,
    /// `u2 / sigma_r^2`.
    pub gamma: Vec<f64>,
}

impl Coefficients {
    pub fn new(channels: &ChannelSet, config: &ScenarioConfig) -> Result<Self> {
        channels.check_matches(config)?;
        let comm_noise = config.comm_noise_w();
        let radar_noise = config.radar_noise_w();
        Ok(Self {
            n_subcarriers: channels.n_subcarriers(),
            n_users: channels.n_users(),
            alpha: channels.h2.iter().map(|v| v / comm_noise).collect(),
            beta: channels.s2.iter().map(|v| v / comm_noise).collect(),
            xi: channels.g2.iter().map(|v| v / radar_noise).collect(),
            gamma: channels.u2.iter().map(|v| v / radar_noise).collect(),
        })
    }

    /// Direct construction from normalized gains, mostly for small hand-built cases.
    pub fn from_parts(
        n_subcarriers: usize,
        n_users: usize,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        xi: Vec<f64>,
        gamma: Vec<f64>,
    ) -> Result<Self> {
        let channels = ChannelSet::new(n_subcarriers, n_users, alpha, beta, xi, gamma)?;
        Ok(Self {
            n_subcarriers,
            n_users,
            alpha: channels.h2,
            beta: channels.s2,
            xi: channels.g2,
            gamma: channels.u2,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn alpha(&self, n: usize, k: usize) -> f64 {
        self.alpha[n * self.n_users + k]
    }

    pub fn beta(&self, n: usize, k: usize) -> f64 {
        self.beta[n * self.n_users + k]
    }
}

/// Coefficients together with the penalty settings: everything needed to
/// evaluate the relaxed objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub coeffs: Coefficients,
    pub eta: f64,
    pub gain: InterferenceGain,
}

impl SystemModel {
    pub fn new(channels: &ChannelSet, config: &ScenarioConfig) -> Result<Self> {
        Ok(Self {
            coeffs: Coefficients::new(channels, config)?,
            eta: config.eta,
            gain: config.interference_gain,
        })
    }

    pub fn from_coefficients(coeffs: Coefficients, eta: f64, gain: InterferenceGain) -> Self {
        Self { coeffs, eta, gain }
    }

    pub fn n_users(&self) -> usize {
        self.coeffs.n_users
    }

    pub fn n_subcarriers(&self) -> usize {
        self.coeffs.n_subcarriers
    }

    pub fn check(&self, p: &PowerMatrix) -> Result<()> {
        p.check_shape(self.n_users(), self.n_subcarriers())
    }

    /// Sharing penalty `eta * sum_{i != k} c * w[i][n]` seen by user `k` on
    /// subcarrier `n`. `column_comm` is the column total, `weighted_comm`
    /// the alpha-weighted column total (only used by the transmitter form).
    pub(crate) fn penalty(&self, p: &PowerMatrix, n: usize, k: usize, column_comm: f64, weighted_comm: f64) -> f64 {
        let w = p.comm(k, n);
        let alpha = self.coeffs.alpha(n, k);
        let others = match self.gain {
            InterferenceGain::Receiver => alpha * (column_comm - w),
            InterferenceGain::Transmitter => weighted_comm - alpha * w,
        };
        self.eta * others.max(0.0)
    }

    /// `weighted_comm` for [`Self::penalty`]; zero in the receiver form.
    pub(crate) fn weighted_column(&self, p: &PowerMatrix, n: usize) -> f64 {
        match self.gain {
            InterferenceGain::Receiver => 0.0,
            InterferenceGain::Transmitter => (0..self.n_users()).map(|i| self.coeffs.alpha(n, i) * p.comm(i, n)).sum(),
        }
    }

    /// Interference-plus-noise term `beta * P_r + penalty + 1`.
    pub(crate) fn denominator(&self, p: &PowerMatrix, n: usize, k: usize, column_comm: f64, weighted_comm: f64) -> f64 {
        self.coeffs.beta(n, k) * p.radar(n) + self.penalty(p, n, k, column_comm, weighted_comm) + 1.0
    }

    /// Penalty-relaxed rate of user `k` in bits per channel use.
    pub fn relaxed_rate(&self, p: &PowerMatrix, k: usize) -> Result<f64> {
        self.check(p)?;
        if k >= self.n_users() {
            return Err(Error::InvalidArgument(format!("user {k} out of range")));
        }
        Ok((0..self.n_subcarriers())
            .map(|n| {
                let col = p.column_comm(n);
                let wcol = self.weighted_column(p, n);
                let sinr = self.coeffs.alpha(n, k) * p.comm(k, n) / self.denominator(p, n, k, col, wcol);
                sinr.ln_1p()
            })
            .sum::<f64>()
            / std::f64::consts::LN_2)
    }

    pub fn sum_relaxed_rate(&self, p: &PowerMatrix) -> Result<f64> {
        self.check(p)?;
        let mut total = 0.0;
        for n in 0..self.n_subcarriers() {
            let col = p.column_comm(n);
            let wcol = self.weighted_column(p, n);
            for k in 0..self.n_users() {
                let w = p.comm(k, n);
                if w > 0.0 {
                    total += (self.coeffs.alpha(n, k) * w / self.denominator(p, n, k, col, wcol)).ln_1p();
                }
            }
        }
        Ok(total / std::f64::consts::LN_2)
    }

    /// Radar SINR (linear) with noise normalized to one per subcarrier.
    pub fn radar_sinr(&self, p: &PowerMatrix) -> f64 {
        radar_sinr(p, &self.coeffs)
    }
}

pub fn radar_sinr(p: &PowerMatrix, coeffs: &Coefficients) -> f64 {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for n in 0..coeffs.n_subcarriers {
        signal += coeffs.xi[n] * p.radar(n);
        interference += coeffs.gamma[n] * p.column_comm(n) + 1.0;
    }
    signal / interference
}

/// A binary subcarrier assignment with its powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub owner: Vec<Option<usize>>,
    pub comm_power: Vec<f64>,
    pub radar_power: Vec<f64>,
    /// Second-largest over largest communication power in the source column
    /// (0 for clean columns); diagnostic only.
    pub dominance: Vec<f64>,
}

impl Assignment {
    pub fn new(owner: Vec<Option<usize>>, comm_power: Vec<f64>, radar_power: Vec<f64>) -> Result<Self> {
        let n = owner.len();
        if comm_power.len() != n || radar_power.len() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} subcarriers"),
                got: format!("{} comm / {} radar", comm_power.len(), radar_power.len()),
            });
        }
        if let Some(i) = (0..n).find(|&i| owner[i].is_none() && comm_power[i] != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "subcarrier {i} has no owner but carries communication power"
            )));
        }
        Ok(Self {
            dominance: vec![0.0; n],
            owner,
            comm_power,
            radar_power,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.owner.len()
    }

    pub fn to_power_matrix(&self, n_users: usize) -> Result<PowerMatrix> {
        let n = self.n_subcarriers();
        let mut p = PowerMatrix::zeros(n_users, n);
        for i in 0..n {
            if let Some(k) = self.owner[i] {
                if k >= n_users {
                    return Err(Error::InvalidArgument(format!("owner {k} out of range")));
                }
                p.set_comm(k, i, self.comm_power[i]);
            }
            p.set_radar(i, self.radar_power[i]);
        }
        Ok(p)
    }
}

/// Sum rate of a binary assignment, evaluated from raw channel gains.
pub fn binary_rate(a: &Assignment, channels: &ChannelSet, config: &ScenarioConfig) -> Result<f64> {
    channels.check_matches(config)?;
    if a.n_subcarriers() != channels.n_subcarriers() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} subcarriers", channels.n_subcarriers()),
            got: format!("{}", a.n_subcarriers()),
        });
    }
    let noise = config.comm_noise_w();
    let mut total = 0.0;
    for n in 0..a.n_subcarriers() {
        if let Some(k) = a.owner[n] {
            let sinr = channels.h2(n, k) * a.comm_power[n] / (channels.s2(n, k) * a.radar_power[n] + noise);
            total += (1.0 + sinr).log2();
        }
    }
    Ok(total)
}

/// Rounds a relaxed power matrix to a binary assignment: the largest
/// communication entry of each column owns the subcarrier (lowest user index
/// on ties) and receives the column's total power, clipped to `comm_cap`.
pub fn extract_assignment(p: &PowerMatrix, comm_cap: f64) -> Assignment {
    let n_sub = p.n_subcarriers();
    let mut owner = Vec::with_capacity(n_sub);
    let mut comm_power = Vec::with_capacity(n_sub);
    let mut dominance = Vec::with_capacity(n_sub);
    for n in 0..n_sub {
        let mut best: Option<(usize, f64)> = None;
        let mut second = 0.0f64;
        for k in 0..p.n_users() {
            let w = p.comm(k, n);
            match best {
                Some((_, b)) if w <= b => second = second.max(w),
                _ => {
                    if let Some((_, b)) = best {
                        second = second.max(b);
                    }
                    best = Some((k, w));
                }
            }
        }
        match best {
            Some((k, w)) if w > 0.0 => {
                owner.push(Some(k));
                comm_power.push(p.column_comm(n).min(comm_cap));
                dominance.push(second / w);
            }
            _ => {
                owner.push(None);
                comm_power.push(0.0);
                dominance.push(0.0);
            }
        }
    }
    Assignment {
        owner,
        comm_power,
        radar_power: p.radar_row().to_vec(),
        dominance,
    }
}

/// Both sides of the two-user no-sharing inequality: the rate of giving all
/// power `total` to the stronger user versus splitting off `delta` to the
/// weaker one under the sharing penalty. Returns `(lhs, rhs)`; the split
/// never pays when `lhs >= rhs`.
pub fn no_sharing_inequality(zeta1: f64, zeta2: f64, total: f64, delta: f64, eta: f64) -> Result<(f64, f64)> {
    if !(zeta1 > 0.0 && zeta1 <= zeta2 && zeta2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < zeta1 <= zeta2, got {zeta1}, {zeta2}"
        )));
    }
    if !(0.0..=total).contains(&delta) || !total.is_finite() {
        return Err(Error::InvalidArgument(format!("need 0 <= delta <= W, got {delta}, {total}")));
    }
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be non-negative, got {eta}")));
    }
    let lhs = (total / zeta1).ln_1p();
    let rhs = ((total - delta) / (zeta1 + eta * delta)).ln_1p() + (delta / (zeta2 + eta * (total - delta))).ln_1p();
    Ok((lhs / std::f64::consts::LN_2, rhs / std::f64::consts::LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, k: usize, alpha: Vec<f64>, beta: Vec<f64>, eta: f64) -> SystemModel {
        let coeffs = Coefficients::from_parts(n, k, alpha, beta, vec![1.0; n], vec![1.0; n]).unwrap();
        SystemModel::from_coefficients(coeffs, eta, InterferenceGain::Receiver)
    }

    #[test]
    fn zero_comm_power_gives_zero_rate() {
        let m = model(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], vec![0.5; 6], 0.5);
        let mut p = PowerMatrix::zeros(2, 3);
        p.set_radar(1, 0.7);
        for k in 0..2 {
            assert_eq!(m.relaxed_rate(&p, k).unwrap(), 0.0);
        }
        assert_eq!(m.sum_relaxed_rate(&p).unwrap(), 0.0);
    }

    #[test]
    fn single_ratio_substitution() {
        let m = model(1, 1, vec![1.0], vec![0.0], 0.5);
        let p = PowerMatrix::from_rows(1, 1, vec![3.0, 5.0]).unwrap();
        assert!((m.relaxed_rate(&p, 0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn shared_column_hand_substitution() {
        // 2 * log2(1 + 2 / (0.5 * 2 + 1)) = 2
        let m = model(1, 2, vec![1.0, 1.0], vec![0.0, 0.0], 0.5);
        let p = PowerMatrix::from_rows(2, 1, vec![2.0, 2.0, 0.0]).unwrap();
        assert!((m.sum_relaxed_rate(&p).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn transmitter_gain_uses_interferer_alpha() {
        // user 0 sees eta * alpha[1] * w1 = 0.5 * 3 * 1 = 1.5 in the transmitter form
        let coeffs = Coefficients::from_parts(1, 2, vec![1.0, 3.0], vec![0.0, 0.0], vec![1.0], vec![1.0]).unwrap();
        let tx = SystemModel::from_coefficients(coeffs.clone(), 0.5, InterferenceGain::Transmitter);
        let rx = SystemModel::from_coefficients(coeffs, 0.5, InterferenceGain::Receiver);
        let p = PowerMatrix::from_rows(2, 1, vec![2.0, 1.0, 0.0]).unwrap();
        let expected_tx = (1.0 + 2.0 / 2.5f64).log2();
        let expected_rx = (1.0 + 2.0 / 1.5f64).log2();
        assert!((tx.relaxed_rate(&p, 0).unwrap() - expected_tx).abs() < 1e-15);
        assert!((rx.relaxed_rate(&p, 0).unwrap() - expected_rx).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = model(2, 1, vec![1.0, 1.0], vec![0.0, 0.0], 0.5);
        let p = PowerMatrix::zeros(2, 2);
        assert!(matches!(m.sum_relaxed_rate(&p), Err(Error::DimensionMismatch { .. })));
        assert!(PowerMatrix::from_rows(1, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn radar_sinr_hand_values() {
        let coeffs = Coefficients::from_parts(1, 1, vec![1.0], vec![0.0], vec![1.0], vec![1.0]).unwrap();
        let p = PowerMatrix::from_rows(1, 1, vec![1.0, 1.0]).unwrap();
        assert_eq!(radar_sinr(&p, &coeffs), 0.5);

        let coeffs = Coefficients::from_parts(2, 1, vec![1.0; 2], vec![0.0; 2], vec![1.0, 1.0], vec![3.0, 3.0]).unwrap();
        let p = PowerMatrix::from_rows(1, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(radar_sinr(&p, &coeffs), 1.0);
    }

    #[test]
    fn extraction_rules() {
        // clean column, empty column, shared column (0.6, 0.4) with cap 0.95
        let p = PowerMatrix::from_rows(2, 3, vec![0.0, 0.0, 0.6, 0.9, 0.0, 0.4, 0.1, 0.2, 0.3]).unwrap();
        let a = extract_assignment(&p, 0.95);
        assert_eq!(a.owner, vec![Some(1), None, Some(0)]);
        assert_eq!(a.comm_power, vec![0.9, 0.0, 0.95]);
        assert_eq!(a.radar_power, vec![0.1, 0.2, 0.3]);
        assert!((a.dominance[2] - 0.4 / 0.6).abs() < 1e-15);
        assert_eq!(a.dominance[0], 0.0);

        let a = extract_assignment(&p, 10.0);
        assert!((a.comm_power[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn extraction_ties_go_to_lowest_index() {
        let p = PowerMatrix::from_rows(3, 1, vec![0.5, 0.5, 0.5, 0.0]).unwrap();
        let a = extract_assignment(&p, 10.0);
        assert_eq!(a.owner, vec![Some(0)]);
        assert_eq!(a.dominance, vec![1.0]);
    }

    #[test]
    fn assignment_rejects_unowned_power() {
        assert!(Assignment::new(vec![None], vec![1.0], vec![0.0]).is_err());
        let a = Assignment::new(vec![None, Some(1)], vec![0.0, 2.0], vec![0.5, 0.0]).unwrap();
        let p = a.to_power_matrix(2).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.0, 0.0, 2.0, 0.5, 0.0]);
        assert!(a.to_power_matrix(1).is_err());
    }

    #[test]
    fn binary_rate_of_empty_assignment_is_zero() {
        let config = ScenarioConfig {
            n_subcarriers: 2,
            n_users: 1,
            ..Default::default()
        };
        let ch = ChannelSet::new(2, 1, vec![1.0; 2], vec![1.0; 2], vec![1.0; 2], vec![1.0; 2]).unwrap();
        let a = Assignment::new(vec![None, None], vec![0.0; 2], vec![1.0; 2]).unwrap();
        assert_eq!(binary_rate(&a, &ch, &config).unwrap(), 0.0);
    }

    #[test]
    fn no_sharing_reference_values() {
        let (lhs, rhs) = no_sharing_inequality(1.0, 1.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(lhs, rhs);
        let (lhs, rhs) = no_sharing_inequality(1.0, 1.0, 1.0, 0.5, 0.5).unwrap();
        assert!((lhs - 1.0).abs() < 1e-15);
        assert!((rhs - 2.0 * 1.4f64.log2()).abs() < 1e-15);
        assert!(rhs <= lhs);
    }

    #[test]
    fn no_sharing_domain_errors() {
        assert!(no_sharing_inequality(2.0, 1.0, 1.0, 0.5, 0.5).is_err());
        assert!(no_sharing_inequality(0.0, 1.0, 1.0, 0.5, 0.5).is_err());
        assert!(no_sharing_inequality(1.0, 1.0, 1.0, 1.5, 0.5).is_err());
        assert!(no_sharing_inequality(1.0, 1.0, 1.0, -0.1, 0.5).is_err());
    }
}
