//! Scalar spectral penalties and their one-dimensional proximal maps.
//!
//! A regularizer `r(X) = sum_i rhat(sigma_i)` is described by which scalar
//! penalty `rhat` it applies to each singular value:
//!
//! ```text
//! nuclear     mu * sigma
//! capped-l1   mu * min(sigma, theta)                       theta > 0
//! lsp         mu * log(sigma/theta + 1)                    theta > 0
//! tnn         0 for rank positions i <= theta,              integer theta >= 1
//!             mu * sigma for i > theta
//! scad        mu*sigma                        sigma <= mu   theta > 2
//!             (-s^2 + 2*theta*mu*s - mu^2)
//!               / (2(theta-1))               mu < s <= theta*mu
//!             (theta+1)*mu^2 / 2             s > theta*mu
//! mcp         mu*sigma - sigma^2/(2 theta)   sigma <= theta*mu, theta > 0
//!             theta*mu^2 / 2                 sigma > theta*mu
//! ```
//!
//! Everything the solver needs from a penalty is scalar:
//!
//! * [`penalty`] / [`penalty_sum`] evaluate `mu * rhat`;
//! * [`scalar_prox`] solves `min_{y>=0} 1/2 (y - sigma)^2 + mu * rhat(y)`
//!   exactly;
//! * [`threshold_gamma`] gives the level below which the prox is guaranteed
//!   to return zero, which lets the caller skip work for small singular
//!   values.
//!
//! `scalar_prox` does not use a per-penalty case table. Each objective is
//! piecewise smooth with at most three pieces, so it enumerates every
//! in-range stationary point together with the piece boundaries, evaluates
//! the objective at each candidate, and keeps the global minimizer,
//! breaking ties toward the larger value. [`scalar_prox_oracle`] is a
//! brute-force grid minimizer kept around for tests.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegKind {
    Nuclear,
    CappedL1,
    Lsp,
    Tnn,
    Scad,
    Mcp,
}

impl RegKind {
    pub const ALL: [RegKind; 6] = [
        RegKind::Nuclear,
        RegKind::CappedL1,
        RegKind::Lsp,
        RegKind::Tnn,
        RegKind::Scad,
        RegKind::Mcp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegKind::Nuclear => "nuclear",
            RegKind::CappedL1 => "capped-l1",
            RegKind::Lsp => "lsp",
            RegKind::Tnn => "tnn",
            RegKind::Scad => "scad",
            RegKind::Mcp => "mcp",
        }
    }
}

impl fmt::Display for RegKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nuclear" => Ok(RegKind::Nuclear),
            "capped-l1" => Ok(RegKind::CappedL1),
            "lsp" => Ok(RegKind::Lsp),
            "tnn" => Ok(RegKind::Tnn),
            "scad" => Ok(RegKind::Scad),
            "mcp" => Ok(RegKind::Mcp),
            other => Err(Error::invalid(format!(
                "unknown regularizer {other:?}; expected one of nuclear, capped-l1, lsp, tnn, scad, mcp"
            ))),
        }
    }
}

/// A penalty kind plus its shape parameter.
///
/// `theta` is ignored for `Nuclear`, must be a positive integer for `Tnn`
/// (the number of unpenalized leading singular values), must exceed 2 for
/// `Scad`, and must be positive otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizerSpec {
    pub kind: RegKind,
    pub theta: f64,
}

impl RegularizerSpec {
    pub fn new(kind: RegKind, theta: f64) -> Result<Self> {
        match kind {
            RegKind::Nuclear => {}
            RegKind::Scad => {
                if !(theta > 2.0) {
                    return Err(Error::invalid(format!("scad requires theta > 2, got {theta}")));
                }
            }
            RegKind::Tnn => {
                if !(theta >= 1.0) || theta.fract() != 0.0 {
                    return Err(Error::invalid(format!(
                        "tnn requires integer theta >= 1, got {theta}"
                    )));
                }
            }
            _ => {
                if !(theta > 0.0) {
                    return Err(Error::invalid(format!(
                        "{kind} requires theta > 0, got {theta}"
                    )));
                }
            }
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite".to_string()));
        }
        Ok(RegularizerSpec { kind, theta })
    }

    pub fn nuclear() -> Self {
        RegularizerSpec { kind: RegKind::Nuclear, theta: 0.0 }
    }

    pub fn capped_l1(theta: f64) -> Result<Self> {
        Self::new(RegKind::CappedL1, theta)
    }

    pub fn lsp(theta: f64) -> Result<Self> {
        Self::new(RegKind::Lsp, theta)
    }

    pub fn tnn(theta: usize) -> Result<Self> {
        Self::new(RegKind::Tnn, theta as f64)
    }

    pub fn scad(theta: f64) -> Result<Self> {
        Self::new(RegKind::Scad, theta)
    }

    pub fn mcp(theta: f64) -> Result<Self> {
        Self::new(RegKind::Mcp, theta)
    }

    /// Integer theta for TNN.
    pub fn tnn_count(&self) -> usize {
        debug_assert_eq!(self.kind, RegKind::Tnn);
        self.theta as usize
    }
}

fn check_sigma_mu(sigma: f64, mu: f64) -> Result<()> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mu must be finite and > 0, got {mu}")));
    }
    Ok(())
}

/// `mu * rhat(sigma)` for a single singular value, with the TNN position
/// rule folded in via `exceeds` (true when the value's rank position is
/// beyond theta).
fn penalty_scalar(reg: &RegularizerSpec, sigma: f64, mu: f64, exceeds: bool) -> f64 {
    let theta = reg.theta;
    match reg.kind {
        RegKind::Nuclear => mu * sigma,
        RegKind::CappedL1 => mu * sigma.min(theta),
        RegKind::Lsp => mu * (sigma / theta + 1.0).ln(),
        RegKind::Tnn => {
            if exceeds {
                mu * sigma
            } else {
                0.0
            }
        }
        RegKind::Scad => {
            if sigma <= mu {
                mu * sigma
            } else if sigma <= theta * mu {
                (-sigma * sigma + 2.0 * theta * mu * sigma - mu * mu) / (2.0 * (theta - 1.0))
            } else {
                (theta + 1.0) * mu * mu / 2.0
            }
        }
        RegKind::Mcp => {
            if sigma <= theta * mu {
                mu * sigma - sigma * sigma / (2.0 * theta)
            } else {
                theta * mu * mu / 2.0
            }
        }
    }
}

/// `mu * rhat(sigma)`.
///
/// The TNN penalty depends on a singular value's rank position, not its
/// magnitude, so it cannot be evaluated pointwise; use [`penalty_sum`].
pub fn penalty(reg: &RegularizerSpec, sigma: f64, mu: f64) -> Result<f64> {
    check_sigma_mu(sigma, mu)?;
    if reg.kind == RegKind::Tnn {
        return Err(Error::invalid(
            "tnn penalty is position-dependent; evaluate through penalty_sum".to_string(),
        ));
    }
    Ok(penalty_scalar(reg, sigma, mu, false))
}

/// Sum of per-position penalties over a nonincreasing spectrum.
pub fn penalty_sum(reg: &RegularizerSpec, sigmas: &[f64], mu: f64) -> Result<f64> {
    for w in sigmas.windows(2) {
        if w[1] > w[0] {
            return Err(Error::Contract(format!(
                "spectrum must be nonincreasing, got {} before {}",
                w[0], w[1]
            )));
        }
    }
    let mut total = 0.0;
    for (idx, &s) in sigmas.iter().enumerate() {
        check_sigma_mu(s, mu)?;
        let exceeds = (idx + 1) as f64 > reg.theta;
        total += penalty_scalar(reg, s, mu, exceeds);
    }
    Ok(total)
}

/// The zeroing threshold: `sigma <= gamma` guarantees `scalar_prox` returns 0.
///
/// For TNN the threshold depends on the `(theta+1)`-th singular value of the
/// matrix being thresholded, passed as `sigma_theta_plus_1`, and only applies
/// to positions beyond theta. Taking `min(mu, sigma_theta_plus_1)` keeps the
/// screen conservative: a value above `mu` must never be zeroed merely for
/// sitting below the `(theta+1)`-th.
pub fn threshold_gamma(
    reg: &RegularizerSpec,
    mu: f64,
    sigma_theta_plus_1: Option<f64>,
) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mu must be finite and > 0, got {mu}")));
    }
    if reg.kind != RegKind::Tnn && sigma_theta_plus_1.is_some() {
        return Err(Error::invalid(
            "sigma_theta_plus_1 is only meaningful for tnn".to_string(),
        ));
    }
    let theta = reg.theta;
    Ok(match reg.kind {
        RegKind::Nuclear => mu,
        // For sigma > theta the flat branch offers h(sigma) = mu*theta, so zero
        // wins only while sigma^2/2 <= mu*theta; the linear branch caps at mu.
        RegKind::CappedL1 => mu.min((2.0 * mu * theta).sqrt()),
        RegKind::Lsp => (mu / theta).min(theta),
        RegKind::Scad => mu,
        RegKind::Mcp => {
            if theta < 1.0 {
                theta.sqrt() * mu
            } else {
                mu
            }
        }
        RegKind::Tnn => {
            let s = sigma_theta_plus_1.ok_or_else(|| {
                Error::invalid("tnn threshold needs sigma_theta_plus_1".to_string())
            })?;
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::domain(format!(
                    "sigma_theta_plus_1 must be finite and >= 0, got {s}"
                )));
            }
            mu.min(s)
        }
    })
}

fn check_tnn_flag(reg: &RegularizerSpec, index_exceeds_theta: Option<bool>) -> Result<bool> {
    match (reg.kind, index_exceeds_theta) {
        (RegKind::Tnn, Some(b)) => Ok(b),
        (RegKind::Tnn, None) => Err(Error::invalid(
            "tnn prox needs index_exceeds_theta".to_string(),
        )),
        (_, None) => Ok(false),
        (_, Some(_)) => Err(Error::invalid(
            "index_exceeds_theta is only meaningful for tnn".to_string(),
        )),
    }
}

/// Exact minimizer of `h(y) = 1/2 (y - sigma)^2 + mu * rhat(y)` over `y >= 0`.
///
/// Returns the largest minimizer when several attain the global minimum.
/// The result never exceeds `sigma`.
pub fn scalar_prox(
    reg: &RegularizerSpec,
    sigma: f64,
    mu: f64,
    index_exceeds_theta: Option<bool>,
) -> Result<f64> {
    check_sigma_mu(sigma, mu)?;
    let exceeds = check_tnn_flag(reg, index_exceeds_theta)?;
    let theta = reg.theta;

    match reg.kind {
        RegKind::Nuclear => return Ok((sigma - mu).max(0.0)),
        RegKind::Tnn => {
            return Ok(if exceeds { (sigma - mu).max(0.0) } else { sigma });
        }
        _ => {}
    }

    // Candidate minimizers: stationary points of each smooth piece plus the
    // piece boundaries, restricted to [0, sigma] (the minimizer cannot lie
    // beyond sigma since both terms of h grow there).
    let mut candidates = vec![0.0, sigma];
    let push = |c: &mut Vec<f64>, y: f64| {
        if y > 0.0 && y < sigma {
            c.push(y);
        }
    };
    match reg.kind {
        RegKind::CappedL1 => {
            push(&mut candidates, sigma - mu);
            push(&mut candidates, theta);
        }
        RegKind::Lsp => {
            // h'(y) = 0  <=>  y^2 - (sigma-theta) y + (mu - theta*sigma) = 0
            let disc = (sigma + theta) * (sigma + theta) - 4.0 * mu;
            if disc >= 0.0 {
                let s = disc.sqrt();
                push(&mut candidates, 0.5 * (sigma - theta - s));
                push(&mut candidates, 0.5 * (sigma - theta + s));
            }
        }
        RegKind::Scad => {
            push(&mut candidates, sigma - mu);
            push(&mut candidates, mu);
            push(&mut candidates, theta * mu);
            push(&mut candidates, ((theta - 1.0) * sigma - theta * mu) / (theta - 2.0));
        }
        RegKind::Mcp => {
            push(&mut candidates, theta * mu);
            if theta != 1.0 {
                push(&mut candidates, theta * (sigma - mu) / (theta - 1.0));
            }
        }
        RegKind::Nuclear | RegKind::Tnn => unreachable!(),
    }

    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = 0.0;
    let mut best_h = f64::INFINITY;
    for &y in &candidates {
        let h = 0.5 * (y - sigma) * (y - sigma) + penalty_scalar(reg, y, mu, true);
        if h <= best_h {
            best_h = h;
            best = y;
        }
    }
    Ok(best)
}

/// Brute-force minimizer of the prox objective over the grid
/// `{0, grid_step, 2*grid_step, ..., sigma}`, ties resolved to the largest
/// grid point. Test oracle for [`scalar_prox`].
pub fn scalar_prox_oracle(
    reg: &RegularizerSpec,
    sigma: f64,
    mu: f64,
    grid_step: f64,
    index_exceeds_theta: Option<bool>,
) -> Result<f64> {
    check_sigma_mu(sigma, mu)?;
    let exceeds = check_tnn_flag(reg, index_exceeds_theta)?;
    if !(grid_step > 0.0) {
        return Err(Error::invalid(format!("grid_step must be > 0, got {grid_step}")));
    }
    let tnn_exempt = reg.kind == RegKind::Tnn && !exceeds;
    let eval = |y: f64| 0.5 * (y - sigma) * (y - sigma) + penalty_scalar(reg, y, mu, exceeds);

    if tnn_exempt {
        // No penalty at this rank position: the objective is a pure parabola.
        return Ok(sigma);
    }

    let steps = (sigma / grid_step).floor() as usize;
    let mut best = 0.0;
    let mut best_h = eval(0.0);
    for i in 1..=steps {
        let y = i as f64 * grid_step;
        let h = eval(y);
        if h <= best_h {
            best_h = h;
            best = y;
        }
    }
    let h_end = eval(sigma);
    if h_end <= best_h {
        best = sigma;
    }
    Ok(best)
}

/// Objective value `1/2 (y - sigma)^2 + mu * rhat(y)` of the prox
/// subproblem; used by tests to compare minimizers by value.
pub fn prox_objective(
    reg: &RegularizerSpec,
    y: f64,
    sigma: f64,
    mu: f64,
    index_exceeds_theta: Option<bool>,
) -> Result<f64> {
    let exceeds = check_tnn_flag(reg, index_exceeds_theta)?;
    Ok(0.5 * (y - sigma) * (y - sigma) + penalty_scalar(reg, y, mu, exceeds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(kind: RegKind, theta: f64) -> RegularizerSpec {
        RegularizerSpec::new(kind, theta).unwrap()
    }

    /// Random valid spec for a kind, plus the TNN position flag when needed.
    fn random_spec(kind: RegKind, rng: &mut ChaCha8Rng) -> RegularizerSpec {
        let theta = match kind {
            RegKind::Nuclear => 0.0,
            RegKind::Scad => rng.random_range(2.05..10.0),
            RegKind::Tnn => rng.random_range(1..6) as f64,
            RegKind::Mcp => rng.random_range(0.05..8.0),
            _ => rng.random_range(0.05..8.0),
        };
        RegularizerSpec { kind, theta }
    }

    #[test]
    fn spec_validation() {
        assert!(RegularizerSpec::new(RegKind::Scad, 2.0).is_err());
        assert!(RegularizerSpec::new(RegKind::Scad, 2.5).is_ok());
        assert!(RegularizerSpec::new(RegKind::Tnn, 1.5).is_err());
        assert!(RegularizerSpec::new(RegKind::Tnn, 0.0).is_err());
        assert!(RegularizerSpec::new(RegKind::Tnn, 3.0).is_ok());
        assert!(RegularizerSpec::new(RegKind::Lsp, 0.0).is_err());
        assert!(RegularizerSpec::new(RegKind::Nuclear, 0.0).is_ok());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in RegKind::ALL {
            assert_eq!(kind.name().parse::<RegKind>().unwrap(), kind);
        }
        assert!("frobenius".parse::<RegKind>().is_err());
    }

    #[test]
    fn penalty_values() {
        assert_eq!(penalty(&RegularizerSpec::nuclear(), 3.0, 2.0).unwrap(), 6.0);
        assert_eq!(penalty(&spec(RegKind::CappedL1, 2.0), 5.0, 1.0).unwrap(), 2.0);
        assert_eq!(penalty(&spec(RegKind::Mcp, 2.0), 3.0, 1.0).unwrap(), 1.0);
        assert_eq!(penalty(&spec(RegKind::Scad, 3.0), 4.0, 1.0).unwrap(), 2.0);
        assert!(penalty(&spec(RegKind::Tnn, 1.0), 3.0, 1.0).is_err());
        assert!(penalty(&RegularizerSpec::nuclear(), -0.1, 1.0).is_err());
        assert!(penalty(&RegularizerSpec::nuclear(), 1.0, 0.0).is_err());
    }

    #[test]
    fn penalty_vanishes_at_zero_and_is_nondecreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in RegKind::ALL {
            if kind == RegKind::Tnn {
                continue;
            }
            for _ in 0..50 {
                let reg = random_spec(kind, &mut rng);
                let mu = rng.random_range(0.01..5.0);
                assert_eq!(penalty(&reg, 0.0, mu).unwrap(), 0.0);
                let mut prev = 0.0;
                for i in 1..=400 {
                    let s = i as f64 * 0.05;
                    let p = penalty(&reg, s, mu).unwrap();
                    assert!(
                        p >= prev - 1e-12,
                        "{kind} penalty decreased at sigma={s}: {p} < {prev}"
                    );
                    prev = p;
                }
            }
        }
    }

    #[test]
    fn penalty_sum_values() {
        assert_eq!(
            penalty_sum(&spec(RegKind::Tnn, 1.0), &[5.0, 3.0, 0.5], 1.0).unwrap(),
            3.5
        );
        assert_eq!(
            penalty_sum(&RegularizerSpec::nuclear(), &[2.0, 1.0], 1.0).unwrap(),
            3.0
        );
        assert_eq!(penalty_sum(&spec(RegKind::Lsp, 1.0), &[0.0, 0.0], 1.0).unwrap(), 0.0);
        assert!(penalty_sum(&RegularizerSpec::nuclear(), &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(threshold_gamma(&spec(RegKind::CappedL1, 2.0), 1.0, None).unwrap(), 1.0);
        assert_eq!(threshold_gamma(&spec(RegKind::Lsp, 1.0), 1.0, None).unwrap(), 1.0);
        assert_eq!(threshold_gamma(&spec(RegKind::Mcp, 0.25), 2.0, None).unwrap(), 1.0);
        assert_eq!(threshold_gamma(&spec(RegKind::Scad, 3.0), 0.5, None).unwrap(), 0.5);
        assert_eq!(
            threshold_gamma(&spec(RegKind::Tnn, 2.0), 1.0, Some(0.4)).unwrap(),
            0.4
        );
        assert!(threshold_gamma(&spec(RegKind::Tnn, 2.0), 1.0, None).is_err());
        assert!(threshold_gamma(&RegularizerSpec::nuclear(), 1.0, Some(1.0)).is_err());
    }

    #[test]
    fn prox_closed_form_points() {
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-12;
        assert_eq!(scalar_prox(&RegularizerSpec::nuclear(), 3.0, 1.0, None).unwrap(), 2.0);
        assert_eq!(scalar_prox(&RegularizerSpec::nuclear(), 0.5, 1.0, None).unwrap(), 0.0);
        assert!(near(scalar_prox(&spec(RegKind::CappedL1, 2.0), 2.0, 1.0, None).unwrap(), 1.0));
        assert!(near(scalar_prox(&spec(RegKind::CappedL1, 2.0), 5.0, 1.0, None).unwrap(), 5.0));
        assert!(near(
            scalar_prox(&spec(RegKind::Lsp, 1.0), 3.0, 1.0, None).unwrap(),
            1.0 + 3f64.sqrt()
        ));
        assert!(near(scalar_prox(&spec(RegKind::Scad, 3.0), 2.5, 1.0, None).unwrap(), 2.0));
        assert!(near(scalar_prox(&spec(RegKind::Mcp, 2.0), 1.5, 1.0, None).unwrap(), 1.0));
        assert_eq!(
            scalar_prox(&spec(RegKind::Tnn, 1.0), 3.0, 1.0, Some(true)).unwrap(),
            2.0
        );
        assert_eq!(
            scalar_prox(&spec(RegKind::Tnn, 1.0), 3.0, 1.0, Some(false)).unwrap(),
            3.0
        );
        assert!(scalar_prox(&spec(RegKind::Tnn, 1.0), 3.0, 1.0, None).is_err());
        assert!(scalar_prox(&spec(RegKind::Mcp, 2.0), 3.0, 1.0, Some(true)).is_err());
    }

    #[test]
    fn oracle_matches_known_points() {
        let o = |reg: &RegularizerSpec, s: f64, mu: f64| {
            scalar_prox_oracle(reg, s, mu, 1e-4, None).unwrap()
        };
        assert!((o(&RegularizerSpec::nuclear(), 3.0, 1.0) - 2.0).abs() <= 1e-4);
        assert!((o(&spec(RegKind::Lsp, 1.0), 3.0, 1.0) - (1.0 + 3f64.sqrt())).abs() <= 1e-4);
        for kind in RegKind::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let reg = random_spec(kind, &mut rng);
            let flag = (kind == RegKind::Tnn).then_some(true);
            assert_eq!(scalar_prox_oracle(&reg, 0.0, 1.0, 1e-4, flag).unwrap(), 0.0);
        }
    }

    #[test]
    fn shrinkage_over_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10_000 {
            let kind = RegKind::ALL[rng.random_range(0..6)];
            let reg = random_spec(kind, &mut rng);
            let sigma = rng.random_range(0.0..20.0);
            let mu = rng.random_range(1e-6..5.0);
            let flag = (kind == RegKind::Tnn).then(|| rng.random_bool(0.5));
            let y = scalar_prox(&reg, sigma, mu, flag).unwrap();
            assert!(
                (0.0..=sigma).contains(&y),
                "{kind} prox left [0, sigma]: sigma={sigma} mu={mu} theta={} y={y}",
                reg.theta
            );
        }
    }

    #[test]
    fn prox_zero_at_or_below_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in RegKind::ALL {
            for _ in 0..1000 {
                let reg = random_spec(kind, &mut rng);
                let mu = rng.random_range(1e-3..5.0);
                let (gamma, flag) = if kind == RegKind::Tnn {
                    let s_next = rng.random_range(0.0..10.0);
                    (threshold_gamma(&reg, mu, Some(s_next)).unwrap(), Some(true))
                } else {
                    (threshold_gamma(&reg, mu, None).unwrap(), None)
                };
                let sigma = gamma * rng.random_range(0.0..1.0);
                let y = scalar_prox(&reg, sigma, mu, flag).unwrap();
                assert_eq!(
                    y, 0.0,
                    "{kind} prox nonzero below gamma: sigma={sigma} gamma={gamma} mu={mu} theta={}",
                    reg.theta
                );
            }
        }
    }

    #[test]
    fn prox_monotone_in_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for kind in RegKind::ALL {
            for _ in 0..2000 {
                let reg = random_spec(kind, &mut rng);
                let mu = rng.random_range(1e-3..5.0);
                let a = rng.random_range(0.0..20.0);
                let b = rng.random_range(0.0..20.0);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let flag = (kind == RegKind::Tnn).then(|| rng.random_bool(0.5));
                let y_lo = scalar_prox(&reg, lo, mu, flag).unwrap();
                let y_hi = scalar_prox(&reg, hi, mu, flag).unwrap();
                assert!(
                    y_lo <= y_hi + 1e-12,
                    "{kind} prox not monotone: prox({lo})={y_lo} > prox({hi})={y_hi} (mu={mu}, theta={})",
                    reg.theta
                );
            }
        }
    }

    #[test]
    fn prox_agrees_with_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for kind in RegKind::ALL {
            for _ in 0..300 {
                let reg = random_spec(kind, &mut rng);
                let sigma = rng.random_range(0.0..20.0);
                let mu = rng.random_range(1e-3..5.0);
                let flag = (kind == RegKind::Tnn).then(|| rng.random_bool(0.5));
                let y = scalar_prox(&reg, sigma, mu, flag).unwrap();
                let y_grid = scalar_prox_oracle(&reg, sigma, mu, 1e-4, flag).unwrap();
                let h = prox_objective(&reg, y, sigma, mu, flag).unwrap();
                let h_grid = prox_objective(&reg, y_grid, sigma, mu, flag).unwrap();
                assert!(
                    h <= h_grid + 1e-9,
                    "{kind} closed form worse than grid: sigma={sigma} mu={mu} theta={} y={y} (h={h}) grid={y_grid} (h={h_grid})",
                    reg.theta
                );
                if (y - y_grid).abs() > 2e-4 {
                    // A genuine tie: both must attain the same objective value.
                    assert!(
                        (h - h_grid).abs() <= 1e-9,
                        "{kind} minimizers differ without a tie: sigma={sigma} mu={mu} theta={} y={y} grid={y_grid}",
                        reg.theta
                    );
                }
            }
        }
    }

    #[test]
    fn nuclear_prox_is_exact_soft_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reg = RegularizerSpec::nuclear();
        for _ in 0..1000 {
            let sigma = rng.random_range(0.0..20.0);
            let mu = rng.random_range(1e-6..5.0);
            assert_eq!(scalar_prox(&reg, sigma, mu, None).unwrap(), (sigma - mu).max(0.0));
        }
    }
}
