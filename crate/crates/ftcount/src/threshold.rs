//! Threshold arithmetic: effective pair coefficients, the ancilla-acceptance
//! adjustment, level-k failure bounds, overhead, the t-error generalization,
//! and the scalar model of local (non-Markovian) noise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("acceptance bound is vacuous: C = {c} is not below A' = {a_prime}")]
    VacuousAcceptance { c: f64, a_prime: f64 },
    #[error("noise rate {eps} is not below the threshold {eps0}")]
    AboveThreshold { eps: f64, eps0: f64 },
    #[error("no level up to {0} reaches the target accuracy")]
    Unreachable(u32),
    #[error("size overflows 128 bits")]
    Overflow,
    #[error("fixed-point iteration did not converge in {0} steps")]
    NoConvergence(usize),
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        // r * (n - i) is divisible by (i + 1) at every step.
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

/// Binomial coefficient as a float, for arguments where the exact value is large.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of ways to choose three locations out of `locations`.
pub fn triple_count(locations: u64) -> u128 {
    binomial(locations, 3)
}

/// Positive root of `A' = A + B / A'`.
pub fn a_prime(a: f64, b: f64) -> Result<f64, ThresholdError> {
    if a.is_nan() || a <= 0.0 {
        return Err(ThresholdError::Degenerate("A must be positive"));
    }
    if b < 0.0 {
        return Err(ThresholdError::Degenerate("B must be non-negative"));
    }
    Ok(0.5 * a * (1.0 + (1.0 + 4.0 * b / (a * a)).sqrt()))
}

/// Conditions on every ancilla being accepted: each of `exponent` independent
/// ancillas of `c_anc` locations passes with probability at least `1 - c_anc/A'`.
pub fn bayes_adjust(a_prime: f64, c_anc: f64, exponent: u32) -> Result<f64, ThresholdError> {
    if c_anc >= a_prime {
        return Err(ThresholdError::VacuousAcceptance { c: c_anc, a_prime });
    }
    Ok(a_prime * (1.0 - c_anc / a_prime).powi(-(exponent as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInputs {
    /// Malignant-pair count.
    pub a: f64,
    /// Three-subset count.
    pub b: f64,
    /// Locations in one ancilla preparation and verification.
    pub c_anc: f64,
    pub acceptance_exponent: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub a_prime: f64,
    pub a_double_prime: f64,
    pub eps0: f64,
}

pub fn threshold(inp: &ThresholdInputs) -> Result<ThresholdResult, ThresholdError> {
    let ap = a_prime(inp.a, inp.b)?;
    let app = bayes_adjust(ap, inp.c_anc, inp.acceptance_exponent)?;
    Ok(ThresholdResult { a_prime: ap, a_double_prime: app, eps0: 1.0 / app })
}

/// `eps0 * (eps/eps0)^(2^k)`.
pub fn eps_level_k(eps: f64, eps0: f64, k: u32) -> f64 {
    eps_level_k_t(eps, eps0, 1, k)
}

/// `eps0 * (eps/eps0)^((t+1)^k)`, the bound for codes correcting `t` errors.
pub fn eps_level_k_t(eps: f64, eps0: f64, t: u32, k: u32) -> f64 {
    if k == 0 {
        return eps;
    }
    eps0 * (eps / eps0).powf((t as f64 + 1.0).powi(k as i32))
}

/// `2 eps0 L (eps/eps0)^(2^k)`: failure bound for a circuit of `l` locations simulated at level `k`.
pub fn accuracy_bound(l: f64, eps: f64, eps0: f64, k: u32) -> f64 {
    2.0 * eps0 * l * (eps / eps0).powf(2f64.powi(k as i32))
}

pub const MAX_LEVEL: u32 = 64;

/// Smallest level whose accuracy bound meets `delta_target`, with that bound.
pub fn minimal_level(l: f64, delta_target: f64, eps: f64, eps0: f64) -> Result<(f64, u32), ThresholdError> {
    if eps >= eps0 {
        return Err(ThresholdError::AboveThreshold { eps, eps0 });
    }
    (0..=MAX_LEVEL)
        .map(|k| (accuracy_bound(l, eps, eps0, k), k))
        .find(|&(d, _)| d <= delta_target)
        .ok_or(ThresholdError::Unreachable(MAX_LEVEL))
}

/// Sizes after `k` rounds of substitution: `(L * ell^k, D * d^k)`.
pub fn overhead(l: u128, depth: u128, ell: u128, d: u128, k: u32) -> Result<(u128, u128), ThresholdError> {
    let grow = |base: u128, f: u128| -> Result<u128, ThresholdError> {
        let p = f.checked_pow(k).ok_or(ThresholdError::Overflow)?;
        base.checked_mul(p).ok_or(ThresholdError::Overflow)
    };
    Ok((grow(l, ell)?, grow(depth, d)?))
}

/// `A_t^(-1/t)`.
pub fn eps0_t(a_t: f64, t: u32) -> f64 {
    a_t.powf(-1.0 / t as f64)
}

/// `binom(A, s) eta^s exp((A - s) eta)`.
pub fn fault_path_tail(a: u64, s: u64, eta: f64) -> f64 {
    if s > a {
        return 0.0;
    }
    binomial_f64(a, s) * eta.powi(s as i32) * ((a - s) as f64 * eta).exp()
}

/// Exact tail by enumeration: sum over subsets of at least `s` locations of the
/// product of their bad magnitudes (good parts are 1).
pub fn brute_force_tail(b: &[f64], s: usize) -> f64 {
    assert!(b.len() <= 24, "brute force is exponential");
    let mut total = 0.0;
    for m in 0u32..(1 << b.len()) {
        if (m.count_ones() as usize) < s {
            continue;
        }
        total += (0..b.len()).filter(|&i| m >> i & 1 == 1).map(|i| b[i]).product::<f64>();
    }
    total
}

/// `E_r` for every `r`: sum over `|I| = r` of the bad product on `I` times
/// `(1 + b_i)` off `I`, read off the coefficients of `prod_i ((1 + b_i) + x b_i)`.
pub fn e_terms(b: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &bi in b {
        let mut next = vec![0.0; c.len() + 1];
        for (r, &v) in c.iter().enumerate() {
            next[r] += v * (1.0 + bi);
            next[r + 1] += v * bi;
        }
        c = next;
    }
    c
}

/// `sum_{r >= s} (-1)^(r-s) binom(r-1, s-1) E_r`.
pub fn inclusion_exclusion_tail(b: &[f64], s: usize) -> f64 {
    assert!(s >= 1);
    let e = e_terms(b);
    (s..e.len())
        .map(|r| {
            let sign = if (r - s).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial_f64(r as u64 - 1, s as u64 - 1) * e[r]
        })
        .sum()
}

/// Whether the signed counting formula reproduces the enumerated tail.
pub fn verify_inclusion_exclusion(b: &[f64], s: usize) -> bool {
    let direct = brute_force_tail(b, s);
    let formula = inclusion_exclusion_tail(b, s);
    (direct - formula).abs() <= 1e-9 * direct.abs().max(1.0)
}

/// `(C binom(A, s))^(-1/(s-1))`.
pub fn local_noise_threshold(a: u64, s: u64, c: f64) -> Result<f64, ThresholdError> {
    if s < 2 {
        return Err(ThresholdError::Degenerate("s must be at least 2"));
    }
    if c < 1.0 {
        return Err(ThresholdError::Degenerate("C must be at least 1"));
    }
    Ok((c * binomial_f64(a, s)).powf(-1.0 / (s - 1) as f64))
}

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 100;

/// Threshold with the self-consistent constant `C = exp((A - s) eta0)`.
/// Returns `(eta0, C, iterations)`.
pub fn local_noise_threshold_self_consistent(a: u64, s: u64) -> Result<(f64, f64, usize), ThresholdError> {
    let mut c = 1.0;
    for it in 1..=FIXED_POINT_MAX_ITER {
        let eta = local_noise_threshold(a, s, c)?;
        let next = ((a - s.min(a)) as f64 * eta).exp();
        if (next - c).abs() <= FIXED_POINT_TOL * c {
            return Ok((local_noise_threshold(a, s, next)?, next, it));
        }
        c = next;
    }
    Err(ThresholdError::NoConvergence(FIXED_POINT_MAX_ITER))
}

/// Level-1 local noise strength from malignant pairs: `B eta^2 + (C+1) binom(A,3) eta^3`.
pub fn local_noise_pair_level1(b_pairs: f64, a: u64, eta: f64, c: f64) -> f64 {
    b_pairs * eta * eta + (c + 1.0) * binomial_f64(a, 3) * eta.powi(3)
}

/// Positive `eta` at which the level-1 map above returns `eta` itself.
pub fn local_noise_pair_threshold(b_pairs: f64, a: u64, c: f64) -> f64 {
    let q = (c + 1.0) * binomial_f64(a, 3);
    if q == 0.0 {
        return 1.0 / b_pairs;
    }
    (-b_pairs + (b_pairs * b_pairs + 4.0 * q).sqrt()) / (2.0 * q)
}

/// `1 / (e M sqrt(N))`.
pub fn decoherence_interpolation(m: f64, n: f64) -> Result<f64, ThresholdError> {
    if m < 1.0 || n < 1.0 {
        return Err(ThresholdError::Degenerate("M and N must be at least 1"));
    }
    Ok(1.0 / (std::f64::consts::E * m * n.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(575, 3), 31_519_775);
        assert_eq!(binomial(487, 3), 19_131_795);
        assert_eq!(binomial(521, 3), 23_434_580);
        assert_eq!(binomial(575, 2), 165_025);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn a_prime_is_fixed_point() {
        let ap = a_prime(35_235.0, 31_519_775.0).unwrap();
        assert!(close(ap, 35_235.0 + 31_519_775.0 / ap, 1e-12));
        assert_eq!(a_prime(7.0, 0.0).unwrap(), 7.0);
        assert!(a_prime(0.0, 1.0).is_err());
    }

    #[test]
    fn bayes_errors() {
        assert!(bayes_adjust(10.0, 10.0, 1).is_err());
        assert_eq!(bayes_adjust(10.0, 0.0, 8).unwrap(), 10.0);
    }

    #[test]
    fn level_k_basics() {
        assert_eq!(eps_level_k(1e-4, 1e-4, 5), 1e-4);
        assert!(close(eps_level_k(0.5e-4, 1e-4, 1), 0.25e-4, 1e-12));
        assert_eq!(eps_level_k(3e-5, 1e-4, 0), 3e-5);
        assert!(close(eps_level_k_t(0.5e-3, 1e-3, 2, 1), 1e-3 * 0.125, 1e-12));
    }

    #[test]
    fn overhead_cases() {
        assert_eq!(overhead(5, 7, 575, 9, 0).unwrap(), (5, 7));
        assert_eq!(overhead(5, 7, 1, 1, 9).unwrap(), (5, 7));
        assert_eq!(overhead(1, 1, 575, 1, 2).unwrap().0, 575 * 575);
        assert!(overhead(2, 1, u128::MAX, 1, 2).is_err());
    }

    #[test]
    fn eps0_t_cases() {
        assert_eq!(eps0_t(250.0, 1), 1.0 / 250.0);
        assert!(close(eps0_t(1e6, 2), 1e-3, 1e-12));
    }

    #[test]
    fn tail_cases() {
        assert!(close(fault_path_tail(5, 0, 0.1), (0.5f64).exp(), 1e-12));
        assert_eq!(fault_path_tail(5, 2, 0.0), 0.0);
        let b = [0.1; 5];
        assert!(fault_path_tail(5, 2, 0.1) >= brute_force_tail(&b, 2));
        assert!(verify_inclusion_exclusion(&[1.0, 1.0, 1.0], 2));
        let b = [0.3, 0.0, 0.7, 0.2];
        let all: f64 = b.iter().map(|x| 1.0 + x).product::<f64>() - 1.0;
        assert!(close(inclusion_exclusion_tail(&b, 1), all, 1e-12));
        assert!(verify_inclusion_exclusion(&b, 3));
    }

    #[test]
    fn local_noise_cases() {
        let e = std::f64::consts::E;
        assert!(close(local_noise_threshold(2, 2, e).unwrap(), 1.0 / e, 1e-12));
        assert!(close(local_noise_threshold(575, 2, e).unwrap(), 1.0 / (e * 165_025.0), 1e-12));
        assert!(local_noise_threshold(5, 1, e).is_err());
        let (eta, c, it) = local_noise_threshold_self_consistent(575, 2).unwrap();
        assert!(it <= FIXED_POINT_MAX_ITER);
        assert!(close(c, ((575.0 - 2.0) * eta).exp(), 1e-10));
        assert_eq!(local_noise_pair_level1(35_235.0, 575, 0.0, e), 0.0);
        let eta = local_noise_pair_threshold(35_235.0, 575, e);
        assert!(close(local_noise_pair_level1(35_235.0, 575, eta, e), eta, 1e-9));
        assert!(close(decoherence_interpolation(1.0, 1.0).unwrap(), 1.0 / e, 1e-12));
        assert!(decoherence_interpolation(0.5, 1.0).is_err());
    }
}
