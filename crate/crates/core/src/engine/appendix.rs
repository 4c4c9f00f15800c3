//! Exact checks of the coupling between `X_delta` and a uniform `X_m`, and of
//! the binomial lower-tail bound used to control `|X_delta| < m`.

use serde::{Deserialize, Serialize};

use super::exact::{binomial, HitProfile};
use crate::error::{check_probability, Error, Result};
use crate::family::SetFamily;

/// Ground sets up to this size are enumerated for the decomposition check.
pub const APPENDIX_MAX_GROUND: usize = 20;

/// `gamma = delta / 2`, `m = ceil(gamma * n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixParams {
    pub delta: f64,
    pub gamma: f64,
    pub m: usize,
}

impl AppendixParams {
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        check_probability("delta", delta, None)?;
        let gamma = delta / 2.0;
        Ok(Self { delta, gamma, m: (gamma * n as f64).ceil() as usize })
    }
}

/// `Pr(Bin(n, delta) = j)` for `j = 0..=n`, from exact binomial coefficients.
pub fn binomial_pmf(n: usize, delta: f64) -> Vec<f64> {
    assert!(n <= 128, "binomial coefficients overflow beyond n = 128");
    (0..=n)
        .map(|j| binomial(n, j) as f64 * delta.powi(j as i32) * (1.0 - delta).powi((n - j) as i32))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub ground_size: usize,
    pub params: AppendixParams,
    /// `Pr(exists S ⊆ X_delta)`.
    pub lhs: f64,
    /// `Pr(exists S ⊆ X_m)`.
    pub uniform_hit: f64,
    /// `Pr(|X_delta| >= m)`.
    pub size_tail: f64,
    /// `uniform_hit * size_tail`.
    pub rhs: f64,
    /// `Pr(exists S ⊆ X_i)` for `i = 0..=n`.
    pub uniform_hit_by_size: Vec<f64>,
    /// The `X_i` hit probabilities never decrease in `i`.
    pub monotone: bool,
    /// `lhs` recomputed as `sum_i Pr(|X_delta| = i) Pr(exists S ⊆ X_i)`.
    pub total_probability: f64,
    pub pass: bool,
}

/// Evaluates both sides of `Pr(exists S ⊆ X_delta) >= Pr(exists S ⊆ X_m) Pr(|X_delta| >= m)`
/// by enumerating every subset of the ground set.
pub fn verify_appendix_decomposition(family: &SetFamily, delta: f64) -> Result<AppendixReport> {
    let n = family.ground().size();
    if n > APPENDIX_MAX_GROUND {
        return Err(Error::ExactInfeasible {
            ground: n,
            ground_cap: APPENDIX_MAX_GROUND,
            family: family.len(),
            family_cap: usize::MAX,
        });
    }
    let params = AppendixParams::new(delta, n)?;
    let profile = HitProfile::new(family)?;
    let report = decomposition_at(&profile, delta, params.m);
    Ok(AppendixReport { params, ..report })
}

/// Same comparison at an arbitrary `m`. Monotonicity makes the inequality
/// hold for every `m`, not only `ceil(delta n / 2)`.
pub fn decomposition_at(profile: &HitProfile, delta: f64, m: usize) -> AppendixReport {
    let n = profile.ground_size();
    let pmf = binomial_pmf(n, delta);
    let uniform: Vec<f64> = (0..=n).map(|i| profile.uniform_probability(i)).collect();
    let lhs = profile.probability(delta);
    let size_tail: f64 = pmf[m..].iter().sum();
    let rhs = uniform[m] * size_tail;
    let monotone = uniform.windows(2).all(|w| w[0] <= w[1]);
    let total: f64 = pmf.iter().zip(&uniform).map(|(p, q)| p * q).sum();
    AppendixReport {
        ground_size: n,
        params: AppendixParams { delta, gamma: delta / 2.0, m },
        lhs,
        uniform_hit: uniform[m],
        size_tail,
        rhs,
        uniform_hit_by_size: uniform,
        monotone,
        total_probability: total,
        pass: lhs >= rhs && monotone && (total - lhs).abs() <= 1e-12,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffReport {
    pub n: usize,
    pub delta: f64,
    pub m: usize,
    /// `Pr(Bin(n, delta) < m)`.
    pub below_m: f64,
    /// `Pr(Bin(n, delta) <= n delta / 2)`.
    pub tail: f64,
    /// `e^{-n delta / 8}`.
    pub bound: f64,
    pub tail_ok: bool,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_check: Option<EpsCheck>,
    pub pass: bool,
}

/// `e^{-r delta/8} <= eps^2` once `r >= 16 ln(1/eps) / delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsCheck {
    pub eps: f64,
    pub r_needed: f64,
    pub applies: bool,
    pub lhs: f64,
    pub eps_squared: f64,
    pub ok: bool,
}

/// Exact lower binomial tail against `e^{-n delta / 8}`.
pub fn verify_chernoff_tail(n: usize, delta: f64, r: f64, eps: Option<f64>) -> Result<ChernoffReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    check_probability("delta", delta, Some(0.5))?;
    let pmf = binomial_pmf(n, delta);
    let half_mean = n as f64 * delta / 2.0;
    let m = half_mean.ceil() as usize;
    let tail: f64 = pmf.iter().enumerate().filter(|(j, _)| (*j as f64) <= half_mean).map(|(_, p)| p).sum();
    let below_m: f64 = pmf[..m].iter().sum();
    let bound = (-(n as f64) * delta / 8.0).exp();
    let tail_ok = below_m <= tail && tail <= bound;
    let eps_check = match eps {
        Some(e) => {
            check_probability("eps", e, Some(0.5))?;
            let r_needed = 16.0 / delta * (1.0 / e).ln();
            let applies = r >= r_needed;
            let lhs = (-r * delta / 8.0).exp();
            Some(EpsCheck { eps: e, r_needed, applies, lhs, eps_squared: e * e, ok: !applies || lhs <= e * e })
        }
        None => None,
    };
    let pass = tail_ok && eps_check.as_ref().map_or(true, |c| c.ok);
    Ok(ChernoffReport { n, delta, m, below_m, tail, bound, tail_ok, r, eps_check, pass })
}
