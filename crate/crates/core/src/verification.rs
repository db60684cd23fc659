//! Residual checks for the exact Gamma identities behind the kernel algebra
//! (alternating binomial sums, the potential row sum, the Riesz ratio
//! simplification) and the closed form of the oscillatory weight integrals
//! J_β, each confronted with an independent brute-force or quadrature route.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::{
    binomial_real, compensated_sum, cospi, gamma_ratio, log_gamma, quad_adaptive, sinpi,
};

/// One named identity check: both sides, the residual, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualRecord {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualRecord {
    fn build(name: &str, parameters: BTreeMap<String, f64>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_residual = (lhs - rhs).abs();
        ResidualRecord {
            name: name.to_string(),
            parameters,
            lhs,
            rhs,
            abs_residual,
            tolerance,
            pass: abs_residual <= tolerance,
        }
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// exp of a sum of signed log-Gammas in the numerator minus denominator;
/// denominator poles give 0, numerator poles are a pole configuration.
fn gamma_product(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut log_abs = 0.0;
    let mut sign = 1i8;
    for &x in num {
        let g = log_gamma(x);
        if g.is_pole() {
            return Err(Error::PoleConfiguration(format!("Gamma pole in numerator at {x}")));
        }
        log_abs += g.log_abs;
        sign *= g.sign;
    }
    for &x in den {
        let g = log_gamma(x);
        if g.is_pole() {
            return Ok(0.0);
        }
        log_abs -= g.log_abs;
        sign *= g.sign;
    }
    Ok(sign as f64 * log_abs.exp())
}

fn alternating_binomial_sum(sigma: f64, offsets: impl Iterator<Item = i64>) -> Result<f64> {
    let mut terms = Vec::new();
    for m in offsets {
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let c = binomial_real(2.0 * sigma, sigma + m as f64).map_err(|e| match e {
            Error::NumeratorPole(x) | Error::IndeterminatePole(x) => {
                Error::PoleConfiguration(format!("binomial pole at argument {x}"))
            }
            other => other,
        })?;
        terms.push(sign * c);
    }
    Ok(compensated_sum(terms))
}

/// Σ_{m=0}^{n−1} (−1)^m C(2σ, σ+m)
///   = Γ(2σ)/(Γ(σ)Γ(σ+1)) + (−1)^{n−1} Γ(2σ)/(Γ(σ+n)Γ(σ−n+1)).
pub fn lemma_sum1_residual(sigma: f64, n: usize) -> Result<ResidualRecord> {
    assert!(n >= 1);
    let lhs = alternating_binomial_sum(sigma, 0..n as i64)?;
    let nf = n as f64;
    let first = gamma_product(&[2.0 * sigma], &[sigma, sigma + 1.0])?;
    let second = gamma_product(&[2.0 * sigma], &[sigma + nf, sigma - nf + 1.0])?;
    let rhs = first + if n % 2 == 1 { second } else { -second };
    let tolerance = 1e-10 * rhs.abs().max(1.0);
    Ok(ResidualRecord::build(
        "alternating-binomial-sum-1",
        params(&[("sigma", sigma), ("n", nf)]),
        lhs,
        rhs,
        tolerance,
    ))
}

/// Σ_{m=0}^{n−1} (−1)^{m+1} C(2σ, σ+m+1)
///   = −Γ(2σ)/(Γ(σ)Γ(σ+1)) + (−1)^n Γ(2σ)/(Γ(σ−n)Γ(σ+n+1)).
pub fn lemma_sum2_residual(sigma: f64, n: usize) -> Result<ResidualRecord> {
    assert!(n >= 1);
    // (−1)^{m+1} C(σ+m+1) over m = 0..n−1 is Σ (−1)^j C(σ+j) over j = 1..n
    let lhs = alternating_binomial_sum(sigma, 1..=n as i64)?;
    let nf = n as f64;
    let first = gamma_product(&[2.0 * sigma], &[sigma, sigma + 1.0])?;
    let second = gamma_product(&[2.0 * sigma], &[sigma - nf, sigma + nf + 1.0])?;
    let rhs = -first + if n % 2 == 0 { second } else { -second };
    let tolerance = 1e-10 * rhs.abs().max(1.0);
    Ok(ResidualRecord::build(
        "alternating-binomial-sum-2",
        params(&[("sigma", sigma), ("n", nf)]),
        lhs,
        rhs,
        tolerance,
    ))
}

/// Σ_{m=−n+1}^{n} (−1)^m C(2σ, σ+m) = −2(−1)^n n Γ(2σ)/(Γ(1+σ−n)Γ(1+σ+n)),
/// the centered row sum that produces the graph potential.
pub fn lemma_potential_sum_residual(sigma: f64, n: usize) -> Result<ResidualRecord> {
    assert!(n >= 1);
    let lhs = alternating_binomial_sum(sigma, (1 - n as i64)..=n as i64)?;
    let nf = n as f64;
    let core = gamma_product(&[2.0 * sigma], &[1.0 + sigma - nf, 1.0 + sigma + nf])?;
    let rhs = -2.0 * if n % 2 == 0 { 1.0 } else { -1.0 } * nf * core;
    let tolerance = 1e-10 * rhs.abs().max(1.0);
    Ok(ResidualRecord::build(
        "centered-binomial-row-sum",
        params(&[("sigma", sigma), ("n", nf)]),
        lhs,
        rhs,
        tolerance,
    ))
}

/// Γ(α−n−1)/Γ(−n−α) − Γ(α+n−1)/Γ(n−α) = Γ(n+α−1)/Γ(n−α+2) · 2n(2α−1),
/// the reflection identity behind the Riesz potential simplification.
pub fn lemma_simpriesz_residual(alpha: f64, n: usize) -> Result<ResidualRecord> {
    assert!(n >= 1);
    let nf = n as f64;
    let to_pole_config = |e: Error| match e {
        Error::NumeratorPole(x) => Error::PoleConfiguration(format!("Gamma pole in numerator at {x}")),
        other => other,
    };
    let t1 = gamma_ratio(alpha - nf - 1.0, -nf - alpha).map_err(to_pole_config)?;
    let t2 = gamma_ratio(alpha + nf - 1.0, nf - alpha).map_err(to_pole_config)?;
    let lhs = t1 - t2;
    let rhs = gamma_ratio(nf + alpha - 1.0, nf - alpha + 2.0).map_err(to_pole_config)?
        * 2.0
        * nf
        * (2.0 * alpha - 1.0);
    let tolerance = 1e-10 * rhs.abs().max(1.0);
    Ok(ResidualRecord::build(
        "riesz-ratio-simplification",
        params(&[("alpha", alpha), ("n", nf)]),
        lhs,
        rhs,
        tolerance,
    ))
}

/// The bracket factor of the closed form for the oscillatory weight integral:
/// j_β(m) = tan(πβ) · (1 − (β)_{2m}/(1−β)_{2m}), with the Pochhammer ratio
/// computed through signed log-Gammas. Undefined at β = 1/2 (tan pole).
pub fn j_beta(beta: f64, m: usize) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.5) {
        return Err(Error::Domain(format!("beta must lie in (0, 3/2), got {beta}")));
    }
    if (beta - 0.5).abs() < 1e-12 {
        return Err(Error::Domain("j_beta is undefined at beta = 1/2".into()));
    }
    assert!(m >= 1);
    let two_m = 2.0 * m as f64;
    // (β)_{2m}/(1−β)_{2m} = Γ(β+2m)Γ(1−β) / (Γ(β)Γ(1−β+2m))
    let ratio = gamma_product(&[beta + two_m, 1.0 - beta], &[beta, 1.0 - beta + two_m])?;
    let tan = sinpi(beta) / cospi(beta);
    Ok(tan * (1.0 - ratio))
}

/// Prefactor 2^{β−2} Γ(β)²/Γ(2β) multiplying j_β in the closed form.
pub fn j_beta_prefactor(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.5) {
        return Err(Error::Domain(format!("beta must lie in (0, 3/2), got {beta}")));
    }
    Ok(2f64.powf(beta - 2.0) * gamma_product(&[beta, beta], &[2.0 * beta])?)
}

/// Quadrature of J_β(m) = ∫₀^π sin²(mθ) (1−cos θ)^{−β} dθ; equals
/// `j_beta_prefactor(β) · j_beta(β, m)` away from β = 1/2, and grows like
/// log m at β = 1/2.
pub fn j_beta_oracle(beta: f64, m: usize, tol: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.5) {
        return Err(Error::Domain(format!("beta must lie in (0, 3/2), got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be > 0, got {tol}")));
    }
    let mf = m as f64;
    let integrand = move |t: f64| {
        let base = 2.0 * (0.5 * t).sin().powi(2);
        let s = (mf * t).sin();
        s * s * base.powf(-beta)
    };
    let (v, _) = quad_adaptive(integrand, 0.0, PI, 2.0 - 2.0 * beta, tol)?;
    Ok(v)
}
