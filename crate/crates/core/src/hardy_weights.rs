//! The Hardy-weight family W_{α,σ} = I_{α−σ}/I_α, the optimal member at
//! α* = (3+2σ)/4, the square-root comparison weight, the decay constant
//! Ψ_σ(α), and the critical constant C_σ = Ψ_σ(α*).
//!
//! Two independent evaluation routes exist: the Gamma-ratio closed form
//!   W_{α,σ}(n) = Ψ_σ(α) · Γ(n+α−σ−1)Γ(n−α+2) / (Γ(n−α+σ+2)Γ(n+α−1))
//! and the ratio of Riesz potentials. The returned value is the ratio route
//! (a product of exact term ratios, stable to ~1e−14 for n ≤ 10⁴); the closed
//! form is a cross-check only.

use crate::error::{Error, Result};
use crate::riesz::{riesz_potential, RieszIndex};
use crate::special_fn::log_gamma;

/// Admissible parameter pair for a Hardy weight: σ ∈ (0, 1] and
/// σ < α < min(1+σ, 3/2). The 3/2 cap keeps both Riesz indices in range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    sigma: f64,
    alpha: f64,
}

/// Where a given (α, σ) sits in the weight hierarchy: every admissible pair
/// gives a Hardy weight, criticality needs α ≤ (3+2σ)/4, optimality is the
/// boundary case α = (3+2σ)/4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightClassification {
    pub is_hardy: bool,
    pub is_critical: bool,
    pub is_optimal: bool,
}

impl WeightSpec {
    pub fn new(sigma: f64, alpha: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::Domain(format!("sigma must lie in (0, 1], got {sigma}")));
        }
        let upper = (1.0 + sigma).min(1.5);
        if !(alpha > sigma && alpha < upper) {
            return Err(Error::Domain(format!(
                "alpha must lie in ({sigma}, {upper}), got {alpha}"
            )));
        }
        Ok(WeightSpec { sigma, alpha })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The optimality threshold α* = (3 + 2σ)/4.
    pub fn alpha_star(sigma: f64) -> f64 {
        (3.0 + 2.0 * sigma) / 4.0
    }

    pub fn classification(&self) -> WeightClassification {
        let star = Self::alpha_star(self.sigma);
        WeightClassification {
            is_hardy: true,
            is_critical: self.alpha <= star,
            is_optimal: self.alpha == star,
        }
    }
}

/// Decay constant Ψ_σ(α) = 4^σ Γ(3/2−α+σ)Γ(α) / (Γ(α−σ)Γ(3/2−α)), the limit
/// of n^{2σ} W_{α,σ}(n). Strictly decreasing in α beyond α*.
pub fn psi_constant(sigma: f64, alpha: f64) -> Result<f64> {
    if !(alpha > sigma && alpha < 1.5) {
        return Err(Error::Domain(format!(
            "psi_constant needs sigma < alpha < 3/2, got sigma = {sigma}, alpha = {alpha}"
        )));
    }
    let n1 = log_gamma(1.5 - alpha + sigma);
    let n2 = log_gamma(alpha);
    let d1 = log_gamma(alpha - sigma);
    let d2 = log_gamma(1.5 - alpha);
    Ok(4f64.powf(sigma) * (n1.log_abs + n2.log_abs - d1.log_abs - d2.log_abs).exp())
}

/// C_σ = 4^σ Γ((3+2σ)/4)² / Γ((3−2σ)/4)², the critical constant; equals
/// Ψ_σ(α*).
pub fn critical_constant(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::Domain(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    let p = log_gamma((3.0 + 2.0 * sigma) / 4.0);
    let q = log_gamma((3.0 - 2.0 * sigma) / 4.0);
    Ok(4f64.powf(sigma) * (2.0 * (p.log_abs - q.log_abs)).exp())
}

/// Per-step ratio of the weight, W(n+1)/W(n), from the term ratios of the
/// two Riesz potentials.
#[inline]
fn weight_step(spec: &WeightSpec, n: usize) -> f64 {
    let nf = n as f64;
    let a = spec.alpha;
    let s = spec.sigma;
    // [(n+α−σ−1)/(n−α+σ+2)] · [(n−α+2)/(n+α−1)]
    (nf + a - s - 1.0) / (nf - a + s + 2.0) * (nf - a + 2.0) / (nf + a - 1.0)
}

fn weight_at_one(spec: &WeightSpec) -> Result<f64> {
    let num = RieszIndex::new(spec.alpha - spec.sigma)?;
    let den = RieszIndex::new(spec.alpha)?;
    Ok(riesz_potential(num, 1) / riesz_potential(den, 1))
}

/// Closed-form route, used as the cross-check.
fn hardy_weight_closed(spec: &WeightSpec, n: usize) -> Result<f64> {
    let nf = n as f64;
    let a = spec.alpha;
    let s = spec.sigma;
    let psi = psi_constant(s, a)?;
    let n1 = log_gamma(nf + a - s - 1.0);
    let n2 = log_gamma(nf - a + 2.0);
    let d1 = log_gamma(nf - a + s + 2.0);
    let d2 = log_gamma(nf + a - 1.0);
    Ok(psi * (n1.log_abs + n2.log_abs - d1.log_abs - d2.log_abs).exp())
}

/// W_{α,σ}(n), via the Riesz-ratio route, cross-checked against the
/// Gamma closed form at 1e−10 relative.
pub fn hardy_weight(spec: &WeightSpec, n: usize) -> Result<f64> {
    debug_assert!(n >= 1);
    let mut w = weight_at_one(spec)?;
    for k in 1..n {
        w *= weight_step(spec, k);
    }
    let closed = hardy_weight_closed(spec, n)?;
    if (w - closed).abs() > 1e-10 * closed.abs() {
        return Err(Error::InternalInconsistency(format!(
            "weight paths disagree at n = {n}: ratio {w}, closed form {closed}"
        )));
    }
    Ok(w)
}

/// W_{α,σ} tabulated on 1..=n_max; the closed-form cross-check is applied at
/// both ends of the table.
pub fn hardy_weight_table(spec: &WeightSpec, n_max: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max);
    let mut w = weight_at_one(spec)?;
    out.push(w);
    for k in 1..n_max {
        w *= weight_step(spec, k);
        out.push(w);
    }
    for &n in &[1usize, n_max] {
        let closed = hardy_weight_closed(spec, n)?;
        let got = out[n - 1];
        if (got - closed).abs() > 1e-10 * closed.abs() {
            return Err(Error::InternalInconsistency(format!(
                "weight paths disagree at n = {n}: ratio {got}, closed form {closed}"
            )));
        }
    }
    Ok(out)
}

/// The optimal weight W_σ^op = W_{α*,σ} with α* = (3+2σ)/4.
pub fn optimal_weight(sigma: f64, n: usize) -> Result<f64> {
    let spec = WeightSpec::new(sigma, WeightSpec::alpha_star(sigma))?;
    hardy_weight(&spec, n)
}

/// The square-root comparison weight 2 − √(1+1/n) − √(1−1/n), in a rearranged
/// form that avoids the 1 − O(1/n²) cancellation: with h = 1/n,
///   2 − √(1+h) − √(1−h) = 2h² / ((1 + √(1−h²)) (2 + √(1+h) + √(1−h))).
pub fn kpp_weight(n: usize) -> f64 {
    debug_assert!(n >= 1);
    let h = 1.0 / n as f64;
    let s = (1.0 + h).sqrt() + (1.0 - h).sqrt();
    2.0 * h * h / ((1.0 + ((1.0 - h) * (1.0 + h)).sqrt()) * (2.0 + s))
}

/// One row of the weight comparison table.
#[derive(Debug, Clone, Copy)]
pub struct WeightComparisonRow {
    pub n: usize,
    pub kpp: f64,
    pub op1: f64,
    pub diff: f64,
}

/// Tabulated comparison of the σ = 1 optimal weight against the square-root
/// weight, with the first index where the optimal weight wins.
#[derive(Debug, Clone)]
pub struct WeightComparison {
    pub rows: Vec<WeightComparisonRow>,
    pub first_op_exceeds_kpp: Option<usize>,
}

pub fn weight_comparison(n_max: usize) -> Result<WeightComparison> {
    if n_max < 2 {
        return Err(Error::Domain("comparison needs n_max >= 2".into()));
    }
    let spec = WeightSpec::new(1.0, WeightSpec::alpha_star(1.0))?;
    let op = hardy_weight_table(&spec, n_max)?;
    let mut rows = Vec::with_capacity(n_max);
    let mut first = None;
    for n in 1..=n_max {
        let kpp = kpp_weight(n);
        let op1 = op[n - 1];
        let diff = op1 - kpp;
        if first.is_none() && diff > 0.0 {
            first = Some(n);
        }
        rows.push(WeightComparisonRow { n, kpp, op1, diff });
    }
    Ok(WeightComparison { rows, first_op_exceeds_kpp: first })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spec_domain() {
        assert!(WeightSpec::new(1.0, 1.25).is_ok());
        assert!(WeightSpec::new(1.0, 1.0).is_err()); // alpha must exceed sigma
        assert!(WeightSpec::new(1.0, 1.5).is_err()); // capped below 3/2
        assert!(WeightSpec::new(0.5, 1.6).is_err());
        assert!(WeightSpec::new(1.2, 1.3).is_err()); // sigma above 1
        assert!(WeightSpec::new(0.25, 0.9).is_ok());
    }

    #[test]
    fn classification_hierarchy() {
        let c = WeightSpec::new(1.0, 1.25).unwrap().classification();
        assert!(c.is_hardy && c.is_critical && c.is_optimal);
        let c = WeightSpec::new(1.0, 1.1).unwrap().classification();
        assert!(c.is_hardy && c.is_critical && !c.is_optimal);
        let c = WeightSpec::new(1.0, 1.4).unwrap().classification();
        assert!(c.is_hardy && !c.is_critical && !c.is_optimal);
    }

    #[test]
    fn sigma_one_closed_form_values() {
        // W_{5/4,1}(n) = (1/4) / (n² − 9/16)
        let spec = WeightSpec::new(1.0, 1.25).unwrap();
        assert!((hardy_weight(&spec, 1).unwrap() - 4.0 / 7.0).abs() < 1e-14);
        assert!((hardy_weight(&spec, 2).unwrap() - 4.0 / 55.0).abs() < 1e-14);
        let w = hardy_weight_table(&spec, 1000).unwrap();
        for n in 1..=1000usize {
            let expect = 0.25 / ((n * n) as f64 - 0.5625);
            let rel = (w[n - 1] - expect).abs() / expect;
            assert!(rel <= 1e-13, "n = {n}: rel {rel:.3e}");
        }
    }

    #[test]
    fn ratio_route_matches_module_values() {
        let spec = WeightSpec::new(0.5, 1.0).unwrap();
        let w = hardy_weight(&spec, 1).unwrap();
        let expect = riesz_potential(RieszIndex::new(0.5).unwrap(), 1)
            / riesz_potential(RieszIndex::new(1.0).unwrap(), 1);
        assert_eq!(w, expect);
        assert!((w - 0.848_826_363_2).abs() < 1e-9);
    }

    #[test]
    fn two_path_agreement_on_grid() {
        for i in 1..=5 {
            let sigma = 0.2 * i as f64;
            for j in 1..=5 {
                let lo = sigma;
                let hi = (1.0 + sigma).min(1.5);
                let alpha = lo + (hi - lo) * j as f64 / 6.0;
                let spec = WeightSpec::new(sigma, alpha).unwrap();
                for n in [1usize, 10, 100] {
                    // hardy_weight itself errors if the routes disagree
                    let w = hardy_weight(&spec, n).unwrap();
                    assert!(w > 0.0);
                }
            }
        }
    }

    #[test]
    fn psi_values_and_monotonicity() {
        assert!((psi_constant(1.0, 1.25).unwrap() - 0.25).abs() < 1e-14);
        assert!((psi_constant(0.5, 1.0).unwrap() - 2.0 / PI).abs() < 1e-14);
        for &sigma in &[0.25, 0.5, 0.75, 1.0] {
            let star = WeightSpec::alpha_star(sigma);
            let mut prev = f64::INFINITY;
            for k in 1..=50 {
                let alpha = star + (1.5 - star) * k as f64 / 51.0;
                let v = psi_constant(sigma, alpha).unwrap();
                assert!(v < prev, "σ = {sigma}, α = {alpha}");
                prev = v;
            }
        }
    }

    #[test]
    fn psi_digamma_bracket_negative_past_star() {
        use crate::special_fn::digamma;
        // d/dα log Ψ = ψ(α) − ψ(α−σ) − ψ(3/2−α+σ) + ψ(3/2−α) < 0 beyond α*
        for &sigma in &[0.25, 0.5, 0.75, 1.0] {
            let star = WeightSpec::alpha_star(sigma);
            for k in 1..=50 {
                let a = star + (1.5 - star) * k as f64 / 51.0;
                let bracket = digamma(a).unwrap() - digamma(a - sigma).unwrap()
                    - digamma(1.5 - a + sigma).unwrap()
                    + digamma(1.5 - a).unwrap();
                assert!(bracket < 0.0, "σ = {sigma}, α = {a}: {bracket}");
            }
        }
    }

    #[test]
    fn critical_constant_values() {
        assert!((critical_constant(1.0).unwrap() - 0.25).abs() < 1e-14);
        assert!((critical_constant(0.5).unwrap() - 2.0 / PI).abs() < 1e-14);
        for &sigma in &[0.25, 0.5, 0.75, 1.0] {
            let c = critical_constant(sigma).unwrap();
            let psi = psi_constant(sigma, WeightSpec::alpha_star(sigma)).unwrap();
            assert!((c - psi).abs() <= 1e-12 * c, "σ = {sigma}");
        }
    }

    #[test]
    fn weight_asymptotics() {
        for &(sigma, alpha) in &[(1.0, 1.25), (0.5, 1.0), (0.75, 1.1), (0.25, 0.8)] {
            let spec = WeightSpec::new(sigma, alpha).unwrap();
            let n = 10_000usize;
            let w = hardy_weight_table(&spec, n).unwrap();
            let ratio = w[n - 1] * (n as f64).powf(2.0 * sigma) / psi_constant(sigma, alpha).unwrap();
            assert!((ratio - 1.0).abs() <= 0.02, "σ={sigma} α={alpha}: ratio {ratio}");
        }
    }

    #[test]
    fn kpp_values() {
        assert!((kpp_weight(1) - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        let expect = 2.0 - 1.5f64.sqrt() - 0.5f64.sqrt();
        assert!((kpp_weight(2) - expect).abs() < 1e-15);
        // series 1/(4n²) + 5/(64n⁴) at large n
        let n = 10_000f64;
        let series = 0.25 / (n * n) + 5.0 / (64.0 * n.powi(4));
        let rel = (kpp_weight(10_000) - series).abs() / series;
        assert!(rel < 1e-12, "rel {rel:.3e}");
    }

    #[test]
    fn comparison_crossing_at_two() {
        let cmp = weight_comparison(10_000).unwrap();
        assert!(cmp.rows[0].kpp > cmp.rows[0].op1);
        assert_eq!(cmp.first_op_exceeds_kpp, Some(2));
        for row in &cmp.rows[1..] {
            assert!(row.diff > 0.0, "n = {}", row.n);
        }
        // tail difference ≈ (9−5)/(64 n⁴)
        let last = cmp.rows.last().unwrap();
        let expect = 4.0 / (64.0 * (last.n as f64).powi(4));
        assert!((last.diff - expect).abs() < 0.05 * expect, "diff {}", last.diff);
    }
}
