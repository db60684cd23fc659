//! Criticality diagnostics: energy functionals and their ground-state
//! representation, logarithmic null-sequences and their energy decay,
//! null-criticality partial sums, and Hardy-constant estimation through
//! truncated Dirichlet sections of the weighted eigenproblem.

use crate::error::{Error, Result};
use crate::hardy_weights::{hardy_weight_table, WeightSpec};
use crate::kernel::{
    kernel_row_scan, kernel_section_windowed, quadratic_form_paths, FracExponent, LatticeFunction,
    SymMatrix, TruncationPolicy,
};
use crate::riesz::{riesz_table, RieszIndex};

/// How an energy value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    Direct,
    GraphForm,
    Simplified,
}

/// An energy value together with the bound on whatever tail was truncated.
#[derive(Debug, Clone, Copy)]
pub struct EnergyReport {
    pub value: f64,
    pub truncation_tail: f64,
    pub method: EnergyMethod,
}

/// Smallest eigenvalue of a windowed weighted section, with provenance.
#[derive(Debug, Clone, Copy)]
pub struct EigenEstimate {
    pub window_start: usize,
    pub window_len: usize,
    pub lambda_min: f64,
    pub iterations: u32,
}

/// The logarithmic cutoff family: 1 up to k, a log ramp from 1 down to 0 on
/// (k, k²], and 0 beyond. Normalized at the origin site for every k.
pub fn null_sequence(k: usize, n: usize) -> f64 {
    assert!(k >= 2, "null_sequence needs k >= 2");
    assert!(n >= 1);
    if n <= k {
        1.0
    } else if n <= k * k {
        2.0 - (n as f64).ln() / (k as f64).ln()
    } else {
        0.0
    }
}

/// The cutoff family materialized as a finitely supported function on 1..=k².
pub fn null_sequence_function(k: usize) -> LatticeFunction {
    let values: Vec<f64> = (1..=k * k).map(|n| null_sequence(k, n)).collect();
    LatticeFunction::new(1, values).expect("support starts at 1")
}

/// Energy of φ against the operator minus a multiplication weight:
/// ⟨φ, ((−Δ)^σ − W) φ⟩. The operator part is the direct quadratic form,
/// cross-checked against the graph form within its certified truncation
/// tail; the weight part is a finite sum.
pub fn energy_functional<W: Fn(usize) -> f64>(
    sigma: FracExponent,
    weight: W,
    phi: &LatticeFunction,
    _policy: &TruncationPolicy,
) -> Result<EnergyReport> {
    let (direct, graph, tail) = quadratic_form_paths(sigma, phi)?;
    let tol = tail + 1e-8 * direct.abs().max(1.0);
    if (direct - graph).abs() > tol {
        return Err(Error::InternalInconsistency(format!(
            "quadratic form paths disagree: direct {direct}, graph {graph}, certified tol {tol:.3e}"
        )));
    }
    let weighted: f64 = phi.iter().map(|(n, v)| weight(n) * v * v).sum();
    Ok(EnergyReport { value: direct - weighted, truncation_tail: tail, method: EnergyMethod::GraphForm })
}

/// The simplified energy
///   Q_α^σ(φ) = (1/2) ΣΣ (−K̃^σ_{m,n}) I_α(n) I_α(m) (φ(n) − φ(m))²,
/// truncating the unbounded index at the policy cutoff (at least twice the
/// support) with a calibrated tail bound. The summand decays like
/// m^{2α−2−2σ−1} for fixed n, summable because α < 1 + σ.
pub fn simplified_energy(
    sigma: FracExponent,
    alpha: RieszIndex,
    phi: &LatticeFunction,
    policy: &TruncationPolicy,
) -> Result<EnergyReport> {
    let s = sigma.sigma();
    let a = alpha.alpha();
    let e = 2.0 * a - 2.0;
    if e - 2.0 * s - 1.0 > -1.0 - policy.tail_exponent_margin {
        return Err(Error::PolicyRejected(format!(
            "pair-sum exponent {} not summable against kernel decay 2σ+1 = {}",
            e,
            2.0 * s + 1.0
        )));
    }
    let supp_end = phi.support_end();
    if supp_end == 0 {
        return Ok(EnergyReport { value: 0.0, truncation_tail: 0.0, method: EnergyMethod::Simplified });
    }
    let m_cut = policy.n_max.max(2 * supp_end).max(64);
    let riesz = riesz_table(alpha, m_cut);

    // ordered pairs n < m, which absorbs the 1/2 of the symmetric double sum
    let mut sum = 0.0;
    let mut comp = 0.0; // Neumaier compensation
    let mut c_kernel: f64 = 0.0;
    for n in 1..=supp_end {
        let phi_n = phi.value(n);
        let in_ = riesz[n - 1];
        let calibrate = n == supp_end;
        kernel_row_scan(sigma, n, m_cut, |m, k| {
            if m <= n {
                return;
            }
            let diff = phi_n - phi.value(m);
            if diff != 0.0 {
                let term = -k * in_ * riesz[m - 1] * diff * diff;
                let t = sum + term;
                if sum.abs() >= term.abs() {
                    comp += (sum - t) + term;
                } else {
                    comp += (term - t) + sum;
                }
                sum = t;
            }
            if calibrate && m >= m_cut / 2 {
                c_kernel = c_kernel.max(k.abs() * ((m - n) as f64).powf(2.0 * s + 1.0));
            }
        });
    }
    let value = sum + comp;

    // tail over m > m_cut: only (φ(n) − 0)² terms survive
    let mut c_riesz: f64 = 0.0;
    for m in m_cut / 2..=m_cut {
        c_riesz = c_riesz.max(riesz[m - 1] / (m as f64).powf(e));
    }
    let weighted_support: f64 = phi.iter().map(|(n, v)| v * v * riesz[n - 1]).sum();
    let tail = weighted_support
        * 4.0
        * c_kernel
        * c_riesz
        * 2f64.powf(2.0 * s + 1.0)
        * (m_cut as f64).powf(e - 2.0 * s)
        / (2.0 * s - e);
    if tail > policy.tail_tol {
        return Err(Error::PolicyRejected(format!(
            "pair-sum tail bound {tail:.3e} exceeds tail_tol {:.3e} at cutoff {m_cut}",
            policy.tail_tol
        )));
    }
    Ok(EnergyReport { value, truncation_tail: tail, method: EnergyMethod::Simplified })
}

/// Residual of the ground-state representation: the energy of φ against the
/// weight W_{α,σ} must equal the simplified energy of φ/I_α.
#[derive(Debug, Clone, Copy)]
pub struct GsrReport {
    pub residual: f64,
    pub combined_tail: f64,
}

pub fn gsr_residual_report(
    sigma: FracExponent,
    alpha: RieszIndex,
    phi: &LatticeFunction,
    policy: &TruncationPolicy,
) -> Result<GsrReport> {
    let spec = WeightSpec::new(sigma.sigma(), alpha.alpha())?;
    let supp_end = phi.support_end();
    if supp_end == 0 {
        return Ok(GsrReport { residual: 0.0, combined_tail: 0.0 });
    }
    let weights = hardy_weight_table(&spec, supp_end)?;
    let lhs = energy_functional(sigma, |n| weights[n - 1], phi, policy)?;
    let riesz = riesz_table(alpha, supp_end);
    let divided: Vec<f64> = phi.iter().map(|(n, v)| v / riesz[n - 1]).collect();
    let psi = LatticeFunction::new(phi.support_start(), divided)?;
    let rhs = simplified_energy(sigma, alpha, &psi, policy)?;
    Ok(GsrReport {
        residual: (lhs.value - rhs.value).abs(),
        combined_tail: lhs.truncation_tail + rhs.truncation_tail,
    })
}

/// Convenience wrapper returning just the residual.
pub fn gsr_residual(
    sigma: FracExponent,
    alpha: RieszIndex,
    phi: &LatticeFunction,
    policy: &TruncationPolicy,
) -> Result<f64> {
    Ok(gsr_residual_report(sigma, alpha, phi, policy)?.residual)
}

/// Simplified energies of the cutoff family along a list of k values.
pub fn null_energy_curve(
    sigma: FracExponent,
    alpha: RieszIndex,
    k_list: &[usize],
    policy: &TruncationPolicy,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let phi = null_sequence_function(k);
        let per_k = TruncationPolicy {
            n_max: policy.n_max.max(64 * k * k),
            tail_tol: policy.tail_tol,
            tail_exponent_margin: policy.tail_exponent_margin,
        };
        let report = simplified_energy(sigma, alpha, &phi, &per_k)?;
        out.push((k, report.value));
    }
    Ok(out)
}

/// Partial sum S(N) = Σ_{n≤N} I_α(n)² W_{α,σ}(n) = Σ_{n≤N} I_α(n) I_{α−σ}(n);
/// diverges logarithmically at the critical α and converges below it.
pub fn null_criticality_sum(spec: &WeightSpec, n: usize) -> f64 {
    let a = RieszIndex::new(spec.alpha()).expect("alpha admissible");
    let b = RieszIndex::new(spec.alpha() - spec.sigma()).expect("alpha - sigma admissible");
    let ta = riesz_table(a, n);
    let tb = riesz_table(b, n);
    let mut s = 0.0;
    for i in 0..n {
        s += ta[i] * tb[i];
    }
    s
}

/// Householder tridiagonalization of a symmetric matrix, in place; returns
/// the diagonal and subdiagonal of the similar tridiagonal matrix.
fn tridiagonalize(a: &mut SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            let t = a.get(i, k);
            v[i] = t;
            xnorm2 += t * t;
        }
        if xnorm2 == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let xnorm = xnorm2.sqrt();
        let alpha = if v[k + 1] >= 0.0 { -xnorm } else { xnorm };
        v[k + 1] -= alpha;
        let mut vtv = 0.0;
        for i in k + 1..n {
            vtv += v[i] * v[i];
        }
        let beta = 2.0 / vtv;
        // w = β A v − (β² vᵀAv / 2) v on the trailing block
        let data = a.data_mut();
        for i in k + 1..n {
            let row = &data[i * n + k + 1..i * n + n];
            let mut s = 0.0;
            for (j, &aij) in row.iter().enumerate() {
                s += aij * v[k + 1 + j];
            }
            w[i] = beta * s;
        }
        let mut pv = 0.0;
        for i in k + 1..n {
            pv += w[i] * v[i];
        }
        let c = 0.5 * beta * pv;
        for i in k + 1..n {
            w[i] -= c * v[i];
        }
        for i in k + 1..n {
            let vi = v[i];
            let wi = w[i];
            let row = &mut data[i * n..(i + 1) * n];
            for j in k + 1..n {
                row[j] -= vi * w[j] + wi * v[j];
            }
        }
        e[k] = alpha;
    }
    if n >= 2 {
        e[n - 2] = a.get(n - 1, n - 2);
    }
    let d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    (d, e)
}

/// Number of eigenvalues of the tridiagonal (d, e) strictly below x, by the
/// Sturm-sequence sign count of the LDLᵀ pivots.
fn sturm_count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..d.len() {
        let off2 = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - off2 / q;
        if q < 0.0 {
            count += 1;
        }
        if q == 0.0 {
            q = 1e-300;
        }
    }
    count
}

fn eigen_min_tridiagonal(d: &[f64], e: &[f64]) -> (f64, u32) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut norm = 0.0f64;
    for i in 0..n {
        let r = if n == 1 {
            0.0
        } else if i == 0 {
            e[0].abs()
        } else if i == n - 1 {
            e[n - 2].abs()
        } else {
            e[i - 1].abs() + e[i].abs()
        };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
        norm = norm.max(d[i].abs() + r);
    }
    let tol = 1e-13 * norm.max(f64::MIN_POSITIVE);
    let mut iterations = 0u32;
    while hi - lo > tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count_below(d, e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), iterations)
}

/// Smallest eigenvalue of a dense symmetric matrix: Householder reduction to
/// tridiagonal form, then bisection on the Sturm sequence. Deterministic.
pub fn symmetric_eigen_min(a: &SymMatrix) -> f64 {
    let mut work = a.clone();
    let (d, e) = tridiagonalize(&mut work);
    eigen_min_tridiagonal(&d, &e).0
}

/// Smallest eigenvalue of the weighted Dirichlet section on the window
/// [window_start, window_start + n): with D = diag(j^{−2σ}), the matrix is
/// D^{−1/2} K D^{−1/2}, i.e. entries j^σ K_{i,j} i^σ at absolute indices.
/// This is the Rayleigh-quotient infimum over functions supported in the
/// window, hence an upper bound on the best Hardy constant for the weight
/// n^{−2σ} (and, for windows away from 1, on the constant at infinity).
pub fn hardy_constant_estimate(
    sigma: FracExponent,
    n: usize,
    window_start: usize,
) -> Result<EigenEstimate> {
    if n < 2 {
        return Err(Error::Domain("estimate needs N >= 2".into()));
    }
    if !sigma.graph_representable() {
        return Err(Error::Domain(format!(
            "hardy_constant_estimate needs sigma <= 1, got {}",
            sigma.sigma()
        )));
    }
    let mut b = kernel_section_windowed(sigma, window_start, n, false)?;
    let s = sigma.sigma();
    let scale: Vec<f64> = (0..n).map(|i| ((window_start + i) as f64).powf(s)).collect();
    {
        let data = b.data_mut();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] *= scale[i] * scale[j];
            }
        }
    }
    let (d, e) = tridiagonalize(&mut b);
    let (lambda_min, iterations) = eigen_min_tridiagonal(&d, &e);
    Ok(EigenEstimate { window_start, window_len: n, lambda_min, iterations })
}
