//! Matrix-argument special functions: the multivariate gamma function, the
//! HCIZ integral, the confluent hypergeometric function ₁F₁ and the
//! sum-of-Wishart reflection identity.
//!
//! The Euler-type integrals over `0 < X < 1` (p×p Hermitian) are estimated
//! by rejection Monte Carlo: `X` is proposed uniformly from the box
//! `x_jj ∈ [0,1]`, `Re x_jk, Im x_jk ∈ [−1,1]`, which contains the domain,
//! and the Lebesgue measure on those coordinates is the measure `[dX]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::ensembles::sample_haar_unitary;
use crate::error::{domain, Error, Result};
use crate::linalg::{
    cholesky, eig_sorted, inverse_hpd, log_det_hpd, real_log_det, sqrt_psd, vandermonde,
    ComplexMatrix, C64,
};
use crate::mc::{combine, Accumulator, MCEstimate};
use crate::rng::{run_chunked, tags, RngStream};

/// Smallest admissible gap inside an HCIZ spectrum.
pub const HCIZ_GAP: f64 = 1e-8;

/// Largest matrix size for the rejection sampler.
pub const MAX_F1_DIM: usize = 3;

/// Acceptance rate below which rejection sampling gives up.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

/// Minimum number of Haar draws for [`hciz_monte_carlo`].
pub const MIN_HCIZ_SAMPLES: usize = 1000;

/// `ln|Γ_p(a)|` with `Γ_p(a) = π^{p(p−1)/2} ∏_{j<p} Γ(a − j)`.
pub fn ln_gamma_p(a: f64, p: usize) -> Result<f64> {
    if p == 0 {
        return domain("gamma_p needs p >= 1");
    }
    let mut acc = 0.5 * (p * (p - 1)) as f64 * PI.ln();
    for j in 0..p {
        let x = a - j as f64;
        if x <= 0.0 && x.fract() == 0.0 {
            return Err(Error::GammaPole(x));
        }
        if x <= 0.0 {
            return domain(format!("gamma_p needs a > p - 1, got a={a}, p={p}"));
        }
        acc += ln_gamma(x);
    }
    Ok(acc)
}

pub fn gamma_p(a: f64, p: usize) -> Result<f64> {
    ln_gamma_p(a, p).map(f64::exp)
}

/// Eigenvalue spectra of the two HCIZ arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HCIZInput {
    a: Vec<f64>,
    b: Vec<f64>,
}

fn min_gap(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl HCIZInput {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Shape(format!("spectra of lengths {} and {}", a.len(), b.len())));
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return domain("non-finite eigenvalue");
        }
        let gap = min_gap(&a).min(min_gap(&b));
        if gap <= HCIZ_GAP {
            return Err(Error::DegenerateSpectrum { gap });
        }
        Ok(Self { a, b })
    }

    /// Spectra of two Hermitian matrices.
    pub fn from_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        Self::new(eig_sorted(a)?, eig_sorted(b)?)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }
}

/// `(∏_{j=1}^{m} Γ(j)) det[e^{a_i b_j}] / (Δ(a)Δ(b))`, evaluated in log
/// scale with each row of the exponential matrix divided by its largest entry.
pub fn hciz_closed_form(input: &HCIZInput) -> Result<f64> {
    let (a, b, m) = (input.a(), input.b(), input.m());
    let mut shift = 0.0;
    let mut e = nalgebra::DMatrix::zeros(m, m);
    for i in 0..m {
        let r = b.iter().map(|bj| a[i] * bj).fold(f64::NEG_INFINITY, f64::max);
        shift += r;
        for j in 0..m {
            e[(i, j)] = (a[i] * b[j] - r).exp();
        }
    }
    let det = real_log_det(&e).ok_or(Error::DegenerateSpectrum { gap: 0.0 })?;
    let (va, vb) = (vandermonde(a), vandermonde(b));
    let log_norm: f64 = (1..=m).map(|j| ln_gamma(j as f64)).sum();
    let log_value = log_norm + det.log_abs + shift - va.abs().ln() - vb.abs().ln();
    let sign = det.sign * va.signum() * vb.signum();
    Ok(sign * log_value.exp())
}

fn check_hermitian_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    a.check_hermitian()?;
    b.check_hermitian()?;
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!("arguments of sizes {} and {}", a.rows(), b.rows())));
    }
    Ok(())
}

/// Sample mean of `exp(Tr(A U B U*))` over Haar unitaries `U`.
pub fn hciz_monte_carlo(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    check_hermitian_pair(a, b)?;
    if n_samples < MIN_HCIZ_SAMPLES {
        return domain(format!("hciz_monte_carlo needs at least {MIN_HCIZ_SAMPLES} samples"));
    }
    let (a, b) = (a.hermitian_part(), b.hermitian_part());
    let m = a.rows();
    let parts = run_chunked(seed, tags::HCIZ, n_samples, |rng, k| {
        let mut acc = Accumulator::new();
        for _ in 0..k {
            let u = sample_haar_unitary(m, rng);
            // U(1) commutes with 1×1 matrices.
            let rotated = if m == 1 { b.clone() } else { &(&u * &b) * &u.adjoint() };
            acc.push((&a * &rotated).trace().re.exp());
        }
        acc
    });
    Ok(combine(&parts).estimate())
}

/// Uniform proposal from the box `x_jj ∈ [0,1]`, `Re/Im x_jk ∈ [−1,1]`.
fn propose(p: usize, rng: &mut RngStream) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(p, p);
    for j in 0..p {
        x.set(j, j, C64::new(rng.uniform(), 0.0));
    }
    for j in 0..p {
        for k in j + 1..p {
            let z = C64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            x.set(j, k, z);
            x.set(k, j, z.conj());
        }
    }
    x
}

/// `log det X` and `log det(1 − X)` when `0 < X < 1`.
fn unit_interval_logdets(x: &ComplexMatrix) -> Option<(f64, f64)> {
    let p = x.rows();
    let ld = log_det_hpd(x).ok()?;
    let ld1 = log_det_hpd(&(&ComplexMatrix::identity(p) - x)).ok()?;
    Some((ld, ld1))
}

/// A point of the domain `0 < X < 1` with its log determinants.
pub struct DomainPoint<'a> {
    pub x: &'a ComplexMatrix,
    pub log_det: f64,
    pub log_det_complement: f64,
}

/// Result of a common-random-numbers comparison of two integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub lhs: MCEstimate,
    pub rhs: MCEstimate,
    /// Per-proposal difference `lhs − rhs`.
    pub difference: MCEstimate,
    pub acceptance_rate: f64,
}

impl PairedEstimate {
    /// `(lhs − rhs) / |mean of both sides|`.
    pub fn relative_residual(&self) -> f64 {
        (self.lhs.value - self.rhs.value).abs() / self.scale()
    }

    /// Standard error of the paired difference, relative to the same scale.
    pub fn combined_stderr(&self) -> f64 {
        self.difference.stderr / self.scale()
    }

    /// Residual in units of the combined standard error.
    pub fn z_score(&self) -> f64 {
        let s = self.combined_stderr();
        let r = self.relative_residual();
        if s > 0.0 {
            r / s
        } else if r == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn scale(&self) -> f64 {
        0.5 * (self.lhs.value.abs() + self.rhs.value.abs())
    }
}

/// Box volume `4^{p(p−1)/2}` of the proposal.
fn box_volume(p: usize) -> f64 {
    4f64.powi((p * (p - 1) / 2) as i32)
}

/// Rejection estimate of `∫_{0<X<1} (f(X), g(X)) [dX]` from one shared
/// stream of proposals.
pub fn unit_ball_integrals<F>(p: usize, n_samples: usize, seed: u64, tag: u32, f: F) -> Result<PairedEstimate>
where
    F: Fn(&DomainPoint) -> (f64, f64) + Sync,
{
    if p == 0 || p > MAX_F1_DIM {
        return domain(format!("matrix size must be 1..={MAX_F1_DIM}, got {p}"));
    }
    if n_samples == 0 {
        return domain("need at least one proposal");
    }
    let vol = box_volume(p);
    let parts = run_chunked(seed, tag, n_samples, |rng, k| {
        let mut acc = [Accumulator::new(), Accumulator::new(), Accumulator::new()];
        let mut accepted = 0usize;
        for _ in 0..k {
            let x = propose(p, rng);
            let (l, r) = match unit_interval_logdets(&x) {
                Some((log_det, log_det_complement)) => {
                    accepted += 1;
                    let (l, r) = f(&DomainPoint { x: &x, log_det, log_det_complement });
                    (vol * l, vol * r)
                }
                None => (0.0, 0.0),
            };
            acc[0].push(l);
            acc[1].push(r);
            acc[2].push(l - r);
        }
        (acc, accepted)
    });
    let accepted: usize = parts.iter().map(|(_, a)| a).sum();
    let rate = accepted as f64 / n_samples as f64;
    if rate < MIN_ACCEPTANCE {
        return Err(Error::RejectionStarved { rate });
    }
    let side = |i: usize| combine(parts.iter().map(|(acc, _)| &acc[i])).estimate();
    Ok(PairedEstimate { lhs: side(0), rhs: side(1), difference: side(2), acceptance_rate: rate })
}

fn check_f1_domain(a: f64, c: f64, p: usize) -> Result<()> {
    let lim = p as f64 - 1.0;
    if !(a > lim && c - a > lim) {
        return domain(format!("1F1 needs a > {lim} and c - a > {lim}, got a={a}, c={c}"));
    }
    Ok(())
}

/// `Re Tr(ΛX)`.
fn tr_prod(l: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    (l * x).trace().re
}

/// Integrand `det(X)^{α} det(1−X)^{β} e^{−Tr ΛX}` in log form.
fn euler_integrand(pt: &DomainPoint, alpha: f64, beta: f64, lambda: &ComplexMatrix) -> f64 {
    (alpha * pt.log_det + beta * pt.log_det_complement - tr_prod(lambda, pt.x)).exp()
}

/// `₁F₁(a; c; −Λ) = Γ_p(c)/(Γ_p(a)Γ_p(c−a)) ∫_{0<X<1} det(X)^{a−p} det(1−X)^{c−a−p} e^{−Tr ΛX} [dX]`
/// by rejection Monte Carlo, for Hermitian `Λ` of size `p ≤ 3`.
pub fn matrix_1f1(a: f64, c: f64, lambda: &ComplexMatrix, n_samples: usize, seed: u64) -> Result<MCEstimate> {
    lambda.check_hermitian()?;
    let p = lambda.rows();
    check_f1_domain(a, c, p)?;
    let lambda = lambda.hermitian_part();
    let pf = f1_prefactor(a, c, p)?;
    let (alpha, beta) = (a - p as f64, c - a - p as f64);
    let est = unit_ball_integrals(p, n_samples, seed, tags::F1, |pt| {
        let v = euler_integrand(pt, alpha, beta, &lambda);
        (v, v)
    })?;
    Ok(est.lhs.scaled(pf))
}

fn f1_prefactor(a: f64, c: f64, p: usize) -> Result<f64> {
    Ok((ln_gamma_p(c, p)? - ln_gamma_p(a, p)? - ln_gamma_p(c - a, p)?).exp())
}

/// Both sides of `₁F₁(a;c;−Λ) = e^{−Tr Λ} ₁F₁(c−a;c;Λ)` on common proposals.
pub fn kummer_residual(a: f64, c: f64, lambda: &ComplexMatrix, n_samples: usize, seed: u64) -> Result<PairedEstimate> {
    lambda.check_hermitian()?;
    let p = lambda.rows();
    check_f1_domain(a, c, p)?;
    check_f1_domain(c - a, c, p)?;
    let lambda = lambda.hermitian_part();
    let neg = lambda.scale(-1.0);
    let (pl, pr) = (f1_prefactor(a, c, p)?, f1_prefactor(c - a, c, p)?);
    let damp = (-lambda.trace().re).exp();
    let pf = p as f64;
    unit_ball_integrals(p, n_samples, seed, tags::F1, |pt| {
        let l = pl * euler_integrand(pt, a - pf, c - a - pf, &lambda);
        let r = damp * pr * euler_integrand(pt, c - a - pf, a - pf, &neg);
        (l, r)
    })
}

/// Both sides of the sum-of-Wishart reflection identity
///
/// `e^{−Tr WΣ_B⁻¹} ∫ det^{n_A−m}(X) det^{n_B−m}(1−X) e^{−Tr ΛX} [dX]
///  = e^{−Tr WΣ_A⁻¹} ∫ det^{n_B−m}(X) det^{n_A−m}(1−X) e^{+Tr ΛX} [dX]`,
///
/// with `Λ = √W (Σ_A⁻¹ − Σ_B⁻¹) √W` and both integrals over `0 < X < 1`.
#[allow(clippy::too_many_arguments)]
pub fn sum_wishart_symmetry_residual(
    w: &ComplexMatrix,
    sigma_a: &ComplexMatrix,
    sigma_b: &ComplexMatrix,
    n_a: usize,
    n_b: usize,
    n_samples: usize,
    seed: u64,
) -> Result<PairedEstimate> {
    let m = w.rows();
    if n_a < m || n_b < m {
        return domain(format!("need n_A, n_B >= m, got {n_a}, {n_b} with m={m}"));
    }
    cholesky(w)?;
    let (ia, ib) = (inverse_hpd(sigma_a)?, inverse_hpd(sigma_b)?);
    if ia.rows() != m || ib.rows() != m {
        return Err(Error::Shape("covariances must match W".into()));
    }
    let lambda = sum_wishart_lambda(w, sigma_a, sigma_b)?;
    let neg = lambda.scale(-1.0);
    let ea = (-tr_prod(&ia, w)).exp();
    let eb = (-tr_prod(&ib, w)).exp();
    let (da, db) = ((n_a - m) as f64, (n_b - m) as f64);
    unit_ball_integrals(m, n_samples, seed, tags::SUM_WISHART, |pt| {
        let l = eb * euler_integrand(pt, da, db, &lambda);
        let r = ea * euler_integrand(pt, db, da, &neg);
        (l, r)
    })
}

/// `Λ = √W (Σ_A⁻¹ − Σ_B⁻¹) √W`.
pub fn sum_wishart_lambda(w: &ComplexMatrix, sigma_a: &ComplexMatrix, sigma_b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let root = sqrt_psd(w)?;
    let diff = &inverse_hpd(sigma_a)? - &inverse_hpd(sigma_b)?;
    Ok((&(&root * &diff) * &root).hermitian_part())
}
