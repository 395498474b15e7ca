//! Goodness-of-fit harness linking samplers to reference laws.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use crate::ensembles::{
    draw_batch, logdensity_eigs, sample_haar_unitary, sample_induced_state, sample_sum_wishart,
    sample_wishart, EigenKind, SumWishart, Wishart,
};
use crate::error::{domain, Error, Result};
use crate::linalg::{eig_sorted, ComplexMatrix};
use crate::mc::{Accumulator, MCEstimate};
use crate::quad::Quadrature;
use crate::rng::{tags, RngStream};

/// Significance level of every suite.
pub const ALPHA: f64 = 0.01;

/// Smallest sample accepted by the KS tests.
pub const MIN_KS_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KSResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi-theta form, fast for small x.
        let c = std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (1..=8).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * x * x).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value with Stephens' finite-sample correction.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let r = n_eff.sqrt();
    kolmogorov_sf((r + 0.12 + 0.11 / r) * d)
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return domain("NaN in sample");
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// One-sample two-sided Kolmogorov–Smirnov test.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KSResult> {
    let n = samples.len();
    if n < MIN_KS_SAMPLES {
        return domain(format!("KS test needs at least {MIN_KS_SAMPLES} samples, got {n}"));
    }
    let s = sorted(samples)?;
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    Ok(KSResult { statistic: d, p_value: ks_p_value(d, nf), n })
}

/// Two-sample Kolmogorov–Smirnov test; `n` is the effective size `nm/(n+m)`, rounded.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<KSResult> {
    if x.len() < MIN_KS_SAMPLES || y.len() < MIN_KS_SAMPLES {
        return domain(format!("KS test needs at least {MIN_KS_SAMPLES} samples per side"));
    }
    let (a, b) = (sorted(x)?, sorted(y)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    Ok(KSResult { statistic: d, p_value: ks_p_value(d, n_eff), n: n_eff.round() as usize })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return domain("histogram edges must be strictly increasing");
        }
        let bins = edges.len() - 1;
        Ok(Self { edges, counts: vec![0; bins], total: 0 })
    }

    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return domain("histogram needs at least one bin");
        }
        Self::new((0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect())
    }

    /// Adds a value; values outside the edges are counted in `total` only.
    pub fn add(&mut self, x: f64) {
        self.total += 1;
        let last = *self.edges.last().expect("edges");
        if x < self.edges[0] || x > last || x.is_nan() {
            return;
        }
        let k = self.edges.partition_point(|&e| e <= x).saturating_sub(1);
        let last_bin = self.counts.len() - 1;
        self.counts[k.min(last_bin)] += 1;
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, xs: I) {
        for x in xs {
            self.add(x);
        }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Count per unit length divided by `total`.
    pub fn density(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, w)| c as f64 / (t * (w[1] - w[0])))
            .collect()
    }

    /// `bin_lo,bin_hi,count,density` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,density\n");
        for ((w, c), d) in self.edges.windows(2).zip(&self.counts).zip(self.density()) {
            out.push_str(&format!("{:.16e},{:.16e},{c},{d:.16e}\n", w[0], w[1]));
        }
        out
    }
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Law of `λ_max` for a 2×2 unitary-invariant ensemble. The CDF is tabulated
/// on a grid and interpolated by cubic Hermite splines; the density is exact.
#[derive(Clone)]
pub struct Marginal {
    raw: Density,
    knots: Vec<f64>,
    cdf: Vec<f64>,
    /// Mass of the unnormalized density over the support.
    pub normalization: f64,
}

impl fmt::Debug for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Marginal")
            .field("support", &self.support())
            .field("knots", &self.knots.len())
            .field("normalization", &self.normalization)
            .finish()
    }
}

const MARGINAL_PANELS: usize = 2000;

/// Tail mass, relative to the total, below which the Wishart support stops growing.
pub const TAIL_TOL: f64 = 1e-10;

fn fine_quadrature() -> Quadrature {
    Quadrature { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 200 }
}

impl Marginal {
    fn tabulate(raw: Density, lo: f64, hi: f64) -> Self {
        let q = fine_quadrature();
        let h = (hi - lo) / MARGINAL_PANELS as f64;
        let knots: Vec<f64> = (0..=MARGINAL_PANELS).map(|k| lo + h * k as f64).collect();
        let mut cdf = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in knots.windows(2) {
            acc += q.integrate(&*raw, w[0], w[1]).value;
            cdf.push(acc);
        }
        let cdf = cdf.into_iter().map(|c| c / acc).collect();
        Self { raw, knots, cdf, normalization: acc }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("knots"))
    }

    pub fn density(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t > lo && t < hi {
            (self.raw)(t) / self.normalization
        } else {
            0.0
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return 1.0;
        }
        let h = self.knots[1] - self.knots[0];
        let k = (((t - lo) / h) as usize).min(self.knots.len() - 2);
        let s = (t - self.knots[k]) / h;
        let (y0, y1) = (self.cdf[k], self.cdf[k + 1]);
        let (d0, d1) = (self.density(self.knots[k]) * h, self.density(self.knots[k + 1]) * h);
        let (s2, s3) = (s * s, s * s * s);
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        v.clamp(0.0, 1.0)
    }

    /// `∫ g(t) ρ(t) dt` over the support.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let hi = self.support().1;
        let mut pts: Vec<f64> = self.knots.iter().step_by(100).copied().chain([hi]).collect();
        pts.dedup();
        fine_quadrature().integrate_points(|t| g(t) * self.density(t), &pts).value
    }

    /// `∫ ρ` over the support.
    pub fn total_mass(&self) -> f64 {
        self.expectation(|_| 1.0)
    }
}

/// Joint density at `(x, y)`, zero where the log density is undefined.
fn joint(lambda: &[f64], kind: EigenKind) -> f64 {
    logdensity_eigs(lambda, kind, 2).map(f64::exp).unwrap_or(0.0)
}

/// Marginal law of the largest eigenvalue for m = 2.
pub fn marginal_from_joint_m2(kind: EigenKind) -> Result<Marginal> {
    let n = kind.n();
    if n < 2 {
        return domain(format!("m = 2 marginal needs n >= 2, got {n}"));
    }
    match kind {
        EigenKind::Induced { .. } => {
            Ok(Marginal::tabulate(Arc::new(move |t| joint(&[t, 1.0 - t], kind)), 0.5, 1.0))
        }
        EigenKind::Wishart { .. } => {
            let f = move |t: f64| {
                if t <= 0.0 {
                    0.0
                } else {
                    fine_quadrature().integrate(|y| joint(&[t, y], kind), 0.0, t).value
                }
            };
            let q = fine_quadrature();
            // Start from n + 10√n and grow until the tail beyond T is negligible.
            let mut t_max = n as f64 + 10.0 * (n as f64).sqrt();
            loop {
                let body = q.integrate(f, 0.0, t_max).value;
                let tail = q.integrate(f, t_max, 2.0 * t_max).value;
                if tail <= TAIL_TOL * body {
                    break;
                }
                t_max *= 1.25;
            }
            Ok(Marginal::tabulate(Arc::new(f), 0.0, t_max))
        }
    }
}

/// `E[Tr W^k]` with standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub power: u32,
    pub estimate: MCEstimate,
}

pub fn moment_report(samples: &[ComplexMatrix], powers: &[u32]) -> Result<Vec<MomentRow>> {
    if samples.is_empty() {
        return domain("moment report needs at least one sample");
    }
    let rows = powers
        .iter()
        .map(|&k| {
            let acc: Accumulator = samples
                .iter()
                .map(|w| {
                    let mut p = ComplexMatrix::identity(w.rows());
                    for _ in 0..k {
                        p = &p * w;
                    }
                    p.trace().re
                })
                .collect();
            MomentRow { power: k, estimate: acc.estimate() }
        })
        .collect();
    Ok(rows)
}

/// End-to-end statistical checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Suite {
    /// Scalar Wishart draws against Gamma(n, 1).
    WishartM1 { n: usize },
    /// `λ_max` of 2×2 induced states against the density marginal.
    InducedM2 { n: usize },
    /// Sum of `k` Wishart(m, n) against Wishart(m, kn), per sorted eigenvalue.
    SumEquivalence { m: usize, n: usize, k: usize },
    /// `|U_11|²` against Beta(1, m−1), and left-invariance under a fixed unitary.
    Haar { m: usize },
}

impl Suite {
    pub const NAMES: [&'static str; 4] = ["wishart-m1", "induced-m2", "sum-equivalence", "haar"];

    /// Suite by name; `n` overrides the default dimension parameter.
    pub fn from_name(name: &str, n: Option<usize>) -> Result<Self> {
        let suite = match name {
            "wishart-m1" => Suite::WishartM1 { n: n.unwrap_or(3) },
            "induced-m2" => Suite::InducedM2 { n: n.unwrap_or(2) },
            "sum-equivalence" => Suite::SumEquivalence { m: 2, n: n.unwrap_or(2), k: 2 },
            "haar" => Suite::Haar { m: n.unwrap_or(3) },
            other => return Err(Error::UnknownSuite(other.to_string())),
        };
        Ok(suite)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::WishartM1 { .. } => "wishart-m1",
            Suite::InducedM2 { .. } => "induced-m2",
            Suite::SumEquivalence { .. } => "sum-equivalence",
            Suite::Haar { .. } => "haar",
        }
    }

    fn references(&self) -> Vec<String> {
        let r: &[&str] = match self {
            Suite::WishartM1 { .. } => &["complex Wishart density det^(n-m)(W) exp(-Tr W)"],
            Suite::InducedM2 { .. } => &[
                "induced-state eigenvalue density delta(1-sum l) prod l^(n-m) prod (l_i-l_j)^2",
            ],
            Suite::SumEquivalence { .. } => &[
                "sum of independent Wishart matrices with common covariance is Wishart with summed degrees",
            ],
            Suite::Haar { .. } => &["Haar measure on U(m): first column uniform on the unit sphere"],
        };
        r.iter().map(|s| s.to_string()).collect()
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s, None)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One named KS comparison inside a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub ks: KSResult,
}

/// JSON-ready outcome of a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub suite: String,
    pub parameters: Suite,
    pub seed: u64,
    pub n_samples: usize,
    /// Largest KS statistic over the checks.
    pub statistic: f64,
    /// Smallest p-value over the checks.
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub moments: Vec<(String, MCEstimate)>,
    pub references: Vec<String>,
}

fn batch<T: Send, F: Fn(&mut RngStream) -> T + Sync>(n: usize, seed: u64, tag: u32, f: F) -> Vec<T> {
    draw_batch(n, seed, tag, f)
}

fn component(spectra: &[Vec<f64>], k: usize) -> Vec<f64> {
    spectra.iter().map(|s| s[k]).collect()
}

pub fn verify_suite(suite: Suite, n_samples: usize, seed: u64) -> Result<Verdict> {
    let mut checks = Vec::new();
    let mut moments = Vec::new();
    match suite {
        Suite::WishartM1 { n } => {
            let w = Wishart::standard(1, n)?;
            let xs = batch(n_samples, seed, tags::VERIFY, |r| sample_wishart(&w, r).get(0, 0).re);
            let gamma = Gamma::new(n as f64, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
            checks.push(Check { label: format!("W vs Gamma({n}, 1)"), ks: ks_test(&xs, |x| gamma.cdf(x))? });
            let acc: Accumulator = xs.iter().copied().collect();
            moments.push(("E[W]".to_string(), acc.estimate()));
        }
        Suite::InducedM2 { n } => {
            if n < 2 {
                return domain("induced-m2 needs n >= 2");
            }
            let spectra = batch(n_samples, seed, tags::VERIFY, |r| {
                eig_sorted(&sample_induced_state(2, n, r).expect("m <= n")).expect("hermitian")
            });
            let marginal = marginal_from_joint_m2(EigenKind::Induced { n })?;
            let top = component(&spectra, 0);
            checks.push(Check { label: "lambda_max vs density marginal".into(), ks: ks_test(&top, |t| marginal.cdf(t))? });
            let acc: Accumulator = spectra.iter().map(|s| s.iter().map(|l| l * l).sum()).collect();
            moments.push(("E[Tr rho^2]".to_string(), acc.estimate()));
        }
        Suite::SumEquivalence { m, n, k } => {
            if k == 0 {
                return domain("sum-equivalence needs k >= 1");
            }
            let term = Wishart::standard(m, n)?;
            let sum = SumWishart::new(vec![term; k])?;
            let single = Wishart::standard(m, k * n)?;
            let a = batch(n_samples, seed, tags::VERIFY, |r| {
                eig_sorted(&sample_sum_wishart(&sum, r)).expect("hermitian")
            });
            let b = batch(n_samples, seed, tags::REFERENCE, |r| {
                eig_sorted(&sample_wishart(&single, r)).expect("hermitian")
            });
            for j in 0..m {
                let ks = ks_two_sample(&component(&a, j), &component(&b, j))?;
                checks.push(Check { label: format!("lambda_{} sum vs Wishart({m}, {})", j + 1, k * n), ks });
            }
            let tr: Accumulator = a.iter().map(|s| s.iter().sum()).collect();
            moments.push(("E[Tr W] (sum)".to_string(), tr.estimate()));
        }
        Suite::Haar { m } => {
            if m == 0 {
                return domain("haar needs m >= 1");
            }
            let xs = batch(n_samples, seed, tags::VERIFY, |r| sample_haar_unitary(m, r).get(0, 0).norm_sqr());
            let beta = |x: f64| if m == 1 { if x < 1.0 { 0.0 } else { 1.0 } } else { 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(m as i32 - 1) };
            if m > 1 {
                checks.push(Check { label: format!("|U11|^2 vs Beta(1, {})", m - 1), ks: ks_test(&xs, beta)? });
                let v = sample_haar_unitary(m, &mut RngStream::for_chunk(seed, tags::REFERENCE, u32::MAX));
                let ys = batch(n_samples, seed, tags::REFERENCE, |r| (&v * &sample_haar_unitary(m, r)).get(0, 0).norm_sqr());
                checks.push(Check { label: "|(VU)11|^2 vs |U11|^2".into(), ks: ks_two_sample(&ys, &xs)? });
            }
            let acc: Accumulator = xs.iter().copied().collect();
            moments.push(("E|U11|^2".to_string(), acc.estimate()));
        }
    }
    let statistic = checks.iter().map(|c| c.ks.statistic).fold(0.0, f64::max);
    let p_value = checks.iter().map(|c| c.ks.p_value).fold(1.0, f64::min);
    let pass = checks.iter().all(|c| c.ks.passes(ALPHA));
    Ok(Verdict {
        suite: suite.name().to_string(),
        parameters: suite,
        seed,
        n_samples,
        statistic,
        p_value,
        alpha: ALPHA,
        pass,
        checks,
        moments,
        references: suite.references(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn uniforms(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        (0..n).map(|_| rng.uniform()).collect()
    }

    #[test]
    fn kolmogorov_tail_reference_values() {
        // Classical critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
        assert_abs_diff_eq!(kolmogorov_sf(1.3581), 0.05, epsilon = 1e-4);
        assert_abs_diff_eq!(kolmogorov_sf(1.6276), 0.01, epsilon = 1e-4);
        // Both series agree where they meet.
        let x = 1.18;
        let c = std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let theta: f64 = 1.0 - (2.0 * std::f64::consts::PI).sqrt() / x
            * (1..=8).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum::<f64>();
        assert_abs_diff_eq!(theta, kolmogorov_sf(x), epsilon = 1e-12);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn ks_calibration_and_power() {
        let mut rejections = 0;
        for rep in 0..200 {
            let r = ks_test(&uniforms(10_000, rep), |x| x.clamp(0.0, 1.0)).unwrap();
            if !r.passes(0.01) {
                rejections += 1;
            }
        }
        // 1% ± 1% of 200.
        assert!(rejections <= 4, "{rejections} rejections");
        let shifted: Vec<f64> = uniforms(10_000, 999).iter().map(|x| x + 0.05).collect();
        assert!(ks_test(&shifted, |x| x.clamp(0.0, 1.0)).unwrap().p_value < 1e-6);
        assert!(ks_test(&[0.5], |x| x).is_err());
    }

    #[test]
    fn ks_statistic_by_hand() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let r = ks_test(&xs, |x| x).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.005, epsilon = 1e-15);
        let r = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(r.statistic, 0.0);
        let ys: Vec<f64> = xs.iter().map(|x| x + 10.0).collect();
        assert_eq!(ks_two_sample(&xs, &ys).unwrap().statistic, 1.0);
    }

    #[test]
    fn histogram_counts_and_density() {
        let mut h = Histogram::uniform(0.0, 1.0, 4).unwrap();
        h.extend([0.1, 0.3, 0.3, 0.99, 1.0, 2.0]);
        assert_eq!(h.counts(), &[1, 2, 0, 2]);
        assert_eq!(h.total(), 6);
        let mut h = Histogram::uniform(0.0, 1.0, 10).unwrap();
        h.extend(uniforms(1000, 3));
        let mass: f64 = h.density().iter().map(|d| d * 0.1).sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
        assert_eq!(h.counts().iter().sum::<u64>(), h.total());
        assert!(Histogram::new(vec![0.0, 0.0, 1.0]).is_err());
        assert!(h.to_csv().starts_with("bin_lo,bin_hi,count,density\n"));
    }

    #[test]
    fn induced_marginal_examples() {
        let m = marginal_from_joint_m2(EigenKind::Induced { n: 2 }).unwrap();
        // Normalized density 24(t - 1/2)² on [1/2, 1).
        assert_abs_diff_eq!(m.density(0.5 + 1e-9), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.density(0.8), 24.0 * 0.09, epsilon = 1e-9);
        assert_abs_diff_eq!(m.cdf(0.75), 1.0 / 8.0, epsilon = 1e-12);
        assert_eq!(m.cdf(1.0), 1.0);
        assert_abs_diff_eq!(m.cdf(1.0 - 1e-12), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-10);
        let purity = m.expectation(|t| t * t + (1.0 - t) * (1.0 - t));
        assert_abs_diff_eq!(purity, 0.8, epsilon = 1e-10);
    }

    #[test]
    fn wishart_marginal_normalized() {
        let m = marginal_from_joint_m2(EigenKind::Wishart { n: 2 }).unwrap();
        assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-10);
        // E[λ1 + λ2] = mn = 4; E[λ_max] lies between 2 and 4.
        let mean = m.expectation(|t| t);
        assert!(mean > 2.0 && mean < 4.0);
        assert!(m.support().1 > 2.0 + 10.0 * 2f64.sqrt());
        assert!(marginal_from_joint_m2(EigenKind::Wishart { n: 1 }).is_err());
    }

    #[test]
    fn moment_report_examples() {
        let rhos: Vec<ComplexMatrix> =
            batch(20_000, 4, tags::SAMPLE, |r| sample_induced_state(2, 2, r).unwrap());
        let rows = moment_report(&rhos, &[1, 2]).unwrap();
        assert_abs_diff_eq!(rows[0].estimate.value, 1.0, epsilon = 1e-14);
        assert!(rows[1].estimate.within(0.8, 3.0));
        let w = Wishart::standard(2, 3).unwrap();
        let ws: Vec<ComplexMatrix> = batch(20_000, 5, tags::SAMPLE, |r| sample_wishart(&w, r));
        assert!(moment_report(&ws, &[1]).unwrap()[0].estimate.within(6.0, 3.0));
        assert!(moment_report(&[], &[1]).is_err());
    }

    #[test]
    fn moment_stderr_halves_when_sample_quadruples() {
        let w = Wishart::standard(2, 3).unwrap();
        let ws: Vec<ComplexMatrix> = batch(40_000, 6, tags::SAMPLE, |r| sample_wishart(&w, r));
        let small = moment_report(&ws[..10_000], &[1]).unwrap()[0].estimate.stderr;
        let large = moment_report(&ws, &[1]).unwrap()[0].estimate.stderr;
        let ratio = small / large;
        // The ratio of stderr estimates concentrates near 2 with spread ≈ 2·√(Var/N).
        assert!((ratio - 2.0).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn suites_by_name() {
        assert_eq!(Suite::from_name("wishart-m1", None).unwrap(), Suite::WishartM1 { n: 3 });
        assert_eq!("haar".parse::<Suite>().unwrap(), Suite::Haar { m: 3 });
        assert_eq!(Suite::from_name("bogus", None), Err(Error::UnknownSuite("bogus".into())));
        for name in Suite::NAMES {
            assert_eq!(Suite::from_name(name, None).unwrap().name(), name);
        }
    }

    #[test]
    fn haar_suite_passes_and_is_deterministic() {
        let v = verify_suite(Suite::Haar { m: 3 }, 5000, 21).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.checks.len(), 2);
        let again = verify_suite(Suite::Haar { m: 3 }, 5000, 21).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&again).unwrap());
    }

    proptest! {
        #[test]
        fn ks_statistic_in_unit_interval(seed in any::<u64>()) {
            let r = ks_test(&uniforms(200, seed), |x| x * x).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.statistic));
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }
}
