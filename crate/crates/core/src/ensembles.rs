//! Random matrix ensembles: samplers and unnormalized log densities.
//!
//! Complex Gaussian entries follow the convention `E|z|² = 1`, i.e. the
//! density `π^{−mn} exp(−Tr ZZ*)` for an m×n Ginibre matrix `Z`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{
    cholesky, eig_sorted, inverse_hpd, log_det_hpd, min_eigenvalue, sqrt_psd, vandermonde,
    ComplexMatrix, C64,
};
use crate::rng::{run_chunked, tags, RngStream};

/// Minimum eigenvalue a covariance must exceed.
pub const PD_FLOOR: f64 = 1e-10;

/// Tolerance on `Σλ = 1` for induced-state spectra.
pub const SIMPLEX_TOL: f64 = 1e-10;

pub fn sample_ginibre(m: usize, n: usize, rng: &mut RngStream) -> ComplexMatrix {
    let entries = (0..m * n).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::new(m, n, entries).expect("positive ginibre shape")
}

/// Haar unitary from the QR factorization of a square Ginibre matrix, with
/// the phases of `diag(R)` moved into `Q`.
pub fn sample_haar_unitary(m: usize, rng: &mut RngStream) -> ComplexMatrix {
    let z = sample_ginibre(m, m, rng).into_dmatrix();
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q)
}

fn check_covariance(sigma: &ComplexMatrix, m: usize) -> Result<()> {
    if sigma.rows() != m || sigma.cols() != m {
        return Err(Error::Shape(format!(
            "covariance is {}x{}, expected {m}x{m}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    if min_eigenvalue(sigma)? <= PD_FLOOR {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// Complex Wishart law `W = Σ^{1/2} ZZ* Σ^{1/2}`, `Z` Ginibre m×n.
#[derive(Clone, Debug, PartialEq)]
pub struct Wishart {
    m: usize,
    n: usize,
    sigma: ComplexMatrix,
    /// `None` when `Σ` is exactly the identity.
    root: Option<ComplexMatrix>,
}

impl Wishart {
    pub fn new(m: usize, n: usize, sigma: ComplexMatrix) -> Result<Self> {
        if m == 0 || n < m {
            return domain(format!("wishart needs 1 <= m <= n, got m={m}, n={n}"));
        }
        check_covariance(&sigma, m)?;
        let root = if sigma == ComplexMatrix::identity(m) { None } else { Some(sqrt_psd(&sigma)?) };
        Ok(Self { m, n, sigma, root })
    }

    pub fn standard(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, ComplexMatrix::identity(m))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }
}

pub fn sample_wishart(w: &Wishart, rng: &mut RngStream) -> ComplexMatrix {
    let z = sample_ginibre(w.m, w.n, rng);
    let zz = &z * &z.adjoint();
    match &w.root {
        None => zz.hermitian_part(),
        Some(s) => (&(s * &zz) * s).hermitian_part(),
    }
}

/// `ρ = XX*/Tr(XX*)` with `X` Ginibre m×n.
pub fn sample_induced_state(m: usize, n: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if m == 0 || n < m {
        return domain(format!("induced state needs 1 <= m <= n, got m={m}, n={n}"));
    }
    let x = sample_ginibre(m, n, rng);
    let xx = (&x * &x.adjoint()).hermitian_part();
    let mut rho = xx.scale(1.0 / xx.trace().re);
    // Pin the trace to one after rounding.
    let excess = rho.trace().re - 1.0;
    let d = rho.get(0, 0);
    rho.set(0, 0, C64::new(d.re - excess, 0.0));
    Ok(rho)
}

/// Sum of independent Wishart matrices sharing the dimension `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumWishart {
    terms: Vec<Wishart>,
}

impl SumWishart {
    pub fn new(terms: Vec<Wishart>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return domain("sum of Wishart matrices needs at least one term");
        };
        let m = first.m;
        if let Some(bad) = terms.iter().find(|t| t.m != m) {
            return Err(Error::Shape(format!("term with m={} in a sum with m={m}", bad.m)));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Wishart] {
        &self.terms
    }

    pub fn m(&self) -> usize {
        self.terms[0].m
    }
}

pub fn sample_sum_wishart(s: &SumWishart, rng: &mut RngStream) -> ComplexMatrix {
    let mut w = sample_wishart(&s.terms[0], rng);
    for t in &s.terms[1..] {
        w = &w + &sample_wishart(t, rng);
    }
    w
}

/// One term `(n_i, Σ_i)` of a sum-of-Wishart specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WishartTerm {
    pub n: usize,
    pub sigma: Option<ComplexMatrix>,
}

/// Serializable description of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ensemble", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Ginibre { m: usize, n: usize },
    Wishart { m: usize, n: usize, sigma: Option<ComplexMatrix> },
    Induced { m: usize, n: usize },
    SumWishart { m: usize, terms: Vec<WishartTerm> },
    HaarUnitary { m: usize },
}

/// A validated ensemble ready to draw from.
#[derive(Clone, Debug)]
pub enum Sampler {
    Ginibre { m: usize, n: usize },
    Wishart(Wishart),
    Induced { m: usize, n: usize },
    SumWishart(SumWishart),
    HaarUnitary { m: usize },
}

fn wishart_of(m: usize, n: usize, sigma: &Option<ComplexMatrix>) -> Result<Wishart> {
    match sigma {
        None => Wishart::standard(m, n),
        Some(s) => Wishart::new(m, n, s.clone()),
    }
}

impl EnsembleSpec {
    pub fn sampler(&self) -> Result<Sampler> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                domain(format!("{name} must be positive"))
            } else {
                Ok(())
            }
        };
        match self {
            EnsembleSpec::Ginibre { m, n } => {
                positive("m", *m)?;
                positive("n", *n)?;
                Ok(Sampler::Ginibre { m: *m, n: *n })
            }
            EnsembleSpec::Wishart { m, n, sigma } => Ok(Sampler::Wishart(wishart_of(*m, *n, sigma)?)),
            EnsembleSpec::Induced { m, n } => {
                positive("m", *m)?;
                if n < m {
                    return domain(format!("induced state needs m <= n, got m={m}, n={n}"));
                }
                Ok(Sampler::Induced { m: *m, n: *n })
            }
            EnsembleSpec::SumWishart { m, terms } => {
                let ws = terms.iter().map(|t| wishart_of(*m, t.n, &t.sigma)).collect::<Result<_>>()?;
                Ok(Sampler::SumWishart(SumWishart::new(ws)?))
            }
            EnsembleSpec::HaarUnitary { m } => {
                positive("m", *m)?;
                Ok(Sampler::HaarUnitary { m: *m })
            }
        }
    }

    /// Whether draws are Hermitian (and so have a real spectrum).
    pub fn is_hermitian(&self) -> bool {
        matches!(
            self,
            EnsembleSpec::Wishart { .. } | EnsembleSpec::Induced { .. } | EnsembleSpec::SumWishart { .. }
        )
    }
}

impl Sampler {
    pub fn draw(&self, rng: &mut RngStream) -> ComplexMatrix {
        match self {
            Sampler::Ginibre { m, n } => sample_ginibre(*m, *n, rng),
            Sampler::Wishart(w) => sample_wishart(w, rng),
            Sampler::Induced { m, n } => {
                sample_induced_state(*m, *n, rng).expect("validated induced shape")
            }
            Sampler::SumWishart(s) => sample_sum_wishart(s, rng),
            Sampler::HaarUnitary { m } => sample_haar_unitary(*m, rng),
        }
    }
}

/// `n_samples` draws, chunked over independent streams and returned in
/// stream order, so the batch is a function of `(spec, n_samples, seed)` only.
pub fn sample_batch(spec: &EnsembleSpec, n_samples: usize, seed: u64) -> Result<Vec<ComplexMatrix>> {
    let sampler = spec.sampler()?;
    Ok(draw_batch(n_samples, seed, tags::SAMPLE, |rng| sampler.draw(rng)))
}

/// Chunked batch of any per-draw statistic.
pub fn draw_batch<T, F>(n_samples: usize, seed: u64, tag: u32, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync,
{
    run_chunked(seed, tag, n_samples, |rng, k| (0..k).map(|_| draw(rng)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

/// `(n − m) log det W − Tr(Σ⁻¹W)`, unnormalized.
pub fn logdensity_wishart_matrix(w: &ComplexMatrix, n: usize, sigma: &ComplexMatrix) -> Result<f64> {
    let m = w.rows();
    if n < m {
        return domain(format!("wishart density needs n >= m, got n={n}, m={m}"));
    }
    check_covariance(sigma, m)?;
    let log_det = log_det_hpd(w)?;
    let trace = (&inverse_hpd(sigma)? * w).trace().re;
    Ok((n - m) as f64 * log_det - trace)
}

/// Joint eigenvalue law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EigenKind {
    /// `∏λ^{n−m} e^{−Σλ} Δ(λ)²`.
    Wishart { n: usize },
    /// `δ(1 − Σλ) ∏λ^{n−m} Δ(λ)²`.
    Induced { n: usize },
}

impl EigenKind {
    pub fn n(self) -> usize {
        match self {
            EigenKind::Wishart { n } | EigenKind::Induced { n } => n,
        }
    }
}

/// Unnormalized log joint eigenvalue density. Coincident eigenvalues give
/// `−∞` (the repulsion boundary) rather than an error.
pub fn logdensity_eigs(lambda: &[f64], kind: EigenKind, m: usize) -> Result<f64> {
    if lambda.len() != m {
        return Err(Error::Shape(format!("{} eigenvalues for m={m}", lambda.len())));
    }
    let n = kind.n();
    if n < m {
        return domain(format!("eigenvalue density needs n >= m, got n={n}, m={m}"));
    }
    if let Some(&bad) = lambda.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        return domain(format!("eigenvalues must be positive, got {bad}"));
    }
    let sum: f64 = lambda.iter().sum();
    if matches!(kind, EigenKind::Induced { .. }) && (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::SimplexViolation { sum });
    }
    let vdm = vandermonde(lambda).abs();
    if vdm == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let radial = (n - m) as f64 * lambda.iter().map(|l| l.ln()).sum::<f64>();
    let mut log_vdm = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            log_vdm += (lambda[i] - lambda[j]).abs().ln();
        }
    }
    let base = radial + 2.0 * log_vdm;
    Ok(match kind {
        EigenKind::Wishart { .. } => base - sum,
        EigenKind::Induced { .. } => base,
    })
}

/// Column layout of a batch CSV.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsvLayout {
    /// Descending eigenvalues (Hermitian ensembles only).
    Eigenvalues,
    /// Row-major entries as `re,im` column pairs.
    Matrix,
}

/// Writes one row per draw, preceded by a `#` comment echoing the spec and
/// seed and a column-name row. Floats use 17 significant digits.
pub fn write_batch_csv<W: Write>(
    out: &mut W,
    spec: &EnsembleSpec,
    seed: u64,
    draws: &[ComplexMatrix],
    layout: CsvLayout,
) -> Result<()> {
    let io = |e: io::Error| Error::Domain(format!("write failed: {e}"));
    let echo = serde_json::to_string(spec).expect("spec serializes");
    writeln!(out, "# spec={echo} seed={seed}").map_err(io)?;
    let Some(first) = draws.first() else {
        return Ok(());
    };
    let (r, c) = (first.rows(), first.cols());
    let header: Vec<String> = match layout {
        CsvLayout::Eigenvalues => {
            if !spec.is_hermitian() {
                return domain("eigenvalue output needs a Hermitian ensemble");
            }
            (1..=r).map(|k| format!("lambda_{k}")).collect()
        }
        CsvLayout::Matrix => (0..r)
            .flat_map(|i| (0..c).flat_map(move |j| [format!("re_{i}_{j}"), format!("im_{i}_{j}")]))
            .collect(),
    };
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for d in draws {
        let values: Vec<f64> = match layout {
            CsvLayout::Eigenvalues => eig_sorted(d)?,
            CsvLayout::Matrix => d.entries_row_major().iter().flat_map(|z| [z.re, z.im]).collect(),
        };
        let row: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

/// Whether `W` is Hermitian positive definite.
pub fn is_positive_definite(w: &ComplexMatrix) -> bool {
    cholesky(w).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;
    use crate::mc::Accumulator;
    use approx::assert_abs_diff_eq;

    fn draws<T: Send, F: Fn(&mut RngStream) -> T + Sync>(n: usize, seed: u64, f: F) -> Vec<T> {
        draw_batch(n, seed, tags::SAMPLE, f)
    }

    #[test]
    fn ginibre_shape_moment_and_determinism() {
        let mut rng = RngStream::new(1, 0);
        let z = sample_ginibre(2, 5, &mut rng);
        assert_eq!((z.rows(), z.cols()), (2, 5));
        let acc: Accumulator =
            draws(100_000, 2, |r| sample_ginibre(1, 1, r).get(0, 0).norm_sqr()).into_iter().collect();
        assert!(acc.estimate().within(1.0, 3.0));
        let (mut a, mut b) = (RngStream::new(9, 4), RngStream::new(9, 4));
        assert_eq!(sample_ginibre(3, 3, &mut a), sample_ginibre(3, 3, &mut b));
    }

    #[test]
    fn haar_is_unitary_with_uniform_column() {
        let mut rng = RngStream::new(3, 0);
        let u = sample_haar_unitary(4, &mut rng);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-10);
        let acc: Accumulator =
            draws(100_000, 4, |r| sample_haar_unitary(3, r).get(0, 0).norm_sqr()).into_iter().collect();
        let e = acc.estimate();
        assert!(e.within(1.0 / 3.0, 3.0), "{e:?}");
        assert!((e.value - 1.0 / 3.0).abs() < 0.004);
    }

    #[test]
    fn wishart_trace_and_psd() {
        let w = Wishart::standard(2, 3).unwrap();
        let acc: Accumulator =
            draws(100_000, 5, |r| sample_wishart(&w, r).trace().re).into_iter().collect();
        let e = acc.estimate();
        assert!(e.within(6.0, 3.0) && (e.value - 6.0).abs() < 0.05, "{e:?}");
        let w = Wishart::standard(3, 4).unwrap();
        let worst = draws(1000, 6, |r| min_eigenvalue(&sample_wishart(&w, r)).unwrap())
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(worst >= -1e-10);
    }

    #[test]
    fn wishart_rejects_bad_parameters() {
        assert!(Wishart::standard(3, 2).is_err());
        assert_eq!(
            Wishart::new(2, 3, ComplexMatrix::from_diagonal(&[1.0, -1.0])),
            Err(Error::NotPositiveDefinite)
        );
        assert!(matches!(Wishart::new(2, 3, ComplexMatrix::identity(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn covariance_root_applied() {
        let sigma = ComplexMatrix::from_diagonal(&[1.0, 4.0]);
        let w = Wishart::new(2, 3, sigma).unwrap();
        // E W = n Σ.
        let acc: Accumulator =
            draws(50_000, 7, |r| sample_wishart(&w, r).get(1, 1).re).into_iter().collect();
        assert!(acc.estimate().within(12.0, 4.0));
    }

    #[test]
    fn induced_state_normalized() {
        let mut rng = RngStream::new(8, 0);
        for _ in 0..100 {
            let rho = sample_induced_state(3, 5, &mut rng).unwrap();
            assert!((rho.trace().re - 1.0).abs() <= 1e-14);
            assert!(min_eigenvalue(&rho).unwrap() >= -1e-14);
        }
        assert_eq!(sample_induced_state(1, 4, &mut rng).unwrap(), ComplexMatrix::identity(1));
        assert!(sample_induced_state(3, 2, &mut rng).is_err());
        let acc: Accumulator = draws(100_000, 9, |r| {
            let rho = sample_induced_state(2, 2, r).unwrap();
            (&rho * &rho).trace().re
        })
        .into_iter()
        .collect();
        let e = acc.estimate();
        assert!(e.within(0.8, 3.0) && (e.value - 0.8).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn sum_wishart_single_term_matches_wishart() {
        let w = Wishart::new(2, 3, ComplexMatrix::from_diagonal(&[1.0, 2.0])).unwrap();
        let s = SumWishart::new(vec![w.clone()]).unwrap();
        let (mut a, mut b) = (RngStream::new(10, 1), RngStream::new(10, 1));
        assert_eq!(sample_sum_wishart(&s, &mut a), sample_wishart(&w, &mut b));
    }

    #[test]
    fn sum_wishart_mean_trace() {
        let s = SumWishart::new(vec![
            Wishart::standard(2, 2).unwrap(),
            Wishart::new(2, 3, ComplexMatrix::from_diagonal(&[1.0, 2.0])).unwrap(),
        ])
        .unwrap();
        let acc: Accumulator =
            draws(100_000, 11, |r| sample_sum_wishart(&s, r).trace().re).into_iter().collect();
        let e = acc.estimate();
        assert!(e.within(13.0, 3.0) && (e.value - 13.0).abs() < 0.1, "{e:?}");
        let bad = SumWishart::new(vec![Wishart::standard(2, 2).unwrap(), Wishart::standard(3, 3).unwrap()]);
        assert!(matches!(bad, Err(Error::Shape(_))));
        assert!(SumWishart::new(vec![]).is_err());
    }

    #[test]
    fn wishart_log_density_examples() {
        let one = ComplexMatrix::identity(1);
        assert_abs_diff_eq!(logdensity_wishart_matrix(&one, 2, &one).unwrap(), -1.0, epsilon = 1e-15);
        let i3 = ComplexMatrix::identity(3);
        assert_abs_diff_eq!(logdensity_wishart_matrix(&i3, 5, &i3).unwrap(), -3.0, epsilon = 1e-14);
        let w: ComplexMatrix = "2,0.5+0.5i;0.5-0.5i,1".parse().unwrap();
        let sigma: ComplexMatrix = "1,0.2;0.2,2".parse().unwrap();
        let (n, m, c) = (4usize, 2usize, 1.7f64);
        let base = logdensity_wishart_matrix(&w, n, &sigma).unwrap();
        let scaled = logdensity_wishart_matrix(&w.scale(c), n, &sigma).unwrap();
        let tr = (&inverse_hpd(&sigma).unwrap() * &w).trace().re;
        let want = (n - m) as f64 * m as f64 * c.ln() - (c - 1.0) * tr;
        assert_abs_diff_eq!(scaled - base, want, epsilon = 1e-12);
        let indefinite = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(
            logdensity_wishart_matrix(&indefinite, 3, &ComplexMatrix::identity(2)),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn eigen_log_density_examples() {
        let got = logdensity_eigs(&[0.75, 0.25], EigenKind::Induced { n: 2 }, 2).unwrap();
        assert_abs_diff_eq!(got, 2.0 * 0.5f64.ln(), epsilon = 1e-15);
        assert_eq!(
            logdensity_eigs(&[0.5, 0.5], EigenKind::Induced { n: 2 }, 2).unwrap(),
            f64::NEG_INFINITY
        );
        let got = logdensity_eigs(&[2.0], EigenKind::Wishart { n: 3 }, 1).unwrap();
        assert_abs_diff_eq!(got, 2.0 * 2f64.ln() - 2.0, epsilon = 1e-15);
        assert!(matches!(
            logdensity_eigs(&[0.5, 0.6], EigenKind::Induced { n: 2 }, 2),
            Err(Error::SimplexViolation { .. })
        ));
        assert!(logdensity_eigs(&[1.0, -0.1], EigenKind::Wishart { n: 3 }, 2).is_err());
    }

    #[test]
    fn eigen_density_is_the_matrix_density_up_to_jacobian() {
        // For Σ = I the matrix density depends on W only through its spectrum,
        // and the eigenvalue law adds exactly Δ(λ)².
        let w: ComplexMatrix = "2,0.5+0.5i;0.5-0.5i,1".parse().unwrap();
        let (values, _) = eigh(&w).unwrap();
        let by_matrix = logdensity_wishart_matrix(&w, 4, &ComplexMatrix::identity(2)).unwrap();
        let by_eigs = logdensity_eigs(&values, EigenKind::Wishart { n: 4 }, 2).unwrap();
        let vdm2 = 2.0 * vandermonde(&values).abs().ln();
        assert_abs_diff_eq!(by_eigs - vdm2, by_matrix, epsilon = 1e-12);
    }

    #[test]
    fn batches_are_reproducible_and_written_as_csv() {
        let spec = EnsembleSpec::Wishart { m: 2, n: 3, sigma: None };
        let a = sample_batch(&spec, 5000, 7).unwrap();
        let b = sample_batch(&spec, 5000, 7).unwrap();
        assert_eq!(a, b);
        let mut out = Vec::new();
        write_batch_csv(&mut out, &spec, 7, &a[..3], CsvLayout::Eigenvalues).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# spec=") && lines[0].ends_with("seed=7"));
        assert_eq!(lines[1], "lambda_1,lambda_2");
        assert_eq!(lines.len(), 5);
        let first: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, eig_sorted(&a[0]).unwrap());
        let haar = EnsembleSpec::HaarUnitary { m: 2 };
        let mut out = Vec::new();
        assert!(write_batch_csv(&mut out, &haar, 1, &a[..1], CsvLayout::Eigenvalues).is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = EnsembleSpec::SumWishart {
            m: 2,
            terms: vec![
                WishartTerm { n: 2, sigma: None },
                WishartTerm { n: 3, sigma: Some(ComplexMatrix::from_diagonal(&[1.0, 2.0])) },
            ],
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&text).unwrap(), spec);
        assert!(spec.sampler().is_ok());
        assert!(EnsembleSpec::Induced { m: 3, n: 2 }.sampler().is_err());
    }
}
