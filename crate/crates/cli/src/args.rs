use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

/// Seed used when neither `--seed` nor `RMTLAB_SEED` is given.
pub const DEFAULT_SEED: u64 = rmtlab_core::rng::DEFAULT_SEED;

/// Matrix and spectrum arguments.
///
/// Grammar: rows separated by `;`, entries by `,`, complex entries as
/// `re+imi` (for example `1,2-i;2+i,3`). A single row of real numbers such
/// as `1,0` is read as a spectrum, i.e. the diagonal matrix `diag(1, 0)`,
/// wherever a square matrix is expected.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixText(pub String);

impl MatrixText {
    /// The entries when the text is a plain list of reals.
    pub fn as_list(&self) -> Option<Vec<f64>> {
        if self.0.contains(';') {
            return None;
        }
        self.0.split(',').map(|s| s.trim().parse::<f64>().ok()).collect()
    }
}

impl std::str::FromStr for MatrixText {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self(s.to_string()))
    }
}

impl Serialize for MatrixText {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_list() {
            Some(list) => list.serialize(s),
            None => s.serialize_str(&self.0),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "rmtlab", version, about = "Matrix delta calculus and random-matrix laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Draw a batch from a random-matrix ensemble.
    Sample(SampleArgs),
    /// Evaluate a joint density, or tabulate the m = 2 largest-eigenvalue law.
    Density(DensityArgs),
    /// Mollified one-dimensional delta identities.
    DeltaCheck(DeltaArgs),
    /// Jacobians of linear matrix maps and Fourier normalizations.
    JacobianCheck(JacobianArgs),
    /// Harish-Chandra–Itzykson–Zuber integral, closed form against Monte Carlo.
    Hciz(HcizArgs),
    /// Matrix-argument 1F1 and the identities built on it.
    F1(F1Args),
    /// Run a statistical verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

pub fn seed_from_env(value: Option<String>) -> Result<Option<u64>, String> {
    value.map(|v| parse_seed(&v)).transpose()
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// JSON file of `key: value` pairs; command-line flags take precedence.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Seed, decimal or 0x-prefixed hex; falls back to RMTLAB_SEED, then 0xD1AC.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Number of draws or Monte Carlo samples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Output path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(skip)]
    pub threads: Option<u64>,
}

fn dim() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleName {
    Ginibre,
    Wishart,
    Induced,
    SumWishart,
    HaarUnitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutArg {
    Eigenvalues,
    Matrix,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub ensemble: EnsembleName,
    #[arg(long, value_parser = dim())]
    pub m: u64,
    #[arg(long, value_parser = dim())]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Covariance of Wishart terms; identity when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<MatrixText>,
    /// Degrees of freedom of each sum-wishart term, comma-separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<MatrixText>,
    /// Eigenvalues for Hermitian ensembles, entries otherwise.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityEnsemble {
    Wishart,
    Induced,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub ensemble: DensityEnsemble,
    #[arg(long, value_parser = dim())]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[arg(long, value_parser = dim())]
    pub n: u64,
    /// Eigenvalues at which to evaluate the joint law.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigs: Option<MatrixText>,
    /// Wishart matrix at which to evaluate the matrix density.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixText>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<MatrixText>,
    /// Grid size of the largest-eigenvalue table (m = 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaOp {
    Sampling,
    Derivative,
    Composition,
    Scaling,
    Convolution,
    Pv,
    Dirichlet,
}

/// Test functions are written `c_n,...,c_0[;s]`: polynomial coefficients from
/// the highest degree down, optionally times the envelope `exp(-x²/(2s²))`.
#[derive(Args, Debug, Serialize)]
pub struct DeltaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub op: DeltaOp,
    /// Test function.
    #[arg(long, default_value = "1")]
    pub f: String,
    /// Polynomial inside the delta (composition), coefficients highest first.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// Sampling point, scale factor or first shift.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Second shift of the convolution.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Derivative order, 1 or 2.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Single mollifier width instead of the default grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Cutoff of the Dirichlet kernel.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Accepted residual at the finest width, relative to max(1, |rhs|).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianKind {
    Vector,
    ComplexVector,
    Rect,
    Symmetric,
    Hermitian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Args, Debug, Serialize)]
pub struct JacobianArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: JacobianKind,
    #[arg(long, value_parser = dim())]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Size of `B` for the rect kind.
    #[arg(long, value_parser = dim())]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// The matrix `A`; random draws when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixText>,
    /// The matrix `B` of the rect kind.
    #[arg(long = "b-matrix")]
    #[serde(rename = "b-matrix", skip_serializing_if = "Option::is_none")]
    pub b_matrix: Option<MatrixText>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldArg>,
    /// Number of random matrices when `--matrix` is absent.
    #[arg(long, value_parser = dim())]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<u64>,
    /// Check the Fourier normalization constant instead of a Jacobian.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub fourier: bool,
    /// Accepted relative discrepancy.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct HcizArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Hermitian `A` or its spectrum.
    #[arg(long)]
    pub a: MatrixText,
    /// Hermitian `B` or its spectrum.
    #[arg(long)]
    pub b: MatrixText,
    /// Accepted |z| of the Monte Carlo estimate against the closed form.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Kummer,
    SumWishart,
}

#[derive(Args, Debug, Serialize)]
pub struct F1Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Hermitian argument or its spectrum.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<MatrixText>,
    /// Check an identity instead of returning the plain estimate.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<Identity>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<MatrixText>,
    #[arg(long = "sigma-a")]
    #[serde(rename = "sigma-a", skip_serializing_if = "Option::is_none")]
    pub sigma_a: Option<MatrixText>,
    #[arg(long = "sigma-b")]
    #[serde(rename = "sigma-b", skip_serializing_if = "Option::is_none")]
    pub sigma_b: Option<MatrixText>,
    #[arg(long = "n-a", value_parser = dim())]
    #[serde(rename = "n-a", skip_serializing_if = "Option::is_none")]
    pub n_a: Option<u64>,
    #[arg(long = "n-b", value_parser = dim())]
    #[serde(rename = "n-b", skip_serializing_if = "Option::is_none")]
    pub n_b: Option<u64>,
    /// Accepted |z| of an identity residual.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// One of wishart-m1, induced-m2, sum-equivalence, haar.
    #[arg(long)]
    pub suite: String,
    /// Dimension parameter of the suite.
    #[arg(long, value_parser = dim())]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Sample(a) => &a.common,
            Command::Density(a) => &a.common,
            Command::DeltaCheck(a) => &a.common,
            Command::JacobianCheck(a) => &a.common,
            Command::Hciz(a) => &a.common,
            Command::F1(a) => &a.common,
            Command::Verify(a) => &a.common,
        }
    }

    pub fn common_mut(&mut self) -> &mut Common {
        match self {
            Command::Sample(a) => &mut a.common,
            Command::Density(a) => &mut a.common,
            Command::DeltaCheck(a) => &mut a.common,
            Command::JacobianCheck(a) => &mut a.common,
            Command::Hciz(a) => &mut a.common,
            Command::F1(a) => &mut a.common,
            Command::Verify(a) => &mut a.common,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_accept_hex_and_decimal() {
        assert_eq!(parse_seed("0xD1AC"), Ok(0xD1AC));
        assert_eq!(parse_seed("7"), Ok(7));
        assert!(parse_seed("-1").is_err());
        assert_eq!(seed_from_env(None), Ok(None));
    }

    #[test]
    fn spectra_serialize_as_lists() {
        let v = serde_json::to_value(MatrixText("1,0".into())).unwrap();
        assert_eq!(v, serde_json::json!([1.0, 0.0]));
        let v = serde_json::to_value(MatrixText("1,i;-i,2".into())).unwrap();
        assert_eq!(v, serde_json::json!("1,i;-i,2"));
    }
}
