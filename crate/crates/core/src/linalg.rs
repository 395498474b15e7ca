//! Dense complex and real matrix kernels.
//!
//! [`ComplexMatrix`] is the carrier for every matrix in the crate. Storage is
//! an `nalgebra` dense matrix; the wrapper adds the Hermitian checks, the
//! coordinate bases used by the Jacobian module and the literal grammar
//! shared with the CLI.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for the Hermitian test, scaled by `max(1, max|x_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Self(m)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn entries_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `max_ij |x_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// `max_ij |x_ij - conj(x_ji)|`; infinite for non-square input.
    pub fn hermitian_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let asymmetry = self.hermitian_asymmetry();
        let tolerance = HERMITIAN_TOL * self.max_abs().max(1.0);
        if asymmetry <= tolerance {
            Ok(())
        } else {
            Err(Error::NotHermitian { asymmetry, tolerance })
        }
    }

    /// `(X + X*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.0.map(|z| z.re)
    }

    pub fn imag_part(&self) -> DMatrix<f64> {
        self.0.map(|z| z.im)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

impl From<DMatrix<C64>> for ComplexMatrix {
    fn from(m: DMatrix<C64>) -> Self {
        Self(m)
    }
}

impl From<&DMatrix<f64>> for ComplexMatrix {
    fn from(m: &DMatrix<f64>) -> Self {
        Self(m.map(|x| C64::new(x, 0.0)))
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

fn parse_scalar(tok: &str) -> Result<C64> {
    let t = tok.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty matrix entry".into()));
    }
    let bad = || Error::Parse(format!("bad matrix entry `{t}`"));
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is neither leading nor an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

/// Literal grammar: rows separated by `;`, entries by `,`, complex entries
/// written `re+imi` (`1+2i`, `-0.5i`, `3`).
impl FromStr for ComplexMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<Vec<C64>> = s
            .split(';')
            .map(|row| row.split(',').map(parse_scalar).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse(format!("ragged matrix literal `{s}`")));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }
}

fn fmt_scalar(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| fmt_scalar(self.0[(i, j)]))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

impl serde::Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Column-stacking vectorization.
pub fn vec(x: &ComplexMatrix) -> Vec<C64> {
    x.0.iter().copied().collect()
}

/// Inverse of [`vec`].
pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols || rows == 0 {
        return Err(Error::Shape(format!("cannot unvec {} entries into {rows}x{cols}", v.len())));
    }
    Ok(ComplexMatrix(DMatrix::from_column_slice(rows, cols, v)))
}

/// Row-stacking vectorization, the ordering in which `vec(AXB) = (A ⊗ Bᵀ) vec(X)`.
pub fn vec_rows(x: &ComplexMatrix) -> Vec<C64> {
    x.entries_row_major()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = DMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a.0[(i, j)];
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b.0[(k, l)];
                }
            }
        }
    }
    ComplexMatrix(out)
}

/// `∏_{i<j} (λ_i − λ_j)`; the empty product is 1.
///
/// The magnitude is accumulated over the descending-sorted values and the
/// sign taken from the sorting permutation, so permuting the input changes
/// at most the sign, bit for bit.
pub fn vandermonde(lambda: &[f64]) -> f64 {
    let n = lambda.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]));
    let mut inversions = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if order[i] > order[j] {
                inversions += 1;
            }
        }
    }
    let sorted: Vec<f64> = order.iter().map(|&k| lambda[k]).collect();
    let mut p = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            p *= sorted[i] - sorted[j];
        }
    }
    if inversions % 2 == 1 {
        -p
    } else {
        p
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending
/// order. Ties keep their input order.
pub fn eigh(x: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    x.check_hermitian()?;
    let h = x.hermitian_part();
    let eig = SymmetricEigen::new(h.0);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(x.rows(), x.rows(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, ComplexMatrix(vectors)))
}

pub fn eig_sorted(x: &ComplexMatrix) -> Result<Vec<f64>> {
    eigh(x).map(|(values, _)| values)
}

/// `V diag(values) V*`.
pub fn reconstruct(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
    let d = ComplexMatrix::from_diagonal(values);
    &(vectors * &d) * &vectors.adjoint()
}

/// Real inner product `Re Tr(A* B)`.
pub fn re_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateKind {
    Symmetric,
    Hermitian,
}

impl CoordinateKind {
    pub fn dimension(self, m: usize) -> usize {
        match self {
            CoordinateKind::Symmetric => m * (m + 1) / 2,
            CoordinateKind::Hermitian => m * m,
        }
    }
}

impl FromStr for CoordinateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Self::Symmetric),
            "hermitian" => Ok(Self::Hermitian),
            _ => Err(Error::Parse(format!("unknown coordinate kind `{s}`"))),
        }
    }
}

/// Orthonormal basis under `Re Tr(A* B)`: `E_jj` first, then for each pair
/// `j < k` in lexicographic order `(E_jk + E_kj)/√2` followed (Hermitian
/// kind only) by `i(E_jk − E_kj)/√2`.
pub fn coordinate_basis(kind: CoordinateKind, m: usize) -> Vec<ComplexMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(kind.dimension(m));
    for j in 0..m {
        let mut e = ComplexMatrix::zeros(m, m);
        e.set(j, j, C64::new(1.0, 0.0));
        basis.push(e);
    }
    for j in 0..m {
        for k in j + 1..m {
            let mut s = ComplexMatrix::zeros(m, m);
            s.set(j, k, C64::new(r, 0.0));
            s.set(k, j, C64::new(r, 0.0));
            basis.push(s);
            if kind == CoordinateKind::Hermitian {
                let mut a = ComplexMatrix::zeros(m, m);
                a.set(j, k, C64::new(0.0, r));
                a.set(k, j, C64::new(0.0, -r));
                basis.push(a);
            }
        }
    }
    basis
}

/// Coordinates of a symmetric or Hermitian matrix in [`coordinate_basis`].
fn coords_of(kind: CoordinateKind, x: &ComplexMatrix) -> Vec<f64> {
    let m = x.rows();
    let r = std::f64::consts::SQRT_2;
    let mut c = Vec::with_capacity(kind.dimension(m));
    for j in 0..m {
        c.push(x.get(j, j).re);
    }
    for j in 0..m {
        for k in j + 1..m {
            // Averaging both triangles gives the orthogonal projection.
            let z = (x.get(j, k) + x.get(k, j).conj()) * 0.5;
            c.push(r * z.re);
            if kind == CoordinateKind::Hermitian {
                c.push(r * z.im);
            }
        }
    }
    c
}

fn matrix_of(kind: CoordinateKind, m: usize, coords: &[f64]) -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = ComplexMatrix::zeros(m, m);
    for (j, &c) in coords.iter().take(m).enumerate() {
        x.set(j, j, C64::new(c, 0.0));
    }
    let mut idx = m;
    for j in 0..m {
        for k in j + 1..m {
            let re = r * coords[idx];
            idx += 1;
            let im = if kind == CoordinateKind::Hermitian {
                idx += 1;
                r * coords[idx - 1]
            } else {
                0.0
            };
            x.set(j, k, C64::new(re, im));
            x.set(k, j, C64::new(re, -im));
        }
    }
    x
}

/// Independent entries `{x_ij : i ≤ j}` of a real symmetric matrix, in the
/// orthonormal coordinate basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricCoordinates {
    m: usize,
    coords: Vec<f64>,
}

impl SymmetricCoordinates {
    pub fn new(m: usize, coords: Vec<f64>) -> Result<Self> {
        if m == 0 || coords.len() != m * (m + 1) / 2 {
            return Err(Error::Shape(format!("{} coordinates for symmetric m={m}", coords.len())));
        }
        Ok(Self { m, coords })
    }

    pub fn from_matrix(x: &ComplexMatrix) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::Shape("symmetric coordinates need a square matrix".into()));
        }
        Ok(Self { m: x.rows(), coords: coords_of(CoordinateKind::Symmetric, x) })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        matrix_of(CoordinateKind::Symmetric, self.m, &self.coords)
    }
}

/// Independent real parameters `x_jj, Re x_jk, Im x_jk (j<k)` of a
/// Hermitian matrix, in the orthonormal coordinate basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianCoordinates {
    m: usize,
    coords: Vec<f64>,
}

impl HermitianCoordinates {
    pub fn new(m: usize, coords: Vec<f64>) -> Result<Self> {
        if m == 0 || coords.len() != m * m {
            return Err(Error::Shape(format!("{} coordinates for hermitian m={m}", coords.len())));
        }
        Ok(Self { m, coords })
    }

    pub fn from_matrix(x: &ComplexMatrix) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::Shape("hermitian coordinates need a square matrix".into()));
        }
        Ok(Self { m: x.rows(), coords: coords_of(CoordinateKind::Hermitian, x) })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        matrix_of(CoordinateKind::Hermitian, self.m, &self.coords)
    }
}

pub(crate) fn coordinates(kind: CoordinateKind, x: &ComplexMatrix) -> Vec<f64> {
    coords_of(kind, x)
}

/// `log|det|` together with the sign (or complex phase collapsed to ±1 for real input).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub sign: f64,
}

impl LogDet {
    pub fn abs(&self) -> f64 {
        self.log_abs.exp()
    }
}

/// Partial-pivoting LU on a real square matrix with the determinant
/// accumulated in log scale. `None` when a pivot is exactly zero.
pub fn real_log_det(a: &DMatrix<f64>) -> Option<LogDet> {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.nrows();
    let mut lu = a.clone();
    let mut log_abs = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot == 0.0 {
            return None;
        }
        if p != k {
            lu.swap_rows(p, k);
            sign = -sign;
        }
        let d = lu[(k, k)];
        if d < 0.0 {
            sign = -sign;
        }
        log_abs += d.abs().ln();
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            if f != 0.0 {
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
    }
    Some(LogDet { log_abs, sign })
}

/// Realification `[[Re A, −Im A], [Im A, Re A]]`.
pub fn realify(a: &ComplexMatrix) -> DMatrix<f64> {
    let (r, c) = (a.rows(), a.cols());
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = a.get(i % r, j % c);
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.check_hermitian()?;
    let n = x.rows();
    let mut l = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let d = x.get(j, j).re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if d.is_nan() || d <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let s: C64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (x.get(i, j) - s) / ljj;
        }
    }
    Ok(ComplexMatrix(l))
}

/// `log det X` for Hermitian positive-definite `X`.
pub fn log_det_hpd(x: &ComplexMatrix) -> Result<f64> {
    let l = cholesky(x)?;
    Ok(2.0 * (0..l.rows()).map(|i| l.get(i, i).re.ln()).sum::<f64>())
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inverse_hpd(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    cholesky(x)?;
    let inv = x.hermitian_part().0.try_inverse().ok_or(Error::Singular)?;
    Ok(ComplexMatrix(inv).hermitian_part())
}

/// Unique positive semidefinite square root of a Hermitian PSD matrix;
/// requires every eigenvalue above `-1e-12·max(1, ‖X‖_max)`.
pub fn sqrt_psd(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = eigh(x)?;
    let floor = -1e-12 * x.max_abs().max(1.0);
    if values.iter().any(|&v| v < floor) {
        return Err(Error::NotPositiveDefinite);
    }
    let roots: Vec<f64> = values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(reconstruct(&roots, &vectors).hermitian_part())
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(x: &ComplexMatrix) -> Result<f64> {
    Ok(*eig_sorted(x)?.last().expect("non-empty spectrum"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random(rows: usize, cols: usize, rng: &mut RngStream) -> ComplexMatrix {
        ComplexMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.complex_normal()).collect())
            .unwrap()
    }

    fn random_hermitian(m: usize, rng: &mut RngStream) -> ComplexMatrix {
        random(m, m, rng).hermitian_part()
    }

    #[test]
    fn vec_stacks_columns() {
        let x = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let v: Vec<f64> = vec(&x).iter().map(|z| z.re).collect();
        assert_eq!(v, [1.0, 3.0, 2.0, 4.0]);
        let one = ComplexMatrix::new(1, 1, vec![c(0.5, -2.0)]).unwrap();
        assert_eq!(vec(&one), [c(0.5, -2.0)]);
    }

    #[test]
    fn unvec_inverts_vec() {
        let mut rng = RngStream::new(1, 0);
        let x = random(3, 2, &mut rng);
        assert_eq!(unvec(&vec(&x), 3, 2).unwrap(), x);
        assert!(unvec(&vec(&x), 2, 2).is_err());
    }

    #[test]
    fn kron_identity_is_block_diagonal() {
        let b = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let k = kron(&ComplexMatrix::identity(2), &b);
        let expected = ComplexMatrix::from_real(
            4,
            4,
            &[1., 2., 0., 0., 3., 4., 0., 0., 0., 0., 1., 2., 0., 0., 3., 4.],
        )
        .unwrap();
        assert_eq!(k, expected);
        let s = kron(
            &ComplexMatrix::from_real(1, 1, &[2.0]).unwrap(),
            &ComplexMatrix::from_real(1, 1, &[3.0]).unwrap(),
        );
        assert_eq!(s.get(0, 0), c(6.0, 0.0));
    }

    #[test]
    fn kron_determinant_factorizes() {
        let mut rng = RngStream::new(2, 0);
        let a = random(2, 2, &mut rng);
        let b = random(2, 2, &mut rng);
        let k = kron(&a, &b);
        let lhs = k.as_dmatrix().determinant();
        let rhs = a.as_dmatrix().determinant().powi(2) * b.as_dmatrix().determinant().powi(2);
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn vandermonde_values() {
        assert_eq!(vandermonde(&[3.0, 1.0]), 2.0);
        assert_eq!(vandermonde(&[7.5]), 1.0);
        assert_eq!(vandermonde(&[]), 1.0);
        assert_eq!(vandermonde(&[2.0, 1.0, 0.0]), 2.0);
    }

    #[test]
    fn eig_sorted_small_cases() {
        let d = ComplexMatrix::from_diagonal(&[1.0, 3.0]);
        assert_eq!(eig_sorted(&d).unwrap(), [3.0, 1.0]);
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = eig_sorted(&x).unwrap();
        assert_relative_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_sorted(&x), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(eig_sorted(&rect).is_err());
    }

    #[test]
    fn eigh_reconstructs() {
        let mut rng = RngStream::new(3, 0);
        for m in 1..=6 {
            let x = random_hermitian(m, &mut rng);
            let (values, vectors) = eigh(&x).unwrap();
            let err = reconstruct(&values, &vectors).max_abs_diff(&x);
            assert!(err <= 1e-10 * x.max_abs().max(1.0), "m={m} err={err}");
        }
    }

    #[test]
    fn basis_small_cases() {
        let b = coordinate_basis(CoordinateKind::Hermitian, 1);
        assert_eq!(b, vec![ComplexMatrix::identity(1)]);
        for (kind, m) in [(CoordinateKind::Hermitian, 2), (CoordinateKind::Symmetric, 3)] {
            let basis = coordinate_basis(kind, m);
            assert_eq!(basis.len(), kind.dimension(m));
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let g = re_inner(a, b);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn basis_gram_identity_up_to_six() {
        for kind in [CoordinateKind::Symmetric, CoordinateKind::Hermitian] {
            for m in 1..=6 {
                let basis = coordinate_basis(kind, m);
                for (i, a) in basis.iter().enumerate() {
                    a.check_hermitian().unwrap();
                    for (j, b) in basis.iter().enumerate().skip(i) {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((re_inner(a, b) - want).abs() <= 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn coordinates_match_basis_projection() {
        let mut rng = RngStream::new(4, 0);
        let x = random_hermitian(3, &mut rng);
        let coords = HermitianCoordinates::from_matrix(&x).unwrap();
        let basis = coordinate_basis(CoordinateKind::Hermitian, 3);
        for (c, b) in coords.coords().iter().zip(&basis) {
            assert!((c - re_inner(b, &x)).abs() < 1e-14);
        }
    }

    #[test]
    fn parse_literals() {
        let m: ComplexMatrix = "1+2i,-3;0.5i,-i".parse().unwrap();
        assert_eq!(m.get(0, 0), c(1.0, 2.0));
        assert_eq!(m.get(0, 1), c(-3.0, 0.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.5));
        assert_eq!(m.get(1, 1), c(0.0, -1.0));
        let e: ComplexMatrix = "1e-3-2.5e+1i".parse().unwrap();
        assert_eq!(e.get(0, 0), c(1e-3, -25.0));
        assert!("1,2;3".parse::<ComplexMatrix>().is_err());
        assert!("1,x".parse::<ComplexMatrix>().is_err());
        let back: ComplexMatrix = m.to_string().parse().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn log_det_matches_nalgebra() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, -1.0, 3.0, 2.0, 0.5, 0.0, -4.0]);
        let d = real_log_det(&a).unwrap();
        let direct = a.determinant();
        assert_relative_eq!(d.sign * d.abs(), direct, max_relative = 1e-13);
        assert!(real_log_det(&DMatrix::zeros(2, 2)).is_none());
    }

    #[test]
    fn realify_determinant_is_modulus_squared() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(0.3, 0.0), c(-0.2, 0.7), c(2.0, -1.0)])
            .unwrap();
        let d = real_log_det(&realify(&a)).unwrap().abs();
        assert_relative_eq!(d, a.as_dmatrix().determinant().norm_sqr(), max_relative = 1e-12);
    }

    #[test]
    fn hpd_helpers() {
        let x = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(1.0, 0.0)])
            .unwrap();
        let r = sqrt_psd(&x).unwrap();
        assert!((&r * &r).max_abs_diff(&x) < 1e-13);
        let inv = inverse_hpd(&x).unwrap();
        assert!((&inv * &x).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-13);
        assert_relative_eq!(log_det_hpd(&x).unwrap(), 1.5f64.ln(), max_relative = 1e-13);
        let neg = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(cholesky(&neg), Err(Error::NotPositiveDefinite));
    }

    proptest! {
        #[test]
        fn vec_of_product_is_kron_times_vec(seed in 0u64..10_000, m in 1usize..4, k in 1usize..4, l in 1usize..4, n in 1usize..4) {
            let mut rng = RngStream::new(seed, 0);
            let a = random(m, k, &mut rng);
            let x = random(k, l, &mut rng);
            let b = random(l, n, &mut rng);
            let axb = &(&a * &x) * &b;
            let scale = axb.max_abs().max(1.0);
            // Column stacking: vec(AXB) = (Bᵀ ⊗ A) vec(X).
            let col = kron(&b.transpose(), &a);
            let vx = nalgebra::DVector::from_vec(vec(&x));
            let lhs = col.as_dmatrix() * &vx;
            for (p, q) in lhs.iter().zip(vec(&axb)) {
                prop_assert!((p - q).norm() <= 1e-12 * scale);
            }
            // Row stacking: vec(AXB) = (A ⊗ Bᵀ) vec(X).
            let row = kron(&a, &b.transpose());
            let vx = nalgebra::DVector::from_vec(vec_rows(&x));
            let lhs = row.as_dmatrix() * &vx;
            for (p, q) in lhs.iter().zip(vec_rows(&axb)) {
                prop_assert!((p - q).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn eig_sorted_descending_and_trace(seed in 0u64..10_000, m in 1usize..7) {
            let mut rng = RngStream::new(seed, 1);
            let x = random_hermitian(m, &mut rng);
            let e = eig_sorted(&x).unwrap();
            prop_assert!(e.windows(2).all(|w| w[0] >= w[1]));
            let tr = x.trace().re;
            let sum: f64 = e.iter().sum();
            prop_assert!((sum - tr).abs() <= 1e-12 * tr.abs().max(1.0) * m as f64);
        }

        #[test]
        fn vandermonde_alternates(v in proptest::collection::vec(-5.0f64..5.0, 2..6), i in 0usize..6, j in 0usize..6) {
            let (i, j) = (i % v.len(), j % v.len());
            prop_assume!(i != j);
            let mut w = v.clone();
            w.swap(i, j);
            prop_assert_eq!(vandermonde(&w), -vandermonde(&v));
        }

        #[test]
        fn coordinate_round_trip(seed in 0u64..10_000, m in 1usize..6) {
            let mut rng = RngStream::new(seed, 2);
            let h = random_hermitian(m, &mut rng);
            let hc = HermitianCoordinates::from_matrix(&h).unwrap();
            let h2 = hc.to_matrix();
            prop_assert_eq!(h2.hermitian_asymmetry(), 0.0);
            let back = HermitianCoordinates::from_matrix(&h2).unwrap();
            for (a, b) in hc.coords().iter().zip(back.coords()) {
                prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
            let s = ComplexMatrix::from(&h.real_part()).hermitian_part();
            let sc = SymmetricCoordinates::from_matrix(&s).unwrap();
            let back = SymmetricCoordinates::from_matrix(&sc.to_matrix()).unwrap();
            for (a, b) in sc.coords().iter().zip(back.coords()) {
                prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }
    }
}
