//! Delta-function transformation rules as change-of-variables determinants.
//!
//! A rule `δ(L x) = |det L|⁻¹ δ(x)` is checked by writing the linear map `L`
//! as a real matrix on an explicit coordinate space and taking its
//! determinant. Each `delta_scale_*` function returns that determinant next
//! to an independent closed-form route, so the identity itself is the
//! comparison of the two numbers.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::delta1d::TestFunction;
use crate::error::{domain, Error, Result};
use crate::linalg::{
    coordinate_basis, coordinates, kron, real_log_det, realify, ComplexMatrix, CoordinateKind,
    LogDet, C64,
};
use crate::quad::{Quadrature, ABS_TOL};

/// Relative determinant below which a map counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Self::Real),
            "complex" => Ok(Self::Complex),
            _ => Err(Error::Parse(format!("unknown field `{s}`"))),
        }
    }
}

/// Coordinate space a linear map acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDomain {
    RealVector { n: usize },
    ComplexVector { n: usize },
    Rect { m: usize, n: usize, field: Field },
    Symmetric { m: usize },
    Hermitian { m: usize },
}

impl MapDomain {
    pub fn dimension(self) -> usize {
        match self {
            MapDomain::RealVector { n } => n,
            MapDomain::ComplexVector { n } => 2 * n,
            MapDomain::Rect { m, n, field: Field::Real } => m * n,
            MapDomain::Rect { m, n, field: Field::Complex } => 2 * m * n,
            MapDomain::Symmetric { m } => m * (m + 1) / 2,
            MapDomain::Hermitian { m } => m * m,
        }
    }
}

/// Real matrix of a linear map in a fixed coordinate basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapMatrix {
    domain: MapDomain,
    matrix: DMatrix<f64>,
}

impl LinearMapMatrix {
    pub fn new(domain: MapDomain, matrix: DMatrix<f64>) -> Result<Self> {
        let d = domain.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "{}x{} map matrix on a {d}-dimensional domain",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { domain, matrix })
    }

    pub fn domain(&self) -> MapDomain {
        self.domain
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `log|det|` by pivoted LU.
    pub fn log_det(&self) -> Result<LogDet> {
        real_log_det(&self.matrix).ok_or(Error::Singular)
    }

    pub fn abs_det(&self) -> Result<f64> {
        Ok(self.log_det()?.abs())
    }
}

/// Rejects `A` when `|det A| < 1e−12 · ‖A‖ⁿ`, with `‖A‖` the largest row
/// 2-norm (so `|det A| ≤ ‖A‖ⁿ` by Hadamard's inequality).
fn require_nonsingular(a: &ComplexMatrix) -> Result<()> {
    let norm = a
        .as_dmatrix()
        .row_iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let bound = norm.powi(a.rows() as i32);
    let det = complex_abs_det(a);
    if !(bound > 0.0 && bound.is_finite() && det >= SINGULAR_TOL * bound) {
        return Err(Error::Singular);
    }
    Ok(())
}

/// A Jacobian scale from the coordinate map next to its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    /// `|det|` of the explicitly built map.
    pub value: f64,
    /// The same quantity by an independent route.
    pub cross_check: f64,
}

impl Scale {
    pub fn relative_discrepancy(&self) -> f64 {
        (self.value - self.cross_check).abs() / self.value.abs().max(self.cross_check.abs())
    }
}

fn require_square(a: &ComplexMatrix, name: &str) -> Result<()> {
    if a.is_square() {
        require_nonsingular(a)
    } else {
        Err(Error::Shape(format!("{name} must be square, got {}x{}", a.rows(), a.cols())))
    }
}

fn require_real(a: &ComplexMatrix, name: &str) -> Result<DMatrix<f64>> {
    if a.is_real() {
        Ok(a.real_part())
    } else {
        domain(format!("{name} must be real"))
    }
}

/// `|det A|` of a complex matrix through its own LU factorization.
fn complex_abs_det(a: &ComplexMatrix) -> f64 {
    a.as_dmatrix().clone().determinant().norm()
}

/// `|det A|` for real `A`, the reciprocal prefactor of `δ(Ax)`.
///
/// The map value is the LU determinant; the cross-check is the product of
/// singular values.
pub fn delta_scale_vector(a: &ComplexMatrix) -> Result<Scale> {
    require_square(a, "A")?;
    let ar = require_real(a, "A")?;
    let map = LinearMapMatrix::new(MapDomain::RealVector { n: ar.nrows() }, ar.clone())?;
    let value = map.abs_det()?;
    let cross_check = ar.svd(false, false).singular_values.iter().product();
    Ok(Scale { value, cross_check })
}

/// `|det(AA*)| = |det A|²` from the `2n × 2n` realification of `A`.
pub fn delta_scale_complex_vector(a: &ComplexMatrix) -> Result<Scale> {
    require_square(a, "A")?;
    let map = LinearMapMatrix::new(MapDomain::ComplexVector { n: a.rows() }, realify(a))?;
    let value = map.abs_det()?;
    Ok(Scale { value, cross_check: complex_abs_det(a).powi(2) })
}

/// Matrix of `X ↦ AXB` on `m × n` matrices in row-major coordinates, where
/// it equals `A ⊗ Bᵀ`; realified in the complex field.
pub fn rect_map(a: &ComplexMatrix, b: &ComplexMatrix, field: Field) -> Result<LinearMapMatrix> {
    require_square(a, "A")?;
    require_square(b, "B")?;
    let (m, n) = (a.rows(), b.rows());
    let k = kron(a, &b.transpose());
    let matrix = match field {
        Field::Real => {
            require_real(a, "A")?;
            require_real(b, "B")?;
            k.real_part()
        }
        Field::Complex => realify(&k),
    };
    LinearMapMatrix::new(MapDomain::Rect { m, n, field }, matrix)
}

/// Jacobian of `X ↦ AXB` for `A` (m×m), `B` (n×n): `|det A|ⁿ|det B|ᵐ` in the
/// real field and `det(AA*)ⁿ det(BB*)ᵐ` in the complex field.
pub fn delta_scale_rect(a: &ComplexMatrix, b: &ComplexMatrix, field: Field) -> Result<Scale> {
    let map = rect_map(a, b, field)?;
    let value = map.abs_det()?;
    let (m, n) = (a.rows() as i32, b.rows() as i32);
    let cross_check = match field {
        Field::Real => complex_abs_det(a).powi(n) * complex_abs_det(b).powi(m),
        Field::Complex => {
            let gram = |x: &ComplexMatrix| complex_abs_det(&(x * &x.adjoint()));
            gram(a).powi(n) * gram(b).powi(m)
        }
    };
    Ok(Scale { value, cross_check })
}

/// Matrix of `T ↦ AᵀTA` (symmetric) or `T ↦ A*TA` (Hermitian) in
/// [`coordinate_basis`].
pub fn congruence_map(a: &ComplexMatrix, kind: CoordinateKind) -> Result<LinearMapMatrix> {
    require_square(a, "A")?;
    let m = a.rows();
    let left = match kind {
        CoordinateKind::Symmetric => {
            require_real(a, "A")?;
            a.transpose()
        }
        CoordinateKind::Hermitian => a.adjoint(),
    };
    let basis = coordinate_basis(kind, m);
    let d = basis.len();
    let mut matrix = DMatrix::zeros(d, d);
    for (k, e) in basis.iter().enumerate() {
        let image = &(&left * e) * a;
        for (i, c) in coordinates(kind, &image).into_iter().enumerate() {
            matrix[(i, k)] = c;
        }
    }
    let domain = match kind {
        CoordinateKind::Symmetric => MapDomain::Symmetric { m },
        CoordinateKind::Hermitian => MapDomain::Hermitian { m },
    };
    LinearMapMatrix::new(domain, matrix)
}

/// Congruence Jacobian: `|det A|^{m+1}` (symmetric) or `|det(AA*)|^m` (Hermitian).
pub fn delta_scale_congruence(a: &ComplexMatrix, kind: CoordinateKind) -> Result<Scale> {
    let map = congruence_map(a, kind)?;
    let value = map.abs_det()?;
    let m = a.rows() as i32;
    let cross_check = match kind {
        CoordinateKind::Symmetric => complex_abs_det(a).powi(m + 1),
        CoordinateKind::Hermitian => complex_abs_det(&(a * &a.adjoint())).powi(m),
    };
    Ok(Scale { value, cross_check })
}

/// Gaussian damping width of the regularized Fourier integrals.
pub const FOURIER_DAMPING: f64 = 1e-3;

/// Envelope width of the probe function; wide enough that the damping
/// bias `2ε/s²` stays far below the 0.1% budget.
pub const FOURIER_PROBE_WIDTH: f64 = 4.0;

/// `∫∫ f(x) e^{iκtx} e^{−εt²} dt dx / f(0)`, integrating `x` first.
///
/// Equals `2π/κ` in the limit `ε → 0`. `f` must be even and enveloped, so
/// the sine part vanishes and only the cosine transform is evaluated.
pub fn fourier_factor(kappa: f64, f: &TestFunction, eps: f64) -> Result<f64> {
    let Some(s) = f.envelope() else {
        return domain("probe function needs an envelope");
    };
    if f.coeffs().iter().rev().skip(1).step_by(2).any(|&c| c != 0.0) {
        return domain("probe function must be even");
    }
    if !(kappa > 0.0 && eps > 0.0) {
        return domain("frequency scale and damping must be positive");
    }
    let q = Quadrature::with_abs_tol(ABS_TOL);
    let deg = f.degree() as f64;
    let x_max = s * (12.0 + deg.sqrt());
    // The cosine transform of p(x)e^{-x²/2s²} decays like e^{-s²t²/2}.
    let t_max = ((14.0 + deg) / s / kappa).min((40.0 / eps).sqrt());
    let inner = |t: f64| {
        let w = kappa * t;
        let panels = ((x_max * w / std::f64::consts::PI).ceil() as usize).clamp(1, 4096);
        let pts: Vec<f64> = (0..=panels).map(|k| x_max * k as f64 / panels as f64).collect();
        // Even integrand: twice the half line.
        2.0 * q.integrate_points(|x| f.eval(x) * (w * x).cos(), &pts).value
    };
    let outer = q.integrate_points(|t| inner(t) * (-eps * t * t).exp(), &[0.0, t_max / 4.0, t_max]);
    let f0 = f.eval(0.0);
    if f0 == 0.0 {
        return domain("probe function vanishes at the origin");
    }
    Ok(2.0 * outer.value / f0)
}

/// Normalization of the Fourier representation of the matrix delta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierConstant {
    pub m: usize,
    pub kind: CoordinateKind,
    /// Numerical factor of one diagonal coordinate, `→ 2π`.
    pub diagonal_factor: f64,
    /// Numerical factor of one off-diagonal real coordinate, `→ π`.
    pub off_diagonal_factor: f64,
    /// Product over all coordinates.
    pub value: f64,
    /// `2^m π^{m²}` (Hermitian) or `2^m π^{m(m+1)/2}` (symmetric).
    pub expected: f64,
}

impl FourierConstant {
    pub fn relative_error(&self) -> f64 {
        (self.value - self.expected).abs() / self.expected
    }
}

/// Number of real off-diagonal coordinates of an m×m matrix of the given kind.
fn off_diagonal_count(m: usize, kind: CoordinateKind) -> usize {
    kind.dimension(m) - m
}

pub fn fourier_constant(m: usize, kind: CoordinateKind) -> Result<FourierConstant> {
    if m == 0 || m > 4 {
        return domain(format!("fourier_constant supports 1 <= m <= 4, got {m}"));
    }
    let probe = TestFunction::gaussian(FOURIER_PROBE_WIDTH)?;
    let diagonal_factor = fourier_factor(1.0, &probe, FOURIER_DAMPING)?;
    let off_diagonal_factor = fourier_factor(2.0, &probe, FOURIER_DAMPING)?;
    let off = off_diagonal_count(m, kind) as i32;
    let value = diagonal_factor.powi(m as i32) * off_diagonal_factor.powi(off);
    let pi = std::f64::consts::PI;
    let expected = 2f64.powi(m as i32) * pi.powi(kind.dimension(m) as i32);
    Ok(FourierConstant { m, kind, diagonal_factor, off_diagonal_factor, value, expected })
}

/// Scalar matrix `a·I_n`.
pub fn scalar_matrix(a: C64, n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        x.set(i, i, a);
    }
    x
}
