//! One-dimensional distributional identities of the Dirac delta, checked
//! against a Gaussian mollifier with adaptive quadrature.
//!
//! Every check returns the raw numbers (a residual, or an `(lhs, rhs)` pair)
//! so callers can study convergence in `ε` themselves; [`EPS_GRID`] and
//! [`convergence_order`] cover the usual log-log regression.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{Quadrature, ABS_TOL};

/// Mollifier widths used for order-of-convergence fits.
pub const EPS_GRID: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Truncation of mollified integrals, in mollifier widths.
pub const CUTOFF: f64 = 12.0;

/// Gaussian approximate identity `δ_ε(x) = exp(−x²/2ε²) / (√(2π) ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    epsilon: f64,
}

impl Mollifier {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return domain(format!("mollifier width must be positive, got {epsilon}"));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eval(&self, x: f64) -> f64 {
        let e = self.epsilon;
        (-0.5 * (x / e).powi(2)).exp() / ((2.0 * PI).sqrt() * e)
    }

    /// `δ_ε⁽ⁿ⁾(x)` for `n ≤ 2` via the Hermite factors `−x/ε²` and `x²/ε⁴ − 1/ε²`.
    pub fn derivative(&self, n: u32, x: f64) -> Result<f64> {
        let e2 = self.epsilon * self.epsilon;
        let h = match n {
            0 => 1.0,
            1 => -x / e2,
            2 => (x * x / e2 - 1.0) / e2,
            _ => return domain(format!("mollifier derivative of order {n} not supported")),
        };
        Ok(h * self.eval(x))
    }

    /// Support used for quadrature, `|x − center| ≤ 12ε`.
    pub fn window(&self, center: f64) -> (f64, f64) {
        (center - CUTOFF * self.epsilon, center + CUTOFF * self.epsilon)
    }
}

/// Evaluates `Σ c_k x^k` and its first two derivatives; coefficients are
/// ordered from the highest degree down.
fn horner(coeffs: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut d2p) = (0.0, 0.0, 0.0);
    for &c in coeffs {
        d2p = d2p * x + 2.0 * dp;
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp, d2p)
}

fn parse_coeffs(text: &str) -> Result<Vec<f64>> {
    let coeffs = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|c| c.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad coefficient `{t}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(coeffs)
}

fn trim_leading_zeros(mut coeffs: Vec<f64>) -> Vec<f64> {
    let lead = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    coeffs.drain(..lead);
    coeffs
}

fn fmt_coeffs(coeffs: &[f64]) -> String {
    if coeffs.is_empty() {
        return "0".into();
    }
    coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// `f(x) = p(x) · exp(−x²/2s²)`, the envelope being optional.
///
/// Text form: `c_n,...,c_1,c_0` optionally followed by `;s`, e.g. `1,0,0;0.5`
/// for `x² exp(−2x²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    coeffs: Vec<f64>,
    envelope: Option<f64>,
}

impl TestFunction {
    pub fn new(coeffs: Vec<f64>, envelope: Option<f64>) -> Result<Self> {
        if let Some(s) = envelope {
            if !(s > 0.0 && s.is_finite()) {
                return domain(format!("envelope width must be positive, got {s}"));
            }
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return domain("non-finite coefficient");
        }
        Ok(Self { coeffs: trim_leading_zeros(coeffs), envelope })
    }

    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self { coeffs: trim_leading_zeros(coeffs.to_vec()), envelope: None }
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(&[c])
    }

    /// `exp(−x²/2s²)`.
    pub fn gaussian(s: f64) -> Result<Self> {
        Self::new(vec![1.0], Some(s))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn envelope(&self) -> Option<f64> {
        self.envelope
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(f, f′, f″)` at `x`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let (p, dp, d2p) = horner(&self.coeffs, x);
        match self.envelope {
            None => (p, dp, d2p),
            Some(s) => {
                let s2 = s * s;
                let e = (-0.5 * x * x / s2).exp();
                let de = -x / s2 * e;
                let d2e = (x * x / s2 - 1.0) / s2 * e;
                (p * e, dp * e + p * de, d2p * e + 2.0 * dp * de + p * d2e)
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    pub fn derivative(&self, n: u32, x: f64) -> Result<f64> {
        let (f, d1, d2) = self.eval_all(x);
        match n {
            0 => Ok(f),
            1 => Ok(d1),
            2 => Ok(d2),
            _ => domain(format!("test-function derivative of order {n} not supported")),
        }
    }

    /// `αf + βg`; both terms must share the envelope.
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Result<Self> {
        if f.envelope != g.envelope {
            return domain("linear combination needs a common envelope");
        }
        let n = f.coeffs.len().max(g.coeffs.len());
        let pad = |c: &[f64]| {
            let mut v = vec![0.0; n - c.len()];
            v.extend_from_slice(c);
            v
        };
        let (a, b) = (pad(&f.coeffs), pad(&g.coeffs));
        let coeffs = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        Self::new(coeffs, f.envelope)
    }

    /// Half-width beyond which an enveloped function is negligible.
    fn decay_radius(&self) -> Option<f64> {
        self.envelope.map(|s| s * (10.0 + (self.degree() as f64).sqrt()))
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(2, ';');
        let coeffs = parse_coeffs(parts.next().unwrap_or(""))?;
        let envelope = match parts.next() {
            None => None,
            Some(t) => Some(
                t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad envelope `{t}`")))?,
            ),
        };
        Self::new(coeffs, envelope)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coeffs(&self.coeffs))?;
        if let Some(s) = self.envelope {
            write!(f, ";{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: f64,
    pub multiplicity: usize,
}

/// A polynomial `g` together with its real roots.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialG {
    coeffs: Vec<f64>,
    roots: Vec<Root>,
}

fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    let deg = coeffs.len().saturating_sub(1);
    coeffs[..deg].iter().enumerate().map(|(i, &c)| c * (deg - i) as f64).collect()
}

fn root_tolerance(coeffs: &[f64], x: f64) -> f64 {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let deg = coeffs.len().saturating_sub(1) as i32;
    1e-10 * scale * (1.0 + x.abs().powi(deg))
}

/// Sign change of `p` on `[a, b]` refined by bisection.
fn bracketed_root(coeffs: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = horner(coeffs, a).0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            break;
        }
        let fm = horner(coeffs, mid).0;
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Real roots with multiplicities, ascending. Roots of `p′` split the line
/// into monotone pieces; each piece holds at most one simple root, and a
/// critical point where `p` vanishes is a multiple root.
fn real_roots(coeffs: &[f64]) -> Vec<Root> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![Root { x: -coeffs[1] / coeffs[0], multiplicity: 1 }];
    }
    let critical = real_roots(&derivative_coeffs(coeffs));
    let bound = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max((c / coeffs[0]).abs()));
    let mut roots = Vec::new();
    let mut knots = vec![-bound];
    for c in &critical {
        if horner(coeffs, c.x).0.abs() <= root_tolerance(coeffs, c.x) {
            roots.push(Root { x: c.x, multiplicity: c.multiplicity + 1 });
        }
        knots.push(c.x);
    }
    knots.push(bound);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let at_multiple = roots.iter().any(|r| r.x == a || r.x == b);
        let (fa, fb) = (horner(coeffs, a).0, horner(coeffs, b).0);
        // A vanishing knot is a critical point and was recorded above.
        if at_multiple || fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
            continue;
        }
        roots.push(Root { x: bracketed_root(coeffs, a, b), multiplicity: 1 });
    }
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    roots
}

impl PolynomialG {
    /// Coefficients from the highest degree down; `g` must not vanish identically.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return domain("non-finite coefficient");
        }
        let coeffs = trim_leading_zeros(coeffs);
        if coeffs.is_empty() {
            return domain("g vanishes identically");
        }
        let roots = real_roots(&coeffs);
        Ok(Self { coeffs, roots })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        horner(&self.coeffs, x).1
    }

    /// Roots, provided every one is simple with `|g′| > 1e−8`.
    pub fn simple_roots(&self) -> Result<Vec<f64>> {
        for r in &self.roots {
            if r.multiplicity > 1 || self.derivative(r.x).abs() <= 1e-8 {
                return Err(Error::DegenerateComposition { root: r.x });
            }
        }
        Ok(self.roots.iter().map(|r| r.x).collect())
    }
}

impl FromStr for PolynomialG {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_coeffs(s)?)
    }
}

impl fmt::Display for PolynomialG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coeffs(&self.coeffs))
    }
}

fn quad() -> Quadrature {
    Quadrature::with_abs_tol(ABS_TOL)
}

/// `∫ f(x) δ_ε(x − a) dx − f(a)`.
pub fn sampling_residual(f: &TestFunction, a: f64, eps: f64) -> Result<f64> {
    let m = Mollifier::new(eps)?;
    let (lo, hi) = m.window(a);
    let r = quad().integrate_points(|x| f.eval(x) * m.eval(x - a), &[lo, a, hi]);
    Ok(r.value - f.eval(a))
}

/// `∫ f(x) δ_ε⁽ⁿ⁾(x) dx`, which tends to `(−1)ⁿ f⁽ⁿ⁾(0)`.
pub fn derivative_pairing(f: &TestFunction, n: u32, eps: f64) -> Result<f64> {
    if !(1..=2).contains(&n) {
        return domain(format!("derivative order must be 1 or 2, got {n}"));
    }
    let m = Mollifier::new(eps)?;
    let (lo, hi) = m.window(0.0);
    let g = |x: f64| f.eval(x) * m.derivative(n, x).expect("order checked");
    Ok(quad().integrate_points(g, &[lo, -eps, 0.0, eps, hi]).value)
}

/// `(−1)ⁿ f⁽ⁿ⁾(0)`, the limit of [`derivative_pairing`].
pub fn derivative_target(f: &TestFunction, n: u32) -> Result<f64> {
    let d = f.derivative(n, 0.0)?;
    Ok(if n % 2 == 1 { -d } else { d })
}

/// `(∫ f(x) δ_ε(g(x)) dx, Σ_j f(x_j)/|g′(x_j)|)`.
pub fn composition_roots(g: &PolynomialG, f: &TestFunction, eps: f64) -> Result<(f64, f64)> {
    let m = Mollifier::new(eps)?;
    let roots = g.simple_roots()?;
    let rhs = roots.iter().map(|&x| f.eval(x) / g.derivative(x).abs()).sum();
    if g.degree() == 0 {
        // Nonzero constant g: δ_ε(g) is a constant, negligible for small ε only.
        return domain("composition with a constant g");
    }
    // |g| exceeds the cutoff outside the Cauchy bound of g ∓ 12ε.
    let c = g.coeffs();
    let cut = CUTOFF * eps;
    let tail = c[1..].iter().enumerate().fold(0.0f64, |acc, (i, &v)| {
        let v = if i + 2 == c.len() { v.abs() + cut } else { v.abs() };
        acc.max(v)
    });
    let bound = 1.0 + tail.max(cut) / c[0].abs();
    let mut points = vec![-bound, bound];
    for &x in &roots {
        let w = cut / g.derivative(x).abs();
        for p in [x - w, x - w / 4.0, x, x + w / 4.0, x + w] {
            points.push(p.clamp(-bound, bound));
        }
    }
    for r in real_roots(&derivative_coeffs(c)) {
        points.push(r.x.clamp(-bound, bound));
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let lhs = quad().integrate_points(|x| f.eval(x) * m.eval(g.eval(x)), &points).value;
    Ok((lhs, rhs))
}

/// `(∫ f(x) δ_ε(ax) dx, f(0)/|a|)`.
pub fn scaling_check(a: f64, f: &TestFunction, eps: f64) -> Result<(f64, f64)> {
    if a == 0.0 || !a.is_finite() {
        return domain("scaling factor must be nonzero");
    }
    let m = Mollifier::new(eps)?;
    let w = CUTOFF * eps / a.abs();
    let lhs = quad().integrate_points(|x| f.eval(x) * m.eval(a * x), &[-w, 0.0, w]).value;
    Ok((lhs, f.eval(0.0) / a.abs()))
}

/// Numerically convolved profile `δ_{ε₁}(· − a) * δ_{ε₂}(· − b)` compared
/// with its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionProfile {
    /// First moment of the numerical profile.
    pub center: f64,
    /// Standard deviation of the numerical profile.
    pub width: f64,
    /// Total mass of the numerical profile.
    pub mass: f64,
    /// Largest pointwise deviation from the Gaussian of width √(ε₁²+ε₂²) at `a + b`.
    pub max_error: f64,
}

struct Convolution {
    m1: Mollifier,
    m2: Mollifier,
    a: f64,
    b: f64,
}

impl Convolution {
    fn at(&self, x: f64) -> f64 {
        let (lo, hi) = self.m1.window(self.a);
        // Peak of the product in y, so the breakpoint sits on it.
        let (e1, e2) = (self.m1.epsilon().powi(2), self.m2.epsilon().powi(2));
        let peak = ((self.a * e2 + (x - self.b) * e1) / (e1 + e2)).clamp(lo, hi);
        let g = |y: f64| self.m1.eval(y - self.a) * self.m2.eval(x - y - self.b);
        quad().integrate_points(g, &[lo, peak, hi]).value
    }

    fn window(&self) -> (f64, f64, f64) {
        let c = self.a + self.b;
        let w = CUTOFF * (self.m1.epsilon().powi(2) + self.m2.epsilon().powi(2)).sqrt();
        (c - w, c, c + w)
    }

    fn pair<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let (lo, c, hi) = self.window();
        quad().integrate_points(|x| f(x) * self.at(x), &[lo, c, hi]).value
    }
}

pub fn convolution_shift(a: f64, b: f64, eps1: f64, eps2: f64) -> Result<ConvolutionProfile> {
    let conv = Convolution { m1: Mollifier::new(eps1)?, m2: Mollifier::new(eps2)?, a, b };
    let exact = Mollifier::new((eps1 * eps1 + eps2 * eps2).sqrt())?;
    let (lo, c, hi) = conv.window();
    let max_error = (0..=240)
        .map(|k| lo + (hi - lo) * k as f64 / 240.0)
        .map(|x| (conv.at(x) - exact.eval(x - c)).abs())
        .fold(0.0, f64::max);
    let mass = conv.pair(|_| 1.0);
    let center = conv.pair(|x| x) / mass;
    let var = conv.pair(|x| (x - center).powi(2)) / mass;
    Ok(ConvolutionProfile { center, width: var.sqrt(), mass, max_error })
}

/// `∫ f(x) (δ_ε(· − a) * δ_ε(· − b))(x) dx − f(a + b)`.
pub fn convolution_residual(f: &TestFunction, a: f64, b: f64, eps: f64) -> Result<f64> {
    let m = Mollifier::new(eps)?;
    let conv = Convolution { m1: m, m2: m, a, b };
    Ok(conv.pair(|x| f.eval(x)) - f.eval(a + b))
}

/// Principal value of `∫ sin(ωx)/x dx` over the real line.
///
/// The integrand is even, so the value is `2∫₀^X`, with `X = 200/|ω|`,
/// plus the asymptotic tail `2(cos U/U + sin U/U²)` at `U = |ω|X`.
pub fn pv_sinc(omega: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return domain("pv_sinc needs a nonzero frequency");
    }
    let w = omega.abs();
    let u_max = 200.0;
    let x_max = u_max / w;
    let sinc = |x: f64| if x == 0.0 { w } else { (w * x).sin() / x };
    let panels = (u_max / PI).ceil() as usize;
    let points: Vec<f64> = (0..=panels).map(|k| (k as f64 * PI / w).min(x_max)).collect();
    let body = quad().integrate_points(sinc, &points).value;
    let tail = u_max.cos() / u_max + u_max.sin() / (u_max * u_max);
    Ok(omega.signum() * 2.0 * (body + tail))
}

/// `∫ f(x) sin(Tx)/(πx) dx`, the truncated Fourier kernel applied to `f`.
/// `f` must carry an envelope unless it vanishes identically.
pub fn dirichlet_delta(f: &TestFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("cutoff T must be positive, got {t}"));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let Some(radius) = f.decay_radius() else {
        return domain("Dirichlet kernel needs an enveloped test function");
    };
    let kernel = |x: f64| if x == 0.0 { t / PI } else { (t * x).sin() / (PI * x) };
    let panels = (radius * t / PI).ceil().max(1.0) as usize;
    let points: Vec<f64> = (-(panels as i64)..=panels as i64)
        .map(|k| (k as f64 * PI / t).clamp(-radius, radius))
        .collect();
    Ok(quad().integrate_points(|x| f.eval(x) * kernel(x), &points).value)
}

/// Least-squares slope of `ln|r|` against `ln ε`.
pub fn convergence_order(eps: &[f64], residuals: &[f64]) -> f64 {
    assert_eq!(eps.len(), residuals.len(), "grid and residuals differ in length");
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.abs().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Order of convergence of `residual(ε)` over [`EPS_GRID`].
pub fn measured_order<F: Fn(f64) -> Result<f64>>(residual: F) -> Result<f64> {
    let r = EPS_GRID.iter().map(|&e| residual(e)).collect::<Result<Vec<_>>>()?;
    Ok(convergence_order(&EPS_GRID, &r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tf(s: &str) -> TestFunction {
        s.parse().unwrap()
    }

    #[test]
    fn mollifier_mass_and_symmetry() {
        for eps in [0.3, 0.01] {
            let m = Mollifier::new(eps).unwrap();
            let (lo, hi) = m.window(0.0);
            let mass = quad().integrate_points(|x| m.eval(x), &[lo, 0.0, hi]).value;
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
            for x in [0.0, 1e-3, 0.1, 2.5] {
                assert_eq!(m.eval(x), m.eval(-x));
            }
        }
        assert!(Mollifier::new(0.0).is_err());
    }

    #[test]
    fn mollifier_derivatives_match_finite_differences() {
        let m = Mollifier::new(0.4).unwrap();
        let h = 1e-5;
        for x in [-0.7, -0.1, 0.0, 0.3, 1.1] {
            let fd1 = (m.eval(x + h) - m.eval(x - h)) / (2.0 * h);
            let fd2 = (m.eval(x + h) - 2.0 * m.eval(x) + m.eval(x - h)) / (h * h);
            assert_abs_diff_eq!(m.derivative(1, x).unwrap(), fd1, epsilon = 1e-8);
            assert_abs_diff_eq!(m.derivative(2, x).unwrap(), fd2, epsilon = 1e-4);
        }
        assert!(m.derivative(3, 0.0).is_err());
    }

    #[test]
    fn test_function_derivatives_match_finite_differences() {
        let h = 1e-5;
        for f in [tf("0.5,-1,2,3"), tf("1,0,-2;0.8"), tf("-1,2;1.5")] {
            for x in [-1.3, -0.4, 0.0, 0.6, 1.7] {
                let (_, d1, d2) = f.eval_all(x);
                let fd1 = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
                let fd2 = (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
                assert_abs_diff_eq!(d1, fd1, epsilon = 1e-8);
                assert_abs_diff_eq!(d2, fd2, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let f = tf("1, 0, -4 ; 2");
        assert_eq!(f.coeffs(), &[1.0, 0.0, -4.0]);
        assert_eq!(f.envelope(), Some(2.0));
        assert_eq!(f.to_string().parse::<TestFunction>().unwrap(), f);
        assert_eq!(tf("0,0,3").coeffs(), &[3.0]);
        assert!("1,x".parse::<TestFunction>().is_err());
        assert!("1;-1".parse::<TestFunction>().is_err());
        assert!("0".parse::<PolynomialG>().is_err());
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let g: PolynomialG = "1,0,-4".parse().unwrap();
        assert_eq!(g.simple_roots().unwrap().len(), 2);
        let r = g.simple_roots().unwrap();
        assert_abs_diff_eq!(r[0], -2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r[1], 2.0, epsilon = 1e-13);
        // (x-1)(x-2)(x+3) = x³ - 7x + 6
        let g: PolynomialG = "1,0,-7,6".parse().unwrap();
        let r = g.simple_roots().unwrap();
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        for root in g.roots() {
            let tol = 1e-10 * (1.0 + root.x.abs().powi(3));
            assert!(g.eval(root.x).abs() <= tol);
        }
        assert!("1,0,1".parse::<PolynomialG>().unwrap().roots().is_empty());
        assert_eq!("0,3".parse::<PolynomialG>().unwrap().roots().len(), 0);
    }

    #[test]
    fn multiple_roots_are_degenerate() {
        let g: PolynomialG = "1,-2,1".parse().unwrap();
        assert_eq!(g.roots(), &[Root { x: 1.0, multiplicity: 2 }]);
        let f = TestFunction::constant(1.0);
        assert!(matches!(
            composition_roots(&g, &f, 0.1),
            Err(Error::DegenerateComposition { .. })
        ));
        // x³(x - 1): triple root at 0.
        let g: PolynomialG = "1,-1,0,0,0".parse().unwrap();
        assert_eq!(g.roots()[0].multiplicity, 3);
    }

    #[test]
    fn sampling_examples() {
        assert_abs_diff_eq!(sampling_residual(&tf("1"), 3.0, 0.3).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            sampling_residual(&tf("1,0,0"), 0.0, 0.1).unwrap(),
            0.01,
            epsilon = 1e-12
        );
        // exp(-x²) is the unit polynomial with s = 1/√2.
        let f = TestFunction::gaussian(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let r: Vec<f64> =
            [0.2, 0.1, 0.05].iter().map(|&e| sampling_residual(&f, 1.0, e).unwrap()).collect();
        assert!(r[0].abs() > r[1].abs() && r[1].abs() > r[2].abs());
        // Exact: the Gaussian convolution e^{-1/(1+2ε²)}/√(1+2ε²).
        let e: f64 = 0.05;
        let q = 1.0 + 2.0 * e * e;
        assert_abs_diff_eq!(r[2] + f.eval(1.0), (-1.0 / q).exp() / q.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn derivative_examples() {
        assert_abs_diff_eq!(derivative_pairing(&tf("1,0"), 1, 0.2).unwrap(), -1.0, epsilon = 1e-12);
        // x - x³/6 pairs to -(1 - ε²/2).
        let eps = 0.1;
        let got = derivative_pairing(&tf("-0.16666666666666666,0,1,0"), 1, eps).unwrap();
        assert_abs_diff_eq!(got, -1.0 + eps * eps / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(derivative_pairing(&tf("1,0,0"), 2, eps).unwrap(), 2.0, epsilon = 1e-11);
        assert!(derivative_pairing(&tf("1"), 3, eps).is_err());
        assert_eq!(derivative_target(&tf("1,0"), 1).unwrap(), -1.0);
    }

    #[test]
    fn composition_examples() {
        let g: PolynomialG = "1,0,-4".parse().unwrap();
        let (lhs, rhs) = composition_roots(&g, &tf("1"), 0.01).unwrap();
        assert_eq!(rhs, 0.5);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-5);
        let (_, rhs) = composition_roots(&g, &tf("1,0,0"), 0.01).unwrap();
        assert_abs_diff_eq!(rhs, 2.0, epsilon = 1e-12);
        let f = tf("1,2,3;1.3");
        let (lhs, rhs) = composition_roots(&"1,0".parse().unwrap(), &f, 0.05).unwrap();
        assert_eq!(rhs, f.eval(0.0));
        assert_abs_diff_eq!(lhs, rhs + sampling_residual(&f, 0.0, 0.05).unwrap(), epsilon = 1e-11);
    }

    #[test]
    fn affine_composition_shifts_and_rescales() {
        // g = kx + b ⇒ f(−b/k)/|k|.
        let (k, b) = (-2.5, 1.0);
        let g = PolynomialG::new(vec![k, b]).unwrap();
        let f = tf("1,-1,2;2");
        for eps in [0.1, 0.01] {
            let (lhs, rhs) = composition_roots(&g, &f, eps).unwrap();
            assert_abs_diff_eq!(rhs, f.eval(-b / k) / k.abs(), epsilon = 1e-15);
            // Envelope: |f″| ≤ 10 near the root, error ≈ f″ε²/(2|k|³).
            assert!((lhs - rhs).abs() <= 10.0 * eps * eps);
        }
    }

    #[test]
    fn scaling_examples() {
        let f = tf("1,0,5");
        let (lhs, rhs) = scaling_check(-3.0, &f, 0.05).unwrap();
        assert_abs_diff_eq!(rhs, 5.0 / 3.0, epsilon = 1e-15);
        // ∫(x²+5)δ_ε(3x)dx = (5 + ε²/9)/3.
        assert_abs_diff_eq!(lhs, (5.0 + 0.0025 / 9.0) / 3.0, epsilon = 1e-12);
        let (lhs, rhs) = scaling_check(2.0, &tf("1"), 0.05).unwrap();
        assert_eq!(rhs, 0.5);
        assert_abs_diff_eq!(lhs, 0.5, epsilon = 1e-12);
        let (lhs, _) = scaling_check(1.0, &f, 0.05).unwrap();
        assert_abs_diff_eq!(lhs - 5.0, sampling_residual(&f, 0.0, 0.05).unwrap(), epsilon = 1e-12);
        assert!(scaling_check(0.0, &f, 0.1).is_err());
    }

    #[test]
    fn convolution_examples() {
        let p = convolution_shift(1.0, 2.0, 0.1, 0.2).unwrap();
        assert_abs_diff_eq!(p.center, 3.0, epsilon = 1e-10);
        assert!(p.max_error <= 1e-8);
        let p = convolution_shift(0.0, 0.0, 0.1, 0.1).unwrap();
        assert_abs_diff_eq!(p.width, 0.1 * std::f64::consts::SQRT_2, epsilon = 1e-9);
        assert_abs_diff_eq!(p.mass, 1.0, epsilon = 1e-10);
        let p = convolution_shift(-1.0, 1.0, 0.05, 0.1).unwrap();
        assert_abs_diff_eq!(p.center, 0.0, epsilon = 1e-10);
        // Second moment of the pairing: f = x² ⇒ (a+b)² + 2ε².
        let r = convolution_residual(&tf("1,0,0"), 0.5, 0.25, 0.1).unwrap();
        assert_abs_diff_eq!(r, 0.02, epsilon = 1e-10);
    }

    #[test]
    fn principal_value_sinc() {
        for (w, want) in [(1.0, PI), (-1.0, -PI), (2.0, PI), (-2.0, -PI), (0.3, PI)] {
            assert_abs_diff_eq!(pv_sinc(w).unwrap(), want, epsilon = 1e-6);
        }
        assert!(pv_sinc(0.0).is_err());
    }

    #[test]
    fn dirichlet_kernel_examples() {
        let f = TestFunction::gaussian(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        // Closed form erf(T/2).
        let v10 = dirichlet_delta(&f, 10.0).unwrap();
        assert_abs_diff_eq!(v10, 1.0, epsilon = 1e-10);
        assert_eq!(dirichlet_delta(&TestFunction::polynomial(&[0.0]), 5.0).unwrap(), 0.0);
        let odd = tf("1,0;0.7071067811865476");
        for t in [10.0, 40.0, 160.0] {
            assert_abs_diff_eq!(dirichlet_delta(&odd, t).unwrap(), 0.0, epsilon = 1e-12);
        }
        // Narrow envelope: value erf(sT/√2), error shrinking in T.
        let s = 0.02;
        let f = TestFunction::gaussian(s).unwrap();
        let errs: Vec<f64> =
            [10.0, 40.0, 160.0].iter().map(|&t| (dirichlet_delta(&f, t).unwrap() - 1.0).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(dirichlet_delta(&tf("1"), 10.0).is_err());
    }

    #[test]
    fn second_order_convergence() {
        let f = tf("1,-1,2;1");
        let order = measured_order(|e| sampling_residual(&f, 0.3, e)).unwrap();
        assert!((order - 2.0).abs() < 0.15, "order {order}");
        assert_abs_diff_eq!(convergence_order(&[1.0, 0.5], &[3.0, 0.75]), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn pairings_are_linear() {
        let (f1, f2) = (tf("1,-2,0.5;1.1"), tf("3,0,1,-1;1.1"));
        let (alpha, beta) = (0.7, -1.9);
        let comb = TestFunction::linear_combination(alpha, &f1, beta, &f2).unwrap();
        let eps = 0.05;
        let lin = |op: &dyn Fn(&TestFunction) -> f64| {
            (op(&comb) - (alpha * op(&f1) + beta * op(&f2))).abs()
        };
        assert!(lin(&|f| sampling_residual(f, 0.4, eps).unwrap()) < 1e-10);
        assert!(lin(&|f| derivative_pairing(f, 1, eps).unwrap()) < 1e-10);
        assert!(lin(&|f| derivative_pairing(f, 2, eps).unwrap()) < 1e-10);
        assert!(lin(&|f| scaling_check(1.5, f, eps).unwrap().0) < 1e-10);
        let g: PolynomialG = "1,0,-1".parse().unwrap();
        assert!(lin(&|f| composition_roots(&g, f, eps).unwrap().0) < 1e-10);
        assert!(TestFunction::linear_combination(1.0, &f1, 1.0, &tf("1")).is_err());
    }

    proptest! {
        #[test]
        fn quadratic_roots_found(a in 0.1f64..5.0, r1 in -5.0f64..5.0, gap in 0.05f64..4.0) {
            let r2 = r1 + gap;
            let g = PolynomialG::new(vec![a, -a * (r1 + r2), a * r1 * r2]).unwrap();
            let roots = g.simple_roots().unwrap();
            prop_assert_eq!(roots.len(), 2);
            prop_assert!((roots[0] - r1).abs() < 1e-9 && (roots[1] - r2).abs() < 1e-9);
        }

        #[test]
        fn mollifier_even(x in -10.0f64..10.0, eps in 1e-3f64..2.0) {
            let m = Mollifier::new(eps).unwrap();
            prop_assert_eq!(m.eval(x), m.eval(-x));
        }
    }
}
