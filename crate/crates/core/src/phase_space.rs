//! Wigner functions of pure Gaussian and photon-subtracted/-added states as
//! polynomial-times-Gaussian objects, with exact phase-space moment
//! integration.
//!
//! Quadrature convention: `x = (a + a^dag)/sqrt(2)`, `p = i(a^dag - a)/sqrt(2)`,
//! hbar = 1. A pure single-mode Gaussian state is parametrized by its mean
//! quadratures and by `gamma = 1/(2 Var x)`; purity fixes the `p` width to
//! `1/gamma`.
//!
//! Photon subtraction maps `rho -> a rho a^dag / N`, addition maps
//! `rho -> a^dag rho a / (N+1)`. On Wigner functions these act as the
//! differential operators
//!
//! ```text
//! subtract: (x^2 + p^2 + x d_x + p d_p + (d_x^2 + d_p^2)/4 + 1) / 2
//! add:      (x^2 + p^2 - x d_x - p d_p + (d_x^2 + d_p^2)/4 - 1) / 2
//! ```
//!
//! both of which keep a polynomial-times-Gaussian form closed, raising the
//! polynomial degree by exactly two in each variable.

use crate::{Error, Result};

/// Accepted range for `gamma`; outside this range degree-8 coefficient
/// products overflow or lose all precision.
pub const GAMMA_MIN: f64 = 1e-8;
/// Upper end of the accepted `gamma` range.
pub const GAMMA_MAX: f64 = 1e8;

/// Pure single-mode Gaussian state: mean quadratures and inverse of twice
/// the x-variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub xbar: f64,
    pub pbar: f64,
    pub gamma: f64,
}

impl GaussianSpec {
    pub fn new(xbar: f64, pbar: f64, gamma: f64) -> Result<Self> {
        for (name, value) in [("xbar", xbar), ("pbar", pbar)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        if !gamma.is_finite() || !(GAMMA_MIN..=GAMMA_MAX).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(Self { xbar, pbar, gamma })
    }

    /// Vacuum state (0, 0, 1).
    pub fn vacuum() -> Self {
        Self { xbar: 0.0, pbar: 0.0, gamma: 1.0 }
    }

    /// Mean photon number `N = (xbar^2 + pbar^2)/2 + (gamma + 1/gamma)/4 - 1/2`.
    pub fn mean_photon(&self) -> f64 {
        (self.xbar * self.xbar + self.pbar * self.pbar) / 2.0
            + (self.gamma + 1.0 / self.gamma) / 4.0
            - 0.5
    }
}

/// A Gaussian state together with the first derivatives of its parameters
/// with respect to the estimated parameter, evaluated at the working point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamJet {
    pub state: GaussianSpec,
    pub dxbar: f64,
    pub dpbar: f64,
    pub dgamma: f64,
}

impl ParamJet {
    pub fn new(state: GaussianSpec, dxbar: f64, dpbar: f64, dgamma: f64) -> Result<Self> {
        for (name, value) in [("dxbar", dxbar), ("dpbar", dpbar), ("dgamma", dgamma)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        Ok(Self { state, dxbar, dpbar, dgamma })
    }

    /// Derivative of the mean photon number along the parameter path.
    pub fn mean_photon_derivative(&self) -> f64 {
        let g = self.state.gamma;
        self.state.xbar * self.dxbar
            + self.state.pbar * self.dpbar
            + self.dgamma * (1.0 - 1.0 / (g * g)) / 4.0
    }
}

/// Which state family a Wigner function (or its theta-derivative) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// The Gaussian state itself.
    Gaussian,
    /// Photon-subtracted: `a rho a^dag / N`.
    Subtracted,
    /// Photon-added: `a^dag rho a / (N + 1)`.
    Added,
    /// The normalized blend `(a^dag rho a + rho) / (N + 2)`.
    ///
    /// This family arises from the addition operator with its constant term
    /// flipped to `+1`; it is kept so the closed-form catalog for it can be
    /// cross-checked against the moment oracle.
    AddedBlend,
}

impl StateKind {
    /// Normalization constant and its theta-derivative for this kind.
    fn normalization(self, jet: &ParamJet) -> Result<(f64, f64)> {
        let n = jet.state.mean_photon();
        let dn = jet.mean_photon_derivative();
        match self {
            StateKind::Gaussian => Ok((1.0, 0.0)),
            StateKind::Subtracted => {
                if n <= 0.0 {
                    return Err(Error::VacuumSubtraction(n));
                }
                Ok((n, dn))
            }
            StateKind::Added => Ok((n + 1.0, dn)),
            StateKind::AddedBlend => Ok((n + 2.0, dn)),
        }
    }
}

/// A polynomial in centered quadratures times a Gaussian envelope:
///
/// `f(x,p) = sum_{j,k} c[j][k] (x-x0)^j (p-p0)^k exp(-ax (x-x0)^2 - ap (p-p0)^2)`
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGaussian {
    center: (f64, f64),
    widths: (f64, f64),
    /// coeffs[j][k] multiplies `(x-x0)^j (p-p0)^k`; rectangular table.
    coeffs: Vec<Vec<f64>>,
}

impl PolyGaussian {
    pub fn new(center: (f64, f64), widths: (f64, f64), coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if !(widths.0 > 0.0 && widths.1 > 0.0 && widths.0.is_finite() && widths.1.is_finite()) {
            return Err(Error::Contract(format!(
                "PolyGaussian widths must be positive and finite, got ({}, {})",
                widths.0, widths.1
            )));
        }
        if coeffs.is_empty() || coeffs.iter().any(|row| row.len() != coeffs[0].len()) {
            return Err(Error::Contract(
                "PolyGaussian coefficient table must be rectangular and non-empty".into(),
            ));
        }
        Ok(Self { center, widths, coeffs })
    }

    /// Pure Gaussian `amplitude * exp(-ax (x-x0)^2 - ap (p-p0)^2)`.
    pub fn gaussian(center: (f64, f64), widths: (f64, f64), amplitude: f64) -> Result<Self> {
        Self::new(center, widths, vec![vec![amplitude]])
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn widths(&self) -> (f64, f64) {
        self.widths
    }

    /// Maximum stored degrees `(jmax, kmax)`.
    pub fn degrees(&self) -> (usize, usize) {
        (self.coeffs.len() - 1, self.coeffs[0].len() - 1)
    }

    /// Coefficient of `(x-x0)^j (p-p0)^k`, zero outside the table.
    pub fn coeff(&self, j: usize, k: usize) -> f64 {
        self.coeffs
            .get(j)
            .and_then(|row| row.get(k))
            .copied()
            .unwrap_or(0.0)
    }

    fn zero_table(nj: usize, nk: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; nk]; nj]
    }

    fn with_table(&self, coeffs: Vec<Vec<f64>>) -> Self {
        Self { center: self.center, widths: self.widths, coeffs }
    }

    /// Scale every coefficient by `factor`.
    pub fn scale(&self, factor: f64) -> Self {
        self.with_table(
            self.coeffs
                .iter()
                .map(|row| row.iter().map(|c| c * factor).collect())
                .collect(),
        )
    }

    /// Sum of two objects sharing center and widths.
    fn add_same_frame(&self, other: &Self) -> Self {
        assert_eq!(self.center, other.center, "add requires a common center");
        assert_eq!(self.widths, other.widths, "add requires common widths");
        let nj = self.coeffs.len().max(other.coeffs.len());
        let nk = self.coeffs[0].len().max(other.coeffs[0].len());
        let mut table = Self::zero_table(nj, nk);
        for (j, row) in table.iter_mut().enumerate() {
            for (k, c) in row.iter_mut().enumerate() {
                *c = self.coeff(j, k) + other.coeff(j, k);
            }
        }
        self.with_table(table)
    }

    /// Multiply by the centered monomial `(x-x0)^dj (p-p0)^dk`.
    fn shift_mul(&self, dj: usize, dk: usize) -> Self {
        let (nj, nk) = (self.coeffs.len(), self.coeffs[0].len());
        let mut table = Self::zero_table(nj + dj, nk + dk);
        for j in 0..nj {
            for k in 0..nk {
                table[j + dj][k + dk] = self.coeffs[j][k];
            }
        }
        self.with_table(table)
    }

    /// Multiply by a plain polynomial in the centered coordinates, given as a
    /// coefficient table in the same `(j, k)` layout.
    fn mul_poly_table(&self, poly: &[Vec<f64>]) -> Self {
        let (nj, nk) = (self.coeffs.len(), self.coeffs[0].len());
        let (mj, mk) = (poly.len(), poly[0].len());
        let mut table = Self::zero_table(nj + mj - 1, nk + mk - 1);
        for j in 0..nj {
            for k in 0..nk {
                let c = self.coeffs[j][k];
                if c == 0.0 {
                    continue;
                }
                for (dj, prow) in poly.iter().enumerate() {
                    for (dk, &q) in prow.iter().enumerate() {
                        table[j + dj][k + dk] += c * q;
                    }
                }
            }
        }
        self.with_table(table)
    }

    /// Multiply by the absolute coordinate `x = (x-x0) + x0`.
    fn mul_x(&self) -> Self {
        self.shift_mul(1, 0).add_same_frame(&self.scale(self.center.0).pad_to_match(1, 0))
    }

    /// Multiply by the absolute coordinate `p`.
    fn mul_p(&self) -> Self {
        self.shift_mul(0, 1).add_same_frame(&self.scale(self.center.1).pad_to_match(0, 1))
    }

    fn pad_to_match(&self, dj: usize, dk: usize) -> Self {
        let (nj, nk) = (self.coeffs.len(), self.coeffs[0].len());
        let mut table = Self::zero_table(nj + dj, nk + dk);
        for (row, src) in table.iter_mut().zip(&self.coeffs) {
            row[..nk].copy_from_slice(src);
        }
        self.with_table(table)
    }

    /// Exact partial derivative with respect to `x`; degree rises by one.
    #[allow(clippy::needless_range_loop)] // writes rows j-1 and j+1 of the target
    fn diff_x(&self) -> Self {
        let (nj, nk) = (self.coeffs.len(), self.coeffs[0].len());
        let ax = self.widths.0;
        let mut table = Self::zero_table(nj + 1, nk);
        for j in 0..nj {
            for k in 0..nk {
                let c = self.coeffs[j][k];
                if c == 0.0 {
                    continue;
                }
                if j >= 1 {
                    table[j - 1][k] += c * j as f64;
                }
                table[j + 1][k] -= 2.0 * ax * c;
            }
        }
        self.with_table(table)
    }

    /// Exact partial derivative with respect to `p`.
    #[allow(clippy::needless_range_loop)] // writes columns k-1 and k+1 of the target
    fn diff_p(&self) -> Self {
        let (nj, nk) = (self.coeffs.len(), self.coeffs[0].len());
        let ap = self.widths.1;
        let mut table = Self::zero_table(nj, nk + 1);
        for j in 0..nj {
            for k in 0..nk {
                let c = self.coeffs[j][k];
                if c == 0.0 {
                    continue;
                }
                if k >= 1 {
                    table[j][k - 1] += c * k as f64;
                }
                table[j][k + 1] -= 2.0 * ap * c;
            }
        }
        self.with_table(table)
    }

    /// Pointwise value `f(x, p)`.
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        let u = x - self.center.0;
        let v = p - self.center.1;
        // Horner in u, inner Horner in v.
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            let mut inner = 0.0;
            for &c in row.iter().rev() {
                inner = inner * v + c;
            }
            acc = acc * u + inner;
        }
        acc * (-self.widths.0 * u * u - self.widths.1 * v * v).exp()
    }

    /// Exact integral over the whole phase plane, via closed-form even
    /// Gaussian moments (odd centered moments vanish).
    pub fn moment_integral(&self) -> f64 {
        let mx = axis_moments(self.coeffs.len() - 1, self.widths.0);
        let mp = axis_moments(self.coeffs[0].len() - 1, self.widths.1);
        let mut total = 0.0;
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    total += c * mx[j] * mp[k];
                }
            }
        }
        total
    }

    /// Exact product of two polynomial-times-Gaussian objects.
    ///
    /// Widths add; for unequal centers the Gaussian product is completed to a
    /// square about the combined center and both polynomial parts are
    /// re-expanded there.
    pub fn product(&self, other: &Self) -> Self {
        let (a1x, a1p) = self.widths;
        let (a2x, a2p) = other.widths;
        let wx = a1x + a2x;
        let wp = a1p + a2p;
        let cx = (a1x * self.center.0 + a2x * other.center.0) / wx;
        let cp = (a1p * self.center.1 + a2p * other.center.1) / wp;
        let dx = self.center.0 - other.center.0;
        let dp = self.center.1 - other.center.1;
        let prefactor = (-(a1x * a2x / wx) * dx * dx - (a1p * a2p / wp) * dp * dp).exp();

        let ta = recenter(&self.coeffs, self.center, (cx, cp));
        let tb = recenter(&other.coeffs, other.center, (cx, cp));

        let (nj, nk) = (ta.len(), ta[0].len());
        let (mj, mk) = (tb.len(), tb[0].len());
        let mut table = Self::zero_table(nj + mj - 1, nk + mk - 1);
        for j1 in 0..nj {
            for k1 in 0..nk {
                let c = ta[j1][k1];
                if c == 0.0 {
                    continue;
                }
                for j2 in 0..mj {
                    for k2 in 0..mk {
                        table[j1 + j2][k1 + k2] += prefactor * c * tb[j2][k2];
                    }
                }
            }
        }
        Self { center: (cx, cp), widths: (wx, wp), coeffs: table }
    }
}

/// `int u^n exp(-a u^2) du` for n = 0..=deg; odd entries are zero.
fn axis_moments(deg: usize, a: f64) -> Vec<f64> {
    let mut m = vec![0.0; deg + 1];
    m[0] = (std::f64::consts::PI / a).sqrt();
    // m_{n} = (n-1)/(2a) * m_{n-2}
    for n in (2..=deg).step_by(2) {
        m[n] = m[n - 2] * (n as f64 - 1.0) / (2.0 * a);
    }
    m
}

/// Re-expand a coefficient table about a new center (binomial transform).
fn recenter(coeffs: &[Vec<f64>], old: (f64, f64), new: (f64, f64)) -> Vec<Vec<f64>> {
    // u_old = u_new + (c_new - c_old), so each (u_old)^j re-expands with
    // offset d = c_new - c_old.
    let dx = new.0 - old.0;
    let dp = new.1 - old.1;
    if dx == 0.0 && dp == 0.0 {
        return coeffs.to_vec();
    }
    let (nj, nk) = (coeffs.len(), coeffs[0].len());
    let binom = pascal(nj.max(nk));
    let mut out = vec![vec![0.0; nk]; nj];
    for (j, row) in coeffs.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            // (u_old)^j (v_old)^k = (u + dx)^j (v + dp)^k
            let mut px = 1.0; // dx^{j-i} built from i = j downwards
            for i in (0..=j).rev() {
                let mut pp = 1.0;
                for l in (0..=k).rev() {
                    out[i][l] += c * binom[j][i] * px * binom[k][l] * pp;
                    pp *= dp;
                }
                px *= dx;
            }
        }
    }
    out
}

fn pascal(n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    t[0][0] = 1.0;
    for j in 1..=n {
        t[j][0] = 1.0;
        for i in 1..=j {
            t[j][i] = t[j - 1][i - 1] + t[j - 1][i];
        }
    }
    t
}

/// Wigner function of a pure Gaussian state: `1/pi` times a Gaussian with
/// widths `(gamma, 1/gamma)` centered at the mean quadratures.
pub fn wigner_gaussian(spec: &GaussianSpec) -> PolyGaussian {
    PolyGaussian {
        center: (spec.xbar, spec.pbar),
        widths: (spec.gamma, 1.0 / spec.gamma),
        coeffs: vec![vec![std::f64::consts::FRAC_1_PI]],
    }
}

/// Unnormalized subtraction operator
/// `(x^2 + p^2 + x d_x + p d_p + (d_x^2 + d_p^2)/4 + 1) w / 2`.
fn subtraction_op(w: &PolyGaussian) -> PolyGaussian {
    let x2 = w.mul_x().mul_x();
    let p2 = w.mul_p().mul_p();
    let xdx = w.diff_x().mul_x();
    let pdp = w.diff_p().mul_p();
    let lap = w.diff_x().diff_x().add_same_frame(&w.diff_p().diff_p()).scale(0.25);
    x2.add_same_frame(&p2)
        .add_same_frame(&xdx)
        .add_same_frame(&pdp)
        .add_same_frame(&lap)
        .add_same_frame(&w.pad_to_match(2, 2))
        .scale(0.5)
}

/// Unnormalized addition operator
/// `(x^2 + p^2 - x d_x - p d_p + (d_x^2 + d_p^2)/4 - 1) w / 2`.
fn addition_op(w: &PolyGaussian) -> PolyGaussian {
    let x2 = w.mul_x().mul_x();
    let p2 = w.mul_p().mul_p();
    let xdx = w.diff_x().mul_x().scale(-1.0);
    let pdp = w.diff_p().mul_p().scale(-1.0);
    let lap = w.diff_x().diff_x().add_same_frame(&w.diff_p().diff_p()).scale(0.25);
    x2.add_same_frame(&p2)
        .add_same_frame(&xdx)
        .add_same_frame(&pdp)
        .add_same_frame(&lap)
        .add_same_frame(&w.pad_to_match(2, 2).scale(-1.0))
        .scale(0.5)
}

/// Photon subtraction on a Wigner function, normalized by the caller-supplied
/// mean photon number. For a state Wigner function the output integrates to
/// one again.
pub fn apply_subtraction(w: &PolyGaussian, nminus: f64) -> Result<PolyGaussian> {
    if !nminus.is_finite() || nminus <= 0.0 {
        return Err(Error::VacuumSubtraction(nminus));
    }
    Ok(subtraction_op(w).scale(1.0 / nminus))
}

/// Photon addition on a Wigner function, normalized by `nplus` (equal to
/// `N + 1` for a state with mean photon number `N`).
pub fn apply_addition(w: &PolyGaussian, nplus: f64) -> Result<PolyGaussian> {
    if !nplus.is_finite() || nplus <= 0.0 {
        return Err(Error::NonPositiveNormalization(nplus));
    }
    Ok(addition_op(w).scale(1.0 / nplus))
}

/// Mean photon number of a pure Gaussian state.
pub fn mean_photon(spec: &GaussianSpec) -> f64 {
    spec.mean_photon()
}

/// Normalized Wigner function of the given family built on `spec`.
pub fn wigner_state(spec: &GaussianSpec, kind: StateKind) -> Result<PolyGaussian> {
    let w = wigner_gaussian(spec);
    let n = spec.mean_photon();
    match kind {
        StateKind::Gaussian => Ok(w),
        StateKind::Subtracted => apply_subtraction(&w, n),
        StateKind::Added => apply_addition(&w, n + 1.0),
        StateKind::AddedBlend => {
            Ok(addition_op(&w)
                .add_same_frame(&w.pad_to_match(2, 2))
                .scale(1.0 / (n + 2.0)))
        }
    }
}

/// Theta-derivative of the Gaussian Wigner function via the chain rule
/// through (xbar, pbar, gamma).
fn gaussian_theta_derivative(jet: &ParamJet) -> PolyGaussian {
    let g = jet.state.gamma;
    let w = wigner_gaussian(&jet.state);
    // dW = W * (2 g xbar' u + (2/g) pbar' v - gamma' u^2 + (gamma'/g^2) v^2)
    let q = vec![
        vec![0.0, 2.0 / g * jet.dpbar, jet.dgamma / (g * g)],
        vec![2.0 * g * jet.dxbar, 0.0, 0.0],
        vec![-jet.dgamma, 0.0, 0.0],
    ];
    w.mul_poly_table(&q)
}

/// Theta-derivative of the Wigner function of the requested family,
/// including the parameter dependence of the normalization constant.
/// The result integrates to zero.
pub fn theta_derivative(jet: &ParamJet, kind: StateKind) -> Result<PolyGaussian> {
    let (n, dn) = kind.normalization(jet)?;
    let dw_gauss = gaussian_theta_derivative(jet);
    let w_gauss = wigner_gaussian(&jet.state);
    let (op_dw, op_w) = match kind {
        StateKind::Gaussian => return Ok(dw_gauss),
        StateKind::Subtracted => (subtraction_op(&dw_gauss), subtraction_op(&w_gauss)),
        StateKind::Added => (addition_op(&dw_gauss), addition_op(&w_gauss)),
        StateKind::AddedBlend => (
            addition_op(&dw_gauss).add_same_frame(&dw_gauss.pad_to_match(2, 2)),
            addition_op(&w_gauss).add_same_frame(&w_gauss.pad_to_match(2, 2)),
        ),
    };
    // d/dtheta (O[W]/n) = O[dW]/n - (dn/n^2) O[W]
    Ok(op_dw.scale(1.0 / n).add_same_frame(&op_w.scale(-dn / (n * n))))
}

/// Integral of `w` over the plane. Free function mirror of
/// [`PolyGaussian::moment_integral`].
pub fn moment_integral(w: &PolyGaussian) -> f64 {
    w.moment_integral()
}

/// Product of two polynomial-times-Gaussian objects. Free function mirror of
/// [`PolyGaussian::product`].
pub fn product(a: &PolyGaussian, b: &PolyGaussian) -> PolyGaussian {
    a.product(b)
}

/// Pointwise evaluation. Free function mirror of [`PolyGaussian::eval`].
pub fn eval(w: &PolyGaussian, x: f64, p: f64) -> f64 {
    w.eval(x, p)
}
