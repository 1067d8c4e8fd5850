//! Closed-form quantum Fisher information for pure Gaussian states and their
//! photon-subtracted / photon-added variants, with special cases and
//! asymptotic expansions.
//!
//! Every expression here is a polynomial (Horner-evaluated) in the state
//! parameters over a power of the family's denominator factor. The
//! coefficient tables were transcribed once from a symbolic re-derivation of
//! `I = 2(2pi) Int (dW/dtheta)^2 dx dp` and are pinned by unit tests against
//! both frozen high-precision values and the moment-integration oracle in
//! [`crate::qfi_numeric`].
//!
//! Two photon-added catalogs are provided:
//!
//! - `qfi_added*`: the QFI of the photon-added state `a^dag rho a / (N+1)`.
//! - `qfi_added_blend*`: the same functional evaluated on the blend
//!   `(a^dag rho a + rho) / (N+2)`, the family produced by the addition
//!   operator with its constant term flipped to `+1`. These tables are kept
//!   as a separately checkable catalog; they are **not** the QFI of the
//!   photon-added state.

use crate::phase_space::{GaussianSpec, ParamJet};
use crate::{Error, Result};

/// How a QFI value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Closed,
    Moment,
    Fock,
    Asymptotic,
    /// Central-difference cross-check on a quadrature grid.
    FiniteDifference,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Closed => "closed",
            Method::Moment => "moment",
            Method::Fock => "fock",
            Method::Asymptotic => "asymptotic",
            Method::FiniteDifference => "finite-difference",
        })
    }
}

/// A QFI value together with provenance and conditioning diagnostics.
///
/// `conditioning` is the magnitude of the smallest denominator root factor
/// encountered while evaluating; values below [`CONDITIONING_WARN`] add a
/// warning note (the divergence near such points is physical, not a
/// numerical failure).
#[derive(Debug, Clone, PartialEq)]
pub struct QfiReport {
    pub value: f64,
    pub method: Method,
    pub conditioning: f64,
    pub notes: Vec<String>,
}

impl QfiReport {
    pub(crate) fn with_method(value: f64, method: Method, conditioning: f64) -> Self {
        let mut report = Self { value, method, conditioning, notes: Vec::new() };
        if conditioning < CONDITIONING_WARN {
            report.notes.push(format!(
                "conditioning {conditioning:.3e} below {CONDITIONING_WARN:.0e}: near a singular point"
            ));
        }
        report
    }

    fn closed(value: f64, conditioning: f64) -> Self {
        Self::with_method(value, Method::Closed, conditioning)
    }
}

/// Conditioning threshold below which a singularity warning is attached.
pub const CONDITIONING_WARN: f64 = 1e-6;

/// Evaluate a polynomial given coefficients in ascending order.
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coherent-state QFI `2 (xbar'^2 + pbar'^2)`.
pub fn qfi_coherent(dxbar: f64, dpbar: f64) -> f64 {
    2.0 * (dxbar * dxbar + dpbar * dpbar)
}

/// QFI of the pure Gaussian family:
/// `(4 G pbar'^2 + 4 G^3 xbar'^2 + G'^2) / (2 G^2)`.
pub fn qfi_gaussian(jet: &ParamJet) -> QfiReport {
    let g = jet.state.gamma;
    let value = (4.0 * g * jet.dpbar * jet.dpbar
        + 4.0 * g.powi(3) * jet.dxbar * jet.dxbar
        + jet.dgamma * jet.dgamma)
        / (2.0 * g * g);
    QfiReport::closed(value, 2.0 * g * g)
}

/// QFI of the photon-subtracted family `a rho a^dag / N`.
///
/// Fails on the exact vacuum, where the normalization `N` vanishes. Near the
/// singular point `(xbar, pbar, gamma) = (0, 0, 1)` the value grows without
/// bound; a conditioning note is attached instead of an error.
pub fn qfi_subtracted(jet: &ParamJet) -> Result<QfiReport> {
    let n = jet.state.mean_photon();
    if n <= 0.0 {
        return Err(Error::VacuumSubtraction(n));
    }
    let (xb, pb, g) = (jet.state.xbar, jet.state.pbar, jet.state.gamma);
    let (xp, pp, gp) = (jet.dxbar, jet.dpbar, jet.dgamma);
    let (x2, p2) = (xb * xb, pb * pb);
    let s = x2 + p2;

    let root = g + 2.0 * (-1.0 + s) * g * g + g.powi(3);
    let denom = 2.0 * root * root;

    let term1 = 4.0
        * g
        * (3.0
            + g * (-8.0
                + 8.0 * p2
                + 10.0 * g
                + 4.0 * (-2.0 + s) * s * g
                + 8.0 * (-1.0 + x2) * g * g
                + 3.0 * g.powi(3)))
        * (pp * pp + g * g * xp * xp);
    let term2 = 32.0
        * g
        * g
        * (pb * (1.0 + (-1.0 + s) * g) * pp - xb * g * (-1.0 + s + g) * xp)
        * gp;
    let term3 = (3.0
        + g * (12.0 * p2
            + 4.0 * (-2.0 + s) * s * g
            + 12.0 * (-1.0 + s) * g * g
            + 3.0 * g.powi(3)
            + 6.0 * (-2.0 + 2.0 * x2 + 3.0 * g)))
        * gp
        * gp;

    Ok(QfiReport::closed((term1 + term2 + term3) / denom, root.abs()))
}

/// Shift-only special case of the subtracted QFI
/// (requires `gamma' = pbar = pbar' = 0`).
pub fn qfi_subtracted_shift_only(jet: &ParamJet) -> Result<QfiReport> {
    if jet.dgamma != 0.0 || jet.state.pbar != 0.0 || jet.dpbar != 0.0 {
        return Err(Error::Contract(
            "shift-only form requires dgamma = pbar = dpbar = 0".into(),
        ));
    }
    let (xb, g, xp) = (jet.state.xbar, jet.state.gamma, jet.dxbar);
    let x2 = xb * xb;
    let root = 1.0 + 2.0 * (-1.0 + x2) * g + g * g;
    if root == 0.0 {
        return Err(Error::Singular(
            "(xbar, gamma) = (0, 1): only root of the denominator in the real plane".into(),
        ));
    }
    let num = 2.0
        * g
        * (3.0 - 8.0 * g + 2.0 * (5.0 - 4.0 * x2 + 2.0 * x2 * x2) * g * g
            + 8.0 * (-1.0 + x2) * g.powi(3)
            + 3.0 * g.powi(4))
        * xp
        * xp;
    Ok(QfiReport::closed(num / (root * root), root.abs() * g))
}

/// Exact value and Laurent coefficients of the shift-only subtracted QFI on
/// the `xbar = 0` line, which diverges as `gamma -> 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumSeries {
    /// `xbar'^2 * 2 gamma (3 - 2 gamma + 3 gamma^2) / (gamma - 1)^2`
    pub value: f64,
    /// Laurent terms `xbar'^2 * [8/(g-1)^2, 16/(g-1), 14]`.
    pub terms: [f64; 3],
}

pub fn qfi_subtracted_vacuum_series(gamma: f64, xbar_prime: f64) -> Result<VacuumSeries> {
    if gamma == 1.0 {
        return Err(Error::Singular("vacuum shift-only QFI diverges at gamma = 1".into()));
    }
    let e = gamma - 1.0;
    let w2 = xbar_prime * xbar_prime;
    Ok(VacuumSeries {
        value: w2 * 2.0 * gamma * (3.0 - 2.0 * gamma + 3.0 * gamma * gamma) / (e * e),
        terms: [w2 * 8.0 / (e * e), w2 * 16.0 / e, w2 * 14.0],
    })
}

/// Expansion of the shift-only subtracted QFI around `gamma = 1 + eps`:
/// `2 xbar'^2 (1 + (1 + 2/xbar^2) eps + (1/xbar^4 + 1/xbar^2) eps^2)`.
pub fn qfi_subtracted_eps_expansion(xbar: f64, eps: f64, xbar_prime: f64) -> Result<f64> {
    if xbar == 0.0 {
        return Err(Error::Singular("eps expansion undefined at xbar = 0".into()));
    }
    let x2 = xbar * xbar;
    Ok(2.0
        * xbar_prime
        * xbar_prime
        * (1.0 + (1.0 + 2.0 / x2) * eps + (1.0 / (x2 * x2) + 1.0 / x2) * eps * eps))
}

/// Shift-only subtracted QFI of a squeezed vacuum written in the squeeze
/// parameter, `gamma = exp(2r)`:
/// `xbar'^2 * 4 e^{4r} (-1 + 3 cosh 2r) / (e^{2r} - 1)^2`.
pub fn qfi_subtracted_squeeze_form(r: f64, xbar_prime: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::Singular("squeeze form diverges at r = 0".into()));
    }
    let e2r = (2.0 * r).exp();
    Ok(xbar_prime * xbar_prime * 4.0 * (4.0 * r).exp() * (-1.0 + 3.0 * (2.0 * r).cosh())
        / ((e2r - 1.0) * (e2r - 1.0)))
}

/// Gamma-only special case of the subtracted QFI (`xbar' = pbar' = pbar = 0`).
/// At `xbar = 0` this reduces to `3 gamma'^2 / (2 gamma^2)` with no
/// divergence as `gamma -> 1`; the exact point `(0, 1)` is the vacuum and
/// remains a domain error.
pub fn qfi_subtracted_gamma_only(xbar: f64, gamma: f64, dgamma: f64) -> Result<f64> {
    let spec = GaussianSpec::new(xbar, 0.0, gamma)?;
    let n = spec.mean_photon();
    if n <= 0.0 {
        return Err(Error::VacuumSubtraction(n));
    }
    let x2 = xbar * xbar;
    let g = gamma;
    // Same polynomial regrouped into individually positive pieces: the naive
    // term order cancels catastrophically near gamma = 1 at small xbar.
    let e = g - 1.0;
    let num = (3.0 * e.powi(4)
        + 4.0 * x2 * g * (3.0 - 2.0 * g + 3.0 * g * g)
        + 4.0 * x2 * x2 * g * g)
        * dgamma
        * dgamma;
    let root = g * (e * e + 2.0 * x2 * g);
    Ok(num / (2.0 * root * root))
}

// ---------------------------------------------------------------------------
// photon-added family
// ---------------------------------------------------------------------------

/// Coefficients of `Gamma^1 ..= Gamma^9` in the `pbar'^2` numerator entry of
/// the added QFI; the `xbar'^2` entry is the same sequence times `Gamma^2`.
/// The list is palindromic under reversal combined with `xbar <-> pbar`.
fn added_quad_sequence(a2: f64, b2: f64) -> [f64; 9] {
    let c2 = |a2: f64, b2: f64| 16.0 * (5.0 * a2 + 3.0 * b2 + 5.0);
    let c3 = |a2: f64, b2: f64| {
        16.0 * (12.0 * a2 * a2 + 16.0 * a2 * b2 + 24.0 * a2 + 4.0 * b2 * b2 + 16.0 * b2 + 15.0)
    };
    let c4 = |a2: f64, b2: f64| {
        16.0 * (12.0 * a2.powi(3) + 28.0 * a2 * a2 * b2 + 36.0 * a2 * a2
            + 20.0 * a2 * b2 * b2
            + 56.0 * a2 * b2
            + 49.0 * a2
            + 4.0 * b2.powi(3)
            + 20.0 * b2 * b2
            + 39.0 * b2
            + 27.0)
    };
    let s = a2 + b2;
    let c5 = 8.0 * horner(&[65.0, 112.0, 80.0, 32.0, 8.0], s);
    [12.0, c2(a2, b2), c3(a2, b2), c4(a2, b2), c5, c4(b2, a2), c3(b2, a2), c2(b2, a2), 12.0]
}

/// Coefficients of `Gamma^0 ..= Gamma^8` in the `gamma'^2` numerator entry;
/// palindromic, and a function of `s = xbar^2 + pbar^2` alone. At `s = 0`
/// this collapses to `3 (1 + gamma)^8`, which cancels the denominator and
/// leaves `3 gamma'^2 / (2 gamma^2)` exactly.
fn added_gamma_sequence(s: f64) -> [f64; 9] {
    let t = s + 1.0;
    let q1 = 4.0 * horner(&[21.0, 32.0, 16.0], s);
    let q2 = 8.0 * t * horner(&[21.0, 16.0, 8.0], s);
    let mid = 2.0 * horner(&[105.0, 192.0, 128.0, 32.0, 8.0], s);
    [3.0, 24.0 * t, q1, q2, mid, q2, q1, 24.0 * t, 3.0]
}

/// Cross-term ladder shared by the `xbar' gamma'` and `pbar' gamma'` entries
/// (one uses it ascending from `Gamma^2`, the other reversed from `Gamma^3`).
fn added_cross_sequence(t: f64) -> [f64; 6] {
    [1.0, 5.0 * t, 2.0 * (4.0 * t * t + 1.0), 2.0 * t * (2.0 * t * t + 3.0), 4.0 * t * t + 1.0, t]
}

/// QFI of the photon-added family `a^dag rho a / (N + 1)`.
///
/// There are no singular points: the denominator root factor
/// `1 + 2(1 + pbar^2 + xbar^2) gamma + gamma^2` is strictly positive.
pub fn qfi_added(jet: &ParamJet) -> QfiReport {
    let (xb, pb, g) = (jet.state.xbar, jet.state.pbar, jet.state.gamma);
    let (xp, pp, gp) = (jet.dxbar, jet.dpbar, jet.dgamma);
    let (x2, p2) = (xb * xb, pb * pb);
    let s = x2 + p2;
    let t = s + 1.0;

    let quad = added_quad_sequence(p2, x2);
    let mut a_pp = 0.0;
    for (k, c) in quad.iter().enumerate() {
        a_pp += c * g.powi(k as i32 + 1);
    }
    let a_xx = g * g * a_pp;

    let mut a_gg = 0.0;
    for (k, c) in added_gamma_sequence(s).iter().enumerate() {
        a_gg += c * g.powi(k as i32);
    }

    let cross = added_cross_sequence(t);
    let mut a_pg = 0.0;
    for (k, c) in cross.iter().enumerate() {
        a_pg += c * g.powi(k as i32 + 2);
    }
    a_pg *= 32.0 * pb;
    let mut a_xg = 0.0;
    for (k, c) in cross.iter().rev().enumerate() {
        a_xg += c * g.powi(k as i32 + 3);
    }
    a_xg *= -32.0 * xb;

    let root = 1.0 + 2.0 * t * g + g * g;
    let num = a_xx * xp * xp + a_pp * pp * pp + a_gg * gp * gp + a_xg * xp * gp + a_pg * pp * gp;
    QfiReport::closed(num / (2.0 * g * g * root.powi(4)), root * g)
}

/// Shift-only reduction of the added QFI (`gamma' = pbar = pbar' = 0`).
pub fn qfi_added_shift_only(xbar: f64, gamma: f64, xbar_prime: f64) -> f64 {
    let x2 = xbar * xbar;
    let quad = added_quad_sequence(0.0, x2);
    let mut num = 0.0;
    for (k, c) in quad.iter().enumerate() {
        num += c * gamma.powi(k as i32 + 1);
    }
    let root = 1.0 + 2.0 * (1.0 + x2) * gamma + gamma * gamma;
    num * xbar_prime * xbar_prime / (2.0 * root.powi(4))
}

/// Gamma-only reduction of the added QFI (`xbar' = pbar' = pbar = 0`).
/// At `xbar = 0` this is exactly `3 gamma'^2 / (2 gamma^2)` for every gamma.
pub fn qfi_added_gamma_only(xbar: f64, gamma: f64, dgamma: f64) -> f64 {
    let s = xbar * xbar;
    let mut num = 0.0;
    for (k, c) in added_gamma_sequence(s).iter().enumerate() {
        num += c * gamma.powi(k as i32);
    }
    let root = 1.0 + 2.0 * (1.0 + s) * gamma + gamma * gamma;
    num * dgamma * dgamma / (2.0 * gamma * gamma * root.powi(4))
}

// ---------------------------------------------------------------------------
// blend family: (a^dag rho a + rho) / (N + 2)
// ---------------------------------------------------------------------------

/// The same phase-space QFI functional evaluated on the blend family.
/// Strictly positive denominator, no singular points.
pub fn qfi_added_blend(jet: &ParamJet) -> QfiReport {
    let (xb, pb, g) = (jet.state.xbar, jet.state.pbar, jet.state.gamma);
    let (xp, pp, gp) = (jet.dxbar, jet.dpbar, jet.dgamma);
    let (x2, p2) = (xb * xb, pb * pb);
    let (x4, p4) = (x2 * x2, p2 * p2);
    let (x6, p6) = (x4 * x2, p4 * p2);
    let p8 = p4 * p4;
    let (xq2, pq2) = (xp * xp, pp * pp);
    let gq2 = gp * gp;

    let root = 1.0 + 2.0 * (3.0 + p2 + x2) * g + g * g;
    let pre = 1.0 / (2.0 * g * g * root.powi(4));

    let num = 16.0 * (9.0 + 3.0 * p2 + 5.0 * x2) * g.powi(10) * xq2
        + 12.0 * g.powi(11) * xq2
        + 4.0 * g.powi(9)
            * (3.0 * pq2
                + 4.0 * (35.0 + 4.0 * p4 + 12.0 * x2 * (4.0 + x2) + 8.0 * p2 * (3.0 + 2.0 * x2))
                    * xq2)
        + 3.0 * gq2
        + g.powi(8)
            * (16.0 * (13.0 + 3.0 * p2 + 5.0 * x2) * pq2
                + 16.0
                    * (91.0 + 103.0 * p2 + 36.0 * p4 + 4.0 * p6
                        + (177.0 + 20.0 * p2 * (6.0 + p2)) * x2
                        + 28.0 * (3.0 + p2) * x4
                        + 12.0 * x6)
                    * xq2
                - 32.0 * xb * xp * gp
                + 3.0 * gq2)
        + 12.0 * g * (pq2 + 2.0 * (2.0 + p2 + x2) * gq2)
        + 4.0 * g * g
            * (4.0 * (9.0 + 5.0 * p2 + 3.0 * x2) * pq2
                + 8.0 * pb * pp * gp
                + (7.0 + 4.0 * p2 + 4.0 * x2) * (15.0 + 4.0 * p2 + 4.0 * x2) * gq2)
        + 2.0 * g.powi(4)
            * (8.0
                * (91.0 + 12.0 * p6 + 103.0 * x2 + 28.0 * p4 * (3.0 + x2)
                    + 4.0 * x4 * (9.0 + x2)
                    + p2 * (177.0 + 20.0 * x2 * (6.0 + x2)))
                * pq2
                + 8.0 * (13.0 + 5.0 * p2 + 3.0 * x2) * xq2
                + 16.0
                    * (2.0 * pb * (33.0 + 20.0 * x2 + 4.0 * (p4 + x4 + p2 * (5.0 + 2.0 * x2)))
                        * pp
                        - xb * (45.0 + 4.0 * p4 + 8.0 * p2 * (4.0 + x2) + 4.0 * x2 * (8.0 + x2))
                            * xp)
                    * gp
                + (665.0 + 992.0 * x2
                    + 8.0 * (p8
                        + 4.0 * p6 * (3.0 + x2)
                        + 6.0 * p4 * (10.0 + 6.0 * x2 + x4)
                        + x4 * (60.0 + 12.0 * x2 + x4)
                        + 4.0 * p2 * (31.0 + 30.0 * x2 + 9.0 * x4 + x6)))
                    * gq2)
        + 8.0 * g.powi(7)
            * (2.0 * (83.0 + 8.0 * p2 + 4.0 * p4 + 16.0 * (4.0 + p2) * x2 + 12.0 * x4) * pq2
                + (593.0 + 784.0 * x2
                    + 8.0 * (p8
                        + 4.0 * p6 * (3.0 + x2)
                        + 6.0 * p4 * (3.0 + x2) * (3.0 + x2)
                        + x4 * (54.0 + 12.0 * x2 + x4)
                        + 2.0 * p2 * (53.0 + 2.0 * x2 * (27.0 + 9.0 * x2 + x4))))
                    * xq2
                - 4.0 * xb * (19.0 + 5.0 * p2 + 5.0 * x2) * xp * gp
                + 3.0 * (2.0 + p2 + x2) * gq2
                + 4.0 * pb * pp * (-32.0 * xb * xp + (-1.0 + p2 + x2) * gp))
        + 8.0 * g.powi(5)
            * ((593.0 + 848.0 * x2
                + 8.0 * (p8
                    + 4.0 * p6 * (3.0 + x2)
                    + 6.0 * p4 * (3.0 + x2) * (3.0 + x2)
                    + x4 * (54.0 + 12.0 * x2 + x4)
                    + 2.0 * p2 * (49.0 + 2.0 * x2 * (27.0 + 9.0 * x2 + x4))))
                * pq2
                + 2.0 * (83.0 + 8.0 * x2 + 4.0 * (3.0 * p4 + x4 + 4.0 * p2 * (4.0 + x2))) * xq2
                - 8.0 * xb
                    * (3.0 + p2 + x2)
                    * (21.0 + 2.0 * p4 + 4.0 * p2 * (3.0 + x2) + 2.0 * x2 * (6.0 + x2))
                    * xp
                    * gp
                + (114.0 + 8.0 * p6 + 149.0 * x2 + 60.0 * x4 + 8.0 * x6
                    + 12.0 * p4 * (5.0 + 2.0 * x2)
                    + p2 * (149.0 + 24.0 * x2 * (5.0 + x2)))
                    * gq2
                + 8.0 * pb * pp
                    * (-16.0 * xb * xp
                        + (3.0 + p2 + x2)
                            * (21.0 + 2.0 * p4 + 4.0 * p2 * (3.0 + x2) + 2.0 * x2 * (6.0 + x2))
                            * gp))
        + 4.0 * g.powi(6)
            * (4.0
                * (239.0 + 135.0 * p2 + 52.0 * p4 + 4.0 * p6
                    + (273.0 + 152.0 * p2 + 20.0 * p4) * x2
                    + 4.0 * (25.0 + 7.0 * p2) * x4
                    + 12.0 * x6)
                * pq2
                + 4.0
                    * (239.0 + 12.0 * p6 + 135.0 * x2 + 52.0 * x4 + 4.0 * x6
                        + 4.0 * p4 * (25.0 + 7.0 * x2)
                        + p2 * (273.0 + 152.0 * x2 + 20.0 * x4))
                    * xq2
                - 16.0 * xb * (33.0 + 20.0 * x2 + 4.0 * (p4 + x4 + p2 * (5.0 + 2.0 * x2))) * xp
                    * gp
                + (7.0 + 4.0 * p2 + 4.0 * x2) * (15.0 + 4.0 * p2 + 4.0 * x2) * gq2
                + 8.0 * pb * pp
                    * (-64.0 * xb * xp
                        + (45.0 + 4.0 * p4 + 8.0 * p2 * (4.0 + x2) + 4.0 * x2 * (8.0 + x2)) * gp))
        + 4.0 * g.powi(3)
            * (4.0 * (35.0 + 12.0 * p4 + 16.0 * p2 * (3.0 + x2) + 4.0 * x2 * (6.0 + x2)) * pq2
                + 3.0 * xq2
                + 8.0 * pb * (19.0 + 5.0 * p2 + 5.0 * x2) * pp * gp
                + 2.0 * gp
                    * (-4.0 * xb * (-1.0 + p2 + x2) * xp
                        + 114.0 * gp
                        + (p2 + x2)
                            * (149.0 + 8.0 * p4 + 60.0 * x2 + 8.0 * x4
                                + 4.0 * p2 * (15.0 + 4.0 * x2))
                            * gp));

    QfiReport::closed(pre * num, root * g)
}

/// Shift-only reduction of the blend catalog (`gamma' = pbar = pbar' = 0`).
pub fn qfi_added_blend_shift_only(xbar: f64, gamma: f64, xbar_prime: f64) -> f64 {
    let x2 = xbar * xbar;
    let seq = [
        3.0,
        4.0 * (13.0 + 3.0 * x2),
        4.0 * horner(&[83.0, 8.0, 4.0], x2),
        4.0 * horner(&[239.0, 135.0, 52.0, 4.0], x2),
        2.0 * horner(&[593.0, 784.0, 432.0, 96.0, 8.0], x2),
        4.0 * horner(&[91.0, 177.0, 84.0, 12.0], x2),
        4.0 * horner(&[35.0, 48.0, 12.0], x2),
        4.0 * (9.0 + 5.0 * x2),
        3.0,
    ];
    let mut num = 0.0;
    for (k, c) in seq.iter().enumerate() {
        num += c * gamma.powi(k as i32);
    }
    let root = 1.0 + 2.0 * (3.0 + x2) * gamma + gamma * gamma;
    2.0 * gamma * num * xbar_prime * xbar_prime / root.powi(4)
}

/// Gamma-only reduction of the blend catalog (`xbar' = pbar' = pbar = 0`);
/// its vacuum limit carries the palindromic coefficient table
/// `(3, 48, 420, 912, 1330, 912, 420, 48, 3)`.
pub fn qfi_added_blend_gamma_only(xbar: f64, gamma: f64, dgamma: f64) -> f64 {
    let x2 = xbar * xbar;
    let flank1 = 24.0 * (2.0 + x2);
    let flank2 = 4.0 * horner(&[105.0, 88.0, 16.0], x2);
    let flank3 = 8.0 * horner(&[114.0, 149.0, 60.0, 8.0], x2);
    let mid = 2.0 * horner(&[665.0, 992.0, 480.0, 96.0, 8.0], x2);
    let seq = [3.0, flank1, flank2, flank3, mid, flank3, flank2, flank1, 3.0];
    let mut num = 0.0;
    for (k, c) in seq.iter().enumerate() {
        num += c * gamma.powi(k as i32);
    }
    let root = 1.0 + 2.0 * (3.0 + x2) * gamma + gamma * gamma;
    num * dgamma * dgamma / (2.0 * gamma * gamma * root.powi(4))
}

/// Large-`xbar` asymptotic form shared by the subtracted, added and blend
/// families: `I_gaussian - 4 xbar' gamma' / (gamma xbar)`, accurate to
/// `O(1/xbar^2)`.
pub fn qfi_asymptotic(jet: &ParamJet) -> Result<f64> {
    if jet.state.xbar == 0.0 {
        return Err(Error::Singular("asymptotic form requires xbar != 0".into()));
    }
    Ok(qfi_gaussian(jet).value - 4.0 * jet.dxbar * jet.dgamma / (jet.state.gamma * jet.state.xbar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    fn jet(xb: f64, pb: f64, g: f64, xp: f64, pp: f64, gp: f64) -> ParamJet {
        ParamJet::new(GaussianSpec::new(xb, pb, g).unwrap(), xp, pp, gp).unwrap()
    }

    /// High-precision values computed symbolically and frozen:
    /// (xb, pb, g, xp, pp, gp, I_gauss, I_sub, I_add, I_blend).
    #[allow(clippy::type_complexity)]
    const FROZEN: [(f64, f64, f64, f64, f64, f64, f64, f64, f64, f64); 6] = [
        (0.3, 0.7, 1.0, 1.0, 2.0, 0.0, 10.0, 10.0, 16.009254251547382, 7.672740400170421),
        (1.0, 0.0, 2.0, 1.0, 0.0, 0.0, 4.0, 9.44, 6.6982248520710055, 3.197741681706696),
        (0.5, -0.3, 1.5, 1.0, 0.5, 1.0, 3.5555555555555554, 4.973567280467894,
         5.796122193231907, 2.2928431633153137),
        (-0.7, 1.1, 0.7, 0.25, -0.75, 0.5, 1.9497448979591836, 1.5166237676207692,
         2.254891791263852, 1.365074122262865),
        (0.0, 0.0, 2.5, 0.0, 0.0, 1.0, 0.08, 0.24, 0.24, 0.09610541389492289),
        (2.0, -1.0, 3.0, 1.0 / 3.0, 2.0 / 3.0, -0.5, 0.9768518518518519,
         1.4550653594771241, 1.3807235874816215, 1.1175878116335658),
    ];

    #[test]
    fn frozen_reference_values() {
        for &(xb, pb, g, xp, pp, gp, ig, isub, iadd, iblend) in &FROZEN {
            let j = jet(xb, pb, g, xp, pp, gp);
            assert_relative_eq!(qfi_gaussian(&j).value, ig, max_relative = 1e-13);
            assert_relative_eq!(qfi_subtracted(&j).unwrap().value, isub, max_relative = 1e-13);
            assert_relative_eq!(qfi_added(&j).value, iadd, max_relative = 1e-13);
            assert_relative_eq!(qfi_added_blend(&j).value, iblend, max_relative = 1e-13);
        }
    }

    #[test]
    fn gaussian_examples() {
        assert_relative_eq!(qfi_gaussian(&jet(0.0, 0.0, 1.0, 1.0, 0.0, 0.0)).value, 2.0);
        assert_eq!(qfi_gaussian(&jet(0.5, 0.5, 2.0, 0.0, 0.0, 0.0)).value, 0.0);
        assert_relative_eq!(qfi_gaussian(&jet(0.0, 0.0, 2.0, 0.0, 0.0, 1.0)).value, 0.125);
    }

    #[test]
    fn subtracted_coherent_recovers_coherent_value() {
        let j = jet(0.3, 0.7, 1.0, 1.0, 2.0, 0.0);
        assert_relative_eq!(qfi_subtracted(&j).unwrap().value, 10.0, max_relative = 1e-13);
        assert_relative_eq!(
            qfi_subtracted(&j).unwrap().value,
            qfi_coherent(1.0, 2.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn subtracted_zero_derivatives_gives_zero() {
        assert_eq!(qfi_subtracted(&jet(0.5, 0.1, 2.0, 0.0, 0.0, 0.0)).unwrap().value, 0.0);
    }

    #[test]
    fn subtracted_vacuum_is_domain_error() {
        assert!(matches!(
            qfi_subtracted(&jet(0.0, 0.0, 1.0, 1.0, 0.0, 0.0)),
            Err(Error::VacuumSubtraction(_))
        ));
    }

    #[test]
    fn shift_only_example_values() {
        let r = qfi_subtracted_shift_only(&jet(1.0, 0.0, 2.0, 1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(r.value, 236.0 / 25.0, max_relative = 1e-14);
        // gamma = 1 recovers the coherent value for any xbar
        for xb in [0.2, 1.0, 3.0] {
            let r = qfi_subtracted_shift_only(&jet(xb, 0.0, 1.0, 1.5, 0.0, 0.0)).unwrap();
            assert_relative_eq!(r.value, 2.0 * 1.5 * 1.5, max_relative = 1e-12);
        }
        // xbar = 0 reduction 2 g (3 - 2g + 3g^2)/(g-1)^2 at g = 2
        let r = qfi_subtracted_shift_only(&jet(0.0, 0.0, 2.0, 1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(r.value, 44.0, max_relative = 1e-14);
    }

    #[test]
    fn shift_only_contract_and_singularity() {
        assert!(matches!(
            qfi_subtracted_shift_only(&jet(1.0, 0.0, 2.0, 1.0, 0.0, 0.5)),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            qfi_subtracted_shift_only(&jet(0.0, 0.0, 1.0, 1.0, 0.0, 0.0)),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn shift_only_matches_full_formula() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let xb: f64 = rng.gen_range(0.1..2.0);
            let g: f64 = rng.gen_range(0.3..4.0);
            let xp: f64 = rng.gen_range(-2.0..2.0);
            let j = jet(xb, 0.0, g, xp, 0.0, 0.0);
            let full = qfi_subtracted(&j).unwrap().value;
            let special = qfi_subtracted_shift_only(&j).unwrap().value;
            assert_relative_eq!(full, special, max_relative = 1e-12);
        }
    }

    #[test]
    fn vacuum_series_examples() {
        let s = qfi_subtracted_vacuum_series(2.0, 1.0).unwrap();
        assert_relative_eq!(s.value, 44.0, max_relative = 1e-14);
        assert_relative_eq!(s.terms.iter().sum::<f64>(), 38.0, max_relative = 1e-14);

        let s = qfi_subtracted_vacuum_series(1.001, 1.0).unwrap();
        let sum: f64 = s.terms.iter().sum();
        assert!(((s.value - sum) / s.value).abs() < 1e-3);

        // leading Laurent term: (g-1)^2 * value -> 8 xp^2
        for g in [1.01, 1.001, 1.0001] {
            let s = qfi_subtracted_vacuum_series(g, 1.0).unwrap();
            let lead = (g - 1.0) * (g - 1.0) * s.value;
            assert_relative_eq!(lead, 8.0, max_relative = 20.0 * (g - 1.0));
        }
        assert!(qfi_subtracted_vacuum_series(1.0, 1.0).is_err());
    }

    #[test]
    fn eps_expansion_examples() {
        assert_relative_eq!(qfi_subtracted_eps_expansion(0.7, 0.0, 1.0).unwrap(), 2.0);
        assert_relative_eq!(
            qfi_subtracted_eps_expansion(1.0, 0.1, 1.0).unwrap(),
            2.64,
            max_relative = 1e-14
        );
        assert!(qfi_subtracted_eps_expansion(0.0, 0.1, 1.0).is_err());
        // agreement with the exact shift-only value to O(eps^3)
        let (xb, eps) = (0.5, 0.01);
        let exact =
            qfi_subtracted_shift_only(&jet(xb, 0.0, 1.0 + eps, 1.0, 0.0, 0.0)).unwrap().value;
        let approx2 = qfi_subtracted_eps_expansion(xb, eps, 1.0).unwrap();
        assert!((exact - approx2).abs() < 300.0 * eps * eps * eps);
    }

    #[test]
    fn squeeze_form_examples() {
        // identity with the gamma-form at gamma = e^{2r}
        let v1 = qfi_subtracted_squeeze_form(0.5, 1.0).unwrap();
        let v2 = qfi_subtracted_vacuum_series(1.0f64.exp(), 1.0).unwrap().value;
        assert_relative_eq!(v1, v2, max_relative = 1e-13);

        // r -> 0: r^2 * value -> 2 xp^2
        for r in [1e-2, 1e-3, 1e-4] {
            let v = qfi_subtracted_squeeze_form(r, 1.0).unwrap();
            assert_relative_eq!(r * r * v, 2.0, max_relative = 5.0 * r);
        }

        // three-term small-r law within 5% at r = 0.1
        let r = 0.1;
        let v = qfi_subtracted_squeeze_form(r, 1.0).unwrap();
        let approx3 = 2.0 * (1.0 / (r * r) + 2.0 / r + 14.0 / 3.0);
        assert!((v - approx3).abs() / v < 0.05);

        assert!(qfi_subtracted_squeeze_form(0.0, 1.0).is_err());
    }

    #[test]
    fn gamma_only_examples() {
        assert_relative_eq!(
            qfi_subtracted_gamma_only(0.0, 2.0, 1.0).unwrap(),
            3.0 / 8.0,
            max_relative = 1e-14
        );
        // finite limit near gamma = 1 on the xbar = 0 line
        for g in [1.0 + 1e-6, 1.0 - 1e-6] {
            let v = qfi_subtracted_gamma_only(0.0, g, 1.0).unwrap();
            assert_relative_eq!(v, 1.5, max_relative = 1e-4);
        }
        assert!(qfi_subtracted_gamma_only(0.0, 1.0, 1.0).is_err());
        // consistency with the full formula
        let j = jet(0.5, 0.0, 1.5, 0.0, 0.0, 1.0);
        assert_relative_eq!(
            qfi_subtracted_gamma_only(0.5, 1.5, 1.0).unwrap(),
            qfi_subtracted(&j).unwrap().value,
            max_relative = 1e-12
        );
    }

    #[test]
    fn added_point_values() {
        // vacuum displacement family: the added QFI is 4, twice the coherent value
        let r = qfi_added(&jet(0.0, 0.0, 1.0, 1.0, 0.0, 0.0));
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-14);
        // gamma-only vacuum point
        let r = qfi_added(&jet(0.0, 0.0, 1.0, 0.0, 0.0, 1.0));
        assert_relative_eq!(r.value, 1.5, max_relative = 1e-14);
        // zero derivatives
        assert_eq!(qfi_added(&jet(0.4, -0.2, 2.0, 0.0, 0.0, 0.0)).value, 0.0);
    }

    #[test]
    fn added_special_cases_match_full_formula() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let xb: f64 = rng.gen_range(-2.0..2.0);
            let g: f64 = rng.gen_range(0.3..4.0);
            let xp: f64 = rng.gen_range(-2.0..2.0);
            let gp: f64 = rng.gen_range(-2.0..2.0);
            assert_relative_eq!(
                qfi_added_shift_only(xb, g, xp),
                qfi_added(&jet(xb, 0.0, g, xp, 0.0, 0.0)).value,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                qfi_added_gamma_only(xb, g, gp),
                qfi_added(&jet(xb, 0.0, g, 0.0, 0.0, gp)).value,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn added_gamma_only_vacuum_law() {
        // exactly 3 gp^2 / (2 g^2) on the xbar = 0 line, no divergence anywhere
        for g in [0.3, 1.0, 2.0, 50.0] {
            assert_relative_eq!(
                qfi_added_gamma_only(0.0, g, 1.0),
                1.5 / (g * g),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn added_matches_gaussian_for_large_displacement() {
        let j = jet(100.0, 0.0, 2.0, 1.0, 0.0, 0.0);
        let add = qfi_added(&j).value;
        let gauss = qfi_gaussian(&j).value;
        assert!(((add - gauss) / gauss).abs() < 1e-3);
    }

    #[test]
    fn blend_point_values() {
        let r = qfi_added_blend(&jet(0.0, 0.0, 1.0, 1.0, 0.0, 0.0));
        assert_relative_eq!(r.value, 1.5, max_relative = 1e-14);
        let r = qfi_added_blend(&jet(0.0, 0.0, 1.0, 0.0, 0.0, 1.0));
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn blend_special_cases_match_full_formula() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let xb: f64 = rng.gen_range(-2.0..2.0);
            let g: f64 = rng.gen_range(0.3..4.0);
            let xp: f64 = rng.gen_range(-2.0..2.0);
            let gp: f64 = rng.gen_range(-2.0..2.0);
            assert_relative_eq!(
                qfi_added_blend_shift_only(xb, g, xp),
                qfi_added_blend(&jet(xb, 0.0, g, xp, 0.0, 0.0)).value,
                max_relative = 1e-11
            );
            assert_relative_eq!(
                qfi_added_blend_gamma_only(xb, g, gp),
                qfi_added_blend(&jet(xb, 0.0, g, 0.0, 0.0, gp)).value,
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn blend_gamma_only_vacuum_table() {
        // palindromic vacuum polynomial (3,48,420,912,1330,912,420,48,3):
        // value 4096/8192 = 1/2 at gamma = 1
        assert_relative_eq!(qfi_added_blend_gamma_only(0.0, 1.0, 1.0), 0.5);
        // large-gamma decay like the subtracted family, 3 gp^2/(2 g^2)
        let g = 100.0;
        let ratio = qfi_added_blend_gamma_only(0.0, g, 1.0) / (1.5 / (g * g));
        assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn non_commuting_limits_at_the_singular_corner() {
        // along gamma = 1 the value is the coherent 2 xp^2 for every xbar,
        // so the xbar -> 0 limit is finite (tolerance tracks the numerator
        // cancellation ~ eps/xbar^4)
        for xb in [0.3f64, 0.1, 0.03, 0.01] {
            let v = qfi_subtracted_shift_only(&jet(xb, 0.0, 1.0, 1.0, 0.0, 0.0)).unwrap().value;
            let tol = 1e-13 / xb.powi(4);
            assert_relative_eq!(v, 2.0, max_relative = tol);
        }
        // along xbar = 0 the value diverges; the scaled limit is 8 xp^2
        for eps in [1e-2, 1e-3, 1e-4] {
            let v = qfi_subtracted_shift_only(&jet(0.0, 0.0, 1.0 + eps, 1.0, 0.0, 0.0))
                .unwrap()
                .value;
            assert_relative_eq!(eps * eps * v, 8.0, max_relative = 30.0 * eps);
        }
    }

    #[test]
    fn asymptotic_examples() {
        let j = jet(2.0, 0.5, 2.0, 1.0, 0.3, 0.0);
        assert_relative_eq!(qfi_asymptotic(&j).unwrap(), qfi_gaussian(&j).value);
        assert!(qfi_asymptotic(&jet(0.0, 0.0, 2.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn exchange_symmetry_at_unit_gamma() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for _ in 0..50 {
            let xb: f64 = rng.gen_range(-2.0..2.0);
            let pb: f64 = rng.gen_range(-2.0..2.0);
            let xp: f64 = rng.gen_range(-2.0..2.0);
            let pp: f64 = rng.gen_range(-2.0..2.0);
            if xb * xb + pb * pb < 0.1 {
                continue;
            }
            let a = qfi_subtracted(&jet(xb, pb, 1.0, xp, pp, 0.0)).unwrap().value;
            let b = qfi_subtracted(&jet(pb, xb, 1.0, pp, xp, 0.0)).unwrap().value;
            assert_abs_diff_eq!(a, b, epsilon = 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn nonnegativity_on_random_grid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for _ in 0..300 {
            let j = jet(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.2..5.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            assert!(qfi_gaussian(&j).value >= 0.0);
            assert!(qfi_added(&j).value >= -1e-12);
            assert!(qfi_added_blend(&j).value >= -1e-12);
            if let Ok(r) = qfi_subtracted(&j) {
                assert!(r.value >= -1e-12, "negative subtracted QFI at {j:?}");
            }
        }
    }

    #[test]
    fn conditioning_note_near_singularity() {
        let j = jet(1e-4, 0.0, 1.0 + 1e-4, 1.0, 0.0, 0.0);
        let r = qfi_subtracted(&j).unwrap();
        assert!(r.conditioning < 1e-6);
        assert!(!r.notes.is_empty());
    }
}
