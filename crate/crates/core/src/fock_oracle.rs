//! Truncated photon-number-basis simulator: squeezed coherent state
//! preparation, beam splitter, heralded single-photon subtraction, success
//! probabilities, and fidelity-based QFI.
//!
//! This module is the ground truth the phase-space machinery is checked
//! against. Amplitudes of `S(xi) D(alpha) |0>` are generated by the
//! three-term recurrence that follows from the eigenvalue relation
//! `(mu a + nu a^dag) |psi> = alpha |psi>` with `mu = cosh r`,
//! `nu = e^{i theta} sinh r`; the Hermite-polynomial photon statistics are
//! kept only as an independent cross-check formula, since they mix
//! factorials with a `sqrt(sinh 2r)` argument that is singular at `r = 0`
//! and overflow-prone at large `n`.

use crate::phase_space::{GaussianSpec, ParamJet, StateKind};
use crate::qfi_closed::{self, Method, QfiReport};
use crate::{Error, Result};
use num_complex::Complex64;

/// Hard limit on the number-basis cutoff unless a caller raises it.
pub const DEFAULT_MAX_CUTOFF: usize = 512;

/// Relative tail mass required of prepared states.
pub const TAIL_EPS: f64 = 1e-12;

/// Default parameter step for [`fidelity_qfi`].
pub const DEFAULT_FIDELITY_STEP: f64 = 1e-4;

/// Displacement and squeeze parameters of `S(xi) D(alpha) |0>` with
/// `xi = r e^{i vartheta}`.
///
/// Negative `r` is accepted and treated as squeezing along the conjugate
/// axis (`xi -> |r| e^{i(vartheta + pi)}`); this keeps the map from
/// [`GaussianSpec`] (`r = ln(gamma)/2`) total for `gamma < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub alpha: Complex64,
    pub r: f64,
    pub vartheta: f64,
}

impl SqueezeParams {
    pub fn new(alpha: Complex64, r: f64, vartheta: f64) -> Result<Self> {
        for (name, value) in [("alpha.re", alpha.re), ("alpha.im", alpha.im), ("r", r),
            ("vartheta", vartheta)]
        {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        Ok(Self { alpha, r, vartheta })
    }

    /// Map a pure Gaussian state to preparation parameters with
    /// `vartheta = 0`: `r = ln(gamma)/2`, `Re alpha = xbar e^r / sqrt2`,
    /// `Im alpha = pbar e^{-r} / sqrt2`. Fixed by matching first and second
    /// quadrature moments of `S(xi) D(alpha) |0>`.
    pub fn from_gaussian(spec: &GaussianSpec) -> Self {
        let r = spec.gamma.ln() / 2.0;
        let alpha = Complex64::new(
            spec.xbar * r.exp() / std::f64::consts::SQRT_2,
            spec.pbar * (-r).exp() / std::f64::consts::SQRT_2,
        );
        Self { alpha, r, vartheta: 0.0 }
    }
}

/// Complex amplitudes of a single-mode state in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
    norm2: f64,
}

impl FockVector {
    /// Wrap raw amplitudes; fails on an all-zero vector.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Normalization("empty amplitude vector".into()));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::Normalization(format!("squared norm {norm2}")));
        }
        Ok(Self { amps, norm2 })
    }

    pub fn vacuum() -> Self {
        Self { amps: vec![Complex64::new(1.0, 0.0)], norm2: 1.0 }
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    /// Probability of finding `n` photons.
    pub fn probability(&self, n: usize) -> f64 {
        self.amp(n).norm_sqr() / self.norm2
    }

    pub fn mean_photon(&self) -> f64 {
        let weighted: f64 =
            self.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
        weighted / self.norm2
    }

    fn normalized(mut self) -> Self {
        let scale = 1.0 / self.norm2.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        self.norm2 = 1.0;
        self
    }

    /// `<self|other>` over the common cutoff.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            / (self.norm2.sqrt() * other.norm2.sqrt())
    }

    /// Squared-overlap fidelity.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// `<a>`, `<a^2>` and `<a^dag a>` in one pass.
    fn ladder_moments(&self) -> (Complex64, Complex64, f64) {
        let mut a1 = Complex64::default();
        let mut a2 = Complex64::default();
        let mut n1 = 0.0;
        for (n, amp) in self.amps.iter().enumerate() {
            n1 += n as f64 * amp.norm_sqr();
            if n + 1 < self.amps.len() {
                a1 += amp.conj() * self.amps[n + 1] * ((n + 1) as f64).sqrt();
            }
            if n + 2 < self.amps.len() {
                a2 += amp.conj() * self.amps[n + 2] * (((n + 1) * (n + 2)) as f64).sqrt();
            }
        }
        (a1 / self.norm2, a2 / self.norm2, n1 / self.norm2)
    }

    /// Mean quadratures and variances `(xbar, pbar, var_x, var_p)`.
    pub fn quadrature_moments(&self) -> (f64, f64, f64, f64) {
        let (a1, a2, n1) = self.ladder_moments();
        let xbar = std::f64::consts::SQRT_2 * a1.re;
        let pbar = std::f64::consts::SQRT_2 * a1.im;
        // x^2 = (a^2 + a^dag^2 + 2 a^dag a + 1)/2, p^2 = -(a^2 + a^dag^2 - 2 a^dag a - 1)/2
        let x2 = (2.0 * a2.re + 2.0 * n1 + 1.0) / 2.0;
        let p2 = (-2.0 * a2.re + 2.0 * n1 + 1.0) / 2.0;
        (xbar, pbar, x2 - xbar * xbar, p2 - pbar * pbar)
    }
}

/// Cumulative `ln(n!)` table for `0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

/// Amplitudes of the squeezed coherent state `S(xi) D(alpha) |0>`.
///
/// The requested cutoff is auto-extended until the last two amplitudes carry
/// less than [`TAIL_EPS`] of the total weight; exceeding `hard_limit` is a
/// resource error.
pub fn squeezed_coherent_with_limit(
    params: &SqueezeParams,
    cutoff: usize,
    hard_limit: usize,
) -> Result<FockVector> {
    if cutoff > hard_limit {
        return Err(Error::CutoffExceeded { requested: cutoff, limit: hard_limit });
    }
    let mut n_max = cutoff.max(8);
    loop {
        let v = squeezed_coherent_fixed(params, n_max)?;
        let tail = v.amp(n_max).norm_sqr().max(v.amp(n_max - 1).norm_sqr());
        if tail < TAIL_EPS {
            return Ok(v);
        }
        if n_max >= hard_limit {
            return Err(Error::CutoffExceeded { requested: n_max + 8, limit: hard_limit });
        }
        n_max = (n_max * 3 / 2 + 8).min(hard_limit);
    }
}

/// Amplitudes at exactly the requested cutoff, with no adequacy check.
/// Correlated evaluations (overlaps of nearby states) need a common cutoff
/// more than they need individually certified tails.
fn squeezed_coherent_fixed(params: &SqueezeParams, n_max: usize) -> Result<FockVector> {
    let mu = params.r.cosh();
    let nu = Complex64::from_polar(params.r.sinh(), params.vartheta);
    let alpha = params.alpha;
    // c_{n+1} = (alpha c_n - nu sqrt(n) c_{n-1}) / (mu sqrt(n+1)),
    // seeded unnormalized with c_0 = 1.
    let mut amps = Vec::with_capacity(n_max + 1);
    amps.push(Complex64::new(1.0, 0.0));
    let mut prev = Complex64::default();
    for n in 0..n_max {
        let cur = amps[n];
        let next = (alpha * cur - nu * (n as f64).sqrt() * prev) / (mu * ((n + 1) as f64).sqrt());
        amps.push(next);
        prev = cur;
    }
    Ok(FockVector::from_amplitudes(amps)?.normalized())
}

/// [`squeezed_coherent_with_limit`] with the default hard limit.
pub fn squeezed_coherent(params: &SqueezeParams, cutoff: usize) -> Result<FockVector> {
    squeezed_coherent_with_limit(params, cutoff, DEFAULT_MAX_CUTOFF)
}

/// Photon-number probability of the squeezed coherent state from the
/// Hermite-polynomial closed form,
///
/// `P_n = tanh^n r / (2^n n! cosh r) * exp(-|alpha|^2
///        + Re(e^{-i vartheta} alpha^2) tanh r) * |H_n(alpha e^{-i vartheta/2} / sqrt(sinh 2r))|^2`.
///
/// At `r = 0` the formula is singular and the coherent-state Poisson law is
/// used instead.
pub fn photon_probability(n: usize, params: &SqueezeParams) -> f64 {
    let (r, vartheta) = if params.r >= 0.0 {
        (params.r, params.vartheta)
    } else {
        (-params.r, params.vartheta + std::f64::consts::PI)
    };
    let alpha = params.alpha;
    if r == 0.0 {
        // Poisson fallback
        let a2 = alpha.norm_sqr();
        if a2 == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        let lnfact = ln_factorials(n);
        return (-a2 + n as f64 * a2.ln() - lnfact[n]).exp();
    }
    let tanh_r = r.tanh();
    let arg = alpha * Complex64::from_polar(1.0, -vartheta / 2.0) / (2.0 * r).sinh().sqrt();
    let (h_mag2_log, h_is_zero) = hermite_mag2_log(n, arg);
    if h_is_zero {
        return 0.0;
    }
    let lnfact = ln_factorials(n);
    let exponent = n as f64 * tanh_r.ln() - n as f64 * std::f64::consts::LN_2 - lnfact[n]
        - r.cosh().ln()
        - alpha.norm_sqr()
        + (Complex64::from_polar(1.0, -vartheta) * alpha * alpha).re * tanh_r
        + h_mag2_log;
    exponent.exp()
}

/// `ln |H_n(z)|^2` via the scaled three-term recurrence
/// `H_{n+1} = 2 z H_n - 2 n H_{n-1}`. Returns a zero flag for exact zeros.
fn hermite_mag2_log(n: usize, z: Complex64) -> (f64, bool) {
    let mut log_scale = 0.0;
    let mut h_prev = Complex64::new(1.0, 0.0); // H_0
    if n == 0 {
        return (0.0, false);
    }
    let mut h = 2.0 * z; // H_1
    for k in 1..n {
        let next = 2.0 * (z * h - k as f64 * h_prev);
        h_prev = h;
        h = next;
        let mag = h.norm_sqr().max(h_prev.norm_sqr());
        if mag > 1e200 {
            h *= 1e-100;
            h_prev *= 1e-100;
            log_scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    if h.norm_sqr() == 0.0 {
        (f64::NEG_INFINITY, true)
    } else {
        (h.norm_sqr().ln() + 2.0 * log_scale, false)
    }
}

/// Photon subtraction in the number basis: amplitudes shift down with
/// `sqrt(n)` weights and renormalize by the mean photon number.
pub fn subtract_fock(state: &FockVector) -> Result<FockVector> {
    let n_mean = state.mean_photon();
    if n_mean <= 0.0 {
        return Err(Error::VacuumSubtraction(n_mean));
    }
    let amps: Vec<Complex64> = (1..state.amps.len())
        .map(|n| state.amps[n] * (n as f64).sqrt() / state.norm2.sqrt())
        .collect();
    Ok(FockVector::from_amplitudes(amps)?.normalized())
}

/// Photon addition in the number basis: amplitudes shift up with
/// `sqrt(n+1)` weights; the normalization is exactly `N + 1`.
pub fn add_fock(state: &FockVector) -> Result<FockVector> {
    let mut amps = vec![Complex64::default(); state.amps.len() + 1];
    for (n, a) in state.amps.iter().enumerate() {
        amps[n + 1] = a * ((n + 1) as f64).sqrt() / state.norm2.sqrt();
    }
    Ok(FockVector::from_amplitudes(amps)?.normalized())
}

/// Two-mode amplitude table `a[n][m]` for `|n, m>`; mode one is the
/// heralding (tap-off) mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFock {
    amps: Vec<Complex64>,
    ncut: usize,
    mcut: usize,
}

impl TwoModeFock {
    pub fn new(ncut: usize, mcut: usize) -> Self {
        Self { amps: vec![Complex64::default(); (ncut + 1) * (mcut + 1)], ncut, mcut }
    }

    /// `|0> (x) |state>`, with enough first-mode room for a photon-number
    /// conserving unitary to scatter every sector.
    pub fn vacuum_tensor(state: &FockVector) -> Self {
        let mcut = state.cutoff();
        let mut t = Self::new(mcut, mcut);
        let scale = 1.0 / state.norm2.sqrt();
        for (m, a) in state.amps.iter().enumerate() {
            *t.amp_mut(0, m) = a * scale;
        }
        t
    }

    /// General product state `|a> (x) |b>`.
    pub fn product(a: &FockVector, b: &FockVector) -> Self {
        let mut t = Self::new(a.cutoff(), b.cutoff());
        let scale = 1.0 / (a.norm2.sqrt() * b.norm2.sqrt());
        for (n, an) in a.amps.iter().enumerate() {
            for (m, bm) in b.amps.iter().enumerate() {
                *t.amp_mut(n, m) = an * bm * scale;
            }
        }
        t
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.ncut, self.mcut)
    }

    pub fn amp(&self, n: usize, m: usize) -> Complex64 {
        self.amps[n * (self.mcut + 1) + m]
    }

    fn amp_mut(&mut self, n: usize, m: usize) -> &mut Complex64 {
        &mut self.amps[n * (self.mcut + 1) + m]
    }

    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Dual-rail matrix element `<k, N-k| U_BS |m, N-m>` of
/// `U_BS = exp(delta (a^dag b - a b^dag))`, evaluated with log-factorial
/// accumulation so large `N` does not overflow.
pub fn beam_splitter_element(k: usize, m: usize, big_n: usize, delta: f64) -> Result<f64> {
    if k > big_n || m > big_n {
        return Err(Error::Contract(format!(
            "beam splitter indices k={k}, m={m} exceed total photon number N={big_n}"
        )));
    }
    let lnf = ln_factorials(big_n);
    Ok(bs_element_with_table(k, m, big_n, delta.cos(), delta.sin(), &lnf))
}

fn bs_element_with_table(
    k: usize,
    m: usize,
    big_n: usize,
    cos_d: f64,
    sin_d: f64,
    lnf: &[f64],
) -> f64 {
    let prefactor_log =
        0.5 * (lnf[k] + lnf[big_n - k] - lnf[m] - lnf[big_n - m]);
    let l_min = m.saturating_sub(k);
    let l_max = (big_n - k).min(m);
    let mut total = 0.0;
    for l in l_min..=l_max {
        // binom(m, l) * binom(N-m, N-k-l)
        let ln_binoms = lnf[m] - lnf[l] - lnf[m - l] + lnf[big_n - m]
            - lnf[big_n - k - l]
            - lnf[k + l - m];
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let cos_pow = (m + big_n - k) as i32 - 2 * l as i32;
        let sin_pow = (k + 2 * l - m) as i32;
        total += sign
            * (prefactor_log + ln_binoms).exp()
            * cos_d.powi(cos_pow)
            * sin_d.powi(sin_pow);
    }
    total
}

/// Apply the beam splitter blockwise per total-photon-number sector.
///
/// The output table is grown to the highest occupied sector so every sector
/// rotates as a complete dual-rail block and the norm is preserved exactly
/// (a clipped rectangular table would silently lose amplitude).
pub fn apply_beam_splitter(state: &TwoModeFock, delta: f64) -> TwoModeFock {
    let (ncut, mcut) = state.cutoffs();
    let occupied_max = (0..=(ncut + mcut))
        .rev()
        .find(|&total| {
            let lo = total.saturating_sub(mcut);
            let hi = total.min(ncut);
            (lo..=hi).any(|n| state.amp(n, total - n).norm_sqr() > 0.0)
        })
        .unwrap_or(0);
    let lnf = ln_factorials(occupied_max);
    let (cos_d, sin_d) = (delta.cos(), delta.sin());
    let mut out = TwoModeFock::new(occupied_max.max(ncut), occupied_max.max(mcut));
    for total in 0..=occupied_max {
        let in_lo = total.saturating_sub(mcut);
        let in_hi = total.min(ncut);
        for m in in_lo..=in_hi {
            let amp_in = state.amp(m, total - m);
            if amp_in.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..=total {
                let element = bs_element_with_table(k, m, total, cos_d, sin_d, &lnf);
                *out.amp_mut(k, total - k) += element * amp_in;
            }
        }
    }
    out
}

/// Project mode one onto a single photon: returns the normalized conditional
/// state of mode two and the success probability.
pub fn herald_single_photon(state: &TwoModeFock) -> Result<(FockVector, f64)> {
    let (ncut, mcut) = state.cutoffs();
    if ncut < 1 {
        return Err(Error::HeraldingImpossible(0.0));
    }
    let amps: Vec<Complex64> = (0..=mcut).map(|m| state.amp(1, m)).collect();
    let p1: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if p1 < 1e-300 {
        return Err(Error::HeraldingImpossible(p1));
    }
    Ok((FockVector::from_amplitudes(amps)?.normalized(), p1))
}

/// Closed form of the single-photon heralding probability for a squeezed
/// vacuum input:
/// `sin^2(2 delta) sech(r) tanh^2(r) / (4 (1 - cos^4(delta) tanh^2 r)^{3/2})`.
pub fn herald_probability_closed(r: f64, delta: f64) -> f64 {
    let sech = 1.0 / r.cosh();
    let t2 = r.tanh() * r.tanh();
    let s = (2.0 * delta).sin();
    let c4 = delta.cos().powi(4);
    s * s * sech * t2 / (4.0 * (1.0 - c4 * t2).powf(1.5))
}

/// Small-squeeze law `sin^2(2 delta) r^2 / 4`.
pub fn herald_probability_small_r(r: f64, delta: f64) -> f64 {
    let s = (2.0 * delta).sin();
    0.25 * s * s * r * r
}

/// Heralding probability as the series `sum_n P_n n cos^{2(n-1)} delta
/// sin^2 delta` with squeezed-vacuum photon statistics
/// `P_2k = sech r (2k-1)!!/(2k)!! tanh^{2k} r`, evaluated in log space.
/// Stable at any squeeze strength, independent of the cutoff machinery.
pub fn herald_probability_series(r: f64, delta: f64) -> f64 {
    let t = r.tanh().abs();
    if t == 0.0 || delta.sin() == 0.0 {
        return 0.0;
    }
    let ln_sech = -r.cosh().ln();
    let ln_t = t.ln();
    let ln_cos2 = delta.cos().abs().max(1e-300).ln() * 2.0;
    let sin2 = delta.sin() * delta.sin();
    let mut total = 0.0;
    // ln P_2k accumulated incrementally: P_2k/P_2(k-1) = tanh^2 r (2k-1)/(2k)
    let mut ln_p = ln_sech;
    let mut k = 0usize;
    loop {
        k += 1;
        ln_p += 2.0 * ln_t + ((2.0 * k as f64 - 1.0) / (2.0 * k as f64)).ln();
        let n = 2 * k;
        let term = (ln_p + (n as f64 - 1.0) * ln_cos2).exp() * n as f64 * sin2;
        total += term;
        if (term < 1e-18 * total.max(1e-300) && k > 4) || k > 100_000 {
            break;
        }
    }
    total
}

/// Heralding probability from the full two-mode simulation: prepare
/// `S D |0>`, mix with vacuum at angle `delta`, project on one photon.
pub fn herald_probability_simulated(params: &SqueezeParams, delta: f64) -> Result<f64> {
    let state = squeezed_coherent(params, 32)?;
    let two_mode = TwoModeFock::vacuum_tensor(&state);
    let mixed = apply_beam_splitter(&two_mode, delta);
    let (_, p1) = herald_single_photon(&mixed)?;
    Ok(p1)
}

/// Fidelity-based QFI of a pure-state family:
/// `I = 8 (1 - |<psi(theta)|psi(theta + dtheta)>|) / dtheta^2` in the limit,
/// here evaluated with a symmetric stencil and one Richardson step over
/// `dtheta` and `dtheta/2`. Accuracy is about 1e-5 relative for
/// well-conditioned families at the default step.
pub fn fidelity_qfi<F>(family: F, theta: f64, dtheta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockVector>,
{
    if !dtheta.is_finite() || dtheta <= 0.0 {
        return Err(Error::Contract(format!("dtheta must be positive, got {dtheta}")));
    }
    let estimate = |h: f64| -> Result<f64> {
        let minus = family(theta - h)?;
        let plus = family(theta + h)?;
        let ovl = minus.overlap(&plus).norm();
        if ovl > 1.0 + 1e-9 {
            return Err(Error::Normalization(format!("overlap magnitude {ovl} exceeds one")));
        }
        // separation 2h: 1 - |ovl| = I (2h)^2 / 8 + O(h^4)
        Ok(2.0 * (1.0 - ovl) / (h * h))
    };
    let coarse = estimate(dtheta)?;
    let fine = estimate(dtheta / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Number-basis family along a jet's affine parameter path, via the
/// Gaussian-to-squeeze mapping. Only pure families are representable.
///
/// The cutoff is frozen from the working point: overlaps of two family
/// members truncated at *different* cutoffs pick up an unmatched-tail bias
/// that does not cancel in `1 - |overlap|`, which is exactly the quantity
/// the fidelity QFI amplifies by `1/dtheta^2`.
pub fn jet_family(jet: &ParamJet, kind: StateKind) -> impl Fn(f64) -> Result<FockVector> + '_ {
    let base_cutoff = squeezed_coherent(
        &SqueezeParams::from_gaussian(&jet.state),
        fock_cutoff_guess(&jet.state),
    )
    .map(|base| (base.cutoff() + 4).min(DEFAULT_MAX_CUTOFF));
    move |theta: f64| {
        let cutoff = base_cutoff.clone()?;
        let spec = GaussianSpec::new(
            jet.state.xbar + theta * jet.dxbar,
            jet.state.pbar + theta * jet.dpbar,
            jet.state.gamma + theta * jet.dgamma,
        )?;
        let params = SqueezeParams::from_gaussian(&spec);
        let base = squeezed_coherent_fixed(&params, cutoff)?;
        match kind {
            StateKind::Gaussian => Ok(base),
            StateKind::Subtracted => subtract_fock(&base),
            StateKind::Added => add_fock(&base),
            StateKind::AddedBlend => Err(Error::Contract(
                "the blend family is mixed and has no number-basis vector".into(),
            )),
        }
    }
}

fn fock_cutoff_guess(spec: &GaussianSpec) -> usize {
    let r = spec.gamma.ln() / 2.0;
    let alpha2 = (spec.xbar * spec.xbar * (2.0 * r).exp()
        + spec.pbar * spec.pbar * (-2.0 * r).exp())
        / 2.0;
    let n_eff = alpha2 + r.sinh() * r.sinh();
    ((n_eff + 12.0 * (n_eff + 1.0).sqrt() + 24.0) as usize).min(DEFAULT_MAX_CUTOFF)
}

/// Step size for the fidelity estimator adapted to the jet: a fraction of
/// the parameter distance to the subtracted family's singular set, where the
/// QFI varies fastest along theta. Away from it the default coarse step
/// keeps `1 - |overlap|` far above the f64 roundoff floor.
pub fn fidelity_step(jet: &ParamJet, kind: StateKind) -> f64 {
    let mut h: f64 = 1e-3;
    if kind == StateKind::Subtracted {
        let (xb, pb, g) = (jet.state.xbar, jet.state.pbar, jet.state.gamma);
        let (xp, pp, gp) = (jet.dxbar, jet.dpbar, jet.dgamma);
        let s = xb * xb + pb * pb;
        let d_root = 1.0 + 2.0 * (-1.0 + s) * g + g * g;
        // rate of change of the denominator root along theta
        let d_rate = 2.0 * (2.0 * (xb * xp + pb * pp) * g + (-1.0 + s) * gp + g * gp);
        h = h.min(0.1 * d_root.abs() / d_rate.abs().max(1e-9)).max(1e-7);
    }
    h
}

/// Fidelity-based QFI for a jet family at `theta = 0`, with the adapted step
/// and a second Richardson level (`h`, `h/2`, `h/4`) for an `O(h^6)`
/// truncation error.
pub fn qfi_fock(jet: &ParamJet, kind: StateKind) -> Result<QfiReport> {
    let h = fidelity_step(jet, kind);
    let family = jet_family(jet, kind);
    let r1 = fidelity_qfi(&family, 0.0, h)?;
    let r1_half = fidelity_qfi(&family, 0.0, h / 2.0)?;
    let value = (16.0 * r1_half - r1) / 15.0;
    Ok(QfiReport::with_method(
        value,
        Method::Fock,
        crate::qfi_numeric::family_conditioning(jet, kind),
    ))
}

/// Preparation-rate-aware QFI: the heralding success probability times the
/// subtracted-state QFI. `r` must be the squeeze parameter of the jet's
/// state (`gamma = e^{2r}`); for a displaced state the probability comes
/// from the full two-mode simulation, for `xbar = pbar = 0` from the closed
/// form. In the `r -> 0` limit with a shift-only jet the product converges
/// to `sin^2(2 delta) xbar'^2 / 2`.
pub fn effective_qfi(jet: &ParamJet, r: f64, delta: f64) -> Result<f64> {
    let gamma_expected = (2.0 * r).exp();
    let gamma = jet.state.gamma;
    if (gamma - gamma_expected).abs() > 1e-9 * gamma.max(1.0) {
        return Err(Error::Contract(format!(
            "squeeze parameter r={r} implies gamma={gamma_expected}, jet has gamma={gamma}"
        )));
    }
    let qfi = qfi_closed::qfi_subtracted(jet)?.value;
    let p1 = if jet.state.xbar == 0.0 && jet.state.pbar == 0.0 {
        herald_probability_closed(r, delta)
    } else {
        herald_probability_simulated(&SqueezeParams::from_gaussian(&jet.state), delta)?
    };
    Ok(p1 * qfi)
}

/// Wigner function value reconstructed from number-basis amplitudes,
/// `W = sum_{n,m} c_n conj(c_m) W_{|n><m|}(x, p)` with the associated
/// Laguerre kernel for the cross terms.
pub fn wigner_from_fock(state: &FockVector, x: f64, p: f64) -> f64 {
    let beta2 = 2.0 * (x * x + p * p);
    let envelope = (-(x * x) - p * p).exp() / std::f64::consts::PI;
    let len = state.amps.len();
    let lnf = ln_factorials(len);
    let mut total = 0.0;
    // diagonal and upper triangle (n >= m); lower triangle by conjugation
    for m in 0..len {
        let cm = state.amps[m];
        if cm.norm_sqr() == 0.0 {
            continue;
        }
        for n in m..len {
            let cn = state.amps[n];
            if cn.norm_sqr() == 0.0 {
                continue;
            }
            let d = n - m;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let scale = sign
                * (0.5 * (lnf[m] - lnf[n]) + 0.5 * d as f64 * std::f64::consts::LN_2).exp();
            let lag = laguerre_assoc(m, d as f64, beta2);
            let kernel = scale
                * Complex64::new(x, -p).powu(d as u32)
                * lag;
            let contrib = cn * cm.conj() * kernel;
            total += if n == m { contrib.re } else { 2.0 * contrib.re };
        }
    }
    total * envelope / state.norm2
}

/// Associated Laguerre polynomial `L_m^k(x)` by upward recurrence.
fn laguerre_assoc(m: usize, k: f64, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + k - x;
    for i in 1..m {
        let next = ((2.0 * i as f64 + k + 1.0 - x) * cur - (i as f64 + k) * prev) / (i as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
