//! Independent numerical evaluation of the QFI.
//!
//! Two deliberately different paths cross-check every closed form in
//! [`crate::qfi_closed`]:
//!
//! - [`qfi_moment`] integrates `2 (2 pi) (dW/dtheta)^2` exactly via the
//!   closed-form Gaussian moments of [`crate::phase_space`]. No
//!   discretization at all.
//! - [`qfi_finite_difference`] replaces the analytic theta-derivative with a
//!   central difference of Wigner functions evaluated pointwise on a
//!   tensor-product Gauss-Legendre grid. It shares nothing with the moment
//!   path except the state definition.

use crate::phase_space::{self, GaussianSpec, ParamJet, StateKind};
use crate::qfi_closed::{Method, QfiReport};
use crate::{Error, Result};
use gauss_quad::legendre::GaussLegendre;

const TWO_TWOPI: f64 = 4.0 * std::f64::consts::PI;

/// Magnitude of the denominator root factor of the family's closed form;
/// used for conditioning diagnostics of the numerical paths as well.
pub fn family_conditioning(jet: &ParamJet, kind: StateKind) -> f64 {
    let g = jet.state.gamma;
    let s = jet.state.xbar * jet.state.xbar + jet.state.pbar * jet.state.pbar;
    match kind {
        StateKind::Gaussian => 2.0 * g * g,
        StateKind::Subtracted => (g + 2.0 * (-1.0 + s) * g * g + g.powi(3)).abs(),
        StateKind::Added => g * (1.0 + 2.0 * (1.0 + s) * g + g * g),
        StateKind::AddedBlend => g * (1.0 + 2.0 * (3.0 + s) * g + g * g),
    }
}

/// QFI by exact phase-space moment integration:
/// build `dW/dtheta`, square it, integrate, multiply by `2 (2 pi)`.
pub fn qfi_moment(jet: &ParamJet, kind: StateKind) -> Result<QfiReport> {
    let dw = phase_space::theta_derivative(jet, kind)?;
    let squared = dw.product(&dw);
    let value = TWO_TWOPI * squared.moment_integral();
    Ok(QfiReport::with_method(value, Method::Moment, family_conditioning(jet, kind)))
}

/// Tensor-product quadrature settings for the finite-difference path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    /// Gauss-Legendre nodes per axis.
    pub nodes_per_axis: usize,
    /// Half-extent of the box in units of the Gaussian standard deviation
    /// (plus the center offset). Seven sigma keeps the truncated tail of the
    /// squared, polynomially weighted envelope below 1e-15.
    pub sigma_multiple: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { nodes_per_axis: 81, sigma_multiple: 7.0 }
    }
}

fn path_spec(jet: &ParamJet, theta: f64) -> Result<GaussianSpec> {
    GaussianSpec::new(
        jet.state.xbar + theta * jet.dxbar,
        jet.state.pbar + theta * jet.dpbar,
        jet.state.gamma + theta * jet.dgamma,
    )
}

/// One central-difference estimate of the QFI at step `h`, integrating
/// `(W(theta+h) - W(theta-h))^2 / (2h)^2` on the quadrature grid.
pub fn qfi_finite_difference_raw(
    jet: &ParamJet,
    kind: StateKind,
    h: f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    fd_estimate(jet, kind, h, grid).map(|(value, _)| value)
}

/// Central-difference estimate plus a bound on its floating-point roundoff,
/// `2 eps max|W| / (2h) * Int |dW|` to first order.
fn fd_estimate(
    jet: &ParamJet,
    kind: StateKind,
    h: f64,
    grid: &QuadratureGrid,
) -> Result<(f64, f64)> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Contract(format!("finite-difference step must be positive, got {h}")));
    }
    let w_plus = phase_space::wigner_state(&path_spec(jet, h)?, kind)?;
    let w_minus = phase_space::wigner_state(&path_spec(jet, -h)?, kind)?;

    // Envelope: widths of the wider of the two states, centers from the jet.
    let g_lo = (jet.state.gamma - h * jet.dgamma.abs()).max(crate::phase_space::GAMMA_MIN);
    let g_hi = jet.state.gamma + h * jet.dgamma.abs();
    let sigma_x = 1.0 / (2.0 * g_lo).sqrt();
    let sigma_p = (g_hi / 2.0).sqrt();
    let cx = jet.state.xbar;
    let cp = jet.state.pbar;
    let lx = grid.sigma_multiple * sigma_x + cx.abs() + h * jet.dxbar.abs();
    let lp = grid.sigma_multiple * sigma_p + cp.abs() + h * jet.dpbar.abs();

    let rule = GaussLegendre::new(
        std::num::NonZeroUsize::new(grid.nodes_per_axis)
            .ok_or_else(|| Error::Contract("quadrature grid needs at least one node".into()))?,
    );
    let pairs = rule.as_node_weight_pairs();

    let mut total = 0.0;
    let mut abs_moment = 0.0;
    let mut w_max: f64 = 0.0;
    for &(tx, wx) in pairs {
        let x = cx + lx * tx;
        for &(tp, wp) in pairs {
            let p = cp + lp * tp;
            let vp = w_plus.eval(x, p);
            let vm = w_minus.eval(x, p);
            w_max = w_max.max(vp.abs()).max(vm.abs());
            let dw = (vp - vm) / (2.0 * h);
            total += wx * wp * dw * dw;
            abs_moment += wx * wp * dw.abs();
        }
    }
    let scale = TWO_TWOPI * lx * lp;
    let noise_amp = f64::EPSILON * w_max / (2.0 * h);
    let noise = scale * (2.0 * noise_amp * abs_moment + 4.0 * noise_amp * noise_amp);
    Ok((scale * total, noise))
}

/// Finite-difference QFI evaluated at `h`, `h/2` and `h/4`, Richardson
/// extrapolated over the two finest steps, with an error estimate from the
/// halving residual.
///
/// The central difference carries an `O(h^2)` truncation error; the
/// extrapolated value cancels it. When the halving residuals fall to the
/// roundoff bound the truncation signal is gone and a step-too-small note is
/// attached.
pub fn qfi_finite_difference(jet: &ParamJet, kind: StateKind, h: f64) -> Result<QfiReport> {
    let grid = QuadratureGrid::default();
    let (coarse, _) = fd_estimate(jet, kind, h, &grid)?;
    let (mid, _) = fd_estimate(jet, kind, h / 2.0, &grid)?;
    let (fine, noise_fine) = fd_estimate(jet, kind, h / 4.0, &grid)?;

    let refined = (4.0 * fine - mid) / 3.0;
    let err = (fine - mid).abs() / 3.0;
    let mut report = QfiReport::with_method(
        refined,
        Method::FiniteDifference,
        family_conditioning(jet, kind),
    );
    report.notes.push(format!("h-halving error estimate {err:.3e}"));

    // When the halving residual is no larger than the roundoff bound the
    // truncation signal is gone: the step is too small.
    let d2 = (mid - fine).abs();
    let d1 = (coarse - mid).abs();
    if noise_fine > 0.0 && (d2 <= 2.0 * noise_fine || d1 <= 2.0 * noise_fine) {
        report.notes.push(format!(
            "h-halving inconsistency: residuals ({d1:.2e}, {d2:.2e}) within roundoff \
             {noise_fine:.2e}; step too small, cancellation dominates"
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfi_closed;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    fn jet(xb: f64, pb: f64, g: f64, xp: f64, pp: f64, gp: f64) -> ParamJet {
        ParamJet::new(GaussianSpec::new(xb, pb, g).unwrap(), xp, pp, gp).unwrap()
    }

    #[test]
    fn moment_reproduces_coherent_value() {
        let j = jet(0.4, -0.2, 1.0, 1.0, 0.0, 0.0);
        for kind in [StateKind::Gaussian, StateKind::Subtracted] {
            let r = qfi_moment(&j, kind).unwrap();
            assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn moment_matches_subtracted_shift_case() {
        let j = jet(1.0, 0.0, 2.0, 1.0, 0.0, 0.0);
        let r = qfi_moment(&j, StateKind::Subtracted).unwrap();
        assert_relative_eq!(r.value, 9.44, max_relative = 1e-10);
    }

    #[test]
    fn moment_matches_added_vacuum_point() {
        let j = jet(0.0, 0.0, 1.0, 1.0, 0.0, 0.0);
        let r = qfi_moment(&j, StateKind::Added).unwrap();
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-10);
        let r = qfi_moment(&j, StateKind::AddedBlend).unwrap();
        assert_relative_eq!(r.value, 1.5, max_relative = 1e-10);
    }

    #[test]
    fn moment_zero_for_zero_jet() {
        let j = jet(0.5, 0.2, 1.5, 0.0, 0.0, 0.0);
        for kind in
            [StateKind::Gaussian, StateKind::Subtracted, StateKind::Added, StateKind::AddedBlend]
        {
            assert_eq!(qfi_moment(&j, kind).unwrap().value, 0.0);
        }
    }

    #[test]
    fn moment_agrees_with_closed_forms_on_random_jets() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 40 {
            let j = jet(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.2..5.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            if family_conditioning(&j, StateKind::Subtracted) < 1e-4 {
                continue;
            }
            checked += 1;
            let pairs: [(StateKind, f64); 4] = [
                (StateKind::Gaussian, qfi_closed::qfi_gaussian(&j).value),
                (StateKind::Subtracted, qfi_closed::qfi_subtracted(&j).unwrap().value),
                (StateKind::Added, qfi_closed::qfi_added(&j).value),
                (StateKind::AddedBlend, qfi_closed::qfi_added_blend(&j).value),
            ];
            for (kind, closed) in pairs {
                let moment = qfi_moment(&j, kind).unwrap().value;
                assert_relative_eq!(moment, closed, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn finite_difference_coherent_displacement() {
        let j = jet(0.3, 0.0, 1.0, 1.0, 0.0, 0.0);
        let r = qfi_finite_difference(&j, StateKind::Gaussian, 1e-4).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn finite_difference_zero_jet() {
        let j = jet(0.5, 0.2, 1.5, 0.0, 0.0, 0.0);
        let r = qfi_finite_difference(&j, StateKind::Subtracted, 1e-4).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn finite_difference_agrees_with_moment() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(37);
        let mut checked = 0;
        while checked < 30 {
            let j = jet(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.3..3.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            );
            if family_conditioning(&j, StateKind::Subtracted) < 1e-3 {
                continue;
            }
            checked += 1;
            let kind = match checked % 3 {
                0 => StateKind::Gaussian,
                1 => StateKind::Subtracted,
                _ => StateKind::Added,
            };
            let moment = qfi_moment(&j, kind).unwrap().value;
            let fd = qfi_finite_difference(&j, kind, 1e-4).unwrap().value;
            let tol = 1e-6f64.max(1e-4 * moment.abs());
            assert_abs_diff_eq!(fd, moment, epsilon = tol);
        }
    }

    #[test]
    fn finite_difference_error_scales_quadratically() {
        let j = jet(0.7, -0.3, 1.8, 1.0, 0.4, 0.6);
        let grid = QuadratureGrid::default();
        let exact = qfi_moment(&j, StateKind::Subtracted).unwrap().value;
        let e3 =
            (qfi_finite_difference_raw(&j, StateKind::Subtracted, 1e-3, &grid).unwrap() - exact)
                .abs();
        let e4 =
            (qfi_finite_difference_raw(&j, StateKind::Subtracted, 1e-4, &grid).unwrap() - exact)
                .abs();
        let ratio = e3 / e4;
        assert!(
            (50.0..200.0).contains(&ratio),
            "expected ~100x error reduction, got {ratio} ({e3} vs {e4})"
        );
    }

    #[test]
    fn finite_difference_flags_cancellation() {
        let j = jet(0.7, -0.3, 1.8, 1.0, 0.4, 0.6);
        let r = qfi_finite_difference(&j, StateKind::Gaussian, 1e-8).unwrap();
        assert!(
            r.notes.iter().any(|n| n.contains("inconsistency")),
            "expected a cancellation note, got {:?}",
            r.notes
        );
    }

    #[test]
    fn rejects_nonpositive_step() {
        let j = jet(0.5, 0.0, 2.0, 1.0, 0.0, 0.0);
        assert!(qfi_finite_difference(&j, StateKind::Gaussian, 0.0).is_err());
    }
}
