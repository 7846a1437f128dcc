use crate::alf::{sample_directions, HomogenizedLyapunov};
use crate::poly::MultiPoly;

use super::{rk4, CheckError, PolyVectorField, SampleRecord, VerificationReport};

/// Per-step slack for the monotonicity test, relative to `h·τ(x0)`.
pub const DECREASE_SLACK_REL: f64 = 1e-9;
/// Relative part of the finite-difference tolerance.
pub const FD_REL: f64 = 1e-6;

/// Step size and horizon for [`check_decrease`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecreaseOptions {
    pub h: f64,
    pub t_end: f64,
}

/// Samples `∇P·f` at boundary points `y = d/τ(d)`.
///
/// The margin at each sample is `(∇P·f)(y)`; the check passes when every
/// margin is below `-strict_tol`.
pub fn check_invariance(
    p: &MultiPoly,
    f: &PolyVectorField,
    lyap: &HomogenizedLyapunov,
    n_dirs: usize,
    strict_tol: f64,
) -> Result<VerificationReport, CheckError> {
    if lyap.polynomial() != p {
        return Err(CheckError::PolynomialMismatch);
    }
    if n_dirs == 0 {
        return Err(CheckError::NoDirections);
    }
    let lie = f.lie_derivative(p).map_err(super::DynError::from)?;
    let dirs = sample_directions(p.nvars(), n_dirs, lyap.options().seed);
    let mut samples = Vec::with_capacity(n_dirs);
    for (index, d) in dirs.iter().enumerate() {
        let y = lyap.boundary_point(d)?;
        let margin = lie.eval_unchecked(&y);
        samples.push(SampleRecord {
            index,
            point: y,
            margin,
        });
    }
    let mut report = VerificationReport::from_samples(samples, strict_tol, |m| m < -strict_tol);
    if report.worst_margin.is_some_and(|m| m.abs() <= 1e-12 * (1.0 + lie.max_abs_coeff())) {
        report
            .notes
            .push("zero-margin boundary case: the flow is tangent to {P = 0}".into());
    }
    Ok(report)
}

/// Integrates from each `x0` and checks that `τ` decreases.
///
/// Sample margins are `(τ_{k+1} - τ_k) / (h·τ(x0))`, which must stay below
/// `DECREASE_SLACK_REL`. In addition `τ̇ < 0` must hold at every sample and
/// the central difference of `τ` must match `τ̇` to within
/// `FD_REL·(1 + |τ̇|) + h²·M3`, where `M3` bounds the third difference.
pub fn check_decrease(
    lyap: &HomogenizedLyapunov,
    f: &PolyVectorField,
    x0s: &[Vec<f64>],
    opts: DecreaseOptions,
) -> Result<VerificationReport, CheckError> {
    let DecreaseOptions { h, t_end } = opts;
    for (index, x0) in x0s.iter().enumerate() {
        if x0.iter().all(|&v| v == 0.0) {
            return Err(CheckError::ZeroInitialState { index });
        }
    }
    let mut samples = Vec::new();
    let mut notes = Vec::new();
    let mut extra_fail = false;
    let mut worst_fd: f64 = 0.0;
    let mut counter = 0usize;

    for (traj_index, x0) in x0s.iter().enumerate() {
        let tr = rk4(f, x0, h, t_end)?;
        let taus = tr
            .states
            .iter()
            .map(|x| lyap.tau(x))
            .collect::<Result<Vec<_>, _>>()?;
        let scale = h * taus[0];
        for k in 0..taus.len().saturating_sub(1) {
            samples.push(SampleRecord {
                index: counter,
                point: tr.states[k + 1].clone(),
                margin: (taus[k + 1] - taus[k]) / scale,
            });
            counter += 1;
        }
        if tr.diverged {
            extra_fail = true;
            notes.push(format!(
                "trajectory {traj_index} diverged after t = {}; last finite state {:?}",
                tr.times.last().unwrap(),
                tr.last_state()
            ));
        }

        let mut dots = Vec::with_capacity(taus.len());
        for (k, x) in tr.states.iter().enumerate() {
            if x.iter().all(|&v| v == 0.0) {
                dots.push(0.0);
                continue;
            }
            let td = lyap.tau_dot(f, x)?;
            if !(td < 0.0) {
                if !extra_fail || notes.len() < super::MAX_DETAILS {
                    notes.push(format!(
                        "trajectory {traj_index}: tau_dot = {td} is not negative at t = {}",
                        tr.times[k]
                    ));
                }
                extra_fail = true;
            }
            dots.push(td);
        }

        // interior samples on the uniform part of the grid
        let uniform = tr
            .times
            .windows(2)
            .take_while(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .count()
            + 1;
        let m3 = (0..uniform.saturating_sub(3))
            .map(|k| (taus[k + 3] - 3.0 * taus[k + 2] + 3.0 * taus[k + 1] - taus[k]).abs())
            .fold(0.0, f64::max)
            / (h * h * h);
        for k in 1..uniform.saturating_sub(1) {
            let fd = (taus[k + 1] - taus[k - 1]) / (2.0 * h);
            let err = (fd - dots[k]).abs();
            let tol = FD_REL * (1.0 + dots[k].abs()) + h * h * m3;
            worst_fd = worst_fd.max(err);
            if !(err <= tol) {
                if notes.len() < super::MAX_DETAILS {
                    notes.push(format!(
                        "trajectory {traj_index}: finite difference {fd} differs from tau_dot {} by {err} at t = {}",
                        dots[k], tr.times[k]
                    ));
                }
                extra_fail = true;
            }
        }
    }

    let mut report =
        VerificationReport::from_samples(samples, DECREASE_SLACK_REL, |m| m < DECREASE_SLACK_REL);
    if x0s.is_empty() {
        report.notes.push("no evidence: no initial states supplied".into());
    } else {
        report
            .notes
            .push(format!("max finite-difference deviation from tau_dot: {worst_fd:e}"));
    }
    report.notes.extend(notes);
    report.pass &= !extra_fail;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alf::LyapunovOptions;
    use crate::poly::parse;

    fn lyap(text: &str) -> HomogenizedLyapunov {
        HomogenizedLyapunov::new(parse(text, 2).unwrap(), LyapunovOptions::default()).unwrap()
    }

    const CIRCLE: &str = "(x1-1)^2 + (x2+1)^2 - 4";

    fn linear(s: f64) -> PolyVectorField {
        PolyVectorField::linear(&[vec![s, 0.0], vec![0.0, s]]).unwrap()
    }

    #[test]
    fn invariance_of_circle() {
        let l = lyap(CIRCLE);
        let p = l.polynomial().clone();
        let r = check_invariance(&p, &linear(-1.0), &l, 4096, 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.n_samples, 4096);
        let expected = -2.0 * (4.0 - 2.0 * 2f64.sqrt());
        assert!((r.worst_margin.unwrap() - expected).abs() < 1e-6);
        for s in &r.details {
            assert!(p.eval(&s.point).unwrap().abs() < 1e-12);
        }

        let bad = check_invariance(&p, &linear(1.0), &l, 4096, 0.0).unwrap();
        assert!(!bad.pass);
        assert!(bad.details.iter().all(|s| s.margin > 0.0));
    }

    #[test]
    fn rotation_is_a_zero_margin_case() {
        let l = lyap("x1^2 + x2^2 - 1");
        let p = l.polynomial().clone();
        let rot = PolyVectorField::linear(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let r = check_invariance(&p, &rot, &l, 64, 0.0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_margin.unwrap().abs(), 0.0);
        assert!(r.notes[0].contains("zero-margin"));
    }

    #[test]
    fn mismatched_polynomial() {
        let l = lyap(CIRCLE);
        let other = parse("x1^2 + x2^2 - 1", 2).unwrap();
        assert_eq!(
            check_invariance(&other, &linear(-1.0), &l, 8, 0.0).unwrap_err(),
            CheckError::PolynomialMismatch
        );
    }

    #[test]
    fn decrease_linear() {
        let l = lyap(CIRCLE);
        let opts = DecreaseOptions { h: 1e-3, t_end: 5.0 };
        let r = check_decrease(&l, &linear(-1.0), &[vec![3.0, 2.0]], opts).unwrap();
        assert!(r.pass, "{:?}", r.notes);
        assert_eq!(r.n_samples, 5000);
        assert!(r.worst_margin.unwrap() < 0.0);

        let up = check_decrease(&l, &linear(1.0), &[vec![0.1, 0.1]], DecreaseOptions { h: 1e-2, t_end: 1.0 })
            .unwrap();
        assert!(!up.pass);
    }

    #[test]
    fn decrease_cubic() {
        let l = lyap("x1^2 + x2^2 - 1");
        let f = PolyVectorField::new(vec![
            parse("-x1^3 - x1*x2^2", 2).unwrap(),
            parse("-x1^2*x2 - x2^3", 2).unwrap(),
        ])
        .unwrap();
        let r = check_decrease(&l, &f, &[vec![1.0, 0.0]], DecreaseOptions { h: 1e-3, t_end: 2.0 })
            .unwrap();
        assert!(r.pass, "{:?}", r.notes);
    }

    #[test]
    fn decrease_edge_cases() {
        let l = lyap(CIRCLE);
        let opts = DecreaseOptions { h: 0.1, t_end: 1.0 };
        let r = check_decrease(&l, &linear(-1.0), &[], opts).unwrap();
        assert!(r.pass);
        assert_eq!(r.n_samples, 0);
        assert!(r.notes[0].contains("no evidence"));

        let zero = linear(0.0);
        assert!(!check_decrease(&l, &zero, &[vec![1.0, 0.0]], opts).unwrap().pass);
        assert_eq!(
            check_decrease(&l, &zero, &[vec![0.0, 0.0]], opts).unwrap_err(),
            CheckError::ZeroInitialState { index: 0 }
        );
    }
}
