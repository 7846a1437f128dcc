use super::{DynError, PolyVectorField};

/// Fixed-step samples of a trajectory; `states[0]` is the initial condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step: f64,
    /// Integration hit a non-finite state and stopped early.
    pub diverged: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds x0")
    }
}

fn axpy(x: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect()
}

fn rk4_step(f: &PolyVectorField, x: &[f64], h: f64) -> Vec<f64> {
    let k1 = f.eval_unchecked(x);
    let k2 = f.eval_unchecked(&axpy(x, 0.5 * h, &k1));
    let k3 = f.eval_unchecked(&axpy(x, 0.5 * h, &k2));
    let k4 = f.eval_unchecked(&axpy(x, h, &k3));
    (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Classical fourth-order Runge–Kutta from `t = 0` to `t_end` with step `h`.
///
/// When `t_end / h` is not an integer the last step is shortened to land on
/// `t_end`. `t_end = 0` yields the single sample `x0`.
pub fn rk4(
    f: &PolyVectorField,
    x0: &[f64],
    h: f64,
    t_end: f64,
) -> Result<Trajectory, DynError> {
    if x0.len() != f.nvars() {
        return Err(DynError::Poly(crate::poly::PolyError::DimensionMismatch {
            expected: f.nvars(),
            found: x0.len(),
        }));
    }
    if !(h > 0.0) || !h.is_finite() || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(DynError::InvalidStep { h, t_end });
    }
    if t_end > 0.0 && h > t_end {
        return Err(DynError::InvalidStep { h, t_end });
    }
    let ratio = t_end / h;
    let nearest = ratio.round();
    let (full_steps, exact) = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        (nearest as usize, true)
    } else {
        (ratio.floor() as usize, false)
    };

    let mut times = Vec::with_capacity(full_steps + 2);
    let mut states = Vec::with_capacity(full_steps + 2);
    times.push(0.0);
    states.push(x0.to_vec());
    let mut diverged = false;
    let mut x = x0.to_vec();
    for k in 1..=full_steps {
        x = rk4_step(f, &x, h);
        if x.iter().any(|v| !v.is_finite()) {
            diverged = true;
            break;
        }
        let t = if exact && k == full_steps {
            t_end
        } else {
            k as f64 * h
        };
        times.push(t);
        states.push(x.clone());
    }
    if !diverged && !exact {
        let last_t = full_steps as f64 * h;
        let rest = t_end - last_t;
        if rest > 0.0 {
            x = rk4_step(f, &x, rest);
            if x.iter().any(|v| !v.is_finite()) {
                diverged = true;
            } else {
                times.push(t_end);
                states.push(x);
            }
        }
    }
    Ok(Trajectory {
        times,
        states,
        step: h,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn neg_identity() -> PolyVectorField {
        PolyVectorField::linear(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap()
    }

    #[test]
    fn exponential_decay() {
        let tr = rk4(&neg_identity(), &[1.0, 0.0], 1e-2, 1.0).unwrap();
        assert_eq!(tr.len(), 101);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        let x = tr.last_state();
        assert!((x[0] - (-1f64).exp()).abs() < 1e-8);
        assert_eq!(x[1], 0.0);
    }

    #[test]
    fn zero_field_is_constant() {
        let z = PolyVectorField::linear(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let tr = rk4(&z, &[0.3, -2.0], 0.1, 1.0).unwrap();
        assert!(tr.states.iter().all(|s| s == &[0.3, -2.0]));
    }

    #[test]
    fn step_counts() {
        let f = neg_identity();
        assert_eq!(rk4(&f, &[1.0, 1.0], 0.5, 0.5).unwrap().len(), 2);
        assert_eq!(rk4(&f, &[1.0, 1.0], 0.1, 0.0).unwrap().len(), 1);
        let tr = rk4(&f, &[1.0, 1.0], 0.3, 1.0).unwrap();
        assert_eq!(tr.times.len(), 5);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        assert!(rk4(&f, &[1.0, 1.0], 2.0, 1.0).is_err());
        assert!(rk4(&f, &[1.0, 1.0], 0.0, 1.0).is_err());
        assert!(rk4(&f, &[1.0], 0.1, 1.0).is_err());
    }

    #[test]
    fn blow_up_is_flagged() {
        // ẋ = x³ escapes in finite time t = 1/(2 x0²)
        let f = PolyVectorField::new(vec![parse("x1^3", 1).unwrap()]).unwrap();
        let tr = rk4(&f, &[10.0], 0.01, 1.0).unwrap();
        assert!(tr.diverged);
        assert!(tr.len() < 101);
        assert!(tr.states.iter().all(|s| s[0].is_finite()));
    }
}
