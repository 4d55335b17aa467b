use super::{Frame, PolyVectorField};
use crate::signature::PiecewiseLinearPath;
use crate::{Error, Result};

/// Largest number of RK4 steps per segment before giving up.
const MAX_STEPS_PER_SEGMENT: usize = 1 << 20;

fn rk4(field: &PolyVectorField<f64>, x: &[f64], steps: usize) -> Vec<f64> {
    let h = 1.0 / steps as f64;
    let mut x = x.to_vec();
    let axpy = |x: &[f64], k: &[f64], a: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect()
    };
    for _ in 0..steps {
        let k1 = field.eval_f64(&x);
        let k2 = field.eval_f64(&axpy(&x, &k1, h / 2.0));
        let k3 = field.eval_f64(&axpy(&x, &k2, h / 2.0));
        let k4 = field.eval_f64(&axpy(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

/// Solves `dx = Σ_i V_i(x) dh^i` along a piecewise-linear driver.
///
/// Each segment is integrated with classical RK4, halving the step until two
/// successive answers differ by less than `rtol·max(1, |x|)`.
pub fn ode_flow(
    frame: &Frame<f64>,
    x: &[f64],
    driver: &PiecewiseLinearPath<f64>,
    rtol: f64,
) -> Result<Vec<f64>> {
    if driver.dim() != frame.n() {
        return Err(Error::arg(format!(
            "driver lives in R^{}, frame has {} fields",
            driver.dim(),
            frame.n()
        )));
    }
    if x.len() != frame.dim() {
        return Err(Error::arg("start point dimension does not match the frame"));
    }
    if !(rtol > 0.0) {
        return Err(Error::arg("rtol must be positive"));
    }
    let mut state = x.to_vec();
    for inc in driver.increments() {
        let mut field = PolyVectorField::zero(frame.dim());
        for (v, a) in frame.fields().iter().zip(&inc) {
            if *a != 0.0 {
                field = field.add(&v.scale(a));
            }
        }
        let mut steps = 1;
        let mut prev = rk4(&field, &state, steps);
        loop {
            steps *= 2;
            let next = rk4(&field, &state, steps);
            let diff = next
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let size = next.iter().map(|a| a.abs()).fold(1.0, f64::max);
            if diff < rtol * size {
                state = next;
                break;
            }
            if steps >= MAX_STEPS_PER_SEGMENT {
                return Err(Error::NonConvergence {
                    message: "ODE step halving did not settle".into(),
                    estimate: diff,
                    bound: rtol * size,
                });
            }
            prev = next;
        }
    }
    Ok(state)
}
