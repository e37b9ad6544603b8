//! Dormand–Prince 5(4) with step-size control, for matrix-valued ODEs.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

type M = Array2<Complex64>;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 5_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Adaptive integrator; the step size carries over between calls.
#[derive(Clone, Debug)]
pub struct Dopri5 {
    rtol: f64,
    atol: f64,
    h: Option<f64>,
    stats: StepStats,
}

fn axpy(y: &M, terms: &[(f64, &M)]) -> M {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out.scaled_add(Complex64::new(*c, 0.0), k);
        }
    }
    out
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dopri5 { rtol, atol, h: None, stats: StepStats::default() }
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    fn error_norm(&self, err: &M, y0: &M, y1: &M) -> f64 {
        let mut sum = 0.0;
        for ((e, a), b) in err.iter().zip(y0).zip(y1) {
            let scale = self.atol + self.rtol * a.norm().max(b.norm());
            sum += (e.norm() / scale).powi(2);
        }
        (sum / err.len() as f64).sqrt()
    }

    fn initial_step(&self, f0: &M, y0: &M, span: f64) -> f64 {
        let d0 = self.error_norm(y0, y0, y0).max(1e-5);
        let d1 = self.error_norm(f0, y0, y0).max(1e-5);
        (0.01 * d0 / d1).min(span.abs()).max(1e-10)
    }

    /// Advance `y` from `t0` to `t1`.
    pub fn integrate<F>(&mut self, f: F, t0: f64, t1: f64, mut y: M) -> Result<M>
    where
        F: Fn(&M) -> M,
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(y);
        }
        if span < 0.0 {
            return Err(Error::domain("integration runs forward in time only"));
        }
        let mut t = t0;
        let mut k1 = f(&y);
        let mut h = self.h.unwrap_or_else(|| self.initial_step(&k1, &y, span));
        let mut steps = 0usize;
        while t < t1 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::numerical(format!(
                    "step limit of {MAX_STEPS} reached at t = {t} (h = {h:e}, {} rejected)",
                    self.stats.rejected
                )));
            }
            let last = t + h >= t1;
            let step = if last { t1 - t } else { h };
            let k2 = f(&axpy(&y, &[(step * A21, &k1)]));
            let k3 = f(&axpy(&y, &[(step * A31, &k1), (step * A32, &k2)]));
            let k4 = f(&axpy(&y, &[(step * A41, &k1), (step * A42, &k2), (step * A43, &k3)]));
            let k5 = f(&axpy(&y, &[(step * A51, &k1), (step * A52, &k2), (step * A53, &k3), (step * A54, &k4)]));
            let k6 = f(&axpy(
                &y,
                &[(step * A61, &k1), (step * A62, &k2), (step * A63, &k3), (step * A64, &k4), (step * A65, &k5)],
            ));
            let y_new =
                axpy(&y, &[(step * B1, &k1), (step * B3, &k3), (step * B4, &k4), (step * B5, &k5), (step * B6, &k6)]);
            let k7 = f(&y_new);
            let err = axpy(
                &M::zeros(y.raw_dim()),
                &[
                    (step * E1, &k1),
                    (step * E3, &k3),
                    (step * E4, &k4),
                    (step * E5, &k5),
                    (step * E6, &k6),
                    (step * E7, &k7),
                ],
            );
            let norm = self.error_norm(&err, &y, &y_new);
            if !norm.is_finite() {
                return Err(Error::numerical(format!("non-finite error estimate at t = {t}, h = {step:e}")));
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if norm <= 1.0 {
                t = if last { t1 } else { t + step };
                y = y_new;
                k1 = k7;
                self.stats.accepted += 1;
                if !last || step >= h {
                    h = step * factor;
                }
            } else {
                self.stats.rejected += 1;
                h = step * factor.min(1.0);
                if h < 1e-14 * t1.abs().max(1.0) {
                    return Err(Error::numerical(format!("step size collapsed to {h:e} at t = {t}")));
                }
            }
        }
        self.h = Some(h);
        Ok(y)
    }
}
