//! Gaussian-regularised cardinal series on a unit lattice.
//!
//! A bounded function of exponential type `σ < π` sampled at `t = n + offset`
//! is rebuilt as `Σ fₙ sinc(t − tₙ) exp(−(t − tₙ)²/(2r²))`, summing samples
//! within a window `W`. With excess bandwidth `δ = π − σ` the choice
//! `r = √(W/δ)` makes the truncation error decay like `exp(−δW/2)`.

/// Symmetry used to extend samples to negative `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone)]
pub struct CardinalSeries {
    /// `samples[n]` is the value at `t = n + 1 + offset` for odd series
    /// (value 0 at the origin is implied) and `t = n + offset` otherwise.
    samples: Vec<f64>,
    first: f64,
    parity: Parity,
    window: f64,
    r: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (std::f64::consts::PI * x).powi(2) / 6.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

impl CardinalSeries {
    /// `samples` taken at `t = first, first + 1, …`; `first` is 1 (odd, integer
    /// lattice) or ½ (even, half-integer lattice). `delta` is the excess bandwidth.
    pub fn new(samples: Vec<f64>, first: f64, parity: Parity, window: f64, delta: f64) -> Self {
        let r = (window / delta.max(1e-3)).sqrt();
        Self { samples, first, parity, window, r }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest `t` at which the window stays inside the sampled range.
    pub fn valid_until(&self) -> f64 {
        self.first + self.samples.len() as f64 - 1.0 - self.window
    }

    pub fn eval(&self, t: f64) -> f64 {
        let two_r2 = 2.0 * self.r * self.r;
        let term = |tn: f64, v: f64| {
            let u = t - tn;
            if u.abs() > self.window {
                0.0
            } else {
                v * sinc(u) * (-u * u / two_r2).exp()
            }
        };
        let sign = match self.parity {
            Parity::Odd => -1.0,
            Parity::Even => 1.0,
        };
        let lo = ((t - self.window - self.first).floor().max(0.0)) as usize;
        let hi = ((t + self.window - self.first).ceil().max(0.0) as usize).min(self.samples.len().saturating_sub(1));
        let mut acc = 0.0;
        for n in lo..=hi.max(lo) {
            if let Some(&v) = self.samples.get(n) {
                acc += term(self.first + n as f64, v);
            }
        }
        // mirrored samples at −tₙ
        let mhi = ((self.window - t - self.first).ceil().max(-1.0)) as i64;
        for n in 0..=mhi.max(-1) {
            if let Some(&v) = self.samples.get(n as usize) {
                acc += term(-(self.first + n as f64), sign * v);
            }
        }
        acc
    }

    /// Sign-change roots of the interpolant on `(0, t_max]`, scanned with step `dt`.
    pub fn roots(&self, t_max: f64, dt: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut t0 = dt * 0.5;
        let mut g0 = self.eval(t0);
        while t0 + dt <= t_max {
            let t1 = t0 + dt;
            let g1 = self.eval(t1);
            if g1 == 0.0 {
                out.push(t1);
            } else if (g0 < 0.0) != (g1 < 0.0) && g0 != 0.0 {
                let (mut lo, mut hi, mut glo) = (t0, t1, g0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let gm = self.eval(mid);
                    if (gm < 0.0) == (glo < 0.0) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            t0 = t1;
            g0 = g1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reproduces_band_limited_functions() {
        // sin(σt)/σ is odd of type σ; cos(σt) is even.
        let sigma = 0.6 * PI;
        let n = 60;
        let odd: Vec<f64> = (1..=n).map(|k| (sigma * k as f64).sin()).collect();
        let even: Vec<f64> = (0..n).map(|k| (sigma * (k as f64 + 0.5)).cos()).collect();
        let so = CardinalSeries::new(odd, 1.0, Parity::Odd, 30.0, PI - sigma);
        let se = CardinalSeries::new(even, 0.5, Parity::Even, 30.0, PI - sigma);
        for k in 0..100 {
            let t = 0.013 + k as f64 * 0.29;
            assert!((so.eval(t) - (sigma * t).sin()).abs() < 1e-6, "{t}");
            assert!((se.eval(t) - (sigma * t).cos()).abs() < 1e-6, "{t}");
        }
        let roots = so.roots(29.0, 1.0 / 16.0);
        for (j, r) in roots.iter().enumerate() {
            assert!((r - (j + 1) as f64 * PI / sigma).abs() < 1e-6);
        }
    }
}
