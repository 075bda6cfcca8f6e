//! Sampled time series and the scalar statistics extracted from them.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::TimeGrid;

/// Zero-padding factor applied on top of the next power of two.
const FFT_PADDING: usize = 8;

/// A real quantity sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    grid: TimeGrid,
    values: Vec<f64>,
}

/// A sampled maximum refined by a parabola through its neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    pub t: f64,
    pub value: f64,
}

/// `y(t) = amplitude * exp(-rate * t)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub rate: f64,
}

impl ExponentialFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-self.rate * t).exp()
    }
}

fn analysis(msg: impl Into<String>) -> Error {
    Error::Analysis(msg.into())
}

/// Vertex of the parabola through three equally spaced samples, as an offset
/// in units of the spacing together with the interpolated value.
fn parabolic_vertex(ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let curvature = ym - 2.0 * y0 + yp;
    if curvature >= 0.0 {
        return (0.0, y0);
    }
    let offset = (0.5 * (ym - yp) / curvature).clamp(-0.5, 0.5);
    (offset, y0 - 0.25 * (ym - yp) * offset)
}

impl Series {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.times().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.grid.time(i)
    }

    /// Pointwise combination of two series on the same grid.
    pub fn zip_with(&self, other: &Series, f: impl Fn(f64, f64) -> f64) -> Result<Series> {
        if self.grid != other.grid {
            return Err(analysis("series are sampled on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Series {
            grid: self.grid,
            values,
        })
    }

    /// Indices of the samples with `t0 <= t <= t1`, up to rounding.
    pub fn window(&self, t0: f64, t1: f64) -> Result<std::ops::Range<usize>> {
        let tol = 1e-9 * self.grid.dt();
        let start = (0..self.len()).find(|&i| self.time(i) >= t0 - tol);
        let end = (0..self.len()).rev().find(|&i| self.time(i) <= t1 + tol);
        match (start, end) {
            (Some(s), Some(e)) if e > s => Ok(s..e + 1),
            _ => Err(analysis(format!("window [{t0}, {t1}] holds fewer than two samples"))),
        }
    }

    fn trapezoid(&self, range: std::ops::Range<usize>, f: impl Fn(f64) -> f64) -> f64 {
        let ys: Vec<f64> = self.values[range].iter().map(|&v| f(v)).collect();
        let inner: f64 = ys[1..ys.len() - 1].iter().sum();
        self.grid.dt() * (inner + 0.5 * (ys[0] + ys[ys.len() - 1]))
    }

    /// Trapezoidal time average over `[t0, t1]`.
    pub fn time_average(&self, t0: f64, t1: f64) -> Result<f64> {
        let range = self.window(t0, t1)?;
        let span = self.time(range.end - 1) - self.time(range.start);
        Ok(self.trapezoid(range, |v| v) / span)
    }

    /// Root-mean-square deviation from the time average over `[t0, t1]`.
    pub fn time_std(&self, t0: f64, t1: f64) -> Result<f64> {
        let mean = self.time_average(t0, t1)?;
        let range = self.window(t0, t1)?;
        let span = self.time(range.end - 1) - self.time(range.start);
        let var = self.trapezoid(range, |v| (v - mean) * (v - mean)) / span;
        Ok(var.max(0.0).sqrt())
    }

    fn refine(&self, i: usize) -> Peak {
        if i == 0 || i + 1 >= self.len() {
            return Peak {
                index: i,
                t: self.time(i),
                value: self.values[i],
            };
        }
        let (offset, value) = parabolic_vertex(self.values[i - 1], self.values[i], self.values[i + 1]);
        Peak {
            index: i,
            t: self.time(i) + offset * self.grid.dt(),
            value,
        }
    }

    /// Interior samples at least as large as both neighbours (strictly larger
    /// than the left one), parabolically refined.
    pub fn local_maxima(&self) -> Vec<Peak> {
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
            .map(|i| self.refine(i))
            .collect()
    }

    /// Largest sample, refined when interior.
    pub fn global_max(&self) -> Option<Peak> {
        let i = (0..self.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))?;
        Some(self.refine(i))
    }

    /// Largest sample within `[t0, t1]`.
    pub fn max_in(&self, t0: f64, t1: f64) -> Result<Peak> {
        let range = self.window(t0, t1)?;
        let i = range
            .max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
            .expect("window is non-empty");
        Ok(self.refine(i))
    }

    /// First local maximum strictly after `t`.
    pub fn first_local_max_after(&self, t: f64) -> Option<Peak> {
        self.local_maxima().into_iter().find(|p| p.t > t)
    }

    /// Frequency (cycles per unit time) of the strongest oscillation in
    /// `[t0, t1]`, located on a zero-padded FFT of the mean-removed signal and
    /// refined parabolically. Fails for a flat signal or when the window holds
    /// fewer than two periods of the detected frequency.
    pub fn dominant_frequency(&self, t0: f64, t1: f64) -> Result<f64> {
        let range = self.window(t0, t1)?;
        let samples = &self.values[range];
        let n = samples.len();
        let span = (n - 1) as f64 * self.grid.dt();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let scale = samples.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        if scale <= 1e-14 * mean.abs().max(1.0) {
            return Err(analysis("signal is constant; no dominant frequency"));
        }
        let len = n.next_power_of_two() * FFT_PADDING;
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
        buf.resize(len, Complex::new(0.0, 0.0));
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        let power: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm_sqr()).collect();
        let bin_width = 1.0 / (len as f64 * self.grid.dt());
        // skip the DC lobe of the window
        let first = ((1.0 / span) / bin_width).ceil() as usize;
        let best = (first.max(1)..power.len().saturating_sub(1))
            .max_by(|&a, &b| power[a].total_cmp(&power[b]))
            .ok_or_else(|| analysis("window too short for a spectral estimate"))?;
        let (offset, _) = parabolic_vertex(power[best - 1], power[best], power[best + 1]);
        let f = (best as f64 + offset) * bin_width;
        if f * span < 2.0 {
            return Err(analysis(format!(
                "window of length {span} holds fewer than two periods at frequency {f}"
            )));
        }
        Ok(f)
    }

    /// Exponential fitted to the positive local maxima: a log-linear least
    /// squares start followed by Gauss-Newton on the untransformed residuals.
    pub fn envelope_exponential_fit(&self) -> Result<ExponentialFit> {
        let peaks: Vec<(f64, f64)> = self
            .local_maxima()
            .into_iter()
            .filter(|p| p.value > 0.0)
            .map(|p| (p.t, p.value))
            .collect();
        if peaks.len() < 3 {
            return Err(analysis(format!(
                "{} positive local maxima; at least 3 are needed for an envelope fit",
                peaks.len()
            )));
        }
        let m = peaks.len() as f64;
        let (st, sy) = peaks.iter().fold((0.0, 0.0), |(a, b), &(t, y)| (a + t, b + y.ln()));
        let (tm, ym) = (st / m, sy / m);
        let (num, den) = peaks.iter().fold((0.0, 0.0), |(a, b), &(t, y)| {
            (a + (t - tm) * (y.ln() - ym), b + (t - tm) * (t - tm))
        });
        if den <= 0.0 {
            return Err(analysis("local maxima do not span a time interval"));
        }
        let slope = num / den;
        let mut fit = ExponentialFit {
            amplitude: (ym - slope * tm).exp(),
            rate: -slope,
        };
        let sse = |f: &ExponentialFit| peaks.iter().map(|&(t, y)| (y - f.eval(t)).powi(2)).sum::<f64>();
        for _ in 0..50 {
            // normal equations for (amplitude, rate)
            let (mut jaa, mut jar, mut jrr, mut ga, mut gr) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for &(t, y) in &peaks {
                let e = (-fit.rate * t).exp();
                let r = y - fit.amplitude * e;
                let da = e;
                let dr = -fit.amplitude * t * e;
                jaa += da * da;
                jar += da * dr;
                jrr += dr * dr;
                ga += da * r;
                gr += dr * r;
            }
            let det = jaa * jrr - jar * jar;
            if det.abs() < 1e-300 {
                break;
            }
            let step_a = (jrr * ga - jar * gr) / det;
            let step_r = (jaa * gr - jar * ga) / det;
            let before = sse(&fit);
            let mut scale = 1.0;
            let mut accepted = false;
            while scale > 1e-6 {
                let trial = ExponentialFit {
                    amplitude: fit.amplitude + scale * step_a,
                    rate: fit.rate + scale * step_r,
                };
                if trial.amplitude > 0.0 && sse(&trial) <= before {
                    fit = trial;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted || (scale * step_r).abs() <= 1e-14 * fit.rate.abs().max(1e-12) {
                break;
            }
        }
        Ok(fit)
    }
}
