//! Grid-sampled potentials on the unit interval.
//!
//! A [`Potential`] stores samples of a real function `q` on a uniform grid
//! over `[0, 1]` and evaluates between nodes by linear interpolation. A
//! small catalog of closed forms ([`PotentialForm`]) covers the shapes used
//! throughout the test suite and the command-line demos.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Minimum number of grid nodes accepted for a potential.
pub const MIN_GRID: usize = 16;

/// Closed-form potential shapes. All are defined on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialForm {
    /// `q(x) = 0`.
    Zero,
    /// `q(x) = c`.
    Constant { c: f64 },
    /// `q(x) = amp · cos(2π · periods · x)`.
    Cosine { amp: f64, periods: u32 },
    /// `q(x) = a + b·x`.
    Linear { a: f64, b: f64 },
    /// `q(x) = x(1 − x)`.
    XTimesOneMinusX,
    /// Smooth compactly supported bump
    /// `q(x) = amp · cos²(π t / 2)` with `t = (x − center)/halfwidth`,
    /// zero for `|t| ≥ 1`.
    Bump { center: f64, halfwidth: f64, amp: f64 },
    /// Pointwise sum of other forms.
    Sum { terms: Vec<PotentialForm> },
}

impl PotentialForm {
    /// Evaluate the closed form at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PotentialForm::Zero => 0.0,
            PotentialForm::Constant { c } => *c,
            PotentialForm::Cosine { amp, periods } => {
                amp * (2.0 * std::f64::consts::PI * f64::from(*periods) * x).cos()
            }
            PotentialForm::Linear { a, b } => a + b * x,
            PotentialForm::XTimesOneMinusX => x * (1.0 - x),
            PotentialForm::Bump {
                center,
                halfwidth,
                amp,
            } => {
                let t = (x - center) / halfwidth;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    let c = (std::f64::consts::FRAC_PI_2 * t).cos();
                    amp * c * c
                }
            }
            PotentialForm::Sum { terms } => terms.iter().map(|f| f.eval(x)).sum(),
        }
    }
}

/// A real potential sampled on a uniform grid over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    /// Samples at `x_i = i / (grid_n − 1)`, `i = 0..grid_n`.
    pub samples: Vec<f64>,
    /// Number of grid nodes (`samples.len()`).
    pub grid_n: usize,
    /// Optional record of the closed form the samples came from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<PotentialForm>,
}

impl Potential {
    /// Build from explicit samples.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_GRID {
            return Err(Error::Precondition(format!(
                "potential grid must have at least {MIN_GRID} nodes, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition(
                "potential samples must all be finite".into(),
            ));
        }
        let grid_n = samples.len();
        Ok(Potential {
            samples,
            grid_n,
            closed_form: None,
        })
    }

    /// Sample a closed form on `grid_n` nodes.
    pub fn from_form(form: &PotentialForm, grid_n: usize) -> Result<Self> {
        if grid_n < MIN_GRID {
            return Err(Error::Precondition(format!(
                "potential grid must have at least {MIN_GRID} nodes, got {grid_n}"
            )));
        }
        let h = 1.0 / (grid_n - 1) as f64;
        let samples: Vec<f64> = (0..grid_n).map(|i| form.eval(i as f64 * h)).collect();
        let mut p = Self::from_samples(samples)?;
        p.closed_form = Some(form.clone());
        Ok(p)
    }

    /// Sample an arbitrary function on `grid_n` nodes.
    pub fn from_fn(f: impl Fn(f64) -> f64, grid_n: usize) -> Result<Self> {
        if grid_n < MIN_GRID {
            return Err(Error::Precondition(format!(
                "potential grid must have at least {MIN_GRID} nodes, got {grid_n}"
            )));
        }
        let h = 1.0 / (grid_n - 1) as f64;
        Self::from_samples((0..grid_n).map(|i| f(i as f64 * h)).collect())
    }

    /// The zero potential on a default grid.
    pub fn zero() -> Self {
        Self::from_form(&PotentialForm::Zero, 257).expect("static grid is valid")
    }

    /// Grid spacing `1/(grid_n − 1)`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / (self.grid_n - 1) as f64
    }

    /// Piecewise-linear evaluation at `x ∈ [0, 1]` (clamped outside).
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid_n;
        if x <= 0.0 {
            return self.samples[0];
        }
        if x >= 1.0 {
            return self.samples[n - 1];
        }
        let t = x * (n - 1) as f64;
        let i = (t as usize).min(n - 2);
        let frac = t - i as f64;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }

    /// `q̃(x) = q(1 − x)` on the same grid.
    pub fn reflect(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Potential {
            samples,
            grid_n: self.grid_n,
            closed_form: None,
        }
    }

    /// Pointwise sum with another potential (resampled onto the finer grid).
    pub fn add(&self, other: &Potential) -> Result<Self> {
        let grid_n = self.grid_n.max(other.grid_n);
        Self::from_fn(|x| self.eval(x) + other.eval(x), grid_n)
    }

    /// Shift by a constant.
    pub fn shift(&self, c: f64) -> Self {
        let samples = self.samples.iter().map(|v| v + c).collect();
        Potential {
            samples,
            grid_n: self.grid_n,
            closed_form: None,
        }
    }

    /// Trapezoid approximation of `∫₀¹ q(x) dx`.
    pub fn integral(&self) -> f64 {
        let h = self.spacing();
        let n = self.grid_n;
        let mut s = 0.5 * (self.samples[0] + self.samples[n - 1]);
        for v in &self.samples[1..n - 1] {
            s += v;
        }
        s * h
    }

    /// Trapezoid approximation of the L² norm `‖q‖₂`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.spacing();
        let n = self.grid_n;
        let sq = |v: f64| v * v;
        let mut s = 0.5 * (sq(self.samples[0]) + sq(self.samples[n - 1]));
        for v in &self.samples[1..n - 1] {
            s += sq(*v);
        }
        (s * h).sqrt()
    }

    /// Sup norm over the samples.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// L² distance to another potential (on the union grid, trapezoid rule).
    pub fn l2_distance(&self, other: &Potential) -> f64 {
        let n = self.grid_n.max(other.grid_n);
        let h = 1.0 / (n - 1) as f64;
        let mut s = 0.0;
        for i in 0..n {
            let x = i as f64 * h;
            let d = self.eval(x) - other.eval(x);
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * d * d;
        }
        (s * h).sqrt()
    }

    /// Serialize to the JSON descriptor `{grid_n, samples[], closed_form?}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Read back from the JSON descriptor.
    pub fn from_json(s: &str) -> Result<Self> {
        let p: Potential = serde_json::from_str(s)?;
        if p.samples.len() != p.grid_n {
            return Err(Error::Precondition(format!(
                "grid_n ({}) does not match samples length ({})",
                p.grid_n,
                p.samples.len()
            )));
        }
        Self::from_samples(p.samples).map(|mut q| {
            q.closed_form = p.closed_form;
            q
        })
    }

    /// Emit CSV rows `x,value` (with header).
    pub fn to_csv(&self) -> String {
        let h = self.spacing();
        let mut out = String::from("x,value\n");
        for (i, v) in self.samples.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i as f64 * h, v));
        }
        out
    }

    /// Parse CSV rows `x,value`; samples must form a uniform grid on [0,1].
    pub fn from_csv(s: &str) -> Result<Self> {
        let mut vals = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('x') || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(_x), Some(v)) = (parts.next(), parts.next()) else {
                return Err(Error::Precondition(format!(
                    "csv line {} is not `x,value`",
                    lineno + 1
                )));
            };
            let v: f64 = v.trim().parse().map_err(|e| {
                Error::Precondition(format!("csv line {}: bad number: {e}", lineno + 1))
            })?;
            vals.push(v);
        }
        Self::from_samples(vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interpolation_between_nodes() {
        let q = Potential::from_fn(|x| 2.0 * x, 17).unwrap();
        let h = q.spacing();
        let x = 3.5 * h;
        assert!((q.eval(x) - 2.0 * x).abs() < 1e-14);
    }

    #[test]
    fn reflect_is_involution_and_flips_linear() {
        let q = Potential::from_fn(|x| x, 33).unwrap();
        let r = q.reflect();
        assert!((r.eval(0.25) - 0.75).abs() < 1e-12);
        assert_eq!(r.reflect().samples, q.samples);
    }

    #[test]
    fn symmetric_potential_fixed_by_reflection() {
        let q = Potential::from_form(&PotentialForm::XTimesOneMinusX, 65).unwrap();
        let r = q.reflect();
        for (a, b) in q.samples.iter().zip(&r.samples) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_too_small_rejected() {
        assert!(Potential::from_samples(vec![0.0; 8]).is_err());
    }

    #[test]
    fn integral_of_linear() {
        let q = Potential::from_form(&PotentialForm::Linear { a: 1.0, b: 1.0 }, 101).unwrap();
        assert!((q.integral() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let q = Potential::from_form(
            &PotentialForm::Cosine {
                amp: 1.0,
                periods: 1,
            },
            64,
        )
        .unwrap();
        let s = q.to_json().unwrap();
        let r = Potential::from_json(&s).unwrap();
        assert_eq!(q.samples, r.samples);
        assert_eq!(q.closed_form, r.closed_form);
    }

    #[test]
    fn csv_roundtrip() {
        let q = Potential::from_fn(|x| x * x, 33).unwrap();
        let r = Potential::from_csv(&q.to_csv()).unwrap();
        for (a, b) in q.samples.iter().zip(&r.samples) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let f = PotentialForm::Bump {
            center: 0.5,
            halfwidth: 0.1,
            amp: 2.0,
        };
        assert_eq!(f.eval(0.3), 0.0);
        assert!((f.eval(0.5) - 2.0).abs() < 1e-15);
        assert_eq!(f.eval(0.7), 0.0);
    }
}
