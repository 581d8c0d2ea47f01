//! Canonical products of spectral sequences, even masses γ_n,
//! characteristic sequences p_n, balance checks, and the
//! polynomial-density criterion.
//!
//! All products and principal-value sums are paired with the free
//! sequence πZ term by term — raw truncations diverge, while the paired
//! forms converge with O(1/window) tails that are removed by a single
//! asymptotic correction (for products) or Richardson extrapolation
//! (for sums).
//!
//! Two routes to one object: γ_n = π/|F′(λ_n)| from the canonical
//! product, and exp(p_n) from the characteristic sequence, satisfy
//! exp(p_n) = Q·γ_n with an n-independent constant
//! `Q = (sinh 1/π)·Π_j (1+λ_j²)/(1+π²j²)` (= sinh(1)/π for the free
//! sequence, where γ_n = π and exp(p_n) = sinh 1 exactly).

use crate::error::{Error, Result};
use crate::herglotz::measure::SpectralMeasure;
use crate::sturm::eigen::SpectralSequence;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Per-sequence characteristic quantities; `gamma` and `p` are filled
/// by [`even_masses`] and [`characteristic_sequence`] respectively.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CharacteristicData {
    /// Positive branch λ_1 < λ_2 < … (0 is adjoined implicitly).
    pub lams: Vec<f64>,
    /// Even masses γ_n = π/|F′(λ_n)| (empty until computed).
    pub gamma: Vec<f64>,
    /// Characteristic sequence p_n (empty until computed).
    pub p: Vec<f64>,
    /// Richardson spread |extrapolation − next-lower estimate| per n —
    /// a convergence diagnostic for the principal-value sums.
    pub p_spread: Vec<f64>,
}

impl CharacteristicData {
    /// Ratios exp(p_n)/γ_n (needs both parts; constant in n for
    /// balanced sequences).
    pub fn exp_p_over_gamma(&self) -> Vec<f64> {
        self.p
            .iter()
            .zip(&self.gamma)
            .map(|(p, g)| p.exp() / g)
            .collect()
    }

    /// Merge the γ part of `other` into `self` (same sequence).
    pub fn with_gamma_from(mut self, other: &CharacteristicData) -> Self {
        self.gamma = other.gamma.clone();
        self
    }
}

/// Asymptotic constant Ĉ of λ_n ≈ πn + πĈ/n, fitted as the median of
/// n(λ_n/π − n) over the top half of the window.
fn asymptotic_constant(lams: &[f64]) -> f64 {
    let n = lams.len();
    let mut top: Vec<f64> = lams[n / 2..]
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let idx = (n / 2 + i + 1) as f64;
            idx * (l / PI - idx)
        })
        .collect();
    top.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if top.is_empty() {
        0.0
    } else if top.len() % 2 == 1 {
        top[top.len() / 2]
    } else {
        0.5 * (top[top.len() / 2 - 1] + top[top.len() / 2])
    }
}

/// sin(t)/t, stable at 0.
fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Complex sin(t)/t, stable at 0.
fn csinc(t: Complex64) -> Complex64 {
    if t.norm() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Canonical product F(z) = z·Π_{n≥1}(1 − z²/λ_n²) of the symmetrized
/// sequence, evaluated through the free-compensated form
/// `sin z · Π_{n≤N} (1 − z²/λ_n²)/(1 − z²/(πn)²)`.
///
/// Near a free node πm inside the window the vanishing sin z and the
/// vanishing denominator of factor m are grouped into a sinc ratio, so
/// the evaluation stays well-conditioned on the whole certified region
/// |z| ≲ πN.  Beyond the window the compensation factors are unknown;
/// points within 1e−6 of a tail node πk (k > N) are refused.
pub fn canonical_product(lams: &SpectralSequence, z: Complex64) -> Result<Complex64> {
    let n_win = lams.lams.len();
    let k_near = (z.re.abs() / PI).round() as usize;
    if k_near > n_win && (z - PI * k_near as f64 * z.re.signum()).norm() < 1e-6 {
        return Err(Error::Precondition(format!(
            "z = {z} lies at a free tail node beyond the window of {n_win} terms"
        )));
    }
    // Group sin z with the nearest in-window free denominator when the
    // abscissa sits in that node's unit cell.
    let m = if (1..=n_win).contains(&k_near) && (z.re.abs() - PI * k_near as f64).abs() < PI / 2.0 {
        k_near
    } else {
        0
    };
    let mut acc = if m == 0 {
        z.sin()
    } else {
        // sin z / ((πm)² − z²) = (−1)^{m+1} sinc(w − πm)/(πm + w) with
        // w = ±z matching the sign of Re z; the remaining factors are
        // even in z, so the reflection costs one overall sign (F odd).
        let w = if z.re >= 0.0 { z } else { -z };
        let s = (if m % 2 == 0 { -1.0 } else { 1.0 }) * (if z.re >= 0.0 { 1.0 } else { -1.0 });
        let lm = lams.lams[m - 1];
        let fm = PI * m as f64;
        s * csinc(w - fm) / (fm + w) * (fm * fm) * (lm * lm - z * z) / (lm * lm)
    };
    for (i, &l) in lams.lams.iter().enumerate() {
        let n = (i + 1) as f64;
        if i + 1 == m {
            continue;
        }
        let num = (l * l - z * z) / (l * l);
        let den = ((PI * n) * (PI * n) - z * z) / ((PI * n) * (PI * n));
        if den.norm() < 1e-290 {
            return Err(Error::NearSingular(format!(
                "z = {z} is at the free node π·{n} outside its grouping cell"
            )));
        }
        acc *= num / den;
    }
    Ok(acc)
}

/// Even masses γ_n = π/|F′(λ_n)| over the window, via the analytically
/// grouped derivative of the compensated product:
///
/// ```text
/// γ_m = π · e^{−2Ĉ/N} · (πm + λ_m) / (2·sinc(λ_m − πm)·λ_m)
///         · Π_{n≠m} |(πn)² − λ_m²| / |λ_n² − λ_m²|
/// ```
///
/// (the free-tail factor e^{−2Ĉ/N} removes the O(1/N) truncation bias;
/// for the free sequence the expression is exactly π).
pub fn even_masses(lams: &SpectralSequence) -> Result<CharacteristicData> {
    let n_win = lams.lams.len();
    if n_win < 4 {
        return Err(Error::Precondition("window too short for even masses".into()));
    }
    let chat = asymptotic_constant(&lams.lams);
    let mut gamma = Vec::with_capacity(n_win);
    for m in 1..=n_win {
        let lm = lams.lams[m - 1];
        let dev = lm - PI * m as f64;
        if dev.abs() >= PI {
            return Err(Error::Precondition(format!(
                "λ_{m} = {lm} strays a full period from its free node; asymptotics violated"
            )));
        }
        let s = sinc(dev);
        if s <= 0.0 {
            return Err(Error::NearSingular(format!(
                "sinc grouping degenerate at index {m}"
            )));
        }
        let mut log_prod = 0.0;
        for n in 1..=n_win {
            if n == m {
                continue;
            }
            let ln_ = lams.lams[n - 1];
            let free = PI * n as f64;
            let num = (free * free - lm * lm).abs();
            let den = (ln_ * ln_ - lm * lm).abs();
            if den < 1e-12 * (1.0 + lm * lm) || num < 1e-12 * (1.0 + lm * lm) {
                return Err(Error::NearSingular(format!(
                    "near-double root between indices {n} and {m}"
                )));
            }
            log_prod += num.ln() - den.ln();
        }
        let g = PI
            * (-2.0 * chat / n_win as f64).exp()
            * (PI * m as f64 + lm)
            / (2.0 * s * lm)
            * log_prod.exp();
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::NearSingular(format!(
                "even mass at index {m} degenerate: {g}"
            )));
        }
        gamma.push(g);
    }
    Ok(CharacteristicData {
        lams: lams.lams.clone(),
        gamma,
        p: Vec::new(),
        p_spread: Vec::new(),
    })
}

/// Balance report: index-paired partial sums of Σ Λ/(1 + Λ²).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalanceReport {
    /// Partial sums after k index pairs.
    pub partial_sums: Vec<f64>,
    /// Whether the last quarter of increments is Cauchy-small.
    pub balanced: bool,
}

/// Check balancedness of a two-sided sequence: `pos` holds Λ_1, Λ_2, …
/// and `neg` holds Λ_{−1}, Λ_{−2}, … (typically negative).  Partial
/// sums pair index k with index −k; a sequence is balanced when they
/// converge.  A symmetric sequence gives sums ≡ 0.
pub fn balance_check(pos: &[f64], neg: &[f64]) -> BalanceReport {
    let k_max = pos.len().max(neg.len());
    let f = |l: f64| l / (1.0 + l * l);
    let mut acc = 0.0;
    let mut sums = Vec::with_capacity(k_max);
    for k in 0..k_max {
        if k < pos.len() {
            acc += f(pos[k]);
        }
        if k < neg.len() {
            acc += f(neg[k]);
        }
        sums.push(acc);
    }
    let balanced = if sums.len() < 16 {
        true
    } else {
        let tail = &sums[3 * sums.len() / 4..];
        let spread = tail
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        (spread.1 - spread.0) < 2e-2 * (1.0 + acc.abs())
    };
    BalanceReport {
        partial_sums: sums,
        balanced,
    }
}

/// Characteristic sequence of a two-sided window:
/// `p_n = ½[log(1+Λ_n²) + Σ_{0<|n−k|<N} log((1+Λ_k²)/(Λ_k−Λ_n)²)]`,
/// principal value by index-symmetric truncation, Richardson-
/// extrapolated over three nested truncation radii.
///
/// `pos[i]` is Λ_{i+1}, `neg[i]` is Λ_{−(i+1)}, Λ_0 = 0 is adjoined.
/// Values are returned for positive indices `1..=out`.
pub fn characteristic_sequence_two_sided(
    pos: &[f64],
    neg: &[f64],
    out: usize,
) -> Result<CharacteristicData> {
    let bal = balance_check(pos, neg);
    if !bal.balanced {
        return Err(Error::Divergence(
            "principal-value sums are not Cauchy: sequence is unbalanced".into(),
        ));
    }
    let w_pos = pos.len();
    let w_neg = neg.len();
    if out == 0 || out > w_pos {
        return Err(Error::Precondition(format!(
            "requested {out} values from a window of {w_pos}"
        )));
    }
    let lam = |k: i64| -> f64 {
        if k == 0 {
            0.0
        } else if k > 0 {
            pos[(k - 1) as usize]
        } else {
            neg[(-k - 1) as usize]
        }
    };
    // Largest usable radius for index `out`: n + (N−1) ≤ w_pos and
    // n − (N−1) ≥ −w_neg.  The truncation tail of the paired sums has
    // an n²/N leading coefficient, so three nested radii in exact 1:2:4
    // ratio feed a quadratic Richardson step that removes both the 1/N
    // and 1/N² terms.
    let n_big = (w_pos - out + 1).min(w_neg + 1);
    if n_big < 128 {
        return Err(Error::Precondition(format!(
            "window supports radius {n_big} < 128 at index {out}; extend the sequence"
        )));
    }
    let base = n_big / 4;
    let radii = [base, 2 * base, 4 * base];
    let mut p = Vec::with_capacity(out);
    let mut spread = Vec::with_capacity(out);
    for n in 1..=out as i64 {
        let ln_ = lam(n);
        let mut vals = [0.0_f64; 3];
        // One pass at the largest radius, recording the nested sums.
        let mut acc = (1.0 + ln_ * ln_).ln();
        for (ri, &rad) in radii.iter().enumerate() {
            let lo = if ri == 0 { 1 } else { radii[ri - 1] };
            for d in lo as i64..rad as i64 {
                for k in [n - d, n + d] {
                    if k >= -(w_neg as i64) && k <= w_pos as i64 {
                        let lk = lam(k);
                        let diff = lk - ln_;
                        acc += (1.0 + lk * lk).ln() - 2.0 * diff.abs().ln();
                    }
                }
            }
            vals[ri] = 0.5 * acc;
        }
        // Quadratic Richardson over radii (h, 2h, 4h) in h = 1/N,
        // diagnosed against the linear step at the finest pair.
        let quad = (8.0 * vals[2] - 6.0 * vals[1] + vals[0]) / 3.0;
        let lin = 2.0 * vals[2] - vals[1];
        p.push(quad);
        spread.push((quad - lin).abs());
    }
    Ok(CharacteristicData {
        lams: pos[..out].to_vec(),
        gamma: Vec::new(),
        p,
        p_spread: spread,
    })
}

/// Characteristic sequence of a symmetric spectral sequence (0 adjoined,
/// Λ_{−k} = −λ_k).
pub fn characteristic_sequence(lams: &SpectralSequence, out: usize) -> Result<CharacteristicData> {
    let neg: Vec<f64> = lams.lams.iter().map(|l| -l).collect();
    characteristic_sequence_two_sided(&lams.lams, &neg, out)
}

/// Cross-formula γ estimate from the p route:
/// `γ_n ≈ exp(p_n)/Q̂` with
/// `Q̂ = (sinh 1/π)·Π_{n≤N}(1+λ_n²)/(1+π²n²)·e^{2Ĉ/N}`.
pub fn gammas_from_p(data: &CharacteristicData, full_window: &[f64]) -> Result<Vec<f64>> {
    if data.p.is_empty() {
        return Err(Error::Precondition("p part not computed".into()));
    }
    let n_win = full_window.len();
    let chat = asymptotic_constant(full_window);
    let mut logq = (1.0_f64.sinh() / PI).ln() + 2.0 * chat / n_win as f64;
    for (i, &l) in full_window.iter().enumerate() {
        let n = (i + 1) as f64;
        logq += ((1.0 + l * l) / (1.0 + PI * PI * n * n)).ln();
    }
    Ok(data.p.iter().map(|p| (p - logq).exp()).collect())
}

/// Report of the mass identity α_n β_n = γ_n².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevenReport {
    /// Per-index relative errors |α_nβ_n − γ_n²|/γ_n².
    pub rel_errors: Vec<f64>,
    /// Worst relative error over the compared window.
    pub max_rel_error: f64,
}

/// Verify α_n β_n = γ_n² over the common window of the two measures and
/// the characteristic data.
pub fn leven_verify(
    mu_plus: &SpectralMeasure,
    mu_minus: &SpectralMeasure,
    gam: &CharacteristicData,
) -> Result<LevenReport> {
    let n = mu_plus
        .lams
        .len()
        .min(mu_minus.lams.len())
        .min(gam.gamma.len());
    if n == 0 {
        return Err(Error::Precondition("empty comparison window".into()));
    }
    for i in 0..n {
        if (mu_plus.lams[i] - mu_minus.lams[i]).abs() > 1e-6 * (1.0 + mu_plus.lams[i])
            || (mu_plus.lams[i] - gam.lams[i]).abs() > 1e-6 * (1.0 + mu_plus.lams[i])
        {
            return Err(Error::Precondition(format!(
                "support mismatch at index {}",
                i + 1
            )));
        }
    }
    let mut rels = Vec::with_capacity(n);
    for i in 0..n {
        let g2 = gam.gamma[i] * gam.gamma[i];
        rels.push((mu_plus.masses[i] * mu_minus.masses[i] - g2).abs() / g2);
    }
    let max = rels.iter().cloned().fold(0.0_f64, f64::max);
    Ok(LevenReport {
        rel_errors: rels,
        max_rel_error: max,
    })
}

/// Verdict of the polynomial-density criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyDensityVerdict {
    /// exp(p_n) = O(mass_n) holds along the subsequence.
    ConsistentWithIncompleteness,
    /// The ratio exp(p_n)/mass_n grows along the subsequence.
    Inconsistent,
    /// The window is too short to separate the trends.
    IndeterminateAtThisScale,
}

/// Report of the polynomial-density criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyDensityReport {
    pub verdict: PolyDensityVerdict,
    /// Ratios exp(p_n)/μ({λ_n}) on the subsequence.
    pub ratios: Vec<f64>,
    /// Fitted growth rate of log ratio per unit index.
    pub growth_rate: f64,
    /// Index density of the subsequence at the full window.
    pub subsequence_density: f64,
}

/// Check exp(p_n) = O(μ({λ_n})) along the index subsequence `sub` of
/// the positive support of μ (a symmetric measure given as its positive
/// branch with mass0; indices are 1-based into `lams`).
///
/// Preconditions: the subsequence must have small index density (≤ 0.2
/// over the window) — dense subsequences are outside the criterion's
/// scope and are refused.
pub fn polynomial_density_criterion(
    mu: &SpectralMeasure,
    sub: &[usize],
) -> Result<PolyDensityReport> {
    let w = mu.lams.len();
    if sub.is_empty() || sub.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Precondition(
            "subsequence must be nonempty and strictly increasing".into(),
        ));
    }
    let &max_idx = sub.last().unwrap();
    if *sub.first().unwrap() < 1 || max_idx > w {
        return Err(Error::Precondition("subsequence index out of window".into()));
    }
    let density = sub.len() as f64 / max_idx as f64;
    if density > 0.2 {
        return Err(Error::Precondition(format!(
            "subsequence density {density:.2} is not small; criterion needs a sparse subsequence"
        )));
    }
    // p_n on the full support, read along the subsequence.  Keep the
    // output range within the window's usable radius.
    let out = max_idx.min((w + 1).saturating_sub(128));
    if out < max_idx {
        return Err(Error::Precondition(format!(
            "window of {w} atoms cannot certify p at index {max_idx}; extend by ≥ 128"
        )));
    }
    let seq = SpectralSequence::new(mu.lams.clone(), true)?;
    let data = characteristic_sequence(&seq, out)?;
    let mut ratios = Vec::with_capacity(sub.len());
    let mut xs = Vec::with_capacity(sub.len());
    for &idx in sub {
        let mass = mu.masses[idx - 1];
        ratios.push(data.p[idx - 1].exp() / mass);
        xs.push(idx as f64);
    }
    // Fit log ratio ~ a + b·index.
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, r) in xs.iter().zip(&ratios) {
        let y = r.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let b = if denom.abs() < 1e-12 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    };
    let verdict = if sub.len() < 4 {
        PolyDensityVerdict::IndeterminateAtThisScale
    } else if b <= 0.05 {
        PolyDensityVerdict::ConsistentWithIncompleteness
    } else if b >= 0.2 {
        PolyDensityVerdict::Inconsistent
    } else {
        PolyDensityVerdict::IndeterminateAtThisScale
    };
    Ok(PolyDensityReport {
        verdict,
        ratios,
        growth_rate: b,
        subsequence_density: density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::measure::TailModel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_product_is_sine() {
        let lams = SpectralSequence::free_dd(40);
        for &z in &[
            Complex64::new(1.234, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(9.3, 0.5), // within the grouping cell of π·3
            Complex64::new(-7.0, 0.1),
        ] {
            let f = canonical_product(&lams, z).unwrap();
            let s = z.sin();
            assert!((f - s).norm() < 1e-10 * (1.0 + s.norm()), "{f} vs {s}");
        }
    }

    #[test]
    fn product_vanishes_on_input_sequence() {
        let lams = SpectralSequence::new(
            (1..=30)
                .map(|n| PI * n as f64 + 1.0 / (n as f64 + 1.0))
                .collect(),
            true,
        )
        .unwrap();
        for &l in lams.lams.iter().take(8) {
            let f = canonical_product(&lams, Complex64::new(l, 0.0)).unwrap();
            assert!(f.norm() < 1e-12, "|F({l})| = {}", f.norm());
        }
    }

    #[test]
    fn tail_node_refused() {
        let lams = SpectralSequence::free_dd(10);
        let z = Complex64::new(PI * 25.0, 0.0);
        assert!(canonical_product(&lams, z).is_err());
    }

    #[test]
    fn free_even_masses_are_pi() {
        let lams = SpectralSequence::free_dd(50);
        let data = even_masses(&lams).unwrap();
        for &g in &data.gamma {
            assert_abs_diff_eq!(g, PI, epsilon = 1e-10);
        }
    }

    #[test]
    fn free_characteristic_sequence_hits_sinh_one() {
        let lams = SpectralSequence::free_dd(1040);
        let data = characteristic_sequence(&lams, 20).unwrap();
        for (n, &p) in data.p.iter().enumerate() {
            let rel = (p.exp() - 1.0_f64.sinh()).abs() / 1.0_f64.sinh();
            assert!(rel < 1e-3, "n={} exp(p)={} rel={}", n + 1, p.exp(), rel);
        }
        // Cross-formula constancy: exp(p)/γ = sinh(1)/π for free.
        let gammas = even_masses(&lams).unwrap();
        let joined = data.clone().with_gamma_from(&gammas);
        for r in joined.exp_p_over_gamma() {
            assert_abs_diff_eq!(r, 1.0_f64.sinh() / PI, epsilon = 2e-3);
        }
    }

    #[test]
    fn toy_sequence_gamma_matches_p_route() {
        let lams = SpectralSequence::new(
            (1..=1040)
                .map(|n| PI * n as f64 + 1.0 / (n as f64 + 1.0))
                .collect(),
            true,
        )
        .unwrap();
        let gam = even_masses(&lams).unwrap();
        let p = characteristic_sequence(&lams, 16).unwrap();
        let via_p = gammas_from_p(&p, &lams.lams).unwrap();
        for (i, (g, gp)) in gam.gamma.iter().zip(&via_p).enumerate() {
            let rel = (g - gp).abs() / g;
            assert!(rel < 0.02, "n={} direct={} via p={} rel={}", i + 1, g, gp, rel);
        }
    }

    #[test]
    fn perturbation_of_p_is_local() {
        let delta = 0.1;
        let free = SpectralSequence::free_dd(600);
        let mut moved = free.lams.clone();
        moved[49] += delta; // λ_50
        let pert = SpectralSequence::new(moved, true).unwrap();
        let p0 = characteristic_sequence(&free, 80).unwrap();
        let p1 = characteristic_sequence(&pert, 80).unwrap();
        // The nearest-neighbour terms log(Λ_k − Λ_50)² see the move
        // directly; everything at λ-distance > 1 obeys |Δp| ≤ C·δ with
        // a modest C, decaying with distance.
        let shift = |n: usize| (p1.p[n - 1] - p0.p[n - 1]).abs();
        assert!(shift(49) > 0.02, "neighbour shift {}", shift(49));
        assert!(shift(51) > 0.02, "neighbour shift {}", shift(51));
        let c_est = (1..=80)
            .filter(|&n| n != 50)
            .map(|n| shift(n) / delta)
            .fold(0.0_f64, f64::max);
        assert!(c_est < 0.5, "locality constant estimate {c_est}");
        // Ten indices away the effect is an order smaller than at the
        // neighbours.
        assert!(shift(40) < 0.005, "shift at distance 10: {}", shift(40));
        assert!(shift(5) < 0.002, "shift at distance 45: {}", shift(5));
    }

    #[test]
    fn balance_symmetric_is_zero_and_one_sided_diverges() {
        let pos: Vec<f64> = (1..=200).map(|n| PI * n as f64).collect();
        let neg: Vec<f64> = pos.iter().map(|l| -l).collect();
        let rep = balance_check(&pos, &neg);
        assert!(rep.balanced);
        assert!(rep.partial_sums.iter().all(|s| s.abs() < 1e-12));
        let rep1 = balance_check(&pos, &[]);
        assert!(!rep1.balanced, "one-sided harmonic sums flagged balanced");
        // And the characteristic sequence refuses the unbalanced input.
        assert!(matches!(
            characteristic_sequence_two_sided(&pos, &[], 4),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn poly_density_verdicts() {
        // Synthetic free support, lacunary subsequence 2^j.
        let lams = SpectralSequence::free_dd(600);
        let p = characteristic_sequence(&lams, 64).unwrap();
        let sub: Vec<usize> = (2..=6).map(|j| 1usize << j).collect(); // 4..64
        let mut masses_ok = vec![PI; 600];
        let mut masses_bad = vec![PI; 600];
        for &idx in &sub {
            masses_ok[idx - 1] = p.p[idx - 1].exp();
            masses_bad[idx - 1] = (p.p[idx - 1] - idx as f64 * 0.5).exp();
        }
        let mu_ok = SpectralMeasure::new(
            lams.lams.clone(),
            masses_ok,
            PI,
            TailModel::FreePi,
            crate::herglotz::measure::Side::Right,
        )
        .unwrap();
        let mu_bad = SpectralMeasure::new(
            lams.lams.clone(),
            masses_bad,
            PI,
            TailModel::FreePi,
            crate::herglotz::measure::Side::Right,
        )
        .unwrap();
        let rep_ok = polynomial_density_criterion(&mu_ok, &sub).unwrap();
        assert_eq!(rep_ok.verdict, PolyDensityVerdict::ConsistentWithIncompleteness);
        let rep_bad = polynomial_density_criterion(&mu_bad, &sub).unwrap();
        assert_eq!(rep_bad.verdict, PolyDensityVerdict::Inconsistent);
        // Dense subsequence refused.
        let dense: Vec<usize> = (1..=250).collect();
        assert!(polynomial_density_criterion(&mu_ok, &dense).is_err());
    }

    #[test]
    fn leven_identity_for_asymmetric_operator() {
        use crate::herglotz::measure::Side;
        use crate::sturm::eigen::{eigenvalues, BoundaryPair};
        use crate::sturm::integrate::StepRule;
        use crate::sturm::masses::norming_masses;
        let q = crate::potential::Potential::from_fn(|x| x, 257).unwrap();
        let rule = StepRule::default();
        let lams = eigenvalues(&q, BoundaryPair::DD, 80, rule).unwrap();
        let head = SpectralSequence::new(lams.lams[..8].to_vec(), true).unwrap();
        let alpha = norming_masses(&q, &head, Side::Right, rule).unwrap();
        let beta = norming_masses(&q, &head, Side::Left, rule).unwrap();
        let gam = even_masses(&lams).unwrap();
        let rep = leven_verify(&alpha, &beta, &gam).unwrap();
        assert!(rep.max_rel_error < 5e-3, "max rel {}", rep.max_rel_error);
        // α ≠ β for the asymmetric potential.
        let diff = (alpha.masses[0] - beta.masses[0]).abs();
        assert!(diff > 1e-3, "α and β coincide unexpectedly");
    }
}
