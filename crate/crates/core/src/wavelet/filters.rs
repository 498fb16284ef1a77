//! Filter coefficients and cascade sampling of the scaling function and
//! wavelet.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::ensemble::{dft, Ensemble};
use super::matrix::modulus;
use crate::error::{Error, Result};

/// Scaling filter `h` and wavelet filter `g`, normalized so that `Σ h_k = 1`
/// for a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub h: Vec<Complex64>,
    pub g: Vec<Complex64>,
}

impl FilterPair {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Largest deviation from `Σ_k h_k conj(h_{k+2n}) = δ_{n0}/2`.
    pub fn shift_orthogonality_defect(&self) -> f64 {
        shift_defect(&self.h, &self.h, 0.5)
            .max(shift_defect(&self.g, &self.g, 0.5))
            .max(shift_defect(&self.h, &self.g, 0.0))
    }
}

fn shift_defect(a: &[Complex64], b: &[Complex64], diag: f64) -> f64 {
    let n = a.len() as i64;
    let mut worst = 0.0f64;
    for shift in (-(n / 2))..=(n / 2) {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let l = k + 2 * shift;
            if (0..n).contains(&l) {
                s += a[k as usize] * b[l as usize].conj();
            }
        }
        let target = if shift == 0 { diag } else { 0.0 };
        worst = worst.max(modulus(s - target));
    }
    worst
}

/// `h_k = (A_k)₁₁`, `g_k = (A_k)₁₂`.
pub fn extract_filters(ens: &Ensemble) -> FilterPair {
    let a = dft(ens.matrices());
    FilterPair {
        h: a.iter().map(|x| x.get(0, 0)).collect(),
        g: a.iter().map(|x| x.get(0, 1)).collect(),
    }
}

/// The filter closest in max-norm to `reference` among `h`, its conjugate,
/// its reversal and the conjugated reversal, each multiplied by the global
/// phase that best aligns it with `reference`. Returns the aligned filter and
/// its max-norm distance.
pub fn align_to_reference(h: &[Complex64], reference: &[Complex64]) -> (Vec<Complex64>, f64) {
    assert_eq!(h.len(), reference.len(), "filter lengths differ");
    let reversed: Vec<Complex64> = h.iter().rev().copied().collect();
    let candidates = [
        h.to_vec(),
        h.iter().map(|z| z.conj()).collect(),
        reversed.clone(),
        reversed.iter().map(|z| z.conj()).collect(),
    ];
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    for cand in candidates {
        let overlap: Complex64 = cand.iter().zip(reference).map(|(a, b)| a.conj() * b).sum();
        let r = modulus(overlap);
        let phase = if r > 0.0 { overlap / r } else { Complex64::new(1.0, 0.0) };
        let aligned: Vec<Complex64> = cand.iter().map(|z| z * phase).collect();
        let dist = aligned
            .iter()
            .zip(reference)
            .map(|(a, b)| modulus(a - b))
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(_, d)| dist < *d) {
            best = Some((aligned, dist));
        }
    }
    best.expect("four candidates")
}

/// Dyadic samples of `φ` and `ψ` on `[0, M−1]` with spacing `2^{−levels}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSamples {
    pub t: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub psi: Vec<Complex64>,
}

pub const CASCADE_LIMIT: f64 = 1e6;
const INTEGER_ITERATIONS: usize = 10_000;
const INTEGER_TOL: f64 = 1e-15;

fn check_growth(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|z| modulus(*z) <= CASCADE_LIMIT) {
        Ok(())
    } else {
        Err(Error::CascadeDiverged { limit: CASCADE_LIMIT })
    }
}

/// Values of `φ` at the integers `0..M−1`: the fixed point of
/// `v ↦ (2 Σ_m h_{2n−m} v_m)_n` reached by power iteration from the unit
/// impulse. The impulse itself is kept when the iteration does not settle.
fn integer_values(h: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = h.len();
    let tap = |i: i64| {
        if (0..n as i64).contains(&i) {
            h[i as usize] * 2.0
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[0] = Complex64::new(1.0, 0.0);
    let impulse = v.clone();
    for _ in 0..INTEGER_ITERATIONS {
        let next: Vec<Complex64> = (0..n as i64)
            .map(|i| (0..n as i64).map(|m| tap(2 * i - m) * v[m as usize]).sum())
            .collect();
        check_growth(&next)?;
        let change = next.iter().zip(&v).map(|(a, b)| modulus(a - b)).fold(0.0, f64::max);
        v = next;
        if change < INTEGER_TOL {
            return Ok(v);
        }
    }
    let sum: Complex64 = v.iter().sum();
    if modulus(sum - 1.0) < 1e-9 {
        Ok(v)
    } else {
        Ok(impulse)
    }
}

/// Cascade refinement of the two-scale relations `φ(t) = Σ 2h_k φ(2t − k)`
/// and `ψ(t) = Σ 2g_k φ(2t − k)`.
pub fn cascade_samples(filters: &FilterPair, levels: u32) -> Result<CascadeSamples> {
    let n = filters.len();
    if levels == 0 || n < 2 || filters.g.len() != n {
        return Err(Error::InvalidProblem(alloc::format!(
            "cascade needs levels >= 1 and two filters of equal length >= 2 (levels {levels}, lengths {} and {})",
            n,
            filters.g.len()
        )));
    }
    let h = &filters.h;
    let mut phi = integer_values(h)?;
    for j in 0..levels {
        let step = 1usize << j;
        let len = (n - 1) * 2 * step + 1;
        let mut next = vec![Complex64::new(0.0, 0.0); len];
        for (i, out) in next.iter_mut().enumerate() {
            for (k, hk) in h.iter().enumerate() {
                let Some(src) = i.checked_sub(k * step) else { break };
                if let Some(p) = phi.get(src) {
                    *out += hk * 2.0 * p;
                }
            }
        }
        check_growth(&next)?;
        phi = next;
    }
    let scale = 1usize << levels;
    let len = phi.len();
    let psi: Vec<Complex64> = (0..len)
        .map(|i| {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, gk) in filters.g.iter().enumerate() {
                if let Some(src) = (2 * i).checked_sub(k * scale) {
                    if let Some(p) = phi.get(src) {
                        s += gk * 2.0 * p;
                    }
                }
            }
            s
        })
        .collect();
    check_growth(&psi)?;
    let t = (0..len).map(|i| i as f64 / scale as f64).collect();
    Ok(CascadeSamples { t, phi, psi })
}
