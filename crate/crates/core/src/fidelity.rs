//! Fidelity estimation from shot records and exact fidelity on tableaux.
//!
//! X-basis shots estimate ⟨P_x⟩ through the parities of the X stabilizers
//! and X̄; Z-basis shots estimate ⟨P_z⟩ through the Z-stabilizer parities.
//! The reported lower bound is ⟨P_x⟩ + ⟨P_z⟩ − 1, with a 1σ uncertainty
//! from bootstrap resampling (the two bases resampled independently).

use crate::layout::CodeLayout;
use crate::prep::{Basis, ShotRecord};
use crate::tableau::{StabilizerTableau, TableauError};
use rand::{Rng, RngCore};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FidelityError {
    #[error("no shots in the {0:?} basis")]
    ZeroShots(Basis),
    #[error("record has {got} bits, expected {expected} data qubits")]
    BitCountMismatch { got: usize, expected: usize },
    #[error("operator support index {0} out of range")]
    SupportOutOfRange(usize),
    #[error("bootstrap needs at least 2 resamples, got {0}")]
    TooFewResamples(usize),
}

/// Point estimates plus bootstrap uncertainty.
#[derive(Clone, Debug, Serialize)]
pub struct FidelityEstimate {
    pub px_hat: f64,
    pub pz_hat: f64,
    /// px_hat + pz_hat − 1.
    pub lower_bound: f64,
    /// 1σ bootstrap standard deviation of the lower bound.
    pub sigma: f64,
    pub n_x: usize,
    pub n_z: usize,
    pub n_resamples: usize,
    /// ⟨(1+S)/2⟩ per stabilizer id (X ids from X shots, Z ids from Z shots).
    pub per_stabilizer: BTreeMap<String, f64>,
    /// ⟨(1+X̄)/2⟩ from X-basis shots.
    pub logical_x_fidelity: f64,
    /// Paper-style "value(sigma)" rendering of the lower bound.
    pub formatted: String,
}

/// Parity of ±1 `bits` over `support`: true when the product is +1.
fn parity_even(bits: &[i8], support: &[usize]) -> Result<bool, FidelityError> {
    let mut minus = 0usize;
    for &q in support {
        let b = *bits.get(q).ok_or(FidelityError::SupportOutOfRange(q))?;
        if b < 0 {
            minus += 1;
        }
    }
    Ok(minus % 2 == 0)
}

/// 1 iff every listed operator's parity over `bits` is +1.
pub fn projector_indicator(
    bits: &[i8],
    operator_supports: &[Vec<usize>],
) -> Result<bool, FidelityError> {
    for s in operator_supports {
        if !parity_even(bits, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Supports whose parities make up the P_x indicator: S^X and X̄.
pub fn x_sector_supports(layout: &CodeLayout) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = layout.x_stabilizers().iter().map(|x| x.data.clone()).collect();
    v.push(layout.logical_x().to_vec());
    v
}

/// Supports for the P_z indicator: S^Z.
pub fn z_sector_supports(layout: &CodeLayout) -> Vec<Vec<usize>> {
    layout.z_stabilizers().iter().map(|z| z.data.clone()).collect()
}

fn sector_indicators(
    records: &[ShotRecord],
    layout: &CodeLayout,
) -> Result<(Vec<bool>, Vec<bool>), FidelityError> {
    let x_supports = x_sector_supports(layout);
    let z_supports = z_sector_supports(layout);
    let mut x_ind = Vec::new();
    let mut z_ind = Vec::new();
    for r in records {
        if r.final_bits.len() != layout.n_data() {
            return Err(FidelityError::BitCountMismatch {
                got: r.final_bits.len(),
                expected: layout.n_data(),
            });
        }
        match r.basis {
            Basis::X => x_ind.push(projector_indicator(&r.final_bits, &x_supports)?),
            Basis::Z => z_ind.push(projector_indicator(&r.final_bits, &z_supports)?),
        }
    }
    Ok((x_ind, z_ind))
}

fn mean(v: &[bool]) -> f64 {
    v.iter().filter(|&&b| b).count() as f64 / v.len() as f64
}

/// Bootstrap 1σ of the lower bound: resample both indicator sets with
/// replacement (independently, at their original sizes), recompute the
/// bound per resample, and take the standard deviation across resamples.
pub fn bootstrap_sigma<R: RngCore + ?Sized>(
    x_indicators: &[bool],
    z_indicators: &[bool],
    n_resamples: usize,
    rng: &mut R,
) -> Result<f64, FidelityError> {
    if n_resamples < 2 {
        return Err(FidelityError::TooFewResamples(n_resamples));
    }
    if x_indicators.is_empty() {
        return Err(FidelityError::ZeroShots(Basis::X));
    }
    if z_indicators.is_empty() {
        return Err(FidelityError::ZeroShots(Basis::Z));
    }
    let resample_mean = |v: &[bool], rng: &mut R| {
        let hits = (0..v.len()).filter(|_| v[rng.gen_range(0..v.len())]).count();
        hits as f64 / v.len() as f64
    };
    let bounds: Vec<f64> = (0..n_resamples)
        .map(|_| resample_mean(x_indicators, rng) + resample_mean(z_indicators, rng) - 1.0)
        .collect();
    let m = bounds.iter().sum::<f64>() / n_resamples as f64;
    let var = bounds.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (n_resamples - 1) as f64;
    Ok(var.sqrt())
}

/// Estimate ⟨P_x⟩, ⟨P_z⟩, the fidelity lower bound, per-stabilizer
/// fidelities and the bootstrap σ from a record stream.
pub fn estimate<R: RngCore + ?Sized>(
    records: &[ShotRecord],
    layout: &CodeLayout,
    n_resamples: usize,
    rng: &mut R,
) -> Result<FidelityEstimate, FidelityError> {
    let (x_ind, z_ind) = sector_indicators(records, layout)?;
    if x_ind.is_empty() {
        return Err(FidelityError::ZeroShots(Basis::X));
    }
    if z_ind.is_empty() {
        return Err(FidelityError::ZeroShots(Basis::Z));
    }
    let px_hat = mean(&x_ind);
    let pz_hat = mean(&z_ind);
    let lower_bound = px_hat + pz_hat - 1.0;
    let sigma = bootstrap_sigma(&x_ind, &z_ind, n_resamples, rng)?;

    let mut per_stabilizer = BTreeMap::new();
    let marginal = |basis: Basis, support: &[usize]| -> Result<f64, FidelityError> {
        let mut even = 0usize;
        let mut total = 0usize;
        for r in records.iter().filter(|r| r.basis == basis) {
            total += 1;
            if parity_even(&r.final_bits, support)? {
                even += 1;
            }
        }
        Ok(even as f64 / total as f64)
    };
    for x in layout.x_stabilizers() {
        per_stabilizer.insert(x.id.clone(), marginal(Basis::X, &x.data)?);
    }
    for z in layout.z_stabilizers() {
        per_stabilizer.insert(z.id.clone(), marginal(Basis::Z, &z.data)?);
    }
    let logical_x_fidelity = marginal(Basis::X, layout.logical_x())?;

    Ok(FidelityEstimate {
        px_hat,
        pz_hat,
        lower_bound,
        sigma,
        n_x: x_ind.len(),
        n_z: z_ind.len(),
        n_resamples,
        per_stabilizer,
        logical_x_fidelity,
        formatted: format_with_sigma(lower_bound, sigma),
    })
}

/// Exact fidelity of a tableau with |+̄⟩: the expectation of the product of
/// projectors onto the +1 eigenspaces of S^X ∪ S^Z ∪ {X̄}. Ancilla qubits
/// may be present (the generators act as identity there).
pub fn exact_fidelity(t: &StabilizerTableau, layout: &CodeLayout) -> Result<f64, TableauError> {
    t.overlap_with_generators(&layout.target_generators())
}

/// Render `value` with its 1σ uncertainty in trailing-digit parentheses,
/// e.g. 0.769 ± 0.013 → "0.769(13)". A zero σ renders as "(0)".
pub fn format_with_sigma(value: f64, sigma: f64) -> String {
    if sigma <= 0.0 {
        return format!("{value:.3}(0)");
    }
    let mut digits = (1 - sigma.log10().floor() as i32).max(0);
    let mut paren = (sigma * 10f64.powi(digits)).round() as u64;
    if paren >= 100 {
        // rounding pushed σ to 3 digits; drop one decimal
        digits -= 1;
        paren = (sigma * 10f64.powi(digits)).round() as u64;
    }
    format!("{value:.prec$}({paren})", prec = digits.max(0) as usize)
}
