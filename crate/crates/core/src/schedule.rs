//! Phase schedule of the single-scale construction: distance thresholds,
//! cluster radii, sampling degrees and hop bounds.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::{big, big_to_f64, floor_on_grid, floor_u64, Weight};

/// Degree sequence used for sampling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// `n^{2^i/κ}` in the first stage, `n^ρ` afterwards.
    #[default]
    Basic,
    /// `n^{2^i/κ} / 2^{2^i-1}` in the first stage, then one phase at
    /// `n^{ρ/2}`, then `n^ρ`. One extra phase, smaller hopset.
    Refined,
}

impl std::str::FromStr for DegreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(DegreeMode::Basic),
            "refined" => Ok(DegreeMode::Refined),
            _ => Err(Error::InvalidParameter(format!(
                "unknown degree mode {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for DegreeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DegreeMode::Basic => "basic",
            DegreeMode::Refined => "refined",
        })
    }
}

/// Every derived per-scale parameter. Index `i` ranges over phases
/// `0..=ell`; phase `ell` only interconnects.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSchedule {
    pub n: usize,
    pub kappa: u32,
    pub rho: Ratio<u64>,
    pub eps: Ratio<u64>,
    pub rhat: BigRational,
    pub degree_mode: DegreeMode,
    pub i0: usize,
    pub i1: usize,
    pub ell: usize,
    pub alpha: BigRational,
    /// `delta[i]` for `i in 0..=ell`.
    pub delta: Vec<BigRational>,
    /// `radius[i]` (cluster radius bound entering phase `i`) for `i in 0..=ell`.
    pub radius: Vec<BigRational>,
    /// Sampling degree for the superclustering phases `0..ell`.
    pub deg: Vec<f64>,
    /// Hop bounds `h[0..=ell]`.
    pub h: Vec<BigRational>,
    /// `floor(2 h_ell + 1)`, saturated into `u64`.
    pub beta: u64,
}

/// Validates `(κ, ρ)` and returns the phase indices `(i0, i1, ell)`.
pub fn phase_counts(
    kappa: u32,
    rho: Ratio<u64>,
    mode: DegreeMode,
) -> Result<(usize, usize, usize)> {
    if kappa < 2 {
        return Err(Error::InvalidParameter(format!(
            "kappa must be >= 2, got {kappa}"
        )));
    }
    if rho > Ratio::new(1, 2) {
        return Err(Error::InvalidParameter(format!(
            "rho must be <= 1/2, got {rho}"
        )));
    }
    let kr = rho * Ratio::from_integer(kappa as u64);
    if kr < Ratio::one() {
        return Err(Error::InvalidParameter(format!(
            "kappa*rho = {kr} < 1; choose rho >= 1/kappa = 1/{kappa}"
        )));
    }
    // i0 = floor(log2(κρ))
    let mut i0 = 0usize;
    while Ratio::from_integer(1u64 << (i0 + 1)) <= kr {
        i0 += 1;
    }
    let stage2 = (Ratio::from_integer(kappa as u64 + 1) / kr)
        .ceil()
        .to_integer() as usize;
    let i1 = match mode {
        DegreeMode::Basic => i0 + stage2 - 2,
        DegreeMode::Refined => i0 + stage2 - 1,
    };
    Ok((i0, i1, i1 + 1))
}

/// Hop bounds `h_0 = 1`, `h_{i+1} = (h_i + 1)(1/ε + 2) + 2i + 5`.
pub fn hop_bounds(eps: Ratio<u64>, ell: usize) -> Vec<BigRational> {
    let inv = big(eps.recip());
    let two = BigRational::from_integer(BigInt::from(2));
    let mut h = vec![BigRational::one()];
    for i in 0..ell {
        let next = (&h[i] + BigRational::one()) * (&inv + &two)
            + BigRational::from_integer(BigInt::from(2 * i as u64 + 5));
        h.push(next);
    }
    h
}

pub fn compute_schedule(
    n: usize,
    kappa: u32,
    rho: Ratio<u64>,
    eps: Ratio<u64>,
    rhat: BigRational,
    degree_mode: DegreeMode,
) -> Result<PhaseSchedule> {
    let (i0, i1, ell) = phase_counts(kappa, rho, degree_mode)?;
    if eps.is_zero() || eps > Ratio::new(1, 10) {
        return Err(Error::InvalidParameter(format!(
            "internal epsilon must lie in (0, 1/10], got {eps}"
        )));
    }
    let eps_b = big(eps);
    let inv = big(eps.recip());
    let mut alpha = rhat.clone();
    for _ in 0..ell {
        alpha *= &eps_b;
    }
    let four = BigRational::from_integer(BigInt::from(4));
    let mut delta = Vec::with_capacity(ell + 1);
    let mut radius = vec![BigRational::zero()];
    let mut scale = alpha.clone(); // α (1/ε)^i
    for i in 0..=ell {
        let d = &scale + &four * &radius[i];
        if i < ell {
            radius.push(&d + &radius[i]);
        }
        delta.push(d);
        scale *= &inv;
    }

    let nf = n.max(2) as f64;
    let k = kappa as f64;
    let rho_f = *rho.numer() as f64 / *rho.denom() as f64;
    let deg = (0..ell)
        .map(|i| match degree_mode {
            DegreeMode::Basic if i <= i0 => nf.powf((1u64 << i) as f64 / k),
            DegreeMode::Refined if i <= i0 => {
                nf.powf((1u64 << i) as f64 / k) / 2f64.powf(((1u64 << i) - 1) as f64)
            }
            DegreeMode::Refined if i == i0 + 1 => nf.powf(rho_f / 2.0),
            _ => nf.powf(rho_f),
        })
        .collect();

    let h = hop_bounds(eps, ell);
    let beta =
        floor_u64(&(BigRational::from_integer(BigInt::from(2)) * &h[ell] + BigRational::one()));
    Ok(PhaseSchedule {
        n,
        kappa,
        rho,
        eps,
        rhat,
        degree_mode,
        i0,
        i1,
        ell,
        alpha,
        delta,
        radius,
        deg,
        h,
        beta,
    })
}

impl PhaseSchedule {
    /// Superclustering depth `δ_i` on the weight grid with denominator `denom`.
    pub fn depth(&self, i: usize, denom: u128) -> Weight {
        floor_on_grid(&self.delta[i], denom)
    }

    /// Interconnection depth `δ_i / 2` on the weight grid.
    pub fn half_depth(&self, i: usize, denom: u128) -> Weight {
        let half = &self.delta[i] / BigRational::from_integer(BigInt::from(2));
        floor_on_grid(&half, denom)
    }

    /// Sampling probability of phase `i`, `min(1, 1/deg_i)`.
    pub fn sample_probability(&self, i: usize) -> f64 {
        (1.0 / self.deg[i]).min(1.0)
    }

    /// Band stretch `ζ = 16 c (ℓ+1) ε` with `c = 2`.
    pub fn zeta(&self) -> Ratio<u64> {
        self.eps * Ratio::from_integer(32 * (self.ell as u64 + 1))
    }

    pub fn delta_f64(&self) -> Vec<f64> {
        self.delta.iter().map(big_to_f64).collect()
    }

    pub fn radius_f64(&self) -> Vec<f64> {
        self.radius.iter().map(big_to_f64).collect()
    }
}
