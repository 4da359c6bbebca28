//! Bound-state wavefunction reconstruction.
//!
//! Instead of sampling psi through the impedance (which has poles at nodes),
//! the pair (psi, v) with v = (hbar/(i m)) psi' is marched left to right. The
//! pair flows linearly through regions and point interactions, stays finite
//! at nodes, and reproduces v/psi = Z wherever psi != 0. Both tails are
//! forced to the purely decaying branch, so a slightly off-resonance energy
//! from the bisection search cannot leak an exponentially growing component
//! into the sampled window.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::impedance::{self, ImpedanceProfile, RegionKind, RegionWave};
use crate::potential::PotentialSpec;

/// A jump of psi across a point interaction with delta_prime_strength != 0.
/// Pure delta terms leave psi continuous (ratio 1) but still kink psi'.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discontinuity {
    pub position: f64,
    /// psi(x + 0) / psi(x - 0); real for real interaction strengths.
    pub ratio: f64,
}

/// A sampled wavefunction on a caller-supplied grid.
#[derive(Clone, Debug)]
pub struct WavefunctionSamples {
    pub xs: Vec<f64>,
    pub psi: Vec<Complex64>,
    /// Trapezoid estimate of the integral of |psi|^2 over the grid.
    pub norm: f64,
    pub discontinuities: Vec<Discontinuity>,
    normalizable: bool,
}

impl WavefunctionSamples {
    /// False when the sampled density cannot be scaled to unit norm
    /// (zero, overflowing, or non-finite trapezoid weight).
    pub fn is_normalizable(&self) -> bool {
        self.normalizable
    }
}

fn trapezoid_norm(xs: &[f64], psi: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..xs.len() {
        let a = psi[i - 1].norm_sqr();
        let b = psi[i].norm_sqr();
        acc += 0.5 * (a + b) * (xs[i] - xs[i - 1]);
    }
    acc
}

/// Advance (psi, v) across a uniform stretch of width `d` inside `region`.
fn march_region(psi: Complex64, v: Complex64, region: &RegionWave, d: f64, m_over_hbar: f64) -> (Complex64, Complex64) {
    if let RegionKind::Degenerate = region.kind {
        // psi'' = 0: psi grows linearly, v is constant.
        let slope = Complex64::new(0.0, m_over_hbar) * v;
        return (psi + slope * d, v);
    }
    let g = region.gamma * d;
    let ch = g.cosh();
    let sh = g.sinh();
    (psi * ch + (v / region.z) * sh, psi * (region.z * sh) + v * ch)
}

fn decay_rate(region: &RegionWave) -> Option<f64> {
    match region.kind {
        RegionKind::Evanescent { kappa } => Some(kappa),
        _ => None,
    }
}

/// Sample the bound-state wavefunction for `profile` on the grid `xs`.
///
/// The grid must be finite, strictly increasing, and span every potential
/// boundary; samples taken exactly on a boundary report the right limit. The
/// result is unnormalized with psi(x_0 - 0) = 1; pass it through
/// [`normalize`] for a unit-norm state. Energies at or above the lower
/// asymptote are rejected: such states oscillate forever and carry no finite
/// norm, so their density should be read off scattering solutions instead.
pub fn reconstruct(
    spec: &PotentialSpec,
    profile: &ImpedanceProfile,
    xs: &[f64],
) -> Result<WavefunctionSamples> {
    let b = spec.boundary_count();
    if b == 0 {
        return Err(Error::InvalidArgument(
            "a structureless potential supports no bound states to reconstruct".into(),
        ));
    }
    let edge = spec.left_asymptote().min(spec.right_asymptote());
    if profile.energy >= edge {
        return Err(Error::NotNormalizable(format!(
            "E = {} is at or above the continuum edge {edge}; the state is not square \
             integrable, so reconstruct a scattering solution's density instead",
            profile.energy
        )));
    }
    if xs.is_empty() {
        return Err(Error::InvalidArgument("sample grid is empty".into()));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("sample grid contains a non-finite point".into()));
    }
    for w in xs.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "sample grid must be strictly increasing; saw {} then {}",
                w[0], w[1]
            )));
        }
    }
    let x_first = profile.boundaries[0];
    let x_last = profile.boundaries[b - 1];
    if xs[0] > x_first || *xs.last().unwrap() < x_last {
        return Err(Error::InvalidArgument(format!(
            "sample grid [{}, {}] excludes a potential boundary; it must cover [{x_first}, {x_last}]",
            xs[0],
            xs.last().unwrap()
        )));
    }

    let c = spec.constants();
    let m_over_hbar = c.mass / c.hbar;
    let kappa_left = decay_rate(&profile.regions[0])
        .expect("left tail is evanescent below the continuum edge");
    let kappa_right = decay_rate(&profile.regions[b])
        .expect("right tail is evanescent below the continuum edge");

    // March boundary to boundary; entry j holds (psi, v) at boundaries[j] + 0.
    let mut edge_states: Vec<(Complex64, Complex64)> = Vec::with_capacity(b);
    let mut psi = Complex64::new(1.0, 0.0);
    let mut v = -profile.regions[0].z;
    for j in 0..b {
        let point = &spec.points()[j];
        let mu = impedance::psi_ratio(point, c)?;
        let g = impedance::derivative_coupling(point, c)?;
        let v_next = Complex64::new(0.0, -c.hbar * g / c.mass) * psi + v / mu;
        psi *= mu;
        v = v_next;
        edge_states.push((psi, v));
        if j + 1 < b {
            let d = profile.boundaries[j + 1] - profile.boundaries[j];
            let (p2, v2) = march_region(psi, v, &profile.regions[j + 1], d, m_over_hbar);
            psi = p2;
            v = v2;
        }
    }

    let samples: Vec<Complex64> = xs
        .iter()
        .map(|&x| {
            let idx = profile.boundaries.partition_point(|&bnd| bnd <= x);
            if idx == 0 {
                Complex64::new((kappa_left * (x - x_first)).exp(), 0.0)
            } else if idx == b {
                let (anchor, _) = edge_states[b - 1];
                anchor * (-kappa_right * (x - x_last)).exp()
            } else {
                let (p, vv) = edge_states[idx - 1];
                let d = x - profile.boundaries[idx - 1];
                march_region(p, vv, &profile.regions[idx], d, m_over_hbar).0
            }
        })
        .collect();

    let discontinuities = spec
        .points()
        .iter()
        .filter(|p| !p.is_trivial())
        .map(|p| {
            Ok(Discontinuity { position: p.position, ratio: impedance::psi_ratio(p, c)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let norm = trapezoid_norm(xs, &samples);
    let normalizable = norm.is_finite() && norm > 0.0;
    Ok(WavefunctionSamples { xs: xs.to_vec(), psi: samples, norm, discontinuities, normalizable })
}

/// Rescale to unit trapezoid norm on the sampled grid.
pub fn normalize(samples: &WavefunctionSamples) -> Result<WavefunctionSamples> {
    if !samples.is_normalizable() {
        return Err(Error::NotNormalizable(format!(
            "sampled norm {} cannot be scaled to one",
            samples.norm
        )));
    }
    let scale = 1.0 / samples.norm.sqrt();
    let psi: Vec<Complex64> = samples.psi.iter().map(|p| p * scale).collect();
    let norm = trapezoid_norm(&samples.xs, &psi);
    Ok(WavefunctionSamples {
        xs: samples.xs.clone(),
        psi,
        norm,
        discontinuities: samples.discontinuities.clone(),
        normalizable: true,
    })
}

/// Convenience wrapper: fold the impedance, reconstruct on `xs`, normalize.
pub fn bound_state_wavefunction(
    spec: &PotentialSpec,
    energy: f64,
    xs: &[f64],
) -> Result<WavefunctionSamples> {
    let profile = ImpedanceProfile::leftward(spec, energy)?;
    let raw = reconstruct(spec, &profile, xs)?;
    normalize(&raw)
}
