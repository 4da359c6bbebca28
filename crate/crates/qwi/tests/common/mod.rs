#![allow(dead_code)]

use qwi::potential::{PhysicalConstants, PotentialSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct ScatterCase {
    pub spec: PotentialSpec,
    /// Above both asymptotes, so every channel is open.
    pub open_energy: f64,
}

/// Random spec inside the advertised envelope: up to 8 regions with heights
/// in [-5, 5], up to 4 nontrivial points with delta strength in [-3, 3] and
/// reduced delta-prime strength inside (-0.9, 0.9). The returned energy sits
/// above both asymptotes and total evanescent opacity at that energy stays
/// below `opacity_cap`, which keeps the transfer-matrix reference accurate
/// enough to compare against (its entries grow like exp(opacity)).
pub fn random_scatter_case(r: &mut ChaCha8Rng, opacity_cap: f64) -> ScatterCase {
    loop {
        let n_bounds = r.gen_range(1..=7usize);
        let mut positions: Vec<f64> = (0..n_bounds).map(|_| r.gen_range(-3.0..3.0)).collect();
        positions.sort_by(f64::total_cmp);
        if positions.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let heights: Vec<f64> = (0..=n_bounds).map(|_| r.gen_range(-5.0..5.0)).collect();

        let mut points = vec![(0.0, 0.0); n_bounds];
        let n_pts = r.gen_range(0..=n_bounds.min(4));
        for _ in 0..n_pts {
            let idx = r.gen_range(0..n_bounds);
            let alpha = r.gen_range(-3.0..3.0);
            let beta = r.gen_range(-0.9..0.9); // hbar = m = 1: beta_tilde = beta
            points[idx] = (alpha, beta);
        }

        let spec = PotentialSpec::from_boundaries(
            PhysicalConstants::default(),
            &positions,
            &heights,
            &points,
        )
        .expect("generator produces valid tilings");

        let top = spec.left_asymptote().max(spec.right_asymptote());
        let energy = top + r.gen_range(0.05..6.0);
        if opacity(&spec, energy) <= opacity_cap {
            return ScatterCase { spec, open_energy: energy };
        }
    }
}

/// Total evanescent phase sum(kappa_i * width_i) over interior regions that
/// are classically forbidden at this energy.
pub fn opacity(spec: &PotentialSpec, energy: f64) -> f64 {
    let c = spec.constants();
    let regions = spec.regions();
    let mut total = 0.0;
    for region in &regions[1..regions.len().saturating_sub(1)] {
        if region.height > energy {
            let kappa = (2.0 * c.mass * (region.height - energy)).sqrt() / c.hbar;
            total += kappa * region.width();
        }
    }
    total
}

/// Cluster of 1..=3 attractive deltas on a flat background, spaced so every
/// level splitting stays wider than the reference scan resolution.
pub fn random_well_cluster(r: &mut ChaCha8Rng) -> PotentialSpec {
    loop {
        let n = r.gen_range(1..=3usize);
        let mut positions: Vec<f64> = (0..n).map(|_| r.gen_range(-0.9..0.9)).collect();
        positions.sort_by(f64::total_cmp);
        if positions.windows(2).any(|w| w[1] - w[0] < 0.15) {
            continue;
        }
        let heights = vec![0.0; n + 1];
        let points: Vec<(f64, f64)> =
            (0..n).map(|_| (-r.gen_range(0.4..1.5), 0.0)).collect();
        return PotentialSpec::from_boundaries(
            PhysicalConstants::default(),
            &positions,
            &heights,
            &points,
        )
        .expect("generator produces valid tilings");
    }
}

/// A floor certainly below every level of a pure-delta well cluster: merging
/// all wells into one maximizes the binding energy.
pub fn well_cluster_floor(spec: &PotentialSpec) -> f64 {
    let c = spec.constants();
    let ksum = spec.total_abs_delta_strength() * c.mass / (c.hbar * c.hbar);
    -c.hbar * c.hbar * ksum * ksum / (2.0 * c.mass) - 0.1
}

/// Positions and strengths of a random pure-delta arrangement (mixed signs)
/// for rescaling experiments.
pub fn random_delta_arrangement(r: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    loop {
        let n = r.gen_range(1..=4usize);
        let mut positions: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
        positions.sort_by(f64::total_cmp);
        if positions.windows(2).any(|w| w[1] - w[0] < 0.1) {
            continue;
        }
        return positions
            .into_iter()
            .map(|x| (x, r.gen_range(0.3..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 }))
            .collect();
    }
}

pub fn pure_delta_spec(arrangement: &[(f64, f64)]) -> PotentialSpec {
    let positions: Vec<f64> = arrangement.iter().map(|(x, _)| *x).collect();
    let heights = vec![0.0; arrangement.len() + 1];
    let points: Vec<(f64, f64)> = arrangement.iter().map(|(_, s)| (*s, 0.0)).collect();
    PotentialSpec::from_boundaries(PhysicalConstants::default(), &positions, &heights, &points)
        .expect("valid tiling")
}
