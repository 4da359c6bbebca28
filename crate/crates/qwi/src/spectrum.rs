//! Bound-state search through the impedance-mismatch dispersion function.
//!
//! D(E) = Z(x_0 - 0) + z_left vanishes exactly at bound energies, where the
//! rightward-decaying solution folded to the left boundary matches the
//! leftward-decaying branch -z_left. Roots are located through a staircase
//! count (interior nodes of the right-decaying solution plus the sign of
//! Im D), which is monotone in energy, jumps by one at each eigenvalue, and is
//! immune to the poles D(E) passes through between eigenvalues. Bisecting each
//! unit jump therefore finds every state, including near-degenerate doublets
//! that a plain sign-change scan on Im D can miss.

use crate::error::{Error, Result};
use crate::impedance::{Impedance, ImpedanceProfile, RegionKind};
use crate::par;
use crate::potential::{PhysicalConstants, PotentialSpec};

/// One evaluation of the dispersion function.
#[derive(Clone, Copy, Debug)]
pub struct DispersionSample {
    pub energy: f64,
    /// D(E) = Z(x_0 - 0) + z_left; purely imaginary for real potentials below
    /// both asymptotes. A node plane sitting exactly on the left boundary is
    /// reported as [`Impedance::Node`] instead of an overflowed number.
    pub mismatch: Impedance,
    /// Nodes of the right-decaying solution at the boundaries and in region
    /// interiors, left boundary included.
    pub node_count: usize,
}

/// One bound level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    /// Decay rate of the left tail, sqrt(2m(U_left - E))/hbar.
    pub kappa_left: f64,
    /// Decay rate of the right tail.
    pub kappa_right: f64,
    /// Index by ascending energy, ground state first.
    pub label: usize,
}

fn continuum_edge(spec: &PotentialSpec) -> f64 {
    spec.left_asymptote().min(spec.right_asymptote())
}

fn require_below_edge(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    let edge = continuum_edge(spec);
    if energy >= edge {
        return Err(Error::InvalidArgument(format!(
            "bound-state search requires E below both asymptotic heights; E = {energy}, edge = {edge}"
        )));
    }
    Ok(edge)
}

/// Count the poles of Z (nodes of psi) strictly inside one region, given the
/// impedance at the region's right edge. Valid for the purely imaginary
/// impedances of a bound-side fold.
fn interior_nodes(
    edge_value: Impedance,
    region: &RegionKindData,
    dx: f64,
) -> usize {
    let y = match edge_value {
        Impedance::Node => return 0, // the edge pole itself is counted at the boundary
        Impedance::Finite(z) => z.im,
    };
    match *region {
        RegionKindData::Degenerate { m_over_hbar } => {
            // 1/Z flows linearly; a pole crosses if Z starts negative
            // imaginary and |Z| reaches infinity within the region.
            if y < 0.0 && 1.0 / (m_over_hbar * (-y)) < dx {
                1
            } else {
                0
            }
        }
        RegionKindData::Propagating { k, z } => {
            // Z = z*tan-like flow; phase angle v = atan(y/z) retreats by k*dx
            // and crosses a pole at each odd multiple of pi/2.
            let vr = (y / z).atan();
            let vl = vr - k * dx;
            let crossings = -(((vl - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).floor()
                + 1.0);
            crossings.max(0.0) as usize
        }
        RegionKindData::Evanescent { kappa, abs_z } => {
            // Z = i|z|*coth branch has a single pole, reached only from
            // |y| > |z| with the right sign.
            let w = y / abs_z;
            if w.abs() > 1.0 {
                let ur = (1.0 / w).atanh();
                if ur < 0.0 && ur + kappa * dx > 0.0 {
                    1
                } else {
                    0
                }
            } else {
                0
            }
        }
    }
}

enum RegionKindData {
    Propagating { k: f64, z: f64 },
    Evanescent { kappa: f64, abs_z: f64 },
    Degenerate { m_over_hbar: f64 },
}

fn region_kind_data(
    region: &crate::impedance::RegionWave,
    constants: &PhysicalConstants,
) -> RegionKindData {
    match region.kind {
        RegionKind::Propagating { k } => RegionKindData::Propagating { k, z: region.z.re },
        RegionKind::Evanescent { kappa } => RegionKindData::Evanescent { kappa, abs_z: region.z.im },
        RegionKind::Degenerate => {
            RegionKindData::Degenerate { m_over_hbar: constants.mass / constants.hbar }
        }
    }
}

/// Evaluate the dispersion function at one energy below both asymptotes.
pub fn dispersion(spec: &PotentialSpec, energy: f64) -> Result<DispersionSample> {
    require_below_edge(spec, energy)?;
    let profile = ImpedanceProfile::leftward(spec, energy)?;
    let b = spec.boundary_count();
    let c = spec.constants();

    let mut node_count = 0usize;
    for i in (0..b).rev() {
        if profile.left_limits[i].is_node() {
            node_count += 1;
        }
        if i > 0 {
            let dx = profile.boundaries[i] - profile.boundaries[i - 1];
            let data = region_kind_data(&profile.regions[i], c);
            node_count += interior_nodes(profile.left_limits[i], &data, dx);
        }
    }

    let z_left = profile.regions[0].z;
    let mismatch = match if b == 0 { Impedance::Finite(z_left) } else { profile.left_limits[0] } {
        Impedance::Node => Impedance::Node,
        Impedance::Finite(z) => Impedance::Finite(z + z_left),
    };
    Ok(DispersionSample { energy, mismatch, node_count })
}

/// Number of bound states strictly below `energy` (Sturm oscillation count).
pub(crate) fn state_count(spec: &PotentialSpec, energy: f64) -> Result<usize> {
    let sample = dispersion(spec, energy)?;
    let extra = match sample.mismatch {
        Impedance::Finite(d) if d.im < 0.0 => 1,
        _ => 0,
    };
    Ok(sample.node_count + extra)
}

/// Search controls for [`find_bound_states_with`]. `None` fields fall back to
/// the documented defaults.
#[derive(Clone, Copy, Debug)]
pub struct SearchParams {
    /// Lower end of the energy scan; default from [`default_energy_floor`].
    pub energy_floor: Option<f64>,
    /// Coarse scan resolution; at least 16.
    pub grid_points: usize,
    /// Bisection width target; default 1e-12 * max(1, |floor|).
    pub tolerance: Option<f64>,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { energy_floor: None, grid_points: 512, tolerance: None }
    }
}

/// Safe lower bound for the spectrum: the continuum edge minus the deepest
/// well depth minus four times the binding energy a single delta holding all
/// the summed |delta_strength| could produce.
pub fn default_energy_floor(spec: &PotentialSpec) -> f64 {
    let c = spec.constants();
    let edge = continuum_edge(spec);
    let depth = (edge - spec.min_region_height()).max(0.0);
    let kappa_sum = spec.total_abs_delta_strength() * c.mass / (c.hbar * c.hbar);
    let delta_binding = c.hbar * c.hbar * kappa_sum * kappa_sum / (2.0 * c.mass);
    edge - depth - 4.0 * delta_binding
}

/// Find all bound states with default search controls.
pub fn find_bound_states(spec: &PotentialSpec) -> Result<Vec<BoundState>> {
    find_bound_states_with(spec, &SearchParams::default())
}

/// Find all bound states: scan the staircase count over a coarse grid, then
/// bisect every unit jump. Energies come out ascending; an empty list is a
/// valid result. Near-threshold roots within 1e-14 (scaled) of the continuum
/// edge are discarded.
pub fn find_bound_states_with(
    spec: &PotentialSpec,
    params: &SearchParams,
) -> Result<Vec<BoundState>> {
    if params.grid_points < 16 {
        return Err(Error::InvalidArgument(format!(
            "grid_points must be at least 16, got {}",
            params.grid_points
        )));
    }
    if let Some(tol) = params.tolerance {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
    }
    let edge = continuum_edge(spec);
    let edge_margin = 1e-14 * edge.abs().max(1.0);
    let e_hi = edge - edge_margin;
    let floor = params.energy_floor.unwrap_or_else(|| default_energy_floor(spec));
    if !floor.is_finite() {
        return Err(Error::InvalidArgument(format!("energy floor must be finite, got {floor}")));
    }
    if floor >= e_hi {
        return Ok(Vec::new());
    }
    let tol = params.tolerance.unwrap_or_else(|| 1e-12 * floor.abs().max(1.0));

    let grid = params.grid_points;
    let energies: Vec<f64> =
        (0..=grid).map(|i| floor + (e_hi - floor) * i as f64 / grid as f64).collect();
    let counts: Vec<Result<usize>> = par::map(&energies, |&e| state_count(spec, e));
    let counts: Vec<usize> = counts.into_iter().collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for i in 0..grid {
        let (c_lo, c_hi) = (counts[i], counts[i + 1]);
        for k in c_lo..c_hi {
            let mut lo = energies[i];
            let mut hi = energies[i + 1];
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if state_count(spec, mid)? <= k {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }

    let c = spec.constants();
    let u_l = spec.left_asymptote();
    let u_r = spec.right_asymptote();
    let states = roots
        .into_iter()
        .filter(|&e| edge - e > edge_margin * 0.5)
        .enumerate()
        .map(|(label, energy)| BoundState {
            energy,
            kappa_left: (2.0 * c.mass * (u_l - energy)).sqrt() / c.hbar,
            kappa_right: (2.0 * c.mass * (u_r - energy)).sqrt() / c.hbar,
            label,
        })
        .collect();
    Ok(states)
}

/// Bound levels of the symmetric double delta well: wells of strength
/// -alpha at x = -a and x = +a.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleWellLevels {
    pub symmetric: f64,
    /// Absent when 2*a*m*alpha/hbar^2 <= 1, where the odd level is pushed
    /// into the continuum.
    pub antisymmetric: Option<f64>,
}

/// Textbook transcendental relations for the double delta well, solved by
/// bisection: hbar^2 kappa/(m alpha) = 1 + exp(-2 kappa a) for the even level
/// and = 1 - exp(-2 kappa a) for the odd one.
pub fn closed_form_double_well(
    alpha: f64,
    half_separation: f64,
    constants: &PhysicalConstants,
    tol: f64,
) -> Result<DoubleWellLevels> {
    if !(alpha > 0.0) || !(half_separation > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "closed_form_double_well needs alpha > 0, a > 0, tol > 0".into(),
        ));
    }
    let c = constants;
    let kappa_scale = c.mass * alpha / (c.hbar * c.hbar);
    let a = half_separation;
    let energy_of = |kappa: f64| -c.hbar * c.hbar * kappa * kappa / (2.0 * c.mass);
    // |dE/dkappa| <= hbar^2 * (2 kappa_scale)/m over both brackets.
    let kappa_tol =
        (tol * c.mass / (c.hbar * c.hbar * 2.0 * kappa_scale)).max(1e-17 * kappa_scale);

    let bisect = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| -> f64 {
        let mut flo = f(lo);
        for _ in 0..200 {
            if hi - lo <= kappa_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if (flo <= 0.0) == (fm <= 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let even = |k: f64| c.hbar * c.hbar * k / (c.mass * alpha) - 1.0 - (-2.0 * k * a).exp();
    let k_even = bisect(&even, kappa_scale, 2.0 * kappa_scale);

    let exists_odd = 2.0 * a * c.mass * alpha / (c.hbar * c.hbar) > 1.0;
    let antisymmetric = if exists_odd {
        let odd = |k: f64| c.hbar * c.hbar * k / (c.mass * alpha) - 1.0 + (-2.0 * k * a).exp();
        let k_odd = bisect(&odd, kappa_scale * 1e-18, kappa_scale);
        Some(energy_of(k_odd))
    } else {
        None
    };

    Ok(DoubleWellLevels { symmetric: energy_of(k_even), antisymmetric })
}
