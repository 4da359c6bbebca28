//! Wave-impedance algebra: the Riccati variable Z(x) = (hbar/(i*m)) psi'/psi,
//! its characteristic value per region, propagation across constant regions,
//! and jump rules at delta and delta-prime points.
//!
//! Branch conventions: for E > U the characteristic impedance z is real
//! positive and the propagation constant gamma = i*k is purely imaginary; for
//! E < U, z = i*sqrt(2(U-E)/m) has positive imaginary part and gamma = -kappa
//! is real negative. E = U is tracked as a degenerate region where the flow
//! becomes linear in 1/Z.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{PhysicalConstants, PointInteraction, PotentialSpec};

/// Branch of a region's wave solutions at a given energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionKind {
    /// E > U: oscillatory solutions with wavenumber k = sqrt(2m(E-U))/hbar.
    Propagating { k: f64 },
    /// E < U: exponential solutions with decay rate kappa = sqrt(2m(U-E))/hbar.
    Evanescent { kappa: f64 },
    /// E = U: linear solutions, z = 0.
    Degenerate,
}

/// Characteristic impedance and propagation constant of one region at one
/// energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionWave {
    /// z = sqrt(2(E-U)/m); real positive, positive imaginary, or zero.
    pub z: Complex64,
    /// gamma = i*m*z/hbar; i*k for propagating, -kappa for evanescent.
    pub gamma: Complex64,
    pub kind: RegionKind,
}

/// Total function: branch-correct characteristic data for any (E, U).
pub fn characteristic(energy: f64, height: f64, constants: &PhysicalConstants) -> RegionWave {
    let m = constants.mass;
    let hbar = constants.hbar;
    let d = 2.0 * (energy - height) / m;
    if d > 0.0 {
        let zr = d.sqrt();
        let k = m * zr / hbar;
        RegionWave {
            z: Complex64::new(zr, 0.0),
            gamma: Complex64::new(0.0, k),
            kind: RegionKind::Propagating { k },
        }
    } else if d < 0.0 {
        let zi = (-d).sqrt();
        let kappa = m * zi / hbar;
        RegionWave {
            z: Complex64::new(0.0, zi),
            gamma: Complex64::new(-kappa, 0.0),
            kind: RegionKind::Evanescent { kappa },
        }
    } else {
        RegionWave { z: Complex64::new(0.0, 0.0), gamma: Complex64::new(0.0, 0.0), kind: RegionKind::Degenerate }
    }
}

/// Impedance value at a point. Poles of Z (nodes of psi) get a dedicated
/// variant instead of overflowing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Impedance {
    Finite(Complex64),
    /// psi = 0 plane: Z passes through infinity here.
    Node,
}

impl Impedance {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Impedance::Finite(z) => Some(z),
            Impedance::Node => None,
        }
    }

    pub fn is_node(self) -> bool {
        matches!(self, Impedance::Node)
    }
}

/// Which one-sided limit of Z a state refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    LeftLimit,
    RightLimit,
}

/// Impedance at a position, tagged with the side the limit was taken from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpedanceState {
    pub value: Impedance,
    pub position: f64,
    pub side: Side,
}

const DENOMINATOR_FLOOR: f64 = 1e-300;
const TANH_TAYLOR_THRESHOLD: f64 = 1e-6;
const RESONANT_MARGIN: f64 = 1e-12;

/// tanh with a series fallback so that gamma*dx -> 0 stays exact: for small u,
/// tanh(u) = u*(1 - u^2/3) + O(u^5).
fn th(u: Complex64) -> Complex64 {
    if u.norm() < TANH_TAYLOR_THRESHOLD {
        u * (1.0 - u * u / 3.0)
    } else {
        u.tanh()
    }
}

fn propagate_core_left(
    value: Impedance,
    region: &RegionWave,
    dx: f64,
    constants: &PhysicalConstants,
) -> Impedance {
    let m = constants.mass;
    let hbar = constants.hbar;
    if region.kind == RegionKind::Degenerate {
        // Linear flow of the reciprocal: 1/Z_left = 1/Z_right - (i*m/hbar)*dx.
        return match value {
            Impedance::Node => {
                if dx == 0.0 {
                    Impedance::Node
                } else {
                    Impedance::Finite(Complex64::new(0.0, hbar / (m * dx)))
                }
            }
            Impedance::Finite(zr) => {
                let den = 1.0 - Complex64::i() * (m / hbar) * zr * dx;
                if den.norm() < DENOMINATOR_FLOOR {
                    Impedance::Node
                } else {
                    Impedance::Finite(zr / den)
                }
            }
        };
    }
    let t = th(region.gamma * dx);
    match value {
        Impedance::Node => {
            if t.norm() == 0.0 {
                Impedance::Node
            } else {
                Impedance::Finite(-region.z / t)
            }
        }
        Impedance::Finite(zr) => {
            let den = region.z - zr * t;
            if den.norm() < DENOMINATOR_FLOOR {
                Impedance::Node
            } else {
                Impedance::Finite(region.z * (zr - region.z * t) / den)
            }
        }
    }
}

fn propagate_core_right(
    value: Impedance,
    region: &RegionWave,
    dx: f64,
    constants: &PhysicalConstants,
) -> Impedance {
    let m = constants.mass;
    let hbar = constants.hbar;
    if region.kind == RegionKind::Degenerate {
        return match value {
            Impedance::Node => {
                if dx == 0.0 {
                    Impedance::Node
                } else {
                    Impedance::Finite(Complex64::new(0.0, -hbar / (m * dx)))
                }
            }
            Impedance::Finite(zl) => {
                let den = 1.0 + Complex64::i() * (m / hbar) * zl * dx;
                if den.norm() < DENOMINATOR_FLOOR {
                    Impedance::Node
                } else {
                    Impedance::Finite(zl / den)
                }
            }
        };
    }
    let t = th(region.gamma * dx);
    match value {
        Impedance::Node => {
            if t.norm() == 0.0 {
                Impedance::Node
            } else {
                Impedance::Finite(region.z / t)
            }
        }
        Impedance::Finite(zl) => {
            let den = region.z + zl * t;
            if den.norm() < DENOMINATOR_FLOOR {
                Impedance::Node
            } else {
                Impedance::Finite(region.z * (zl + region.z * t) / den)
            }
        }
    }
}

/// Carry an impedance from a region's right edge to its left edge, a distance
/// `dx` against the x axis. The matched load Z = z is an exact fixed point.
pub fn propagate_left(
    z_at_right: &ImpedanceState,
    region: &RegionWave,
    dx: f64,
    constants: &PhysicalConstants,
) -> ImpedanceState {
    assert!(dx >= 0.0, "propagation distance must be non-negative");
    ImpedanceState {
        value: propagate_core_left(z_at_right.value, region, dx, constants),
        position: z_at_right.position - dx,
        side: Side::RightLimit,
    }
}

/// Carry an impedance from a region's left edge to its right edge; the exact
/// algebraic inverse of [`propagate_left`].
pub fn propagate_right(
    z_at_left: &ImpedanceState,
    region: &RegionWave,
    dx: f64,
    constants: &PhysicalConstants,
) -> ImpedanceState {
    assert!(dx >= 0.0, "propagation distance must be non-negative");
    ImpedanceState {
        value: propagate_core_right(z_at_left.value, region, dx, constants),
        position: z_at_left.position + dx,
        side: Side::LeftLimit,
    }
}

/// Impedance jump across a pure delta of strength `alpha`:
/// Z(a+0) = Z(a-0) - 2i*alpha/hbar.
pub fn jump_delta(z_left_limit: Complex64, alpha: f64, constants: &PhysicalConstants) -> Complex64 {
    z_left_limit + Complex64::new(0.0, -2.0 * alpha / constants.hbar)
}

/// Forward-jump coefficients for a combined delta / delta-prime point:
/// Z(a+0) = additive + factor * Z(a-0). The backward direction is recovered by
/// inverting this affine map, so both directions share one formula.
fn point_jump_coefficients(
    delta_strength: f64,
    delta_prime_strength: f64,
    constants: &PhysicalConstants,
) -> Result<(Complex64, f64)> {
    let hbar = constants.hbar;
    let bt = constants.mass * delta_prime_strength / (hbar * hbar);
    if (bt - 1.0).abs() < RESONANT_MARGIN || (bt + 1.0).abs() < RESONANT_MARGIN {
        return Err(Error::ResonantDeltaPrime { beta_tilde: bt });
    }
    let onep = 1.0 + bt;
    let onem = 1.0 - bt;
    let additive = Complex64::new(0.0, -2.0 * delta_strength / (hbar * onep * onep));
    let factor = (onem / onep) * (onem / onep);
    Ok((additive, factor))
}

/// Impedance jump across a combined delta / delta-prime point, left limit to
/// right limit. Collapses bitwise to [`jump_delta`] when the delta-prime
/// strength is zero.
pub fn jump_delta_prime(
    z_left_limit: Complex64,
    delta_strength: f64,
    delta_prime_strength: f64,
    constants: &PhysicalConstants,
) -> Result<Complex64> {
    let (additive, factor) = point_jump_coefficients(delta_strength, delta_prime_strength, constants)?;
    Ok(additive + factor * z_left_limit)
}

/// Node-aware forward jump (left limit -> right limit) at a point interaction.
pub(crate) fn jump_forward(
    value: Impedance,
    point: &PointInteraction,
    constants: &PhysicalConstants,
) -> Result<Impedance> {
    let (additive, factor) =
        point_jump_coefficients(point.delta_strength, point.delta_prime_strength, constants)?;
    Ok(match value {
        Impedance::Node => Impedance::Node,
        Impedance::Finite(z) => Impedance::Finite(additive + factor * z),
    })
}

/// Node-aware backward jump (right limit -> left limit); the inverse of the
/// forward affine map.
pub(crate) fn jump_backward(
    value: Impedance,
    point: &PointInteraction,
    constants: &PhysicalConstants,
) -> Result<Impedance> {
    let (additive, factor) =
        point_jump_coefficients(point.delta_strength, point.delta_prime_strength, constants)?;
    Ok(match value {
        Impedance::Node => Impedance::Node,
        Impedance::Finite(z) => Impedance::Finite((z - additive) / factor),
    })
}

/// psi ratio across a point: psi(a+0) = mu * psi(a-0).
pub(crate) fn psi_ratio(point: &PointInteraction, constants: &PhysicalConstants) -> Result<f64> {
    let bt = point.beta_tilde(constants);
    if (bt - 1.0).abs() < RESONANT_MARGIN || (bt + 1.0).abs() < RESONANT_MARGIN {
        return Err(Error::ResonantDeltaPrime { beta_tilde: bt });
    }
    Ok((1.0 + bt) / (1.0 - bt))
}

/// psi' matching coefficient: psi'(a+0) = g * psi(a-0) + psi'(a-0)/mu.
pub(crate) fn derivative_coupling(
    point: &PointInteraction,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let bt = point.beta_tilde(constants);
    if (bt - 1.0).abs() < RESONANT_MARGIN || (bt + 1.0).abs() < RESONANT_MARGIN {
        return Err(Error::ResonantDeltaPrime { beta_tilde: bt });
    }
    let hbar = constants.hbar;
    Ok(2.0 * constants.mass * point.delta_strength / (hbar * hbar * (1.0 - bt * bt)))
}

/// One-sided impedance limits at every boundary of a potential, produced by a
/// single directional fold, plus the per-region wave data used on the way.
#[derive(Clone, Debug)]
pub struct ImpedanceProfile {
    pub energy: f64,
    /// Boundary coordinates, ascending; empty for the free line.
    pub boundaries: Vec<f64>,
    /// Z(x_i - 0) for each boundary.
    pub left_limits: Vec<Impedance>,
    /// Z(x_i + 0) for each boundary.
    pub right_limits: Vec<Impedance>,
    /// Wave data per region, index aligned with `PotentialSpec::regions`.
    pub regions: Vec<RegionWave>,
}

impl ImpedanceProfile {
    /// Fold from the right: seed the outgoing/decaying branch Z = +z in the
    /// rightmost region and sweep to the leftmost boundary.
    pub fn leftward(spec: &PotentialSpec, energy: f64) -> Result<Self> {
        let c = spec.constants();
        let b = spec.boundary_count();
        let regions: Vec<RegionWave> =
            spec.regions().iter().map(|r| characteristic(energy, r.height, c)).collect();
        let boundaries = spec.boundary_positions();
        let mut left_limits = vec![Impedance::Node; b];
        let mut right_limits = vec![Impedance::Node; b];
        if b > 0 {
            let mut current = Impedance::Finite(regions[b].z);
            for i in (0..b).rev() {
                right_limits[i] = current;
                let left = jump_backward(current, &spec.points()[i], c)?;
                left_limits[i] = left;
                if i > 0 {
                    let dx = boundaries[i] - boundaries[i - 1];
                    current = propagate_core_left(left, &regions[i], dx, c);
                }
            }
        }
        Ok(Self { energy, boundaries, left_limits, right_limits, regions })
    }

    /// Fold from the left: seed the leftward-outgoing/decaying branch Z = -z
    /// in the leftmost region and sweep to the rightmost boundary.
    pub fn rightward(spec: &PotentialSpec, energy: f64) -> Result<Self> {
        let c = spec.constants();
        let b = spec.boundary_count();
        let regions: Vec<RegionWave> =
            spec.regions().iter().map(|r| characteristic(energy, r.height, c)).collect();
        let boundaries = spec.boundary_positions();
        let mut left_limits = vec![Impedance::Node; b];
        let mut right_limits = vec![Impedance::Node; b];
        if b > 0 {
            let mut current = Impedance::Finite(-regions[0].z);
            for i in 0..b {
                left_limits[i] = current;
                let right = jump_forward(current, &spec.points()[i], c)?;
                right_limits[i] = right;
                if i + 1 < b {
                    let dx = boundaries[i + 1] - boundaries[i];
                    current = propagate_core_right(right, &regions[i + 1], dx, c);
                }
            }
        }
        Ok(Self { energy, boundaries, left_limits, right_limits, regions })
    }

    pub fn state_at(&self, boundary: usize, side: Side) -> ImpedanceState {
        let value = match side {
            Side::LeftLimit => self.left_limits[boundary],
            Side::RightLimit => self.right_limits[boundary],
        };
        ImpedanceState { value, position: self.boundaries[boundary], side }
    }
}
