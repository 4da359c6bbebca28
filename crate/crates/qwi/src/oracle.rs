//! Independent cross-check built on textbook transfer matrices.
//!
//! Everything here works with the (psi, psi') state vector and 2x2 transfer
//! matrices, sharing no numerics with the impedance recursion: agreement
//! between the two is evidence either implementation is right. The matrix
//! route amplifies rounding through opaque barriers (entries grow like
//! exp(kappa * width) and the scattering formulas subtract them), so
//! comparisons should stick to moderate total opacity; the impedance
//! recursion has no such restriction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{PhysicalConstants, PointInteraction, PotentialSpec};
use crate::scattering::{IncidentSide, ScatteringResult};
use crate::spectrum::BoundState;

/// 2x2 matrix carrying (psi, psi') across a slice of the axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { m11: one, m12: zero, m21: zero, m22: one }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Apply this matrix after `first` (matrix product self * first).
    pub fn after(&self, first: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * first.m11 + self.m12 * first.m21,
            m12: self.m11 * first.m12 + self.m12 * first.m22,
            m21: self.m21 * first.m11 + self.m22 * first.m21,
            m22: self.m21 * first.m12 + self.m22 * first.m22,
        }
    }

    pub fn apply(&self, psi: Complex64, dpsi: Complex64) -> (Complex64, Complex64) {
        (self.m11 * psi + self.m12 * dpsi, self.m21 * psi + self.m22 * dpsi)
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Transfer matrix of a uniform stretch of width `dx` at the given height,
/// on the real trigonometric/hyperbolic branch.
pub fn region_matrix(
    energy: f64,
    height: f64,
    dx: f64,
    constants: &PhysicalConstants,
) -> TransferMatrix {
    let c = constants;
    let two_m = 2.0 * c.mass / (c.hbar * c.hbar);
    let diff = energy - height;
    if diff > 0.0 {
        let k = (two_m * diff).sqrt();
        let (s, co) = (k * dx).sin_cos();
        TransferMatrix {
            m11: real(co),
            m12: real(s / k),
            m21: real(-k * s),
            m22: real(co),
        }
    } else if diff < 0.0 {
        let kappa = (-two_m * diff).sqrt();
        let arg = kappa * dx;
        let (sh, ch) = (arg.sinh(), arg.cosh());
        TransferMatrix {
            m11: real(ch),
            m12: real(sh / kappa),
            m21: real(kappa * sh),
            m22: real(ch),
        }
    } else {
        TransferMatrix {
            m11: real(1.0),
            m12: real(dx),
            m21: real(0.0),
            m22: real(1.0),
        }
    }
}

/// Transfer matrix of one point interaction: psi is scaled by
/// (1 + bt)/(1 - bt) and psi' picks up 2 m s/(hbar^2 (1 - bt^2)) psi,
/// with bt the reduced delta-prime strength m b / hbar^2.
pub fn point_matrix(
    point: &PointInteraction,
    constants: &PhysicalConstants,
) -> Result<TransferMatrix> {
    let bt = point.beta_tilde(constants);
    if (1.0 - bt).abs() < 1e-12 || (1.0 + bt).abs() < 1e-12 {
        return Err(Error::ResonantDeltaPrime { beta_tilde: bt });
    }
    let mu = (1.0 + bt) / (1.0 - bt);
    let c = constants;
    let g = 2.0 * c.mass * point.delta_strength / (c.hbar * c.hbar * (1.0 - bt * bt));
    Ok(TransferMatrix {
        m11: real(mu),
        m12: real(0.0),
        m21: real(g),
        m22: real(1.0 / mu),
    })
}

/// Full transfer matrix from x_0 - 0 to x_N + 0.
pub fn total_matrix(spec: &PotentialSpec, energy: f64) -> Result<TransferMatrix> {
    let c = spec.constants();
    let b = spec.boundary_count();
    let mut total = TransferMatrix::identity();
    for j in 0..b {
        total = point_matrix(&spec.points()[j], c)?.after(&total);
        if j + 1 < b {
            let dx = spec.boundary_position(j + 1) - spec.boundary_position(j);
            let height = spec.regions()[j + 1].height;
            total = region_matrix(energy, height, dx, c).after(&total);
        }
    }
    Ok(total)
}

fn wavenumber(energy: f64, height: f64, constants: &PhysicalConstants) -> f64 {
    (2.0 * constants.mass * (energy - height)).sqrt() / constants.hbar
}

/// Scattering amplitudes by direct matching of plane-wave coefficients
/// through the total transfer matrix.
pub fn oracle_scatter(
    spec: &PotentialSpec,
    energy: f64,
    side: IncidentSide,
) -> Result<ScatteringResult> {
    let (u_in, u_out) = match side {
        IncidentSide::Left => (spec.left_asymptote(), spec.right_asymptote()),
        IncidentSide::Right => (spec.right_asymptote(), spec.left_asymptote()),
    };
    if energy <= u_in {
        return Err(Error::NoPropagatingChannel { energy, asymptote: u_in });
    }
    if spec.boundary_count() == 0 {
        return Ok(ScatteringResult {
            r: Complex64::new(0.0, 0.0),
            t: Complex64::new(1.0, 0.0),
            reflection: 0.0,
            transmission: 1.0,
            unitarity_defect: 0.0,
            incident_side: side,
        });
    }

    let c = spec.constants();
    let m = total_matrix(spec, energy)?;
    let k_in = wavenumber(energy, u_in, c);
    let open = energy > u_out;
    // psi'/psi of the transmitted branch on the far side: outgoing plane wave
    // when the channel is open, decaying exponential when closed, flat at the
    // degenerate threshold.
    let q_sign = match side {
        IncidentSide::Left => 1.0,
        IncidentSide::Right => -1.0,
    };
    let q = if open {
        Complex64::new(0.0, q_sign * wavenumber(energy, u_out, c))
    } else if energy < u_out {
        real(-q_sign * (2.0 * c.mass * (u_out - energy)).sqrt() / c.hbar)
    } else {
        real(0.0)
    };

    let (r, t) = match side {
        IncidentSide::Left => {
            let ik = Complex64::new(0.0, k_in);
            let w = (q * m.m11 - m.m21) / (ik * (m.m22 - q * m.m12));
            let r = (real(1.0) - w) / (real(1.0) + w);
            let t = m.m11 * (real(1.0) + r) + m.m12 * ik * (real(1.0) - r);
            (r, t)
        }
        IncidentSide::Right => {
            let ik = Complex64::new(0.0, k_in);
            let a = m.m11 + q * m.m12;
            let cc = m.m21 + q * m.m22;
            let w = cc / (a * -ik);
            let r = (real(1.0) - w) / (real(1.0) + w);
            let t = (real(1.0) + r) / a;
            (r, t)
        }
    };

    let reflection = r.norm_sqr();
    let transmission =
        if open { wavenumber(energy, u_out, c) / k_in * t.norm_sqr() } else { 0.0 };
    Ok(ScatteringResult {
        r,
        t,
        reflection,
        transmission,
        unitarity_defect: (reflection + transmission - 1.0).abs(),
        incident_side: side,
    })
}

/// Shooting mismatch: march (psi, psi') from the left decaying tail and
/// report how far the arrival is from the right decaying tail. Zero exactly
/// at bound energies; continuous in E, so a sign scan brackets every simple
/// root.
fn tail_mismatch(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    let c = spec.constants();
    let b = spec.boundary_count();
    let kappa_l = (2.0 * c.mass * (spec.left_asymptote() - energy)).sqrt() / c.hbar;
    let kappa_r = (2.0 * c.mass * (spec.right_asymptote() - energy)).sqrt() / c.hbar;
    let mut psi = real(1.0);
    let mut dpsi = real(kappa_l);
    for j in 0..b {
        let (p, d) = point_matrix(&spec.points()[j], c)?.apply(psi, dpsi);
        psi = p;
        dpsi = d;
        if j + 1 < b {
            let dx = spec.boundary_position(j + 1) - spec.boundary_position(j);
            let height = spec.regions()[j + 1].height;
            let (p2, d2) = region_matrix(energy, height, dx, c).apply(psi, dpsi);
            psi = p2;
            dpsi = d2;
        }
        let mag = psi.norm().max(dpsi.norm());
        if mag > 1e100 {
            psi /= mag;
            dpsi /= mag;
        }
    }
    Ok((dpsi + real(kappa_r) * psi).re)
}

/// Bound energies by sign scan plus bisection of the shooting mismatch.
/// Slower and less robust than the staircase search (closely spaced doublets
/// inside one scan cell are invisible to a sign scan), but entirely
/// independent of it.
pub fn oracle_bound_states(
    spec: &PotentialSpec,
    energy_floor: Option<f64>,
    tolerance: Option<f64>,
) -> Result<Vec<BoundState>> {
    let c = spec.constants();
    let edge = spec.left_asymptote().min(spec.right_asymptote());
    let e_hi = edge - 1e-14 * edge.abs().max(1.0);
    let floor = energy_floor.unwrap_or_else(|| {
        let depth = (edge - spec.min_region_height()).max(0.0);
        let ksum = spec.total_abs_delta_strength() * c.mass / (c.hbar * c.hbar);
        edge - depth - 4.0 * c.hbar * c.hbar * ksum * ksum / (2.0 * c.mass)
    });
    if !floor.is_finite() {
        return Err(Error::InvalidArgument(format!("energy floor must be finite, got {floor}")));
    }
    if let Some(tol) = tolerance {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
    }
    if floor >= e_hi {
        return Ok(Vec::new());
    }
    let tol = tolerance.unwrap_or_else(|| 1e-12 * floor.abs().max(1.0));

    let n = 4000usize;
    let energies: Vec<f64> =
        (0..=n).map(|i| floor + (e_hi - floor) * i as f64 / n as f64).collect();
    let mut ws = Vec::with_capacity(n + 1);
    for &e in &energies {
        ws.push(tail_mismatch(spec, e)?);
    }

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..=n {
        if ws[i] == 0.0 {
            roots.push(energies[i]);
        }
    }
    for i in 0..n {
        if ws[i] * ws[i + 1] < 0.0 {
            let (mut lo, mut hi) = (energies[i], energies[i + 1]);
            let mut w_lo = ws[i];
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let wm = tail_mismatch(spec, mid)?;
                if wm == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if (w_lo < 0.0) == (wm < 0.0) {
                    lo = mid;
                    w_lo = wm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    roots.sort_by(f64::total_cmp);

    let u_l = spec.left_asymptote();
    let u_r = spec.right_asymptote();
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(label, energy)| BoundState {
            energy,
            kappa_left: (2.0 * c.mass * (u_l - energy)).sqrt() / c.hbar,
            kappa_right: (2.0 * c.mass * (u_r - energy)).sqrt() / c.hbar,
            label,
        })
        .collect())
}
