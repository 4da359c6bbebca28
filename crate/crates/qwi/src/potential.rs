//! Potential landscape model: piecewise-constant regions over the whole real
//! line plus zero-range point interactions (delta and delta-prime terms) at
//! region boundaries.
//!
//! Sign convention: a point interaction with `delta_strength` s and
//! `delta_prime_strength` b contributes `+s*delta(x-a) + b*delta'(x-a)` to the
//! potential. Attractive wells therefore have negative `delta_strength`.

use crate::error::{Error, Result};

/// Units of the problem. Everything downstream is expressed through these two
/// constants, so desk-scale atomic units (both equal to 1) are the default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

impl PhysicalConstants {
    fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "hbar must be finite and positive, got {}",
                self.hbar
            )));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "mass must be finite and positive, got {}",
                self.mass
            )));
        }
        Ok(())
    }
}

/// Zero-range interaction sitting at a single coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointInteraction {
    pub position: f64,
    /// Coefficient of delta(x - position), units energy * length.
    pub delta_strength: f64,
    /// Coefficient of delta'(x - position), units energy * length^2.
    pub delta_prime_strength: f64,
}

impl PointInteraction {
    pub fn new(position: f64, delta_strength: f64, delta_prime_strength: f64) -> Self {
        Self { position, delta_strength, delta_prime_strength }
    }

    /// True when both strengths vanish, i.e. the point acts as no interaction.
    pub fn is_trivial(&self) -> bool {
        self.delta_strength == 0.0 && self.delta_prime_strength == 0.0
    }

    /// Dimensionless delta-prime strength `m*b/hbar^2`.
    pub fn beta_tilde(&self, constants: &PhysicalConstants) -> f64 {
        constants.mass * self.delta_prime_strength / (constants.hbar * constants.hbar)
    }
}

/// One constant-height slab of the background potential. The outermost two
/// regions extend to -inf and +inf respectively.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub left: f64,
    pub right: f64,
    pub height: f64,
}

impl Region {
    pub fn new(left: f64, right: f64, height: f64) -> Self {
        Self { left, right, height }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// Canonicalized potential: regions tile the real line, every point
/// interaction sits exactly on a region boundary, and boundaries are strictly
/// increasing. Immutable once built; safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    constants: PhysicalConstants,
    regions: Vec<Region>,
    /// One entry per interior boundary, aligned with `regions`: `points[i]`
    /// sits at `regions[i].right`. Trivial entries mark plain height steps.
    points: Vec<PointInteraction>,
}

impl PotentialSpec {
    /// The free line: one region of height zero, no boundaries.
    pub fn free(constants: PhysicalConstants) -> Self {
        Self {
            constants,
            regions: vec![Region::new(f64::NEG_INFINITY, f64::INFINITY, 0.0)],
            points: Vec::new(),
        }
    }

    /// Convenience constructor from the boundary-centric description used by
    /// most callers: `positions` are the sorted boundary coordinates,
    /// `heights` the region heights left to right (one more than positions),
    /// `strengths[i] = (s, b)` the interaction at `positions[i]`.
    pub fn from_boundaries(
        constants: PhysicalConstants,
        positions: &[f64],
        heights: &[f64],
        strengths: &[(f64, f64)],
    ) -> Result<Self> {
        if heights.len() != positions.len() + 1 {
            return Err(Error::InvalidPotential(format!(
                "need {} heights for {} boundaries, got {}",
                positions.len() + 1,
                positions.len(),
                heights.len()
            )));
        }
        if strengths.len() != positions.len() {
            return Err(Error::InvalidPotential(format!(
                "need {} point entries for {} boundaries, got {}",
                positions.len(),
                positions.len(),
                strengths.len()
            )));
        }
        let mut regions = Vec::with_capacity(heights.len());
        for (i, &h) in heights.iter().enumerate() {
            let left = if i == 0 { f64::NEG_INFINITY } else { positions[i - 1] };
            let right = if i == heights.len() - 1 { f64::INFINITY } else { positions[i] };
            regions.push(Region::new(left, right, h));
        }
        let points: Vec<PointInteraction> = positions
            .iter()
            .zip(strengths)
            .map(|(&x, &(s, b))| PointInteraction::new(x, s, b))
            .collect();
        canonicalize(constants, &regions, &points)
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Aligned point interactions, one per boundary (possibly trivial).
    pub fn points(&self) -> &[PointInteraction] {
        &self.points
    }

    pub fn boundary_count(&self) -> usize {
        self.regions.len() - 1
    }

    pub fn boundary_position(&self, i: usize) -> f64 {
        self.regions[i].right
    }

    pub fn boundary_positions(&self) -> Vec<f64> {
        (0..self.boundary_count()).map(|i| self.boundary_position(i)).collect()
    }

    /// Height of the semi-infinite region on the far left.
    pub fn left_asymptote(&self) -> f64 {
        self.regions[0].height
    }

    /// Height of the semi-infinite region on the far right.
    pub fn right_asymptote(&self) -> f64 {
        self.regions[self.regions.len() - 1].height
    }

    pub fn min_region_height(&self) -> f64 {
        self.regions.iter().map(|r| r.height).fold(f64::INFINITY, f64::min)
    }

    /// Background height at `x`. On a boundary the right-hand region wins.
    pub fn background_at(&self, x: f64) -> f64 {
        let idx = self.regions.partition_point(|r| r.right <= x);
        self.regions[idx.min(self.regions.len() - 1)].height
    }

    /// Sum of |delta_strength| over all points, used for search-floor bounds.
    pub fn total_abs_delta_strength(&self) -> f64 {
        self.points.iter().map(|p| p.delta_strength.abs()).sum()
    }
}

fn require_finite(value: f64, what: &str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidPotential(format!("{what} must be finite, got {value}")));
    }
    Ok(())
}

/// Build a canonical [`PotentialSpec`] from raw regions and points.
///
/// Raw regions must tile the real line exactly (after sorting): the first
/// extends to -inf, the last to +inf, and consecutive edges coincide
/// bitwise. Point interactions at existing region edges attach to that
/// boundary; points strictly inside a region split it into two slabs of the
/// same height. Two point interactions at the identical coordinate are
/// rejected rather than summed.
pub fn canonicalize(
    constants: PhysicalConstants,
    raw_regions: &[Region],
    raw_points: &[PointInteraction],
) -> Result<PotentialSpec> {
    constants.validate()?;

    let mut regions: Vec<Region> = if raw_regions.is_empty() {
        vec![Region::new(f64::NEG_INFINITY, f64::INFINITY, 0.0)]
    } else {
        raw_regions.to_vec()
    };

    for r in &regions {
        if r.left.is_nan() || r.right.is_nan() {
            return Err(Error::InvalidPotential("region edge is NaN".into()));
        }
        if !(r.left < r.right) {
            return Err(Error::InvalidPotential(format!(
                "region edges must satisfy left < right, got [{}, {}]",
                r.left, r.right
            )));
        }
        require_finite(r.height, "region height")?;
    }
    regions.sort_by(|a, b| a.left.partial_cmp(&b.left).expect("NaN rejected above"));

    if regions[0].left != f64::NEG_INFINITY {
        return Err(Error::InvalidPotential(format!(
            "leftmost region must start at -inf, starts at {}",
            regions[0].left
        )));
    }
    if regions[regions.len() - 1].right != f64::INFINITY {
        return Err(Error::InvalidPotential(format!(
            "rightmost region must end at +inf, ends at {}",
            regions[regions.len() - 1].right
        )));
    }
    for w in regions.windows(2) {
        if w[0].right > w[1].left {
            return Err(Error::InvalidPotential(format!(
                "regions overlap near x = {}",
                w[1].left
            )));
        }
        if w[0].right < w[1].left {
            return Err(Error::InvalidPotential(format!(
                "gap in background between x = {} and x = {}",
                w[0].right, w[1].left
            )));
        }
    }

    let mut points: Vec<PointInteraction> = raw_points.to_vec();
    for p in &points {
        require_finite(p.position, "point position")?;
        require_finite(p.delta_strength, "delta strength")?;
        require_finite(p.delta_prime_strength, "delta-prime strength")?;
    }
    points.sort_by(|a, b| a.position.partial_cmp(&b.position).expect("finite"));
    for w in points.windows(2) {
        if w[0].position == w[1].position {
            return Err(Error::InvalidPotential(format!(
                "two point interactions at identical position x = {}; merge them explicitly",
                w[0].position
            )));
        }
    }

    // Merge boundary coordinates: existing region edges plus point positions.
    let mut boundaries: Vec<f64> =
        regions.iter().take(regions.len() - 1).map(|r| r.right).collect();
    for p in &points {
        if !boundaries.iter().any(|&b| b == p.position) {
            boundaries.push(p.position);
        }
    }
    boundaries.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    // Rebuild regions over the refined boundary list, copying heights from the
    // original region containing each slab.
    let mut final_regions = Vec::with_capacity(boundaries.len() + 1);
    for i in 0..=boundaries.len() {
        let left = if i == 0 { f64::NEG_INFINITY } else { boundaries[i - 1] };
        let right = if i == boundaries.len() { f64::INFINITY } else { boundaries[i] };
        // Last original region whose left edge is <= this slab's left edge.
        let k = regions.partition_point(|r| r.left <= left).saturating_sub(1);
        debug_assert!(regions[k].left <= left && right <= regions[k].right);
        final_regions.push(Region::new(left, right, regions[k].height));
    }

    let final_points: Vec<PointInteraction> = boundaries
        .iter()
        .map(|&x| {
            points
                .iter()
                .find(|p| p.position == x)
                .copied()
                .unwrap_or(PointInteraction::new(x, 0.0, 0.0))
        })
        .collect();

    Ok(PotentialSpec { constants, regions: final_regions, points: final_points })
}

/// Parse the line-oriented potential file format.
///
/// Directives, one per line, `#` starts a comment:
///
/// ```text
/// hbar <float>
/// mass <float>
/// segment <left|-inf> <right|inf> <height>
/// delta <pos> <alpha>
/// deltaprime <pos> <beta>
/// point <pos> <alpha> <beta>
/// ```
///
/// With no `segment` lines the background is zero everywhere. `inf`/`-inf`
/// are accepted only for the outermost segment edges.
pub fn parse_potential(text: &str) -> Result<PotentialSpec> {
    let mut constants = PhysicalConstants::default();
    let mut saw_hbar = false;
    let mut saw_mass = false;
    let mut regions: Vec<Region> = Vec::new();
    let mut points: Vec<PointInteraction> = Vec::new();

    let parse_f64 = |tok: &str, line: usize, what: &str| -> Result<f64> {
        tok.parse::<f64>().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse {what} from '{tok}'"),
        })
    };
    let finite_f64 = |tok: &str, line: usize, what: &str| -> Result<f64> {
        let v = parse_f64(tok, line, what)?;
        if !v.is_finite() {
            return Err(Error::Parse { line, message: format!("{what} must be finite, got '{tok}'") });
        }
        Ok(v)
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let expect_arity = |n: usize| -> Result<()> {
            if fields.len() != n + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "'{}' takes {} fields, got {}",
                        fields[0],
                        n,
                        fields.len() - 1
                    ),
                });
            }
            Ok(())
        };
        match fields[0] {
            "hbar" => {
                expect_arity(1)?;
                if saw_hbar {
                    return Err(Error::Parse { line, message: "duplicate 'hbar' directive".into() });
                }
                saw_hbar = true;
                constants.hbar = finite_f64(fields[1], line, "hbar")?;
            }
            "mass" => {
                expect_arity(1)?;
                if saw_mass {
                    return Err(Error::Parse { line, message: "duplicate 'mass' directive".into() });
                }
                saw_mass = true;
                constants.mass = finite_f64(fields[1], line, "mass")?;
            }
            "segment" => {
                expect_arity(3)?;
                let left = parse_f64(fields[1], line, "segment left edge")?;
                let right = parse_f64(fields[2], line, "segment right edge")?;
                let height = finite_f64(fields[3], line, "segment height")?;
                if left.is_nan() || right.is_nan() {
                    return Err(Error::Parse { line, message: "segment edge is NaN".into() });
                }
                if left == f64::INFINITY || right == f64::NEG_INFINITY {
                    return Err(Error::Parse {
                        line,
                        message: "segment edges must satisfy left < right".into(),
                    });
                }
                regions.push(Region::new(left, right, height));
            }
            "delta" => {
                expect_arity(2)?;
                let pos = finite_f64(fields[1], line, "delta position")?;
                let alpha = finite_f64(fields[2], line, "delta strength")?;
                points.push(PointInteraction::new(pos, alpha, 0.0));
            }
            "deltaprime" => {
                expect_arity(2)?;
                let pos = finite_f64(fields[1], line, "deltaprime position")?;
                let beta = finite_f64(fields[2], line, "deltaprime strength")?;
                points.push(PointInteraction::new(pos, 0.0, beta));
            }
            "point" => {
                expect_arity(3)?;
                let pos = finite_f64(fields[1], line, "point position")?;
                let alpha = finite_f64(fields[2], line, "delta strength")?;
                let beta = finite_f64(fields[3], line, "delta-prime strength")?;
                points.push(PointInteraction::new(pos, alpha, beta));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "unknown directive '{other}' (expected hbar, mass, segment, delta, deltaprime or point)"
                    ),
                });
            }
        }
    }

    canonicalize(constants, &regions, &points)
}
