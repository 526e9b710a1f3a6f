//! From minimizing geodesics to heteroclinic orbits.
//!
//! A well-to-well arc with `W > 0` in its interior is reparametrized by the
//! equipartition parameter `x(t) = int_{1/2}^t |gamma'| / sqrt(2 W(gamma))`,
//! which maps the arc onto the whole real line and enforces
//! `1/2 |U'|^2 = W(U)` pointwise. Under that parametrization the action
//! `H = int 1/2 |U'|^2 + W(U)` saturates `H >= sqrt(2) E`, so a minimizing
//! geodesic becomes an action-minimizing solution of `U'' = grad W(U)`.
//!
//! Profiles are truncated where the arc first comes within `cutoff` of each
//! endpoint well; the quadratic well bound makes the neglected tail action
//! of order `cutoff^2`, and the bound `sqrt(2) * E(trimmed ends)` is reported
//! alongside each profile.

use serde::Serialize;

use crate::curve::{check_curve_dim, DiscreteCurve, DEGENERACY_TOL};
use crate::error::Error;
use crate::geodesic::{minimize_e, GeodesicResult, SolveOptions};
use crate::metric::{split_at_wells, WellSplit};
use crate::potential::Potential;
use crate::vecmath::dist;
use crate::Result;

/// Sampling layout of a heteroclinic profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileGrid {
    /// Grid points per unit of the equipartition parameter `x`.
    pub samples_per_unit: f64,
    /// The profile is truncated where the arc first comes within this
    /// Euclidean distance of each endpoint well.
    pub cutoff: f64,
}

impl Default for ProfileGrid {
    fn default() -> Self {
        ProfileGrid {
            samples_per_unit: 100.0,
            cutoff: 1e-3,
        }
    }
}

/// Residuals attached to a sampled profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileResiduals {
    /// Max norm of `D^2 U - grad W(U)` over interior samples, normalized by
    /// `1 + max |grad W|`.
    pub ode: f64,
    /// Max of `|1/2 |U'|^2 - W(U)| / (1 + W(U))` over samples.
    pub equipartition_pointwise: f64,
    /// `|int 1/2 |U'|^2 - int W| / H`.
    pub equipartition_integrated: f64,
    pub boundary_gap_left: f64,
    pub boundary_gap_right: f64,
}

/// A sampled orbit `(x_k, U_k)` on a truncated interval of the real line.
#[derive(Debug, Clone)]
pub struct HeteroclinicProfile {
    /// Strictly increasing, uniformly spaced parameter values.
    pub xs: Vec<f64>,
    /// Node-major samples, `xs.len() * dim` long.
    pub us: Vec<f64>,
    pub dim: usize,
    /// The wells this profile connects (points, and indices when known).
    pub source_wells: (Vec<f64>, Vec<f64>),
    pub source_well_indices: Option<(usize, usize)>,
    /// `(x_first, x_last) = (-X_L, X_R)`.
    pub truncation: (f64, f64),
    /// Trapezoid action `H` over the truncated grid.
    pub action: f64,
    pub residuals: ProfileResiduals,
    pub cutoff: f64,
    /// Upper estimate of the action neglected by truncation.
    pub tail_action_bound: f64,
}

impl HeteroclinicProfile {
    pub fn sample_count(&self) -> usize {
        self.xs.len()
    }

    #[inline]
    pub fn u(&self, k: usize) -> &[f64] {
        &self.us[k * self.dim..(k + 1) * self.dim]
    }
}

// ---------------------------------------------------------------------------
// Equipartition reparametrization
// ---------------------------------------------------------------------------

/// Anchored equipartition parameter at every node of `arc`: zero at the
/// half-arc-length point, cumulative `|s_i| / sqrt(2 W(mid_i))` elsewhere.
pub fn equipartition_map(arc: &DiscreteCurve, pot: &Potential) -> Result<Vec<f64>> {
    check_curve_dim(arc, pot)?;
    for i in 1..arc.node_count() - 1 {
        let w = pot.w(arc.node(i));
        if w < DEGENERACY_TOL {
            return Err(Error::DegenerateInterior { index: i, w });
        }
    }
    let n = arc.segment_count();
    let dim = arc.dimension();
    let mut mid = vec![0.0; dim];
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(0.0);
    for i in 0..n {
        let a = arc.node(i);
        let b = arc.node(i + 1);
        for k in 0..dim {
            mid[k] = 0.5 * (a[k] + b[k]);
        }
        let w = pot.w(&mid);
        if w < DEGENERACY_TOL && i > 0 && i < n - 1 {
            return Err(Error::DegenerateInterior { index: i, w });
        }
        let len = dist(a, b);
        let dx = if len > 0.0 {
            len / (2.0 * w.max(DEGENERACY_TOL)).sqrt()
        } else {
            0.0
        };
        if !dx.is_finite() {
            return Err(Error::Internal(
                "non-finite equipartition increment".into(),
            ));
        }
        xs.push(xs[i] + dx);
    }
    // anchor: x = 0 at half Euclidean arc length
    let cum = arc.cumulative_lengths();
    let half = cum[n] * 0.5;
    let mut seg = 0usize;
    while seg + 1 < n && cum[seg + 1] < half {
        seg += 1;
    }
    let span = cum[seg + 1] - cum[seg];
    let frac = if span > 0.0 { (half - cum[seg]) / span } else { 0.0 };
    let x_half = xs[seg] + frac * (xs[seg + 1] - xs[seg]);
    for x in xs.iter_mut() {
        *x -= x_half;
    }
    Ok(xs)
}

/// Reparametrizes a well-to-well arc by equipartition and samples it on a
/// uniform grid over the truncated interval `[-X_L, X_R]`.
pub fn equipartition_reparametrize(
    arc: &DiscreteCurve,
    pot: &Potential,
    grid: &ProfileGrid,
) -> Result<HeteroclinicProfile> {
    check_curve_dim(arc, pot)?;
    if arc.node_count() < 3 {
        return Err(Error::InvalidArgument(
            "equipartition needs at least 3 nodes".into(),
        ));
    }
    if !(grid.cutoff > 0.0) || !(grid.samples_per_unit > 0.0) {
        return Err(Error::InvalidArgument(
            "profile grid parameters must be positive".into(),
        ));
    }
    let left = nearest_well(pot, arc.first())?;
    let right = nearest_well(pot, arc.last())?;
    let node_xs = equipartition_map(arc, pot)?;
    let n = arc.segment_count();
    let dim = arc.dimension();

    // truncation: exit of the cutoff-ball around each endpoint well
    let left_point = pot.well_point(left)?.to_vec();
    let right_point = pot.well_point(right)?.to_vec();
    let mut a = 1usize;
    while a <= n && dist(arc.node(a), &left_point) <= grid.cutoff {
        a += 1;
    }
    if a > n {
        return Err(Error::InvalidArgument(
            "cutoff swallows the whole arc near the left well".into(),
        ));
    }
    let x_left = crossing_x(arc, &node_xs, a - 1, &left_point, grid.cutoff, true);
    let mut b = n as isize - 1;
    while b >= 0 && dist(arc.node(b as usize), &right_point) <= grid.cutoff {
        b -= 1;
    }
    if b < 0 {
        return Err(Error::InvalidArgument(
            "cutoff swallows the whole arc near the right well".into(),
        ));
    }
    let x_right = crossing_x(arc, &node_xs, b as usize, &right_point, grid.cutoff, false);
    if !(x_left < x_right) {
        return Err(Error::InvalidArgument(format!(
            "cutoff {} leaves an empty profile domain",
            grid.cutoff
        )));
    }

    // uniform grid over [x_left, x_right]
    let span = x_right - x_left;
    let samples = ((span * grid.samples_per_unit).ceil() as usize).max(4);
    let dx = span / samples as f64;
    let mut xs = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        xs.push(x_left + k as f64 * dx);
    }
    *xs.last_mut().unwrap() = x_right;

    // invert the monotone map by linear interpolation along the arc
    let mut us = Vec::with_capacity(xs.len() * dim);
    let mut seg = 0usize;
    for &x in &xs {
        while seg + 1 < n && node_xs[seg + 1] < x {
            seg += 1;
        }
        let span = node_xs[seg + 1] - node_xs[seg];
        if !(span > 0.0) && x > node_xs[seg + 1] {
            return Err(Error::Internal(
                "non-monotone cumulative equipartition map".into(),
            ));
        }
        let frac = if span > 0.0 {
            ((x - node_xs[seg]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let p = arc.node(seg);
        let q = arc.node(seg + 1);
        for k in 0..dim {
            us.push(p[k] + frac * (q[k] - p[k]));
        }
    }

    // neglected tail action <= sqrt(2) * E(trimmed ends)
    let tail = (2.0f64).sqrt() * (trimmed_energy(arc, pot, a - 1, true) + trimmed_energy(arc, pot, b as usize, false));

    let mut profile = HeteroclinicProfile {
        xs,
        us,
        dim,
        source_wells: (left_point.clone(), right_point.clone()),
        source_well_indices: Some((left, right)),
        truncation: (x_left, x_right),
        action: 0.0,
        residuals: ProfileResiduals {
            ode: 0.0,
            equipartition_pointwise: 0.0,
            equipartition_integrated: 0.0,
            boundary_gap_left: 0.0,
            boundary_gap_right: 0.0,
        },
        cutoff: grid.cutoff,
        tail_action_bound: tail,
    };
    profile.residuals.boundary_gap_left = dist(profile.u(0), &left_point);
    profile.residuals.boundary_gap_right =
        dist(profile.u(profile.sample_count() - 1), &right_point);
    profile.action = hamiltonian_action(&profile, pot)?;
    profile.residuals.ode = ode_residual(&profile, pot)?;
    let eq = equipartition_residual(&profile, pot)?;
    profile.residuals.equipartition_pointwise = eq.pointwise;
    profile.residuals.equipartition_integrated = eq.integrated_gap;
    Ok(profile)
}

fn nearest_well(pot: &Potential, p: &[f64]) -> Result<usize> {
    let mut best = None;
    for well in pot.wells() {
        let d = dist(p, &well.point);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((well.index, d));
        }
    }
    match best {
        Some((idx, d)) if d <= 1e-9 => Ok(idx),
        _ => Err(Error::InvalidArgument(
            "arc endpoints must lie on wells".into(),
        )),
    }
}

/// `x`-value where the distance to `well` crosses `cutoff` inside segment
/// `seg`. `from_left` picks the last root (exit); otherwise the first.
fn crossing_x(
    arc: &DiscreteCurve,
    node_xs: &[f64],
    seg: usize,
    well: &[f64],
    cutoff: f64,
    from_left: bool,
) -> f64 {
    let a = arc.node(seg);
    let b = arc.node(seg + 1);
    let dim = arc.dimension();
    // |a + tau (b - a) - well|^2 = cutoff^2, quadratic in tau
    let mut aa = 0.0;
    let mut bb = 0.0;
    let mut cc = -cutoff * cutoff;
    for k in 0..dim {
        let d = b[k] - a[k];
        let e = a[k] - well[k];
        aa += d * d;
        bb += 2.0 * d * e;
        cc += e * e;
    }
    let tau = if aa <= 0.0 {
        0.0
    } else {
        let disc = (bb * bb - 4.0 * aa * cc).max(0.0).sqrt();
        let t1 = (-bb - disc) / (2.0 * aa);
        let t2 = (-bb + disc) / (2.0 * aa);
        let pick = if from_left { t2.max(t1) } else { t1.min(t2) };
        pick.clamp(0.0, 1.0)
    };
    node_xs[seg] + tau * (node_xs[seg + 1] - node_xs[seg])
}

/// Weighted length of the trimmed end piece (prefix up to segment `seg` when
/// `prefix`, suffix from segment `seg` otherwise), with the boundary segment
/// counted in full.
fn trimmed_energy(arc: &DiscreteCurve, pot: &Potential, seg: usize, prefix: bool) -> f64 {
    let dim = arc.dimension();
    let mut mid = vec![0.0; dim];
    let range = if prefix {
        0..(seg + 1).min(arc.segment_count())
    } else {
        seg..arc.segment_count()
    };
    let mut total = 0.0;
    for i in range {
        let a = arc.node(i);
        let b = arc.node(i + 1);
        for k in 0..dim {
            mid[k] = 0.5 * (a[k] + b[k]);
        }
        total += pot.w(&mid).max(0.0).sqrt() * dist(a, b);
    }
    total
}

// ---------------------------------------------------------------------------
// Action and residuals
// ---------------------------------------------------------------------------

/// Trapezoid quadrature of `1/2 |U'|^2 + W(U)`; derivatives by central
/// differences (one-sided at the ends).
pub fn hamiltonian_action(prof: &HeteroclinicProfile, pot: &Potential) -> Result<f64> {
    Ok(action_and_weighted_e(prof, pot)?.0)
}

/// Action `H` and the profile's own weighted length `sum w_k sqrt(W_k) |U'_k|`
/// computed with identical quadrature weights and derivative stencils, so the
/// pointwise bound `1/2 a^2 + b^2 >= sqrt(2) a b` transfers to the sums.
pub fn action_and_weighted_e(prof: &HeteroclinicProfile, pot: &Potential) -> Result<(f64, f64)> {
    if prof.sample_count() < 3 {
        return Err(Error::InvalidArgument(
            "action needs at least 3 samples".into(),
        ));
    }
    if prof.dim != pot.dimension() {
        return Err(Error::DimensionMismatch {
            expected: pot.dimension(),
            got: prof.dim,
        });
    }
    let m = prof.sample_count();
    let mut h = 0.0;
    let mut e = 0.0;
    for k in 0..m {
        let (lo, hi) = stencil(k, m);
        let dx = prof.xs[hi] - prof.xs[lo];
        let mut du2 = 0.0;
        for c in 0..prof.dim {
            let d = (prof.u(hi)[c] - prof.u(lo)[c]) / dx;
            du2 += d * d;
        }
        let w = pot.w(prof.u(k)).max(0.0);
        let weight = trapezoid_weight(&prof.xs, k);
        h += weight * (0.5 * du2 + w);
        e += weight * w.sqrt() * du2.sqrt();
    }
    Ok((h, e))
}

fn stencil(k: usize, m: usize) -> (usize, usize) {
    if k == 0 {
        (0, 1)
    } else if k == m - 1 {
        (m - 2, m - 1)
    } else {
        (k - 1, k + 1)
    }
}

fn trapezoid_weight(xs: &[f64], k: usize) -> f64 {
    let m = xs.len();
    if k == 0 {
        0.5 * (xs[1] - xs[0])
    } else if k == m - 1 {
        0.5 * (xs[m - 1] - xs[m - 2])
    } else {
        0.5 * (xs[k + 1] - xs[k - 1])
    }
}

/// Max norm of the second-difference residual `D^2 U_k - grad W(U_k)` over
/// interior samples, normalized by `1 + max |grad W|`. Requires a uniform
/// grid.
pub fn ode_residual(prof: &HeteroclinicProfile, pot: &Potential) -> Result<f64> {
    if prof.sample_count() < 5 {
        return Err(Error::InvalidArgument(
            "ODE residual needs at least 5 samples".into(),
        ));
    }
    if prof.dim != pot.dimension() {
        return Err(Error::DimensionMismatch {
            expected: pot.dimension(),
            got: prof.dim,
        });
    }
    let m = prof.sample_count();
    let dx = (prof.xs[m - 1] - prof.xs[0]) / (m - 1) as f64;
    for k in 1..m {
        if ((prof.xs[k] - prof.xs[k - 1]) - dx).abs() > 1e-9 * dx.abs().max(1e-12) {
            return Err(Error::InvalidArgument(
                "ODE residual requires a uniform x-grid".into(),
            ));
        }
    }
    let mut gw = vec![0.0; prof.dim];
    let mut worst = 0.0f64;
    let mut max_grad = 0.0f64;
    for k in 1..m - 1 {
        pot.grad_w_into(prof.u(k), &mut gw);
        let mut r2 = 0.0;
        let mut g2 = 0.0;
        for c in 0..prof.dim {
            let second =
                (prof.u(k + 1)[c] - 2.0 * prof.u(k)[c] + prof.u(k - 1)[c]) / (dx * dx);
            let d = second - gw[c];
            r2 += d * d;
            g2 += gw[c] * gw[c];
        }
        worst = worst.max(r2.sqrt());
        max_grad = max_grad.max(g2.sqrt());
    }
    Ok(worst / (1.0 + max_grad))
}

/// Pointwise and integrated equipartition defects.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EquipartitionResidual {
    /// `max_k |1/2 |U'_k|^2 - W(U_k)| / (1 + W(U_k))`.
    pub pointwise: f64,
    /// `|int 1/2 |U'|^2 - int W| / H` (0 for a zero-action profile).
    pub integrated_gap: f64,
}

pub fn equipartition_residual(
    prof: &HeteroclinicProfile,
    pot: &Potential,
) -> Result<EquipartitionResidual> {
    if prof.sample_count() < 3 {
        return Err(Error::InvalidArgument(
            "equipartition residual needs at least 3 samples".into(),
        ));
    }
    if prof.dim != pot.dimension() {
        return Err(Error::DimensionMismatch {
            expected: pot.dimension(),
            got: prof.dim,
        });
    }
    let m = prof.sample_count();
    let mut pointwise = 0.0f64;
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for k in 0..m {
        let (lo, hi) = stencil(k, m);
        let dx = prof.xs[hi] - prof.xs[lo];
        let mut du2 = 0.0;
        for c in 0..prof.dim {
            let d = (prof.u(hi)[c] - prof.u(lo)[c]) / dx;
            du2 += d * d;
        }
        let w = pot.w(prof.u(k)).max(0.0);
        pointwise = pointwise.max((0.5 * du2 - w).abs() / (1.0 + w));
        let weight = trapezoid_weight(&prof.xs, k);
        kinetic += weight * 0.5 * du2;
        potential += weight * w;
    }
    let h = kinetic + potential;
    let integrated_gap = if h > 0.0 { (kinetic - potential).abs() / h } else { 0.0 };
    Ok(EquipartitionResidual {
        pointwise,
        integrated_gap,
    })
}

// ---------------------------------------------------------------------------
// End-to-end pipeline
// ---------------------------------------------------------------------------

/// Output of [`connect`]: the minimizing geodesic, its well split, and one
/// profile per sub-arc. When the geodesic visits intermediate wells the
/// direct pair is flagged as obstructed and the profiles form the chain of
/// connections between consecutive visited wells instead.
#[derive(Debug, Clone)]
pub struct ConnectOutcome {
    pub geodesic: GeodesicResult,
    pub split: WellSplit,
    pub profiles: Vec<HeteroclinicProfile>,
    pub obstructed: bool,
    pub intermediate_wells: Vec<usize>,
}

/// Full pipeline: minimize, split at wells, reparametrize each sub-arc.
pub fn connect(
    pot: &Potential,
    j: usize,
    k: usize,
    opts: &SolveOptions,
    grid: &ProfileGrid,
) -> Result<ConnectOutcome> {
    if j == k {
        return Err(Error::InvalidArgument(
            "connect requires two distinct wells".into(),
        ));
    }
    let p = pot.well_point(j)?.to_vec();
    let q = pot.well_point(k)?.to_vec();
    let geodesic = minimize_e(pot, &p, &q, opts)?;
    let split = split_at_wells(&geodesic, pot, None)?;
    let mut profiles = Vec::with_capacity(split.sub_arcs.len());
    for arc in &split.sub_arcs {
        profiles.push(equipartition_reparametrize(arc, pot, grid)?);
    }
    let obstructed = split.visited_wells.len() > 2;
    let intermediate_wells =
        split.visited_wells[1..split.visited_wells.len() - 1].to_vec();
    Ok(ConnectOutcome {
        geodesic,
        split,
        profiles,
        obstructed,
        intermediate_wells,
    })
}
