//! Minimization of the discrete weighted length over curves with fixed
//! endpoints: gradient descent on the interior nodes interleaved with
//! equal-arc-length redistribution (string-method structure), plus the
//! diagnostics attached to a solve — Euler-Lagrange residual, avoidance
//! radius, and partition sums of the induced distance.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{
    check_curve_dim, euclidean_length, min_distance_to_wells, resample_uniform_arclength,
    weighted_length, DiscreteCurve, WellProximity, DEGENERACY_TOL,
};
use crate::error::Error;
use crate::potential::Potential;
use crate::vecmath::{dist, norm};
use crate::Result;

/// Floor applied to `sqrt(W)` in the solver's internal `grad F` factor so a
/// curve may slide through a well without blowing up the step. The strict
/// public gradient keeps the degenerate-midpoint error instead.
const GRAD_F_CLAMP: f64 = 1e-7;

/// Solver configuration. Restarts are the straight segment plus
/// `bump_restarts` random C^1 bump perturbations of it (seeded RNG), followed
/// by any `extra_initial_paths`.
#[derive(Debug, Clone, Serialize)]
pub struct SolveOptions {
    /// Segment count of the optimized polyline (the curve carries
    /// `node_count + 1` nodes).
    pub node_count: usize,
    pub max_iterations: usize,
    /// Backtracking line search: first trial step per iteration.
    pub initial_step: f64,
    pub step_shrink: f64,
    pub armijo_c: f64,
    /// Nodes are re-spread to uniform arc length every this many iterations.
    pub redistribution_period: usize,
    /// Converged when the max projected-gradient norm over interior nodes
    /// drops below `tol_factor * (1 + E)`.
    pub tol_factor: f64,
    /// A converged result must also have an Euler-Lagrange residual below
    /// this threshold.
    pub el_residual_threshold: f64,
    pub bump_restarts: usize,
    pub seed: u64,
    pub record_energy_trace: bool,
    #[serde(skip)]
    pub extra_initial_paths: Vec<DiscreteCurve>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            node_count: 256,
            max_iterations: 50_000,
            initial_step: 1e-2,
            step_shrink: 0.5,
            armijo_c: 1e-4,
            redistribution_period: 10,
            tol_factor: 1e-8,
            el_residual_threshold: 1e-2,
            bump_restarts: 4,
            seed: 0,
            record_energy_trace: false,
            extra_initial_paths: Vec::new(),
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::InvalidArgument("node_count must be >= 8".into()));
        }
        for (name, v) in [
            ("initial_step", self.initial_step),
            ("armijo_c", self.armijo_c),
            ("tol_factor", self.tol_factor),
            ("el_residual_threshold", self.el_residual_threshold),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidArgument(
                "step_shrink must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a geodesic solve.
#[derive(Debug, Clone)]
pub struct GeodesicResult {
    pub curve: DiscreteCurve,
    /// Weighted length of `curve`; equals `weighted_length(curve)` exactly.
    pub energy: f64,
    pub iterations: usize,
    /// Projected gradient below tolerance and EL residual below threshold.
    pub converged: bool,
    pub el_residual: f64,
    pub well_proximity: Vec<WellProximity>,
    /// Index of the winning initialization (0 = straight segment).
    pub restart_index: usize,
    /// Final energy of every restart; non-winning converged restarts are
    /// candidate local minimizers, surfaced without any optimality claim.
    pub restart_energies: Vec<f64>,
    pub restart_converged: Vec<bool>,
    /// Accepted line-search energies of the winning restart, when recorded.
    pub energy_trace: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Discrete gradient
// ---------------------------------------------------------------------------

/// Analytic gradient of the midpoint-rule weighted length with respect to
/// every node. Endpoint entries are reported but zeroed when the curve has
/// fixed endpoints.
pub fn discrete_e_gradient(c: &DiscreteCurve, pot: &Potential) -> Result<Vec<Vec<f64>>> {
    check_curve_dim(c, pot)?;
    let dim = c.dimension();
    let mut grad = vec![0.0; c.as_flat().len()];
    gradient_into(pot, c.as_flat(), dim, true, &mut grad)?;
    if c.fixed_endpoints {
        zero_endpoints(&mut grad, dim);
    }
    Ok(grad.chunks_exact(dim).map(|g| g.to_vec()).collect())
}

/// Shared gradient kernel. `strict` turns near-zero midpoint `W` into an
/// error; the solver instead clamps the `grad W / (2 sqrt(W))` factor.
fn gradient_into(
    pot: &Potential,
    data: &[f64],
    dim: usize,
    strict: bool,
    grad: &mut [f64],
) -> Result<()> {
    grad.fill(0.0);
    let nodes = data.len() / dim;
    let mut mid = vec![0.0; dim];
    let mut gw = vec![0.0; dim];
    for i in 0..nodes - 1 {
        let a = &data[i * dim..(i + 1) * dim];
        let b = &data[(i + 1) * dim..(i + 2) * dim];
        let mut len2 = 0.0;
        for k in 0..dim {
            mid[k] = 0.5 * (a[k] + b[k]);
            let d = b[k] - a[k];
            len2 += d * d;
        }
        let len = len2.sqrt();
        if len == 0.0 {
            continue;
        }
        let w = pot.w(&mid);
        if strict && w < DEGENERACY_TOL {
            return Err(Error::DegenerateMidpoint { index: i, w });
        }
        let f = w.max(0.0).sqrt();
        pot.grad_w_into(&mid, &mut gw);
        let inv_denom = 0.5 / f.max(GRAD_F_CLAMP); // grad F = grad W / (2 F)
        for k in 0..dim {
            let half_grad_f = 0.5 * gw[k] * inv_denom * len;
            let unit = (b[k] - a[k]) / len;
            grad[i * dim + k] += half_grad_f - f * unit;
            grad[(i + 1) * dim + k] += half_grad_f + f * unit;
        }
    }
    Ok(())
}

fn zero_endpoints(grad: &mut [f64], dim: usize) {
    let n = grad.len();
    grad[..dim].fill(0.0);
    grad[n - dim..].fill(0.0);
}

/// Max norm of the gradient projected orthogonally to the local tangent,
/// over interior nodes. This is the string-method convergence measure: at a
/// fixed point of (descent + redistribution) only the tangential component
/// survives.
fn max_projected_gradient(data: &[f64], grad: &[f64], dim: usize) -> f64 {
    let nodes = data.len() / dim;
    let mut worst = 0.0f64;
    for j in 1..nodes - 1 {
        let prev = &data[(j - 1) * dim..j * dim];
        let next = &data[(j + 1) * dim..(j + 2) * dim];
        let g = &grad[j * dim..(j + 1) * dim];
        let mut tau2 = 0.0;
        let mut gt = 0.0;
        for k in 0..dim {
            let t = next[k] - prev[k];
            tau2 += t * t;
            gt += g[k] * t;
        }
        let mut p2 = 0.0;
        if tau2 > 0.0 {
            let scale = gt / tau2;
            for k in 0..dim {
                let pk = g[k] - scale * (next[k] - prev[k]);
                p2 += pk * pk;
            }
        } else {
            for k in 0..dim {
                p2 += g[k] * g[k];
            }
        }
        worst = worst.max(p2.sqrt());
    }
    worst
}

// ---------------------------------------------------------------------------
// Minimization
// ---------------------------------------------------------------------------

struct SingleOutcome {
    curve: DiscreteCurve,
    energy: f64,
    iterations: usize,
    grad_converged: bool,
    trace: Option<Vec<f64>>,
}

/// Minimizes the discrete weighted length over curves joining `p` to `q`,
/// returning the best result over all restarts (ties broken by the lowest
/// restart index). Non-convergence within `max_iterations` is reported via
/// the `converged` flag, never as an error.
pub fn minimize_e(
    pot: &Potential,
    p: &[f64],
    q: &[f64],
    opts: &SolveOptions,
) -> Result<GeodesicResult> {
    opts.validate()?;
    let dim = pot.dimension();
    if p.len() != dim || q.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: if p.len() != dim { p.len() } else { q.len() },
        });
    }
    if p == q {
        return Err(Error::InvalidArgument(
            "geodesic endpoints must be distinct".into(),
        ));
    }

    let inits = initial_paths(p, q, opts)?;
    let outcomes: Vec<Result<SingleOutcome>> = inits
        .par_iter()
        .map(|init| solve_single(pot, init, opts))
        .collect();
    let mut solved = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        solved.push(outcome?);
    }

    let mut winner = 0usize;
    for (i, s) in solved.iter().enumerate() {
        if s.energy < solved[winner].energy {
            winner = i;
        }
    }
    let restart_energies: Vec<f64> = solved.iter().map(|s| s.energy).collect();
    let restart_converged: Vec<bool> = solved.iter().map(|s| s.grad_converged).collect();
    let best = solved.swap_remove(winner);

    let el_residual = el_residual_impl(&best.curve, pot, false)?;
    let well_proximity = min_distance_to_wells(&best.curve, pot)?;
    let converged = best.grad_converged && el_residual <= opts.el_residual_threshold;
    Ok(GeodesicResult {
        energy: best.energy,
        curve: best.curve,
        iterations: best.iterations,
        converged,
        el_residual,
        well_proximity,
        restart_index: winner,
        restart_energies,
        restart_converged,
        energy_trace: best.trace,
    })
}

fn initial_paths(p: &[f64], q: &[f64], opts: &SolveOptions) -> Result<Vec<DiscreteCurve>> {
    let n = opts.node_count;
    let dim = p.len();
    let straight = DiscreteCurve::straight_segment(p, q, n)?;
    let chord = dist(p, q);
    let mut rng = rand::rngs::StdRng::seed_from_u64(opts.seed);
    let mut paths = Vec::with_capacity(1 + opts.bump_restarts + opts.extra_initial_paths.len());
    paths.push(straight.clone());
    for _ in 0..opts.bump_restarts {
        let mut modes = Vec::new();
        for m in 1..=2usize {
            let amp = chord * (0.05 + 0.30 * rng.gen::<f64>()) / m as f64;
            let dir: Vec<f64> = (0..dim)
                .map(|_| crate::potential::standard_normal(&mut rng))
                .collect();
            let dn = norm(&dir);
            let dir: Vec<f64> = if dn > 1e-12 {
                dir.into_iter().map(|d| d / dn).collect()
            } else {
                let mut e = vec![0.0; dim];
                e[0] = 1.0;
                e
            };
            modes.push((m as f64, amp, dir));
        }
        let mut bumped = straight.clone();
        let count = bumped.node_count();
        {
            let data = bumped.flat_mut();
            for i in 1..count - 1 {
                let t = i as f64 / n as f64;
                for (m, amp, dir) in &modes {
                    let s = amp * (m * std::f64::consts::PI * t).sin();
                    for k in 0..dim {
                        data[i * dim + k] += s * dir[k];
                    }
                }
            }
        }
        paths.push(bumped);
    }
    for extra in &opts.extra_initial_paths {
        if extra.dimension() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: extra.dimension(),
            });
        }
        let mut resampled = resample_uniform_arclength(extra, n)?;
        // pin the requested endpoints exactly
        resampled.flat_mut()[..dim].copy_from_slice(p);
        let len = resampled.as_flat().len();
        resampled.flat_mut()[len - dim..].copy_from_slice(q);
        resampled.fixed_endpoints = true;
        paths.push(resampled);
    }
    Ok(paths)
}

fn solve_single(pot: &Potential, init: &DiscreteCurve, opts: &SolveOptions) -> Result<SingleOutcome> {
    let dim = init.dimension();
    let n = init.segment_count();
    let mut curve = init.clone();
    curve.fixed_endpoints = true;
    let mut energy = weighted_length(&curve, pot)?;
    let len = curve.as_flat().len();
    let mut grad = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut trace = opts.record_energy_trace.then(Vec::new);
    let mut iterations = 0usize;
    let mut grad_converged = false;
    let mut stalls = 0usize;

    for iter in 0..opts.max_iterations {
        iterations = iter;
        if opts.redistribution_period > 0 && iter > 0 && iter % opts.redistribution_period == 0 {
            curve = resample_uniform_arclength(&curve, n)?;
            energy = weighted_length(&curve, pot)?;
        }
        gradient_into(pot, curve.as_flat(), dim, false, &mut grad)?;
        zero_endpoints(&mut grad, dim);
        if grad.iter().any(|g| g.is_nan()) {
            return Err(Error::Solver {
                iteration: iter,
                message: "NaN in the discrete gradient".into(),
            });
        }
        let gperp = max_projected_gradient(curve.as_flat(), &grad, dim);
        if gperp < opts.tol_factor * (1.0 + energy) {
            grad_converged = true;
            break;
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        let mut step = opts.initial_step;
        let mut accepted = false;
        let mut trial_energy = energy;
        for _ in 0..60 {
            let data = curve.as_flat();
            for k in 0..len {
                trial[k] = data[k] - step * grad[k];
            }
            let e = crate::curve::weighted_length_flat(pot, &trial, dim);
            if e.is_finite() && e <= energy - opts.armijo_c * step * g2 {
                accepted = true;
                trial_energy = e;
                break;
            }
            step *= opts.step_shrink;
        }
        if accepted {
            curve.flat_mut().copy_from_slice(&trial);
            energy = trial_energy;
            if let Some(t) = trace.as_mut() {
                t.push(energy);
            }
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= 2 {
                break;
            }
        }
    }

    // canonical output: uniform node spacing, energy recomputed on it
    let curve = resample_uniform_arclength(&curve, n)?;
    let energy = weighted_length(&curve, pot)?;
    Ok(SingleOutcome {
        curve,
        energy,
        iterations,
        grad_converged,
        trace,
    })
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residual
// ---------------------------------------------------------------------------

/// Residual of `d/ds (F(gamma) dgamma/ds) = l^2 grad F(gamma)` under the
/// constant-speed parametrization: the op resamples internally, forms the
/// flux difference with central differences, and normalizes by
/// `1 + l^2 max |grad F|`.
pub fn el_residual(c: &DiscreteCurve, pot: &Potential) -> Result<f64> {
    el_residual_impl(c, pot, true)
}

fn el_residual_impl(c: &DiscreteCurve, pot: &Potential, strict: bool) -> Result<f64> {
    check_curve_dim(c, pot)?;
    if c.node_count() < 5 {
        return Err(Error::InvalidArgument(
            "EL residual needs at least 5 nodes".into(),
        ));
    }
    let n = c.segment_count();
    let rc = resample_uniform_arclength(c, n)?;
    let l = euclidean_length(&rc);
    if l == 0.0 {
        return Ok(0.0);
    }
    let n = rc.segment_count();
    let dim = rc.dimension();
    let ds = 1.0 / n as f64;
    let mut mid = vec![0.0; dim];
    // flux_i = F(m_i) (x_{i+1} - x_i) / ds on every segment
    let mut flux = vec![0.0; n * dim];
    for i in 0..n {
        let a = rc.node(i);
        let b = rc.node(i + 1);
        for k in 0..dim {
            mid[k] = 0.5 * (a[k] + b[k]);
        }
        let f = pot.w(&mid).max(0.0).sqrt();
        for k in 0..dim {
            flux[i * dim + k] = f * (b[k] - a[k]) / ds;
        }
    }
    let mut gw = vec![0.0; dim];
    let mut worst = 0.0f64;
    let mut max_grad_f = 0.0f64;
    for j in 1..n {
        let x = rc.node(j);
        let w = pot.w(x);
        if strict && w < DEGENERACY_TOL {
            return Err(Error::DegenerateInterior { index: j, w });
        }
        pot.grad_w_into(x, &mut gw);
        let inv_denom = 0.5 / w.max(0.0).sqrt().max(GRAD_F_CLAMP);
        let mut r2 = 0.0;
        let mut g2 = 0.0;
        for k in 0..dim {
            let grad_f = gw[k] * inv_denom;
            g2 += grad_f * grad_f;
            let d = (flux[j * dim + k] - flux[(j - 1) * dim + k]) / ds - l * l * grad_f;
            r2 += d * d;
        }
        worst = worst.max(r2.sqrt());
        max_grad_f = max_grad_f.max(g2.sqrt());
    }
    Ok(worst / (1.0 + l * l * max_grad_f))
}

// ---------------------------------------------------------------------------
// Avoidance radius
// ---------------------------------------------------------------------------

/// Sampling configuration for [`avoidance_radius`].
#[derive(Debug, Clone, Serialize)]
pub struct AvoidanceProbe {
    pub ball_samples: usize,
    pub annulus_samples: usize,
    pub seed: u64,
}

impl Default for AvoidanceProbe {
    fn default() -> Self {
        AvoidanceProbe {
            ball_samples: 100_000,
            annulus_samples: 20_000,
            seed: 0,
        }
    }
}

/// Sampled estimates of `M_eps = max F` over the ball `|p| <= 1/eps`,
/// `m_eps = min F` over the annuli `eps <= |p - p_j| <= 2 eps`, and the
/// radius `r_eps = eps m_eps / M_eps`: endpoints closer than `r_eps` admit
/// minimizers avoiding the `eps`-neighborhoods of the zero set.
#[derive(Debug, Clone, Serialize)]
pub struct AvoidanceRadius {
    pub m_eps: f64,
    pub big_m_eps: f64,
    pub r_eps: f64,
}

pub fn avoidance_radius(
    pot: &Potential,
    eps: f64,
    probe: &AvoidanceProbe,
) -> Result<AvoidanceRadius> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let ball_radius = 1.0 / eps;
    for well in pot.wells() {
        if norm(&well.point) >= ball_radius {
            return Err(Error::InvalidArgument(format!(
                "well {} lies outside the ball of radius 1/eps = {ball_radius}",
                well.index
            )));
        }
    }
    let n = pot.dimension();
    let mut rng = rand::rngs::StdRng::seed_from_u64(probe.seed);
    let mut big_m = 0.0f64;
    for _ in 0..probe.ball_samples.max(1) {
        let dir = random_unit(&mut rng, n);
        let r = ball_radius * rng.gen::<f64>().powf(1.0 / n as f64);
        let p: Vec<f64> = dir.iter().map(|d| d * r).collect();
        big_m = big_m.max(pot.w(&p).max(0.0).sqrt());
    }
    let mut m = f64::INFINITY;
    for well in pot.wells() {
        for _ in 0..probe.annulus_samples.max(1) {
            let dir = random_unit(&mut rng, n);
            let u: f64 = rng.gen();
            let pow = n as f64;
            let r = eps * (1.0 + u * (2f64.powf(pow) - 1.0)).powf(1.0 / pow);
            let p: Vec<f64> = well
                .point
                .iter()
                .zip(&dir)
                .map(|(c, d)| c + r * d)
                .collect();
            m = m.min(pot.w(&p).max(0.0).sqrt());
        }
    }
    if !big_m.is_finite() || big_m == 0.0 || !m.is_finite() {
        return Err(Error::InvalidArgument(
            "avoidance probe produced degenerate bounds".into(),
        ));
    }
    Ok(AvoidanceRadius {
        m_eps: m,
        big_m_eps: big_m,
        r_eps: eps * m / big_m,
    })
}

fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| crate::potential::standard_normal(rng))
            .collect();
        let nv = norm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// Partition sums
// ---------------------------------------------------------------------------

/// One row of [`length_by_partitions`].
#[derive(Debug, Clone, Serialize)]
pub struct PartitionSum {
    pub size: usize,
    pub total: f64,
    /// False when any sub-solve failed to converge.
    pub all_converged: bool,
}

/// For each partition size `J`, places `J + 1` points at equal arc length
/// along `c` and sums the solver distances between consecutive points. On a
/// minimizing geodesic every partition sum reproduces the total energy; on a
/// non-minimizing curve the sums stay below it.
pub fn length_by_partitions(
    c: &DiscreteCurve,
    pot: &Potential,
    partition_sizes: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<PartitionSum>> {
    check_curve_dim(c, pot)?;
    let mut out = Vec::with_capacity(partition_sizes.len());
    for &size in partition_sizes {
        if size < 1 {
            return Err(Error::InvalidArgument(
                "partition sizes must be >= 1".into(),
            ));
        }
        let points = if size == 1 {
            DiscreteCurve::from_nodes(vec![c.first().to_vec(), c.last().to_vec()])?
        } else {
            resample_uniform_arclength(c, size)?
        };
        let mut total = 0.0;
        let mut all_converged = true;
        for k in 0..size {
            let result = minimize_e(pot, points.node(k), points.node(k + 1), opts)?;
            total += result.energy;
            all_converged &= result.converged;
        }
        out.push(PartitionSum {
            size,
            total,
            all_converged,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::weighted_length;
    use rand::rngs::StdRng;
    use std::sync::Arc;

    fn quick_opts() -> SolveOptions {
        SolveOptions {
            node_count: 64,
            max_iterations: 8000,
            bump_restarts: 2,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let mut nodes = vec![vec![-1.0, 0.0]];
            for k in 1..7 {
                nodes.push(vec![
                    -1.0 + 2.0 * k as f64 / 7.0 + 0.1 * (rng.gen::<f64>() - 0.5),
                    0.4 * (rng.gen::<f64>() - 0.5),
                ]);
            }
            nodes.push(vec![1.0, 0.0]);
            let c = DiscreteCurve::from_nodes(nodes).unwrap();
            let grad = discrete_e_gradient(&c, &pot).unwrap();
            for j in 1..c.node_count() - 1 {
                for k in 0..2 {
                    let h = 1e-6;
                    let mut plus = c.clone();
                    plus.flat_mut()[j * 2 + k] += h;
                    let mut minus = c.clone();
                    minus.flat_mut()[j * 2 + k] -= h;
                    let fd = (weighted_length(&plus, &pot).unwrap()
                        - weighted_length(&minus, &pot).unwrap())
                        / (2.0 * h);
                    let err = (grad[j][k] - fd).abs() / (1.0 + fd.abs());
                    assert!(err < 1e-6, "node {j} coord {k}: {} vs {fd}", grad[j][k]);
                }
            }
        }
    }

    #[test]
    fn straight_axis_gradient_is_purely_tangential() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let c = DiscreteCurve::straight_segment(&[-1.0, 0.0], &[1.0, 0.0], 32).unwrap();
        let grad = discrete_e_gradient(&c, &pot).unwrap();
        for g in &grad {
            assert!(g[1].abs() < 1e-10);
        }
    }

    #[test]
    fn free_endpoint_translation_derivative_matches_fd() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let mut c = DiscreteCurve::sample(2, 24, |t| {
            vec![-0.8 + 1.4 * t, 0.2 * (std::f64::consts::PI * t).sin() + 0.1]
        })
        .unwrap();
        c.fixed_endpoints = false;
        let grad = discrete_e_gradient(&c, &pot).unwrap();
        let v = [0.3, -0.7];
        let directional: f64 = grad.iter().map(|g| g[0] * v[0] + g[1] * v[1]).sum();
        let h = 1e-6;
        let shift = |s: f64| {
            let mut m = c.clone();
            for i in 0..m.node_count() {
                m.flat_mut()[i * 2] += s * v[0];
                m.flat_mut()[i * 2 + 1] += s * v[1];
            }
            weighted_length(&m, &pot).unwrap()
        };
        let fd = (shift(h) - shift(-h)) / (2.0 * h);
        assert!(
            (directional - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
            "{directional} vs {fd}"
        );
    }

    #[test]
    fn degenerate_midpoint_is_an_error_for_the_strict_gradient() {
        let pot = Potential::alikakos_fusco(0.3);
        // midpoint of the middle segment sits exactly on the well (0, 0.3)
        let c = DiscreteCurve::from_nodes(vec![
            vec![-1.0, 0.0],
            vec![-0.1, 0.3],
            vec![0.1, 0.3],
            vec![1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            discrete_e_gradient(&c, &pot),
            Err(Error::DegenerateMidpoint { .. })
        ));
    }

    #[test]
    fn double_well_minimization_recovers_the_axis() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let opts = quick_opts();
        let r = minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
        assert!((r.energy - 2.0 / 3.0).abs() < 2e-3, "E = {}", r.energy);
        for node in r.curve.nodes() {
            assert!(node[1].abs() < 1e-3);
        }
        assert!(r.converged);
        assert_eq!(r.energy, weighted_length(&r.curve, &pot).unwrap());
        assert_eq!(r.restart_index, 0);
    }

    #[test]
    fn descent_never_increases_accepted_energies() {
        let pot = Potential::alikakos_fusco(0.9);
        let opts = SolveOptions {
            node_count: 48,
            max_iterations: 1500,
            bump_restarts: 1,
            record_energy_trace: true,
            ..SolveOptions::default()
        };
        let r = minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
        let trace = r.energy_trace.unwrap();
        assert!(!trace.is_empty());
        for w in trace.windows(2) {
            assert!(w[1] <= w[0], "energy increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn coincident_endpoints_are_rejected() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        assert!(matches!(
            minimize_e(&pot, &[0.3, 0.0], &[0.3, 0.0], &quick_opts()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn nan_gradient_is_a_solver_error() {
        let pot = Potential::custom(
            2,
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            |p| if p[1] > 0.05 { f64::NAN } else { 0.25 * (1.0 - p[0] * p[0]).powi(2) },
            None,
        );
        let opts = SolveOptions {
            node_count: 16,
            max_iterations: 200,
            bump_restarts: 2,
            ..SolveOptions::default()
        };
        match minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts) {
            Err(Error::Solver { .. }) => {}
            other => panic!("expected solver error, got {other:?}"),
        }
    }

    #[test]
    fn el_residual_of_flat_straight_line_vanishes() {
        let pot = Potential::custom(
            2,
            vec![],
            |_| 1.0,
            Some(Arc::new(|p: &[f64]| vec![0.0; p.len()])),
        );
        let c = DiscreteCurve::straight_segment(&[0.0, 0.0], &[1.0, 2.0], 64).unwrap();
        assert!(el_residual(&c, &pot).unwrap() < 1e-10);
    }

    #[test]
    fn el_residual_of_converged_double_well_geodesic_is_small() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let opts = SolveOptions {
            node_count: 256,
            bump_restarts: 0,
            ..SolveOptions::default()
        };
        let r = minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
        assert!(r.el_residual < 5e-3, "residual {}", r.el_residual);
    }

    #[test]
    fn el_residual_needs_five_nodes() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let c = DiscreteCurve::straight_segment(&[-1.0, 0.0], &[1.0, 0.0], 3).unwrap();
        assert!(matches!(
            el_residual(&c, &pot),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn avoidance_radius_on_double_well() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let probe = AvoidanceProbe {
            ball_samples: 20_000,
            annulus_samples: 5_000,
            seed: 0,
        };
        let r = avoidance_radius(&pot, 0.1, &probe).unwrap();
        assert!(r.m_eps > 0.0 && r.big_m_eps > 0.0);
        assert_eq!(r.r_eps, 0.1 * r.m_eps / r.big_m_eps);
        assert!(r.r_eps > 0.0 && r.r_eps <= 0.1 * r.m_eps / r.big_m_eps);

        // scaling W -> 4 W doubles both bounds and leaves r_eps invariant
        let scaled = pot.scaled(4.0);
        let rs = avoidance_radius(&scaled, 0.1, &probe).unwrap();
        assert!((rs.r_eps - r.r_eps).abs() <= 1e-12 * r.r_eps);
    }

    #[test]
    fn avoidance_radius_rejects_large_eps() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        // 1/eps < |p_2| = 1
        assert!(matches!(
            avoidance_radius(&pot, 1.5, &AvoidanceProbe::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn single_partition_reproduces_the_distance() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let opts = quick_opts();
        let r = minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
        let sums = length_by_partitions(&r.curve, &pot, &[1], &opts).unwrap();
        assert_eq!(sums[0].size, 1);
        assert_eq!(sums[0].total, r.energy);
    }

    #[test]
    fn detour_partition_sums_fall_below_its_energy() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let detour = DiscreteCurve::sample(2, 96, |t| {
            vec![-1.0 + 2.0 * t, 0.8 * (std::f64::consts::PI * t).sin()]
        })
        .unwrap();
        let e = weighted_length(&detour, &pot).unwrap();
        let opts = quick_opts();
        let sums = length_by_partitions(&detour, &pot, &[2, 4], &opts).unwrap();
        for s in &sums {
            // partition sums approach E = L from below as the partition
            // refines; on a non-geodesic they stay strictly under it
            assert!(
                s.total < e * (1.0 - 5e-3),
                "size {}: {} vs E = {e}",
                s.size,
                s.total
            );
        }
    }

    #[test]
    fn conformal_scaling_scales_energy_and_keeps_the_argmin() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let scaled = pot.scaled(4.0); // c^2 = 4, energies scale by 2
        let opts = quick_opts();
        let a = minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
        let b = minimize_e(&scaled, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
        assert!(
            (b.energy - 2.0 * a.energy).abs() <= 1e-6 * b.energy,
            "{} vs {}",
            b.energy,
            2.0 * a.energy
        );
        for i in 0..a.curve.node_count() {
            assert!(dist(a.curve.node(i), b.curve.node(i)) < 1e-6);
        }
    }
}
