//! Discrete curves and the functionals defined on them: Euclidean length,
//! the weighted length `E = sum sqrt(W(mid)) |seg|` discretizing the
//! degenerate conformal length, and arc-length reparametrizations.
//!
//! `sqrt(W)` is evaluated at segment midpoints so that curves with endpoints
//! on wells (where `W = 0` and the conformal factor is non-smooth) still give
//! a finite, node-differentiable functional. Segment terms are summed with a
//! symmetric pairing, making both length functionals bit-identical under
//! node-order reversal.

use serde::Serialize;

use crate::error::Error;
use crate::potential::Potential;
use crate::vecmath::{dist, point_segment_distance, sum_symmetric};
use crate::Result;

/// Threshold below which `W` counts as degenerate along a curve interior.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// An ordered polyline of N-dimensional nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    dim: usize,
    /// Node-major storage, `node_count * dim` long.
    data: Vec<f64>,
    /// When set, optimization never moves the first and last node.
    pub fixed_endpoints: bool,
}

/// Closest approach of a curve to one well.
#[derive(Debug, Clone, Serialize)]
pub struct WellProximity {
    pub well_index: usize,
    /// Minimum over nodes and segment projections.
    pub distance: f64,
    pub nearest_node: usize,
}

impl DiscreteCurve {
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<DiscreteCurve> {
        if dim == 0 {
            return Err(Error::InvalidArgument("curve dimension must be >= 1".into()));
        }
        if data.is_empty() || data.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "flat node data of length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        Ok(DiscreteCurve {
            dim,
            data,
            fixed_endpoints: true,
        })
    }

    pub fn from_nodes(nodes: Vec<Vec<f64>>) -> Result<DiscreteCurve> {
        let dim = nodes.first().map(|n| n.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidArgument("need at least one node".into()));
        }
        let mut data = Vec::with_capacity(nodes.len() * dim);
        for node in &nodes {
            if node.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: node.len(),
                });
            }
            data.extend_from_slice(node);
        }
        Self::from_flat(dim, data)
    }

    /// Straight polyline from `p` to `q` with `segments` equal pieces.
    pub fn straight_segment(p: &[f64], q: &[f64], segments: usize) -> Result<DiscreteCurve> {
        if p.len() != q.len() || p.is_empty() {
            return Err(Error::InvalidArgument(
                "endpoints must share a positive dimension".into(),
            ));
        }
        if segments == 0 {
            return Err(Error::InvalidArgument("need at least one segment".into()));
        }
        let dim = p.len();
        let mut data = Vec::with_capacity((segments + 1) * dim);
        for k in 0..=segments {
            let t = k as f64 / segments as f64;
            for i in 0..dim {
                data.push(p[i] + t * (q[i] - p[i]));
            }
        }
        // endpoints exactly
        data[..dim].copy_from_slice(p);
        let len = data.len();
        data[len - dim..].copy_from_slice(q);
        Self::from_flat(dim, data)
    }

    /// Samples `f` at `segments + 1` uniform parameter values in `[0, 1]`.
    pub fn sample(dim: usize, segments: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<DiscreteCurve> {
        if segments == 0 {
            return Err(Error::InvalidArgument("need at least one segment".into()));
        }
        let mut data = Vec::with_capacity((segments + 1) * dim);
        for k in 0..=segments {
            let node = f(k as f64 / segments as f64);
            if node.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: node.len(),
                });
            }
            data.extend_from_slice(&node);
        }
        Self::from_flat(dim, data)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn segment_count(&self) -> usize {
        self.node_count().saturating_sub(1)
    }

    #[inline]
    pub fn node(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn first(&self) -> &[f64] {
        self.node(0)
    }

    pub fn last(&self) -> &[f64] {
        self.node(self.node_count() - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn reversed(&self) -> DiscreteCurve {
        let mut data = Vec::with_capacity(self.data.len());
        for i in (0..self.node_count()).rev() {
            data.extend_from_slice(self.node(i));
        }
        DiscreteCurve {
            dim: self.dim,
            data,
            fixed_endpoints: self.fixed_endpoints,
        }
    }

    /// The sub-polyline spanning nodes `a..=b` (inclusive).
    pub fn slice(&self, a: usize, b: usize) -> Result<DiscreteCurve> {
        if a >= b || b >= self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "invalid slice {a}..={b} of a curve with {} nodes",
                self.node_count()
            )));
        }
        Ok(DiscreteCurve {
            dim: self.dim,
            data: self.data[a * self.dim..(b + 1) * self.dim].to_vec(),
            fixed_endpoints: self.fixed_endpoints,
        })
    }

    /// Cumulative Euclidean arc length at every node.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.node_count());
        cum.push(0.0);
        for i in 1..self.node_count() {
            let d = dist(self.node(i - 1), self.node(i));
            cum.push(cum[i - 1] + d);
        }
        cum
    }
}

/// Midpoint-rule weighted length `sum_i sqrt(W((x_i + x_{i+1})/2)) |x_{i+1} - x_i|`.
///
/// `sqrt` is taken of `max(W, 0)` so that `-1e-17`-type floating noise near
/// wells cannot poison the value. The result is invariant under reversal of
/// the node order.
pub fn weighted_length(c: &DiscreteCurve, pot: &Potential) -> Result<f64> {
    check_curve_dim(c, pot)?;
    Ok(weighted_length_flat(pot, &c.data, c.dim))
}

/// [`weighted_length`] on raw node-major data; the solver's line search and
/// the public functional share this kernel so stored energies recompute
/// bit-exactly.
pub(crate) fn weighted_length_flat(pot: &Potential, data: &[f64], dim: usize) -> f64 {
    let n = data.len() / dim - 1;
    if data.len() < 2 * dim {
        return 0.0;
    }
    let mut mid = vec![0.0; dim];
    sum_symmetric(n, |i| {
        let a = &data[i * dim..(i + 1) * dim];
        let b = &data[(i + 1) * dim..(i + 2) * dim];
        let mut len2 = 0.0;
        for k in 0..dim {
            mid[k] = 0.5 * (a[k] + b[k]);
            let d = b[k] - a[k];
            len2 += d * d;
        }
        pot.w(&mid).max(0.0).sqrt() * len2.sqrt()
    })
}

/// Euclidean polyline length, reversal-invariant like [`weighted_length`].
pub fn euclidean_length(c: &DiscreteCurve) -> f64 {
    let n = c.segment_count();
    if n == 0 {
        return 0.0;
    }
    sum_symmetric(n, |i| dist(c.node(i), c.node(i + 1)))
}

/// Resamples onto `n + 1` nodes at equal Euclidean arc-length spacing.
/// Endpoints are preserved exactly; a zero-length input collapses to a
/// constant curve.
pub fn resample_uniform_arclength(c: &DiscreteCurve, n: usize) -> Result<DiscreteCurve> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "resampling needs at least 2 segments".into(),
        ));
    }
    let cum = c.cumulative_lengths();
    let total = *cum.last().unwrap();
    let dim = c.dim;
    if total == 0.0 {
        let mut data = Vec::with_capacity((n + 1) * dim);
        for _ in 0..=n {
            data.extend_from_slice(c.node(0));
        }
        return Ok(DiscreteCurve {
            dim,
            data,
            fixed_endpoints: c.fixed_endpoints,
        });
    }
    let mut data = Vec::with_capacity((n + 1) * dim);
    data.extend_from_slice(c.first());
    let mut seg = 0usize;
    for k in 1..n {
        let target = total * (k as f64 / n as f64);
        while seg + 1 < cum.len() - 1 && cum[seg + 1] <= target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        let a = c.node(seg);
        let b = c.node(seg + 1);
        for i in 0..dim {
            data.push(a[i] + frac * (b[i] - a[i]));
        }
    }
    data.extend_from_slice(c.last());
    let mut out = DiscreteCurve {
        dim,
        data,
        fixed_endpoints: c.fixed_endpoints,
    };
    merge_coincident(&mut out);
    Ok(out)
}

/// Places `n + 1` nodes so each of the `n` segments carries the same share of
/// the weighted length — the discrete analogue of the degenerate arc-length
/// parametrization `F |gamma'| = const`.
///
/// Requires `W > 0` strictly inside the curve (endpoints may be wells).
pub fn reparametrize_degenerate_arclength(
    c: &DiscreteCurve,
    pot: &Potential,
    n: usize,
) -> Result<DiscreteCurve> {
    check_curve_dim(c, pot)?;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "reparametrization needs at least 2 segments".into(),
        ));
    }
    for i in 1..c.node_count() - 1 {
        let w = pot.w(c.node(i));
        if w < DEGENERACY_TOL {
            return Err(Error::DegenerateInterior { index: i, w });
        }
    }
    let dim = c.dim;
    let m = c.segment_count();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    let mut mid = vec![0.0; dim];
    for i in 0..m {
        let a = c.node(i);
        let b = c.node(i + 1);
        for k in 0..dim {
            mid[k] = 0.5 * (a[k] + b[k]);
        }
        let w = pot.w(&mid);
        if w < DEGENERACY_TOL && i > 0 && i < m - 1 {
            return Err(Error::DegenerateMidpoint { index: i, w });
        }
        let term = w.max(0.0).sqrt() * dist(a, b);
        cum.push(cum[i] + term);
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "curve has zero weighted length; degenerate arc-length undefined".into(),
        ));
    }
    let mut data = Vec::with_capacity((n + 1) * dim);
    data.extend_from_slice(c.first());
    let mut seg = 0usize;
    for k in 1..n {
        let target = total * (k as f64 / n as f64);
        while seg + 1 < cum.len() - 1 && cum[seg + 1] <= target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        let a = c.node(seg);
        let b = c.node(seg + 1);
        for i in 0..dim {
            data.push(a[i] + frac * (b[i] - a[i]));
        }
    }
    data.extend_from_slice(c.last());
    let mut out = DiscreteCurve {
        dim,
        data,
        fixed_endpoints: c.fixed_endpoints,
    };
    merge_coincident(&mut out);
    Ok(out)
}

/// Closest approach to every well, one record per well.
pub fn min_distance_to_wells(c: &DiscreteCurve, pot: &Potential) -> Result<Vec<WellProximity>> {
    check_curve_dim(c, pot)?;
    let mut out = Vec::with_capacity(pot.wells().len());
    for well in pot.wells() {
        let mut best = f64::INFINITY;
        if c.segment_count() == 0 {
            best = dist(c.node(0), &well.point);
        }
        for i in 0..c.segment_count() {
            let (d, _) = point_segment_distance(&well.point, c.node(i), c.node(i + 1));
            best = best.min(d);
        }
        let mut nearest_node = 0;
        let mut node_best = f64::INFINITY;
        for (i, node) in c.nodes().enumerate() {
            let d = dist(node, &well.point);
            if d < node_best {
                node_best = d;
                nearest_node = i;
            }
        }
        out.push(WellProximity {
            well_index: well.index,
            distance: best,
            nearest_node,
        });
    }
    Ok(out)
}

pub(crate) fn check_curve_dim(c: &DiscreteCurve, pot: &Potential) -> Result<()> {
    if c.dim != pot.dimension() {
        return Err(Error::DimensionMismatch {
            expected: pot.dimension(),
            got: c.dim,
        });
    }
    Ok(())
}

/// Drops bitwise-coincident consecutive nodes (zero-length segments).
fn merge_coincident(c: &mut DiscreteCurve) {
    let dim = c.dim;
    let n = c.node_count();
    if n < 3 {
        return;
    }
    let mut keep: Vec<usize> = vec![0];
    for i in 1..n {
        let prev = *keep.last().unwrap();
        if c.node(prev) != c.node(i) {
            keep.push(i);
        }
    }
    if keep.len() == n {
        return;
    }
    if *keep.last().unwrap() != n - 1 {
        keep.push(n - 1);
    }
    let mut data = Vec::with_capacity(keep.len() * dim);
    for &i in &keep {
        data.extend_from_slice(c.node(i));
    }
    c.data = data;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn flat_hook(dim: usize) -> Potential {
        // test-only: F == 1 everywhere, no wells; exercises geometry alone
        Potential::custom(
            dim,
            vec![],
            |_| 1.0,
            Some(Arc::new(|p: &[f64]| vec![0.0; p.len()])),
        )
    }

    #[test]
    fn constant_curve_has_zero_weighted_length() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let c = DiscreteCurve::from_nodes(vec![vec![0.3, 0.4]; 5]).unwrap();
        assert_eq!(weighted_length(&c, &pot).unwrap(), 0.0);
    }

    #[test]
    fn double_well_axis_energy_is_two_thirds() {
        // int_{-1}^{1} (1 - u^2)/2 du = 2/3 by hand
        let pot = Potential::double_well(1.0, 2).unwrap();
        let c = DiscreteCurve::straight_segment(&[-1.0, 0.0], &[1.0, 0.0], 2000).unwrap();
        let e = weighted_length(&c, &pot).unwrap();
        assert!((e - 2.0 / 3.0).abs() < 1e-4, "E = {e}");
    }

    #[test]
    fn six_well_axis_energy_near_098() {
        let pot = Potential::six_well();
        let c =
            DiscreteCurve::straight_segment(&[-1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 4000).unwrap();
        let e = weighted_length(&c, &pot).unwrap();
        assert!((0.97..=0.99).contains(&e), "E = {e}");
    }

    #[test]
    fn euclidean_basics() {
        let c = DiscreteCurve::straight_segment(&[0.0, 0.0], &[3.0, 4.0], 17).unwrap();
        assert!((euclidean_length(&c) - 5.0).abs() < 1e-12);
        let square = DiscreteCurve::from_nodes(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0],
        ])
        .unwrap();
        assert!((euclidean_length(&square) - 4.0).abs() < 1e-15);
        assert_eq!(
            euclidean_length(&square.reversed()),
            euclidean_length(&square)
        );
    }

    #[test]
    fn weighted_length_reversal_is_exact() {
        let pot = Potential::alikakos_fusco(0.3);
        let c = DiscreteCurve::sample(2, 313, |t| {
            vec![2.0 * t - 1.0, 0.4 * (std::f64::consts::PI * t).sin()]
        })
        .unwrap();
        let e = weighted_length(&c, &pot).unwrap();
        let er = weighted_length(&c.reversed(), &pot).unwrap();
        assert_eq!(e, er);
    }

    #[test]
    fn resample_places_uniform_fractions() {
        let c = DiscreteCurve::straight_segment(&[0.0, 0.0], &[2.0, 0.0], 7).unwrap();
        let r = resample_uniform_arclength(&c, 4).unwrap();
        assert_eq!(r.node_count(), 5);
        for (k, frac) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
            assert!((r.node(k)[0] - 2.0 * frac).abs() < 1e-14);
            assert_eq!(r.node(k)[1], 0.0);
        }
    }

    #[test]
    fn resample_preserves_length_of_straight_polylines() {
        // non-uniformly parametrized straight polyline: resampled nodes stay
        // on the line, so the length is preserved to rounding
        let c = DiscreteCurve::sample(2, 64, |t| {
            let s = t * t;
            vec![3.0 * s, 4.0 * s]
        })
        .unwrap();
        let l = euclidean_length(&c);
        let r = resample_uniform_arclength(&c, 128).unwrap();
        assert!((euclidean_length(&r) - l).abs() < 1e-12);
        assert!((l - 5.0).abs() < 1e-12);
    }

    #[test]
    fn resample_shortens_curved_polylines_at_most_quadratically() {
        // new nodes interpolate the polyline, so corners can only be cut:
        // the length never grows and shrinks by O(h^2) curvature terms
        let c = DiscreteCurve::sample(2, 64, |t| vec![t, (3.0 * t).sin() * 0.2]).unwrap();
        let l = euclidean_length(&c);
        let r = resample_uniform_arclength(&c, 128).unwrap();
        let lr = euclidean_length(&r);
        assert!(lr <= l + 1e-15);
        assert!(l - lr < 1e-3);
    }

    #[test]
    fn resample_refinement_changes_weighted_length_slightly() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let c = DiscreteCurve::sample(2, 400, |t| {
            vec![2.0 * t - 1.0, 0.3 * (std::f64::consts::PI * t).sin()]
        })
        .unwrap();
        let e = weighted_length(&c, &pot).unwrap();
        let r = resample_uniform_arclength(&c, 800).unwrap();
        let e2 = weighted_length(&r, &pot).unwrap();
        assert!((e - e2).abs() < 1e-3, "{e} vs {e2}");
    }

    #[test]
    fn parametrization_invariance_at_fine_resolution() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let c = DiscreteCurve::sample(2, 4000, |t| {
            vec![2.0 * t - 1.0, 0.3 * (std::f64::consts::PI * t).sin()]
        })
        .unwrap();
        let e = weighted_length(&c, &pot).unwrap();
        for n in [4000usize, 8000] {
            let r = resample_uniform_arclength(&c, n).unwrap();
            let er = weighted_length(&r, &pot).unwrap();
            assert!(
                (er - e).abs() <= 1e-6 * e.abs(),
                "n = {n}: {er} vs {e}, rel {}",
                ((er - e) / e).abs()
            );
        }
    }

    #[test]
    fn zero_length_resample_returns_constant_curve() {
        let c = DiscreteCurve::from_nodes(vec![vec![1.0, 2.0]; 4]).unwrap();
        let r = resample_uniform_arclength(&c, 8).unwrap();
        assert_eq!(r.node_count(), 9);
        for node in r.nodes() {
            assert_eq!(node, &[1.0, 2.0]);
        }
    }

    #[test]
    fn degenerate_arclength_matches_uniform_for_constant_factor() {
        let pot = flat_hook(2);
        let c = DiscreteCurve::straight_segment(&[0.0, 0.0], &[1.0, 1.0], 50).unwrap();
        let uni = resample_uniform_arclength(&c, 20).unwrap();
        let deg = reparametrize_degenerate_arclength(&c, &pot, 20).unwrap();
        for i in 0..=20 {
            assert!(dist(uni.node(i), deg.node(i)) < 1e-10);
        }
    }

    #[test]
    fn degenerate_arclength_equalizes_segment_energies() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let fine = DiscreteCurve::straight_segment(&[-1.0, 0.0], &[1.0, 0.0], 12000).unwrap();
        let n = 3000;
        let reparam = reparametrize_degenerate_arclength(&fine, &pot, n).unwrap();
        let e = weighted_length(&reparam, &pot).unwrap();
        let share = e / n as f64;
        for i in 0..n {
            let seg = reparam.slice(i, i + 1).unwrap();
            let es = weighted_length(&seg, &pot).unwrap();
            assert!(
                (es - share).abs() <= 1e-6 * e,
                "segment {i}: {es} vs share {share}"
            );
        }
    }

    #[test]
    fn degenerate_arclength_rejects_interior_wells() {
        let pot = Potential::alikakos_fusco(0.3);
        // polyline through the middle well (0, 0.3), with a node exactly on it
        let c = DiscreteCurve::from_nodes(vec![
            vec![-1.0, 0.0],
            vec![-0.5, 0.15],
            vec![0.0, 0.3],
            vec![0.5, 0.15],
            vec![1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            reparametrize_degenerate_arclength(&c, &pot, 10),
            Err(Error::DegenerateInterior { .. })
        ));
    }

    #[test]
    fn min_distance_to_wells_records_zero_at_passage() {
        let pot = Potential::alikakos_fusco(0.3);
        let c = DiscreteCurve::from_nodes(vec![
            vec![-1.0, 0.0],
            vec![0.0, 0.3],
            vec![1.0, 0.0],
        ])
        .unwrap();
        let prox = min_distance_to_wells(&c, &pot).unwrap();
        assert_eq!(prox[2].distance, 0.0);
        assert_eq!(prox[2].nearest_node, 1);
    }

    #[test]
    fn six_well_axis_distance_to_p3_is_one() {
        // closest point of the axis segment to (0, 1/sqrt2, 1/sqrt2) is the
        // origin, at distance 1; an interior projection, not a node hit
        let pot = Potential::six_well();
        let c =
            DiscreteCurve::straight_segment(&[-1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 11).unwrap();
        let prox = min_distance_to_wells(&c, &pot).unwrap();
        assert!((prox[2].distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detour_curve_stays_away_from_lower_wells() {
        let pot = Potential::six_well();
        let eps = 0.96;
        let c = DiscreteCurve::sample(3, 512, |t| {
            let mu = 2.0 * t - 1.0;
            let b = eps / 2.0f64.sqrt() * (1.0 - mu * mu);
            vec![mu, b, b]
        })
        .unwrap();
        let prox = min_distance_to_wells(&c, &pot).unwrap();
        assert!(prox[4].distance > 0.5);
        assert!(prox[5].distance > 0.5);
    }

    #[test]
    fn additivity_holds_to_rounding() {
        let pot = Potential::alikakos_fusco(0.5);
        let c = DiscreteCurve::sample(2, 517, |t| {
            vec![2.0 * t - 1.0, 0.5 * (2.7 * t).sin()]
        })
        .unwrap();
        let e = weighted_length(&c, &pot).unwrap();
        for split in [1, 100, 258, 516] {
            let left = c.slice(0, split).unwrap();
            let right = c.slice(split, c.node_count() - 1).unwrap();
            let sum = weighted_length(&left, &pot).unwrap()
                + weighted_length(&right, &pot).unwrap();
            assert!(
                (sum - e).abs() <= 1e-15 * (1.0 + e),
                "split {split}: {sum} vs {e}"
            );
        }
    }

    proptest! {
        #[test]
        fn reversal_invariance_random_curves(seed in 0u64..32) {
            let pot = Potential::double_well(1.0, 2).unwrap();
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let n = 3 + (seed as usize % 40);
            let nodes: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 2.0 - 1.0])
                .collect();
            let c = DiscreteCurve::from_nodes(nodes).unwrap();
            let e = weighted_length(&c, &pot).unwrap();
            let er = weighted_length(&c.reversed(), &pot).unwrap();
            prop_assert_eq!(e, er);
            prop_assert_eq!(euclidean_length(&c), euclidean_length(&c.reversed()));
        }
    }
}
