//! The well-to-well distance matrix in the degenerate metric, the
//! triangle-inequality obstruction analysis, and the splitting of geodesics
//! at interior well passages.
//!
//! A pair `(j, k)` whose distance satisfies
//! `d(j, k) = d(j, l) + d(l, k)` for some intermediate well `l` is the
//! candidate obstruction case: the minimizing geodesic passes through `l`
//! and yields no direct heteroclinic connection between `j` and `k`.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{resample_uniform_arclength, weighted_length, DiscreteCurve};
use crate::error::Error;
use crate::geodesic::{minimize_e, GeodesicResult, SolveOptions};
use crate::potential::Potential;
use crate::vecmath::point_segment_distance;
use crate::Result;

/// Relative slack (of the largest matrix entry) below which a negative
/// triangle defect triggers the automatic re-solve of the direct pair.
const RESOLVE_REL_TOL: f64 = 1e-3;

/// Result of one unordered pair solve inside a [`DistanceMatrix`].
#[derive(Debug, Clone)]
pub struct PairEntry {
    pub j: usize,
    pub k: usize,
    pub result: Option<GeodesicResult>,
    /// Error message when the solve failed; the matrix is still returned.
    pub error: Option<String>,
}

/// Symmetric matrix of well-to-well distances with per-pair solver results.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    pub entries: Vec<Vec<f64>>,
    pub pairs: Vec<PairEntry>,
    /// Pairs whose direct solve was repeated from a concatenated detour seed
    /// after a triangle violation.
    pub resolved_pairs: Vec<(usize, usize)>,
    pub options: SolveOptions,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j][k]
    }

    pub fn pair(&self, j: usize, k: usize) -> Option<&PairEntry> {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        self.pairs.iter().find(|p| p.j == a && p.k == b)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &v| acc.max(v))
    }
}

/// Distance between two wells: the best solver energy over restarts.
pub fn distance(
    pot: &Potential,
    j: usize,
    k: usize,
    opts: &SolveOptions,
) -> Result<(f64, GeodesicResult)> {
    if j == k {
        return Err(Error::InvalidArgument(
            "distance requires two distinct wells".into(),
        ));
    }
    let p = pot.well_point(j)?.to_vec();
    let q = pot.well_point(k)?.to_vec();
    let result = minimize_e(pot, &p, &q, opts)?;
    Ok((result.energy, result))
}

/// Solves each unordered pair once and assembles the symmetric matrix
/// (diagonal exactly zero, `d[j][k]` bitwise equal to `d[k][j]`). Solver
/// failures flag the affected entry; triangle violations trigger one re-solve
/// of the offending direct pair seeded with the concatenated detour path.
pub fn distance_matrix(pot: &Potential, opts: &SolveOptions) -> Result<DistanceMatrix> {
    let m = pot.wells().len();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "distance matrix needs at least 2 wells".into(),
        ));
    }
    let index_pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|j| ((j + 1)..m).map(move |k| (j, k)))
        .collect();
    let mut pairs: Vec<PairEntry> = index_pairs
        .par_iter()
        .map(|&(j, k)| match distance(pot, j, k, opts) {
            Ok((_, result)) => PairEntry {
                j,
                k,
                result: Some(result),
                error: None,
            },
            Err(e) => PairEntry {
                j,
                k,
                result: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut entries = assemble(m, &pairs);
    let scale = entries
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| if v.is_finite() { acc.max(v) } else { acc });
    let retol = RESOLVE_REL_TOL * scale.max(1e-12);

    // one automatic re-solve per violated direct pair: the concatenation
    // through the best intermediate well is a certified better initial guess
    let mut resolved_pairs = Vec::new();
    for idx in 0..pairs.len() {
        let (j, k) = (pairs[idx].j, pairs[idx].k);
        if pairs[idx].result.is_none() {
            continue;
        }
        let mut best_via: Option<(usize, f64)> = None;
        for l in 0..m {
            if l == j || l == k {
                continue;
            }
            let slack = entries[j][l] + entries[l][k] - entries[j][k];
            if slack.is_finite() && slack < -retol {
                if best_via.map_or(true, |(_, s)| slack < s) {
                    best_via = Some((l, slack));
                }
            }
        }
        let Some((l, _)) = best_via else { continue };
        let (Some(first), Some(second)) = (
            self_oriented_curve(&pairs, j, l),
            self_oriented_curve(&pairs, l, k),
        ) else {
            continue;
        };
        let seed = concatenate(&first, &second);
        let reopts = SolveOptions {
            bump_restarts: 0,
            extra_initial_paths: vec![seed],
            ..opts.clone()
        };
        let p = pot.well_point(j)?.to_vec();
        let q = pot.well_point(k)?.to_vec();
        if let Ok(re) = minimize_e(pot, &p, &q, &reopts) {
            if re.energy < entries[j][k] {
                pairs[idx].result = Some(re);
                resolved_pairs.push((j, k));
            }
        }
    }
    if !resolved_pairs.is_empty() {
        entries = assemble(m, &pairs);
    }

    Ok(DistanceMatrix {
        entries,
        pairs,
        resolved_pairs,
        options: opts.clone(),
    })
}

fn assemble(m: usize, pairs: &[PairEntry]) -> Vec<Vec<f64>> {
    let mut entries = vec![vec![0.0; m]; m];
    for pair in pairs {
        let value = pair
            .result
            .as_ref()
            .map(|r| r.energy)
            .unwrap_or(f64::INFINITY);
        entries[pair.j][pair.k] = value;
        entries[pair.k][pair.j] = value;
    }
    entries
}

/// Curve of pair `(a, b)` oriented from well `a` to well `b`.
fn self_oriented_curve(pairs: &[PairEntry], a: usize, b: usize) -> Option<DiscreteCurve> {
    let (j, k) = if a < b { (a, b) } else { (b, a) };
    let entry = pairs.iter().find(|p| p.j == j && p.k == k)?;
    let curve = &entry.result.as_ref()?.curve;
    Some(if a < b { curve.clone() } else { curve.reversed() })
}

fn concatenate(a: &DiscreteCurve, b: &DiscreteCurve) -> DiscreteCurve {
    let mut nodes: Vec<Vec<f64>> = a.nodes().map(|n| n.to_vec()).collect();
    nodes.extend(b.nodes().skip(1).map(|n| n.to_vec()));
    DiscreteCurve::from_nodes(nodes).expect("concatenation of valid curves")
}

// ---------------------------------------------------------------------------
// Obstruction report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairClass {
    /// Every intermediate well leaves positive slack: a direct heteroclinic
    /// connection is unobstructed.
    Strict,
    /// Some intermediate well saturates the triangle inequality within
    /// tolerance: the candidate non-existence obstruction.
    Degenerate,
    /// Some detour is strictly shorter than the direct solve: the direct
    /// entry missed a shortcut and should be re-solved.
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleSlack {
    pub j: usize,
    pub k: usize,
    pub via: usize,
    /// `d[j][via] + d[via][k] - d[j][k]`.
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairClassification {
    pub j: usize,
    pub k: usize,
    pub class: PairClass,
    pub min_slack: Option<f64>,
    pub min_via: Option<usize>,
}

/// Triangle-inequality analysis of a distance matrix at tolerance `tol`.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub triples: Vec<TriangleSlack>,
    pub pairs: Vec<PairClassification>,
    pub tol: f64,
}

/// Classifies every unordered pair by its minimal triangle slack. The
/// classification is a pure function of the matrix values and `tol`.
pub fn obstruction_report(dm: &DistanceMatrix, tol: f64) -> Result<ObstructionReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let m = dm.size();
    let mut triples = Vec::new();
    let mut pairs = Vec::new();
    for j in 0..m {
        for k in (j + 1)..m {
            let mut min_slack: Option<f64> = None;
            let mut min_via = None;
            for via in 0..m {
                if via == j || via == k {
                    continue;
                }
                let slack = dm.entries[j][via] + dm.entries[via][k] - dm.entries[j][k];
                triples.push(TriangleSlack { j, k, via, slack });
                if min_slack.map_or(true, |s| slack < s) {
                    min_slack = Some(slack);
                    min_via = Some(via);
                }
            }
            let class = match min_slack {
                None => PairClass::Strict, // no intermediate well exists
                Some(s) if s < -tol => PairClass::Violated,
                Some(s) if s <= tol => PairClass::Degenerate,
                Some(_) => PairClass::Strict,
            };
            pairs.push(PairClassification {
                j,
                k,
                class,
                min_slack,
                min_via,
            });
        }
    }
    Ok(ObstructionReport { triples, pairs, tol })
}

// ---------------------------------------------------------------------------
// Well splitting
// ---------------------------------------------------------------------------

/// A geodesic decomposed at its well passages: passage times
/// `0 = t_1 < ... < t_J = 1` (normalized arc length), the wells visited, and
/// the sub-arcs between consecutive passages.
#[derive(Debug, Clone)]
pub struct WellSplit {
    pub passage_times: Vec<f64>,
    pub visited_wells: Vec<usize>,
    pub sub_arcs: Vec<DiscreteCurve>,
    /// The parent curve with passage nodes inserted and snapped exactly onto
    /// the wells; the sub-arcs partition it node-for-node.
    pub parent: DiscreteCurve,
    pub well_radius: f64,
}

/// Splits a solved geodesic at its well passages. `well_radius` defaults to
/// `1e-3` times the minimal pairwise well separation.
pub fn split_at_wells(
    gr: &GeodesicResult,
    pot: &Potential,
    well_radius: Option<f64>,
) -> Result<WellSplit> {
    split_curve_at_wells(&gr.curve, pot, well_radius)
}

/// [`split_at_wells`] on a bare curve whose endpoints lie on wells.
pub fn split_curve_at_wells(
    curve: &DiscreteCurve,
    pot: &Potential,
    well_radius: Option<f64>,
) -> Result<WellSplit> {
    crate::curve::check_curve_dim(curve, pot)?;
    let radius = match well_radius {
        Some(r) if r > 0.0 => r,
        Some(_) => {
            return Err(Error::InvalidArgument("well_radius must be positive".into()))
        }
        None => 1e-3 * pot.min_well_separation(),
    };
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidArgument(
            "cannot derive a well radius (fewer than two wells?)".into(),
        ));
    }

    // nearest well within radius per segment; two wells on one segment is a
    // geometry error (the radius is too coarse for the well separation)
    let segs = curve.segment_count();
    let mut marks: Vec<Option<(usize, f64, f64)>> = vec![None; segs]; // (well, dist, tau)
    for i in 0..segs {
        let a = curve.node(i);
        let b = curve.node(i + 1);
        for well in pot.wells() {
            let (d, tau) = point_segment_distance(&well.point, a, b);
            if d <= radius {
                if let Some((other, ..)) = marks[i] {
                    if other != well.index {
                        return Err(Error::Geometry(format!(
                            "segment {i} lies within {radius} of wells {other} and {}; \
                             wells are too close for this radius",
                            well.index
                        )));
                    }
                    // keep the closer approach
                    if d < marks[i].unwrap().1 {
                        marks[i] = Some((well.index, d, tau));
                    }
                } else {
                    marks[i] = Some((well.index, d, tau));
                }
            }
        }
    }
    if marks[0].is_none() || marks[segs - 1].is_none() {
        return Err(Error::Geometry(
            "curve endpoints do not lie within the well radius of any well".into(),
        ));
    }

    // group consecutive segments marked for the same well; each group
    // collapses to a single passage at its closest approach
    struct Passage {
        well: usize,
        seg: usize,
        tau: f64,
    }
    let mut passages: Vec<Passage> = Vec::new();
    let mut i = 0usize;
    while i < segs {
        let Some((well, mut best_d, mut best_tau)) = marks[i] else {
            i += 1;
            continue;
        };
        let mut best_seg = i;
        let mut jx = i + 1;
        while jx < segs {
            match marks[jx] {
                Some((w, d, tau)) if w == well => {
                    if d < best_d {
                        best_d = d;
                        best_tau = tau;
                        best_seg = jx;
                    }
                    jx += 1;
                }
                _ => break,
            }
        }
        passages.push(Passage {
            well,
            seg: best_seg,
            tau: best_tau,
        });
        i = jx;
    }
    // pin the endpoint passages to the exact curve ends
    passages.first_mut().map(|p| {
        p.seg = 0;
        p.tau = 0.0;
    });
    passages.last_mut().map(|p| {
        p.seg = segs - 1;
        p.tau = 1.0;
    });
    // drop repeated consecutive visits of the same well (re-entries)
    passages.dedup_by(|b, a| a.well == b.well);
    if passages.len() < 2 {
        return Err(Error::Geometry(
            "fewer than two well passages found; endpoints must lie on distinct wells".into(),
        ));
    }

    // rebuild the polyline with passage nodes inserted and snapped onto wells
    let dim = curve.dimension();
    let mut data: Vec<f64> = Vec::with_capacity((curve.node_count() + passages.len()) * dim);
    let mut passage_nodes: Vec<(usize, usize)> = Vec::new(); // (new node idx, well)
    let mut pass_iter = passages.iter().peekable();
    for i in 0..curve.node_count() {
        if i > 0 {
            // insert strict-interior passages of segment i-1
            while let Some(p) = pass_iter.peek() {
                if p.seg == i - 1 && p.tau > 0.0 && p.tau < 1.0 {
                    passage_nodes.push((data.len() / dim, p.well));
                    data.extend_from_slice(pot.well_point(p.well)?);
                    pass_iter.next();
                } else {
                    break;
                }
            }
        }
        let mut node = curve.node(i).to_vec();
        while let Some(p) = pass_iter.peek() {
            let at_node = (p.seg == i && p.tau == 0.0) || (i > 0 && p.seg == i - 1 && p.tau >= 1.0);
            if at_node {
                node = pot.well_point(p.well)?.to_vec();
                passage_nodes.push((data.len() / dim, p.well));
                pass_iter.next();
            } else {
                break;
            }
        }
        data.extend_from_slice(&node);
    }
    let parent = DiscreteCurve::from_flat(dim, data)?;

    let cum = parent.cumulative_lengths();
    let total = *cum.last().unwrap();
    let mut passage_times = Vec::with_capacity(passage_nodes.len());
    let mut visited_wells = Vec::with_capacity(passage_nodes.len());
    for &(node_idx, well) in &passage_nodes {
        passage_times.push(if total > 0.0 { cum[node_idx] / total } else { 0.0 });
        visited_wells.push(well);
    }
    if let Some(t) = passage_times.first_mut() {
        *t = 0.0;
    }
    if let Some(t) = passage_times.last_mut() {
        *t = 1.0;
    }

    let mut sub_arcs = Vec::with_capacity(passage_nodes.len() - 1);
    for w in passage_nodes.windows(2) {
        sub_arcs.push(parent.slice(w[0].0, w[1].0)?);
    }

    Ok(WellSplit {
        passage_times,
        visited_wells,
        sub_arcs,
        parent,
        well_radius: radius,
    })
}

/// Sum of the sub-arc weighted lengths (diagnostic; equals the weighted
/// length of the snapped parent by additivity).
pub fn split_energy_sum(split: &WellSplit, pot: &Potential) -> Result<f64> {
    let mut total = 0.0;
    for arc in &split.sub_arcs {
        total += weighted_length(arc, pot)?;
    }
    Ok(total)
}

/// Resamples a solved curve to `segments` before splitting; passage-node
/// insertion perturbs the midpoint quadrature at `O(h^2)`, so consistency
/// checks run at verification resolution.
pub fn split_at_wells_resampled(
    gr: &GeodesicResult,
    pot: &Potential,
    well_radius: Option<f64>,
    segments: usize,
) -> Result<WellSplit> {
    let fine = resample_uniform_arclength(&gr.curve, segments)?;
    split_curve_at_wells(&fine, pot, well_radius)
}
