//! Multi-well potentials `W: R^N -> [0, inf)` with exact gradients, the
//! built-in example families, and sampling probes for the structural
//! assumptions the solver relies on (isolated zero set, positive liminf at
//! infinity, quadratic control near the wells).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::Error;
use crate::expr::ExprAst;
use crate::vecmath::dist;
use crate::Result;

/// Evaluation tolerance below which a listed well counts as a zero of `W`.
pub const WELL_ZERO_TOL: f64 = 1e-12;

/// Radius below which the oscillatory gradient falls back to one-sided
/// differences: `grad W` has no limit at the wells of that family.
const OSC_NEAR_WELL_RADIUS: f64 = 1e-6;

/// A zero of the potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Well {
    pub index: usize,
    pub point: Vec<f64>,
}

/// How the gradient of a [`Potential`] is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GradientSource {
    /// Closed-form gradient of a built-in family.
    Analytic,
    /// Forward-mode dual-number differentiation of a parsed expression.
    Autodiff,
    /// Central (or near wells, one-sided) finite differences.
    FiniteDifference,
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    DoubleWell { lambda: f64 },
    AlikakosFusco { eps: f64 },
    SixWell,
    Oscillatory { p1: Vec<f64>, p2: Vec<f64> },
    Expression { ast: Arc<ExprAst> },
    Scaled { factor: f64, inner: Arc<Potential> },
    Custom { eval: EvalFn, grad: Option<GradFn> },
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::DoubleWell { lambda } => write!(f, "DoubleWell {{ lambda: {lambda} }}"),
            Kind::AlikakosFusco { eps } => write!(f, "AlikakosFusco {{ eps: {eps} }}"),
            Kind::SixWell => write!(f, "SixWell"),
            Kind::Oscillatory { p1, p2 } => write!(f, "Oscillatory {{ p1: {p1:?}, p2: {p2:?} }}"),
            Kind::Expression { .. } => write!(f, "Expression {{ .. }}"),
            Kind::Scaled { factor, .. } => write!(f, "Scaled {{ factor: {factor}, .. }}"),
            Kind::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

/// A multi-well potential: dimension, declared wells, evaluator and gradient.
///
/// Values are immutable after construction and all evaluations are pure, so a
/// `Potential` can be shared freely across parallel workers.
#[derive(Debug, Clone)]
pub struct Potential {
    dimension: usize,
    wells: Vec<Well>,
    kind: Kind,
    gradient_source: GradientSource,
}

impl Potential {
    /// `W(p) = 1/4 (1 - p1^2)^2 + (lambda/2) * sum_{i>=2} p_i^2`,
    /// wells at `(+-1, 0, ..., 0)`.
    pub fn double_well(lambda: f64, dimension: usize) -> Result<Potential> {
        if dimension < 1 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if lambda <= 0.0 {
            return Err(Error::InvalidArgument(
                "transverse stiffness lambda must be positive".into(),
            ));
        }
        let mut minus = vec![0.0; dimension];
        let mut plus = vec![0.0; dimension];
        minus[0] = -1.0;
        plus[0] = 1.0;
        Ok(Potential {
            dimension,
            wells: make_wells(vec![minus, plus]),
            kind: Kind::DoubleWell { lambda },
            gradient_source: GradientSource::Analytic,
        })
    }

    /// The planar three-well family `W(z) = |(1 - z^2)(z - i*eps)|^2` with
    /// `z = x + iy`, expanded in real arithmetic.
    /// Wells: `(-1, 0)`, `(1, 0)`, `(0, eps)`.
    pub fn alikakos_fusco(eps: f64) -> Potential {
        Potential {
            dimension: 2,
            wells: make_wells(vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, eps]]),
            kind: Kind::AlikakosFusco { eps },
            gradient_source: GradientSource::Analytic,
        }
    }

    /// The six-well potential on `R^3`:
    /// `W = x^2 (1-x^2)^2 + (y^2 - (1-x^2)^2/2)^2 + (z^2 - (1-x^2)^2/2)^2`.
    pub fn six_well() -> Potential {
        let s = 0.5f64.sqrt();
        Potential {
            dimension: 3,
            wells: make_wells(vec![
                vec![-1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, s, s],
                vec![0.0, s, -s],
                vec![0.0, -s, -s],
                vec![0.0, -s, s],
            ]),
            kind: Kind::SixWell,
            gradient_source: GradientSource::Analytic,
        }
    }

    /// `W(p) = prod_j (2 + sin(1/|p - p_j|)) |p - p_j|^2`, a two-well family
    /// whose gradient oscillates without limit at the wells. The removable
    /// singularity at each well is defined by continuity as 0, and the
    /// gradient within [`OSC_NEAR_WELL_RADIUS`] of a well is a one-sided
    /// finite difference.
    pub fn oscillatory(p1: Vec<f64>, p2: Vec<f64>) -> Result<Potential> {
        if p1.len() != p2.len() || p1.is_empty() {
            return Err(Error::InvalidArgument(
                "oscillatory wells must share a positive dimension".into(),
            ));
        }
        if p1 == p2 {
            return Err(Error::InvalidArgument("wells must be distinct".into()));
        }
        Ok(Potential {
            dimension: p1.len(),
            wells: make_wells(vec![p1.clone(), p2.clone()]),
            kind: Kind::Oscillatory { p1, p2 },
            gradient_source: GradientSource::Analytic,
        })
    }

    /// Potential defined by a parsed scalar expression; gradient by
    /// forward-mode dual numbers. The well list is declared, not discovered:
    /// use [`validate_assumptions`] to probe it.
    pub fn from_expression(text: &str, dimension: usize, wells: Vec<Vec<f64>>) -> Result<Potential> {
        let ast = crate::expr::parse_expression(text, dimension)?;
        for w in &wells {
            if w.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: w.len(),
                });
            }
        }
        Ok(Potential {
            dimension,
            wells: make_wells(wells),
            kind: Kind::Expression { ast: Arc::new(ast) },
            gradient_source: GradientSource::Autodiff,
        })
    }

    /// Potential backed by arbitrary closures. Used for test hooks (flat
    /// metrics, injected defects); when `grad` is `None` the gradient is a
    /// central finite difference.
    pub fn custom(
        dimension: usize,
        wells: Vec<Vec<f64>>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: Option<GradFn>,
    ) -> Potential {
        let gradient_source = if grad.is_some() {
            GradientSource::Analytic
        } else {
            GradientSource::FiniteDifference
        };
        Potential {
            dimension,
            wells: make_wells(wells),
            kind: Kind::Custom {
                eval: Arc::new(eval),
                grad,
            },
            gradient_source,
        }
    }

    /// The potential `factor * W` (conformal rescaling; `factor = c^2` scales
    /// the induced metric by `c`). Both `W` and `grad W` are multiplied by the
    /// same floating-point factor, so the scaling is bit-exact.
    pub fn scaled(&self, factor: f64) -> Potential {
        Potential {
            dimension: self.dimension,
            wells: self.wells.clone(),
            kind: Kind::Scaled {
                factor,
                inner: Arc::new(self.clone()),
            },
            gradient_source: self.gradient_source,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn wells(&self) -> &[Well] {
        &self.wells
    }

    pub fn well_point(&self, index: usize) -> Result<&[f64]> {
        self.wells
            .get(index)
            .map(|w| w.point.as_slice())
            .ok_or_else(|| Error::InvalidArgument(format!("no well with index {index}")))
    }

    pub fn gradient_source(&self) -> GradientSource {
        self.gradient_source
    }

    /// Smallest pairwise Euclidean separation between listed wells.
    pub fn min_well_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.wells.iter().enumerate() {
            for b in &self.wells[i + 1..] {
                best = best.min(dist(&a.point, &b.point));
            }
        }
        best
    }

    /// Evaluates `W(p)`.
    pub fn eval_w(&self, p: &[f64]) -> Result<f64> {
        self.check_dim(p)?;
        let w = self.w(p);
        if w.is_nan() {
            return Err(Error::Eval("potential evaluated to NaN".into()));
        }
        Ok(w)
    }

    /// Evaluates `grad W(p)`.
    pub fn eval_grad_w(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        match &self.kind {
            // propagate expression errors (division by zero, |.| at 0, ...)
            Kind::Expression { ast } => {
                let mut g = vec![0.0; self.dimension];
                let mut seed = vec![0.0; self.dimension];
                for i in 0..self.dimension {
                    seed[i] = 1.0;
                    g[i] = crate::expr::eval_dual(ast, p, &seed)?.derivative;
                    seed[i] = 0.0;
                }
                Ok(g)
            }
            _ => {
                let mut g = vec![0.0; self.dimension];
                self.grad_w_into(p, &mut g);
                Ok(g)
            }
        }
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Unchecked fast path. Expression evaluation failures surface as NaN so
    /// the solver's NaN guard can report them.
    pub(crate) fn w(&self, p: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), self.dimension);
        match &self.kind {
            Kind::DoubleWell { lambda } => {
                let a = 1.0 - p[0] * p[0];
                let mut w = 0.25 * a * a;
                for &x in &p[1..] {
                    w += 0.5 * lambda * x * x;
                }
                w
            }
            Kind::AlikakosFusco { eps } => {
                let (u, v) = af_uv(p[0], p[1], *eps);
                u * u + v * v
            }
            Kind::SixWell => {
                let (x, y, z) = (p[0], p[1], p[2]);
                let a = 1.0 - x * x;
                let ty = y * y - 0.5 * a * a;
                let tz = z * z - 0.5 * a * a;
                x * x * a * a + ty * ty + tz * tz
            }
            Kind::Oscillatory { p1, p2 } => osc_term(p, p1) * osc_term(p, p2),
            Kind::Expression { ast } => crate::expr::eval(ast, p).unwrap_or(f64::NAN),
            Kind::Scaled { factor, inner } => factor * inner.w(p),
            Kind::Custom { eval, .. } => eval(p),
        }
    }

    pub(crate) fn grad_w_into(&self, p: &[f64], out: &mut [f64]) {
        debug_assert_eq!(p.len(), self.dimension);
        debug_assert_eq!(out.len(), self.dimension);
        match &self.kind {
            Kind::DoubleWell { lambda } => {
                out[0] = -p[0] * (1.0 - p[0] * p[0]);
                for i in 1..p.len() {
                    out[i] = lambda * p[i];
                }
            }
            Kind::AlikakosFusco { eps } => {
                let (x, y, e) = (p[0], p[1], *eps);
                let (u, v) = af_uv(x, y, e);
                let ux = 1.0 - 3.0 * x * x + 3.0 * y * y - 2.0 * e * y;
                let uy = 6.0 * x * y - 2.0 * e * x;
                // Cauchy-Riemann: v_x = -u_y, v_y = u_x
                out[0] = 2.0 * (u * ux - v * uy);
                out[1] = 2.0 * (u * uy + v * ux);
            }
            Kind::SixWell => {
                let (x, y, z) = (p[0], p[1], p[2]);
                let a = 1.0 - x * x;
                let ty = y * y - 0.5 * a * a;
                let tz = z * z - 0.5 * a * a;
                out[0] = 2.0 * x * a * a - 4.0 * x * x * x * a + 4.0 * x * a * (ty + tz);
                out[1] = 4.0 * y * ty;
                out[2] = 4.0 * z * tz;
            }
            Kind::Oscillatory { p1, p2 } => {
                let r1 = dist(p, p1);
                let r2 = dist(p, p2);
                // the wells themselves are differentiable points with zero
                // gradient (W <= 3 C r^2), even though grad W has no limit
                // approaching them
                if r1 < 1e-12 || r2 < 1e-12 {
                    out.fill(0.0);
                    return;
                }
                if r1 < OSC_NEAR_WELL_RADIUS || r2 < OSC_NEAR_WELL_RADIUS {
                    one_sided_fd(self, p, out);
                    return;
                }
                let t1 = osc_term(p, p1);
                let t2 = osc_term(p, p2);
                let d1 = osc_term_radial_derivative(r1);
                let d2 = osc_term_radial_derivative(r2);
                for i in 0..p.len() {
                    out[i] = t2 * d1 * (p[i] - p1[i]) / r1 + t1 * d2 * (p[i] - p2[i]) / r2;
                }
            }
            Kind::Expression { ast } => {
                let mut seed = vec![0.0; p.len()];
                for i in 0..p.len() {
                    seed[i] = 1.0;
                    out[i] = match crate::expr::eval_dual(ast, p, &seed) {
                        Ok(d) => d.derivative,
                        Err(_) => f64::NAN,
                    };
                    seed[i] = 0.0;
                }
            }
            Kind::Scaled { factor, inner } => {
                inner.grad_w_into(p, out);
                for g in out.iter_mut() {
                    *g *= factor;
                }
            }
            Kind::Custom { grad, .. } => match grad {
                Some(g) => out.copy_from_slice(&g(p)),
                None => central_fd(self, p, out),
            },
        }
    }
}

fn make_wells(points: Vec<Vec<f64>>) -> Vec<Well> {
    points
        .into_iter()
        .enumerate()
        .map(|(index, point)| Well { index, point })
        .collect()
}

#[inline]
fn af_uv(x: f64, y: f64, eps: f64) -> (f64, f64) {
    // real and imaginary parts of (1 - z^2)(z - i*eps), z = x + iy
    let u = x - x * x * x + 3.0 * x * y * y - 2.0 * eps * x * y;
    let v = y - eps - 3.0 * x * x * y + eps * x * x + y * y * y - eps * y * y;
    (u, v)
}

#[inline]
fn osc_term(p: &[f64], well: &[f64]) -> f64 {
    let r = dist(p, well);
    if r < 1e-300 {
        return 0.0;
    }
    (2.0 + (1.0 / r).sin()) * r * r
}

#[inline]
fn osc_term_radial_derivative(r: f64) -> f64 {
    -(1.0 / r).cos() + 2.0 * r * (2.0 + (1.0 / r).sin())
}

/// Central finite difference with step `1e-6 * max(1, |p|)`.
pub(crate) fn central_fd(pot: &Potential, p: &[f64], out: &mut [f64]) {
    let h = fd_step(p);
    let mut q = p.to_vec();
    for i in 0..p.len() {
        q[i] = p[i] + h;
        let wp = pot.w(&q);
        q[i] = p[i] - h;
        let wm = pot.w(&q);
        q[i] = p[i];
        out[i] = (wp - wm) / (2.0 * h);
    }
}

fn one_sided_fd(pot: &Potential, p: &[f64], out: &mut [f64]) {
    let h = fd_step(p);
    let w0 = pot.w(p);
    let mut q = p.to_vec();
    for i in 0..p.len() {
        q[i] = p[i] + h;
        out[i] = (pot.w(&q) - w0) / h;
        q[i] = p[i];
    }
}

fn fd_step(p: &[f64]) -> f64 {
    1e-6 * crate::vecmath::norm(p).max(1.0)
}

// ---------------------------------------------------------------------------
// Assumption probes
// ---------------------------------------------------------------------------

/// Sampling configuration for [`validate_assumptions`].
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionProbe {
    /// Radius of the sphere on which the liminf of `W` is estimated.
    pub sphere_radius: f64,
    pub sphere_samples: usize,
    /// Samples scattered over the well bounding box for the zero-set scan.
    pub space_samples: usize,
    /// Radius of the per-well ball for the quadratic-bound fit.
    pub delta_probe: f64,
    pub well_samples: usize,
    /// Lowest-`W` samples refined by local descent when hunting for
    /// undeclared zeros.
    pub refine_candidates: usize,
    pub seed: u64,
}

impl Default for AssumptionProbe {
    fn default() -> Self {
        AssumptionProbe {
            sphere_radius: 10.0,
            sphere_samples: 1000,
            space_samples: 4000,
            delta_probe: 0.1,
            well_samples: 400,
            refine_candidates: 5,
            seed: 0,
        }
    }
}

/// A point where the zero-set assumption fails.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSetViolation {
    pub point: Vec<f64>,
    pub w: f64,
    /// True when a listed well fails to be a zero; false for an undeclared
    /// zero found away from the well list.
    pub listed_well: bool,
}

/// Least-squares and worst-case constants of `W(p) <= C |p - p_j|^2` near a
/// well, fitted over samples in a `delta`-ball.
#[derive(Debug, Clone, Serialize)]
pub struct WellQuadraticFit {
    pub well: usize,
    pub c_fit: f64,
    pub c_max: f64,
    pub delta: f64,
}

/// Sampled evidence for the structural assumptions. A passing report means
/// "no violation found among samples", never a proof.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub a1_zero_set_ok: bool,
    pub a1_worst_violation: Option<ZeroSetViolation>,
    pub a2_liminf_estimate: f64,
    pub a4_quadratic_bound: Vec<WellQuadraticFit>,
    pub notes: Vec<String>,
}

/// Probes the zero set (A1), the behavior at infinity (A2) and the quadratic
/// well bound (A4) by sampling. Inconclusive probes are flagged in `notes`.
pub fn validate_assumptions(pot: &Potential, probe: &AssumptionProbe) -> AssumptionReport {
    let n = pot.dimension();
    let mut rng = rand::rngs::StdRng::seed_from_u64(probe.seed);
    let mut notes = Vec::new();

    // A1, part one: every listed well is a zero.
    let mut worst: Option<ZeroSetViolation> = None;
    for well in pot.wells() {
        let w = pot.w(&well.point);
        if !(w.abs() <= WELL_ZERO_TOL) {
            let v = ZeroSetViolation {
                point: well.point.clone(),
                w,
                listed_well: true,
            };
            if worst.as_ref().map_or(true, |cur| w > cur.w) {
                worst = Some(v);
            }
        }
    }

    // A1, part two: scatter samples over the well bounding box, refine the
    // lowest ones by descent, and flag converged zeros away from the list.
    if pot.wells().is_empty() {
        notes.push("no wells declared; zero-set scan skipped".into());
    } else if worst.is_none() {
        let (lo, hi) = well_bounding_box(pot);
        let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(probe.space_samples);
        for _ in 0..probe.space_samples {
            let p: Vec<f64> = (0..n)
                .map(|i| lo[i] + rng.gen::<f64>() * (hi[i] - lo[i]))
                .collect();
            if nearest_well_distance(pot, &p) > probe.delta_probe {
                samples.push((pot.w(&p), p));
            }
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        for (_, start) in samples.into_iter().take(probe.refine_candidates) {
            if let Some(zero) = refine_to_zero(pot, &start) {
                if nearest_well_distance(pot, &zero) > probe.delta_probe {
                    let w = pot.w(&zero);
                    worst = Some(ZeroSetViolation {
                        point: zero,
                        w,
                        listed_well: false,
                    });
                    break;
                }
            }
        }
    }
    let a1_ok = worst.is_none();

    // A2: sampled infimum of W on the sphere |p| = sphere_radius.
    let mut a2 = f64::INFINITY;
    for _ in 0..probe.sphere_samples.max(1) {
        let dir = random_unit(&mut rng, n);
        let p: Vec<f64> = dir.iter().map(|d| d * probe.sphere_radius).collect();
        a2 = a2.min(pot.w(&p));
    }
    if a2 <= 0.0 {
        notes.push(format!(
            "W vanishes on the probe sphere |p| = {}; liminf evidence inconclusive",
            probe.sphere_radius
        ));
    }

    // A4: fit W ~ C r^2 over a delta-ball around each well.
    let mut fits = Vec::with_capacity(pot.wells().len());
    for well in pot.wells() {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut c_max = 0.0f64;
        let mut ok = true;
        for _ in 0..probe.well_samples.max(1) {
            let dir = random_unit(&mut rng, n);
            let r = probe.delta_probe * rng.gen::<f64>().powf(1.0 / n as f64);
            if r < 1e-12 {
                continue;
            }
            let p: Vec<f64> = well
                .point
                .iter()
                .zip(&dir)
                .map(|(c, d)| c + r * d)
                .collect();
            let w = pot.w(&p);
            if !w.is_finite() {
                ok = false;
                break;
            }
            let r2 = r * r;
            num += w * r2;
            den += r2 * r2;
            c_max = c_max.max(w / r2);
        }
        if !ok || den == 0.0 {
            notes.push(format!(
                "quadratic-bound probe inconclusive at well {}",
                well.index
            ));
            fits.push(WellQuadraticFit {
                well: well.index,
                c_fit: f64::NAN,
                c_max: f64::NAN,
                delta: probe.delta_probe,
            });
        } else {
            fits.push(WellQuadraticFit {
                well: well.index,
                c_fit: num / den,
                c_max,
                delta: probe.delta_probe,
            });
        }
    }

    notes.push("sampling evidence only: absence of violations is not a proof".into());
    AssumptionReport {
        a1_zero_set_ok: a1_ok,
        a1_worst_violation: worst,
        a2_liminf_estimate: a2,
        a4_quadratic_bound: fits,
        notes,
    }
}

fn well_bounding_box(pot: &Potential) -> (Vec<f64>, Vec<f64>) {
    let n = pot.dimension();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for w in pot.wells() {
        for i in 0..n {
            lo[i] = lo[i].min(w.point[i]);
            hi[i] = hi[i].max(w.point[i]);
        }
    }
    let spread = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| b - a)
        .fold(0.0f64, f64::max)
        .max(1.0);
    for i in 0..n {
        lo[i] -= 0.5 * spread;
        hi[i] += 0.5 * spread;
    }
    (lo, hi)
}

fn nearest_well_distance(pot: &Potential, p: &[f64]) -> f64 {
    pot.wells()
        .iter()
        .map(|w| dist(p, &w.point))
        .fold(f64::INFINITY, f64::min)
}

/// Local descent from `start`; returns the endpoint when it converges to a
/// numerical zero of `W`.
fn refine_to_zero(pot: &Potential, start: &[f64]) -> Option<Vec<f64>> {
    let n = pot.dimension();
    let mut x = start.to_vec();
    let mut w = pot.w(&x);
    let mut g = vec![0.0; n];
    for _ in 0..400 {
        if w < 1e-12 {
            break;
        }
        pot.grad_w_into(&x, &mut g);
        let gn = crate::vecmath::norm(&g);
        if !gn.is_finite() || gn == 0.0 {
            return None;
        }
        let mut step = 0.25 / gn.max(1.0);
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            let wt = pot.w(&trial);
            if wt.is_finite() && wt < w {
                x = trial;
                w = wt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if w < 1e-10 {
        Some(x)
    } else {
        None
    }
}

fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let norm = crate::vecmath::norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;

    fn builtins() -> Vec<Potential> {
        vec![
            Potential::double_well(1.0, 2).unwrap(),
            Potential::alikakos_fusco(0.3),
            Potential::six_well(),
            Potential::oscillatory(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap(),
        ]
    }

    #[test]
    fn six_well_values() {
        let pot = Potential::six_well();
        assert_eq!(pot.eval_w(&[-1.0, 0.0, 0.0]).unwrap(), 0.0);
        // 0 + 1/4 + 1/4 at the origin
        assert!((pot.eval_w(&[0.0, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn double_well_values_and_gradient() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        assert!((pot.eval_w(&[0.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
        let g = pot.eval_grad_w(&[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        // d/du [ (1-u^2)^2/4 ] = -u (1 - u^2) = -0.375 at u = 0.5
        let g = pot.eval_grad_w(&[0.5, 0.0]).unwrap();
        assert!((g[0] + 0.375).abs() < 1e-15);
    }

    #[test]
    fn alikakos_fusco_matches_complex_arithmetic() {
        // reference: |(1 - z^2)(z - i e)|^2 via explicit complex products
        let eps = 0.37;
        let pot = Potential::alikakos_fusco(eps);
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let x = rng.gen::<f64>() * 4.0 - 2.0;
            let y = rng.gen::<f64>() * 4.0 - 2.0;
            let (a, b) = (1.0 - (x * x - y * y), -2.0 * x * y);
            let (c, d) = (x, y - eps);
            let (re, im) = (a * c - b * d, a * d + b * c);
            let expected = re * re + im * im;
            let got = pot.eval_w(&[x, y]).unwrap();
            assert!(
                (got - expected).abs() <= 1e-12 * (1.0 + expected),
                "mismatch at ({x}, {y}): {got} vs {expected}"
            );
        }
    }

    #[test]
    fn wells_are_zeros_and_critical_points() {
        for pot in builtins() {
            for well in pot.wells() {
                assert!(pot.eval_w(&well.point).unwrap().abs() <= WELL_ZERO_TOL);
                let g = pot.eval_grad_w(&well.point).unwrap();
                for gi in g {
                    assert!(gi.abs() < 1e-10, "gradient {gi} at well of {pot:?}");
                }
            }
        }
    }

    #[test]
    fn positive_away_from_wells() {
        for pot in builtins() {
            let n = pot.dimension();
            let mut rng = StdRng::seed_from_u64(11);
            let mut checked = 0;
            while checked < 1000 {
                let p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 6.0 - 3.0).collect();
                if nearest_well_distance(&pot, &p) < 1e-3 {
                    continue;
                }
                assert!(pot.eval_w(&p).unwrap() > 0.0);
                checked += 1;
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        for pot in builtins() {
            let n = pot.dimension();
            let mut rng = StdRng::seed_from_u64(23);
            let mut checked = 0;
            while checked < 100 {
                let p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
                if pot.w(&p) <= 1e-6 {
                    continue;
                }
                let g = pot.eval_grad_w(&p).unwrap();
                let mut fd = vec![0.0; n];
                central_fd(&pot, &p, &mut fd);
                for i in 0..n {
                    let err = (g[i] - fd[i]).abs() / (1.0 + fd[i].abs());
                    assert!(err < 1e-5, "{pot:?} at {p:?}: {} vs {}", g[i], fd[i]);
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn scaling_is_bit_exact() {
        let pot = Potential::six_well();
        let c2 = 4.0;
        let scaled = pot.scaled(c2);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 3.0 - 1.5).collect();
            assert_eq!(scaled.eval_w(&p).unwrap(), c2 * pot.eval_w(&p).unwrap());
            let g = pot.eval_grad_w(&p).unwrap();
            let gs = scaled.eval_grad_w(&p).unwrap();
            for i in 0..3 {
                assert_eq!(gs[i], c2 * g[i]);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_argument_error() {
        let pot = Potential::six_well();
        assert!(matches!(
            pot.eval_w(&[0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(pot.eval_grad_w(&[0.0]).is_err());
    }

    #[test]
    fn oscillatory_vanishes_continuously_at_wells() {
        let pot = Potential::oscillatory(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(pot.eval_w(&[0.0, 0.0]).unwrap(), 0.0);
        // W <= 9 r^2 |p - p2|^2-ish near the first well
        for &r in &[1e-2, 1e-4, 1e-8] {
            let w = pot.eval_w(&[r, 0.0]).unwrap();
            assert!(w > 0.0 && w <= 9.0 * r * r * 1.1);
        }
    }

    #[test]
    fn assumption_probe_on_double_well() {
        let pot = Potential::double_well(1.0, 2).unwrap();
        let report = validate_assumptions(&pot, &AssumptionProbe::default());
        assert!(report.a1_zero_set_ok);
        assert!(report.a2_liminf_estimate > 0.0);
        for fit in &report.a4_quadratic_bound {
            assert!(fit.c_fit > 0.0);
            assert!(fit.c_max.is_finite());
        }
    }

    #[test]
    fn assumption_probe_on_six_well_fits_all_wells() {
        let pot = Potential::six_well();
        let report = validate_assumptions(&pot, &AssumptionProbe::default());
        assert!(report.a1_zero_set_ok);
        assert_eq!(report.a4_quadratic_bound.len(), 6);
        for fit in &report.a4_quadratic_bound {
            assert!(fit.c_fit.is_finite() && fit.c_fit > 0.0);
        }
    }

    #[test]
    fn spurious_zero_is_detected() {
        // declare only two of the three wells of the eps = 0.3 family; the
        // zero at (0, 0.3) is then an undeclared defect the scan must find
        let full = Potential::alikakos_fusco(0.3);
        let spurious = Potential::custom(
            2,
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            move |p| full.w(p),
            None,
        );
        let report = validate_assumptions(&spurious, &AssumptionProbe::default());
        assert!(!report.a1_zero_set_ok);
        let v = report.a1_worst_violation.unwrap();
        assert!(!v.listed_well);
        assert!(dist(&v.point, &[0.0, 0.3]) < 1e-2);
    }

    #[test]
    fn listed_non_zero_well_is_a_violation() {
        let pot = Potential::custom(
            1,
            vec![vec![0.5]],
            |p| 0.25 * (1.0 - p[0] * p[0]).powi(2),
            None,
        );
        let report = validate_assumptions(&pot, &AssumptionProbe::default());
        assert!(!report.a1_zero_set_ok);
        assert!(report.a1_worst_violation.unwrap().listed_well);
    }
}
