//! Discrete arc machinery: obtuseness checking over all contiguous subarcs,
//! slice decompositions of near-arc points (level sets, components,
//! retraction, and the max-formula residual), the separation inequality with
//! constructive violation quadruples, and an eps-neighborhood openness probe.
//!
//! An arc is a sequence of distinct host points with increasing arc-length
//! parameters. Two analysis modes differ in the neighborhood `V` they work
//! in: `Gp1Interval` uses the narrow `d(x, I) < d(x, {a,b}) / 3` neighborhood
//! and expects interval-like slices; `Np1Obtuse` uses the full
//! `d(x, I) < d(x, {a,b})` neighborhood and expects only long components.

use serde::{Deserialize, Serialize};

use crate::check::{PropertyKind, ViolationWitness};
use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// A traced arc inside a host space.
#[derive(Debug, Clone)]
pub struct ArcSample<'a> {
    host: &'a FiniteMetricSpace,
    order: Vec<usize>,
    params: Vec<f64>,
}

impl<'a> ArcSample<'a> {
    /// Arc through `order` with cumulative consecutive-distance parameters
    /// (so the parameter spacing is exactly the host step lengths).
    pub fn new(host: &'a FiniteMetricSpace, order: Vec<usize>) -> Result<Self> {
        let mut params = Vec::with_capacity(order.len());
        let mut t = 0.0;
        for (k, &i) in order.iter().enumerate() {
            if k > 0 {
                t += host.dist(order[k - 1], i);
            }
            params.push(t);
        }
        Self::with_params(host, order, params)
    }

    /// Arc with explicit strictly-increasing parameters.
    pub fn with_params(
        host: &'a FiniteMetricSpace,
        order: Vec<usize>,
        params: Vec<f64>,
    ) -> Result<Self> {
        if order.len() < 2 {
            return Err(Error::Parameter {
                what: "an arc needs at least two points".into(),
            });
        }
        if params.len() != order.len() {
            return Err(Error::Parameter {
                what: format!("{} parameters for {} arc points", params.len(), order.len()),
            });
        }
        let mut seen = vec![false; host.size()];
        for &i in &order {
            if i >= host.size() {
                return Err(Error::Parameter {
                    what: format!("arc index {i} out of range"),
                });
            }
            if seen[i] {
                return Err(Error::Parameter {
                    what: format!("arc index {i} repeats"),
                });
            }
            seen[i] = true;
        }
        if params.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Parameter {
                what: "arc parameters must be finite and strictly increasing".into(),
            });
        }
        Ok(Self {
            host,
            order,
            params,
        })
    }

    pub fn host(&self) -> &FiniteMetricSpace {
        self.host
    }

    /// Host indices along the arc.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Arc-length parameters, one per arc position.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest parameter gap between consecutive samples — the resolution all
    /// interval-length assertions are slack by.
    pub fn grid_step(&self) -> f64 {
        self.params
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// True when host distance equals parameter difference for every arc
    /// pair, within `tol`.
    pub fn is_isometric_to_interval(&self, tol: f64) -> bool {
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let d = self.host.dist(self.order[a], self.order[b]);
                if ((self.params[b] - self.params[a]) - d).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `d(x, I)`: distance from a host point to the arc's point set.
    pub fn distance_to_arc(&self, x: usize) -> f64 {
        self.order
            .iter()
            .map(|&i| self.host.dist(x, i))
            .fold(f64::INFINITY, f64::min)
    }

    /// `d(x, {a, b})`: distance from a host point to the endpoint set.
    pub fn distance_to_endpoints(&self, x: usize) -> f64 {
        let a = self.order[0];
        let b = self.order[self.len() - 1];
        self.host.dist(x, a).min(self.host.dist(x, b))
    }

    pub fn contains(&self, x: usize) -> bool {
        self.order.contains(&x)
    }
}

/// Neighborhood and assertion profile for slice and openness analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcMode {
    /// Narrow neighborhood (`factor 1/3`); slices are expected to be single
    /// parameter intervals of length `2 d(x, I)` with an exact max-formula.
    Gp1Interval,
    /// Wide neighborhood (`factor 1`); slice components are only expected to
    /// be longer than `d(x, I)`.
    Np1Obtuse,
}

impl ArcMode {
    fn v_factor(self) -> f64 {
        match self {
            ArcMode::Gp1Interval => 1.0 / 3.0,
            ArcMode::Np1Obtuse => 1.0,
        }
    }
}

fn analysis_tol(host: &FiniteMetricSpace) -> f64 {
    1e-9 * host.diameter().max(1.0)
}

/// Where an obtuseness scan failed.
#[derive(Debug, Clone, Serialize)]
pub struct ObtuseFailure {
    /// 1: some interior point dominates every pair; 2: no interior point is
    /// dominated by the subarc endpoints.
    pub condition: u8,
    /// Subarc as inclusive arc positions.
    pub start: usize,
    pub end: usize,
    /// Failing interior position (condition 1 only).
    pub interior: Option<usize>,
    /// Host index of the failing interior point.
    pub interior_host_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObtuseReport {
    pub holds: bool,
    pub subarcs_checked: u64,
    pub failure: Option<ObtuseFailure>,
}

/// Checks discrete obtuseness over every contiguous subarc `J` of length at
/// least 3: (1) each interior sample `z` of `J` admits a pair `x, y` in `J`
/// with `d(x,y) > max{d(z,x), d(z,y)}`, and (2) some interior `z` is
/// dominated by the subarc endpoints: `d(a',b') > max{d(z,a'), d(z,b')}`.
/// Subarcs are scanned with ascending start then ascending end, interiors
/// ascending, so the first failure is canonical.
pub fn check_obtuse(arc: &ArcSample) -> Result<ObtuseReport> {
    if arc.len() < 3 {
        return Err(Error::Parameter {
            what: format!("obtuseness needs at least 3 arc points, got {}", arc.len()),
        });
    }
    let host = arc.host();
    let ord = arc.order();
    let n = arc.len();
    let mut subarcs_checked = 0u64;
    for s in 0..n {
        for e in s + 2..n {
            subarcs_checked += 1;
            let (a, b) = (ord[s], ord[e]);
            let dab = host.dist(a, b);
            // Condition 2: the endpoints dominate some interior point.
            let mut dominated = false;
            for z in s + 1..e {
                if dab > host.dist(ord[z], a).max(host.dist(ord[z], b)) {
                    dominated = true;
                    break;
                }
            }
            if !dominated {
                return Ok(ObtuseReport {
                    holds: false,
                    subarcs_checked,
                    failure: Some(ObtuseFailure {
                        condition: 2,
                        start: s,
                        end: e,
                        interior: None,
                        interior_host_index: None,
                    }),
                });
            }
            // Condition 1: every interior point is dominated by some pair.
            'interior: for z in s + 1..e {
                let zi = ord[z];
                // The endpoint pair almost always works; try it first.
                if dab > host.dist(zi, a).max(host.dist(zi, b)) {
                    continue 'interior;
                }
                for px in s..=e {
                    for py in px + 1..=e {
                        let (x, y) = (ord[px], ord[py]);
                        if host.dist(x, y) > host.dist(zi, x).max(host.dist(zi, y)) {
                            continue 'interior;
                        }
                    }
                }
                return Ok(ObtuseReport {
                    holds: false,
                    subarcs_checked,
                    failure: Some(ObtuseFailure {
                        condition: 1,
                        start: s,
                        end: e,
                        interior: Some(z),
                        interior_host_index: Some(zi),
                    }),
                });
            }
        }
    }
    Ok(ObtuseReport {
        holds: true,
        subarcs_checked,
        failure: None,
    })
}

/// One maximal run of consecutive arc positions inside a level set.
#[derive(Debug, Clone, Serialize)]
pub struct SliceComponent {
    /// Inclusive arc positions.
    pub start: usize,
    pub end: usize,
    /// Parameter span `params[end] - params[start]`.
    pub param_length: f64,
    /// Largest host distance between two component members.
    pub diameter: f64,
}

/// Decomposition of the arc points nearest to an off-arc point.
#[derive(Debug, Clone, Serialize)]
pub struct SliceReport {
    /// The off-arc host point analyzed.
    pub point: usize,
    /// `D = d(point, I)`.
    pub level: f64,
    /// Membership in the mode's neighborhood `V` (strict, shrunk by tol).
    pub in_v: bool,
    /// Arc positions within tol of the level.
    pub level_set: Vec<usize>,
    pub components: Vec<SliceComponent>,
    /// Midpoint parameter of the first component (interval mode only).
    pub retraction: Option<f64>,
    /// `max_t |d(x, t) - max{|param_t - r|, D}|` (interval mode only).
    pub formula_residual: Option<f64>,
    /// Soft assertions that failed for this point; empty on hosts where the
    /// mode's property has been verified.
    pub assertion_failures: Vec<String>,
}

/// Computes the level `D = d(x, I)`, the level set, its consecutive-run
/// components, and (in interval mode) the retraction midpoint and the
/// residual of the formula `d(x,t) = max{|t - r(x)|, D}`.
///
/// Interval mode requires the arc to be parameter-isometric; expectations
/// (single component of parameter length `2D`, residual below one grid step
/// in interval mode; component diameters above `D` minus one grid step in
/// obtuse mode) are recorded in `assertion_failures` rather than enforced,
/// and only for points inside `V`.
pub fn slice_analysis(arc: &ArcSample, x: usize, mode: ArcMode) -> Result<SliceReport> {
    let host = arc.host();
    if x >= host.size() {
        return Err(Error::Parameter {
            what: format!("point {x} out of range"),
        });
    }
    if arc.contains(x) {
        return Err(Error::Parameter {
            what: format!("point {x} lies on the arc"),
        });
    }
    let tol = analysis_tol(host);
    if mode == ArcMode::Gp1Interval && !arc.is_isometric_to_interval(tol) {
        return Err(Error::Parameter {
            what: "interval mode requires an arc isometric to an interval".into(),
        });
    }
    let level = arc.distance_to_arc(x);
    let in_v = level + tol < mode.v_factor() * arc.distance_to_endpoints(x);
    let level_set: Vec<usize> = (0..arc.len())
        .filter(|&p| host.dist(x, arc.order()[p]) <= level + tol)
        .collect();
    let mut components: Vec<SliceComponent> = Vec::new();
    for &p in &level_set {
        match components.last_mut() {
            Some(c) if c.end + 1 == p => c.end = p,
            _ => components.push(SliceComponent {
                start: p,
                end: p,
                param_length: 0.0,
                diameter: 0.0,
            }),
        }
    }
    for c in &mut components {
        c.param_length = arc.params()[c.end] - arc.params()[c.start];
        let mut diam: f64 = 0.0;
        for pa in c.start..=c.end {
            for pb in pa + 1..=c.end {
                diam = diam.max(host.dist(arc.order()[pa], arc.order()[pb]));
            }
        }
        c.diameter = diam;
    }
    let step = arc.grid_step();
    let mut assertion_failures = Vec::new();
    let (retraction, formula_residual) = match mode {
        ArcMode::Gp1Interval => {
            let c = &components[0];
            let r = (arc.params()[c.start] + arc.params()[c.end]) / 2.0;
            let mut residual: f64 = 0.0;
            for p in 0..arc.len() {
                let predicted = (arc.params()[p] - r).abs().max(level);
                residual = residual.max((host.dist(x, arc.order()[p]) - predicted).abs());
            }
            if in_v {
                if components.len() != 1 {
                    assertion_failures.push(format!(
                        "expected a single level-set component, found {}",
                        components.len()
                    ));
                }
                if (c.param_length - 2.0 * level).abs() > step + tol {
                    assertion_failures.push(format!(
                        "component parameter length {} differs from 2D = {} by more than one grid step",
                        c.param_length,
                        2.0 * level
                    ));
                }
                if residual > step + tol {
                    assertion_failures.push(format!(
                        "max-formula residual {residual} exceeds one grid step"
                    ));
                }
            }
            (Some(r), Some(residual))
        }
        ArcMode::Np1Obtuse => {
            if in_v {
                for c in &components {
                    if !(c.diameter > level - step - tol) {
                        assertion_failures.push(format!(
                            "component [{}, {}] has diameter {} not exceeding D - grid step = {}",
                            c.start,
                            c.end,
                            c.diameter,
                            level - step
                        ));
                    }
                }
            }
            (None, None)
        }
    };
    Ok(SliceReport {
        point: x,
        level,
        in_v,
        level_set,
        components,
        retraction,
        formula_residual,
        assertion_failures,
    })
}

/// Slice reports for every off-arc host point, in index order.
pub fn slice_profile(arc: &ArcSample, mode: ArcMode) -> Result<Vec<SliceReport>> {
    (0..arc.host().size())
        .filter(|&x| !arc.contains(x))
        .map(|x| slice_analysis(arc, x, mode))
        .collect()
}

/// Outcome of a separation test between two off-arc points at different
/// levels.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub x: usize,
    pub y: usize,
    pub level_x: f64,
    pub level_y: f64,
    pub distance: f64,
    /// `d(x,y) >= max{d(x,I), d(y,I)}` up to tol.
    pub holds: bool,
    /// On failure: the constructed four-point configuration, centered on the
    /// deeper point's partner, that violates the radius comparison.
    pub quadruple: Option<ViolationWitness>,
    /// Whether the quadruple re-verifies with exact strict inequalities.
    pub quadruple_verified: bool,
}

/// Tests the separation inequality for two points of `V` at distinct levels.
/// When it fails, the witnessing quadruple `(x, r(x)-a, r(x)+a, y)` is built
/// by snapping `a` — the midpoint of `(max{D_x, d(x,y)}, D_y)` with labels
/// chosen so `D_y` is larger — to the arc grid, falling back to the two
/// nearest interior grid offsets if the snap leaves the open interval.
pub fn separation_check(arc: &ArcSample, x: usize, y: usize, mode: ArcMode) -> Result<SeparationReport> {
    let host = arc.host();
    let tol = analysis_tol(host);
    let sx = slice_analysis(arc, x, mode)?;
    let sy = slice_analysis(arc, y, mode)?;
    if !sx.in_v || !sy.in_v {
        return Err(Error::Parameter {
            what: "both points must lie in the mode's neighborhood V".into(),
        });
    }
    if (sx.level - sy.level).abs() <= tol {
        return Err(Error::Parameter {
            what: format!(
                "levels {} and {} coincide within tolerance; separation needs distinct levels",
                sx.level, sy.level
            ),
        });
    }
    let distance = host.dist(x, y);
    let holds = distance >= sx.level.max(sy.level) - tol;
    let mut quadruple = None;
    let mut quadruple_verified = false;
    if !holds {
        // Name the points so y is the deeper one.
        let (shallow, deep, s_shallow) = if sx.level < sy.level {
            (x, y, &sx)
        } else {
            (y, x, &sy)
        };
        let (d_shallow, d_deep) = (sx.level.min(sy.level), sx.level.max(sy.level));
        let lo = d_shallow.max(distance);
        let hi = d_deep;
        let r = s_shallow
            .retraction
            .unwrap_or_else(|| {
                let c = &s_shallow.components[0];
                (arc.params()[c.start] + arc.params()[c.end]) / 2.0
            });
        let nearest_pos = |target: f64| -> usize {
            let mut best = 0;
            let mut best_gap = f64::INFINITY;
            for (p, &t) in arc.params().iter().enumerate() {
                let gap = (t - target).abs();
                if gap < best_gap {
                    best_gap = gap;
                    best = p;
                }
            }
            best
        };
        let mid = (lo + hi) / 2.0;
        // Snap candidates: the midpoint target, then one grid step inward on
        // either side.
        let step = arc.grid_step();
        for a_target in [mid, mid - step, mid + step] {
            let p_minus = nearest_pos(r - a_target);
            let p_plus = nearest_pos(r + a_target);
            if p_minus == p_plus {
                continue;
            }
            let a_minus = (arc.params()[p_minus] - r).abs();
            let a_plus = (arc.params()[p_plus] - r).abs();
            if !(a_minus > lo && a_minus < hi && a_plus > lo && a_plus < hi) {
                continue;
            }
            let t_minus = arc.order()[p_minus];
            let t_plus = arc.order()[p_plus];
            if t_minus == shallow || t_plus == shallow || t_minus == deep || t_plus == deep {
                continue;
            }
            let mut tuple = vec![t_minus, t_plus, deep];
            tuple.sort_unstable();
            let radii: Vec<f64> = tuple.iter().map(|&p| host.dist(shallow, p)).collect();
            let mut min_pairwise = f64::INFINITY;
            for i in 0..3 {
                for j in i + 1..3 {
                    min_pairwise = min_pairwise.min(host.dist(tuple[i], tuple[j]));
                }
            }
            let witness = ViolationWitness {
                center: shallow,
                tuple,
                radii,
                min_pairwise,
            };
            let ok = witness.verify(host, PropertyKind::DeGroot);
            quadruple = Some(witness);
            quadruple_verified = ok;
            if ok {
                break;
            }
        }
    }
    Ok(SeparationReport {
        x,
        y,
        level_x: sx.level,
        level_y: sy.level,
        distance,
        holds,
        quadruple,
        quadruple_verified,
    })
}

/// An edge of the eps-neighborhood graph joining different levels at a
/// distance below the larger level — the discrete failure of separation.
#[derive(Debug, Clone, Serialize)]
pub struct OffenderEdge {
    pub u: usize,
    pub v: usize,
    pub distance: f64,
    pub level_u: f64,
    pub level_v: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpennessReport {
    pub eps: f64,
    /// Host points in the mode's neighborhood `V` (arc interior included).
    pub v_members: Vec<usize>,
    /// Edge count of the eps-neighborhood graph on `V`.
    pub edges: u64,
    pub offenders: Vec<OffenderEdge>,
    /// True when no offending edge exists: nearby points of `V` share levels
    /// unless their distance reaches the larger level.
    pub locally_flat: bool,
    /// In interval mode, whether the arc really is parameter-isometric —
    /// reported, never enforced.
    pub arc_precondition_ok: bool,
}

/// Default probe radius: 2.5 grid steps, the smallest radius keeping
/// constructed grids connected along their arcs.
pub fn default_probe_eps(arc: &ArcSample) -> f64 {
    2.5 * arc.grid_step()
}

/// Builds the eps-neighborhood graph on `V` and lists the edges that pair
/// different levels at a distance below the larger level minus tol. On hosts
/// where the interval-mode property holds such edges cannot exist; their
/// presence localizes where flatness breaks.
pub fn openness_probe(arc: &ArcSample, eps: f64, mode: ArcMode) -> Result<OpennessReport> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Parameter {
            what: format!("probe radius must be positive, got {eps}"),
        });
    }
    let host = arc.host();
    let tol = analysis_tol(host);
    let factor = mode.v_factor();
    let mut v_members = Vec::new();
    let mut levels = Vec::new();
    for p in 0..host.size() {
        let level = arc.distance_to_arc(p);
        if level + tol < factor * arc.distance_to_endpoints(p) {
            v_members.push(p);
            levels.push(level);
        }
    }
    let mut edges = 0u64;
    let mut offenders = Vec::new();
    for a in 0..v_members.len() {
        for b in a + 1..v_members.len() {
            let d = host.dist(v_members[a], v_members[b]);
            if d < eps {
                edges += 1;
                let (lu, lv) = (levels[a], levels[b]);
                if (lu - lv).abs() > tol && d < lu.max(lv) - tol {
                    offenders.push(OffenderEdge {
                        u: v_members[a],
                        v: v_members[b],
                        distance: d,
                        level_u: lu,
                        level_v: lv,
                    });
                }
            }
        }
    }
    Ok(OpennessReport {
        eps,
        locally_flat: offenders.is_empty(),
        arc_precondition_ok: mode != ArcMode::Gp1Interval
            || arc.is_isometric_to_interval(tol),
        v_members,
        edges,
        offenders,
    })
}
