//! Deciders for ultrametricity, the de Groot property `GP[n]`, and the Nagata
//! property `NP[n]`, with explicit witnesses on failure.
//!
//! A brute-force enumeration over centers and point tuples serves as the
//! oracle; an optimized fast path (per-center conflict graphs with bitset
//! triangle detection for `NP[1]`, radius-ordered triangle probes for
//! `GP[1]`) must return the same verdict and can be cross-checked with
//! `Strategy::Both`. Tuples range over *distinct* points only, so properties
//! are monotone in `n` and every witness names `n + 3` different points.

use serde::{Deserialize, Serialize};

use crate::space::FiniteMetricSpace;

/// Relative tolerance for violation detection: a tuple only counts as
/// violating when every required inequality fails by more than
/// `TOL_CHECK_REL * diameter`. Ties are conservatively read as "holds".
pub const TOL_CHECK_REL: f64 = 1e-12;

/// Violation-detection slack for `space`: `1e-12` times its diameter.
pub fn tol_check(space: &FiniteMetricSpace) -> f64 {
    TOL_CHECK_REL * space.diameter()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    /// Strong triangle inequality: `d(x1,x2) <= max(d(x0,x1), d(x0,x2))`.
    Ultrametric,
    /// `GP[n]`: some tuple pair is no farther apart than some radius.
    DeGroot,
    /// `NP[n]`: some tuple pair is no farther apart than one of its own radii.
    Nagata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Brute,
    Fast,
    /// Run both and assert they agree; the reported witness is the brute one.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyQuery {
    pub kind: PropertyKind,
    /// Tuple parameter; ignored for `Ultrametric` (which behaves as `n = 0`).
    pub n: usize,
    pub strategy: Strategy,
}

impl PropertyQuery {
    /// Number of non-center points in a witness tuple: 2 for ultrametric,
    /// `n + 2` otherwise.
    pub fn tuple_len(&self) -> usize {
        match self.kind {
            PropertyKind::Ultrametric => 2,
            _ => self.n + 2,
        }
    }
}

/// A tuple on which the queried property fails: a center `x0` and `n + 2`
/// further points such that every required pair is strictly farther apart
/// than every required radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    /// Index of `x0`.
    pub center: usize,
    /// Indices of `x1 ..= x(n+2)`, ascending.
    pub tuple: Vec<usize>,
    /// `d(x0, xk)` for each tuple entry, in tuple order.
    pub radii: Vec<f64>,
    /// Minimum of `d(xi, xj)` over distinct tuple entries.
    pub min_pairwise: f64,
}

impl ViolationWitness {
    /// Re-checks the violation against `space` using exact stored distances
    /// and strict inequalities (no tolerance): for `DeGroot`, the minimum
    /// pairwise tuple distance must exceed every radius; for `Nagata` and
    /// `Ultrametric`, every pair must exceed both of its own radii.
    pub fn verify(&self, space: &FiniteMetricSpace, kind: PropertyKind) -> bool {
        let m = space.size();
        if self.center >= m || self.tuple.iter().any(|&i| i >= m || i == self.center) {
            return false;
        }
        let mut sorted = self.tuple.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.tuple.len() {
            return false;
        }
        if self.radii.len() != self.tuple.len() {
            return false;
        }
        for (k, &x) in self.tuple.iter().enumerate() {
            if self.radii[k] != space.dist(self.center, x) {
                return false;
            }
        }
        let mut min_pair = f64::INFINITY;
        for a in 0..self.tuple.len() {
            for b in a + 1..self.tuple.len() {
                min_pair = min_pair.min(space.dist(self.tuple[a], self.tuple[b]));
            }
        }
        if (min_pair - self.min_pairwise).abs() > 1e-9 * space.diameter().max(1.0) {
            return false;
        }
        match kind {
            PropertyKind::DeGroot => {
                let max_rad = self.radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                min_pair > max_rad
            }
            PropertyKind::Nagata | PropertyKind::Ultrametric => {
                for a in 0..self.tuple.len() {
                    for b in a + 1..self.tuple.len() {
                        let d = space.dist(self.tuple[a], self.tuple[b]);
                        if !(d > self.radii[a].max(self.radii[b])) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }
}

/// Outcome of one property check. Serializes losslessly, so a report read
/// back from JSON equals the one written.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub query: PropertyQuery,
    pub holds: bool,
    pub witness: Option<ViolationWitness>,
    /// Candidate tuples evaluated; for fast strategies this counts triangle
    /// probes rather than full enumeration.
    pub tuples_examined: u64,
    pub elapsed_ms: f64,
    /// True when a fast strategy was requested for `n >= 2` and the check
    /// fell back to brute force.
    pub degraded_to_brute: bool,
}

struct Hit {
    center: usize,
    tuple: Vec<usize>,
    margin: f64,
    min_pairwise: f64,
}

/// Brute-force scan over every (center, tuple) combination in canonical
/// order: centers ascending, tuples as ascending index combinations. The
/// visitor returns `false` to stop at the first violation. Returns the number
/// of tuples fully evaluated.
fn scan_violations<D, F>(
    m: usize,
    dist: D,
    kind: PropertyKind,
    tuple_len: usize,
    tol: f64,
    mut visit: F,
) -> u64
where
    D: Fn(usize, usize) -> f64,
    F: FnMut(Hit) -> bool,
{
    let mut examined: u64 = 0;
    if m < tuple_len + 1 {
        return 0;
    }
    match tuple_len {
        2 => {
            for c in 0..m {
                for p in 0..m {
                    if p == c {
                        continue;
                    }
                    for q in p + 1..m {
                        if q == c {
                            continue;
                        }
                        examined += 1;
                        let margin = dist(p, q) - dist(c, p).max(dist(c, q));
                        if margin > tol
                            && !visit(Hit {
                                center: c,
                                tuple: vec![p, q],
                                margin,
                                min_pairwise: dist(p, q),
                            })
                        {
                            return examined;
                        }
                    }
                }
            }
        }
        3 => {
            for c in 0..m {
                for p in 0..m {
                    if p == c {
                        continue;
                    }
                    let rp = dist(c, p);
                    for q in p + 1..m {
                        if q == c {
                            continue;
                        }
                        let rq = dist(c, q);
                        let dpq = dist(p, q);
                        // Any violating triple needs d(p,q) beyond both of
                        // these radii, for either property kind.
                        let gap_pq = dpq - rp.max(rq);
                        if gap_pq <= tol {
                            continue;
                        }
                        for r in q + 1..m {
                            if r == c {
                                continue;
                            }
                            examined += 1;
                            let rr = dist(c, r);
                            let dpr = dist(p, r);
                            let dqr = dist(q, r);
                            let min_pair = dpq.min(dpr).min(dqr);
                            let margin = match kind {
                                PropertyKind::DeGroot => min_pair - rp.max(rq).max(rr),
                                _ => gap_pq
                                    .min(dpr - rp.max(rr))
                                    .min(dqr - rq.max(rr)),
                            };
                            if margin > tol
                                && !visit(Hit {
                                    center: c,
                                    tuple: vec![p, q, r],
                                    margin,
                                    min_pairwise: min_pair,
                                })
                            {
                                return examined;
                            }
                        }
                    }
                }
            }
        }
        k => {
            // Generic lexicographic combination odometer for n >= 2.
            for c in 0..m {
                let others: Vec<usize> = (0..m).filter(|&i| i != c).collect();
                let n_others = others.len();
                let mut comb: Vec<usize> = (0..k).collect();
                loop {
                    examined += 1;
                    let tuple: Vec<usize> = comb.iter().map(|&i| others[i]).collect();
                    let mut min_pair = f64::INFINITY;
                    let mut max_rad = f64::NEG_INFINITY;
                    let mut min_gap = f64::INFINITY;
                    for a in 0..k {
                        let ra = dist(c, tuple[a]);
                        max_rad = max_rad.max(ra);
                        for b in a + 1..k {
                            let d = dist(tuple[a], tuple[b]);
                            min_pair = min_pair.min(d);
                            min_gap = min_gap.min(d - ra.max(dist(c, tuple[b])));
                        }
                    }
                    let margin = match kind {
                        PropertyKind::DeGroot => min_pair - max_rad,
                        _ => min_gap,
                    };
                    if margin > tol
                        && !visit(Hit {
                            center: c,
                            tuple,
                            margin,
                            min_pairwise: min_pair,
                        })
                    {
                        return examined;
                    }
                    // Advance the combination.
                    let mut i = k;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        if comb[i] != i + n_others - k {
                            comb[i] += 1;
                            for j in i + 1..k {
                                comb[j] = comb[j - 1] + 1;
                            }
                            break;
                        }
                        if i == 0 {
                            comb.clear();
                            break;
                        }
                    }
                    if comb.is_empty() {
                        break;
                    }
                }
            }
        }
    }
    examined
}

/// Folds `f` over every violating (center, tuple) combination. Used by the
/// search module's objective; see [`count_violations`] for the counting form.
pub(crate) fn fold_violation_margins<D, A>(
    m: usize,
    dist: D,
    kind: PropertyKind,
    tuple_len: usize,
    tol: f64,
    init: A,
    mut f: impl FnMut(A, f64) -> A,
) -> A
where
    D: Fn(usize, usize) -> f64,
{
    let mut acc = Some(init);
    scan_violations(m, dist, kind, tuple_len, tol, |hit| {
        acc = Some(f(acc.take().expect("accumulator"), hit.margin));
        true
    });
    acc.expect("accumulator")
}

fn witness_of(space: &FiniteMetricSpace, hit: &Hit) -> ViolationWitness {
    ViolationWitness {
        center: hit.center,
        tuple: hit.tuple.clone(),
        radii: hit
            .tuple
            .iter()
            .map(|&x| space.dist(hit.center, x))
            .collect(),
        min_pairwise: hit.min_pairwise,
    }
}

fn brute(space: &FiniteMetricSpace, kind: PropertyKind, tuple_len: usize) -> (Option<ViolationWitness>, u64) {
    let tol = tol_check(space);
    let mut found = None;
    let examined = scan_violations(
        space.size(),
        |i, j| space.dist(i, j),
        kind,
        tuple_len,
        tol,
        |hit| {
            found = Some(witness_of(space, &hit));
            false
        },
    );
    (found, examined)
}

/// Rows of bits over point indices, for O(m/64) common-neighbor queries.
struct BitRows {
    words: usize,
    data: Vec<u64>,
}

impl BitRows {
    fn new(m: usize) -> Self {
        let words = m.div_ceil(64);
        Self {
            words,
            data: vec![0; words * m],
        }
    }

    fn clear(&mut self) {
        self.data.fill(0);
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize) {
        self.data[row * self.words + col / 64] |= 1 << (col % 64);
    }

    /// Lowest common set column of two rows, if any.
    fn first_common(&self, a: usize, b: usize) -> Option<usize> {
        let ra = &self.data[a * self.words..(a + 1) * self.words];
        let rb = &self.data[b * self.words..(b + 1) * self.words];
        for w in 0..self.words {
            let and = ra[w] & rb[w];
            if and != 0 {
                return Some(w * 64 + and.trailing_zeros() as usize);
            }
        }
        None
    }
}

/// Fast `NP[1]` check: per center `c`, build the conflict graph on the other
/// points (edge iff `d(p,q) > max(d(c,p), d(c,q)) + tol`) and look for a
/// triangle via bitset row intersection. `NP[1]` fails at `c` iff the
/// conflict graph contains a triangle.
fn fast_nagata1(space: &FiniteMetricSpace) -> (Option<ViolationWitness>, u64) {
    let m = space.size();
    let tol = tol_check(space);
    let mut probes: u64 = 0;
    let mut bits = BitRows::new(m);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for c in 0..m {
        bits.clear();
        edges.clear();
        let rc = space.row(c);
        for p in 0..m {
            if p == c {
                continue;
            }
            for q in p + 1..m {
                if q == c {
                    continue;
                }
                if space.dist(p, q) > rc[p].max(rc[q]) + tol {
                    bits.set(p, q);
                    bits.set(q, p);
                    edges.push((p, q));
                }
            }
        }
        for &(p, q) in &edges {
            probes += 1;
            if let Some(r) = bits.first_common(p, q) {
                let mut tuple = vec![p, q, r];
                tuple.sort_unstable();
                let mut min_pair = f64::INFINITY;
                for a in 0..3 {
                    for b in a + 1..3 {
                        min_pair = min_pair.min(space.dist(tuple[a], tuple[b]));
                    }
                }
                let hit = Hit {
                    center: c,
                    tuple,
                    margin: 0.0,
                    min_pairwise: min_pair,
                };
                return (Some(witness_of(space, &hit)), probes);
            }
        }
    }
    (None, probes)
}

/// Fast `GP[1]` check: per center `c`, walk candidate max-radius points `w`
/// in increasing radius order; a violation with max radius `d(c,w)` is a pair
/// `p, q` of points with radius at most `d(c,w)` such that all three mutual
/// distances exceed `d(c,w) + tol` — a triangle through `w`.
fn fast_degroot1(space: &FiniteMetricSpace) -> (Option<ViolationWitness>, u64) {
    let m = space.size();
    let tol = tol_check(space);
    let mut probes: u64 = 0;
    for c in 0..m {
        let rc = space.row(c);
        let mut others: Vec<usize> = (0..m).filter(|&i| i != c).collect();
        others.sort_by(|&a, &b| rc[a].partial_cmp(&rc[b]).unwrap().then(a.cmp(&b)));
        let mut max_pair: f64 = 0.0;
        for ai in 0..others.len() {
            for bi in ai + 1..others.len() {
                max_pair = max_pair.max(space.dist(others[ai], others[bi]));
            }
        }
        let mut neighbors: Vec<usize> = Vec::new();
        for wi in 0..others.len() {
            let w = others[wi];
            let r_w = rc[w];
            if r_w + tol >= max_pair {
                // Radii only grow from here; no pair can exceed them.
                break;
            }
            // Points with radius <= r_w adjacent to w under the r_w threshold.
            neighbors.clear();
            for &p in &others {
                if rc[p] > r_w {
                    break;
                }
                if p != w && space.dist(w, p) > r_w + tol {
                    neighbors.push(p);
                }
            }
            for ai in 0..neighbors.len() {
                for bi in ai + 1..neighbors.len() {
                    probes += 1;
                    let (p, q) = (neighbors[ai], neighbors[bi]);
                    if space.dist(p, q) > r_w + tol {
                        let mut tuple = vec![w, p, q];
                        tuple.sort_unstable();
                        let mut min_pair = f64::INFINITY;
                        for a in 0..3 {
                            for b in a + 1..3 {
                                min_pair = min_pair.min(space.dist(tuple[a], tuple[b]));
                            }
                        }
                        let hit = Hit {
                            center: c,
                            tuple,
                            margin: 0.0,
                            min_pairwise: min_pair,
                        };
                        return (Some(witness_of(space, &hit)), probes);
                    }
                }
            }
        }
    }
    (None, probes)
}

fn now_ms(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs `query` against `space`.
///
/// The fast strategy is only defined for `n` in `{0, 1}`; larger `n` degrades
/// to brute force and sets `degraded_to_brute` in the report. `Strategy::Both`
/// runs fast and brute and asserts that the verdicts agree (a disagreement is
/// a checker bug, never a property of the input).
pub fn check_property(space: &FiniteMetricSpace, query: PropertyQuery) -> PropertyReport {
    let start = std::time::Instant::now();
    let tuple_len = query.tuple_len();
    let fast_available = tuple_len <= 3;
    let run_fast = |space: &FiniteMetricSpace| -> (Option<ViolationWitness>, u64) {
        if tuple_len == 2 {
            // Pair scans are already optimal; the brute loop is the fast path.
            brute(space, query.kind, tuple_len)
        } else {
            match query.kind {
                PropertyKind::Nagata => fast_nagata1(space),
                PropertyKind::DeGroot => fast_degroot1(space),
                PropertyKind::Ultrametric => unreachable!("ultrametric is a pair scan"),
            }
        }
    };
    let (witness, examined, degraded) = match query.strategy {
        Strategy::Brute => {
            let (w, e) = brute(space, query.kind, tuple_len);
            (w, e, false)
        }
        Strategy::Fast => {
            if fast_available {
                let (w, e) = run_fast(space);
                (w, e, false)
            } else {
                let (w, e) = brute(space, query.kind, tuple_len);
                (w, e, true)
            }
        }
        Strategy::Both => {
            if fast_available {
                let (fw, _) = run_fast(space);
                let (bw, be) = brute(space, query.kind, tuple_len);
                assert_eq!(
                    fw.is_none(),
                    bw.is_none(),
                    "fast and brute strategies disagree on {:?}[{}]; this is a bug",
                    query.kind,
                    query.n
                );
                if let Some(w) = &fw {
                    assert!(
                        w.verify(space, query.kind),
                        "fast witness fails re-verification; this is a bug"
                    );
                }
                (bw, be, false)
            } else {
                let (w, e) = brute(space, query.kind, tuple_len);
                (w, e, true)
            }
        }
    };
    if let Some(w) = &witness {
        debug_assert!(w.verify(space, query.kind), "witness fails re-verification");
    }
    // Cross-check (debug builds): a violating triple for GP is also violating
    // for NP, so NP holding forces GP to hold.
    if query.kind == PropertyKind::Nagata && query.n == 1 && witness.is_none() {
        debug_assert!(
            fast_degroot1(space).0.is_none(),
            "NP[1] holds but GP[1] fails; this is a bug"
        );
    }
    PropertyReport {
        query,
        holds: witness.is_none(),
        witness,
        tuples_examined: examined,
        elapsed_ms: now_ms(start),
        degraded_to_brute: degraded,
    }
}

/// Checks the strong triangle inequality over all ordered triples.
pub fn check_ultrametric(space: &FiniteMetricSpace) -> PropertyReport {
    check_property(
        space,
        PropertyQuery {
            kind: PropertyKind::Ultrametric,
            n: 0,
            strategy: Strategy::Brute,
        },
    )
}

/// Checks `GP[n]`.
pub fn check_de_groot(space: &FiniteMetricSpace, n: usize, strategy: Strategy) -> PropertyReport {
    check_property(
        space,
        PropertyQuery {
            kind: PropertyKind::DeGroot,
            n,
            strategy,
        },
    )
}

/// Checks `NP[n]`.
pub fn check_nagata(space: &FiniteMetricSpace, n: usize, strategy: Strategy) -> PropertyReport {
    check_property(
        space,
        PropertyQuery {
            kind: PropertyKind::Nagata,
            n,
            strategy,
        },
    )
}

/// Number of violating (center, tuple-set) combinations, with tuples read as
/// unordered sets of distinct points.
pub fn count_violations(space: &FiniteMetricSpace, kind: PropertyKind, n: usize) -> u64 {
    let tuple_len = match kind {
        PropertyKind::Ultrametric => 2,
        _ => n + 2,
    };
    let tol = tol_check(space);
    let mut count: u64 = 0;
    scan_violations(
        space.size(),
        |i, j| space.dist(i, j),
        kind,
        tuple_len,
        tol,
        |_| {
            count += 1;
            true
        },
    );
    count
}
