//! Validated finite metric spaces: a dense symmetric distance matrix with
//! optional labels and planar coordinates, plus the transformations every
//! other module builds on (scaling, restriction, shortest-path completion).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the metric axioms on unit-scale spaces.
///
/// Constructed examples on dyadic grids are exact in binary, but shortest-path
/// completions accumulate round-off; comparisons in [`validate_metric`] allow
/// violations up to this slack.
pub const DEFAULT_TOL_METRIC: f64 = 1e-9;

const DEFAULT_SIZE_CAP: usize = 4096;

/// Maximum number of points a space may have.
///
/// The checkers are O(m³)–O(m⁴), so sizes are capped at 4096 by default; the
/// `METRIC_PROPS_MAX_SIZE` environment variable overrides the cap.
pub fn size_cap() -> usize {
    std::env::var("METRIC_PROPS_MAX_SIZE")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// Which metric axiom a matrix entry violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectKind {
    /// `d[i][j] != d[j][i]`.
    Asymmetry,
    /// A negative entry.
    Negative,
    /// `d[i][i] != 0`.
    NonzeroDiagonal,
    /// `d[i][j] = 0` for `i != j`; the matrix is at best a pseudometric.
    ZeroOffDiagonal,
    /// `d[i][j] > d[i][k] + d[k][j]`.
    Triangle,
}

/// One violated metric axiom with a minimal witnessing index tuple.
///
/// `magnitude` is the size of the violation: the asymmetry gap, the absolute
/// value of a negative entry, `|d[i][i]|` for a bad diagonal, the triangle
/// excess `d[i][j] − d[i][k] − d[k][j]`, or — for a zero off-diagonal entry —
/// the shortfall `tol − d[i][j]` below the positivity threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDefect {
    pub kind: DefectKind,
    pub indices: Vec<usize>,
    pub magnitude: f64,
}

impl std::fmt::Display for MetricDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:?} at {:?} (magnitude {:.6e})",
            self.kind, self.indices, self.magnitude
        )
    }
}

/// Checks every metric axiom on a raw square matrix.
///
/// Returns an empty list iff `raw` is a valid metric within `tol`. Otherwise
/// each violated axiom class is represented by one defect carrying the
/// lexicographically first witnessing index tuple. Non-square input is a shape
/// error, and NaN or infinite entries are rejected outright.
pub fn validate_metric(raw: &[Vec<f64>], tol: f64) -> Result<Vec<MetricDefect>> {
    let m = raw.len();
    for (i, row) in raw.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Shape {
                detail: format!("{} rows but row {} has {} entries", m, i, row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    let mut defects = Vec::new();

    let mut nonzero_diag = None;
    for i in 0..m {
        if raw[i][i].abs() > tol {
            nonzero_diag = Some(MetricDefect {
                kind: DefectKind::NonzeroDiagonal,
                indices: vec![i, i],
                magnitude: raw[i][i].abs(),
            });
            break;
        }
    }

    let mut asymmetry = None;
    'asym: for i in 0..m {
        for j in i + 1..m {
            let gap = (raw[i][j] - raw[j][i]).abs();
            if gap > tol {
                asymmetry = Some(MetricDefect {
                    kind: DefectKind::Asymmetry,
                    indices: vec![i, j],
                    magnitude: gap,
                });
                break 'asym;
            }
        }
    }

    let mut negative = None;
    'neg: for i in 0..m {
        for j in 0..m {
            if raw[i][j] < -tol {
                negative = Some(MetricDefect {
                    kind: DefectKind::Negative,
                    indices: vec![i, j],
                    magnitude: -raw[i][j],
                });
                break 'neg;
            }
        }
    }

    let mut zero_off = None;
    'zero: for i in 0..m {
        for j in 0..m {
            if i != j && raw[i][j] <= tol && raw[i][j] >= -tol {
                zero_off = Some(MetricDefect {
                    kind: DefectKind::ZeroOffDiagonal,
                    indices: vec![i, j],
                    magnitude: tol - raw[i][j],
                });
                break 'zero;
            }
        }
    }

    let mut triangle = None;
    'tri: for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                if k == i || k == j {
                    continue;
                }
                let excess = raw[i][j] - raw[i][k] - raw[k][j];
                if excess > tol {
                    triangle = Some(MetricDefect {
                        kind: DefectKind::Triangle,
                        indices: vec![i, j, k],
                        magnitude: excess,
                    });
                    break 'tri;
                }
            }
        }
    }

    for d in [nonzero_diag, asymmetry, negative, zero_off, triangle]
        .into_iter()
        .flatten()
    {
        defects.push(d);
    }
    Ok(defects)
}

/// A finite metric space: `size` points with a dense symmetric distance
/// matrix, optional per-point labels, and optional planar coordinates used
/// only for report display on constructed spaces.
///
/// Values are immutable after construction; every transformation returns a
/// new space, so sharing across parallel workers is safe.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    size: usize,
    dist: Vec<f64>,
    diameter: f64,
    labels: Option<Vec<String>>,
    coords: Option<Vec<(f64, f64)>>,
}

impl FiniteMetricSpace {
    /// Builds a space from a full square matrix, validating every metric
    /// axiom with the default tolerance.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows_with(rows, None, None)
    }

    /// Like [`Self::from_rows`] with labels and coordinates attached.
    pub fn from_rows_with(
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
        coords: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        let defects = validate_metric(&rows, DEFAULT_TOL_METRIC)?;
        if !defects.is_empty() {
            return Err(Error::InvalidMetric(defects));
        }
        Self::from_rows_trusted(rows, labels, coords)
    }

    /// Builds a space whose matrix is known to be a metric by construction
    /// (formula-generated grids, restrictions of valid spaces). Shape, size
    /// cap, and label/coordinate lengths are still enforced; the O(m³)
    /// triangle scan is only run for small sizes, where it is cheap. Zero
    /// distances between distinct points pass through, so spaces loaded
    /// leniently keep working under restriction and scaling.
    pub(crate) fn from_rows_trusted(
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
        coords: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Parameter {
                what: "a metric space needs at least one point".into(),
            });
        }
        let cap = size_cap();
        if m > cap {
            return Err(Error::Capacity {
                requested: m,
                cap,
            });
        }
        if let Some(l) = &labels {
            if l.len() != m {
                return Err(Error::Parameter {
                    what: format!("{} labels for {} points", l.len(), m),
                });
            }
        }
        if let Some(c) = &coords {
            if c.len() != m {
                return Err(Error::Parameter {
                    what: format!("{} coordinates for {} points", c.len(), m),
                });
            }
        }
        let mut dist = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Shape {
                    detail: format!("{} rows but row {} has {} entries", m, i, row.len()),
                });
            }
            dist.extend_from_slice(row);
        }
        debug_assert!(
            m > 300
                || validate_metric(&rows, DEFAULT_TOL_METRIC)?
                    .iter()
                    .all(|d| d.kind == DefectKind::ZeroOffDiagonal),
            "constructed matrix fails validation"
        );
        let diameter = dist.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            size: m,
            dist,
            diameter,
            labels,
            coords,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Distance between points `i` and `j`.
    #[inline(always)]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }

    /// One row of the distance matrix: all distances from point `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.size..(i + 1) * self.size]
    }

    /// Largest pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    /// Attaches display labels, one per point.
    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.size {
            return Err(Error::Parameter {
                what: format!("{} labels for {} points", labels.len(), self.size),
            });
        }
        self.labels = Some(labels);
        Ok(())
    }

    /// Attaches planar coordinates, one pair per point.
    pub fn set_coords(&mut self, coords: Vec<(f64, f64)>) -> Result<()> {
        if coords.len() != self.size {
            return Err(Error::Parameter {
                what: format!("{} coordinates for {} points", coords.len(), self.size),
            });
        }
        self.coords = Some(coords);
        Ok(())
    }

    /// Display name for point `i`: its label if present, else `#i`.
    pub fn point_name(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("#{i}"),
        }
    }

    /// The matrix as owned rows (used by serialization).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.size).map(|i| self.row(i).to_vec()).collect()
    }

    /// The full matrix as one row-major slice (cheap equality comparisons).
    pub(crate) fn dist_slice(&self) -> &[f64] {
        &self.dist
    }

    /// Multiplies every distance by `c > 0`. Scaling preserves all GP[n],
    /// NP[n], and ultrametric outcomes.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Parameter {
                what: format!("scale factor must be positive and finite, got {c}"),
            });
        }
        let dist: Vec<f64> = self.dist.iter().map(|&v| c * v).collect();
        let diameter = self.diameter * c;
        Ok(Self {
            size: self.size,
            dist,
            diameter,
            labels: self.labels.clone(),
            coords: self.coords.clone(),
        })
    }

    /// Induced subspace on `indices`, in the given order. Also serves as a
    /// permutation when `indices` lists every point once. Hereditary
    /// properties (ultrametric, GP[n], NP[n]) survive restriction.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Parameter {
                what: "restriction needs at least one index".into(),
            });
        }
        let mut seen = vec![false; self.size];
        for &i in indices {
            if i >= self.size {
                return Err(Error::Parameter {
                    what: format!("index {} out of range for size {}", i, self.size),
                });
            }
            if seen[i] {
                return Err(Error::Parameter {
                    what: format!("duplicate index {i} in restriction"),
                });
            }
            seen[i] = true;
        }
        let k = indices.len();
        let mut dist = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                dist.push(self.dist(i, j));
            }
        }
        let diameter = dist.iter().cloned().fold(0.0, f64::max);
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        let coords = self
            .coords
            .as_ref()
            .map(|c| indices.iter().map(|&i| c[i]).collect());
        Ok(Self {
            size: k,
            dist,
            diameter,
            labels,
            coords,
        })
    }
}

/// A partially specified symmetric matrix: `None` entries are unknown and get
/// filled in by [`shortest_path_completion`]. The diagonal is implicitly zero.
#[derive(Debug, Clone)]
pub struct PartialMetric {
    size: usize,
    entries: Vec<Option<f64>>,
}

impl PartialMetric {
    /// An all-unknown matrix on `size` points.
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Parameter {
                what: "a partial metric needs at least one point".into(),
            });
        }
        let cap = size_cap();
        if size > cap {
            return Err(Error::Capacity {
                requested: size,
                cap,
            });
        }
        let mut entries = vec![None; size * size];
        for i in 0..size {
            entries[i * size + i] = Some(0.0);
        }
        Ok(Self { size, entries })
    }

    /// Builds from explicit optional rows; present entries must be symmetric
    /// (both sides given and equal), non-negative, and zero on the diagonal.
    pub fn from_rows(rows: &[Vec<Option<f64>>]) -> Result<Self> {
        let m = rows.len();
        let mut p = Self::new(m)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Shape {
                    detail: format!("{} rows but row {} has {} entries", m, i, row.len()),
                });
            }
        }
        for i in 0..m {
            if let Some(v) = rows[i][i] {
                if v != 0.0 {
                    return Err(Error::Parameter {
                        what: format!("diagonal entry ({i},{i}) must be 0, got {v}"),
                    });
                }
            }
            for j in i + 1..m {
                match (rows[i][j], rows[j][i]) {
                    (None, None) => {}
                    (Some(a), Some(b)) if a == b => p.set(i, j, a)?,
                    (a, b) => {
                        return Err(Error::Parameter {
                            what: format!(
                                "known entries must be symmetric: ({i},{j})={a:?}, ({j},{i})={b:?}"
                            ),
                        })
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.size + j]
    }

    /// Sets `d(i, j) = d(j, i) = v`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i == j {
            if v != 0.0 {
                return Err(Error::Parameter {
                    what: format!("diagonal entry ({i},{i}) must be 0, got {v}"),
                });
            }
            return Ok(());
        }
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Parameter {
                what: format!("entry ({i},{j}) must be a finite non-negative real, got {v}"),
            });
        }
        self.entries[i * self.size + j] = Some(v);
        self.entries[j * self.size + i] = Some(v);
        Ok(())
    }

    /// Copies a full valid block of distances from `space` onto the index set
    /// `at`, freezing `d(at[i], at[j]) = space.dist(i, j)`.
    pub fn set_block(&mut self, space: &FiniteMetricSpace, at: &[usize]) -> Result<()> {
        if at.len() != space.size() {
            return Err(Error::Parameter {
                what: format!(
                    "block of {} indices for a space of {} points",
                    at.len(),
                    space.size()
                ),
            });
        }
        for i in 0..at.len() {
            for j in i + 1..at.len() {
                self.set(at[i], at[j], space.dist(i, j))?;
            }
        }
        Ok(())
    }

    /// Connected components of the known-entry graph, each sorted.
    fn components(&self) -> Vec<Vec<usize>> {
        let m = self.size;
        let mut comp = vec![usize::MAX; m];
        let mut n_comp = 0;
        for start in 0..m {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = n_comp;
            while let Some(u) = stack.pop() {
                for v in 0..m {
                    if v != u && comp[v] == usize::MAX && self.get(u, v).is_some() {
                        comp[v] = n_comp;
                        stack.push(v);
                    }
                }
            }
            n_comp += 1;
        }
        let mut out = vec![Vec::new(); n_comp];
        for (i, &c) in comp.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Fills the unknown entries of a partial metric with shortest-path distances
/// through the known-entry graph (Floyd–Warshall), then validates the result.
///
/// Known entries that already satisfy the triangle inequality against every
/// path are preserved bit-for-bit; entries that some path undercuts are
/// shortened to the path length. A disconnected known-entry graph is an
/// error naming the components. The completion is idempotent: completing an
/// already complete valid metric changes nothing.
pub fn shortest_path_completion(partial: &PartialMetric) -> Result<FiniteMetricSpace> {
    let m = partial.size;
    let components = partial.components();
    if components.len() > 1 {
        return Err(Error::Disconnected { components });
    }
    let mut d = vec![f64::INFINITY; m * m];
    for i in 0..m {
        d[i * m + i] = 0.0;
        for j in 0..m {
            if let Some(v) = partial.get(i, j) {
                d[i * m + j] = v;
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            let dik = d[i * m + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..m {
                let through = dik + d[k * m + j];
                if through < d[i * m + j] {
                    d[i * m + j] = through;
                }
            }
        }
    }
    let rows: Vec<Vec<f64>> = (0..m).map(|i| d[i * m..(i + 1) * m].to_vec()).collect();
    let defects = validate_metric(&rows, DEFAULT_TOL_METRIC)?;
    if !defects.is_empty() {
        return Err(Error::InvalidMetric(defects));
    }
    FiniteMetricSpace::from_rows_trusted(rows, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(points: &[f64]) -> Vec<Vec<f64>> {
        points
            .iter()
            .map(|&x| points.iter().map(|&y| (x - y).abs()).collect())
            .collect()
    }

    #[test]
    fn single_point_is_valid() {
        assert!(validate_metric(&[vec![0.0]], 1e-9).unwrap().is_empty());
    }

    #[test]
    fn negative_entry_is_flagged() {
        let raw = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        let defects = validate_metric(&raw, 1e-9).unwrap();
        assert!(defects.iter().any(|d| d.kind == DefectKind::Negative));
    }

    #[test]
    fn triangle_defect_has_minimal_witness() {
        let raw = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        let defects = validate_metric(&raw, 1e-9).unwrap();
        let tri: Vec<_> = defects
            .iter()
            .filter(|d| d.kind == DefectKind::Triangle)
            .collect();
        assert_eq!(tri.len(), 1);
        assert_eq!(tri[0].indices, vec![0, 2, 1]);
        assert!((tri[0].magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_square_is_shape_error() {
        let raw = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            validate_metric(&raw, 1e-9),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn nan_is_rejected() {
        let raw = vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]];
        assert!(matches!(
            validate_metric(&raw, 1e-9),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn pseudometric_is_rejected() {
        let raw = vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let defects = validate_metric(&raw, 1e-9).unwrap();
        assert!(defects.iter().any(|d| d.kind == DefectKind::ZeroOffDiagonal));
        assert!(FiniteMetricSpace::from_rows(raw).is_err());
    }

    #[test]
    fn scale_by_one_is_identity() {
        let s = FiniteMetricSpace::from_rows(grid(&[0.0, 0.25, 1.0])).unwrap();
        let t = s.scale(1.0).unwrap();
        assert_eq!(s.rows(), t.rows());
    }

    #[test]
    fn scale_rejects_nonpositive() {
        let s = FiniteMetricSpace::from_rows(grid(&[0.0, 1.0])).unwrap();
        assert!(s.scale(0.0).is_err());
        assert!(s.scale(-2.0).is_err());
    }

    #[test]
    fn scale_doubles_euclidean_grid() {
        let s = FiniteMetricSpace::from_rows(grid(&[0.0, 0.5, 1.0])).unwrap();
        let t = s.scale(2.0).unwrap();
        let expect = grid(&[0.0, 1.0, 2.0]);
        for i in 0..3 {
            for j in 0..3 {
                assert!((t.dist(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn restrict_to_all_indices_is_identity() {
        let s = FiniteMetricSpace::from_rows(grid(&[0.0, 0.3, 0.7, 1.0])).unwrap();
        let t = s.restrict(&[0, 1, 2, 3]).unwrap();
        assert_eq!(s.rows(), t.rows());
    }

    #[test]
    fn restrict_rejects_bad_indices() {
        let s = FiniteMetricSpace::from_rows(grid(&[0.0, 1.0])).unwrap();
        assert!(s.restrict(&[0, 2]).is_err());
        assert!(s.restrict(&[0, 0]).is_err());
    }

    #[test]
    fn completion_of_complete_metric_is_identity() {
        let rows = grid(&[0.0, 0.25, 0.75, 1.0]);
        let opt_rows: Vec<Vec<Option<f64>>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Some(v)).collect())
            .collect();
        let p = PartialMetric::from_rows(&opt_rows).unwrap();
        let done = shortest_path_completion(&p).unwrap();
        assert_eq!(done.rows(), rows);
    }

    #[test]
    fn completion_fills_path_sum() {
        let mut p = PartialMetric::new(3).unwrap();
        p.set(0, 1, 1.0).unwrap();
        p.set(1, 2, 1.0).unwrap();
        let done = shortest_path_completion(&p).unwrap();
        assert_eq!(done.dist(0, 2), 2.0);
    }

    #[test]
    fn disconnected_graph_names_components() {
        let mut p = PartialMetric::new(4).unwrap();
        p.set(0, 1, 1.0).unwrap();
        p.set(2, 3, 1.0).unwrap();
        match shortest_path_completion(&p) {
            Err(Error::Disconnected { components }) => {
                assert_eq!(components, vec![vec![0, 1], vec![2, 3]]);
            }
            other => panic!("expected disconnected error, got {other:?}"),
        }
    }

    #[test]
    fn completion_is_idempotent() {
        let mut p = PartialMetric::new(5).unwrap();
        // A ragged star: completion has real work to do.
        p.set(0, 1, 0.7).unwrap();
        p.set(0, 2, 1.1).unwrap();
        p.set(0, 3, 0.4).unwrap();
        p.set(3, 4, 0.9).unwrap();
        p.set(1, 2, 2.5).unwrap(); // undercut by the path through 0
        let done = shortest_path_completion(&p).unwrap();
        assert!((done.dist(1, 2) - 1.8).abs() < 1e-12);
        let opt_rows: Vec<Vec<Option<f64>>> = done
            .rows()
            .iter()
            .map(|r| r.iter().map(|&v| Some(v)).collect())
            .collect();
        let again =
            shortest_path_completion(&PartialMetric::from_rows(&opt_rows).unwrap()).unwrap();
        assert_eq!(done.rows(), again.rows());
    }

    #[test]
    fn size_cap_is_enforced() {
        std::env::remove_var("METRIC_PROPS_MAX_SIZE");
        assert_eq!(size_cap(), 4096);
    }
}
