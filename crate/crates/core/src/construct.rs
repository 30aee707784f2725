//! Constructors for the concrete spaces the toolkit studies: Euclidean
//! interval grids, the two metrics on a discretized triode, max-metric
//! products, two-level interval spaces, samples of finitely-supported
//! group-valued functions under the sup-difference ultrametric, ultrametric
//! one-point extensions, and seeded random generators.
//!
//! All constructors return validated [`FiniteMetricSpace`] values with
//! coordinates and labels attached where a natural embedding exists.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{size_cap, FiniteMetricSpace, PartialMetric};

/// `m` equally spaced points of `[a, b]` under `d(x, y) = |x - y|`.
///
/// Coordinates are computed as `(a*(m-1-i) + b*i) / (m-1)` so both endpoints
/// are hit exactly and the grid is monotone.
pub fn euclidean_interval(a: f64, b: f64, m: usize) -> Result<FiniteMetricSpace> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Parameter {
            what: format!("interval endpoints must satisfy a < b, got [{a}, {b}]"),
        });
    }
    if m < 2 {
        return Err(Error::Parameter {
            what: format!("interval grid needs at least 2 points, got {m}"),
        });
    }
    let ts: Vec<f64> = (0..m)
        .map(|i| (a * ((m - 1 - i) as f64) + b * (i as f64)) / ((m - 1) as f64))
        .collect();
    let rows: Vec<Vec<f64>> = ts
        .iter()
        .map(|&x| ts.iter().map(|&y| (x - y).abs()).collect())
        .collect();
    let coords = ts.iter().map(|&t| (t, 0.0)).collect();
    FiniteMetricSpace::from_rows_trusted(rows, None, Some(coords))
}

/// Sign class of a triode point: points with zero real part (the junction and
/// the whole imaginary arm) form their own class.
#[derive(PartialEq, Eq, Clone, Copy)]
enum SignClass {
    Neg,
    Zero,
    Pos,
}

fn sign_class(re: f64) -> SignClass {
    if re < 0.0 {
        SignClass::Neg
    } else if re > 0.0 {
        SignClass::Pos
    } else {
        SignClass::Zero
    }
}

/// Grid coordinates shared by both triode metrics: index 0 is the junction
/// `0`; indices `1..=m` walk the left arm `-1/m ... -1`; `m+1..=2m` the right
/// arm `1/m ... 1`; `2m+1..=3m` the imaginary arm `i/m ... i`. Arms exclude
/// the junction so every point appears exactly once.
fn triode_points(m: usize) -> Vec<(f64, f64)> {
    let mf = m as f64;
    let mut pts = vec![(0.0, 0.0)];
    pts.extend((1..=m).map(|j| (-(j as f64) / mf, 0.0)));
    pts.extend((1..=m).map(|j| (j as f64 / mf, 0.0)));
    pts.extend((1..=m).map(|j| (0.0, j as f64 / mf)));
    pts
}

fn triode_labels(pts: &[(f64, f64)]) -> Vec<String> {
    pts.iter()
        .map(|&(re, im)| {
            if im == 0.0 {
                format!("{re}")
            } else if re == 0.0 {
                format!("{im}i")
            } else {
                format!("{re}+{im}i")
            }
        })
        .collect()
}

fn triode_space(m: usize, dist: impl Fn((f64, f64), (f64, f64)) -> f64) -> Result<FiniteMetricSpace> {
    if m < 2 {
        return Err(Error::Parameter {
            what: format!("triode grid needs at least 2 points per arm, got {m}"),
        });
    }
    let pts = triode_points(m);
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|&p| pts.iter().map(|&q| dist(p, q)).collect())
        .collect();
    let labels = triode_labels(&pts);
    FiniteMetricSpace::from_rows_trusted(rows, Some(labels), Some(pts))
}

/// Discretized triode (`3m + 1` points, see [`triode_bar_indices`] for the
/// layout) under the two-case metric: same sign class uses `|z - z'|`,
/// different classes use `max{|Re z|, |Re z'|, Im z, Im z'}`.
///
/// Within a sign class all points are collinear along an axis, so `|z - z'|`
/// is evaluated exactly as `max(|dx|, |dy|)` with no square root.
pub fn triode_rho(m: usize) -> Result<FiniteMetricSpace> {
    triode_space(m, |(re_a, im_a), (re_b, im_b)| {
        if sign_class(re_a) == sign_class(re_b) {
            (re_a - re_b).abs().max((im_a - im_b).abs())
        } else {
            re_a.abs().max(re_b.abs()).max(im_a).max(im_b)
        }
    })
}

/// Discretized triode under the intrinsic shortest-path metric: points on a
/// common arm (the two real arms form one segment through the junction) are
/// at their coordinate distance; paths between different arms pass through
/// the junction and add the two arm offsets.
pub fn triode_path(m: usize) -> Result<FiniteMetricSpace> {
    triode_space(m, |(re_a, im_a), (re_b, im_b)| {
        if im_a == 0.0 && im_b == 0.0 {
            (re_a - re_b).abs()
        } else if re_a == 0.0 && re_b == 0.0 {
            (im_a - im_b).abs()
        } else {
            // One point on the bar, one on the imaginary arm.
            (re_a.abs() + im_a) + (re_b.abs() + im_b)
        }
    })
}

/// Indices of the triode's bar (`[-1, 1]`) in ascending coordinate order;
/// restricting [`triode_path`] to them reproduces
/// `euclidean_interval(-1, 1, 2m+1)` distance-for-distance.
pub fn triode_bar_indices(m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=m).rev().collect();
    idx.push(0);
    idx.extend(m + 1..=2 * m);
    idx
}

/// Indices of the triode's imaginary arm in ascending height order
/// (junction excluded).
pub fn triode_imaginary_indices(m: usize) -> Vec<usize> {
    (2 * m + 1..=3 * m).collect()
}

/// Product of two spaces under `d((x,y),(x',y')) = max{d_X(x,x'), d_Y(y,y')}`,
/// with points ordered x-major: index `ix * |Y| + iy`.
pub fn max_product(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    let n = x
        .size()
        .checked_mul(y.size())
        .filter(|&n| n <= size_cap())
        .ok_or(Error::Capacity {
            requested: x.size().saturating_mul(y.size()),
            cap: size_cap(),
        })?;
    let mut rows = vec![vec![0.0; n]; n];
    for ix in 0..x.size() {
        for iy in 0..y.size() {
            let a = ix * y.size() + iy;
            for jx in 0..x.size() {
                for jy in 0..y.size() {
                    let b = jx * y.size() + jy;
                    rows[a][b] = x.dist(ix, jx).max(y.dist(iy, jy));
                }
            }
        }
    }
    let labels = match (x.labels(), y.labels()) {
        (Some(xl), Some(yl)) => Some(
            (0..x.size())
                .flat_map(|ix| (0..y.size()).map(move |iy| format!("({},{})", xl[ix], yl[iy])))
                .collect(),
        ),
        _ => None,
    };
    FiniteMetricSpace::from_rows_trusted(rows, labels, None)
}

/// Two horizontal copies of the interval grid at heights `0` and `a` under
/// the max metric: `2m` points, point `2i` at `(t_i, 0)` and `2i + 1` at
/// `(t_i, a)`. Equals `max_product(euclidean_interval(-1,1,m), {0,a})`
/// entry-for-entry; coordinates store `(t, level)`.
pub fn i_space(a: f64, m: usize) -> Result<FiniteMetricSpace> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Parameter {
            what: format!("level separation must be positive, got {a}"),
        });
    }
    let base = euclidean_interval(-1.0, 1.0, m)?;
    let two = FiniteMetricSpace::from_rows(vec![vec![0.0, a], vec![a, 0.0]])?;
    let mut space = max_product(&base, &two)?;
    let coords: Vec<(f64, f64)> = (0..m)
        .flat_map(|i| {
            let t = base.coords().expect("interval coords")[i].0;
            [(t, 0.0), (t, a)]
        })
        .collect();
    let labels = coords
        .iter()
        .map(|&(t, lvl)| format!("({t},{lvl})"))
        .collect();
    space.set_coords(coords)?;
    space.set_labels(labels)?;
    Ok(space)
}

/// A seeded sample of finitely-supported functions from a level set into a
/// cyclic group, together with the data needed to act on it by translations.
#[derive(Debug, Clone)]
pub struct LmSample {
    pub space: FiniteMetricSpace,
    /// `values[p][l]` is point `p`'s group value at `levels[l]`.
    pub values: Vec<Vec<u32>>,
    /// Ascending, distinct, positive.
    pub levels: Vec<f64>,
    pub group_order: u32,
}

/// Distance between two value vectors: the largest level at which they
/// differ, `0.0` if equal.
pub fn lm_distance(a: &[u32], b: &[u32], levels: &[f64]) -> f64 {
    for l in (0..levels.len()).rev() {
        if a[l] != b[l] {
            return levels[l];
        }
    }
    0.0
}

impl LmSample {
    /// Applies the translation carrying point `from` to point `to` (pointwise
    /// addition of the value difference, mod the group order) to every
    /// sampled point, returning the translated value vectors in sample order.
    pub fn translate(&self, from: usize, to: usize) -> Vec<Vec<u32>> {
        let delta: Vec<u32> = self.values[to]
            .iter()
            .zip(&self.values[from])
            .map(|(&t, &f)| (t + self.group_order - f) % self.group_order)
            .collect();
        self.values
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&delta)
                    .map(|(&x, &d)| (x + d) % self.group_order)
                    .collect()
            })
            .collect()
    }
}

/// Samples `m` distinct functions from the level set into the cyclic group of
/// order `group_order`, metrized by the largest level of disagreement (an
/// ultrametric). See [`lm_sample`] for the plain-space form.
///
/// Small function universes (at most 8192 members) are enumerated and
/// shuffled so sampling cannot stall; larger ones use rejection sampling of
/// independent uniform values.
pub fn lm_sample_detailed(
    group_order: u32,
    levels: &[f64],
    m: usize,
    seed: u64,
) -> Result<LmSample> {
    if group_order < 2 {
        return Err(Error::Parameter {
            what: format!("group order must be at least 2, got {group_order}"),
        });
    }
    if levels.is_empty() {
        return Err(Error::Parameter {
            what: "level set must be non-empty".into(),
        });
    }
    if m == 0 {
        return Err(Error::Parameter {
            what: "sample size must be positive".into(),
        });
    }
    let mut sorted = levels.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    if sorted.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::Parameter {
            what: "levels must be positive and finite".into(),
        });
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parameter {
            what: "levels must be distinct".into(),
        });
    }
    let total = (group_order as u128).checked_pow(sorted.len() as u32);
    if total.map_or(false, |t| (m as u128) > t) {
        return Err(Error::Capacity {
            requested: m,
            cap: total.unwrap().min(usize::MAX as u128) as usize,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<Vec<u32>> = match total {
        Some(t) if t <= 8192 => {
            let mut all: Vec<Vec<u32>> = Vec::with_capacity(t as usize);
            let mut current = vec![0u32; sorted.len()];
            loop {
                all.push(current.clone());
                let mut l = 0;
                loop {
                    if l == current.len() {
                        break;
                    }
                    current[l] += 1;
                    if current[l] < group_order {
                        break;
                    }
                    current[l] = 0;
                    l += 1;
                }
                if l == current.len() {
                    break;
                }
            }
            all.shuffle(&mut rng);
            all.truncate(m);
            all
        }
        _ => {
            let mut seen = std::collections::HashSet::new();
            let mut picked = Vec::with_capacity(m);
            while picked.len() < m {
                let f: Vec<u32> = (0..sorted.len())
                    .map(|_| rng.gen_range(0..group_order))
                    .collect();
                if seen.insert(f.clone()) {
                    picked.push(f);
                }
            }
            picked
        }
    };
    let rows: Vec<Vec<f64>> = values
        .iter()
        .map(|a| values.iter().map(|b| lm_distance(a, b, &sorted)).collect())
        .collect();
    let labels = values
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    let space = FiniteMetricSpace::from_rows_trusted(rows, Some(labels), None)?;
    Ok(LmSample {
        space,
        values,
        levels: sorted,
        group_order,
    })
}

/// Plain-space form of [`lm_sample_detailed`]: labels encode each point's
/// group values at the ascending levels, joined by `|`.
pub fn lm_sample(group_order: u32, levels: &[f64], m: usize, seed: u64) -> Result<FiniteMetricSpace> {
    Ok(lm_sample_detailed(group_order, levels, m, seed)?.space)
}

/// Adds `extra` new points to an ultrametric space, each at distance `big` to
/// every other point. The first `|a|` indices reproduce `a` exactly, and the
/// result is again ultrametric (every new triangle is isosceles with the two
/// largest sides equal to `big`).
///
/// The base space is verified to satisfy the strong triangle inequality
/// (cubic cost in its size); `big` below the diameter is rejected because the
/// extension would break it.
pub fn ultrametric_extend(a: &FiniteMetricSpace, extra: usize, big: f64) -> Result<FiniteMetricSpace> {
    if extra == 0 {
        return Err(Error::Parameter {
            what: "extension needs at least one new point".into(),
        });
    }
    if !big.is_finite() || big < a.diameter() || big <= 0.0 {
        return Err(Error::Parameter {
            what: format!(
                "extension distance {big} must be positive and at least the diameter {}",
                a.diameter()
            ),
        });
    }
    let report = crate::check::check_ultrametric(a);
    if !report.holds {
        return Err(Error::Parameter {
            what: "base space does not satisfy the strong triangle inequality".into(),
        });
    }
    let m = a.size();
    let n = m + extra;
    if n > size_cap() {
        return Err(Error::Capacity {
            requested: n,
            cap: size_cap(),
        });
    }
    let mut rows = vec![vec![big; n]; n];
    for i in 0..m {
        for j in 0..m {
            rows[i][j] = a.dist(i, j);
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let labels = a.labels().map(|labels| {
        let mut labels = labels.to_vec();
        labels.extend((0..extra).map(|k| format!("ext{k}")));
        labels
    });
    FiniteMetricSpace::from_rows_trusted(rows, labels, None)
}

/// Random ultrametric on `m` points from a random binary merge tree with
/// strictly increasing merge heights: points in clusters merged at height `h`
/// are at distance `h` across the merge.
pub fn random_ultrametric(m: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if m == 0 {
        return Err(Error::Parameter {
            what: "space must have at least one point".into(),
        });
    }
    if m > size_cap() {
        return Err(Error::Capacity {
            requested: m,
            cap: size_cap(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; m]; m];
    let mut clusters: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    let mut height = 0.0;
    while clusters.len() > 1 {
        height += rng.gen_range(0.1..1.0);
        let a = rng.gen_range(0..clusters.len());
        let mut b = rng.gen_range(0..clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        let (keep, absorb) = (a.min(b), a.max(b));
        let absorbed = clusters.remove(absorb);
        for &i in &absorbed {
            for &j in &clusters[keep] {
                rows[i][j] = height;
                rows[j][i] = height;
            }
        }
        clusters[keep].extend(absorbed);
    }
    FiniteMetricSpace::from_rows_trusted(rows, None, None)
}

/// Random metric on `m` points: symmetric entries drawn uniformly from
/// `[0.5, 2.0]`, repaired to a true metric by shortest-path completion.
pub fn random_metric(m: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if m == 0 {
        return Err(Error::Parameter {
            what: "space must have at least one point".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partial = PartialMetric::new(m)?;
    for i in 0..m {
        for j in i + 1..m {
            partial.set(i, j, rng.gen_range(0.5..2.0))?;
        }
    }
    crate::space::shortest_path_completion(&partial)
}
