//! Injective maps between finite metric spaces: Lipschitz constants,
//! distortion, similarity detection, exhaustive isometric-embedding search,
//! and the sup-distance between maps with a common domain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// An injective map between two spaces, given by the codomain index of each
/// domain point.
#[derive(Debug, Clone)]
pub struct PointMap<'a> {
    domain: &'a FiniteMetricSpace,
    codomain: &'a FiniteMetricSpace,
    image: Vec<usize>,
}

/// Largest and smallest pairwise expansion of a map, with the pairs that
/// attain them.
#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    /// Lipschitz constant of the map: the largest codomain/domain ratio.
    pub forward: f64,
    /// Domain pair attaining `forward`.
    pub forward_argmax: (usize, usize),
    /// Lipschitz constant of the inverse (on the image).
    pub inverse: f64,
    /// Domain pair attaining `inverse` (largest domain/codomain ratio).
    pub inverse_argmax: (usize, usize),
    /// `forward * inverse`; 1 for maps from fewer than two points.
    pub distortion: f64,
}

/// Outcome of a similarity test: whether all pair ratios agree within the
/// tolerance, and the representative ratio (the Lipschitz constant).
#[derive(Debug, Clone, Serialize)]
pub struct SimilarityCheck {
    pub is_similarity: bool,
    pub ratio: f64,
}

impl<'a> PointMap<'a> {
    pub fn new(
        domain: &'a FiniteMetricSpace,
        codomain: &'a FiniteMetricSpace,
        image: Vec<usize>,
    ) -> Result<Self> {
        if image.len() != domain.size() {
            return Err(Error::Parameter {
                what: format!(
                    "image has {} entries for a domain of {} points",
                    image.len(),
                    domain.size()
                ),
            });
        }
        let mut seen = vec![false; codomain.size()];
        for &y in &image {
            if y >= codomain.size() {
                return Err(Error::Parameter {
                    what: format!("image index {y} out of range for codomain of {}", codomain.size()),
                });
            }
            if seen[y] {
                return Err(Error::Parameter {
                    what: format!("image index {y} repeats; maps must be injective"),
                });
            }
            seen[y] = true;
        }
        Ok(Self {
            domain,
            codomain,
            image,
        })
    }

    /// The identity map of a space onto itself.
    pub fn identity(space: &'a FiniteMetricSpace) -> Self {
        Self {
            domain: space,
            codomain: space,
            image: (0..space.size()).collect(),
        }
    }

    pub fn domain(&self) -> &FiniteMetricSpace {
        self.domain
    }

    pub fn codomain(&self) -> &FiniteMetricSpace {
        self.codomain
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Largest ratio `d(f(x), f(x')) / d(x, x')` over all pairs, or `None`
    /// for domains with fewer than two points (no pair exists).
    pub fn lipschitz_constant(&self) -> Option<f64> {
        self.distortion_report().map(|r| r.forward)
    }

    /// Both Lipschitz constants with their attaining pairs; `None` for
    /// domains with fewer than two points.
    pub fn distortion_report(&self) -> Option<DistortionReport> {
        let m = self.domain.size();
        if m < 2 {
            return None;
        }
        let mut forward = f64::NEG_INFINITY;
        let mut inverse = f64::NEG_INFINITY;
        let mut forward_argmax = (0, 0);
        let mut inverse_argmax = (0, 0);
        for i in 0..m {
            for j in i + 1..m {
                let dd = self.domain.dist(i, j);
                let dc = self.codomain.dist(self.image[i], self.image[j]);
                let f = dc / dd;
                if f > forward {
                    forward = f;
                    forward_argmax = (i, j);
                }
                let g = dd / dc;
                if g > inverse {
                    inverse = g;
                    inverse_argmax = (i, j);
                }
            }
        }
        Some(DistortionReport {
            forward,
            forward_argmax,
            inverse,
            inverse_argmax,
            distortion: forward * inverse,
        })
    }

    /// `Dist(f)`: the product of the forward and inverse Lipschitz constants;
    /// maps from fewer than two points have distortion 1 by convention.
    pub fn distortion(&self) -> f64 {
        match self.distortion_report() {
            Some(r) => r.distortion,
            None => 1.0,
        }
    }

    /// True when every pair is expanded by the same factor, up to `tol`
    /// (compared as the spread between the largest and smallest ratio).
    pub fn is_similarity(&self, tol: f64) -> SimilarityCheck {
        match self.distortion_report() {
            Some(r) => SimilarityCheck {
                // forward = max ratio, 1/inverse = min ratio.
                is_similarity: r.forward - 1.0 / r.inverse <= tol,
                ratio: r.forward,
            },
            None => SimilarityCheck {
                is_similarity: true,
                ratio: 1.0,
            },
        }
    }
}

/// Default tolerance for isometric-embedding search: `1e-9` times the
/// codomain diameter.
pub fn default_isometry_tol(codomain: &FiniteMetricSpace) -> f64 {
    1e-9 * codomain.diameter()
}

/// Exhaustive backtracking search for a distance-preserving injection of `a`
/// into `x` (every pair distance matched within `tol`). Returns the first map
/// found under a deterministic order, or `None` — and with `tol = 0` on exact
/// data, `None` proves no isometric copy exists.
///
/// Domain points are placed most-constrained-first (decreasing distance sum);
/// candidate codomain points are tried in ascending index and pruned against
/// all previously placed points.
pub fn find_isometric_embedding<'a>(
    a: &'a FiniteMetricSpace,
    x: &'a FiniteMetricSpace,
    tol: f64,
) -> Option<PointMap<'a>> {
    let m = a.size();
    let n = x.size();
    if m > n {
        return None;
    }
    let mut order: Vec<usize> = (0..m).collect();
    let sums: Vec<f64> = (0..m).map(|i| a.row(i).iter().sum()).collect();
    order.sort_by(|&p, &q| {
        sums[q]
            .partial_cmp(&sums[p])
            .expect("finite distances")
            .then(p.cmp(&q))
    });
    let mut assigned: Vec<usize> = vec![usize::MAX; m];
    let mut used = vec![false; n];

    fn place(
        a: &FiniteMetricSpace,
        x: &FiniteMetricSpace,
        tol: f64,
        order: &[usize],
        depth: usize,
        assigned: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let p = order[depth];
        'candidates: for y in 0..x.size() {
            if used[y] {
                continue;
            }
            for &q in &order[..depth] {
                if (a.dist(p, q) - x.dist(y, assigned[q])).abs() > tol {
                    continue 'candidates;
                }
            }
            assigned[p] = y;
            used[y] = true;
            if place(a, x, tol, order, depth + 1, assigned, used) {
                return true;
            }
            assigned[p] = usize::MAX;
            used[y] = false;
        }
        false
    }

    if place(a, x, tol, &order, 0, &mut assigned, &mut used) {
        Some(PointMap {
            domain: a,
            codomain: x,
            image: assigned,
        })
    } else {
        None
    }
}

/// `sup_t d(f(t), g(t))` for two maps with the same domain size and one
/// codomain geometry.
pub fn map_sup_distance(f: &PointMap, g: &PointMap) -> Result<f64> {
    if f.domain.size() != g.domain.size() {
        return Err(Error::Parameter {
            what: "maps have different domains".into(),
        });
    }
    if f.codomain.size() != g.codomain.size()
        || f.codomain.dist_slice() != g.codomain.dist_slice()
    {
        return Err(Error::Parameter {
            what: "maps have different codomains".into(),
        });
    }
    let mut sup: f64 = 0.0;
    for t in 0..f.domain.size() {
        sup = sup.max(f.codomain.dist(f.image[t], g.image[t]));
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{
        euclidean_interval, i_space, random_ultrametric, triode_bar_indices, triode_rho,
    };

    #[test]
    fn identity_has_unit_constants() {
        let s = euclidean_interval(0.0, 1.0, 7).unwrap();
        let id = PointMap::identity(&s);
        assert_eq!(id.lipschitz_constant(), Some(1.0));
        assert_eq!(id.distortion(), 1.0);
        let sim = id.is_similarity(0.0);
        assert!(sim.is_similarity);
        assert_eq!(sim.ratio, 1.0);
    }

    #[test]
    fn rescaling_map_has_reciprocal_constant() {
        let wide = euclidean_interval(0.0, 4.0, 5).unwrap();
        let unit = euclidean_interval(0.0, 1.0, 5).unwrap();
        let f = PointMap::new(&wide, &unit, (0..5).collect()).unwrap();
        assert_eq!(f.lipschitz_constant(), Some(0.25));
        assert_eq!(f.distortion(), 1.0);
        let sim = f.is_similarity(1e-12);
        assert!(sim.is_similarity);
        assert_eq!(sim.ratio, 0.25);
    }

    #[test]
    fn scaled_space_identity_is_a_similarity() {
        let s = euclidean_interval(0.0, 1.0, 6).unwrap();
        let scaled = s.scale(3.0).unwrap();
        let f = PointMap::new(&s, &scaled, (0..6).collect()).unwrap();
        let sim = f.is_similarity(1e-12);
        assert!(sim.is_similarity);
        assert!((sim.ratio - 3.0).abs() < 1e-12);
        assert!((f.distortion() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bar_into_two_case_triode_has_distortion_two() {
        let m = 10;
        let bar = euclidean_interval(-1.0, 1.0, 2 * m + 1).unwrap();
        let rho = triode_rho(m).unwrap();
        let f = PointMap::new(&bar, &rho, triode_bar_indices(m)).unwrap();
        let report = f.distortion_report().unwrap();
        assert_eq!(report.forward, 1.0);
        assert_eq!(report.inverse, 2.0);
        assert_eq!(report.distortion, 2.0);
        assert!(!f.is_similarity(1e-9).is_similarity);
        // The largest contraction happens across the junction at (-x, x).
        let (i, j) = report.inverse_argmax;
        let ci = bar.coords().unwrap()[i].0;
        let cj = bar.coords().unwrap()[j].0;
        assert_eq!(ci, -cj);
    }

    #[test]
    fn restriction_embeds_isometrically() {
        let x = random_ultrametric(12, 99).unwrap();
        let a = x.restrict(&[2, 3, 7, 11]).unwrap();
        let f = find_isometric_embedding(&a, &x, 0.0).expect("inclusion exists");
        assert_eq!(f.distortion(), 1.0);
    }

    #[test]
    fn line_never_embeds_into_an_ultrametric_space() {
        let a = euclidean_interval(0.0, 1.0, 5).unwrap();
        let x = random_ultrametric(30, 4).unwrap();
        assert!(find_isometric_embedding(&a, &x, 1e-9).is_none());
    }

    #[test]
    fn coarse_two_level_grid_embeds_into_fine() {
        let a = i_space(0.1, 5).unwrap();
        let x = i_space(0.1, 9).unwrap();
        let f = find_isometric_embedding(&a, &x, 0.0).expect("sub-grid copy exists");
        assert_eq!(f.distortion(), 1.0);
    }

    #[test]
    fn sup_distance_of_shifted_grid_maps() {
        // A 9-point unit grid has step 1/8, so consecutive distances are
        // exact and the sup below is a clean equality.
        let grid = euclidean_interval(0.0, 1.0, 9).unwrap();
        let domain = euclidean_interval(0.0, 1.0, 5).unwrap();
        let f = PointMap::new(&domain, &grid, vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(map_sup_distance(&f, &f).unwrap(), 0.0);
        let g = PointMap::new(&domain, &grid, vec![1, 2, 3, 4, 5]).unwrap();
        let step = grid.dist(0, 1);
        assert_eq!(map_sup_distance(&f, &g).unwrap(), step);
    }

    #[test]
    fn mismatched_codomains_are_rejected() {
        let a = euclidean_interval(0.0, 1.0, 3).unwrap();
        let x = euclidean_interval(0.0, 1.0, 5).unwrap();
        let y = euclidean_interval(0.0, 2.0, 5).unwrap();
        let f = PointMap::new(&a, &x, vec![0, 1, 2]).unwrap();
        let g = PointMap::new(&a, &y, vec![0, 1, 2]).unwrap();
        assert!(map_sup_distance(&f, &g).is_err());
    }
}
