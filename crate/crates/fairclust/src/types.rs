//! Domain types shared by the whole pipeline: datasets with color models,
//! metric and objective evaluation, and fairness-violation accounting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities per point must sum to 1 within this tolerance; inputs inside
/// the tolerance are renormalized, anything further off is rejected.
pub const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Point {
    pub id: usize,
    pub coords: Vec<f64>,
    /// Deterministic color label, if the color model is deterministic.
    pub color: Option<usize>,
    /// Marginal probability per color, if the color model is probabilistic.
    pub color_probs: Option<Vec<f64>>,
    /// Metric-membership value r_j in 0..=R, if that model is in use.
    pub value: Option<u64>,
}

impl Point {
    pub fn new(id: usize, coords: Vec<f64>) -> Self {
        Point { id, coords, color: None, color_probs: None, value: None }
    }

    pub fn with_color(mut self, color: usize) -> Self {
        self.color = Some(color);
        self
    }

    pub fn with_probs(mut self, probs: Vec<f64>) -> Self {
        self.color_probs = Some(probs);
        self
    }

    pub fn with_value(mut self, value: u64) -> Self {
        self.value = Some(value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorModel {
    Deterministic { num_colors: usize },
    Probabilistic { num_colors: usize },
    /// Ordered fairness attribute with integer values in 0..=r_max.
    MetricMembership { r_max: u64 },
}

impl ColorModel {
    /// Number of fairness "channels": one per color, or a single channel for
    /// metric membership.
    pub fn channels(&self) -> usize {
        match self {
            ColorModel::Deterministic { num_colors } => *num_colors,
            ColorModel::Probabilistic { num_colors } => *num_colors,
            ColorModel::MetricMembership { .. } => 1,
        }
    }

    pub fn is_metric(&self) -> bool {
        matches!(self, ColorModel::MetricMembership { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<Point>,
    pub color_model: ColorModel,
    dim: usize,
}

impl Dataset {
    pub fn new(points: Vec<Point>, color_model: ColorModel) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("empty dataset".into()));
        }
        let dim = points[0].coords.len();
        if dim == 0 {
            return Err(Error::Input("points must have dimensionality >= 1".into()));
        }
        let mut points = points;
        for p in &mut points {
            if p.coords.len() != dim {
                return Err(Error::Input(format!(
                    "point {} has {} coordinates, expected {}",
                    p.id,
                    p.coords.len(),
                    dim
                )));
            }
            match color_model {
                ColorModel::Deterministic { num_colors } => {
                    let c = p.color.ok_or_else(|| {
                        Error::Input(format!("point {} lacks a color label", p.id))
                    })?;
                    if c >= num_colors {
                        return Err(Error::Input(format!(
                            "point {} has color {} outside 0..{}",
                            p.id, c, num_colors
                        )));
                    }
                }
                ColorModel::Probabilistic { num_colors } => {
                    let probs = p.color_probs.as_mut().ok_or_else(|| {
                        Error::Input(format!("point {} lacks color probabilities", p.id))
                    })?;
                    if probs.len() != num_colors {
                        return Err(Error::Input(format!(
                            "point {} has {} marginals, expected {}",
                            p.id,
                            probs.len(),
                            num_colors
                        )));
                    }
                    if probs.iter().any(|&q| !(0.0..=1.0 + PROB_SUM_TOL).contains(&q)) {
                        return Err(Error::Input(format!(
                            "point {} has a marginal outside [0,1]",
                            p.id
                        )));
                    }
                    let sum: f64 = probs.iter().sum();
                    if (sum - 1.0).abs() > PROB_SUM_TOL {
                        return Err(Error::Input(format!(
                            "point {} marginals sum to {}, expected 1",
                            p.id, sum
                        )));
                    }
                    for q in probs.iter_mut() {
                        *q /= sum;
                    }
                }
                ColorModel::MetricMembership { r_max } => {
                    let v = p.value.ok_or_else(|| {
                        Error::Input(format!("point {} lacks a membership value", p.id))
                    })?;
                    if v > r_max {
                        return Err(Error::Input(format!(
                            "point {} has value {} > R = {}",
                            p.id, v, r_max
                        )));
                    }
                }
            }
        }
        Ok(Dataset { points, color_model, dim })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Euclidean distance between two points of this dataset.
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        euclidean(&self.points[a].coords, &self.points[b].coords)
    }

    /// Color mass contributed by point `j` on channel `h`: the marginal
    /// p_j^h (an indicator for deterministic colors) or the value r_j for
    /// metric membership.
    pub fn marginal(&self, j: usize, h: usize) -> f64 {
        let p = &self.points[j];
        match self.color_model {
            ColorModel::Deterministic { .. } => {
                if p.color == Some(h) {
                    1.0
                } else {
                    0.0
                }
            }
            ColorModel::Probabilistic { .. } => p.color_probs.as_ref().unwrap()[h],
            ColorModel::MetricMembership { .. } => p.value.unwrap() as f64,
        }
    }

    /// Total color mass per channel over the whole dataset.
    pub fn total_mass(&self) -> Vec<f64> {
        let ch = self.color_model.channels();
        let mut out = vec![0.0; ch];
        for j in 0..self.n() {
            for (h, slot) in out.iter_mut().enumerate() {
                *slot += self.marginal(j, h);
            }
        }
        out
    }
}

/// Min-max scale each column into [0,1]; constant columns map to all-zeros.
pub fn normalize_features(raw: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if raw.is_empty() {
        return Err(Error::Input("empty dataset".into()));
    }
    let dim = raw[0].len();
    for row in raw {
        if row.len() != dim {
            return Err(Error::Input("ragged feature matrix".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite feature value".into()));
        }
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for row in raw {
        for (c, &v) in row.iter().enumerate() {
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
        }
    }
    let out = raw
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, &v)| {
                    if hi[c] > lo[c] {
                        (v - lo[c]) / (hi[c] - lo[c])
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(out)
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distance with an explicit dimensionality check.
pub fn distance(a: &Point, b: &Point) -> Result<f64> {
    if a.coords.len() != b.coords.len() {
        return Err(Error::Input(format!(
            "dimensionality mismatch: {} vs {}",
            a.coords.len(),
            b.coords.len()
        )));
    }
    Ok(euclidean(&a.coords, &b.coords))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    KCenter,
    KMedian,
    KMeans,
}

impl std::str::FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kcenter" => Ok(Self::KCenter),
            "kmedian" => Ok(Self::KMedian),
            "kmeans" => Ok(Self::KMeans),
            other => Err(format!("unknown objective {other:?}")),
        }
    }
}

impl Objective {
    /// Per-edge assignment cost used by the LP and the flow network.
    pub fn edge_cost(&self, d: f64) -> f64 {
        match self {
            // Either d or d^2 works for k-center; d is used and recorded in
            // run metadata.
            Objective::KCenter => d,
            Objective::KMedian => d,
            Objective::KMeans => d * d,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub objective: Objective,
    pub k: usize,
}

impl ObjectiveSpec {
    pub fn new(objective: Objective, k: usize) -> Self {
        ObjectiveSpec { objective, k }
    }
}

/// Per-color (or scalar, for metric membership) lower/upper bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FairnessSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Derivation parameter used when the bounds came from dataset
    /// proportions; retained for reports.
    pub delta: f64,
}

impl FairnessSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, delta: f64) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Input("bounds must be nonempty and same length".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite()) || *l < 0.0 || l > u {
                return Err(Error::Input(format!("bad bound pair ({l}, {u})")));
            }
        }
        Ok(FairnessSpec { lower, upper, delta })
    }

    /// Check shape compatibility against a color model. Proportion bounds must
    /// sit in (0,1); metric-membership bounds in [0, R].
    pub fn validate_for(&self, model: &ColorModel) -> Result<()> {
        if self.lower.len() != model.channels() {
            return Err(Error::Input(format!(
                "spec has {} channels, color model has {}",
                self.lower.len(),
                model.channels()
            )));
        }
        match model {
            ColorModel::MetricMembership { r_max } => {
                if self.upper[0] > *r_max as f64 {
                    return Err(Error::Input(format!(
                        "upper bound {} exceeds R = {}",
                        self.upper[0], r_max
                    )));
                }
            }
            _ => {
                for (l, u) in self.lower.iter().zip(&self.upper) {
                    if *l <= 0.0 || *u >= 1.0 {
                        return Err(Error::Input(format!(
                            "proportion bounds must lie in (0,1), got ({l}, {u})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Integral clustering: centers are point ids and every point is assigned to
/// exactly one center.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    pub centers: Vec<usize>,
    /// assignment[j] = center point-id for point j.
    pub assignment: Vec<usize>,
    pub cost: f64,
}

impl Solution {
    pub fn cluster_sizes(&self) -> BTreeMap<usize, usize> {
        let mut sizes: BTreeMap<usize, usize> = self.centers.iter().map(|&c| (c, 0)).collect();
        for &c in &self.assignment {
            *sizes.entry(c).or_insert(0) += 1;
        }
        sizes
    }
}

/// (L_p norm of assignment distances; max distance for k-center.
pub fn evaluate_cost(dataset: &Dataset, solution: &Solution, objective: Objective) -> Result<f64> {
    if solution.assignment.len() != dataset.n() {
        return Err(Error::Contract(format!(
            "assignment covers {} of {} points",
            solution.assignment.len(),
            dataset.n()
        )));
    }
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for (j, &c) in solution.assignment.iter().enumerate() {
        if !solution.centers.contains(&c) {
            return Err(Error::Contract(format!(
                "point {j} assigned to {c}, which is not a center"
            )));
        }
        let d = dataset.dist(j, c);
        match objective {
            Objective::KCenter => max = max.max(d),
            Objective::KMedian => sum += d,
            Objective::KMeans => sum += d * d,
        }
    }
    Ok(match objective {
        Objective::KCenter => max,
        Objective::KMedian => sum,
        Objective::KMeans => sum.sqrt(),
    })
}

/// Cost in the convention used by the experiment tables: sum of squared
/// distances for k-means, otherwise the same as `evaluate_cost`.
pub fn experiment_cost(dataset: &Dataset, solution: &Solution, objective: Objective) -> Result<f64> {
    let c = evaluate_cost(dataset, solution, objective)?;
    Ok(match objective {
        Objective::KMeans => c * c,
        _ => c,
    })
}

/// Per-cluster color mass S^h_{C_i}: sum of marginals (or values) over the
/// points assigned to each center.
pub fn color_mass(dataset: &Dataset, solution: &Solution) -> BTreeMap<(usize, usize), f64> {
    let ch = dataset.color_model.channels();
    let mut mass: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &c in &solution.centers {
        for h in 0..ch {
            mass.insert((c, h), 0.0);
        }
    }
    for (j, &c) in solution.assignment.iter().enumerate() {
        for h in 0..ch {
            *mass.get_mut(&(c, h)).unwrap() += dataset.marginal(j, h);
        }
    }
    mass
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationReport {
    pub per_cluster_color_mass: BTreeMap<(usize, usize), f64>,
    pub cluster_sizes: BTreeMap<usize, usize>,
    /// Max additive violation over clusters and channels.
    pub gamma: f64,
    /// gamma / R for metric membership, gamma otherwise.
    pub normalized_gamma: f64,
}

impl ViolationReport {
    /// gamma divided by the smallest cluster size; the normalization used for
    /// large-cluster runs.
    pub fn gamma_over_min_cluster_size(&self) -> f64 {
        let min = self
            .cluster_sizes
            .values()
            .copied()
            .filter(|&s| s > 0)
            .min()
            .unwrap_or(1);
        self.gamma / min as f64
    }
}

/// Maximum additive violation of the fairness window over all clusters and
/// channels: max(l_h * size - mass, mass - u_h * size, 0).
pub fn max_additive_violation(
    dataset: &Dataset,
    solution: &Solution,
    spec: &FairnessSpec,
) -> Result<ViolationReport> {
    spec.validate_for(&dataset.color_model)?;
    let mass = color_mass(dataset, solution);
    let sizes = solution.cluster_sizes();
    let mut gamma = 0.0f64;
    for (&(c, h), &m) in &mass {
        let size = sizes[&c] as f64;
        let lo = spec.lower[h] * size;
        let hi = spec.upper[h] * size;
        gamma = gamma.max(lo - m).max(m - hi);
    }
    let gamma = gamma.max(0.0);
    let normalized_gamma = match dataset.color_model {
        ColorModel::MetricMembership { r_max } if r_max > 0 => gamma / r_max as f64,
        _ => gamma,
    };
    Ok(ViolationReport { per_cluster_color_mass: mass, cluster_sizes: sizes, gamma, normalized_gamma })
}

/// POF = fair cost / color-blind cost. Both zero is reported as 1.
pub fn price_of_fairness(fair_cost: f64, colorblind_cost: f64) -> Result<f64> {
    if colorblind_cost > 0.0 {
        Ok(fair_cost / colorblind_cost)
    } else if fair_cost == 0.0 {
        Ok(1.0)
    } else {
        Err(Error::Contract(
            "POF undefined: zero color-blind cost with nonzero fair cost".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn det_dataset(coords: Vec<Vec<f64>>, colors: Vec<usize>, num_colors: usize) -> Dataset {
        let points = coords
            .into_iter()
            .zip(colors)
            .enumerate()
            .map(|(i, (c, col))| Point::new(i, c).with_color(col))
            .collect();
        Dataset::new(points, ColorModel::Deterministic { num_colors }).unwrap()
    }

    #[test]
    fn normalize_affine_scaling() {
        let out = normalize_features(&[vec![2.0], vec![4.0], vec![6.0]]).unwrap();
        assert_eq!(out, vec![vec![0.0], vec![0.5], vec![1.0]]);
    }

    #[test]
    fn normalize_constant_column() {
        let out = normalize_features(&[vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        assert_eq!(out, vec![vec![0.0], vec![0.0], vec![0.0]]);
    }

    #[test]
    fn normalize_columns_independent() {
        let out = normalize_features(&[vec![0.0, 10.0], vec![1.0, 20.0]]).unwrap();
        assert_eq!(out, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn normalize_rejects_empty() {
        assert!(normalize_features(&[]).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = Point::new(0, vec![0.0, 0.0]);
        let b = Point::new(1, vec![3.0, 4.0]);
        assert_eq!(distance(&a, &b).unwrap(), 5.0);
        assert_eq!(distance(&a, &a).unwrap(), 0.0);
        let c = Point::new(2, vec![1.0]);
        let d = Point::new(3, vec![4.0]);
        assert_eq!(distance(&c, &d).unwrap(), 3.0);
        assert!(distance(&a, &c).is_err());
    }

    #[test]
    fn metric_axioms_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p: Vec<Point> = (0..3)
                .map(|i| Point::new(i, (0..4).map(|_| rng.gen::<f64>()).collect()))
                .collect();
            let dab = distance(&p[0], &p[1]).unwrap();
            let dba = distance(&p[1], &p[0]).unwrap();
            let dbc = distance(&p[1], &p[2]).unwrap();
            let dac = distance(&p[0], &p[2]).unwrap();
            assert!((dab - dba).abs() <= 1e-12);
            assert!(dab >= 0.0);
            assert!(dac <= dab + dbc + 1e-12);
            assert!(distance(&p[0], &p[0]).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn cost_examples() {
        let ds = det_dataset(vec![vec![0.0], vec![2.0]], vec![0, 0], 1);
        let sol = Solution { centers: vec![0], assignment: vec![0, 0], cost: 0.0 };
        assert_eq!(evaluate_cost(&ds, &sol, Objective::KCenter).unwrap(), 2.0);

        let ds = det_dataset(vec![vec![0.0], vec![1.0], vec![3.0]], vec![0, 0, 0], 1);
        let sol = Solution { centers: vec![0], assignment: vec![0, 0, 0], cost: 0.0 };
        assert_eq!(evaluate_cost(&ds, &sol, Objective::KMedian).unwrap(), 4.0);

        let ds = det_dataset(vec![vec![1.5]], vec![0], 1);
        let sol = Solution { centers: vec![0], assignment: vec![0], cost: 0.0 };
        assert_eq!(evaluate_cost(&ds, &sol, Objective::KMeans).unwrap(), 0.0);
    }

    #[test]
    fn cost_brute_force_p1_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..=50);
            let coords: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen(), rng.gen()]).collect();
            let ds = det_dataset(coords, vec![0; n], 1);
            let centers = vec![0usize, 1];
            let assignment: Vec<usize> =
                (0..n).map(|_| centers[rng.gen_range(0..2)]).collect();
            let sol = Solution { centers: centers.clone(), assignment: assignment.clone(), cost: 0.0 };
            let got = evaluate_cost(&ds, &sol, Objective::KMedian).unwrap();
            let want: f64 = (0..n).map(|j| ds.dist(j, assignment[j])).sum();
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn color_mass_probabilistic() {
        let points = vec![
            Point::new(0, vec![0.0]).with_probs(vec![0.3, 0.7]),
            Point::new(1, vec![1.0]).with_probs(vec![0.7, 0.3]),
        ];
        let ds = Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 }).unwrap();
        let sol = Solution { centers: vec![0], assignment: vec![0, 0], cost: 0.0 };
        let mass = color_mass(&ds, &sol);
        assert!((mass[&(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn color_mass_deterministic_counts() {
        let ds = det_dataset(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0, 0, 0, 1],
            2,
        );
        let sol = Solution { centers: vec![0], assignment: vec![0; 4], cost: 0.0 };
        let mass = color_mass(&ds, &sol);
        assert_eq!(mass[&(0, 0)], 3.0);
        assert_eq!(mass[&(0, 1)], 1.0);
    }

    #[test]
    fn color_mass_metric_membership() {
        // Values 0, 3R/4, R with R = 4.
        let points = vec![
            Point::new(0, vec![0.0]).with_value(0),
            Point::new(1, vec![1.0]).with_value(3),
            Point::new(2, vec![2.0]).with_value(4),
        ];
        let ds = Dataset::new(points, ColorModel::MetricMembership { r_max: 4 }).unwrap();
        let sol = Solution { centers: vec![0], assignment: vec![0, 0, 0], cost: 0.0 };
        let mass = color_mass(&ds, &sol);
        assert_eq!(mass[&(0, 0)], 7.0); // 7R/4 with R = 4
    }

    #[test]
    fn violation_examples() {
        let ds = det_dataset(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0, 0, 0, 1],
            2,
        );
        let sol = Solution { centers: vec![0], assignment: vec![0; 4], cost: 0.0 };
        let spec = FairnessSpec::new(vec![0.5, 0.25], vec![0.5, 0.25], 0.0).unwrap();
        let rep = max_additive_violation(&ds, &sol, &spec).unwrap();
        assert!((rep.gamma - 1.0).abs() < 1e-12); // color-0 mass 3 vs 0.5 * 4

        let spec = FairnessSpec::new(vec![0.7, 0.2], vec![0.8, 0.3], 0.0).unwrap();
        let rep = max_additive_violation(&ds, &sol, &spec).unwrap();
        assert_eq!(rep.gamma, 0.0); // exactly inside the window
    }

    #[test]
    fn violation_zero_iff_constraints_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(4..=12);
            let coords: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen()]).collect();
            let colors: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let ds = det_dataset(coords, colors, 2);
            let centers = vec![0usize, 1];
            let assignment: Vec<usize> =
                (0..n).map(|_| centers[rng.gen_range(0..2)]).collect();
            let sol = Solution { centers, assignment, cost: 0.0 };
            let spec = FairnessSpec::new(vec![0.3, 0.3], vec![0.7, 0.7], 0.0).unwrap();
            let rep = max_additive_violation(&ds, &sol, &spec).unwrap();
            let holds = rep.per_cluster_color_mass.iter().all(|(&(c, h), &m)| {
                let s = rep.cluster_sizes[&c] as f64;
                m >= spec.lower[h] * s - 1e-12 && m <= spec.upper[h] * s + 1e-12
            });
            assert_eq!(rep.gamma <= 1e-12, holds);
        }
    }

    #[test]
    fn mass_conservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 40;
        let points: Vec<Point> = (0..n)
            .map(|i| {
                let p: f64 = rng.gen();
                Point::new(i, vec![rng.gen()]).with_probs(vec![p, 1.0 - p])
            })
            .collect();
        let ds = Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 }).unwrap();
        let centers = vec![0usize, 1, 2];
        let assignment: Vec<usize> = (0..n).map(|_| centers[rng.gen_range(0..3)]).collect();
        let sol = Solution { centers, assignment, cost: 0.0 };
        let mass = color_mass(&ds, &sol);
        let total = ds.total_mass();
        for h in 0..2 {
            let per_cluster: f64 = mass.iter().filter(|((_, hh), _)| *hh == h).map(|(_, m)| m).sum();
            assert!((per_cluster - total[h]).abs() < 1e-9);
        }
    }

    #[test]
    fn pof_examples() {
        assert_eq!(price_of_fairness(10.0, 10.0).unwrap(), 1.0);
        assert!((price_of_fairness(10.2, 10.0).unwrap() - 1.02).abs() < 1e-12);
        assert_eq!(price_of_fairness(0.0, 0.0).unwrap(), 1.0);
        assert!(price_of_fairness(1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_marginals() {
        let points = vec![Point::new(0, vec![0.0]).with_probs(vec![0.6, 0.6])];
        assert!(Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 }).is_err());
    }
}
