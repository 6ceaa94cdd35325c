//! Fair assignment LP over fixed centers: minimize assignment cost subject to
//! per-cluster color-mass windows. Small instances go straight to the simplex;
//! large ones use Dantzig-Wolfe column generation over whole assignments, which
//! keeps the master LP at a few dozen rows regardless of n.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lpsolve::{solve_lp, LpInstance, LpStatus, Relation};
use crate::types::{Dataset, FairnessSpec, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Auto,
    Direct,
    ColGen,
}

#[derive(Debug, Clone)]
pub struct FairLpOptions {
    pub method: SolveMethod,
    /// Lower bound L on every cluster's (fractional) size, for large-cluster
    /// runs.
    pub min_cluster_size: Option<f64>,
    /// Forbid edges longer than this (k-center radius probes).
    pub radius_cap: Option<f64>,
    /// Solve for feasibility only (all edge costs zero).
    pub feasibility_only: bool,
}

impl Default for FairLpOptions {
    fn default() -> Self {
        FairLpOptions {
            method: SolveMethod::Auto,
            min_cluster_size: None,
            radius_cap: None,
            feasibility_only: false,
        }
    }
}

/// Fractional assignment: for each point, (center id, weight) entries summing
/// to one.
#[derive(Debug, Clone)]
pub struct FractionalAssignment {
    pub centers: Vec<usize>,
    pub x: Vec<Vec<(usize, f64)>>,
    /// Sum of per-edge costs (d, or d^2 for k-means) weighted by x.
    pub lp_objective: f64,
}

impl FractionalAssignment {
    pub fn cluster_mass(&self) -> BTreeMap<usize, f64> {
        let mut m: BTreeMap<usize, f64> = self.centers.iter().map(|&c| (c, 0.0)).collect();
        for row in &self.x {
            for &(c, w) in row {
                *m.get_mut(&c).expect("assignment names a non-center") += w;
            }
        }
        m
    }

    pub fn color_mass(&self, dataset: &Dataset) -> BTreeMap<(usize, usize), f64> {
        let ch = dataset.color_model.channels();
        let mut m: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &c in &self.centers {
            for h in 0..ch {
                m.insert((c, h), 0.0);
            }
        }
        for (j, row) in self.x.iter().enumerate() {
            for &(c, w) in row {
                for h in 0..ch {
                    *m.get_mut(&(c, h)).unwrap() += w * dataset.marginal(j, h);
                }
            }
        }
        m
    }

    /// Largest additive violation of the fairness window by the fractional
    /// masses.
    pub fn max_violation(&self, dataset: &Dataset, spec: &FairnessSpec) -> f64 {
        let mass = self.color_mass(dataset);
        let sizes = self.cluster_mass();
        let mut gamma = 0.0f64;
        for (&(c, h), &m) in &mass {
            let s = sizes[&c];
            gamma = gamma.max(spec.lower[h] * s - m).max(m - spec.upper[h] * s);
        }
        gamma.max(0.0)
    }

    /// Weighted cost in the reporting convention (sqrt of the summed squares
    /// for k-means, max edge for k-center).
    pub fn report_cost(&self, dataset: &Dataset, objective: Objective) -> f64 {
        match objective {
            Objective::KMeans => self.lp_objective.max(0.0).sqrt(),
            Objective::KMedian => self.lp_objective,
            Objective::KCenter => {
                let mut m = 0.0f64;
                for (j, row) in self.x.iter().enumerate() {
                    for &(c, w) in row {
                        if w > 1e-9 {
                            m = m.max(dataset.dist(j, c));
                        }
                    }
                }
                m
            }
        }
    }
}

/// Indexing scheme shared by the direct LP and the rounding stage: variable
/// (ci, j) -> ci * n + j, labeled with the center's point id.
pub fn build_fair_assignment_lp(
    dataset: &Dataset,
    centers: &[usize],
    objective: Objective,
    spec: &FairnessSpec,
    opts: &FairLpOptions,
) -> Result<LpInstance> {
    spec.validate_for(&dataset.color_model)?;
    validate_centers(dataset, centers)?;
    let n = dataset.n();
    let k = centers.len();
    let ch = dataset.color_model.channels();
    let mut lp = LpInstance::new(n * k);
    for (ci, &c) in centers.iter().enumerate() {
        for j in 0..n {
            let col = ci * n + j;
            lp.labels.insert((c, j), col);
            let d = dataset.dist(j, c);
            lp.objective[col] = if opts.feasibility_only { 0.0 } else { objective.edge_cost(d) };
            if let Some(w) = opts.radius_cap {
                if d > w + 1e-12 {
                    lp.bounds[col] = (0.0, 0.0);
                }
            }
        }
    }
    // Each point fully assigned.
    for j in 0..n {
        let coeffs = (0..k).map(|ci| (ci * n + j, 1.0)).collect();
        lp.add_row_sparse(coeffs, Relation::Eq, 1.0);
    }
    // Homogeneous fairness windows: for cluster i and channel h,
    //   sum_j (p_j^h - u_h) x_ij <= 0  and  sum_j (l_h - p_j^h) x_ij <= 0.
    for ci in 0..k {
        for h in 0..ch {
            let upper: Vec<(usize, f64)> = (0..n)
                .map(|j| (ci * n + j, dataset.marginal(j, h) - spec.upper[h]))
                .collect();
            lp.add_row_sparse(upper, Relation::Le, 0.0);
            let lower: Vec<(usize, f64)> = (0..n)
                .map(|j| (ci * n + j, spec.lower[h] - dataset.marginal(j, h)))
                .collect();
            lp.add_row_sparse(lower, Relation::Le, 0.0);
        }
    }
    if let Some(l) = opts.min_cluster_size {
        for ci in 0..k {
            let coeffs = (0..n).map(|j| (ci * n + j, 1.0)).collect();
            lp.add_row_sparse(coeffs, Relation::Ge, l);
        }
    }
    Ok(lp)
}

fn validate_centers(dataset: &Dataset, centers: &[usize]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::Contract("no centers given".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &c in centers {
        if c >= dataset.n() {
            return Err(Error::Contract(format!("center {c} out of range")));
        }
        if !seen.insert(c) {
            return Err(Error::Contract(format!("duplicate center {c}")));
        }
    }
    Ok(())
}

/// Human-oriented diagnosis attached to infeasible instances: the window is
/// unsatisfiable whenever the dataset-wide proportion falls outside [l, u],
/// since some cluster must then carry at least the average.
fn infeasibility_hint(dataset: &Dataset, spec: &FairnessSpec) -> String {
    let n = dataset.n() as f64;
    let mut parts = Vec::new();
    for h in 0..dataset.color_model.channels() {
        let total: f64 = (0..dataset.n()).map(|j| dataset.marginal(j, h)).sum();
        let avg = total / n;
        if avg < spec.lower[h] - 1e-12 || avg > spec.upper[h] + 1e-12 {
            parts.push(format!(
                "channel {h}: dataset average {avg:.4} lies outside [{}, {}]",
                spec.lower[h], spec.upper[h]
            ));
        }
    }
    if parts.is_empty() {
        "no single-channel certificate; bounds conflict jointly or with the edge restrictions"
            .to_string()
    } else {
        parts.join("; ")
    }
}

pub fn solve_fair_assignment(
    dataset: &Dataset,
    centers: &[usize],
    objective: Objective,
    spec: &FairnessSpec,
    opts: &FairLpOptions,
) -> Result<FractionalAssignment> {
    let n = dataset.n();
    let k = centers.len();
    let method = match opts.method {
        SolveMethod::Auto => {
            if n * k <= 4000 && n <= 400 {
                SolveMethod::Direct
            } else {
                SolveMethod::ColGen
            }
        }
        m => m,
    };
    match method {
        SolveMethod::Direct => solve_direct(dataset, centers, objective, spec, opts),
        SolveMethod::ColGen => colgen::solve(dataset, centers, objective, spec, opts),
        SolveMethod::Auto => unreachable!(),
    }
}

fn solve_direct(
    dataset: &Dataset,
    centers: &[usize],
    objective: Objective,
    spec: &FairnessSpec,
    opts: &FairLpOptions,
) -> Result<FractionalAssignment> {
    let lp = build_fair_assignment_lp(dataset, centers, objective, spec, opts)?;
    let sol = solve_lp(&lp, 1e-7, 1e-7)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::FairnessInfeasible(infeasibility_hint(dataset, spec)));
        }
        LpStatus::Unbounded => {
            return Err(Error::Solver("assignment LP cannot be unbounded".into()));
        }
    }
    let n = dataset.n();
    let mut x: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (ci, &c) in centers.iter().enumerate() {
        for j in 0..n {
            let v = sol.values[ci * n + j];
            if v > 1e-9 {
                x[j].push((c, v));
            }
        }
    }
    normalize_rows(&mut x);
    let lp_objective = recompute_objective(dataset, &x, objective);
    Ok(FractionalAssignment { centers: centers.to_vec(), x, lp_objective })
}

fn normalize_rows(x: &mut [Vec<(usize, f64)>]) {
    for row in x.iter_mut() {
        let s: f64 = row.iter().map(|&(_, w)| w).sum();
        debug_assert!((s - 1.0).abs() < 1e-5, "point weight sums to {s}");
        for e in row.iter_mut() {
            e.1 /= s;
        }
    }
}

fn recompute_objective(dataset: &Dataset, x: &[Vec<(usize, f64)>], objective: Objective) -> f64 {
    let mut obj = 0.0;
    for (j, row) in x.iter().enumerate() {
        for &(c, w) in row {
            obj += w * objective.edge_cost(dataset.dist(j, c));
        }
    }
    obj
}

/// k-center with fairness: binary search the radius over the distinct
/// center-to-point distances, probing each candidate with a feasibility LP
/// that forbids longer edges.
#[derive(Debug, Clone)]
pub struct RadiusSearchResult {
    pub radius: f64,
    pub assignment: FractionalAssignment,
}

pub fn kcenter_radius_search(
    dataset: &Dataset,
    centers: &[usize],
    spec: &FairnessSpec,
    opts: &FairLpOptions,
) -> Result<RadiusSearchResult> {
    validate_centers(dataset, centers)?;
    let n = dataset.n();
    let mut radii: Vec<f64> = Vec::with_capacity(n * centers.len());
    for &c in centers {
        for j in 0..n {
            radii.push(dataset.dist(j, c));
        }
    }
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let probe = |w: f64| -> Result<Option<FractionalAssignment>> {
        let probe_opts = FairLpOptions {
            radius_cap: Some(w),
            feasibility_only: true,
            ..opts.clone()
        };
        match solve_fair_assignment(dataset, centers, Objective::KCenter, spec, &probe_opts) {
            Ok(frac) => Ok(Some(frac)),
            Err(Error::FairnessInfeasible(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };

    // The largest radius admits every edge; if even that fails the bounds are
    // globally infeasible.
    let mut hi = radii.len() - 1;
    let mut best = match probe(radii[hi])? {
        Some(f) => f,
        None => return Err(Error::FairnessInfeasible(infeasibility_hint(dataset, spec))),
    };
    let mut lo = 0usize;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match probe(radii[mid])? {
            Some(f) => {
                best = f;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    Ok(RadiusSearchResult { radius: radii[hi], assignment: best })
}

mod colgen {
    //! Dantzig-Wolfe decomposition. Inner polytope: the product of per-point
    //! simplices (sum_i x_ij = 1), whose vertices are whole assignments
    //! j -> center. The master LP carries only the fairness/size rows plus one
    //! convexity row; the pricing subproblem separates per point into an
    //! argmin over centers of the dual-adjusted edge cost.

    use super::*;

    const MAX_ROUNDS: usize = 600;

    struct SideRow {
        rel: Relation,
        rhs: f64,
        /// coeff(ci, j) evaluated lazily from these fields.
        kind: RowKind,
    }

    enum RowKind {
        Upper { ci: usize, h: usize },
        Lower { ci: usize, h: usize },
        Size { ci: usize },
    }

    impl SideRow {
        fn coeff(&self, ci: usize, j: usize, ds: &Dataset, spec: &FairnessSpec) -> f64 {
            match self.kind {
                RowKind::Upper { ci: rci, h } if rci == ci => ds.marginal(j, h) - spec.upper[h],
                RowKind::Lower { ci: rci, h } if rci == ci => spec.lower[h] - ds.marginal(j, h),
                RowKind::Size { ci: rci } if rci == ci => 1.0,
                _ => 0.0,
            }
        }
    }

    pub(super) fn solve(
        dataset: &Dataset,
        centers: &[usize],
        objective: Objective,
        spec: &FairnessSpec,
        opts: &FairLpOptions,
    ) -> Result<FractionalAssignment> {
        spec.validate_for(&dataset.color_model)?;
        super::validate_centers(dataset, centers)?;
        let n = dataset.n();
        let k = centers.len();
        let ch = dataset.color_model.channels();

        // Edge costs, with forbidden edges at +inf under a radius cap.
        let mut cost = vec![0.0f64; k * n];
        let mut allowed = vec![true; k * n];
        for ci in 0..k {
            for j in 0..n {
                let d = dataset.dist(j, centers[ci]);
                cost[ci * n + j] = if opts.feasibility_only { 0.0 } else { objective.edge_cost(d) };
                if let Some(w) = opts.radius_cap {
                    if d > w + 1e-12 {
                        allowed[ci * n + j] = false;
                    }
                }
            }
        }
        for j in 0..n {
            if !(0..k).any(|ci| allowed[ci * n + j]) {
                return Err(Error::FairnessInfeasible(format!(
                    "point {j} has no center within the radius cap"
                )));
            }
        }

        let mut rows: Vec<SideRow> = Vec::new();
        for ci in 0..k {
            for h in 0..ch {
                rows.push(SideRow { rel: Relation::Le, rhs: 0.0, kind: RowKind::Upper { ci, h } });
                rows.push(SideRow { rel: Relation::Le, rhs: 0.0, kind: RowKind::Lower { ci, h } });
            }
        }
        if let Some(l) = opts.min_cluster_size {
            for ci in 0..k {
                rows.push(SideRow { rel: Relation::Ge, rhs: l, kind: RowKind::Size { ci } });
            }
        }
        let nrows = rows.len();

        // Row aggregate g_r(a) and objective c(a) for an assignment column.
        let col_stats = |a: &[usize]| -> (Vec<f64>, f64) {
            let mut g = vec![0.0; nrows];
            let mut c = 0.0;
            for (j, &ci) in a.iter().enumerate() {
                c += cost[ci * n + j];
                for (r, row) in rows.iter().enumerate() {
                    let v = row.coeff(ci, j, dataset, spec);
                    if v != 0.0 {
                        g[r] += v;
                    }
                }
            }
            (g, c)
        };

        // Start from the nearest-allowed assignment.
        let first: Vec<usize> = (0..n)
            .map(|j| {
                (0..k)
                    .filter(|&ci| allowed[ci * n + j])
                    .min_by(|&a, &b| {
                        dataset
                            .dist(j, centers[a])
                            .partial_cmp(&dataset.dist(j, centers[b]))
                            .unwrap()
                    })
                    .unwrap()
            })
            .collect();
        let mut columns: Vec<Vec<usize>> = vec![first];
        let mut col_cache: Vec<(Vec<f64>, f64)> = vec![col_stats(&columns[0])];

        // Pricing: per point, the argmin over centers of
        // mult * c_ij - sum_r y_r coeff_r(ci, j); returns the assignment and
        // its total adjusted cost.
        let price = |y: &[f64], mult: f64| -> (Vec<usize>, f64) {
            let mut a = vec![0usize; n];
            let mut total = 0.0;
            for j in 0..n {
                let mut best_ci = usize::MAX;
                let mut best_v = f64::INFINITY;
                for ci in 0..k {
                    if !allowed[ci * n + j] {
                        continue;
                    }
                    let mut v = mult * cost[ci * n + j];
                    for (r, row) in rows.iter().enumerate() {
                        if y[r] != 0.0 {
                            v -= y[r] * row.coeff(ci, j, dataset, spec);
                        }
                    }
                    if v < best_v {
                        best_v = v;
                        best_ci = ci;
                    }
                }
                a[j] = best_ci;
                total += best_v;
            }
            (a, total)
        };

        // Master over current columns. `phase1` adds per-row violation slacks
        // with unit cost; otherwise those slacks are pinned to zero.
        let build_and_solve = |columns: &[Vec<usize>],
                               col_cache: &[(Vec<f64>, f64)],
                               phase1: bool|
         -> Result<crate::lpsolve::LpSolution> {
            let ncols = columns.len();
            let mut lp = LpInstance::new(ncols + nrows);
            for (ci, (_, c)) in col_cache.iter().enumerate() {
                lp.objective[ci] = if phase1 { 0.0 } else { *c };
                lp.bounds[ci] = (0.0, 1.0);
            }
            for r in 0..nrows {
                let v = ncols + r;
                lp.objective[v] = if phase1 { 1.0 } else { 0.0 };
                lp.bounds[v] = if phase1 { (0.0, f64::INFINITY) } else { (0.0, 0.0) };
            }
            for (r, row) in rows.iter().enumerate() {
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for (ci, (g, _)) in col_cache.iter().enumerate() {
                    if g[r] != 0.0 {
                        coeffs.push((ci, g[r]));
                    }
                }
                // Violation slack relaxes the row toward feasibility.
                let sgn = match row.rel {
                    Relation::Le => -1.0,
                    Relation::Ge => 1.0,
                    Relation::Eq => unreachable!(),
                };
                coeffs.push((ncols + r, sgn));
                lp.add_row_sparse(coeffs, row.rel, row.rhs);
            }
            // Convexity.
            let conv: Vec<(usize, f64)> = (0..ncols).map(|ci| (ci, 1.0)).collect();
            lp.add_row_sparse(conv, Relation::Eq, 1.0);
            solve_lp(&lp, 1e-8, 1e-8)
        };

        // Phase 1: drive the violation slacks to zero by generating columns
        // against the phase-1 duals.
        let mut feasible = false;
        for _ in 0..MAX_ROUNDS {
            let sol = build_and_solve(&columns, &col_cache, true)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Solver("colgen phase-1 master failed".into()));
            }
            if sol.objective_value <= 1e-7 * (1.0 + nrows as f64) {
                feasible = true;
                break;
            }
            let y = &sol.duals[..nrows];
            let mu = sol.duals[nrows];
            let (a, adj) = price(y, 0.0);
            if adj - mu >= -1e-9 {
                break; // priced out while violations remain: infeasible
            }
            col_cache.push(col_stats(&a));
            columns.push(a);
        }
        if !feasible {
            return Err(Error::FairnessInfeasible(infeasibility_hint(dataset, spec)));
        }

        // Phase 2: optimize. Lagrangian bound certifies the gap.
        let mut final_sol = None;
        for _ in 0..MAX_ROUNDS {
            let sol = build_and_solve(&columns, &col_cache, false)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Solver("colgen master failed".into()));
            }
            let y = &sol.duals[..nrows];
            let mu = sol.duals[nrows];
            let (a, adj) = price(y, 1.0);
            let reduced = adj - mu;
            let lower_bound = sol.objective_value + reduced.min(0.0);
            let gap = sol.objective_value - lower_bound;
            if reduced >= -1e-9 || gap <= 1e-7 * (1.0 + sol.objective_value.abs()) {
                final_sol = Some(sol);
                break;
            }
            col_cache.push(col_stats(&a));
            columns.push(a);
        }
        let sol = final_sol
            .ok_or_else(|| Error::Solver("column generation did not converge".into()))?;

        // Blend the columns into per-point fractions.
        let lambdas: Vec<f64> = sol.values[..columns.len()]
            .iter()
            .map(|&l| if l > 1e-9 { l } else { 0.0 })
            .collect();
        let total: f64 = lambdas.iter().sum();
        let mut x: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (col, &l) in lambdas.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let w = l / total;
            for (j, &ci) in columns[col].iter().enumerate() {
                *x[j].entry(centers[ci]).or_insert(0.0) += w;
            }
        }
        let mut x: Vec<Vec<(usize, f64)>> =
            x.into_iter().map(|m| m.into_iter().collect()).collect();
        super::normalize_rows(&mut x);
        let lp_objective = super::recompute_objective(dataset, &x, objective);
        Ok(FractionalAssignment { centers: centers.to_vec(), x, lp_objective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorblind::nearest_assignment;
    use crate::types::{ColorModel, Point};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn opts(method: SolveMethod) -> FairLpOptions {
        FairLpOptions { method, ..Default::default() }
    }

    #[test]
    fn vacuous_bounds_match_colorblind_cost() {
        // Every point is half/half, and the window is exactly [0.5, 0.5], so
        // any assignment is fair and the LP must land on nearest-assignment
        // cost.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<Point> = (0..30)
            .map(|i| {
                Point::new(i, vec![rng.gen::<f64>(), rng.gen::<f64>()]).with_probs(vec![0.5, 0.5])
            })
            .collect();
        let ds = Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 }).unwrap();
        let centers = vec![0, 15];
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 0.0).unwrap();
        let frac =
            solve_fair_assignment(&ds, &centers, Objective::KMedian, &spec, &opts(SolveMethod::Direct))
                .unwrap();
        let na = nearest_assignment(&ds, &centers);
        let nearest_cost: f64 = na.iter().enumerate().map(|(j, &c)| ds.dist(j, c)).sum();
        assert!((frac.lp_objective - nearest_cost).abs() < 1e-6);
        assert!(frac.max_violation(&ds, &spec) < 1e-7);
    }

    #[test]
    fn metric_membership_forces_fractional_split() {
        // 1-D points at -1, 0, 5, 10, 11 with values 3, 0, 4, 3, 0 and the
        // window pinned at 2: with centers at positions 0 and 10, the middle
        // point must split evenly to zero out both clusters' imbalance.
        let pos = [-1.0, 0.0, 5.0, 10.0, 11.0];
        let val = [3u64, 0, 4, 3, 0];
        let points: Vec<Point> = pos
            .iter()
            .zip(val)
            .enumerate()
            .map(|(i, (&p, v))| Point::new(i, vec![p]).with_value(v))
            .collect();
        let ds = Dataset::new(points, ColorModel::MetricMembership { r_max: 4 }).unwrap();
        let spec = FairnessSpec::new(vec![2.0], vec![2.0], 0.0).unwrap();
        let centers = vec![1, 3];
        for method in [SolveMethod::Direct, SolveMethod::ColGen] {
            let frac =
                solve_fair_assignment(&ds, &centers, Objective::KMedian, &spec, &opts(method))
                    .unwrap();
            assert!(frac.max_violation(&ds, &spec) < 1e-6);
            let mid: BTreeMap<usize, f64> = frac.x[2].iter().copied().collect();
            assert!((mid.get(&1).copied().unwrap_or(0.0) - 0.5).abs() < 1e-6, "{mid:?}");
            assert!((mid.get(&3).copied().unwrap_or(0.0) - 0.5).abs() < 1e-6, "{mid:?}");
            assert!((frac.lp_objective - 7.0).abs() < 1e-6);
        }
    }

    #[test]
    fn direct_and_colgen_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..4 {
            let n = 60;
            let points: Vec<Point> = (0..n)
                .map(|i| {
                    let p: f64 = rng.gen();
                    Point::new(i, vec![rng.gen::<f64>(), rng.gen::<f64>()])
                        .with_probs(vec![p, 1.0 - p])
                })
                .collect();
            let ds = Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 }).unwrap();
            let centers = vec![0, 20, 40];
            let avg: f64 = (0..n).map(|j| ds.marginal(j, 0)).sum::<f64>() / n as f64;
            let spec =
                FairnessSpec::new(vec![avg - 0.05, 1.0 - avg - 0.05], vec![avg + 0.05, 1.0 - avg + 0.05], 0.0)
                    .unwrap();
            let a = solve_fair_assignment(&ds, &centers, Objective::KMedian, &spec, &opts(SolveMethod::Direct))
                .unwrap();
            let b = solve_fair_assignment(&ds, &centers, Objective::KMedian, &spec, &opts(SolveMethod::ColGen))
                .unwrap();
            assert!(
                (a.lp_objective - b.lp_objective).abs() <= 1e-5 * (1.0 + a.lp_objective),
                "trial {trial}: direct {} vs colgen {}",
                a.lp_objective,
                b.lp_objective
            );
            assert!(a.max_violation(&ds, &spec) < 1e-6);
            assert!(b.max_violation(&ds, &spec) < 1e-6);
        }
    }

    #[test]
    fn fairness_raises_kcenter_radius() {
        // Positions 0, 1, 10, 11 with colors 0, 0, 1, 1: color-blind radius
        // is 1 but any fair 50/50 clustering must span the gap.
        let pos = [0.0, 1.0, 10.0, 11.0];
        let points: Vec<Point> = pos
            .iter()
            .enumerate()
            .map(|(i, &p)| Point::new(i, vec![p]).with_color(i / 2))
            .collect();
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 0.0).unwrap();
        let centers = vec![0, 3];
        let res =
            kcenter_radius_search(&ds, &centers, &spec, &FairLpOptions::default()).unwrap();
        assert!((res.radius - 10.0).abs() < 1e-9);
        assert!(res.assignment.max_violation(&ds, &spec) < 1e-7);
    }

    #[test]
    fn infeasible_bounds_name_the_channel() {
        let points: Vec<Point> = (0..4)
            .map(|i| Point::new(i, vec![i as f64]).with_color(usize::from(i == 3)))
            .collect();
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 0.0).unwrap();
        let err = solve_fair_assignment(&ds, &[0, 2], Objective::KMedian, &spec, &opts(SolveMethod::Direct))
            .unwrap_err();
        match err {
            Error::FairnessInfeasible(msg) => {
                assert!(msg.contains("channel 0"), "got: {msg}");
            }
            other => panic!("expected FairnessInfeasible, got {other:?}"),
        }
    }

    #[test]
    fn lp_cost_never_exceeds_best_integral_fair() {
        // The LP relaxes the integral fair assignment, so its optimum is a
        // lower bound on the brute-force optimum for the same centers.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let points: Vec<Point> = (0..8)
                .map(|i| Point::new(i, vec![rng.gen::<f64>()]).with_color(i % 2))
                .collect();
            let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
            let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 0.0).unwrap();
            let centers = vec![0, 1];
            let frac = solve_fair_assignment(
                &ds,
                &centers,
                Objective::KMedian,
                &spec,
                &opts(SolveMethod::Direct),
            )
            .unwrap();
            let brute = crate::oracle::brute_force_fair_assignment(
                &ds,
                &centers,
                Objective::KMedian,
                &spec,
            )
            .unwrap()
            .expect("even split exists");
            assert!(frac.lp_objective <= brute.cost + 1e-7);
        }
    }
}
