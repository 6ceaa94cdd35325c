//! Independent brute-force oracles used to validate the LP solver, the fair
//! assignment, and the rounding stage on small instances. Everything here is
//! deliberately naive: different algorithms, shared answers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lpsolve::{LpInstance, Relation};
use crate::types::{evaluate_cost, max_additive_violation, Dataset, FairnessSpec, Objective, Solution};

/// Default cap on the number of candidate active sets tried by the vertex
/// enumerator.
pub const VERTEX_COMBO_CAP: u128 = 2_000_000;

const ORACLE_TOL: f64 = 1e-6;

/// Solve a dense n x n linear system by Gaussian elimination with partial
/// pivoting. Returns None when (numerically) singular.
fn solve_square(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-10 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for c in col..n {
            a[col * n + c] /= d;
        }
        b[col] /= d;
        for r in 0..n {
            if r != col {
                let f = a[r * n + col];
                if f != 0.0 {
                    for c in col..n {
                        a[r * n + c] -= f * a[col * n + c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some(b.to_vec())
}

/// All vertices of {x : rows hold, bounds hold}: every choice of `num_vars`
/// tight constraints (rows taken at equality, or a variable pinned to a finite
/// bound) that yields a nonsingular system and a feasible point.
///
/// Refuses instances where the number of active-set candidates exceeds `cap`.
pub fn enumerate_lp_vertices(inst: &LpInstance, cap: u128) -> Result<Vec<Vec<f64>>> {
    inst.validate()?;
    let n = inst.num_vars;
    // Candidate tight constraints: (coeffs, rhs).
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &inst.rows {
        let mut dense = vec![0.0; n];
        for &(j, a) in &row.coeffs {
            dense[j] += a;
        }
        cons.push((dense, row.rhs));
    }
    for (j, &(lo, hi)) in inst.bounds.iter().enumerate() {
        for b in [lo, hi] {
            if b.is_finite() {
                let mut dense = vec![0.0; n];
                dense[j] = 1.0;
                cons.push((dense, b));
            }
        }
    }
    let total = cons.len();
    if total < n {
        return Err(Error::OracleRefused(format!(
            "only {total} candidate constraints for {n} variables"
        )));
    }
    let mut combos: u128 = 1;
    for i in 0..n {
        combos = combos.saturating_mul((total - i) as u128) / (i as u128 + 1);
    }
    if combos > cap {
        return Err(Error::OracleRefused(format!(
            "{combos} active-set candidates exceeds cap {cap}"
        )));
    }

    let feasible = |x: &[f64]| -> bool {
        for (j, &(lo, hi)) in inst.bounds.iter().enumerate() {
            if x[j] < lo - ORACLE_TOL || x[j] > hi + ORACLE_TOL {
                return false;
            }
        }
        for row in &inst.rows {
            let act: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let ok = match row.rel {
                Relation::Le => act <= row.rhs + ORACLE_TOL,
                Relation::Ge => act >= row.rhs - ORACLE_TOL,
                Relation::Eq => (act - row.rhs).abs() <= ORACLE_TOL,
            };
            if !ok {
                return false;
            }
        }
        true
    };

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut pick = vec![0usize; n];
    fn rec(
        cons: &[(Vec<f64>, f64)],
        n: usize,
        start: usize,
        depth: usize,
        pick: &mut Vec<usize>,
        feasible: &dyn Fn(&[f64]) -> bool,
        out: &mut Vec<Vec<f64>>,
    ) {
        if depth == n {
            let mut a = vec![0.0; n * n];
            let mut b = vec![0.0; n];
            for (r, &ci) in pick.iter().enumerate() {
                a[r * n..(r + 1) * n].copy_from_slice(&cons[ci].0);
                b[r] = cons[ci].1;
            }
            if let Some(x) = solve_square(&mut a, &mut b, n) {
                if feasible(&x) && !out.iter().any(|v| {
                    v.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-7)
                }) {
                    out.push(x);
                }
            }
            return;
        }
        for ci in start..cons.len() {
            pick[depth] = ci;
            rec(cons, n, ci + 1, depth + 1, pick, feasible, out);
        }
    }
    rec(&cons, n, 0, 0, &mut pick, &feasible, &mut vertices);
    Ok(vertices)
}

/// Minimum of the objective over the vertex set; None when the polytope is
/// empty. Only meaningful when all variable bounds are finite (the feasible
/// region is then a polytope and the optimum sits at a vertex).
pub fn lp_opt_by_vertex_enumeration(inst: &LpInstance, cap: u128) -> Result<Option<(Vec<f64>, f64)>> {
    for &(lo, hi) in &inst.bounds {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::OracleRefused("vertex oracle needs finite bounds".into()));
        }
    }
    let verts = enumerate_lp_vertices(inst, cap)?;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for v in verts {
        let obj: f64 = inst.objective.iter().zip(&v).map(|(c, x)| c * x).sum();
        if best.as_ref().map_or(true, |(_, b)| obj < *b) {
            best = Some((v, obj));
        }
    }
    Ok(best)
}

/// Exhaustive fair clustering: every k-subset of points as centers, every
/// assignment of points to those centers, keeping only assignments whose
/// additive fairness violation is (near) zero. Returns the cheapest, or None
/// when no fair assignment exists for any center set.
pub fn brute_force_fair_opt(
    dataset: &Dataset,
    k: usize,
    objective: Objective,
    spec: &FairnessSpec,
) -> Result<Option<Solution>> {
    let n = dataset.n();
    if n > 10 || k > 3 {
        return Err(Error::OracleRefused(format!(
            "brute force capped at n <= 10, k <= 3 (got n = {n}, k = {k})"
        )));
    }
    spec.validate_for(&dataset.color_model)?;
    let mut best: Option<Solution> = None;
    let mut centers = vec![0usize; k];
    enumerate_subsets(n, k, &mut centers, 0, 0, &mut |centers| {
        if let Some(sol) = brute_force_fair_assignment(dataset, centers, objective, spec)? {
            if best.as_ref().map_or(true, |b| sol.cost < b.cost) {
                best = Some(sol);
            }
        }
        Ok(())
    })?;
    Ok(best)
}

/// Exhaustive fair assignment for fixed centers (k^n enumeration).
pub fn brute_force_fair_assignment(
    dataset: &Dataset,
    centers: &[usize],
    objective: Objective,
    spec: &FairnessSpec,
) -> Result<Option<Solution>> {
    let n = dataset.n();
    let k = centers.len();
    if (k as f64).powi(n as i32) > 4e7 {
        return Err(Error::OracleRefused(format!("assignment space {k}^{n} too large")));
    }
    let mut assign = vec![0usize; n];
    let mut best: Option<Solution> = None;
    loop {
        let assignment: Vec<usize> = assign.iter().map(|&a| centers[a]).collect();
        let mut sol = Solution { centers: centers.to_vec(), assignment, cost: 0.0 };
        let report = max_additive_violation(dataset, &sol, spec)?;
        if report.gamma <= ORACLE_TOL {
            sol.cost = evaluate_cost(dataset, &sol, objective)?;
            if best.as_ref().map_or(true, |b| sol.cost < b.cost - 1e-12) {
                best = Some(sol);
            }
        }
        // Odometer increment over the k^n assignment space.
        let mut i = 0;
        loop {
            if i == n {
                return Ok(best);
            }
            assign[i] += 1;
            if assign[i] < k {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

fn enumerate_subsets(
    n: usize,
    k: usize,
    buf: &mut Vec<usize>,
    start: usize,
    depth: usize,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if depth == k {
        return f(buf);
    }
    for i in start..n {
        buf[depth] = i;
        enumerate_subsets(n, k, buf, i + 1, depth + 1, f)?;
    }
    Ok(())
}

/// Cheapest integral assignment where each point j picks one of its allowed
/// (center, cost) options and every center's load stays inside its
/// [min, max] window. Product-space enumeration; refuses above ~4e7 states.
/// Used to certify min-cost-flow roundings on small networks.
pub fn min_cost_integral_assignment(
    options: &[Vec<(usize, f64)>],
    size_windows: &BTreeMap<usize, (usize, usize)>,
) -> Result<Option<(Vec<usize>, f64)>> {
    let states: f64 = options.iter().map(|o| o.len() as f64).product();
    if states > 4e7 {
        return Err(Error::OracleRefused(format!("{states} assignment states")));
    }
    if options.iter().any(|o| o.is_empty()) {
        return Ok(None);
    }
    let n = options.len();
    let mut pick = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let mut loads: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cost = 0.0;
        let mut chosen = Vec::with_capacity(n);
        for (j, &p) in pick.iter().enumerate() {
            let (c, w) = options[j][p];
            *loads.entry(c).or_insert(0) += 1;
            cost += w;
            chosen.push(c);
        }
        let ok = size_windows.iter().all(|(&c, &(lo, hi))| {
            let l = loads.get(&c).copied().unwrap_or(0);
            l >= lo && l <= hi
        }) && loads.keys().all(|c| size_windows.contains_key(c));
        if ok && best.as_ref().map_or(true, |(_, b)| cost < *b - 1e-12) {
            best = Some((chosen, cost));
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(best);
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive min-cost flow: try every integral flow vector (one value per
/// edge in [0, cap]) on a directed graph, keep the cheapest that conserves
/// flow everywhere except s and t and ships exactly `need` out of s. Refuses
/// above 20 edges or ~4e7 flow vectors. Returns None when `need` cannot be
/// shipped at all.
pub fn min_cost_flow_by_enumeration(
    num_nodes: usize,
    edges: &[(usize, usize, i64, i64)],
    s: usize,
    t: usize,
    need: i64,
) -> Result<Option<i64>> {
    if edges.len() > 20 {
        return Err(Error::OracleRefused(format!("{} edges", edges.len())));
    }
    let states: f64 = edges.iter().map(|&(_, _, cap, _)| (cap + 1) as f64).product();
    if states > 4e7 {
        return Err(Error::OracleRefused(format!("{states} flow vectors")));
    }
    let m = edges.len();
    let mut flow = vec![0i64; m];
    let mut best: Option<i64> = None;
    loop {
        let mut balance = vec![0i64; num_nodes];
        let mut cost = 0i64;
        for (e, &(u, v, _, c)) in edges.iter().enumerate() {
            balance[u] += flow[e];
            balance[v] -= flow[e];
            cost += flow[e] * c;
        }
        let conserved = (0..num_nodes)
            .all(|v| v == s || v == t || balance[v] == 0)
            && balance[s] == need
            && balance[t] == -need;
        if conserved && best.map_or(true, |b| cost < b) {
            best = Some(cost);
        }
        let mut i = 0;
        loop {
            if i == m {
                return Ok(best);
            }
            flow[i] += 1;
            if flow[i] <= edges[i].2 {
                break;
            }
            flow[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpsolve::{solve_lp_default, LpStatus};
    use crate::types::{ColorModel, Point};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vertex_oracle_unit_box() {
        let mut lp = LpInstance::new(2);
        lp.bounds = vec![(0.0, 1.0); 2];
        lp.add_row_dense(&[1.0, 1.0], Relation::Le, 1.5);
        let verts = enumerate_lp_vertices(&lp, VERTEX_COMBO_CAP).unwrap();
        // Box corners (0,0), (1,0), (0,1) plus the two cut corners.
        assert_eq!(verts.len(), 5);
    }

    #[test]
    fn vertex_oracle_matches_simplex_on_random_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut feasible_seen = 0;
        let mut infeasible_seen = 0;
        for _ in 0..120 {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(1..=3);
            let mut lp = LpInstance::new(n);
            lp.bounds = vec![(0.0, rng.gen_range(1..=2) as f64); n];
            for j in 0..n {
                lp.objective[j] = rng.gen_range(-3..=3) as f64;
            }
            for _ in 0..m {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2..=2) as f64).collect();
                let rel = match rng.gen_range(0..3) {
                    0 => Relation::Le,
                    1 => Relation::Ge,
                    _ => Relation::Eq,
                };
                let rhs = rng.gen_range(-2..=3) as f64;
                lp.add_row_dense(&coeffs, rel, rhs);
            }
            let oracle = lp_opt_by_vertex_enumeration(&lp, VERTEX_COMBO_CAP).unwrap();
            let sol = solve_lp_default(&lp).unwrap();
            match oracle {
                Some((_, opt)) => {
                    feasible_seen += 1;
                    assert_eq!(sol.status, LpStatus::Optimal, "lp:\n{}", lp.to_lp_format());
                    assert!(
                        (sol.objective_value - opt).abs() <= 1e-5 * (1.0 + opt.abs()),
                        "simplex {} vs oracle {} on\n{}",
                        sol.objective_value,
                        opt,
                        lp.to_lp_format()
                    );
                }
                None => {
                    infeasible_seen += 1;
                    assert_eq!(sol.status, LpStatus::Infeasible, "lp:\n{}", lp.to_lp_format());
                }
            }
        }
        // The generator should exercise both outcomes.
        assert!(feasible_seen >= 20 && infeasible_seen >= 10);
    }

    #[test]
    fn brute_force_balanced_two_colors() {
        // Four points, two of each color, at unit spacing; k = 2 with exact
        // 50/50 bounds forces mixed clusters.
        let points = vec![
            Point::new(0, vec![0.0]).with_color(0),
            Point::new(1, vec![1.0]).with_color(0),
            Point::new(2, vec![10.0]).with_color(1),
            Point::new(3, vec![11.0]).with_color(1),
        ];
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 0.0).unwrap();
        let sol = brute_force_fair_opt(&ds, 2, Objective::KMedian, &spec).unwrap().unwrap();
        // Every cluster must hold one point of each color, so the cheapest
        // fair solution still pays for crossing the gap.
        let report = max_additive_violation(&ds, &sol, &spec).unwrap();
        assert!(report.gamma <= 1e-9);
        assert!(sol.cost >= 9.0);
    }

    #[test]
    fn brute_force_refuses_large() {
        let points: Vec<Point> =
            (0..11).map(|i| Point::new(i, vec![i as f64]).with_color(i % 2)).collect();
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
        let spec = FairnessSpec::new(vec![0.4, 0.4], vec![0.6, 0.6], 0.0).unwrap();
        assert!(matches!(
            brute_force_fair_opt(&ds, 2, Objective::KMedian, &spec),
            Err(Error::OracleRefused(_))
        ));
    }

    #[test]
    fn integral_assignment_oracle_small() {
        // Two points, two centers; windows force one point per center.
        let options = vec![
            vec![(0, 1.0), (1, 5.0)],
            vec![(0, 1.0), (1, 2.0)],
        ];
        let mut windows = BTreeMap::new();
        windows.insert(0, (1, 1));
        windows.insert(1, (1, 1));
        let (assign, cost) = min_cost_integral_assignment(&options, &windows).unwrap().unwrap();
        assert_eq!(assign, vec![0, 1]);
        assert!((cost - 3.0).abs() < 1e-12);
    }

    #[test]
    fn flow_enumeration_matches_ssp_on_diamond() {
        // s -> {a, b} -> t diamond with asymmetric costs.
        let edges = vec![
            (0usize, 1usize, 2i64, 1i64),
            (0, 2, 2, 3),
            (1, 3, 2, 1),
            (2, 3, 2, 1),
        ];
        let oracle = min_cost_flow_by_enumeration(4, &edges, 0, 3, 3).unwrap().unwrap();
        let mut net = crate::flowround::Mcmf::new(4);
        for &(u, v, cap, cost) in &edges {
            net.add_edge(u, v, cap, cost);
        }
        let got = net.run(0, 3, 3).unwrap();
        assert_eq!(oracle, got);
        assert_eq!(oracle, 2 * 2 + 1 * 4); // two cheap units, one forced expensive
        // Demand above the cut is unshippable.
        assert!(min_cost_flow_by_enumeration(4, &edges, 0, 3, 5).unwrap().is_none());
    }
}
