//! Large-cluster pipeline for many probabilistic colors: relax the fairness
//! window multiplicatively, draw one concrete color per point from its
//! marginals, solve the deterministic fair LP with a cluster-size floor, and
//! round through a three-layer flow that keeps every (cluster, color) count
//! within one of its fractional value. Also hosts bipartite dependent
//! rounding, which trades independent sampling for hard degree preservation.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fairlp::{solve_fair_assignment, FairLpOptions, FractionalAssignment, SolveMethod};
use crate::flowround::Mcmf;
use crate::types::{ColorModel, Dataset, FairnessSpec, Objective, Point, Solution};

const TOL: f64 = 1e-9;

/// Multiplicative relaxation: l -> l(1 - eps), u -> u(1 + eps), clipped to the
/// model's valid range.
pub fn relax_bounds(spec: &FairnessSpec, epsilon: f64, model: &ColorModel) -> Result<FairnessSpec> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Input(format!("epsilon {epsilon} outside [0, 1)")));
    }
    let cap = match model {
        ColorModel::MetricMembership { r_max } => *r_max as f64,
        _ => 1.0 - 1e-9,
    };
    let lower: Vec<f64> = spec.lower.iter().map(|l| l * (1.0 - epsilon)).collect();
    let upper: Vec<f64> = spec.upper.iter().map(|u| (u * (1.0 + epsilon)).min(cap)).collect();
    FairnessSpec::new(lower, upper, spec.delta)
}

/// Draw one deterministic color per point from its marginals (independently,
/// seeded). The returned dataset shares coordinates with the input.
pub fn sample_colors(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    let num_colors = match dataset.color_model {
        ColorModel::Probabilistic { num_colors } => num_colors,
        _ => {
            return Err(Error::Contract(
                "color sampling needs probabilistic memberships".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..dataset.n())
        .map(|j| {
            let mut u: f64 = rng.gen();
            let mut color = num_colors - 1;
            for h in 0..num_colors {
                let p = dataset.marginal(j, h);
                if u < p {
                    color = h;
                    break;
                }
                u -= p;
            }
            Point::new(j, dataset.points[j].coords.clone()).with_color(color)
        })
        .collect();
    Dataset::new(points, ColorModel::Deterministic { num_colors })
}

#[derive(Debug, Clone)]
pub struct DfclbReport {
    /// Max over clusters of |integral size - fractional size|.
    pub max_size_change: f64,
    /// Max over (cluster, color) of |integral count - fractional mass|.
    pub max_count_change: f64,
    pub flow_cost: i64,
}

/// Round a deterministic-color fractional assignment through the three-layer
/// network point -> (cluster, color) -> cluster -> sink, with every interior
/// node's throughput pinned to the floor/ceiling of its fractional value.
pub fn dfclb_round(
    dataset: &Dataset,
    frac: &FractionalAssignment,
    objective: Objective,
    cost_scale: f64,
) -> Result<(Solution, DfclbReport)> {
    if !matches!(dataset.color_model, ColorModel::Deterministic { .. }) {
        return Err(Error::Contract("dfclb rounding needs deterministic colors".into()));
    }
    let n = dataset.n();
    if frac.x.len() != n {
        return Err(Error::Contract("fractional assignment does not cover the dataset".into()));
    }
    let color_of: Vec<usize> = (0..n)
        .map(|j| dataset.points[j].color.expect("deterministic dataset"))
        .collect();

    // Fractional masses per (cluster, color) and per cluster, full dataset.
    let mut z: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut s: BTreeMap<usize, f64> = BTreeMap::new();
    for (j, row) in frac.x.iter().enumerate() {
        for &(c, w) in row {
            if w > TOL {
                *z.entry((c, color_of[j])).or_insert(0.0) += w;
                *s.entry(c).or_insert(0.0) += w;
            }
        }
    }

    // Points already integral skip the flow; their units are deducted from
    // the node windows (safe: a whole point must pass through its own
    // (cluster, color) node anyway).
    let mut assignment = vec![usize::MAX; n];
    let mut pre_zc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut pre_s: BTreeMap<usize, i64> = BTreeMap::new();
    let mut frac_points: Vec<usize> = Vec::new();
    for (j, row) in frac.x.iter().enumerate() {
        let whole = row.iter().find(|&&(_, w)| w >= 1.0 - 1e-7);
        if let Some(&(c, _)) = whole {
            assignment[j] = c;
            *pre_zc.entry((c, color_of[j])).or_insert(0) += 1;
            *pre_s.entry(c).or_insert(0) += 1;
        } else {
            frac_points.push(j);
        }
    }

    let pairs: Vec<(usize, usize)> = z.keys().copied().collect();
    let centers: Vec<usize> = s.keys().copied().collect();
    let nf = frac_points.len();
    let pair_base = nf;
    let center_base = pair_base + pairs.len();
    let t = center_base + centers.len();
    let s_star = t + 1;
    let t_star = t + 2;
    let mut net = Mcmf::new(t_star + 1);
    let pair_node: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, pair_base + i)).collect();
    let center_node: BTreeMap<usize, usize> =
        centers.iter().enumerate().map(|(i, &c)| (c, center_base + i)).collect();

    // Lower-bounded edges via the usual transform: ship the mandatory part up
    // front and let S*/T* absorb the imbalance.
    let mut bal: BTreeMap<usize, i64> = BTreeMap::new();
    let lb_edge = |net: &mut Mcmf,
                       bal: &mut BTreeMap<usize, i64>,
                       u: usize,
                       v: usize,
                       lo: i64,
                       hi: i64,
                       cost: i64| {
        debug_assert!(lo <= hi);
        if hi > lo {
            net.add_edge(u, v, hi - lo, cost);
        }
        if lo != 0 {
            *bal.entry(v).or_insert(0) += lo;
            *bal.entry(u).or_insert(0) -= lo;
        }
    };

    // Supplies: each fractional point ships one unit; t absorbs them all.
    for (fi, &j) in frac_points.iter().enumerate() {
        *bal.entry(fi).or_insert(0) += 1;
        for &(c, w) in &frac.x[j] {
            if w > TOL {
                let d = dataset.dist(j, c);
                let cost = (cost_scale * objective.edge_cost(d)).round() as i64;
                net.add_edge(fi, pair_node[&(c, color_of[j])], 1, cost);
            }
        }
    }
    *bal.entry(t).or_insert(0) -= nf as i64;

    for &(c, h) in &pairs {
        let zf = z[&(c, h)];
        let pre = pre_zc.get(&(c, h)).copied().unwrap_or(0);
        let lo = ((zf + TOL).floor() as i64 - pre).max(0);
        let hi = (zf - TOL).ceil().max(0.0) as i64 - pre;
        lb_edge(&mut net, &mut bal, pair_node[&(c, h)], center_node[&c], lo, hi.max(lo), 0);
    }
    for &c in &centers {
        let sf = s[&c];
        let pre = pre_s.get(&c).copied().unwrap_or(0);
        let lo = ((sf + TOL).floor() as i64 - pre).max(0);
        let hi = (sf - TOL).ceil().max(0.0) as i64 - pre;
        lb_edge(&mut net, &mut bal, center_node[&c], t, lo, hi.max(lo), 0);
    }

    let mut need = 0i64;
    for (&node, &b) in &bal {
        if b > 0 {
            net.add_edge(s_star, node, b, 0);
            need += b;
        } else if b < 0 {
            net.add_edge(node, t_star, -b, 0);
        }
    }
    let flow_cost = net.run(s_star, t_star, need)?;

    // Extract the fractional points' clusters from saturated first-layer
    // edges.
    for (fi, &j) in frac_points.iter().enumerate() {
        let mut found = false;
        for e in &net.graph[fi] {
            if e.to >= pair_base && e.to < center_base && e.cap == 0 {
                let (c, _) = pairs[e.to - pair_base];
                assignment[j] = c;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Solver(format!("point {j} unrouted in dfclb flow")));
        }
    }

    let mut solution = Solution { centers: frac.centers.clone(), assignment, cost: 0.0 };
    solution.cost = crate::types::evaluate_cost(dataset, &solution, objective)?;

    // Verify the one-unit windows actually held.
    let sizes = solution.cluster_sizes();
    let mut max_size_change = 0.0f64;
    for (&c, &sf) in &s {
        let si = sizes.get(&c).copied().unwrap_or(0) as f64;
        max_size_change = max_size_change.max((si - sf).abs());
    }
    let mut counts: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (j, &c) in solution.assignment.iter().enumerate() {
        *counts.entry((c, color_of[j])).or_insert(0) += 1;
    }
    let mut max_count_change = 0.0f64;
    for (&p, &zf) in &z {
        let zi = counts.get(&p).copied().unwrap_or(0) as f64;
        max_count_change = max_count_change.max((zi - zf).abs());
    }
    if max_size_change >= 1.0 + 1e-6 || max_count_change >= 1.0 + 1e-6 {
        return Err(Error::Solver(format!(
            "dfclb rounding drifted: size {max_size_change}, count {max_count_change}"
        )));
    }
    Ok((solution, DfclbReport { max_size_change, max_count_change, flow_cost }))
}

#[derive(Debug, Clone)]
pub struct LargeClusterRun {
    pub sampled: Dataset,
    pub relaxed_spec: FairnessSpec,
    pub solution: Solution,
    pub lp_objective: f64,
    pub report: DfclbReport,
}

/// The full large-cluster pipeline on a probabilistic dataset: relax, sample,
/// solve the deterministic LP with cluster sizes >= `min_cluster_size`, and
/// round.
pub fn solve_large_cluster(
    dataset: &Dataset,
    centers: &[usize],
    objective: Objective,
    spec: &FairnessSpec,
    epsilon: f64,
    min_cluster_size: f64,
    seed: u64,
) -> Result<LargeClusterRun> {
    let relaxed_spec = relax_bounds(spec, epsilon, &dataset.color_model)?;
    let sampled = sample_colors(dataset, seed)?;
    let opts = FairLpOptions {
        method: SolveMethod::Auto,
        min_cluster_size: (min_cluster_size > 0.0).then_some(min_cluster_size),
        ..Default::default()
    };
    let frac = solve_fair_assignment(&sampled, centers, objective, &relaxed_spec, &opts)?;
    let (solution, report) =
        dfclb_round(&sampled, &frac, objective, crate::flowround::DEFAULT_COST_SCALE)?;
    Ok(LargeClusterRun {
        sampled,
        relaxed_spec,
        solution,
        lp_objective: frac.lp_objective,
        report,
    })
}

/// Bipartite dependent rounding (cycle/path cancellation). Input entries are
/// (left, right, weight); output is the rounded 0/1 indicator per entry.
/// Marginals are preserved in expectation, and every vertex's rounded degree
/// lands on the floor or ceiling of its fractional degree.
pub fn dependent_round(entries: &[(usize, usize, f64)], seed: u64) -> Result<Vec<f64>> {
    for &(_, _, w) in entries {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Input(format!("weight {w} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = entries.iter().map(|e| e.2).collect();
    let nl = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
    let nr = entries.iter().map(|e| e.1 + 1).max().unwrap_or(0);
    // Vertices: left in [0, nl), right in [nl, nl + nr).
    let vert = |e: &(usize, usize, f64), side: usize| if side == 0 { e.0 } else { nl + e.1 };

    let is_frac = |x: f64| x > TOL && x < 1.0 - TOL;
    let other = |e: usize, at: usize| {
        let a = vert(&entries[e], 0);
        if a == at {
            vert(&entries[e], 1)
        } else {
            a
        }
    };
    loop {
        // Adjacency over still-fractional edges.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nl + nr];
        for (i, &x) in w.iter().enumerate() {
            if is_frac(x) {
                adj[vert(&entries[i], 0)].push(i);
                adj[vert(&entries[i], 1)].push(i);
            }
        }
        if adj.iter().all(|a| a.is_empty()) {
            break;
        }
        // Cancel a simple cycle if one exists (even length in a bipartite
        // graph, so interior degrees are untouched). Otherwise the support is
        // a forest: take a leaf-to-leaf path, whose endpoints have fractional
        // degree and may legally drift inside their floor/ceiling window.
        let segment: Vec<usize> = if let Some(cyc) = find_cycle(&adj, |e, at| other(e, at)) {
            cyc
        } else {
            let start = (0..nl + nr)
                .find(|&v| adj[v].len() == 1)
                .expect("acyclic fractional support must have a leaf");
            let mut seg = Vec::new();
            let mut at = start;
            let mut prev = usize::MAX;
            loop {
                let Some(&e) = adj[at].iter().find(|&&e| e != prev) else {
                    break;
                };
                seg.push(e);
                at = other(e, at);
                prev = e;
                if adj[at].len() == 1 {
                    break;
                }
            }
            seg
        };
        if segment.is_empty() {
            break;
        }
        // Alternate +-gamma along the segment; the two headrooms give the
        // probabilities that keep every marginal intact.
        let sign = |idx: usize| if idx % 2 == 0 { 1.0 } else { -1.0 };
        let mut g_plus = f64::INFINITY; // room applying +sign pattern
        let mut g_minus = f64::INFINITY; // room applying the opposite
        for (idx, &e) in segment.iter().enumerate() {
            let x = w[e];
            if sign(idx) > 0.0 {
                g_plus = g_plus.min(1.0 - x);
                g_minus = g_minus.min(x);
            } else {
                g_plus = g_plus.min(x);
                g_minus = g_minus.min(1.0 - x);
            }
        }
        let (gamma, dirsign) = if rng.gen::<f64>() < g_minus / (g_plus + g_minus) {
            (g_plus, 1.0)
        } else {
            (g_minus, -1.0)
        };
        for (idx, &e) in segment.iter().enumerate() {
            w[e] += dirsign * sign(idx) * gamma;
            if w[e] < TOL {
                w[e] = 0.0;
            }
            if w[e] > 1.0 - TOL {
                w[e] = 1.0;
            }
        }
    }
    if let Some(i) = w.iter().position(|&x| is_frac(x)) {
        return Err(Error::Solver(format!(
            "dependent rounding left edge {i} fractional at {}",
            w[i]
        )));
    }
    Ok(w)
}

/// Lowest-id simple cycle in an undirected multigraph given as per-vertex
/// edge lists; `other(e, v)` names the endpoint of edge `e` opposite `v`.
/// Returns consecutive edge ids around the cycle.
fn find_cycle(adj: &[Vec<usize>], other: impl Fn(usize, usize) -> usize) -> Option<Vec<usize>> {
    let nv = adj.len();
    let mut color = vec![0u8; nv]; // 0 fresh, 1 on stack, 2 done
    let mut parent_edge = vec![usize::MAX; nv];
    for s in 0..nv {
        if color[s] != 0 || adj[s].is_empty() {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        color[s] = 1;
        while let Some(&(v, i)) = stack.last() {
            if i >= adj[v].len() {
                stack.pop();
                color[v] = 2;
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let e = adj[v][i];
            if e == parent_edge[v] {
                continue;
            }
            let u = other(e, v);
            if color[u] == 1 {
                // Back edge closes a cycle: e plus the tree edges v..u.
                let mut cyc = vec![e];
                let mut x = v;
                while x != u {
                    let pe = parent_edge[x];
                    cyc.push(pe);
                    x = other(pe, x);
                }
                return Some(cyc);
            }
            if color[u] == 0 {
                color[u] = 1;
                parent_edge[u] = e;
                stack.push((u, 0));
            }
        }
    }
    None
}

/// Dependent rounding applied to a fair-assignment LP solution. Each point's
/// fractional degree must be exactly 1, so the rounded point gets exactly one
/// center, never one outside its fractional support. Returns the chosen
/// center point-id per point.
pub fn dependent_round_assignment(frac: &FractionalAssignment, seed: u64) -> Result<Vec<usize>> {
    // x rows name centers by point-id; compact them for the rounder.
    let cindex: BTreeMap<usize, usize> =
        frac.centers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut entries = Vec::new();
    for (j, row) in frac.x.iter().enumerate() {
        let deg: f64 = row.iter().map(|&(_, w)| w).sum();
        if (deg - 1.0).abs() > 1e-6 {
            return Err(Error::Input(format!(
                "point {j} has fractional degree {deg:.9}, expected exactly 1"
            )));
        }
        for &(c, w) in row {
            let ci = *cindex
                .get(&c)
                .ok_or_else(|| Error::Contract(format!("assignment names non-center {c}")))?;
            entries.push((ci, j, w));
        }
    }
    let rounded = dependent_round(&entries, seed)?;
    let n = frac.x.len();
    let mut assignment = vec![usize::MAX; n];
    for (e, &(ci, j, _)) in entries.iter().enumerate() {
        if rounded[e] > 0.5 {
            if assignment[j] != usize::MAX {
                return Err(Error::Solver(format!("point {j} rounded to two centers")));
            }
            assignment[j] = frac.centers[ci];
        }
    }
    if let Some(j) = assignment.iter().position(|&a| a == usize::MAX) {
        return Err(Error::Solver(format!("point {j} left unassigned by rounding")));
    }
    Ok(assignment)
}
