//! Rounding of a fractional fair assignment to an integral one via min-cost
//! flow. Each cluster's fractional mass is packed into unit-capacity "slots"
//! in decreasing order of the color statistic; an integral min-cost flow then
//! places one point per slot. Cluster sizes move by less than one, and each
//! cluster's color mass moves by at most one unit of the sort statistic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fairlp::FractionalAssignment;
use crate::types::{ColorModel, Dataset, Objective, Solution};

pub const DEFAULT_COST_SCALE: f64 = 1000.0;

const MASS_TOL: f64 = 1e-9;

/// The per-point statistic that orders points into slots: the scalar value
/// r_j for metric membership, otherwise the channel-0 marginal.
pub fn sort_key(dataset: &Dataset, j: usize) -> f64 {
    dataset.marginal(j, 0)
}

/// Per cluster: slots in fill order, each a list of (point, weight) with
/// weights summing to (at most) one. Points enter in non-increasing key
/// order, ties broken toward the lower id.
pub fn build_cluster_slots(
    dataset: &Dataset,
    frac: &FractionalAssignment,
) -> BTreeMap<usize, Vec<Vec<(usize, f64)>>> {
    let mut members: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for (j, row) in frac.x.iter().enumerate() {
        for &(c, w) in row {
            if w > MASS_TOL {
                members.entry(c).or_default().push((j, w));
            }
        }
    }
    let mut slots = BTreeMap::new();
    for (c, mut pts) in members {
        pts.sort_by(|a, b| {
            sort_key(dataset, b.0)
                .partial_cmp(&sort_key(dataset, a.0))
                .unwrap()
                .then(a.0.cmp(&b.0))
        });
        let mut cluster: Vec<Vec<(usize, f64)>> = vec![Vec::new()];
        let mut room = 1.0f64;
        for (j, mut w) in pts {
            while w > MASS_TOL {
                if room <= MASS_TOL {
                    cluster.push(Vec::new());
                    room = 1.0;
                }
                let take = w.min(room);
                cluster.last_mut().unwrap().push((j, take));
                w -= take;
                room -= take;
            }
        }
        slots.insert(c, cluster);
    }
    slots
}

pub struct McmfEdge {
    pub to: usize,
    rev: usize,
    pub cap: i64,
    cost: i64,
}

/// Min-cost max-flow on a directed graph with integer capacities and costs;
/// public so exact oracles can cross-check the same primitive.
pub struct Mcmf {
    pub graph: Vec<Vec<McmfEdge>>,
}

impl Mcmf {
    pub fn new(n: usize) -> Self {
        Mcmf { graph: (0..n).map(|_| Vec::new()).collect() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> (usize, usize) {
        let a = self.graph[u].len();
        let b = self.graph[v].len();
        self.graph[u].push(McmfEdge { to: v, rev: b, cap, cost });
        self.graph[v].push(McmfEdge { to: u, rev: a, cap: 0, cost: -cost });
        (u, a)
    }

    /// Successive shortest augmenting paths with Johnson potentials; all
    /// original costs are nonnegative so plain Dijkstra works throughout.
    pub fn run(&mut self, s: usize, t: usize, mut need: i64) -> Result<i64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let n = self.graph.len();
        let mut pot = vec![0i64; n];
        let mut total = 0i64;
        while need > 0 {
            let mut dist = vec![i64::MAX; n];
            let mut prev: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); n];
            let mut heap = BinaryHeap::new();
            dist[s] = 0;
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (ei, e) in self.graph[u].iter().enumerate() {
                    if e.cap <= 0 || dist[u] == i64::MAX {
                        continue;
                    }
                    let nd = dist[u] + e.cost + pot[u] - pot[e.to];
                    debug_assert!(e.cost + pot[u] - pot[e.to] >= 0, "negative reduced cost");
                    if nd < dist[e.to] {
                        dist[e.to] = nd;
                        prev[e.to] = (u, ei);
                        heap.push(Reverse((nd, e.to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                return Err(Error::Solver(format!(
                    "flow network disconnected with {need} units unrouted"
                )));
            }
            for v in 0..n {
                if dist[v] < i64::MAX {
                    pot[v] += dist[v];
                }
            }
            // Bottleneck along the path.
            let mut push = need;
            let mut v = t;
            while v != s {
                let (u, ei) = prev[v];
                push = push.min(self.graph[u][ei].cap);
                v = u;
            }
            let mut v = t;
            while v != s {
                let (u, ei) = prev[v];
                self.graph[u][ei].cap -= push;
                let rev = self.graph[u][ei].rev;
                self.graph[v][rev].cap += push;
                total += push * self.graph[u][ei].cost;
                v = u;
            }
            need -= push;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone)]
pub struct RoundingReport {
    /// Max over clusters of |integral size - fractional size|.
    pub max_size_change: f64,
    /// Max over clusters, per channel, of |integral mass - fractional mass|.
    pub max_mass_change: Vec<f64>,
    /// Total scaled flow cost as the solver saw it.
    pub flow_cost: i64,
    pub cost_scale: f64,
}

/// Round `frac` to an integral assignment. Guarantees, checked on every call:
/// every cluster's size changes by less than one, and its color mass (value
/// mass for metric membership) changes by at most one unit (at most R).
pub fn round_assignment(
    dataset: &Dataset,
    frac: &FractionalAssignment,
    objective: Objective,
    cost_scale: f64,
) -> Result<(Solution, RoundingReport)> {
    let n = dataset.n();
    if frac.x.len() != n {
        return Err(Error::Contract("fractional assignment does not cover the dataset".into()));
    }
    let slots = build_cluster_slots(dataset, frac);

    // Node layout: [points][slots][sink][S*][T*]. Every full slot goes
    // straight to T* with capacity one and must be saturated; only the final
    // partial slot of a cluster competes with the others through the shared
    // sink pool. This pins each cluster's size to floor or ceil of its
    // fractional mass, and guarantees an empty slot can only be a last slot,
    // which the mass-change bound relies on.
    let mut slot_nodes: Vec<(usize, usize)> = Vec::new(); // (center, slot idx)
    for (&c, cl) in &slots {
        for q in 0..cl.len() {
            slot_nodes.push((c, q));
        }
    }
    let n_slots = slot_nodes.len();
    let points_base = 0;
    let slots_base = n;
    let sink = slots_base + n_slots;
    let s_star = sink + 1;
    let t_star = sink + 2;
    let mut net = Mcmf::new(t_star + 1);

    let slot_index: BTreeMap<(usize, usize), usize> = slot_nodes
        .iter()
        .enumerate()
        .map(|(i, &(c, q))| ((c, q), slots_base + i))
        .collect();

    for j in 0..n {
        net.add_edge(s_star, points_base + j, 1, 0);
    }
    // Point -> slot edges, remembering them for extraction.
    let mut point_edges: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n]; // (center, node, edge idx)
    let mut full_total = 0i64;
    for (&c, cl) in &slots {
        for (q, slot) in cl.iter().enumerate() {
            let sn = slot_index[&(c, q)];
            let mass: f64 = slot.iter().map(|&(_, w)| w).sum();
            for &(j, _) in slot {
                let d = dataset.dist(j, c);
                let cost = (cost_scale * objective.edge_cost(d)).round() as i64;
                let (u, ei) = net.add_edge(points_base + j, sn, 1, cost);
                point_edges[j].push((c, u, ei));
            }
            if mass >= 1.0 - MASS_TOL {
                net.add_edge(sn, t_star, 1, 0);
                full_total += 1;
            } else {
                net.add_edge(sn, sink, 1, 0);
            }
        }
    }
    let extras = n as i64 - full_total;
    if extras > 0 {
        net.add_edge(sink, t_star, extras, 0);
    }

    let flow_cost = net.run(s_star, t_star, n as i64)?;

    // Extract: the saturated point->slot edge names the point's cluster.
    let mut assignment = vec![usize::MAX; n];
    for j in 0..n {
        for &(c, u, ei) in &point_edges[j] {
            if net.graph[u][ei].cap == 0 {
                assignment[j] = c;
                break;
            }
        }
        if assignment[j] == usize::MAX {
            return Err(Error::Solver(format!("point {j} left unassigned by the flow")));
        }
    }
    let mut solution = Solution { centers: frac.centers.clone(), assignment, cost: 0.0 };
    solution.cost = crate::types::evaluate_cost(dataset, &solution, objective)?;

    let report = check_guarantees(dataset, frac, &solution, flow_cost, cost_scale)?;
    Ok((solution, report))
}

/// The rounding guarantees, verified against the fractional input.
fn check_guarantees(
    dataset: &Dataset,
    frac: &FractionalAssignment,
    solution: &Solution,
    flow_cost: i64,
    cost_scale: f64,
) -> Result<RoundingReport> {
    let ch = dataset.color_model.channels();
    let frac_sizes = frac.cluster_mass();
    let frac_mass = frac.color_mass(dataset);
    let int_sizes = solution.cluster_sizes();
    let int_mass = crate::types::color_mass(dataset, solution);

    let mut max_size_change = 0.0f64;
    for (&c, &fs) in &frac_sizes {
        let is = int_sizes.get(&c).copied().unwrap_or(0) as f64;
        max_size_change = max_size_change.max((is - fs).abs());
    }
    if max_size_change >= 1.0 + 1e-6 {
        return Err(Error::Solver(format!(
            "rounding moved a cluster size by {max_size_change}, expected < 1"
        )));
    }

    // Mass bound: one unit of the sort statistic. Channel 0 carries the
    // guarantee directly; with two channels the complement inherits it.
    let unit = match dataset.color_model {
        ColorModel::MetricMembership { r_max } => r_max as f64,
        _ => 1.0,
    };
    let mut max_mass_change = vec![0.0f64; ch];
    for (&(c, h), &fm) in &frac_mass {
        let im = int_mass.get(&(c, h)).copied().unwrap_or(0.0);
        max_mass_change[h] = max_mass_change[h].max((im - fm).abs());
    }
    if max_mass_change[0] > unit + 1e-6 {
        return Err(Error::Solver(format!(
            "rounding moved channel-0 mass by {}, bound is {unit}",
            max_mass_change[0]
        )));
    }
    if ch == 2 && max_mass_change[1] > unit + max_size_change + 1e-6 {
        // |d(mass_1)| = |d(size) - d(mass_0)| <= |d(size)| + 1; anything
        // beyond that means the complement bookkeeping is broken.
        return Err(Error::Solver("complement channel drifted beyond its bound".into()));
    }
    Ok(RoundingReport { max_size_change, max_mass_change, flow_cost, cost_scale })
}
