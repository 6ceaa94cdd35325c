//! Color-blind approximation algorithms for picking the center set: Gonzalez
//! farthest-first traversal for k-center, k-means++ with Lloyd refinement, and
//! single-swap local search for k-median.
//!
//! All algorithms return centers that are dataset points, so the assignment LP
//! and the flow construction can index centers as points.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorBlindAlgo {
    Gonzalez,
    KMeansPP,
    LocalSearch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterSet {
    pub centers: Vec<usize>,
    pub algo: ColorBlindAlgo,
    /// Nominal approximation ratio: 2 for Gonzalez, 5 for k-median local
    /// search; k-means++ is a heuristic.
    pub alpha: f64,
}

fn check_k(dataset: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > dataset.n() {
        return Err(Error::Input(format!("k = {} outside 1..={}", k, dataset.n())));
    }
    Ok(())
}

/// Farthest-first traversal (2-approximation for k-center). The first center
/// is point 0 for seed 0; a nonzero seed picks it at random. Ties broken by
/// lowest point id.
pub fn gonzalez_kcenter(dataset: &Dataset, k: usize, seed: u64) -> Result<CenterSet> {
    check_k(dataset, k)?;
    let n = dataset.n();
    let first = if seed == 0 {
        0
    } else {
        ChaCha8Rng::seed_from_u64(seed).gen_range(0..n)
    };
    let mut centers = vec![first];
    let mut dist_to_set: Vec<f64> = (0..n).map(|j| dataset.dist(j, first)).collect();
    while centers.len() < k {
        let mut best = 0;
        let mut best_d = f64::NEG_INFINITY;
        for j in 0..n {
            if dist_to_set[j] > best_d {
                best_d = dist_to_set[j];
                best = j;
            }
        }
        centers.push(best);
        for j in 0..n {
            let d = dataset.dist(j, best);
            if d < dist_to_set[j] {
                dist_to_set[j] = d;
            }
        }
    }
    Ok(CenterSet { centers, algo: ColorBlindAlgo::Gonzalez, alpha: 2.0 })
}

fn seeding(dataset: &Dataset, k: usize, rng: &mut ChaCha8Rng, squared: bool) -> Vec<usize> {
    let n = dataset.n();
    let mut centers = vec![rng.gen_range(0..n)];
    let mut dist: Vec<f64> = (0..n).map(|j| dataset.dist(j, centers[0])).collect();
    while centers.len() < k {
        let weights: Vec<f64> = dist
            .iter()
            .map(|&d| if squared { d * d } else { d })
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total <= 0.0 {
            // All remaining mass on existing centers; take the lowest-id
            // point not yet chosen.
            (0..n).find(|j| !centers.contains(j)).unwrap_or(0)
        } else {
            let mut t = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (j, &w) in weights.iter().enumerate() {
                if t < w {
                    pick = j;
                    break;
                }
                t -= w;
            }
            pick
        };
        centers.push(next);
        for j in 0..n {
            let d = dataset.dist(j, next);
            if d < dist[j] {
                dist[j] = d;
            }
        }
    }
    centers
}

fn nearest_center(dataset: &Dataset, centers: &[usize], j: usize) -> (usize, f64) {
    let mut best = centers[0];
    let mut best_d = dataset.dist(j, centers[0]);
    for &c in &centers[1..] {
        let d = dataset.dist(j, c);
        if d < best_d || (d == best_d && c < best) {
            best_d = d;
            best = c;
        }
    }
    (best, best_d)
}

fn sse_to_means(dataset: &Dataset, means: &[Vec<f64>], assign: &[usize]) -> f64 {
    assign
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let d = crate::types::euclidean(&dataset.points[j].coords, &means[a]);
            d * d
        })
        .sum()
}

/// k-means++ (D^2 sampling) seeding followed by Lloyd iterations; the final
/// centers are snapped to the nearest distinct data points.
pub fn kmeanspp_lloyd(dataset: &Dataset, k: usize, seed: u64, max_iters: usize) -> Result<CenterSet> {
    check_k(dataset, k)?;
    let n = dataset.n();
    let dim = dataset.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = seeding(dataset, k, &mut rng, true);
    let mut means: Vec<Vec<f64>> = seeds.iter().map(|&c| dataset.points[c].coords.clone()).collect();
    let mut assign: Vec<usize> = (0..n)
        .map(|j| {
            (0..k)
                .min_by(|&a, &b| {
                    let da = crate::types::euclidean(&dataset.points[j].coords, &means[a]);
                    let db = crate::types::euclidean(&dataset.points[j].coords, &means[b]);
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap()
        })
        .collect();

    if max_iters == 0 {
        return Ok(CenterSet { centers: seeds, algo: ColorBlindAlgo::KMeansPP, alpha: f64::NAN });
    }

    let mut prev_sse = sse_to_means(dataset, &means, &assign);
    for _ in 0..max_iters {
        // Update step.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (j, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for (c, v) in dataset.points[j].coords.iter().enumerate() {
                sums[a][c] += v;
            }
        }
        for a in 0..k {
            if counts[a] > 0 {
                for c in 0..dim {
                    means[a][c] = sums[a][c] / counts[a] as f64;
                }
            }
        }
        // Assignment step.
        let new_assign: Vec<usize> = (0..n)
            .map(|j| {
                (0..k)
                    .min_by(|&a, &b| {
                        let da = crate::types::euclidean(&dataset.points[j].coords, &means[a]);
                        let db = crate::types::euclidean(&dataset.points[j].coords, &means[b]);
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap()
            })
            .collect();
        let sse = sse_to_means(dataset, &means, &new_assign);
        debug_assert!(sse <= prev_sse + 1e-9);
        let converged = new_assign == assign;
        assign = new_assign;
        prev_sse = sse;
        if converged {
            break;
        }
    }

    // Snap each mean to the nearest data point, keeping centers distinct.
    let mut centers: Vec<usize> = Vec::with_capacity(k);
    for mean in &means {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let da = crate::types::euclidean(&dataset.points[a].coords, mean);
            let db = crate::types::euclidean(&dataset.points[b].coords, mean);
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        });
        let pick = order.into_iter().find(|j| !centers.contains(j)).unwrap();
        centers.push(pick);
    }
    Ok(CenterSet { centers, algo: ColorBlindAlgo::KMeansPP, alpha: f64::NAN })
}

fn kmedian_cost(dataset: &Dataset, centers: &[usize]) -> f64 {
    (0..dataset.n()).map(|j| nearest_center(dataset, centers, j).1).sum()
}

/// Single-swap local search for k-median (Arya et al., 5-approximation),
/// initialized with D-sampling. A swap is accepted only when it improves the
/// cost by a factor of at least 1 + epsilon_ls / k.
pub fn local_search_kmedian(
    dataset: &Dataset,
    k: usize,
    seed: u64,
    epsilon_ls: f64,
) -> Result<CenterSet> {
    check_k(dataset, k)?;
    let n = dataset.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seeding(dataset, k, &mut rng, false);
    centers.sort_unstable();
    let mut cost = kmedian_cost(dataset, &centers);
    let accept_factor = 1.0 + epsilon_ls / k as f64;

    loop {
        let mut improved = false;
        'outer: for ci in 0..k {
            for p in 0..n {
                if centers.contains(&p) {
                    continue;
                }
                let old = centers[ci];
                centers[ci] = p;
                let new_cost = kmedian_cost(dataset, &centers);
                if new_cost * accept_factor <= cost {
                    cost = new_cost;
                    improved = true;
                    break 'outer;
                }
                centers[ci] = old;
            }
        }
        if !improved {
            break;
        }
    }
    centers.sort_unstable();
    Ok(CenterSet { centers, algo: ColorBlindAlgo::LocalSearch, alpha: 5.0 })
}

/// Nearest-center assignment for a fixed center set.
pub fn nearest_assignment(dataset: &Dataset, centers: &[usize]) -> Vec<usize> {
    (0..dataset.n()).map(|j| nearest_center(dataset, centers, j).0).collect()
}
