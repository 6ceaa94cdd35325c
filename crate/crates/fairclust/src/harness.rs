//! Experiment harness: dataset loading, label perturbation, the thresholding
//! baseline, synthetic stand-in generators, the end-to-end two-step pipeline,
//! and sweep execution with CSV/JSON reports.

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::colorblind::{gonzalez_kcenter, kmeanspp_lloyd, local_search_kmedian, CenterSet};
use crate::error::{Error, Result};
use crate::fairlp::{
    kcenter_radius_search, solve_fair_assignment, FairLpOptions, FractionalAssignment,
};
use crate::flowround::{round_assignment, DEFAULT_COST_SCALE};
use crate::multicolor::solve_large_cluster;
use crate::types::{
    experiment_cost, max_additive_violation, normalize_features, ColorModel, Dataset,
    FairnessSpec, Objective, Point, Solution,
};

// ---------------------------------------------------------------------------
// Dataset schema + CSV loading
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    Color,
    Value,
    Ignore,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
    /// Category labels for a color column, in color-index order. An entry may
    /// list several labels separated by '|' to merge them into one color.
    #[serde(default)]
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
    /// "deterministic" (color column) or "metric" (value column).
    pub color_model: String,
    #[serde(default = "default_true")]
    pub normalize: bool,
}

fn default_true() -> bool {
    true
}

pub fn load_schema(path: &Path) -> Result<DatasetSchema> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Load a CSV against a schema: feature columns become (optionally min-max
/// normalized) coordinates; a color column maps categories to color indices;
/// a value column feeds the metric-membership preprocessor.
pub fn load_dataset(schema: &DatasetSchema, csv_path: &Path) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(csv_path)?;
    let headers = rdr.headers()?.clone();
    let col_idx = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Input(format!("column {name} missing from {csv_path:?}")))
    };
    let mut feat_cols = Vec::new();
    let mut color_col: Option<(usize, &ColumnSpec)> = None;
    let mut value_col: Option<usize> = None;
    for spec in &schema.columns {
        match spec.role {
            ColumnRole::Feature => feat_cols.push(col_idx(&spec.name)?),
            ColumnRole::Color => color_col = Some((col_idx(&spec.name)?, spec)),
            ColumnRole::Value => value_col = Some(col_idx(&spec.name)?),
            ColumnRole::Ignore => {}
        }
    }
    let mut raw: Vec<Vec<f64>> = Vec::new();
    let mut colors: Vec<usize> = Vec::new();
    let mut values: Vec<i64> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let mut row = Vec::with_capacity(feat_cols.len());
        for &c in &feat_cols {
            row.push(record[c].trim().parse::<f64>().map_err(|e| {
                Error::Input(format!("bad numeric value {:?}: {e}", &record[c]))
            })?);
        }
        raw.push(row);
        if let Some((c, spec)) = color_col {
            let label = record[c].trim();
            let idx = spec
                .values
                .iter()
                .position(|v| v.split('|').any(|alias| alias == label))
                .ok_or_else(|| Error::Input(format!("unknown color label {label:?}")))?;
            colors.push(idx);
        }
        if let Some(c) = value_col {
            values.push(record[c].trim().parse::<i64>().map_err(|e| {
                Error::Input(format!("bad integer value {:?}: {e}", &record[c]))
            })?);
        }
    }
    let coords = if schema.normalize { normalize_features(&raw)? } else { raw };
    match schema.color_model.as_str() {
        "deterministic" => {
            let (_, spec) = color_col
                .ok_or_else(|| Error::Input("deterministic schema needs a color column".into()))?;
            let points = coords
                .into_iter()
                .zip(&colors)
                .enumerate()
                .map(|(i, (c, &col))| Point::new(i, c).with_color(col))
                .collect();
            Dataset::new(points, ColorModel::Deterministic { num_colors: spec.values.len() })
        }
        "metric" => {
            if value_col.is_none() {
                return Err(Error::Input("metric schema needs a value column".into()));
            }
            preprocess_metric_membership(coords, &values)
        }
        other => Err(Error::Input(format!("unknown color model {other:?}"))),
    }
}

/// Shift the fairness attribute so its minimum is zero and set R to the new
/// maximum; the attribute is not used as a coordinate.
pub fn preprocess_metric_membership(coords: Vec<Vec<f64>>, values: &[i64]) -> Result<Dataset> {
    if coords.len() != values.len() || values.is_empty() {
        return Err(Error::Input("coordinate/value length mismatch".into()));
    }
    let min = *values.iter().min().unwrap();
    let max = *values.iter().max().unwrap();
    let r = (max - min) as u64;
    if r == 0 {
        return Err(Error::Input("constant fairness attribute: R = 0 has no content".into()));
    }
    let points = coords
        .into_iter()
        .zip(values)
        .enumerate()
        .map(|(i, (c, &v))| Point::new(i, c).with_value((v - min) as u64))
        .collect();
    Dataset::new(points, ColorModel::MetricMembership { r_max: r })
}

// ---------------------------------------------------------------------------
// Bounds, perturbation, baselines
// ---------------------------------------------------------------------------

/// Bounds from dataset proportions: l_h = (1-delta) f_h, u_h = f_h / (1-delta),
/// where f_h is the mean marginal (mean value for metric membership).
pub fn derive_bounds(dataset: &Dataset, delta: f64) -> Result<FairnessSpec> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Input(format!("delta {delta} outside [0, 1)")));
    }
    let n = dataset.n() as f64;
    let ch = dataset.color_model.channels();
    let cap = match dataset.color_model {
        ColorModel::MetricMembership { r_max } => r_max as f64,
        _ => 1.0 - 1e-9,
    };
    let mut lower = Vec::with_capacity(ch);
    let mut upper = Vec::with_capacity(ch);
    for h in 0..ch {
        let f: f64 = (0..dataset.n()).map(|j| dataset.marginal(j, h)).sum::<f64>() / n;
        lower.push((f * (1.0 - delta)).max(f64::MIN_POSITIVE));
        upper.push(if delta == 0.0 { f.min(cap) } else { (f / (1.0 - delta)).min(cap) });
    }
    FairnessSpec::new(lower, upper, delta)
}

/// Two-color label noise: each point's marginal becomes p_acc on its original
/// color and 1 - p_acc on the other. p_acc = 1 keeps the labels; p_acc = 0.5
/// erases them.
pub fn perturb_labels(dataset: &Dataset, p_acc: f64) -> Result<Dataset> {
    match dataset.color_model {
        ColorModel::Deterministic { num_colors: 2 } => {}
        _ => return Err(Error::Input("label perturbation needs exactly two colors".into())),
    }
    if !(0.5..=1.0).contains(&p_acc) {
        return Err(Error::Input(format!("p_acc {p_acc} outside [0.5, 1]")));
    }
    let points = dataset
        .points
        .iter()
        .map(|p| {
            let c = p.color.unwrap();
            let probs = if c == 0 { vec![p_acc, 1.0 - p_acc] } else { vec![1.0 - p_acc, p_acc] };
            Point::new(p.id, p.coords.clone()).with_probs(probs)
        })
        .collect();
    Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 })
}

/// Deterministic baseline: keep the color whose marginal exceeds one half;
/// exact ties go to color 0.
pub fn threshold_baseline(dataset: &Dataset) -> Result<Dataset> {
    match dataset.color_model {
        ColorModel::Probabilistic { num_colors: 2 } => {}
        _ => return Err(Error::Input("thresholding needs two probabilistic colors".into())),
    }
    let points = dataset
        .points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let c = if dataset.marginal(j, 0) >= 0.5 { 0 } else { 1 };
            Point::new(p.id, p.coords.clone()).with_color(c)
        })
        .collect();
    Dataset::new(points, ColorModel::Deterministic { num_colors: 2 })
}

/// Noisy multicolor marginals standing in for an imperfect classifier: each
/// point gets `accuracy` on its true color and the rest spread uniformly.
pub fn synthetic_noisy_multicolor(dataset: &Dataset, accuracy: f64) -> Result<Dataset> {
    let m = match dataset.color_model {
        ColorModel::Deterministic { num_colors } => num_colors,
        _ => return Err(Error::Input("noisy multicolor needs deterministic colors".into())),
    };
    if accuracy <= 1.0 / m as f64 || accuracy > 1.0 {
        return Err(Error::Input(format!(
            "accuracy {accuracy} must exceed the uninformative 1/{m}"
        )));
    }
    let off = (1.0 - accuracy) / (m as f64 - 1.0).max(1.0);
    let points = dataset
        .points
        .iter()
        .map(|p| {
            let c = p.color.unwrap();
            let probs = (0..m).map(|h| if h == c { accuracy } else { off }).collect();
            Point::new(p.id, p.coords.clone()).with_probs(probs)
        })
        .collect();
    Dataset::new(points, ColorModel::Probabilistic { num_colors: m })
}

/// Seeded subsample without replacement, preserving the original order.
pub fn subsample(dataset: &Dataset, size: usize, seed: u64) -> Result<Dataset> {
    if size > dataset.n() {
        return Err(Error::Input(format!(
            "subsample {size} exceeds dataset size {}",
            dataset.n()
        )));
    }
    let mut idx: Vec<usize> = (0..dataset.n()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    idx.truncate(size);
    idx.sort_unstable();
    let points = idx
        .iter()
        .enumerate()
        .map(|(new_id, &j)| {
            let p = &dataset.points[j];
            let mut q = Point::new(new_id, p.coords.clone());
            if let Some(c) = p.color {
                q = q.with_color(c);
            }
            if let Some(ref pr) = p.color_probs {
                q = q.with_probs(pr.clone());
            }
            if let Some(v) = p.value {
                q = q.with_value(v);
            }
            q
        })
        .collect();
    Dataset::new(points, dataset.color_model.clone())
}

// ---------------------------------------------------------------------------
// Synthetic stand-ins (the original survey datasets are not redistributable
// here; these generators mimic their shapes and proportions)
// ---------------------------------------------------------------------------

/// Bank-marketing-like table: age, log-balance, contact day, call duration,
/// campaign contacts; two colors (married / single) correlated with age so
/// color-blind clusters skew off proportion.
pub fn synth_bank_like(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for _ in 0..n {
        let age: f64 = 18.0 + 60.0 * rng.gen::<f64>().powf(1.3);
        let balance: f64 = (rng.gen::<f64>() * 8.0).exp() - 1.0;
        let day: f64 = 1.0 + (30.0 * rng.gen::<f64>()).floor();
        let duration: f64 = 30.0 + 600.0 * rng.gen::<f64>().powf(1.5);
        let campaign: f64 = 1.0 + (6.0 * rng.gen::<f64>().powi(2)).floor();
        // Moderate correlation with age only: color-blind clusters drift past
        // the proportion band while the other columns carry most of the cost.
        let p_married = 0.12 + 0.76 / (1.0 + (-(age - 40.0) / 9.0).exp());
        let c = usize::from(rng.gen::<f64>() >= p_married); // 0 married, 1 single
        raw.push(vec![age, balance.ln_1p(), day, duration, campaign]);
        colors.push(c);
    }
    let coords = normalize_features(&raw)?;
    let points = coords
        .into_iter()
        .zip(colors)
        .enumerate()
        .map(|(i, (c, col))| Point::new(i, c).with_color(col))
        .collect();
    Dataset::new(points, ColorModel::Deterministic { num_colors: 2 })
}

/// Census-like multicolor blobs: `sizes[i]` points around each of the given
/// blob centers, colors drawn per point from a jittered global distribution
/// (spatially independent).
pub fn synth_multicolor_blobs(
    sizes: &[usize],
    blob_centers: &[(f64, f64)],
    num_colors: usize,
    seed: u64,
) -> Result<Dataset> {
    if sizes.len() != blob_centers.len() {
        return Err(Error::Input("one size per blob center required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // A fixed global color distribution, mildly non-uniform.
    let base: Vec<f64> = (0..num_colors).map(|h| 1.0 + 0.5 * (h as f64)).collect();
    let base_sum: f64 = base.iter().sum();
    let mut points = Vec::new();
    let mut id = 0;
    for (&m, &(cx, cy)) in sizes.iter().zip(blob_centers) {
        for _ in 0..m {
            let x = cx + rng.sample::<f64, _>(rand_distr_stdnormal()) * 0.5;
            let y = cy + rng.sample::<f64, _>(rand_distr_stdnormal()) * 0.5;
            let mut probs: Vec<f64> = base
                .iter()
                .map(|b| (b / base_sum) * (0.6 + 0.8 * rng.gen::<f64>()))
                .collect();
            let s: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= s);
            points.push(Point::new(id, vec![x, y]).with_probs(probs));
            id += 1;
        }
    }
    Dataset::new(points, ColorModel::Probabilistic { num_colors })
}

/// Marginals hugging one half from above: thresholding collapses everyone to
/// color 0 and makes bounds around one half infeasible, while the
/// probabilistic pipeline is unaffected.
pub fn synth_near_half(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|i| {
            let side = if i % 2 == 0 { 0.0 } else { 6.0 };
            let x = side + rng.gen::<f64>();
            let p = 0.5 + 0.01 + 0.02 * rng.gen::<f64>();
            Point::new(i, vec![x, rng.gen::<f64>()]).with_probs(vec![p, 1.0 - p])
        })
        .collect();
    Dataset::new(points, ColorModel::Probabilistic { num_colors: 2 })
}

/// Box-Muller standard normal, avoiding an extra dependency.
struct StdNormal;

fn rand_distr_stdnormal() -> StdNormal {
    StdNormal
}

impl rand::distributions::Distribution<f64> for StdNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = rng.gen::<f64>().max(1e-12);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

// ---------------------------------------------------------------------------
// Two-step pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub centers: CenterSet,
    pub colorblind: Solution,
    pub colorblind_cost: f64,
    pub frac: FractionalAssignment,
    pub fair: Solution,
    pub fair_cost: f64,
    /// k-center only: the fair radius found by the binary search.
    pub fair_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorblindAlgo {
    Gonzalez,
    Kmeanspp,
    Localsearch,
}

impl std::str::FromStr for ColorblindAlgo {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gonzalez" => Ok(Self::Gonzalez),
            "kmeanspp" => Ok(Self::Kmeanspp),
            "localsearch" => Ok(Self::Localsearch),
            other => Err(format!("unknown color-blind algorithm {other:?}")),
        }
    }
}

/// Color-blind centers by the conventional algorithm for each objective:
/// Gonzalez for k-center, single-swap local search for k-median, k-means++
/// with Lloyd refinement for k-means. An explicit algorithm choice overrides
/// the default pairing.
pub fn colorblind_solve_with(
    dataset: &Dataset,
    objective: Objective,
    algo: Option<ColorblindAlgo>,
    k: usize,
    seed: u64,
) -> Result<CenterSet> {
    let algo = algo.unwrap_or(match objective {
        Objective::KCenter => ColorblindAlgo::Gonzalez,
        Objective::KMedian => ColorblindAlgo::Localsearch,
        Objective::KMeans => ColorblindAlgo::Kmeanspp,
    });
    match algo {
        ColorblindAlgo::Gonzalez => gonzalez_kcenter(dataset, k, seed),
        ColorblindAlgo::Localsearch => local_search_kmedian(dataset, k, seed, 1.0),
        ColorblindAlgo::Kmeanspp => kmeanspp_lloyd(dataset, k, seed, 50),
    }
}

pub fn colorblind_solve(
    dataset: &Dataset,
    objective: Objective,
    k: usize,
    seed: u64,
) -> Result<CenterSet> {
    colorblind_solve_with(dataset, objective, None, k, seed)
}

/// The two-step method end to end: color-blind centers, fair LP over them,
/// min-cost-flow rounding. Costs are in the experiment convention (sum of
/// squares for k-means).
pub fn run_pipeline(
    dataset: &Dataset,
    objective: Objective,
    k: usize,
    spec: &FairnessSpec,
    seed: u64,
) -> Result<PipelineRun> {
    let centers = colorblind_solve(dataset, objective, k, seed)?;
    run_pipeline_with_centers(dataset, objective, centers, spec)
}

pub fn run_pipeline_with_centers(
    dataset: &Dataset,
    objective: Objective,
    centers: CenterSet,
    spec: &FairnessSpec,
) -> Result<PipelineRun> {
    let assignment = crate::colorblind::nearest_assignment(dataset, &centers.centers);
    let mut colorblind =
        Solution { centers: centers.centers.clone(), assignment, cost: 0.0 };
    colorblind.cost = experiment_cost(dataset, &colorblind, objective)?;

    let (frac, fair_radius) = match objective {
        Objective::KCenter => {
            let res = kcenter_radius_search(
                dataset,
                &centers.centers,
                spec,
                &FairLpOptions::default(),
            )?;
            (res.assignment, Some(res.radius))
        }
        _ => (
            solve_fair_assignment(
                dataset,
                &centers.centers,
                objective,
                spec,
                &FairLpOptions::default(),
            )?,
            None,
        ),
    };
    let (mut fair, _report) = round_assignment(dataset, &frac, objective, DEFAULT_COST_SCALE)?;
    fair.cost = experiment_cost(dataset, &fair, objective)?;
    Ok(PipelineRun {
        colorblind_cost: colorblind.cost,
        fair_cost: fair.cost,
        centers,
        colorblind,
        frac,
        fair,
        fair_radius,
    })
}

// ---------------------------------------------------------------------------
// Experiment sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    Csv { schema: String, csv: String },
    BankLike { n: usize, seed: u64 },
    MulticolorBlobs { sizes: Vec<usize>, num_colors: usize, seed: u64 },
    NearHalf { n: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetSource,
    pub objective: Objective,
    pub k_min: usize,
    pub k_max: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Two-color label accuracy; applied when the loaded data is
    /// deterministic two-color.
    pub p_acc: Option<f64>,
    /// Multicolor classifier accuracy for deterministic multi-color data.
    pub accuracy: Option<f64>,
    /// Large-cluster run: relax bounds and enforce cluster sizes >= L.
    pub epsilon_relax: Option<f64>,
    pub cluster_lb: Option<f64>,
    /// Center algorithm override; defaults to the conventional pairing.
    #[serde(default)]
    pub colorblind: Option<ColorblindAlgo>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub subsample: Option<usize>,
    /// Output prefix; writes <out>.csv and <out>.json.
    pub out: Option<String>,
}

fn default_delta() -> f64 {
    0.2
}

fn default_trials() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub k: usize,
    pub seed: u64,
    pub n: usize,
    pub objective: Objective,
    pub colorblind_cost: Option<f64>,
    pub fair_cost: Option<f64>,
    pub pof: Option<f64>,
    pub gamma_colorblind: Option<f64>,
    pub gamma_fair: Option<f64>,
    pub normalized_gamma_fair: Option<f64>,
    pub min_cluster_size: Option<usize>,
    pub runtime_ms: u128,
    pub error: Option<String>,
    /// Fair assignment (center point-id per point) for audit.
    pub assignment: Option<Vec<usize>>,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn materialize(source: &DatasetSource) -> Result<Dataset> {
    match source {
        DatasetSource::Csv { schema, csv } => {
            let schema = load_schema(Path::new(schema))?;
            load_dataset(&schema, Path::new(csv))
        }
        DatasetSource::BankLike { n, seed } => synth_bank_like(*n, *seed),
        DatasetSource::MulticolorBlobs { sizes, num_colors, seed } => {
            let centers: Vec<(f64, f64)> = (0..sizes.len())
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / sizes.len() as f64;
                    (4.0 * a.cos(), 4.0 * a.sin())
                })
                .collect();
            synth_multicolor_blobs(sizes, &centers, *num_colors, *seed)
        }
        DatasetSource::NearHalf { n, seed } => synth_near_half(*n, *seed),
    }
}

/// Run one (k, seed) cell of a sweep. Never panics on per-row failure; the
/// error lands in the row.
fn run_row(config: &ExperimentConfig, base: &Dataset, k: usize, seed: u64) -> ReportRow {
    let start = std::time::Instant::now();
    let mut row = ReportRow {
        name: config.name.clone(),
        k,
        seed,
        n: 0,
        objective: config.objective,
        colorblind_cost: None,
        fair_cost: None,
        pof: None,
        gamma_colorblind: None,
        gamma_fair: None,
        normalized_gamma_fair: None,
        min_cluster_size: None,
        runtime_ms: 0,
        error: None,
        assignment: None,
    };
    let outcome = (|| -> Result<()> {
        let mut ds = match config.subsample {
            Some(s) if s < base.n() => subsample(base, s, seed)?,
            _ => base.clone(),
        };
        // Optional label models.
        if let Some(p_acc) = config.p_acc {
            ds = perturb_labels(&ds, p_acc)?;
        } else if let Some(acc) = config.accuracy {
            ds = synthetic_noisy_multicolor(&ds, acc)?;
        }
        row.n = ds.n();
        let spec = derive_bounds(&ds, config.delta)?;

        if let (Some(eps), Some(l)) = (config.epsilon_relax, config.cluster_lb) {
            // Large-cluster pipeline.
            let centers =
                colorblind_solve_with(&ds, config.objective, config.colorblind, k, seed)?;
            let nearest = crate::colorblind::nearest_assignment(&ds, &centers.centers);
            let mut cb = Solution { centers: centers.centers.clone(), assignment: nearest, cost: 0.0 };
            cb.cost = experiment_cost(&ds, &cb, config.objective)?;
            let run = solve_large_cluster(
                &ds,
                &centers.centers,
                config.objective,
                &spec,
                eps,
                l,
                seed,
            )?;
            let mut fair = run.solution;
            fair.cost = experiment_cost(&ds, &fair, config.objective)?;
            let vr = max_additive_violation(&ds, &fair, &spec)?;
            let vr_cb = max_additive_violation(&ds, &cb, &spec)?;
            row.colorblind_cost = Some(cb.cost);
            row.fair_cost = Some(fair.cost);
            row.pof = Some(crate::types::price_of_fairness(fair.cost, cb.cost)?);
            row.gamma_colorblind = Some(vr_cb.gamma);
            row.gamma_fair = Some(vr.gamma);
            row.normalized_gamma_fair = Some(vr.gamma_over_min_cluster_size());
            row.min_cluster_size = vr.cluster_sizes.values().copied().min();
            row.assignment = Some(fair.assignment);
        } else {
            let centers =
                colorblind_solve_with(&ds, config.objective, config.colorblind, k, seed)?;
            let run = run_pipeline_with_centers(&ds, config.objective, centers, &spec)?;
            let vr = max_additive_violation(&ds, &run.fair, &spec)?;
            let vr_cb = max_additive_violation(&ds, &run.colorblind, &spec)?;
            row.colorblind_cost = Some(run.colorblind_cost);
            row.fair_cost = Some(run.fair_cost);
            row.pof =
                Some(crate::types::price_of_fairness(run.fair_cost, run.colorblind_cost)?);
            row.gamma_colorblind = Some(vr_cb.gamma);
            row.gamma_fair = Some(vr.gamma);
            row.normalized_gamma_fair = Some(vr.normalized_gamma);
            row.min_cluster_size = vr.cluster_sizes.values().copied().min();
            row.assignment = Some(run.fair.assignment);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.runtime_ms = start.elapsed().as_millis();
    row
}

/// Sweep k in [k_min, k_max] x `trials` seeds. Rows run on a small worker
/// pool (they are independent); output order is deterministic regardless.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    if config.k_min < 1 || config.k_min > config.k_max {
        return Err(Error::Input(format!(
            "bad k range [{}, {}]",
            config.k_min, config.k_max
        )));
    }
    let base = materialize(&config.dataset)?;
    if let Some(s) = config.subsample {
        if s > base.n() {
            return Err(Error::Input(format!(
                "subsample {s} exceeds dataset size {}",
                base.n()
            )));
        }
    }
    let mut cells = Vec::new();
    for k in config.k_min..=config.k_max {
        for t in 0..config.trials {
            cells.push((k, config.seed.wrapping_add(t as u64)));
        }
    }
    let queue: Mutex<VecDeque<(usize, usize, u64)>> = Mutex::new(
        cells.iter().enumerate().map(|(i, &(k, s))| (i, k, s)).collect(),
    );
    let results: Mutex<Vec<Option<ReportRow>>> = Mutex::new(vec![None; cells.len()]);
    let workers = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(8);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = queue.lock().unwrap().pop_front();
                let Some((i, k, seed)) = job else { break };
                let row = run_row(config, &base, k, seed);
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows: Vec<ReportRow> =
        results.into_inner().unwrap().into_iter().map(|r| r.unwrap()).collect();
    if let Some(prefix) = &config.out {
        write_reports(&rows, Path::new(prefix))?;
    }
    Ok(rows)
}

/// Emit <prefix>.csv (flat metrics) and <prefix>.json (full rows including
/// assignments).
pub fn write_reports(rows: &[ReportRow], prefix: &Path) -> Result<()> {
    let csv_path = prefix.with_extension("csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record([
        "name",
        "k",
        "seed",
        "n",
        "objective",
        "colorblind_cost",
        "fair_cost",
        "pof",
        "gamma_colorblind",
        "gamma_fair",
        "normalized_gamma_fair",
        "min_cluster_size",
        "runtime_ms",
        "error",
    ])?;
    let fmt = |x: Option<f64>| x.map(|v| format!("{v:.9}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.name.clone(),
            r.k.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            format!("{:?}", r.objective).to_lowercase(),
            fmt(r.colorblind_cost),
            fmt(r.fair_cost),
            fmt(r.pof),
            fmt(r.gamma_colorblind),
            fmt(r.gamma_fair),
            fmt(r.normalized_gamma_fair),
            r.min_cluster_size.map(|v| v.to_string()).unwrap_or_default(),
            r.runtime_ms.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let json_path = prefix.with_extension("json");
    let mut f = std::fs::File::create(&json_path)?;
    f.write_all(serde_json::to_string_pretty(rows)?.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_bounds_examples() {
        // Two colors at 50/50, delta 0.2 -> [0.4, 0.625].
        let points: Vec<Point> =
            (0..4).map(|i| Point::new(i, vec![i as f64]).with_color(i % 2)).collect();
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
        let spec = derive_bounds(&ds, 0.2).unwrap();
        assert!((spec.lower[0] - 0.4).abs() < 1e-12);
        assert!((spec.upper[0] - 0.625).abs() < 1e-12);
        // delta 0 pins both to f.
        let spec0 = derive_bounds(&ds, 0.0).unwrap();
        assert!((spec0.lower[0] - 0.5).abs() < 1e-12 && (spec0.upper[0] - 0.5).abs() < 1e-12);
        // Metric: values {0,1,2,3} -> f = 1.5, l = 1.2, u = 1.875.
        let pts: Vec<Point> =
            (0..4).map(|i| Point::new(i, vec![i as f64]).with_value(i as u64)).collect();
        let md = Dataset::new(pts, ColorModel::MetricMembership { r_max: 3 }).unwrap();
        let mspec = derive_bounds(&md, 0.2).unwrap();
        assert!((mspec.lower[0] - 1.2).abs() < 1e-12);
        assert!((mspec.upper[0] - 1.875).abs() < 1e-12);
    }

    #[test]
    fn perturb_and_threshold_roundtrip() {
        let points: Vec<Point> =
            (0..6).map(|i| Point::new(i, vec![i as f64]).with_color(i % 2)).collect();
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 2 }).unwrap();
        let noisy = perturb_labels(&ds, 0.7).unwrap();
        assert!((noisy.marginal(0, 0) - 0.7).abs() < 1e-12);
        assert!((noisy.marginal(1, 0) - 0.3).abs() < 1e-12);
        // p_acc = 1 keeps certainty; p_acc = 0.5 erases it.
        let sure = perturb_labels(&ds, 1.0).unwrap();
        assert!((sure.marginal(1, 1) - 1.0).abs() < 1e-12);
        let coin = perturb_labels(&ds, 0.5).unwrap();
        assert!((coin.marginal(3, 0) - 0.5).abs() < 1e-12);
        // Thresholding above 0.5 restores the original labels.
        let back = threshold_baseline(&noisy).unwrap();
        for (a, b) in ds.points.iter().zip(&back.points) {
            assert_eq!(a.color, b.color);
        }
        // Exact half goes to color 0.
        let tied = threshold_baseline(&coin).unwrap();
        assert!(tied.points.iter().all(|p| p.color == Some(0)));
    }

    #[test]
    fn noisy_multicolor_marginals() {
        let points: Vec<Point> =
            (0..7).map(|i| Point::new(i, vec![i as f64]).with_color(i % 7)).collect();
        let ds = Dataset::new(points, ColorModel::Deterministic { num_colors: 7 }).unwrap();
        let noisy = synthetic_noisy_multicolor(&ds, 0.68).unwrap();
        assert!((noisy.marginal(0, 0) - 0.68).abs() < 1e-12);
        assert!((noisy.marginal(0, 1) - 0.32 / 6.0).abs() < 1e-12);
        // accuracy 1 keeps determinism in marginal form.
        let exact = synthetic_noisy_multicolor(&ds, 1.0).unwrap();
        assert!((exact.marginal(3, 3) - 1.0).abs() < 1e-12);
        // Uninformative accuracy rejected.
        assert!(synthetic_noisy_multicolor(&ds, 1.0 / 7.0).is_err());
    }

    #[test]
    fn metric_preprocess_examples() {
        let coords = vec![vec![0.0], vec![1.0], vec![2.0]];
        let ds = preprocess_metric_membership(coords.clone(), &[20, 30, 90]).unwrap();
        let vals: Vec<u64> = ds.points.iter().map(|p| p.value.unwrap()).collect();
        assert_eq!(vals, vec![0, 10, 70]);
        assert!(matches!(ds.color_model, ColorModel::MetricMembership { r_max: 70 }));
        // Constant attribute rejected.
        assert!(preprocess_metric_membership(coords.clone(), &[5, 5, 5]).is_err());
        // Already-zero minimum unchanged.
        let ds = preprocess_metric_membership(coords, &[0, 3, 9]).unwrap();
        assert_eq!(ds.points[1].value, Some(3));
    }

    #[test]
    fn subsample_deterministic_and_sized() {
        let ds = synth_bank_like(200, 1).unwrap();
        let a = subsample(&ds, 50, 7).unwrap();
        let b = subsample(&ds, 50, 7).unwrap();
        assert_eq!(a.n(), 50);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.coords, q.coords);
            assert_eq!(p.color, q.color);
        }
        assert!(subsample(&ds, 201, 7).is_err());
    }

    #[test]
    fn csv_loader_roundtrip() {
        let dir = std::env::temp_dir().join("fairclust_loader_test");
        std::fs::create_dir_all(&dir).unwrap();
        let csv_path = dir.join("tiny.csv");
        std::fs::write(&csv_path, "age,balance,marital\n30,100,married\n50,200,single\n40,50,married\n25,80,divorced\n").unwrap();
        let schema = DatasetSchema {
            name: "tiny".into(),
            columns: vec![
                ColumnSpec { name: "age".into(), role: ColumnRole::Feature, values: vec![] },
                ColumnSpec { name: "balance".into(), role: ColumnRole::Feature, values: vec![] },
                ColumnSpec {
                    name: "marital".into(),
                    role: ColumnRole::Color,
                    // '|' merges several labels into one color index.
                    values: vec!["married".into(), "single|divorced".into()],
                },
            ],
            color_model: "deterministic".into(),
            normalize: true,
        };
        let ds = load_dataset(&schema, &csv_path).unwrap();
        assert_eq!(ds.n(), 4);
        assert_eq!(ds.points[1].color, Some(1));
        assert_eq!(ds.points[3].color, Some(1));
        // Min-max normalization puts coordinates in [0, 1].
        assert!(ds.points.iter().all(|p| p.coords.iter().all(|&c| (0.0..=1.0).contains(&c))));
    }

    #[test]
    fn pof_trend_in_p_acc() {
        // Average POF over seeds should not decrease as labels get cleaner
        // (one inversion allowed), and at p_acc = 0.5 fairness is free.
        let base = synth_bank_like(220, 42).unwrap();
        let p_accs = [0.5, 0.7, 0.9, 1.0];
        let mut means = Vec::new();
        for &p_acc in &p_accs {
            let mut sum = 0.0;
            let seeds = 10;
            for seed in 0..seeds {
                let noisy = perturb_labels(&base, p_acc).unwrap();
                let spec = derive_bounds(&noisy, 0.2).unwrap();
                let run = run_pipeline(&noisy, Objective::KMedian, 3, &spec, seed).unwrap();
                sum += run.fair_cost / run.colorblind_cost;
            }
            means.push(sum / seeds as f64);
        }
        let inversions = means
            .windows(2)
            .filter(|w| w[1] < w[0] - 1e-9)
            .count();
        assert!(inversions <= 1, "POF means not increasing: {means:?}");
        assert!(
            (means[0] - 1.0).abs() < 0.01,
            "POF at p_acc = 0.5 should be within 1% of 1, got {}",
            means[0]
        );
    }

    #[test]
    fn experiment_rows_recompute() {
        let dir = std::env::temp_dir().join("fairclust_experiment_test");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("report");
        let config = ExperimentConfig {
            name: "smoke".into(),
            dataset: DatasetSource::BankLike { n: 150, seed: 5 },
            objective: Objective::KMeans,
            k_min: 2,
            k_max: 3,
            delta: 0.2,
            p_acc: Some(0.7),
            accuracy: None,
            epsilon_relax: None,
            cluster_lb: None,
            colorblind: None,
            trials: 2,
            seed: 0,
            subsample: Some(120),
            out: Some(out.to_string_lossy().into_owned()),
        };
        let rows = run_experiment(&config).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.error.is_none(), "row failed: {:?}", row.error);
            // Recompute gamma from the stored assignment; must match exactly.
            let ds = subsample(
                &synth_bank_like(150, 5).unwrap(),
                120,
                row.seed,
            )
            .unwrap();
            let ds = perturb_labels(&ds, 0.7).unwrap();
            let spec = derive_bounds(&ds, 0.2).unwrap();
            let assignment = row.assignment.clone().unwrap();
            let mut centers: Vec<usize> = assignment.clone();
            centers.sort_unstable();
            centers.dedup();
            let sol = Solution { centers, assignment, cost: 0.0 };
            let vr = max_additive_violation(&ds, &sol, &spec).unwrap();
            assert!(
                (vr.gamma - row.gamma_fair.unwrap()).abs() < 1e-12,
                "gamma mismatch: {} vs {}",
                vr.gamma,
                row.gamma_fair.unwrap()
            );
            // POF consistency.
            let pof = row.fair_cost.unwrap() / row.colorblind_cost.unwrap();
            assert!((pof - row.pof.unwrap()).abs() < 1e-9);
        }
        // Files landed.
        assert!(out.with_extension("csv").exists());
        assert!(out.with_extension("json").exists());
    }
}
