//! Dense bounded-variable primal simplex, sized for the fair-assignment LPs
//! (hundreds of rows, thousands of columns). Two phases with artificial
//! variables, Dantzig pricing with a Bland's-rule fallback after a degenerate
//! streak, and periodic basis refactorization.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const DEFAULT_FEAS_TOL: f64 = 1e-7;
pub const DEFAULT_OPT_TOL: f64 = 1e-7;

const INF: f64 = f64::INFINITY;
const PIVOT_TOL: f64 = 1e-9;
const DEGEN_STREAK_LIMIT: usize = 40;
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LpInstance {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable (lower, upper); infinities allowed.
    pub bounds: Vec<(f64, f64)>,
    /// Optional (center, point) -> column mapping for assignment LPs.
    pub labels: HashMap<(usize, usize), usize>,
}

impl LpInstance {
    pub fn new(num_vars: usize) -> Self {
        LpInstance {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            bounds: vec![(0.0, 1.0); num_vars],
            labels: HashMap::new(),
        }
    }

    pub fn add_row_sparse(&mut self, coeffs: Vec<(usize, f64)>, rel: Relation, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.num_vars));
        self.rows.push(Row { coeffs, rel, rhs });
    }

    pub fn add_row_dense(&mut self, coeffs: &[f64], rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars, "row width must match objective");
        let sparse = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (j, v))
            .collect();
        self.rows.push(Row { coeffs: sparse, rel, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(Error::Input("objective/bounds width mismatch".into()));
        }
        for (lo, hi) in &self.bounds {
            if lo > hi {
                return Err(Error::Input(format!("bound lo {lo} > hi {hi}")));
            }
        }
        Ok(())
    }

    /// Plain-text dump (CPLEX LP style) for cross-checking against external
    /// solvers.
    pub fn to_lp_format(&self) -> String {
        let mut s = String::from("Minimize\n obj:");
        for (j, c) in self.objective.iter().enumerate() {
            if *c != 0.0 {
                s += &format!(" {:+} x{}", c, j);
            }
        }
        s += "\nSubject To\n";
        for (r, row) in self.rows.iter().enumerate() {
            s += &format!(" r{}:", r);
            for (j, a) in &row.coeffs {
                s += &format!(" {:+} x{}", a, j);
            }
            let rel = match row.rel {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            s += &format!(" {} {}\n", rel, row.rhs);
        }
        s += "Bounds\n";
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            s += &format!(" {} <= x{} <= {}\n", lo, j, hi);
        }
        s += "End\n";
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Dual value per row (simplex multipliers at the final basis).
    pub duals: Vec<f64>,
    /// Rows whose artificials stayed positive when infeasible.
    pub infeasible_rows: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PhaseOutcome {
    Optimal,
    Unbounded,
    Stalled,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Simplex {
    m: usize,
    ncols: usize,
    n_struct: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    rhs: Vec<f64>,
    artificials: Vec<usize>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    xval: Vec<f64>,
    binv: Vec<f64>,
    feas_tol: f64,
    opt_tol: f64,
    bland: bool,
    /// Keep Bland's rule on for the whole solve (recovery attempts).
    force_bland: bool,
    /// Set when a refactorization hits a (near-)singular basis; the solution
    /// can't be trusted and the solve should restart from scratch.
    singular: bool,
    degen_streak: usize,
    pivots_since_refactor: usize,
}

impl Simplex {
    fn build(inst: &LpInstance) -> Simplex {
        let m = inst.rows.len();
        let n_struct = inst.num_vars;
        let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n_struct + 2 * m);
        let mut cost = Vec::new();
        let mut lo = Vec::new();
        let mut hi = Vec::new();

        let mut col_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_struct];
        for (r, row) in inst.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    col_entries[j].push((r, a));
                }
            }
        }
        for j in 0..n_struct {
            cols.push(std::mem::take(&mut col_entries[j]));
            cost.push(inst.objective[j]);
            lo.push(inst.bounds[j].0);
            hi.push(inst.bounds[j].1);
        }
        // One slack per row; equalities get a fixed slack.
        for (r, row) in inst.rows.iter().enumerate() {
            cols.push(vec![(r, 1.0)]);
            cost.push(0.0);
            match row.rel {
                Relation::Le => {
                    lo.push(0.0);
                    hi.push(INF);
                }
                Relation::Ge => {
                    lo.push(-INF);
                    hi.push(0.0);
                }
                Relation::Eq => {
                    lo.push(0.0);
                    hi.push(0.0);
                }
            }
        }
        let rhs = inst.rows.iter().map(|r| r.rhs).collect();
        Simplex {
            m,
            ncols: cols.len(),
            n_struct,
            cols,
            cost,
            lo,
            hi,
            rhs,
            artificials: Vec::new(),
            basis: Vec::new(),
            state: Vec::new(),
            xval: Vec::new(),
            binv: Vec::new(),
            feas_tol: DEFAULT_FEAS_TOL,
            opt_tol: DEFAULT_OPT_TOL,
            bland: false,
            force_bland: false,
            singular: false,
            degen_streak: 0,
            pivots_since_refactor: 0,
        }
    }

    /// Nonbasic resting value: the finite bound nearest zero.
    fn resting(&self, j: usize) -> (f64, VarState) {
        if self.lo[j].is_finite() {
            (self.lo[j], VarState::AtLower)
        } else if self.hi[j].is_finite() {
            (self.hi[j], VarState::AtUpper)
        } else {
            (0.0, VarState::AtLower)
        }
    }

    fn init_basis(&mut self) {
        self.state = Vec::with_capacity(self.ncols);
        self.xval = Vec::with_capacity(self.ncols);
        for j in 0..self.ncols {
            let (v, st) = self.resting(j);
            self.xval.push(v);
            self.state.push(st);
        }
        // Residual of each row with everything at its resting value.
        let mut resid = self.rhs.clone();
        for j in 0..self.ncols {
            if self.xval[j] != 0.0 {
                for &(r, a) in &self.cols[j] {
                    resid[r] -= a * self.xval[j];
                }
            }
        }
        self.basis = vec![usize::MAX; self.m];
        for r in 0..self.m {
            let slack = self.n_struct + r;
            // resid here still includes the slack's own resting contribution;
            // undo it to get the value the slack would need to take.
            let want = resid[r] + self.xval[slack];
            if want >= self.lo[slack] - self.feas_tol && want <= self.hi[slack] + self.feas_tol {
                self.basis[r] = slack;
                self.state[slack] = VarState::Basic(r);
                self.xval[slack] = want.clamp(self.lo[slack].max(-1e300), self.hi[slack].min(1e300));
            } else {
                // Park the slack at the bound nearest the residual and add an
                // artificial carrying the rest.
                let parked = if want > self.hi[slack] { self.hi[slack] } else { self.lo[slack] };
                self.xval[slack] = parked;
                let art_val = want - parked;
                let sign = if art_val >= 0.0 { 1.0 } else { -1.0 };
                let art = self.ncols;
                self.cols.push(vec![(r, sign)]);
                self.cost.push(0.0);
                self.lo.push(0.0);
                self.hi.push(INF);
                self.xval.push(art_val.abs());
                self.state.push(VarState::Basic(r));
                self.basis[r] = art;
                self.artificials.push(art);
                self.ncols += 1;
            }
        }
        self.refactor();
    }

    /// Recompute the basis inverse and basic values from scratch.
    fn refactor(&mut self) {
        let m = self.m;
        if m == 0 {
            return;
        }
        // Gauss-Jordan inversion of the basis matrix with partial pivoting.
        let mut a = vec![0.0; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            for &(row, v) in &self.cols[j] {
                a[row * m + r] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = a[col * m + col].abs();
            for r in col + 1..m {
                let v = a[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                // Numerically singular basis: nudge the pivot so the
                // inversion finishes, but flag the solve as untrustworthy so
                // the driver restarts from a fresh basis.
                self.singular = true;
                a[piv * m + col] += 1e-11;
            }
            if piv != col {
                for c in 0..m {
                    a.swap(col * m + c, piv * m + c);
                    inv.swap(col * m + c, piv * m + c);
                }
            }
            let d = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= d;
                inv[col * m + c] /= d;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for c in 0..m {
                            a[r * m + c] -= f * a[col * m + c];
                            inv[r * m + c] -= f * inv[col * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        // Basic values: x_B = B^-1 (rhs - A_N x_N).
        let mut rvec = self.rhs.clone();
        for j in 0..self.ncols {
            if matches!(self.state[j], VarState::Basic(_)) || self.xval[j] == 0.0 {
                continue;
            }
            for &(r, a) in &self.cols[j] {
                rvec[r] -= a * self.xval[j];
            }
        }
        for i in 0..m {
            let mut v = 0.0;
            for r in 0..m {
                v += self.binv[i * m + r] * rvec[r];
            }
            self.xval[self.basis[i]] = v;
        }
        self.pivots_since_refactor = 0;
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let c = cost[bj];
            if c != 0.0 {
                for r in 0..m {
                    y[r] += c * self.binv[i * m + r];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], cost: &[f64]) -> f64 {
        let mut d = cost[j];
        for &(r, a) in &self.cols[j] {
            d -= y[r] * a;
        }
        d
    }

    /// One phase of the simplex; `cost` is the objective to minimize.
    /// Returns Optimal, Unbounded, or Stalled when the iteration cap is hit
    /// (the caller restarts from a fresh basis under Bland's rule).
    fn run_phase(&mut self, cost: &[f64], max_iters: usize) -> PhaseOutcome {
        for _ in 0..max_iters {
            let y = self.duals(cost);
            // Pricing.
            let mut entering: Option<(usize, f64, f64)> = None; // (col, dj, dir)
            for j in 0..self.ncols {
                if matches!(self.state[j], VarState::Basic(_)) || self.lo[j] == self.hi[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y, cost);
                let dir = match self.state[j] {
                    VarState::AtLower if d < -self.opt_tol => 1.0,
                    VarState::AtUpper if d > self.opt_tol => -1.0,
                    _ => continue,
                };
                if self.bland {
                    entering = Some((j, d, dir));
                    break;
                }
                match entering {
                    Some((_, bd, _)) if d.abs() <= bd.abs() => {}
                    _ => entering = Some((j, d, dir)),
                }
            }
            let Some((j_in, _, dir)) = entering else {
                return PhaseOutcome::Optimal;
            };

            // Direction through the basis: w = B^-1 a_j.
            let m = self.m;
            let mut w = vec![0.0; m];
            for &(r, a) in &self.cols[j_in] {
                for i in 0..m {
                    w[i] += self.binv[i * m + r] * a;
                }
            }

            // Bounded ratio test; basic i moves by -dir * w_i per unit step.
            let t_limit = self.hi[j_in] - self.lo[j_in]; // bound-flip step
            let mut leaving: Option<(usize, f64)> = None; // (row, step)
            let mut leaving_to_lower = false;
            for i in 0..m {
                let delta = -dir * w[i];
                let bi = self.basis[i];
                let (t_i, to_lower) = if delta < -PIVOT_TOL {
                    if self.lo[bi] == -INF {
                        continue;
                    }
                    ((self.xval[bi] - self.lo[bi]) / -delta, true)
                } else if delta > PIVOT_TOL {
                    if self.hi[bi] == INF {
                        continue;
                    }
                    ((self.hi[bi] - self.xval[bi]) / delta, false)
                } else {
                    continue;
                };
                let t_i = t_i.max(0.0);
                // Strictly smaller steps win; on near ties prefer the larger
                // pivot magnitude for stability, or the smallest variable
                // index under Bland's rule.
                let better = match leaving {
                    None => true,
                    Some((cur_row, cur_t)) => {
                        if t_i < cur_t - 1e-9 {
                            true
                        } else if t_i <= cur_t + 1e-9 {
                            if self.bland {
                                self.basis[i] < self.basis[cur_row]
                            } else {
                                w[i].abs() > w[cur_row].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    let t_rec = leaving.map_or(t_i, |(_, t)| t.min(t_i));
                    leaving = Some((i, t_rec));
                    leaving_to_lower = to_lower;
                }
            }

            let step_is_flip = match leaving {
                None => {
                    if !t_limit.is_finite() {
                        return PhaseOutcome::Unbounded; // unbounded ray
                    }
                    true
                }
                Some((_, t_leave)) => t_limit.is_finite() && t_limit <= t_leave + 1e-12,
            };

            if step_is_flip {
                let t = t_limit;
                for i in 0..m {
                    let delta = -dir * w[i];
                    self.xval[self.basis[i]] += delta * t;
                }
                self.xval[j_in] = if dir > 0.0 { self.hi[j_in] } else { self.lo[j_in] };
                self.state[j_in] = if dir > 0.0 { VarState::AtUpper } else { VarState::AtLower };
                self.after_step(t);
                continue;
            }

            let (r_out, t) = leaving.unwrap();
            let j_out = self.basis[r_out];
            for i in 0..m {
                let delta = -dir * w[i];
                self.xval[self.basis[i]] += delta * t;
            }
            self.xval[j_in] = self.xval[j_in] + dir * t;
            self.xval[j_out] = if leaving_to_lower { self.lo[j_out] } else { self.hi[j_out] };
            self.state[j_out] = if leaving_to_lower { VarState::AtLower } else { VarState::AtUpper };
            self.state[j_in] = VarState::Basic(r_out);
            self.basis[r_out] = j_in;

            // Product-form update of B^-1.
            let piv = w[r_out];
            for c in 0..m {
                self.binv[r_out * m + c] /= piv;
            }
            for i in 0..m {
                if i != r_out && w[i] != 0.0 {
                    let f = w[i];
                    for c in 0..m {
                        self.binv[i * m + c] -= f * self.binv[r_out * m + c];
                    }
                }
            }
            self.pivots_since_refactor += 1;
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            self.after_step(t);
        }
        PhaseOutcome::Stalled
    }

    fn after_step(&mut self, t: f64) {
        if t <= 1e-10 {
            self.degen_streak += 1;
            if self.degen_streak >= DEGEN_STREAK_LIMIT {
                self.bland = true;
            }
        } else {
            self.degen_streak = 0;
            self.bland = self.force_bland;
        }
    }

    fn phase1_cost(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.ncols];
        for &a in &self.artificials {
            c[a] = 1.0;
        }
        c
    }

    fn infeasibility(&self) -> f64 {
        self.artificials.iter().map(|&a| self.xval[a].max(0.0)).sum()
    }
}

pub fn solve_lp(inst: &LpInstance, feas_tol: f64, opt_tol: f64) -> Result<LpSolution> {
    inst.validate()?;
    // A rare near-singular basis can leave the first pass uncertifiable;
    // retrying from a fresh slack basis under Bland's rule takes a different
    // pivot trajectory and recovers in practice.
    for attempt in 0..3 {
        match solve_lp_attempt(inst, feas_tol, opt_tol, attempt > 0) {
            Ok(Some(sol)) => return Ok(sol),
            Ok(None) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Solver("failed to certify optimal basis".into()))
}

/// One full solve; Ok(None) means the final basis failed certification and
/// the caller should retry.
fn solve_lp_attempt(
    inst: &LpInstance,
    feas_tol: f64,
    opt_tol: f64,
    force_bland: bool,
) -> Result<Option<LpSolution>> {
    let mut s = Simplex::build(inst);
    s.feas_tol = feas_tol;
    s.opt_tol = opt_tol;
    s.force_bland = force_bland;
    s.bland = force_bland;
    s.init_basis();
    let max_iters = 50 * (s.m + s.ncols) + 200;

    // Phase 1: drive artificials to zero.
    if !s.artificials.is_empty() {
        let c1 = s.phase1_cost();
        match s.run_phase(&c1, max_iters) {
            PhaseOutcome::Optimal => {}
            // Phase 1 is bounded below, so a ray means numeric trouble.
            PhaseOutcome::Unbounded | PhaseOutcome::Stalled => return Ok(None),
        }
        s.refactor();
        if s.infeasibility() > feas_tol * (1.0 + s.m as f64) {
            let infeasible_rows = s
                .artificials
                .iter()
                .filter(|&&a| s.xval[a] > feas_tol)
                .map(|&a| s.cols[a][0].0)
                .collect();
            if s.singular {
                return Ok(None); // can't trust an infeasibility claim here
            }
            return Ok(Some(LpSolution {
                status: LpStatus::Infeasible,
                values: vec![0.0; inst.num_vars],
                objective_value: f64::INFINITY,
                duals: vec![0.0; s.m],
                infeasible_rows,
            }));
        }
        // Pin artificials at zero for phase 2.
        for &a in &s.artificials.clone() {
            s.lo[a] = 0.0;
            s.hi[a] = 0.0;
            if !matches!(s.state[a], VarState::Basic(_)) {
                s.xval[a] = 0.0;
                s.state[a] = VarState::AtLower;
            }
        }
    }

    // Phase 2 with the real objective, plus a couple of verification passes.
    let mut cost = vec![0.0; s.ncols];
    cost[..s.n_struct].copy_from_slice(&inst.objective);
    for round in 0..4 {
        match s.run_phase(&cost, max_iters) {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Stalled => return Ok(None),
            PhaseOutcome::Unbounded => {
                if s.singular {
                    return Ok(None);
                }
                return Ok(Some(LpSolution {
                    status: LpStatus::Unbounded,
                    values: vec![0.0; inst.num_vars],
                    objective_value: f64::NEG_INFINITY,
                    duals: vec![0.0; s.m],
                    infeasible_rows: Vec::new(),
                }));
            }
        }
        s.refactor();
        // Independent feasibility check on the refactored point.
        let vals: Vec<f64> = s.xval[..s.n_struct].to_vec();
        let mut ok = true;
        for (r, row) in inst.rows.iter().enumerate() {
            let mut act: f64 = row.coeffs.iter().map(|&(j, a)| a * vals[j]).sum();
            act += s.xval[s.n_struct + r]; // slack
            for &a in &s.artificials {
                if s.cols[a][0].0 == r {
                    act += s.cols[a][0].1 * s.xval[a];
                }
            }
            if (act - row.rhs).abs() > feas_tol * (1.0 + row.rhs.abs()) {
                ok = false;
                break;
            }
        }
        for j in 0..s.n_struct {
            if vals[j] < s.lo[j] - feas_tol || vals[j] > s.hi[j] + feas_tol {
                ok = false;
                break;
            }
        }
        // Reduced-cost optimality check on the refactored basis.
        let y = s.duals(&cost);
        let mut opt_ok = true;
        for j in 0..s.ncols {
            if matches!(s.state[j], VarState::Basic(_)) || s.lo[j] == s.hi[j] {
                continue;
            }
            let d = s.reduced_cost(j, &y, &cost);
            match s.state[j] {
                VarState::AtLower if d < -10.0 * opt_tol => opt_ok = false,
                VarState::AtUpper if d > 10.0 * opt_tol => opt_ok = false,
                _ => {}
            }
            if !opt_ok {
                break;
            }
        }
        if ok && opt_ok {
            let objective_value: f64 =
                inst.objective.iter().zip(&vals).map(|(c, x)| c * x).sum();
            return Ok(Some(LpSolution {
                status: LpStatus::Optimal,
                values: vals,
                objective_value,
                duals: y,
                infeasible_rows: Vec::new(),
            }));
        }
        if s.singular || round == 3 {
            return Ok(None);
        }
    }
    unreachable!()
}

pub fn solve_lp_default(inst: &LpInstance) -> Result<LpSolution> {
    solve_lp(inst, DEFAULT_FEAS_TOL, DEFAULT_OPT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_constraint() {
        let mut lp = LpInstance::new(1);
        lp.objective = vec![1.0];
        lp.bounds = vec![(0.0, 10.0)];
        lp.add_row_dense(&[1.0], Relation::Ge, 3.0);
        let sol = solve_lp_default(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 3.0).abs() < 1e-7);
        assert!((sol.objective_value - 3.0).abs() < 1e-7);
    }

    #[test]
    fn triangle() {
        let mut lp = LpInstance::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add_row_dense(&[1.0, 1.0], Relation::Le, 1.0);
        let sol = solve_lp_default(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value + 1.0).abs() < 1e-7);
    }

    #[test]
    fn transportation_2x2() {
        // Costs [[1,2],[3,1]], supplies [1,1], demands [1,1]; optimum takes
        // the diagonal for value 2.
        let mut lp = LpInstance::new(4); // x00 x01 x10 x11
        lp.objective = vec![1.0, 2.0, 3.0, 1.0];
        lp.add_row_dense(&[1.0, 1.0, 0.0, 0.0], Relation::Eq, 1.0);
        lp.add_row_dense(&[0.0, 0.0, 1.0, 1.0], Relation::Eq, 1.0);
        lp.add_row_dense(&[1.0, 0.0, 1.0, 0.0], Relation::Eq, 1.0);
        lp.add_row_dense(&[0.0, 1.0, 0.0, 1.0], Relation::Eq, 1.0);
        let sol = solve_lp_default(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-7);
        assert!((sol.values[0] - 1.0).abs() < 1e-7);
        assert!((sol.values[3] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LpInstance::new(1);
        lp.bounds = vec![(0.0, 1.0)];
        lp.add_row_dense(&[1.0], Relation::Ge, 2.0);
        let sol = solve_lp_default(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(!sol.infeasible_rows.is_empty());
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LpInstance::new(1);
        lp.objective = vec![-1.0];
        lp.bounds = vec![(0.0, INF)];
        let sol = solve_lp_default(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_with_upper_bounds() {
        // min -x - 2y st x + y = 1.5, x,y in [0,1] -> y=1, x=0.5, obj -2.5
        let mut lp = LpInstance::new(2);
        lp.objective = vec![-1.0, -2.0];
        lp.add_row_dense(&[1.0, 1.0], Relation::Eq, 1.5);
        let sol = solve_lp_default(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value + 2.5).abs() < 1e-7);
        assert!((sol.values[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn objective_scaling_invariance() {
        let mut lp = LpInstance::new(3);
        lp.objective = vec![2.0, 1.0, 3.0];
        lp.add_row_dense(&[1.0, 1.0, 1.0], Relation::Eq, 1.0);
        let a = solve_lp_default(&lp).unwrap();
        lp.objective = vec![20.0, 10.0, 30.0];
        let b = solve_lp_default(&lp).unwrap();
        assert!((b.objective_value - 10.0 * a.objective_value).abs() < 1e-6);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-7);
        }
    }
}
