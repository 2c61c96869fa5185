//! Self-contained linear-programming solver.
//!
//! Two-phase primal simplex on a dense tableau. Variable boxes are
//! compiled into the standard form (lower bounds by shifting, finite upper
//! bounds as explicit rows), fixed variables are substituted out. Dantzig
//! pricing by default, Bland's rule after a degeneracy streak for
//! anti-cycling. The models solved here carry small integral data, so plain
//! `f64` arithmetic with a 1e-7 tolerance is sufficient; correctness and
//! determinism are preferred over speed throughout.

use crate::error::{Error, Result};

/// Feasibility and objective tolerance for LP outcomes.
pub const FEAS_EPS: f64 = 1e-7;
/// Pricing / pivot tolerance inside the simplex.
const PIVOT_EPS: f64 = 1e-9;
/// Consecutive non-improving pivots before Bland's rule engages.
const DEGENERACY_STREAK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// One linear constraint with sparse coefficients.
#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization model: objective coefficients, constraint rows and
/// per-variable bounds (default `[0, +inf)`).
#[derive(Debug, Clone)]
pub struct LpModel {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<LpRow>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpModel {
    pub fn new(num_vars: usize) -> Self {
        LpModel {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn objective_coeffs(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    /// Appends a constraint and returns its row index.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        debug_assert!(coeffs
            .iter()
            .all(|&(v, c)| v < self.num_vars && c.is_finite()));
        debug_assert!(rhs.is_finite());
        self.rows.push(LpRow {
            coeffs,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Objective value of an arbitrary point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest relation violation of `x` over all rows and bounds.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            let gap = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of an LP solve. `solution` and `duals` are meaningful on
/// `Optimal` only; `duals` has one entry per model row.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    pub solution: Vec<f64>,
    pub duals: Vec<f64>,
}

impl LpOutcome {
    fn infeasible(n: usize, rows: usize) -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            solution: vec![0.0; n],
            duals: vec![0.0; rows],
        }
    }

    fn unbounded(n: usize, rows: usize) -> Self {
        LpOutcome {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            solution: vec![0.0; n],
            duals: vec![0.0; rows],
        }
    }
}

/// Solves the model with its stored bounds.
pub fn solve_lp(model: &LpModel) -> Result<LpOutcome> {
    solve_lp_with_bounds(model, &model.lower, &model.upper)
}

/// Solves the model with the stored bounds replaced by `lower` / `upper`
/// (used by branch-and-bound nodes; the row structure is shared).
pub fn solve_lp_with_bounds(model: &LpModel, lower: &[f64], upper: &[f64]) -> Result<LpOutcome> {
    Simplex::assemble(model, lower, upper)?.solve()
}

/// Column classification of the standard-form tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Simplex<'a> {
    model: &'a LpModel,
    lower: &'a [f64],
    upper: &'a [f64],
    /// free (non-fixed) original variables, in index order
    free_vars: Vec<usize>,
    /// value of every original variable when fixed, else its lower bound
    base_value: Vec<f64>,
    /// dense tableau rows, each of length `cols + 1` (rhs last)
    tableau: Vec<Vec<f64>>,
    /// per internal row: sign flip and originating model row (None = bound row)
    row_sign: Vec<f64>,
    row_origin: Vec<Option<usize>>,
    /// identity column of each internal row in the initial basis
    id_col: Vec<usize>,
    basis: Vec<usize>,
    kind: Vec<ColKind>,
    /// phase-2 cost of every column
    cost: Vec<f64>,
    cols: usize,
}

impl<'a> Simplex<'a> {
    fn assemble(model: &'a LpModel, lower: &'a [f64], upper: &'a [f64]) -> Result<Self> {
        let n = model.num_vars;
        assert_eq!(lower.len(), n);
        assert_eq!(upper.len(), n);
        for j in 0..n {
            if !lower[j].is_finite() {
                return Err(Error::BadParams(format!(
                    "variable {j} lacks a finite lower bound"
                )));
            }
        }

        let mut free_vars = Vec::new();
        let mut base_value = vec![0.0; n];
        for j in 0..n {
            base_value[j] = lower[j];
            if upper[j] - lower[j] > 0.0 {
                free_vars.push(j);
            }
        }
        let empty_box = (0..n).any(|j| lower[j] > upper[j]);

        let mut sx = Simplex {
            model,
            lower,
            upper,
            free_vars,
            base_value,
            tableau: Vec::new(),
            row_sign: Vec::new(),
            row_origin: Vec::new(),
            id_col: Vec::new(),
            basis: Vec::new(),
            kind: Vec::new(),
            cost: Vec::new(),
            cols: 0,
        };
        if empty_box {
            // leave the tableau empty; solve() reports infeasibility
            return Ok(sx);
        }
        sx.build_rows();
        Ok(sx)
    }

    fn build_rows(&mut self) {
        let model = self.model;
        let nf = self.free_vars.len();
        let mut col_of = vec![usize::MAX; model.num_vars];
        for (k, &j) in self.free_vars.iter().enumerate() {
            col_of[j] = k;
        }

        // raw rows: structural constraints shifted by the lower bounds,
        // then one row per finite upper bound
        let mut raw: Vec<(Vec<f64>, Relation, f64, Option<usize>)> = Vec::new();
        for (r, row) in model.rows.iter().enumerate() {
            let mut dense = vec![0.0; nf];
            let mut rhs = row.rhs;
            for &(j, c) in &row.coeffs {
                rhs -= c * self.base_value[j];
                if col_of[j] != usize::MAX {
                    dense[col_of[j]] += c;
                }
            }
            raw.push((dense, row.relation, rhs, Some(r)));
        }
        for (k, &j) in self.free_vars.iter().enumerate() {
            let width = self.upper[j] - self.lower[j];
            if width.is_finite() {
                let mut dense = vec![0.0; nf];
                dense[k] = 1.0;
                raw.push((dense, Relation::Le, width, None));
            }
        }

        // flip rows so the rhs is non-negative; >= rows with rhs 0 flip
        // too, turning into <= rows whose slack can start in the basis
        let flip =
            |rel: Relation, rhs: f64| -> bool { rhs < 0.0 || (rhs == 0.0 && rel == Relation::Ge) };
        let flipped_relation = |rel: Relation| match rel {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        };

        let m = raw.len();
        let mut num_slack = 0;
        let mut num_artificial = 0;
        for (_, rel, rhs, _) in raw.iter() {
            let rel_eff = if flip(*rel, *rhs) {
                flipped_relation(*rel)
            } else {
                *rel
            };
            match rel_eff {
                Relation::Le => num_slack += 1,
                Relation::Ge => {
                    num_slack += 1;
                    num_artificial += 1;
                }
                Relation::Eq => num_artificial += 1,
            }
        }

        self.cols = nf + num_slack + num_artificial;
        self.cost = vec![0.0; self.cols];
        for (k, &j) in self.free_vars.iter().enumerate() {
            self.cost[k] = model.objective[j];
        }
        self.kind = vec![ColKind::Structural; nf];
        self.kind
            .extend(std::iter::repeat_n(ColKind::Slack, num_slack));
        self.kind
            .extend(std::iter::repeat_n(ColKind::Artificial, num_artificial));

        let mut slack_cursor = nf;
        let mut art_cursor = nf + num_slack;
        self.tableau = Vec::with_capacity(m);
        for (dense, rel, rhs, origin) in raw {
            let sign = if flip(rel, rhs) { -1.0 } else { 1.0 };
            let rel_eff = if sign < 0.0 {
                flipped_relation(rel)
            } else {
                rel
            };
            let mut trow = vec![0.0; self.cols + 1];
            for (k, c) in dense.into_iter().enumerate() {
                trow[k] = sign * c;
            }
            trow[self.cols] = sign * rhs;
            let (basic, ident) = match rel_eff {
                Relation::Le => {
                    trow[slack_cursor] = 1.0;
                    let c = slack_cursor;
                    slack_cursor += 1;
                    (c, c)
                }
                Relation::Ge => {
                    trow[slack_cursor] = -1.0;
                    trow[art_cursor] = 1.0;
                    slack_cursor += 1;
                    let c = art_cursor;
                    art_cursor += 1;
                    (c, c)
                }
                Relation::Eq => {
                    trow[art_cursor] = 1.0;
                    let c = art_cursor;
                    art_cursor += 1;
                    (c, c)
                }
            };
            self.tableau.push(trow);
            self.row_sign.push(sign);
            self.row_origin.push(origin);
            self.basis.push(basic);
            self.id_col.push(ident);
        }
    }

    /// Reduced-cost row plus current objective for the given column costs.
    fn price(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut reduced = cost.to_vec();
        let mut value = 0.0;
        for (r, row) in self.tableau.iter().enumerate() {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                value += cb * row[self.cols];
                for (j, red) in reduced.iter_mut().enumerate() {
                    *red -= cb * row[j];
                }
            }
        }
        (reduced, value)
    }

    fn pivot(&mut self, prow: usize, pcol: usize, reduced: &mut [f64], value: &mut f64) {
        let rhs = self.cols;
        let pval = self.tableau[prow][pcol];
        let inv = 1.0 / pval;
        for entry in self.tableau[prow].iter_mut() {
            *entry *= inv;
        }
        let pivot_row = std::mem::take(&mut self.tableau[prow]);
        for (r, row) in self.tableau.iter_mut().enumerate() {
            if r == prow {
                continue;
            }
            let factor = row[pcol];
            if factor != 0.0 {
                for (entry, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *entry -= factor * p;
                }
                row[pcol] = 0.0;
            }
        }
        let rfactor = reduced[pcol];
        if rfactor != 0.0 {
            for (entry, &p) in reduced.iter_mut().zip(pivot_row.iter()) {
                *entry -= rfactor * p;
            }
            *value += rfactor * pivot_row[rhs];
            reduced[pcol] = 0.0;
        }
        self.tableau[prow] = pivot_row;
        self.basis[prow] = pcol;
    }

    /// Runs simplex iterations for the given costs until optimal.
    /// `allow_artificial` permits artificial columns to enter (phase 1).
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool) -> Result<(Vec<f64>, f64, bool)> {
        let (mut reduced, mut value) = self.price(cost);
        let cap = 2000 + 200 * (self.tableau.len() + self.cols);
        let mut bland = false;
        let mut streak = 0usize;
        for _ in 0..cap {
            let entering = self.pick_entering(&reduced, allow_artificial, bland);
            let Some(pcol) = entering else {
                return Ok((reduced, value, true));
            };
            let Some(prow) = self.pick_leaving(pcol, bland) else {
                // no limiting row: the column ray is unbounded
                return Ok((reduced, value, false));
            };
            let before = value;
            self.pivot(prow, pcol, &mut reduced, &mut value);
            if before - value > 1e-12 {
                streak = 0;
                bland = false;
            } else {
                streak += 1;
                if streak >= DEGENERACY_STREAK {
                    bland = true;
                }
            }
        }
        Err(Error::NumericalFailure("simplex iteration cap exceeded"))
    }

    fn pick_entering(&self, reduced: &[f64], allow_artificial: bool, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            if !allow_artificial && self.kind[j] == ColKind::Artificial {
                continue;
            }
            let r = reduced[j];
            if r < -PIVOT_EPS {
                if bland {
                    return Some(j);
                }
                if best.map_or(true, |(_, b)| r < b) {
                    best = Some((j, r));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn pick_leaving(&self, pcol: usize, bland: bool) -> Option<usize> {
        let rhs = self.cols;
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in self.tableau.iter().enumerate() {
            let a = row[pcol];
            if a > PIVOT_EPS {
                let ratio = row[rhs] / a;
                let better = match best {
                    None => true,
                    Some((br, bratio)) => {
                        if (ratio - bratio).abs() <= 1e-12 {
                            if bland {
                                self.basis[r] < self.basis[br]
                            } else {
                                r < br
                            }
                        } else {
                            ratio < bratio
                        }
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Pivots zero-level artificials out of the basis; removes rows that
    /// turn out redundant.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.tableau.len() {
            if self.kind[self.basis[r]] != ColKind::Artificial {
                r += 1;
                continue;
            }
            let pivot_col = (0..self.cols)
                .find(|&j| self.kind[j] != ColKind::Artificial && self.tableau[r][j].abs() > 1e-8);
            match pivot_col {
                Some(pcol) => {
                    let mut dummy = vec![0.0; self.cols];
                    let mut dval = 0.0;
                    self.pivot(r, pcol, &mut dummy, &mut dval);
                    r += 1;
                }
                None => {
                    // 0 = 0 row
                    self.tableau.remove(r);
                    self.basis.remove(r);
                    self.row_sign.remove(r);
                    self.row_origin.remove(r);
                    self.id_col.remove(r);
                }
            }
        }
    }

    fn solve(mut self) -> Result<LpOutcome> {
        let n = self.model.num_vars;
        let nrows = self.model.rows.len();
        if self.cols == 0 && self.tableau.is_empty() {
            // every variable fixed (or an empty box was detected)
            let x = self.base_value.clone();
            if (0..n).any(|j| self.lower[j] > self.upper[j])
                || self.model.max_violation(&x) > FEAS_EPS
            {
                return Ok(LpOutcome::infeasible(n, nrows));
            }
            return Ok(LpOutcome {
                status: LpStatus::Optimal,
                objective: self.model.objective_value(&x),
                solution: x,
                duals: vec![0.0; nrows],
            });
        }

        // phase 1: drive the artificials to zero
        let has_artificial = self.kind.iter().any(|&k| k == ColKind::Artificial);
        if has_artificial {
            let phase1: Vec<f64> = self
                .kind
                .iter()
                .map(|&k| if k == ColKind::Artificial { 1.0 } else { 0.0 })
                .collect();
            let (_, infeasibility, finished) = self.optimize(&phase1, true)?;
            debug_assert!(finished, "phase 1 cannot be unbounded");
            if infeasibility > FEAS_EPS {
                return Ok(LpOutcome::infeasible(n, nrows));
            }
            self.evict_artificials();
        }

        // phase 2: original objective, artificials banned
        let cost = self.cost.clone();
        let (_, _, finished) = self.optimize(&cost, false)?;
        if !finished {
            return Ok(LpOutcome::unbounded(n, nrows));
        }

        let mut x = self.base_value.clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.free_vars.len() {
                x[self.free_vars[b]] += self.tableau[r][self.cols];
            }
        }
        for j in 0..n {
            x[j] = x[j].clamp(self.lower[j], self.upper[j]);
        }
        if self.model.max_violation(&x) > 1e-5 {
            return Err(Error::NumericalFailure("solution failed feasibility check"));
        }

        // duals from the initial identity columns: y = c_B * B^{-1}
        let mut duals = vec![0.0; nrows];
        for (r, origin) in self.row_origin.iter().enumerate() {
            let Some(orig) = *origin else { continue };
            let col = self.id_col[r];
            let mut y = 0.0;
            for (rr, row) in self.tableau.iter().enumerate() {
                let cb = self.cost[self.basis[rr]];
                if cb != 0.0 {
                    y += cb * row[col];
                }
            }
            duals[orig] = self.row_sign[r] * y;
        }

        Ok(LpOutcome {
            status: LpStatus::Optimal,
            objective: self.model.objective_value(&x),
            solution: x,
            duals,
        })
    }
}
