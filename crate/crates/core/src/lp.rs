//! A bounded-variable revised simplex method.
//!
//! Problems are `min c x` subject to sparse rows `a x {=,<=,>=} b` and bounds
//! `lo <= x <= hi` (either side may be infinite). Every row gets a logical
//! variable `s` with `a x + s = b`; its bounds encode the relation. The basis
//! inverse is kept dense and updated by elementary row operations, with a
//! periodic refactorization that only inverts the structural block.
//!
//! Pricing is Dantzig's largest reduced cost. After a run of degenerate
//! pivots the solver switches to Bland's rule until the objective moves
//! again, which rules out cycling. Rows can be appended to a solved problem;
//! the next solve continues from the old basis with the dual simplex.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Primal feasibility tolerance on rows and bounds.
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
pub const OPT_TOL: f64 = 1e-9;
/// Pivot elements below this magnitude are treated as zero.
pub const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("basis matrix became singular")]
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }
}

/// `min objective . x` over rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub rows: Vec<Row>,
}

impl LpProblem {
    /// `n` variables with zero cost and bounds `[0, inf)`.
    pub fn new(n: usize) -> Self {
        Self {
            objective: alloc::vec![0.0; n],
            bounds: alloc::vec![(0.0, f64::INFINITY); n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(LpError::Malformed(format!("cost of x{j} is not finite")));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == -f64::INFINITY
            {
                return Err(LpError::Malformed(format!(
                    "bounds of x{j} are [{lo}, {hi}]"
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            check_row(row, n).map_err(|e| match e {
                LpError::Malformed(m) => LpError::Malformed(format!("row {i}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }
}

fn check_row(row: &Row, n: usize) -> Result<(), LpError> {
    if !row.rhs.is_finite() {
        return Err(LpError::Malformed(String::from(
            "right-hand side is not finite",
        )));
    }
    for &(j, v) in &row.coeffs {
        if j >= n {
            return Err(LpError::Malformed(format!(
                "variable index {j} out of range"
            )));
        }
        if !v.is_finite() {
            return Err(LpError::Malformed(format!(
                "coefficient of x{j} is not finite"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values (the last iterate unless optimal).
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Row duals `y` with `c - y A` the reduced costs. Meaningful when optimal.
    pub duals: Vec<f64>,
    /// Simplex pivots and bound flips performed so far by this solver.
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivots between refactorizations of the basis inverse.
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1_000_000,
            bland_after: 50,
            refactor_every: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
    /// Nonbasic free variable held at zero.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Logical,
    Artificial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

/// Solver state: problem data in column form plus the current basis.
#[derive(Debug, Clone)]
pub struct Simplex {
    n_struct: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    kind: Vec<Kind>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    rhs: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    /// Basis inverse, column `r` (constraint row) stored contiguously:
    /// `inv[r * m + pos]`.
    inv: Vec<f64>,
    has_basis: bool,
    start_upper: Vec<usize>,
    opts: SimplexOptions,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
}

fn merged(coeffs: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut c = coeffs.to_vec();
    c.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(c.len());
    for (j, v) in c {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|&(_, v)| v != 0.0);
    out
}

fn logical_bounds(rel: Relation) -> (f64, f64) {
    match rel {
        Relation::Le => (0.0, f64::INFINITY),
        Relation::Ge => (f64::NEG_INFINITY, 0.0),
        Relation::Eq => (0.0, 0.0),
    }
}

impl Simplex {
    pub fn new(p: &LpProblem) -> Result<Self, LpError> {
        Self::with_options(p, SimplexOptions::default())
    }

    pub fn with_options(p: &LpProblem, opts: SimplexOptions) -> Result<Self, LpError> {
        p.validate()?;
        let n = p.num_vars();
        let mut s = Self {
            n_struct: n,
            m: 0,
            cols: alloc::vec![Vec::new(); n],
            kind: alloc::vec![Kind::Structural; n],
            cost: p.objective.clone(),
            lo: p.bounds.iter().map(|b| b.0).collect(),
            hi: p.bounds.iter().map(|b| b.1).collect(),
            rhs: Vec::new(),
            x: alloc::vec![0.0; n],
            state: alloc::vec![VarState::Lower; n],
            head: Vec::new(),
            inv: Vec::new(),
            has_basis: false,
            start_upper: Vec::new(),
            opts,
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
        };
        for row in &p.rows {
            s.push_row_data(row);
        }
        Ok(s)
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Crash hint for the first solve: these variables start nonbasic at their
    /// (finite) upper bound instead of the lower one.
    pub fn start_at_upper(&mut self, vars: &[usize]) {
        self.start_upper = vars.to_vec();
    }

    fn push_row_data(&mut self, row: &Row) -> usize {
        let r = self.m;
        for (j, v) in merged(&row.coeffs) {
            self.cols[j].push((r, v));
        }
        let (lo, hi) = logical_bounds(row.relation);
        let var = self.cols.len();
        self.cols.push(alloc::vec![(r, 1.0)]);
        self.kind.push(Kind::Logical);
        self.cost.push(0.0);
        self.lo.push(lo);
        self.hi.push(hi);
        self.x.push(0.0);
        self.state.push(VarState::Lower);
        self.rhs.push(row.rhs);
        self.m += 1;
        var
    }

    /// Appends a row. A solved basis is kept: the row's logical becomes basic.
    pub fn add_row(&mut self, row: &Row) -> Result<(), LpError> {
        check_row(row, self.n_struct)?;
        let old_m = self.m;
        let var = self.push_row_data(row);
        if !self.has_basis {
            return Ok(());
        }
        // Bordered inverse: [[B, 0], [a_B, 1]]^-1 = [[B^-1, 0], [-a_B B^-1, 1]].
        let m = self.m;
        let mut inv = alloc::vec![0.0; m * m];
        let row_coef: Vec<(usize, f64)> = merged(&row.coeffs);
        let mut a_b = alloc::vec![0.0; old_m];
        for &(j, v) in &row_coef {
            if let VarState::Basic(pos) = self.state[j] {
                a_b[pos] += v;
            }
        }
        for r in 0..old_m {
            let src = &self.inv[r * old_m..(r + 1) * old_m];
            inv[r * m..r * m + old_m].copy_from_slice(src);
            let dot: f64 = src.iter().zip(&a_b).map(|(b, a)| a * b).sum();
            inv[r * m + old_m] = -dot;
        }
        inv[old_m * m + old_m] = 1.0;
        self.inv = inv;
        self.head.push(var);
        self.state[var] = VarState::Basic(old_m);
        let ax: f64 = row_coef.iter().map(|&(j, v)| v * self.x[j]).sum();
        self.x[var] = row.rhs - ax;
        Ok(())
    }

    /// [`add_row`](Self::add_row) followed by [`solve`](Self::solve).
    pub fn add_row_and_resolve(&mut self, row: &Row) -> Result<LpSolution, LpError> {
        self.add_row(row)?;
        self.solve()
    }

    fn value_at_rest(&self, j: usize) -> (VarState, f64) {
        let (lo, hi) = (self.lo[j], self.hi[j]);
        let prefer_upper = self.start_upper.binary_search(&j).is_ok();
        if prefer_upper && hi.is_finite() {
            (VarState::Upper, hi)
        } else if lo.is_finite() {
            (VarState::Lower, lo)
        } else if hi.is_finite() {
            (VarState::Upper, hi)
        } else {
            (VarState::Zero, 0.0)
        }
    }

    /// Slack basis, with an artificial variable for every row the slack
    /// cannot satisfy.
    fn cold_start(&mut self) -> bool {
        // drop artificials from earlier attempts
        if self.kind.contains(&Kind::Artificial) {
            let keep: Vec<bool> = self.kind.iter().map(|&k| k != Kind::Artificial).collect();
            let mut it = keep.iter();
            self.cols.retain(|_| *it.next().unwrap());
            for v in [&mut self.cost, &mut self.lo, &mut self.hi, &mut self.x] {
                let mut it = keep.iter();
                v.retain(|_| *it.next().unwrap());
            }
            let mut it = keep.iter();
            self.state.retain(|_| *it.next().unwrap());
            self.kind.retain(|&k| k != Kind::Artificial);
        }

        let mut upper: Vec<usize> = core::mem::take(&mut self.start_upper);
        upper.sort_unstable();
        self.start_upper = upper;
        let mut activity = alloc::vec![0.0; self.m];
        for j in 0..self.n_struct {
            let (st, v) = self.value_at_rest(j);
            self.state[j] = st;
            self.x[j] = v;
            if v != 0.0 {
                for &(r, a) in &self.cols[j] {
                    activity[r] += a * v;
                }
            }
        }
        let m = self.m;
        self.head = alloc::vec![0; m];
        self.inv = alloc::vec![0.0; m * m];
        let mut need_phase1 = false;
        let logical0 = self.n_struct;
        // logicals are interleaved with structurals only through add_row, so
        // find each row's logical by scanning kinds
        let mut logical_of_row = alloc::vec![usize::MAX; m];
        for (var, k) in self.kind.iter().enumerate().skip(logical0) {
            if *k == Kind::Logical {
                logical_of_row[self.cols[var][0].0] = var;
            }
        }
        for r in 0..m {
            let s = logical_of_row[r];
            let want = self.rhs[r] - activity[r];
            if want >= self.lo[s] - FEAS_TOL && want <= self.hi[s] + FEAS_TOL {
                self.state[s] = VarState::Basic(r);
                self.x[s] = want;
                self.head[r] = s;
                self.inv[r * m + r] = 1.0;
            } else {
                let (st, bound) = if want < self.lo[s] {
                    (VarState::Lower, self.lo[s])
                } else {
                    (VarState::Upper, self.hi[s])
                };
                self.state[s] = st;
                self.x[s] = bound;
                let resid = want - bound;
                let sign = if resid > 0.0 { 1.0 } else { -1.0 };
                let a = self.cols.len();
                self.cols.push(alloc::vec![(r, sign)]);
                self.kind.push(Kind::Artificial);
                self.cost.push(0.0);
                self.lo.push(0.0);
                self.hi.push(f64::INFINITY);
                self.x.push(resid.abs());
                self.state.push(VarState::Basic(r));
                self.head[r] = a;
                self.inv[r * m + r] = sign;
                need_phase1 = true;
            }
        }
        self.has_basis = true;
        self.since_refactor = 0;
        self.degenerate_run = 0;
        need_phase1
    }

    fn phase_cost(&self, j: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.kind[j] == Kind::Artificial {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => self.cost[j],
        }
    }

    fn duals(&self, phase: Phase) -> Vec<f64> {
        let m = self.m;
        let cb: Vec<f64> = self
            .head
            .iter()
            .map(|&j| self.phase_cost(j, phase))
            .collect();
        (0..m)
            .map(|r| {
                self.inv[r * m..(r + 1) * m]
                    .iter()
                    .zip(&cb)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase: Phase) -> f64 {
        let mut d = self.phase_cost(j, phase);
        for &(r, a) in &self.cols[j] {
            d -= y[r] * a;
        }
        d
    }

    /// `B^-1 a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = alloc::vec![0.0; m];
        for &(r, a) in &self.cols[j] {
            let col = &self.inv[r * m..(r + 1) * m];
            for (o, c) in out.iter_mut().zip(col) {
                *o += a * c;
            }
        }
        out
    }

    fn pivot(&mut self, alpha: &[f64], p: usize, entering: usize) {
        let m = self.m;
        let ap = alpha[p];
        for r in 0..m {
            let col = &mut self.inv[r * m..(r + 1) * m];
            let t = col[p] / ap;
            if t != 0.0 {
                for (c, a) in col.iter_mut().zip(alpha) {
                    *c -= a * t;
                }
                col[p] = t;
            }
        }
        self.head[p] = entering;
        self.state[entering] = VarState::Basic(p);
        self.since_refactor += 1;
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lo[j] == self.hi[j]
    }

    /// Rebuilds the basis inverse from scratch and recomputes basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut unit_row = alloc::vec![usize::MAX; m]; // row -> basis position
        let mut struct_pos = Vec::new();
        for (pos, &j) in self.head.iter().enumerate() {
            if self.kind[j] == Kind::Structural {
                struct_pos.push(pos);
            } else {
                let r = self.cols[j][0].0;
                if unit_row[r] != usize::MAX {
                    return Err(LpError::Singular);
                }
                unit_row[r] = pos;
            }
        }
        let free_rows: Vec<usize> = (0..m).filter(|&r| unit_row[r] == usize::MAX).collect();
        let k = struct_pos.len();
        if free_rows.len() != k {
            return Err(LpError::Singular);
        }
        let mut row_slot = alloc::vec![usize::MAX; m];
        for (a, &r) in free_rows.iter().enumerate() {
            row_slot[r] = a;
        }
        // S: structural columns restricted to the rows no unit column covers
        let mut s = alloc::vec![0.0; k * k];
        for (b, &pos) in struct_pos.iter().enumerate() {
            for &(r, v) in &self.cols[self.head[pos]] {
                if row_slot[r] != usize::MAX {
                    s[row_slot[r] * k + b] = v;
                }
            }
        }
        let s_inv = invert(&mut s, k).ok_or(LpError::Singular)?;
        let mut inv = alloc::vec![0.0; m * m];
        // columns for rows covered by unit columns
        for r in 0..m {
            let pos = unit_row[r];
            if pos != usize::MAX {
                inv[r * m + pos] = self.cols[self.head[pos]][0].1;
            }
        }
        // columns for the remaining rows
        for (a, &r) in free_rows.iter().enumerate() {
            let col = &mut inv[r * m..(r + 1) * m];
            for (b, &pos) in struct_pos.iter().enumerate() {
                col[pos] = s_inv[b * k + a];
            }
            for (b, &pos) in struct_pos.iter().enumerate() {
                let xs = s_inv[b * k + a];
                if xs == 0.0 {
                    continue;
                }
                for &(t, v) in &self.cols[self.head[pos]] {
                    let u = unit_row[t];
                    if u != usize::MAX {
                        let sign = self.cols[self.head[u]][0].1;
                        col[u] -= sign * v * xs;
                    }
                }
            }
        }
        self.inv = inv;
        self.since_refactor = 0;
        self.recompute_basics();
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut r = self.rhs.clone();
        for j in 0..self.cols.len() {
            if !matches!(self.state[j], VarState::Basic(_)) && self.x[j] != 0.0 {
                for &(row, a) in &self.cols[j] {
                    r[row] -= a * self.x[j];
                }
            }
        }
        let mut xb = alloc::vec![0.0; m];
        for (row, &rv) in r.iter().enumerate() {
            if rv != 0.0 {
                let col = &self.inv[row * m..(row + 1) * m];
                for (o, c) in xb.iter_mut().zip(col) {
                    *o += rv * c;
                }
            }
        }
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = xb[pos];
        }
    }

    fn bound_violation(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] {
            self.lo[j] - v
        } else if v > self.hi[j] {
            v - self.hi[j]
        } else {
            0.0
        }
    }

    fn primal_infeasible(&self) -> bool {
        self.head
            .iter()
            .any(|&j| self.bound_violation(j) > FEAS_TOL)
    }

    fn dual_feasible(&self) -> bool {
        let y = self.duals(Phase::Two);
        (0..self.cols.len()).all(|j| {
            if self.is_fixed(j) {
                return true;
            }
            let d = self.reduced_cost(j, &y, Phase::Two);
            match self.state[j] {
                VarState::Basic(_) => true,
                VarState::Lower => d >= -OPT_TOL,
                VarState::Upper => d <= OPT_TOL,
                VarState::Zero => d.abs() <= OPT_TOL,
            }
        })
    }

    fn tick(&mut self) -> Result<(), LpError> {
        self.iterations += 1;
        if self.iterations > self.opts.max_iterations {
            return Err(LpError::IterationLimit(self.opts.max_iterations));
        }
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor()?;
        }
        Ok(())
    }

    /// Primal simplex from a primal feasible basis. Returns `false` if
    /// unbounded.
    fn primal(&mut self, phase: Phase) -> Result<bool, LpError> {
        loop {
            let y = self.duals(phase);
            let bland = self.degenerate_run >= self.opts.bland_after;
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.cols.len() {
                if self.is_fixed(j) {
                    continue;
                }
                let dir = match self.state[j] {
                    VarState::Basic(_) => continue,
                    VarState::Lower | VarState::Zero | VarState::Upper => {
                        let d = self.reduced_cost(j, &y, phase);
                        match self.state[j] {
                            VarState::Lower if d < -OPT_TOL => d,
                            VarState::Upper if d > OPT_TOL => d,
                            VarState::Zero if d.abs() > OPT_TOL => d,
                            _ => continue,
                        }
                    }
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if dir.abs() > best {
                    best = dir.abs();
                    entering = Some((j, dir));
                }
            }
            let Some((q, d)) = entering else {
                // optimal for this phase; confirm on a fresh factorization
                if self.since_refactor > 0 {
                    self.refactor()?;
                    if !self.primal_infeasible() {
                        let y = self.duals(phase);
                        let again = (0..self.cols.len()).any(|j| {
                            !self.is_fixed(j)
                                && match self.state[j] {
                                    VarState::Basic(_) => false,
                                    VarState::Lower => self.reduced_cost(j, &y, phase) < -OPT_TOL,
                                    VarState::Upper => self.reduced_cost(j, &y, phase) > OPT_TOL,
                                    VarState::Zero => {
                                        self.reduced_cost(j, &y, phase).abs() > OPT_TOL
                                    }
                                }
                        });
                        if again {
                            continue;
                        }
                    } else if phase == Phase::Two {
                        // drift after refactoring: repair with the dual simplex
                        if self.dual_feasible() && self.dual()? {
                            continue;
                        }
                    }
                }
                return Ok(true);
            };
            // entering moves up when its reduced cost is negative
            let dir = if d < 0.0 { 1.0 } else { -1.0 };
            let alpha = self.ftran(q);
            let range = self.hi[q] - self.lo[q];
            let (step, leave) = self.ratio_test(&alpha, dir, bland);
            let (step, leave) = match leave {
                Some(p) if step <= range => (step, Some(p)),
                _ if range.is_finite() => (range, None),
                Some(p) => (step, Some(p)),
                None => return Ok(false),
            };
            self.tick()?;
            if step <= 1e-12 {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            for (pos, &j) in self.head.iter().enumerate() {
                self.x[j] -= dir * step * alpha[pos];
            }
            self.x[q] += dir * step;
            match leave {
                None => {
                    self.state[q] = if dir > 0.0 {
                        VarState::Upper
                    } else {
                        VarState::Lower
                    };
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
                Some(p) => {
                    let out = self.head[p];
                    let moved_down = dir * alpha[p] > 0.0;
                    let (st, v) = if self.is_fixed(out) || moved_down {
                        (VarState::Lower, self.lo[out])
                    } else {
                        (VarState::Upper, self.hi[out])
                    };
                    self.x[out] = v;
                    self.pivot(&alpha, p, q);
                    self.state[out] = st;
                }
            }
        }
    }

    /// Harris two-pass ratio test for a primal step of the entering variable
    /// in direction `dir`. Returns the step and the leaving position.
    fn ratio_test(&self, alpha: &[f64], dir: f64, bland: bool) -> (f64, Option<usize>) {
        let limit = |pos: usize, slack: f64| -> Option<f64> {
            let j = self.head[pos];
            let a = dir * alpha[pos];
            if a > PIVOT_TOL && self.lo[j].is_finite() {
                Some((self.x[j] - self.lo[j] + slack) / a)
            } else if a < -PIVOT_TOL && self.hi[j].is_finite() {
                Some((self.hi[j] - self.x[j] + slack) / -a)
            } else {
                None
            }
        };
        if bland {
            let mut best: Option<(f64, usize, usize)> = None;
            for pos in 0..self.m {
                if let Some(t) = limit(pos, 0.0) {
                    let t = t.max(0.0);
                    let j = self.head[pos];
                    let better = match best {
                        None => true,
                        Some((bt, _, bj)) => t < bt - 1e-12 || (t <= bt + 1e-12 && j < bj),
                    };
                    if better {
                        best = Some((t, pos, j));
                    }
                }
            }
            return best.map_or((f64::INFINITY, None), |(t, p, _)| (t, Some(p)));
        }
        let mut theta = f64::INFINITY;
        for pos in 0..self.m {
            if let Some(t) = limit(pos, FEAS_TOL) {
                theta = theta.min(t);
            }
        }
        if theta == f64::INFINITY {
            return (theta, None);
        }
        let mut chosen: Option<(usize, f64)> = None;
        for (pos, a) in alpha.iter().enumerate().take(self.m) {
            if let Some(t) = limit(pos, 0.0) {
                if t <= theta {
                    let mag = a.abs();
                    if chosen.is_none_or(|(_, best)| mag > best) {
                        chosen = Some((pos, mag));
                    }
                }
            }
        }
        let p = chosen.map(|c| c.0).unwrap_or_else(|| {
            // every candidate was within tolerance only: take the tightest
            (0..self.m)
                .filter_map(|pos| limit(pos, 0.0).map(|t| (pos, t)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(pos, _)| pos)
                .unwrap_or(0)
        });
        (limit(p, 0.0).unwrap_or(0.0).max(0.0), Some(p))
    }

    /// Dual simplex from a dual feasible basis. Returns `false` if the
    /// primal problem is infeasible.
    fn dual(&mut self) -> Result<bool, LpError> {
        loop {
            let mut leave = None;
            let mut worst = FEAS_TOL;
            for (pos, &j) in self.head.iter().enumerate() {
                let v = self.bound_violation(j);
                if v > worst {
                    worst = v;
                    leave = Some(pos);
                }
            }
            let Some(p) = leave else {
                return Ok(true);
            };
            let out = self.head[p];
            let below = self.x[out] < self.lo[out];
            let target = if below { self.lo[out] } else { self.hi[out] };
            let m = self.m;
            let rho: Vec<f64> = (0..m).map(|r| self.inv[r * m + p]).collect();
            let y = self.duals(Phase::Two);
            let mut ratios: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.cols.len() {
                if self.is_fixed(j) || matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                let a: f64 = self.cols[j].iter().map(|&(r, v)| rho[r] * v).sum();
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // increasing x_out needs a < 0 for a variable moving up
                let ok = match self.state[j] {
                    VarState::Lower => (a < 0.0) == below,
                    VarState::Upper => (a > 0.0) == below,
                    VarState::Zero => true,
                    VarState::Basic(_) => false,
                };
                if ok {
                    let d = self.reduced_cost(j, &y, Phase::Two);
                    ratios.push((j, d.abs() / a.abs(), a));
                }
            }
            if ratios.is_empty() {
                return Ok(false);
            }
            let theta = ratios
                .iter()
                .map(|&(_, r, a)| r + OPT_TOL / a.abs())
                .fold(f64::INFINITY, f64::min);
            let (q, _, _) = ratios
                .iter()
                .filter(|&&(_, r, _)| r <= theta)
                .fold(None::<(usize, f64, f64)>, |best, &c| match best {
                    Some(b) if b.2.abs() >= c.2.abs() => Some(b),
                    _ => Some(c),
                })
                .expect("nonempty");
            self.tick()?;
            let alpha = self.ftran(q);
            let delta = (self.x[out] - target) / alpha[p];
            for (pos, &j) in self.head.iter().enumerate() {
                self.x[j] -= alpha[pos] * delta;
            }
            self.x[q] += delta;
            self.x[out] = target;
            self.pivot(&alpha, p, q);
            self.state[out] = if below {
                VarState::Lower
            } else {
                VarState::Upper
            };
        }
    }

    /// Solves from the current state: continues a previous basis when it is
    /// primal or dual feasible, otherwise starts cold with a phase one.
    pub fn solve(&mut self) -> Result<LpSolution, LpError> {
        if self.has_basis && self.primal_infeasible() && !self.dual_feasible() {
            self.has_basis = false;
        }
        if !self.has_basis {
            if self.cold_start() {
                if !self.primal(Phase::One)? {
                    return Err(LpError::Singular); // phase one is bounded below
                }
                let infeas: f64 = (0..self.cols.len())
                    .filter(|&j| self.kind[j] == Kind::Artificial)
                    .map(|j| self.x[j].max(0.0))
                    .sum();
                if infeas > FEAS_TOL * libm::sqrt(1.0 + self.m as f64) {
                    return Ok(self.report(LpStatus::Infeasible));
                }
                for j in 0..self.cols.len() {
                    if self.kind[j] == Kind::Artificial {
                        self.hi[j] = 0.0;
                        if !matches!(self.state[j], VarState::Basic(_)) {
                            self.x[j] = 0.0;
                            self.state[j] = VarState::Lower;
                        }
                    }
                }
            }
        } else if self.primal_infeasible() && !self.dual()? {
            return Ok(self.report(LpStatus::Infeasible));
        }
        self.degenerate_run = 0;
        if !self.primal(Phase::Two)? {
            return Ok(self.report(LpStatus::Unbounded));
        }
        Ok(self.report(LpStatus::Optimal))
    }

    fn report(&self, status: LpStatus) -> LpSolution {
        let values: Vec<f64> = (0..self.n_struct)
            .map(|j| {
                let v = self.x[j];
                if status == LpStatus::Optimal {
                    v.clamp(self.lo[j], self.hi[j])
                } else {
                    v
                }
            })
            .collect();
        let objective_value = values.iter().zip(&self.cost).map(|(x, c)| x * c).sum();
        let duals = if self.has_basis {
            self.duals(Phase::Two)
        } else {
            alloc::vec![0.0; self.m]
        };
        LpSolution {
            status,
            values,
            objective_value,
            duals,
            iterations: self.iterations,
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting; `a` is destroyed.
fn invert(a: &mut [f64], k: usize) -> Option<Vec<f64>> {
    let mut inv = alloc::vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&x, &y| a[x * k + c].abs().total_cmp(&a[y * k + c].abs()))?;
        if a[piv * k + c].abs() <= PIVOT_TOL {
            return None;
        }
        if piv != c {
            for t in 0..k {
                a.swap(c * k + t, piv * k + t);
                inv.swap(c * k + t, piv * k + t);
            }
        }
        let d = a[c * k + c];
        for t in 0..k {
            a[c * k + t] /= d;
            inv[c * k + t] /= d;
        }
        for r in 0..k {
            if r == c {
                continue;
            }
            let f = a[r * k + c];
            if f != 0.0 {
                for t in 0..k {
                    a[r * k + t] -= f * a[c * k + t];
                    inv[r * k + t] -= f * inv[c * k + t];
                }
            }
        }
    }
    Some(inv)
}

/// Solves `p` from scratch.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    Simplex::new(p)?.solve()
}
