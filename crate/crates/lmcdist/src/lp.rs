//! Exact rational linear programming.
//!
//! Programs are in standard form: maximize `c . x` subject to `A x = b`,
//! `x >= 0`, with equality rows only; standard-form conversion (slacks for
//! inequalities) is the caller's job. The solver is a dense two-phase simplex
//! over exact rationals with Bland's least-index anti-cycling rule, so it
//! always terminates and returned optima and witnesses are exact.

use crate::rational::Rational;
use num_traits::Zero;

/// maximize `objective . x` subject to `constraints x = rhs`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

/// Solver outcome. Optimal witnesses satisfy the constraints exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        witness: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs (maximization: optimal when all entries <= 0).
    cost: Vec<Rational>,
    value: Rational,
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let delta = &factor * &self.rows[r][j];
                    self.rows[i][j] -= delta;
                }
            }
            let delta = &factor * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        if !self.cost[c].is_zero() {
            let factor = self.cost[c].clone();
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let delta = &factor * &self.rows[r][j];
                    self.cost[j] -= delta;
                }
            }
            let delta = &factor * &self.rhs[r];
            self.value += delta;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: entering column is the least index with positive reduced
    /// cost; leaving row minimizes the ratio, ties broken by least basic
    /// variable index.
    fn run(&mut self, allowed_cols: usize) -> SimplexEnd {
        loop {
            let entering = (0..allowed_cols).find(|&j| self.cost[j] > Rational::zero());
            let c = match entering {
                None => return SimplexEnd::Optimal,
                Some(c) => c,
            };
            let mut best: Option<(Rational, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c] > Rational::zero() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((r, row)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*row])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            match best {
                None => return SimplexEnd::Unbounded,
                Some((_, r)) => self.pivot(r, c),
            }
        }
    }
}

/// Runs phase 1. Returns a tableau holding a basic feasible solution of
/// `A x = b, x >= 0` restricted to the original columns, or `None` when the
/// system is infeasible.
fn phase1(constraints: &[Vec<Rational>], rhs: &[Rational], nvars: usize) -> Option<Tableau> {
    // Presolve: drop identically-zero rows; a zero row with nonzero rhs is
    // infeasible outright.
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for (row, r) in constraints.iter().zip(rhs) {
        assert_eq!(row.len(), nvars, "constraint row has wrong length");
        if row.iter().all(Zero::is_zero) {
            if !r.is_zero() {
                return None;
            }
            continue;
        }
        if *r < Rational::zero() {
            rows.push(row.iter().map(|x| -x).collect::<Vec<_>>());
            b.push(-r);
        } else {
            rows.push(row.clone());
            b.push(r.clone());
        }
    }

    let m = rows.len();
    let ncols = nvars + m;
    for (i, row) in rows.iter_mut().enumerate() {
        row.extend((0..m).map(|j| {
            if i == j {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        }));
    }
    // Phase-1 objective: maximize -(sum of artificials). With the artificial
    // basis, the reduced cost of column j is the column sum for original
    // columns and 0 for artificials.
    let mut cost = vec![Rational::zero(); ncols];
    for (j, slot) in cost.iter_mut().enumerate().take(nvars) {
        *slot = rows.iter().map(|row| &row[j]).sum();
    }
    let value = -b.iter().sum::<Rational>();
    let mut t = Tableau {
        ncols,
        rows,
        rhs: b,
        basis: (nvars..nvars + m).collect(),
        cost,
        value,
    };
    match t.run(ncols) {
        SimplexEnd::Unbounded => unreachable!("phase-1 objective is bounded above by 0"),
        SimplexEnd::Optimal => {}
    }
    if !t.value.is_zero() {
        return None;
    }

    // Drive leftover artificials out of the basis; rows that cannot pivot on
    // an original column are redundant constraints.
    let mut drop_rows = Vec::new();
    for i in 0..t.rows.len() {
        if t.basis[i] < nvars {
            continue;
        }
        match (0..nvars).find(|&j| !t.rows[i][j].is_zero()) {
            Some(j) => t.pivot(i, j),
            None => drop_rows.push(i),
        }
    }
    for &i in drop_rows.iter().rev() {
        t.rows.remove(i);
        t.rhs.remove(i);
        t.basis.remove(i);
    }
    // Restrict to the original columns.
    for row in &mut t.rows {
        row.truncate(nvars);
    }
    t.ncols = nvars;
    Some(t)
}

/// Exact optimum of a standard-form program.
pub fn maximize(lp: &LinearProgram) -> LpOutcome {
    let nvars = lp.objective.len();
    let mut t = match phase1(&lp.constraints, &lp.rhs, nvars) {
        None => return LpOutcome::Infeasible,
        Some(t) => t,
    };
    // Reduced costs for the real objective from scratch: c_j - c_B B^-1 A_j.
    let mut cost = lp.objective.clone();
    let mut value = Rational::zero();
    for (i, &bi) in t.basis.iter().enumerate() {
        let cb = &lp.objective[bi];
        if cb.is_zero() {
            continue;
        }
        for (slot, a) in cost.iter_mut().zip(&t.rows[i]) {
            if !a.is_zero() {
                *slot -= cb * a;
            }
        }
        value += cb * &t.rhs[i];
    }
    t.cost = cost;
    t.value = value;
    match t.run(nvars) {
        SimplexEnd::Unbounded => LpOutcome::Unbounded,
        SimplexEnd::Optimal => {
            let mut witness = vec![Rational::zero(); nvars];
            for (i, &bi) in t.basis.iter().enumerate() {
                witness[bi] = t.rhs[i].clone();
            }
            LpOutcome::Optimal {
                value: t.value,
                witness,
            }
        }
    }
}

/// Phase-1 feasibility test: a point of `{x >= 0 | A x = b}` if one exists.
pub fn feasible_point(constraints: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let nvars = constraints.first().map_or(0, Vec::len);
    let t = phase1(constraints, rhs, nvars)?;
    let mut witness = vec![Rational::zero(); nvars];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < nvars {
            witness[bi] = t.rhs[i].clone();
        }
    }
    Some(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn check_witness(lp: &LinearProgram, witness: &[Rational]) {
        for x in witness {
            assert!(*x >= Rational::zero());
        }
        for (row, b) in lp.constraints.iter().zip(&lp.rhs) {
            let lhs: Rational = row.iter().zip(witness).map(|(a, x)| a * x).sum();
            assert_eq!(&lhs, b);
        }
    }

    #[test]
    fn simple_maximum() {
        let lp = LinearProgram {
            objective: vec![int(1), int(0)],
            constraints: vec![vec![int(1), int(1)]],
            rhs: vec![int(1)],
        };
        match maximize(&lp) {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(value, int(1));
                assert_eq!(witness, vec![int(1), int(0)]);
                check_witness(&lp, &witness);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn negative_rhs_with_nonnegative_vars_is_infeasible() {
        let lp = LinearProgram {
            objective: vec![int(1)],
            constraints: vec![vec![int(1)]],
            rhs: vec![int(-1)],
        };
        assert_eq!(maximize(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn two_by_two_system() {
        // max x1 + x2 with x1 + 2 x2 = 2, 2 x1 + x2 = 2: unique point (2/3, 2/3).
        let lp = LinearProgram {
            objective: vec![int(1), int(1)],
            constraints: vec![vec![int(1), int(2)], vec![int(2), int(1)]],
            rhs: vec![int(2), int(2)],
        };
        match maximize(&lp) {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(value, rat(4, 3));
                assert_eq!(witness, vec![rat(2, 3), rat(2, 3)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_program() {
        // max x1 with x1 - x2 = 0: x1 = x2 can grow without bound.
        let lp = LinearProgram {
            objective: vec![int(1), int(0)],
            constraints: vec![vec![int(1), int(-1)]],
            rhs: vec![int(0)],
        };
        assert_eq!(maximize(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn feasibility_with_witness() {
        let a = vec![vec![int(1), int(1)]];
        let b = vec![int(1)];
        let x = feasible_point(&a, &b).unwrap();
        assert_eq!(x.iter().sum::<Rational>(), int(1));

        assert!(feasible_point(&[vec![int(1), int(1)]], &[int(-1)]).is_none());

        let a = vec![vec![int(1), int(-1)], vec![int(1), int(1)]];
        let b = vec![int(0), int(2)];
        let x = feasible_point(&a, &b).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
    }

    #[test]
    fn redundant_and_zero_rows_are_handled() {
        let lp = LinearProgram {
            objective: vec![int(1), int(1)],
            constraints: vec![
                vec![int(0), int(0)],
                vec![int(1), int(1)],
                vec![int(2), int(2)],
            ],
            rhs: vec![int(0), int(1), int(2)],
        };
        match maximize(&lp) {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(value, int(1));
                check_witness(&lp, &witness);
            }
            other => panic!("expected optimal, got {other:?}"),
        }

        let lp = LinearProgram {
            objective: vec![int(1)],
            constraints: vec![vec![int(0)]],
            rhs: vec![int(1)],
        };
        assert_eq!(maximize(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn beale_cycle_terminates_under_bland() {
        // Classic degenerate instance that cycles under the largest-coefficient
        // rule. Optimal value 1/20 at x = (1/25, 0, 1, 0) with slacks; the dual
        // point y = (0, 3/2, 1/20) certifies optimality.
        let lp = LinearProgram {
            objective: vec![
                rat(3, 4),
                int(-150),
                rat(1, 50),
                int(-6),
                int(0),
                int(0),
                int(0),
            ],
            constraints: vec![
                vec![
                    rat(1, 4),
                    int(-60),
                    rat(-1, 25),
                    int(9),
                    int(1),
                    int(0),
                    int(0),
                ],
                vec![
                    rat(1, 2),
                    int(-90),
                    rat(-1, 50),
                    int(3),
                    int(0),
                    int(1),
                    int(0),
                ],
                vec![int(0), int(0), int(1), int(0), int(0), int(0), int(1)],
            ],
            rhs: vec![int(0), int(0), int(1)],
        };
        match maximize(&lp) {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(value, rat(1, 20));
                check_witness(&lp, &witness);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_equalities() {
        // x1 = 0 and x1 + x2 = 0 force the origin.
        let lp = LinearProgram {
            objective: vec![int(3), int(5)],
            constraints: vec![vec![int(1), int(0)], vec![int(1), int(1)]],
            rhs: vec![int(0), int(0)],
        };
        match maximize(&lp) {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(value, int(0));
                assert_eq!(witness, vec![int(0), int(0)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }
}
