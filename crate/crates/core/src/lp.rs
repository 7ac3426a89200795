//! Exact linear programming over `Q(√d)`.
//!
//! A dense two-phase tableau simplex with Bland's rule. Every pivot is exact,
//! so the usual anti-cycling argument gives termination and every reported
//! optimum, ray or infeasibility verdict is exact.

use crate::arith::Quad;
use crate::model::{Constraint, Sense};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Quad>, value: Quad },
    Infeasible,
    /// `point` is feasible, `ray` is a recession direction with `c·ray < 0`.
    Unbounded { point: Vec<Quad>, ray: Vec<Quad> },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Quad> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

/// Column layout: each structural variable maps to one column (sign-restricted)
/// or a pair `x⁺ − x⁻` (free).
struct Layout {
    var_cols: Vec<(usize, Option<usize>)>,
    n_struct: usize,
}

impl Layout {
    fn new(nonneg: &[bool]) -> Layout {
        let mut next = 0;
        let var_cols = nonneg
            .iter()
            .map(|&nn| {
                let pos = next;
                next += 1;
                if nn {
                    (pos, None)
                } else {
                    next += 1;
                    (pos, Some(pos + 1))
                }
            })
            .collect();
        Layout { var_cols, n_struct: next }
    }

    fn extract(&self, y: &[Quad]) -> Vec<Quad> {
        self.var_cols
            .iter()
            .map(|&(p, n)| match n {
                Some(n) => &y[p] - &y[n],
                None => y[p].clone(),
            })
            .collect()
    }
}

struct Tableau {
    // rows × (cols + 1); the last entry of each row is the right-hand side
    t: Vec<Vec<Quad>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip().expect("pivot element is nonzero");
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &(&f * p);
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Quad], allowed: usize) -> Vec<Quad> {
        (0..allowed)
            .map(|j| {
                let mut z = cost[j].clone();
                for (i, row) in self.t.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        z -= &(cb * &row[j]);
                    }
                }
                z
            })
            .collect()
    }

    /// Runs Bland's rule over columns `< allowed`. Returns the entering column
    /// of an unbounded direction, if any.
    fn run(&mut self, cost: &[Quad], allowed: usize) -> Option<usize> {
        loop {
            let rc = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| rc[j].is_negative()) else {
                return None;
            };
            let mut leave: Option<(usize, Quad)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Some(enter),
            }
        }
    }

    fn solution(&self) -> Vec<Quad> {
        let mut y = vec![Quad::zero(); self.cols];
        for (i, &b) in self.basis.iter().enumerate() {
            y[b] = self.t[i][self.cols].clone();
        }
        y
    }
}

/// Minimizes `objective·x` subject to `rows`, with `x[j] ≥ 0` wherever
/// `nonneg[j]` is set and `x[j]` free otherwise.
pub fn minimize_with_signs(objective: &[Quad], rows: &[Constraint], nonneg: &[bool]) -> LpOutcome {
    let n = objective.len();
    debug_assert_eq!(nonneg.len(), n);
    let layout = Layout::new(nonneg);
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let art0 = layout.n_struct + n_slack;
    let cols = art0 + m;

    let mut t = Vec::with_capacity(m);
    let mut slack = layout.n_struct;
    for (i, r) in rows.iter().enumerate() {
        let mut row = vec![Quad::zero(); cols + 1];
        for (j, a) in r.form.coeffs().iter().enumerate() {
            let (p, neg) = layout.var_cols[j];
            row[p] = a.clone();
            if let Some(q) = neg {
                row[q] = -a;
            }
        }
        match r.sense {
            Sense::Ge => {
                row[slack] = Quad::from_int(-1);
                slack += 1;
            }
            Sense::Le => {
                row[slack] = Quad::one();
                slack += 1;
            }
            Sense::Eq => {}
        }
        row[cols] = r.rhs.clone();
        if r.rhs.is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
        }
        row[art0 + i] = Quad::one();
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (art0..art0 + m).collect(), cols };

    // phase I
    let mut cost1 = vec![Quad::zero(); cols];
    for c in cost1.iter_mut().skip(art0) {
        *c = Quad::one();
    }
    tab.run(&cost1, cols);
    let infeas: Quad = tab.basis.iter().enumerate().filter(|(_, &b)| b >= art0).map(|(i, _)| tab.t[i][cols].clone()).sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive zero-level artificials out, dropping redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= art0 {
            match (0..art0).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // phase II
    let mut cost2 = vec![Quad::zero(); cols];
    for (j, c) in objective.iter().enumerate() {
        let (p, neg) = layout.var_cols[j];
        cost2[p] = c.clone();
        if let Some(q) = neg {
            cost2[q] = -c;
        }
    }
    match tab.run(&cost2, art0) {
        None => {
            let x = layout.extract(&tab.solution());
            let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            LpOutcome::Optimal { x, value }
        }
        Some(enter) => {
            let point = layout.extract(&tab.solution());
            let mut d = vec![Quad::zero(); cols];
            d[enter] = Quad::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                d[b] = -&tab.t[i][enter];
            }
            LpOutcome::Unbounded { point, ray: layout.extract(&d) }
        }
    }
}

/// Minimizes over free variables.
pub fn minimize(objective: &[Quad], rows: &[Constraint]) -> LpOutcome {
    minimize_with_signs(objective, rows, &vec![false; objective.len()])
}

/// Maximizes `objective·x`; the reported value is the maximum and the ray increases it.
pub fn maximize(objective: &[Quad], rows: &[Constraint]) -> LpOutcome {
    let neg: Vec<Quad> = objective.iter().map(|c| -c).collect();
    match minimize(&neg, rows) {
        LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
        other => other,
    }
}

/// Some point satisfying every row, if one exists.
pub fn feasible_point(dim: usize, rows: &[Constraint]) -> Option<Vec<Quad>> {
    match minimize(&vec![Quad::zero(); dim], rows) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// `row` with its form extended by zeros to `nvars` variables.
pub fn pad(row: &Constraint, nvars: usize) -> Constraint {
    let mut c = row.form.0.clone();
    c.resize(nvars, Quad::zero());
    Constraint::new(crate::model::LinearForm(c), row.sense, row.rhs.clone())
}

/// Largest `τ ≤ 1` such that some point satisfies `rows` and every `g·x ≥ h`
/// of `strict` with slack at least `τ`. `None` when `rows` is infeasible.
pub fn max_margin(nvars: usize, rows: &[Constraint], strict: &[Constraint]) -> Option<(Vec<Quad>, Quad)> {
    let n1 = nvars + 1;
    let mut all: Vec<Constraint> = rows.iter().map(|r| pad(r, n1)).collect();
    for s in strict {
        for g in s.ge_rows() {
            let mut r = pad(&g, n1);
            r.form.0[nvars] = Quad::from_int(-1);
            all.push(r);
        }
    }
    let mut cap = vec![Quad::zero(); n1];
    cap[nvars] = Quad::one();
    all.push(Constraint::le(crate::model::LinearForm(cap.clone()), Quad::one()));
    match maximize(&cap, &all) {
        LpOutcome::Optimal { mut x, value } => {
            x.truncate(nvars);
            Some((x, value))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearForm;

    fn q(n: i64) -> Quad {
        Quad::from_int(n)
    }

    fn row(c: &[Quad], s: Sense, rhs: Quad) -> Constraint {
        Constraint::new(LinearForm(c.to_vec()), s, rhs)
    }

    #[test]
    fn small_rational_lp() {
        // max x + y, x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0 → (8/5, 6/5), value 14/5
        let rows = vec![
            row(&[q(1), q(2)], Sense::Le, q(4)),
            row(&[q(3), q(1)], Sense::Le, q(6)),
            row(&[q(1), q(0)], Sense::Ge, q(0)),
            row(&[q(0), q(1)], Sense::Ge, q(0)),
        ];
        match maximize(&[q(1), q(1)], &rows) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![Quad::ratio(8, 5), Quad::ratio(6, 5)]);
                assert_eq!(value, Quad::ratio(14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn irrational_cone_is_unbounded() {
        let r2 = Quad::sqrt_of(2);
        // min −x over {−√2x + y ≤ 0, x, y ≥ 0}
        let rows = vec![row(&[-r2.clone(), q(1)], Sense::Le, q(0)), row(&[q(1), q(0)], Sense::Ge, q(0)), row(&[q(0), q(1)], Sense::Ge, q(0))];
        match minimize(&[q(-1), q(0)], &rows) {
            LpOutcome::Unbounded { point, ray } => {
                assert!(rows.iter().all(|r| r.holds(&point)));
                assert!(rows.iter().all(|r| r.homogenized().holds(&ray)));
                assert!(ray[0].is_positive());
            }
            other => panic!("{other:?}"),
        }
        // adding −√2x + y ≥ 0 leaves the ray y = √2x
        let mut rows2 = rows.clone();
        rows2.push(row(&[-r2, q(1)], Sense::Ge, q(0)));
        match minimize(&[q(-1), q(0)], &rows2) {
            LpOutcome::Unbounded { ray, .. } => assert_eq!(&ray[1] / &ray[0], Quad::sqrt_of(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_equalities() {
        let rows = vec![row(&[q(1)], Sense::Ge, q(2)), row(&[q(1)], Sense::Le, q(1))];
        assert!(minimize(&[q(0)], &rows).is_infeasible());
        let rows = vec![row(&[q(1), q(1)], Sense::Eq, q(1)), row(&[q(2), q(2)], Sense::Eq, q(2)), row(&[q(1), q(-1)], Sense::Eq, Quad::sqrt_of(2))];
        match minimize(&[q(1), q(0)], &rows) {
            LpOutcome::Optimal { x, .. } => {
                assert_eq!(x[0], &(q(1) + Quad::sqrt_of(2)) / &q(2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_variables_go_negative() {
        let rows = vec![row(&[q(1)], Sense::Ge, q(-3))];
        assert_eq!(minimize(&[q(1)], &rows).value(), Some(&q(-3)));
    }
}
