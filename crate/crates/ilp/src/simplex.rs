//! Dense two-phase simplex over exact rationals, Bland's pivoting rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::model::Relation;

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    /// Optimal vertex and objective value (0 when no cost vector was given).
    Optimal(Vec<Q>, Q),
}

/// A row `a . x  rel  b` with dense coefficients.
pub struct Row {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = p.recip();
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<usize> = (0..self.ncols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] -= d;
            }
            let d = &f * &prhs;
            self.rhs[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost . x` over the current basis. Columns in `allowed` may
    /// enter. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: &[bool]) -> bool {
        loop {
            // reduced costs d_j = c_j - c_B B^-1 A_j, entering by lowest index
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        d -= &cost[b] * &self.rows[i][j];
                    }
                }
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Minimizes `cost . x` subject to `rows` and `x >= 0`. With `cost = None`
/// only feasibility is decided and the returned value is zero.
pub fn solve(nvars: usize, rows: &[Row], cost: Option<&[Q]>) -> LpResult {
    let m = rows.len();
    // column layout: structural | slack or surplus per row | artificials
    let mut nslack = 0;
    let mut nart = 0;
    for r in rows {
        if r.relation != Relation::Eq {
            nslack += 1;
        }
    }
    let mut norm: Vec<(Vec<Q>, Relation, Q)> = rows
        .iter()
        .map(|r| {
            debug_assert_eq!(r.coeffs.len(), nvars);
            if r.rhs.is_negative() {
                (
                    r.coeffs.iter().map(|x| -x).collect(),
                    r.relation.flipped(),
                    -r.rhs.clone(),
                )
            } else {
                (r.coeffs.clone(), r.relation, r.rhs.clone())
            }
        })
        .collect();
    for (_, rel, _) in &norm {
        if *rel != Relation::Le {
            nart += 1;
        }
    }
    let ncols = nvars + nslack + nart;
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
    };
    let (mut s, mut a) = (nvars, nvars + nslack);
    for (coeffs, rel, rhs) in norm.drain(..) {
        let mut row = coeffs;
        row.resize(ncols, Q::zero());
        match rel {
            Relation::Le => {
                row[s] = Q::one();
                t.basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -Q::one();
                s += 1;
                row[a] = Q::one();
                t.basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = Q::one();
                t.basis.push(a);
                a += 1;
            }
        }
        t.rows.push(row);
        t.rhs.push(rhs);
    }
    let first_art = nvars + nslack;

    if nart > 0 {
        let mut c1 = vec![Q::zero(); ncols];
        for c in c1.iter_mut().skip(first_art) {
            *c = Q::one();
        }
        let all = vec![true; ncols];
        t.optimize(&c1, &all);
        let infeas: Q = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|(b, _)| **b >= first_art)
            .fold(Q::zero(), |acc, (_, v)| acc + v);
        if infeas.is_positive() {
            return LpResult::Infeasible;
        }
        // drive zero-level artificials out of the basis, drop redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut allowed = vec![true; ncols];
    for x in allowed.iter_mut().skip(first_art) {
        *x = false;
    }
    let mut c2 = vec![Q::zero(); ncols];
    if let Some(cost) = cost {
        for (j, c) in cost.iter().enumerate() {
            c2[j] = c.clone();
        }
        if !t.optimize(&c2, &allowed) {
            return LpResult::Unbounded;
        }
    }
    let mut x = vec![Q::zero(); nvars];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nvars {
            x[b] = t.rhs[i].clone();
        }
    }
    let value = match cost {
        Some(cost) => x.iter().zip(cost).fold(Q::zero(), |acc, (a, b)| acc + a * b),
        None => Q::zero(),
    };
    LpResult::Optimal(x, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    fn row(c: &[i64], rel: Relation, b: i64) -> Row {
        Row {
            coeffs: c.iter().map(|&x| rat(x)).collect(),
            relation: rel,
            rhs: rat(b),
        }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let rows = [
            row(&[1, 0], Relation::Le, 4),
            row(&[0, 2], Relation::Le, 12),
            row(&[3, 2], Relation::Le, 18),
        ];
        let cost = [rat(-3), rat(-5)];
        match solve(2, &rows, Some(&cost)) {
            LpResult::Optimal(x, v) => {
                assert_eq!(x, vec![rat(2), rat(6)]);
                assert_eq!(v, rat(-36));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = [row(&[1, 1], Relation::Le, 1), row(&[1, 1], Relation::Ge, 2)];
        assert_eq!(solve(2, &rows, None), LpResult::Infeasible);
        let rows = [row(&[1, -1], Relation::Eq, 0)];
        let cost = [rat(-1), rat(0)];
        assert_eq!(solve(2, &rows, Some(&cost)), LpResult::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let rows = [
            row(&[1, 1], Relation::Eq, 2),
            row(&[2, 2], Relation::Eq, 4),
            row(&[1, 0], Relation::Ge, 1),
        ];
        let cost = [rat(0), rat(1)];
        match solve(2, &rows, Some(&cost)) {
            LpResult::Optimal(x, _) => assert_eq!(x, vec![rat(2), rat(0)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_vertex() {
        // max x + y st 2x + y <= 3, x + 2y <= 3 -> (1,1); 2x + 2y <= 3 gives 3/2
        let rows = [row(&[2, 2], Relation::Le, 3)];
        let cost = [rat(-1), rat(-1)];
        match solve(2, &rows, Some(&cost)) {
            LpResult::Optimal(_, v) => assert_eq!(v, -(rat(3) / rat(2))),
            other => panic!("{other:?}"),
        }
    }
}
