use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::{LinearModel, Relation, Sense, VarId};
use crate::simplex::{self, LpResult, Row};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Optimal { value: Q, point: Vec<Q> },
    Feasible { point: Vec<Q> },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub node_count: usize,
}

impl SolveOutcome {
    pub fn point(&self) -> Option<&[Q]> {
        match &self.solution {
            Solution::Optimal { point, .. } | Solution::Feasible { point } => Some(point),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IlpError {
    #[error("branch-and-bound node budget of {0} exhausted")]
    NodeBudgetExceeded(usize),
    #[error("solver returned a point that fails substitution: {0}")]
    Verification(String),
}

fn dense_rows(model: &LinearModel, extra: &[(VarId, Relation, Q)]) -> Vec<Row> {
    let n = model.vars.len();
    let mut rows = Vec::with_capacity(model.constraints.len() + extra.len());
    for c in &model.constraints {
        let mut coeffs = vec![Q::zero(); n];
        for (v, k) in &c.terms {
            coeffs[v.0] += k;
        }
        rows.push(Row {
            coeffs,
            relation: c.relation,
            rhs: c.rhs.clone(),
        });
    }
    for (v, rel, b) in extra {
        let mut coeffs = vec![Q::zero(); n];
        coeffs[v.0] = Q::from_integer(1.into());
        rows.push(Row {
            coeffs,
            relation: *rel,
            rhs: b.clone(),
        });
    }
    rows
}

/// Cost vector of the objective turned into a minimization.
fn min_cost(model: &LinearModel) -> Option<Vec<Q>> {
    model.objective.as_ref().map(|o| {
        let mut c = vec![Q::zero(); model.vars.len()];
        for (v, k) in &o.terms {
            c[v.0] += k;
        }
        if o.sense == Sense::Maximize {
            for x in c.iter_mut() {
                *x = -x.clone();
            }
        }
        c
    })
}

fn relax(model: &LinearModel, extra: &[(VarId, Relation, Q)], cost: Option<&[Q]>) -> LpResult {
    simplex::solve(model.vars.len(), &dense_rows(model, extra), cost)
}

/// Rational relaxation: integrality flags are ignored.
pub fn lp_solve(model: &LinearModel) -> SolveOutcome {
    let cost = min_cost(model);
    let solution = match relax(model, &[], cost.as_deref()) {
        LpResult::Infeasible => Solution::Infeasible,
        LpResult::Unbounded => Solution::Unbounded,
        LpResult::Optimal(point, _) => match model.objective_at(&point) {
            Some(value) => Solution::Optimal { value, point },
            None => Solution::Feasible { point },
        },
    };
    SolveOutcome {
        solution,
        node_count: 1,
    }
}

fn floor(q: &Q) -> Q {
    Q::from_integer(q.numer().div_floor(q.denom()))
}

/// Branch-and-bound over the integer variables of `model`.
///
/// Without an objective the first integral point found is returned as
/// `Feasible`. With one, the search continues to optimality. Depth-first,
/// branching on the most fractional variable (lowest index on ties).
pub fn ilp_feasible(model: &LinearModel, budget: usize) -> Result<SolveOutcome, IlpError> {
    let cost = min_cost(model);
    // directions may only be used when shifting along them cannot worsen the objective
    let directions: Vec<&Vec<(VarId, u64)>> = model
        .directions
        .iter()
        .filter(|d| match &cost {
            None => true,
            Some(c) => {
                let shift = d
                    .iter()
                    .fold(Q::zero(), |acc, (v, k)| acc + &c[v.0] * Q::from_integer((*k).into()));
                !shift.is_negative()
            }
        })
        .collect();

    let mut stack: Vec<Vec<(VarId, Relation, Q)>> = vec![Vec::new()];
    let mut nodes = 0usize;
    let mut best: Option<(Q, Vec<Q>)> = None;
    let mut lp_unbounded = false;

    while let Some(bounds) = stack.pop() {
        nodes += 1;
        if nodes > budget {
            return Err(IlpError::NodeBudgetExceeded(budget));
        }
        let (x, value) = match relax(model, &bounds, cost.as_deref()) {
            LpResult::Infeasible => continue,
            LpResult::Unbounded => {
                // fall back to a feasibility search below this node
                lp_unbounded = true;
                match relax(model, &bounds, None) {
                    LpResult::Optimal(x, v) => (x, v),
                    _ => continue,
                }
            }
            LpResult::Optimal(x, v) => (x, v),
        };
        if let Some((incumbent, _)) = &best {
            if !lp_unbounded && value >= *incumbent {
                continue;
            }
        }

        if let Some(d) = directions.iter().find(|d| {
            d.iter()
                .all(|(v, k)| x[v.0] >= Q::from_integer((*k).into()))
        }) {
            // any integral point >= d can be shifted back by d: exclude that region
            for (v, k) in d.iter().rev() {
                let mut child = bounds.clone();
                child.push((*v, Relation::Le, Q::from_integer((*k as i64 - 1).into())));
                stack.push(child);
            }
            continue;
        }

        let mut pick: Option<(usize, Q)> = None;
        let half = Q::new(1.into(), 2.into());
        for (i, v) in model.vars.iter().enumerate() {
            if !v.integer || x[i].is_integer() {
                continue;
            }
            let frac = &x[i] - floor(&x[i]);
            let dist = (&frac - &half).abs();
            if pick.as_ref().is_none_or(|(_, d)| dist < *d) {
                pick = Some((i, dist));
            }
        }
        match pick {
            None => {
                if cost.is_none() {
                    model.check_point(&x, true).map_err(IlpError::Verification)?;
                    return Ok(SolveOutcome {
                        solution: Solution::Feasible { point: x },
                        node_count: nodes,
                    });
                }
                if lp_unbounded {
                    return Ok(SolveOutcome {
                        solution: Solution::Unbounded,
                        node_count: nodes,
                    });
                }
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    best = Some((value, x));
                }
            }
            Some((i, _)) => {
                let lo = floor(&x[i]);
                let hi = &lo + Q::from_integer(1.into());
                let frac = &x[i] - &lo;
                let mut up = bounds.clone();
                up.push((VarId(i), Relation::Ge, hi));
                let mut down = bounds;
                down.push((VarId(i), Relation::Le, lo));
                // explore the nearer side first
                if frac > half {
                    stack.push(down);
                    stack.push(up);
                } else {
                    stack.push(up);
                    stack.push(down);
                }
            }
        }
    }

    let solution = match best {
        Some((_, point)) => {
            model.check_point(&point, true).map_err(IlpError::Verification)?;
            let value = model.objective_at(&point).unwrap_or_default();
            Solution::Optimal { value, point }
        }
        None => Solution::Infeasible,
    };
    Ok(SolveOutcome {
        solution,
        node_count: nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    #[test]
    fn knapsack_optimum() {
        // max 5a + 4b + 3c st 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8, ints
        let mut m = LinearModel::new("knap");
        let a = m.add_var("a", true);
        let b = m.add_var("b", true);
        let c = m.add_var("c", true);
        m.add_int_constraint("r1", &[(a, 2), (b, 3), (c, 1)], Relation::Le, 5);
        m.add_int_constraint("r2", &[(a, 4), (b, 1), (c, 2)], Relation::Le, 11);
        m.add_int_constraint("r3", &[(a, 3), (b, 4), (c, 2)], Relation::Le, 8);
        m.set_objective(Sense::Maximize, vec![(a, rat(5)), (b, rat(4)), (c, rat(3))]);
        let out = ilp_feasible(&m, 1000).unwrap();
        match out.solution {
            Solution::Optimal { value, point } => {
                assert_eq!(value, rat(13));
                assert_eq!(point, vec![rat(2), rat(0), rat(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parity_infeasible() {
        // 2x - 2y = 1 has no integer solution, the relaxation is unbounded along x = y
        let mut m = LinearModel::new("parity");
        let x = m.add_var("x", true);
        let y = m.add_var("y", true);
        m.add_int_constraint("odd", &[(x, 2), (y, -2)], Relation::Eq, 1);
        m.add_direction(vec![(x, 1), (y, 1)]);
        let out = ilp_feasible(&m, 100).unwrap();
        assert_eq!(out.solution, Solution::Infeasible);
    }

    #[test]
    fn budget_is_reported() {
        let mut m = LinearModel::new("parity");
        let x = m.add_var("x", true);
        let y = m.add_var("y", true);
        m.add_int_constraint("odd", &[(x, 2), (y, -2)], Relation::Eq, 1);
        assert_eq!(
            ilp_feasible(&m, 50),
            Err(IlpError::NodeBudgetExceeded(50))
        );
    }

    #[test]
    fn unbounded_integer_program() {
        let mut m = LinearModel::new("ray");
        let x = m.add_var("x", true);
        let y = m.add_var("y", true);
        m.add_int_constraint("r", &[(x, 1), (y, -1)], Relation::Eq, 0);
        m.set_objective(Sense::Maximize, vec![(x, rat(1))]);
        assert_eq!(ilp_feasible(&m, 100).unwrap().solution, Solution::Unbounded);
        assert_eq!(lp_solve(&m).solution, Solution::Unbounded);
    }
}
