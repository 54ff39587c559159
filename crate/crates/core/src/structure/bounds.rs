use exact_ilp::{lp_solve, rat, BigRational, LinearModel, Relation, Sense, Solution, VarId};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::net::{Net, NetError, Place, System};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralBound {
    pub place: String,
    /// `None` when the relaxation is unbounded.
    pub upper: Option<u64>,
}

/// Scales a non-negative rational vector to the smallest integer multiple.
fn to_integers(v: &[BigRational]) -> Vec<u64> {
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<_> = v.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter()
        .map(|x| (x / &g).to_u64().expect("vector entry fits u64"))
        .collect()
}

/// Minimizes the sum of a vector `>= 1` constrained to the kernel side of `I`.
fn kernel_vector(net: &Net, places_side: bool) -> Option<Vec<u64>> {
    let inc = net.incidence();
    let (n, m) = if places_side {
        (net.num_places(), net.num_transitions())
    } else {
        (net.num_transitions(), net.num_places())
    };
    let mut lp = LinearModel::new(if places_side { "conservativeness" } else { "consistency" });
    let vars: Vec<VarId> = (0..n).map(|i| lp.add_var(format!("v{i}"), false)).collect();
    for &v in &vars {
        lp.add_int_constraint(format!("lb_{}", v.0), &[(v, 1)], Relation::Ge, 1);
    }
    for j in 0..m {
        let terms: Vec<(VarId, i64)> = (0..n)
            .map(|i| {
                let a = if places_side { inc.get(i, j) } else { inc.get(j, i) };
                (vars[i], a)
            })
            .filter(|&(_, a)| a != 0)
            .collect();
        if !terms.is_empty() {
            lp.add_int_constraint(format!("k{j}"), &terms, Relation::Eq, 0);
        }
    }
    lp.set_objective(Sense::Minimize, vars.iter().map(|&v| (v, rat(1))).collect());
    match lp_solve(&lp).solution {
        Solution::Optimal { point, .. } => Some(to_integers(&point)),
        _ => None,
    }
}

/// `X >= 1` with `X^T . I = 0`, if one exists.
pub fn conservativeness(net: &Net) -> Option<Vec<u64>> {
    kernel_vector(net, true)
}

/// `Y >= 1` with `I . Y = 0`, if one exists.
pub fn consistency(net: &Net) -> Option<Vec<u64>> {
    kernel_vector(net, false)
}

/// False iff some rational `Y >= 0` gives `I . Y` semi-positive.
pub fn structurally_bounded(net: &Net) -> bool {
    let inc = net.incidence();
    let mut lp = LinearModel::new("unboundedness");
    let ys: Vec<VarId> = (0..net.num_transitions()).map(|t| lp.add_var(format!("y{t}"), false)).collect();
    let mut total: Vec<(VarId, i64)> = Vec::new();
    for p in 0..net.num_places() {
        let row: Vec<(VarId, i64)> = ys.iter().map(|&y| (y, inc.get(p, y.0))).filter(|&(_, a)| a != 0).collect();
        total.extend(&row);
        if !row.is_empty() {
            lp.add_int_constraint(format!("p{p}"), &row, Relation::Ge, 0);
        }
    }
    // scale so that the sum of I.Y is at least one
    lp.add_int_constraint("growth", &total, Relation::Ge, 1);
    matches!(lp_solve(&lp).solution, Solution::Infeasible)
}

/// Ceiling of `max M(p)` over `M = M0 + I.Y`, `M, Y >= 0` (rational).
pub fn structural_bound_upper(system: &System, p: &str) -> Result<StructuralBound, NetError> {
    let p = system.net.place(p)?;
    Ok(bound_of(system, p))
}

pub(crate) fn bound_of(system: &System, p: Place) -> StructuralBound {
    let net = &system.net;
    let inc = net.incidence();
    let mut lp = LinearModel::new("structural_bound");
    let ys: Vec<VarId> = (0..net.num_transitions()).map(|t| lp.add_var(format!("y{t}"), false)).collect();
    let row = |q: Place| -> Vec<(VarId, i64)> {
        ys.iter().map(|&y| (y, inc.get(q, y.0))).filter(|&(_, a)| a != 0).collect()
    };
    for q in 0..net.num_places() {
        let r = row(q);
        if !r.is_empty() {
            lp.add_int_constraint(format!("m{q}"), &r, Relation::Ge, -(system.m0[q] as i64));
        }
    }
    lp.set_objective(
        Sense::Maximize,
        row(p).into_iter().map(|(v, a)| (v, rat(a))).collect(),
    );
    let upper = match lp_solve(&lp).solution {
        Solution::Optimal { value, .. } => {
            let total = value + rat(system.m0[p] as i64);
            Some(total.ceil().to_integer().to_u64().expect("bound fits u64"))
        }
        _ => None,
    };
    StructuralBound {
        place: net.place_name(p).to_string(),
        upper,
    }
}
