// A small knapsack solved exactly, then written in LP format.

use exact_ilp::{export_lp, ilp_feasible, rat, LinearModel, Relation, Sense, Solution};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let items = [("tent", 5, 8), ("stove", 3, 5), ("rope", 1, 2), ("lamp", 2, 3)];
    let mut m = LinearModel::new("knapsack");
    let vars: Vec<_> = items.iter().map(|(name, _, _)| m.add_var(*name, true)).collect();
    let weights: Vec<_> = vars.iter().zip(&items).map(|(&v, &(_, w, _))| (v, w)).collect();
    m.add_int_constraint("capacity", &weights, Relation::Le, 7).comment = Some("total weight".into());
    for &v in &vars {
        m.add_int_constraint(format!("one_{}", v.0), &[(v, 1)], Relation::Le, 1);
    }
    m.set_objective(Sense::Maximize, vars.iter().zip(&items).map(|(&v, &(_, _, p))| (v, rat(p))).collect());

    let out = ilp_feasible(&m, 1_000)?;
    let Solution::Optimal { value, point } = &out.solution else {
        return Err(format!("unexpected {:?}", out.solution).into());
    };
    let packed: Vec<&str> = items.iter().zip(point).filter(|(_, x)| **x == rat(1)).map(|(i, _)| i.0).collect();
    println!("value {value} with {packed:?} after {} nodes", out.node_count);
    assert_eq!(*value, rat(11));
    print!("{}", export_lp(&m));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
