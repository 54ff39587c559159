use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Index of a variable inside a [`LinearModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    /// `lhs rel rhs`
    pub fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub integer: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// Free-form note written as a comment line above the row on export.
    pub comment: Option<String>,
    pub terms: Vec<(VarId, BigRational)>,
    pub relation: Relation,
    pub rhs: BigRational,
}

impl Constraint {
    pub fn lhs_at(&self, point: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .fold(BigRational::zero(), |acc, (v, c)| acc + c * &point[v.0])
    }

    pub fn is_satisfied(&self, point: &[BigRational]) -> bool {
        self.relation.holds(&self.lhs_at(point), &self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub terms: Vec<(VarId, BigRational)>,
}

/// A linear model over non-negative variables.
///
/// Besides the rows, a model may carry *reducible directions*: non-negative
/// integer vectors `d` such that whenever an integer point `x` is feasible and
/// `x >= d` componentwise, `x - d` is feasible as well. Branch-and-bound uses
/// them to cut away unbounded but redundant parts of the search space.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearModel {
    pub name: String,
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Objective>,
    pub directions: Vec<Vec<(VarId, u64)>>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LinearModel {
    pub fn new(name: impl Into<String>) -> Self {
        LinearModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, integer: bool) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            integer,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, BigRational)>,
        relation: Relation,
        rhs: BigRational,
    ) -> &mut Constraint {
        let mut merged: Vec<(VarId, BigRational)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            assert!(v.0 < self.vars.len(), "unknown variable {v:?}");
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some((_, acc)) => *acc += c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint {
            name: name.into(),
            comment: None,
            terms: merged,
            relation,
            rhs,
        });
        self.constraints.last_mut().unwrap()
    }

    /// Same as [`add_constraint`](Self::add_constraint) with integer data.
    pub fn add_int_constraint(
        &mut self,
        name: impl Into<String>,
        terms: &[(VarId, i64)],
        relation: Relation,
        rhs: i64,
    ) -> &mut Constraint {
        let terms = terms.iter().map(|&(v, c)| (v, rat(c))).collect();
        self.add_constraint(name, terms, relation, rat(rhs))
    }

    pub fn set_objective(&mut self, sense: Sense, terms: Vec<(VarId, BigRational)>) {
        self.objective = Some(Objective { sense, terms });
    }

    pub fn add_direction(&mut self, direction: Vec<(VarId, u64)>) {
        let d: Vec<_> = direction.into_iter().filter(|&(_, k)| k > 0).collect();
        if !d.is_empty() {
            self.directions.push(d);
        }
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn objective_at(&self, point: &[BigRational]) -> Option<BigRational> {
        self.objective.as_ref().map(|o| {
            o.terms
                .iter()
                .fold(BigRational::zero(), |acc, (v, c)| acc + c * &point[v.0])
        })
    }

    /// Checks non-negativity, every row and (optionally) integrality.
    pub fn check_point(&self, point: &[BigRational], integral: bool) -> Result<(), String> {
        if point.len() != self.vars.len() {
            return Err(format!(
                "point has {} entries, model has {} variables",
                point.len(),
                self.vars.len()
            ));
        }
        for (i, x) in point.iter().enumerate() {
            if x.is_negative() {
                return Err(format!("{} is negative", self.vars[i].name));
            }
            if integral && self.vars[i].integer && !x.is_integer() {
                return Err(format!("{} = {} is not integral", self.vars[i].name, x));
            }
        }
        for c in &self.constraints {
            if !c.is_satisfied(point) {
                return Err(format!("row {} violated", c.name));
            }
        }
        Ok(())
    }
}
