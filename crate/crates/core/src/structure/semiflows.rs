use num_integer::Integer;
use serde::Serialize;

use crate::net::Net;

use super::StructureError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SemiflowKind {
    /// `v^T . I = 0`, indexed by places
    P,
    /// `I . v = 0`, indexed by transitions
    T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Semiflow {
    pub kind: SemiflowKind,
    pub vector: Vec<u64>,
    pub minimal: bool,
}

impl Semiflow {
    pub fn support(&self) -> Vec<usize> {
        (0..self.vector.len()).filter(|&i| self.vector[i] > 0).collect()
    }
}

struct Row {
    /// remaining columns still to be annihilated
    c: Vec<i128>,
    /// combination of original rows
    v: Vec<i128>,
}

fn normalize(row: &mut Row) {
    let g = row.c.iter().chain(&row.v).fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        row.c.iter_mut().chain(row.v.iter_mut()).for_each(|x| *x /= g);
    }
}

fn support_subset(a: &[i128], b: &[i128]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y != 0)
}

/// Minimal-support semiflows by Fourier-Motzkin elimination on the incidence
/// matrix (rows are places for `P`, transitions for `T`).
pub fn semiflows(net: &Net, kind: SemiflowKind, cap: usize) -> Result<Vec<Semiflow>, StructureError> {
    let inc = net.incidence();
    let (n, m) = match kind {
        SemiflowKind::P => (net.num_places(), net.num_transitions()),
        SemiflowKind::T => (net.num_transitions(), net.num_places()),
    };
    let entry = |i: usize, j: usize| -> i128 {
        match kind {
            SemiflowKind::P => inc.get(i, j) as i128,
            SemiflowKind::T => inc.get(j, i) as i128,
        }
    };
    let mut rows: Vec<Row> = (0..n)
        .map(|i| Row {
            c: (0..m).map(|j| entry(i, j)).collect(),
            v: (0..n).map(|k| i128::from(k == i)).collect(),
        })
        .collect();

    for j in 0..m {
        let (zero, rest): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| r.c[j] == 0);
        let (pos, neg): (Vec<Row>, Vec<Row>) = rest.into_iter().partition(|r| r.c[j] > 0);
        let mut next = zero;
        for a in &pos {
            for b in &neg {
                let (ka, kb) = (-b.c[j], a.c[j]);
                let combine = |x: &[i128], y: &[i128]| -> Result<Vec<i128>, StructureError> {
                    x.iter()
                        .zip(y)
                        .map(|(&p, &q)| {
                            p.checked_mul(ka)
                                .and_then(|l| q.checked_mul(kb).and_then(|r| l.checked_add(r)))
                                .ok_or(StructureError::Overflow)
                        })
                        .collect()
                };
                let mut r = Row {
                    c: combine(&a.c, &b.c)?,
                    v: combine(&a.v, &b.v)?,
                };
                normalize(&mut r);
                next.push(r);
            }
        }
        // keep only rows of minimal support
        let mut kept: Vec<Row> = Vec::with_capacity(next.len());
        for (i, r) in next.iter().enumerate() {
            let dominated = next.iter().enumerate().any(|(k, o)| {
                k != i
                    && support_subset(&o.v, &r.v)
                    && (!support_subset(&r.v, &o.v) || k < i)
            });
            if !dominated {
                kept.push(Row {
                    c: r.c.clone(),
                    v: r.v.clone(),
                });
            }
        }
        // intermediate tables may grow past the final count, but not without limit
        if kept.len() > cap.saturating_mul(16).max(1024) {
            return Err(StructureError::Truncated { cap });
        }
        rows = kept;
    }
    if rows.len() > cap {
        return Err(StructureError::Truncated { cap });
    }
    let mut out: Vec<Semiflow> = rows
        .into_iter()
        .map(|r| Semiflow {
            kind,
            vector: r.v.iter().map(|&x| x as u64).collect(),
            minimal: true,
        })
        .collect();
    out.sort_by(|a, b| a.vector.cmp(&b.vector).reverse());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, fixtures, gen_emblem, gen_swimming_pool};

    fn check(net: &Net, s: &Semiflow) {
        let inc = net.incidence();
        match s.kind {
            SemiflowKind::P => {
                for t in 0..net.num_transitions() {
                    let dot: i128 = (0..net.num_places())
                        .map(|p| inc.get(p, t) as i128 * s.vector[p] as i128)
                        .sum();
                    assert_eq!(dot, 0);
                }
            }
            SemiflowKind::T => assert!(inc.apply(&s.vector).iter().all(|&x| x == 0)),
        }
        let g = s.vector.iter().fold(0u64, |g, &x| g.gcd(&x));
        assert_eq!(g, 1);
    }

    #[test]
    fn ac_net_p_semiflow() {
        let s = fixture("fig7").unwrap();
        let ps = semiflows(&s.net, SemiflowKind::P, 100).unwrap();
        for f in &ps {
            check(&s.net, f);
        }
        let want = vec![1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        assert!(ps.iter().any(|f| f.vector == want), "{ps:?}");
    }

    #[test]
    fn unit_t_semiflows() {
        for s in [gen_swimming_pool(2, 1, 1), gen_emblem([0; 9])] {
            let ts = semiflows(&s.net, SemiflowKind::T, 100).unwrap();
            assert_eq!(ts.len(), 1);
            assert!(ts[0].vector.iter().all(|&x| x == 1));
        }
    }

    #[test]
    fn zero_column() {
        let mut b = Net::builder();
        b.place("p").transitions(&["t", "u"]).arc("p", "t", 1).arc("t", "p", 1).arc("u", "p", 1);
        let n = b.build().unwrap();
        let ts = semiflows(&n, SemiflowKind::T, 10).unwrap();
        assert_eq!(ts, vec![Semiflow { kind: SemiflowKind::T, vector: vec![1, 0], minimal: true }]);
    }

    #[test]
    fn all_fixture_semiflows_verify() {
        for (_, s) in fixtures() {
            for kind in [SemiflowKind::P, SemiflowKind::T] {
                for f in semiflows(&s.net, kind, 1000).unwrap() {
                    check(&s.net, &f);
                }
            }
        }
    }
}
