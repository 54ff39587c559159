//! Reference systems and parametric model generators.

use crate::dsl;
use crate::net::{Marking, Net, System};

const FIG1: &str = "
place p1
place p2
place p3 init 4
place p4 init 3
trans t1
trans t2
trans t3
arc p3 -> t2 weight 4
arc p4 -> t2 weight 3
arc t2 -> p1 weight 2
arc t2 -> p2
arc p1 -> t1
arc t1 -> p3 weight 2
arc p2 -> t3
arc t3 -> p4 weight 3
";

const FIG3_ARCS: &str = "
place p3
place p4
place p5
place p6
trans t1
trans t2
trans t3
trans t4
arc p1 -> t1
arc p1 -> t2
arc t2 -> p2
arc p2 -> t1
arc t1 -> p3
arc p3 -> t2
arc t2 -> p5
arc p5 -> t3
arc t1 -> p4
arc p4 -> t3
arc t3 -> p6
arc t3 -> p1
arc p6 -> t4
arc t4 -> p1
";

const FIG4: &str = "
place p init 3
place p1
place p2 init 1
place p3 init 2
place p4 init 1
place p5
place p6
trans t1
trans t2
trans t3
trans t4
trans t5
arc t2 -> p6 weight 2
arc p6 -> t5 weight 5
arc t1 -> p
arc p -> t4 weight 2
arc p1 -> t3 weight 2
arc t3 -> p4 weight 3
arc p4 -> t4
arc t4 -> p5
arc p5 -> t5 weight 2
arc t5 -> p3 weight 5
arc p3 -> t2 weight 2
arc p -> t5 weight 2
arc p -> t2 weight 2
arc t2 -> p2
arc p2 -> t1 weight 3
arc t1 -> p1 weight 5
arc t3 -> p1
arc t3 -> p weight 4
";

const FIG6: &str = "
place p init 1
place p1
place p2
trans t1
trans t2
arc p -> t1
arc t1 -> p1
arc p -> t2
arc t2 -> p2
";

const FIG7: &str = "
place p0 init 1
place p1
place p2 init 1
place p3
place p4
place p5 init 1
place p6
place p7
place p8
place p9
place p10
place p11
place p12 init 1
place p13 init 1
trans t0
trans t1
trans t2
trans t3
trans t4
trans t5
trans t6
trans t7
arc t0 -> p1
arc t1 -> p1
arc p0 -> t0
arc p0 -> t1
arc p1 -> t2
arc p1 -> t3
arc t2 -> p4
arc t3 -> p4
arc p2 -> t2
arc t2 -> p3
arc p3 -> t3
arc t3 -> p2
arc t0 -> p10
arc p10 -> t6
arc t6 -> p0
arc t1 -> p11
arc p11 -> t7
arc t7 -> p0
arc p4 -> t6
arc p4 -> t7
arc p5 -> t6
arc p5 -> t7
arc t4 -> p5
arc t5 -> p5
arc t6 -> p8
arc p8 -> t4
arc t7 -> p9
arc p9 -> t5
arc t4 -> p12
arc p12 -> t0
arc t5 -> p13
arc p13 -> t1
arc t0 -> p7
arc p7 -> t4
arc t1 -> p6
arc p6 -> t5
arc p6 -> t4
arc t4 -> p6
arc p7 -> t5
arc t5 -> p7
";

const FIG8: &str = "
place p1 init 2
place p2 init 2
place p3
place p4 init 1
place p5
trans t1
trans t2
trans t3
arc t3 -> p1
arc t3 -> p4
arc p4 -> t2
arc p2 -> t2
arc t2 -> p2 weight 2
arc t2 -> p5
arc p5 -> t3
arc p2 -> t1
arc p1 -> t1 weight 2
arc t1 -> p1
arc t1 -> p3
arc p3 -> t3
";

const FIG10: &str = "
place p init 2
place p' init 1
trans t
trans t'
arc p -> t weight 2
arc p' -> t
arc p' -> t'
";

const FIG11: &str = "
place p init 5
place p1 init 2
place p2
place p3
place p4
trans t1
trans t2
trans t3
trans t4
arc p1 -> t1 weight 2
arc t1 -> p2
arc t1 -> p
arc p2 -> t2
arc p -> t2 weight 2
arc t2 -> p3 weight 3
arc p3 -> t3 weight 3
arc t3 -> p
arc t3 -> p4 weight 2
arc p -> t4 weight 5
arc p4 -> t4 weight 2
arc t4 -> p1 weight 4
";

const FIG12: &str = "
place p1 init 2
place p2
place p3
place p4
place p5
place p6
place p7 init 3
place p8 init 4
trans t1
trans t2
trans t3
trans t4
trans t5
trans t6
arc t6 -> p6
arc p6 -> t5
arc t5 -> p5
arc p5 -> t4
arc t4 -> p4
arc p4 -> t3
arc t3 -> p3
arc p7 -> t6
arc p3 -> t2
arc t2 -> p2
arc p2 -> t1
arc t1 -> p7
arc p7 -> t3
arc t4 -> p7
arc t2 -> p8
arc p8 -> t5
arc t1 -> p1
arc p1 -> t6
";

const HFC_ARCS: &str = "
trans t1
trans t2
trans t3
trans t4
trans t5
arc p1 -> t1 weight 2
arc t2 -> p1
arc p2 -> t2
arc p2 -> t3
arc t1 -> p3
arc t1 -> p2
arc t3 -> p4
arc p3 -> t4
arc t4 -> p4
arc p4 -> t5 weight 2
arc t5 -> p2 weight 2
";

const FIG18_EXTRA: &str = "
arc t1 -> p7 weight 2
arc p7 -> t2
arc t3 -> p5
arc p5 -> t2
arc t2 -> p6
arc p6 -> t3
";

const FIG21: &str = "
place p0 init 1
place p1 init 1
place p2
place p3
place p4 init 1
place p5 init 1
place p6 init 1
place p7 init 1
trans t0
trans t1
trans t2
trans t3
arc t2 -> p2
arc p2 -> t2
arc p2 -> t1
arc t3 -> p2
arc p1 -> t3
arc t1 -> p1
arc t0 -> p7
arc p7 -> t3
arc t0 -> p1
arc p1 -> t0
arc p0 -> t0
arc t2 -> p0
arc t0 -> p3
arc p3 -> t2
arc t2 -> p4
arc p4 -> t1
arc t1 -> p5
arc p5 -> t2
arc t3 -> p6
arc p6 -> t0
";

fn places(init: &[(&str, u64)]) -> String {
    init.iter()
        .map(|(p, k)| format!("place {p} init {k}\n"))
        .collect()
}

/// Named reference systems.
pub fn fixtures() -> Vec<(&'static str, System)> {
    let fig3 = |p2: u64| places(&[("p1", 2), ("p2", p2)]) + FIG3_ARCS;
    let hfc = |m: &[u64]| {
        places(&[("p1", m[0]), ("p2", m[1]), ("p3", m[2]), ("p4", m[3])]) + HFC_ARCS
    };
    let fig18 = places(&[
        ("p1", 1),
        ("p2", 1),
        ("p3", 2),
        ("p4", 0),
        ("p5", 2),
        ("p6", 2),
        ("p7", 1),
    ]) + HFC_ARCS
        + FIG18_EXTRA;
    let texts: Vec<(&'static str, String)> = vec![
        ("fig1", FIG1.into()),
        ("fig3_left", fig3(1)),
        ("fig3_right", fig3(2)),
        ("fig4", FIG4.into()),
        ("fig6", FIG6.into()),
        ("fig7", FIG7.into()),
        ("fig8", FIG8.into()),
        ("fig10", FIG10.into()),
        ("fig11", FIG11.into()),
        ("fig12", FIG12.into()),
        ("fig16", hfc(&[1, 1, 1, 0])),
        ("fig17", hfc(&[1, 2, 0, 0])),
        ("fig18", fig18),
        ("fig21", FIG21.into()),
    ];
    texts
        .into_iter()
        .map(|(name, text)| {
            let s = dsl::parse(&text).unwrap_or_else(|e| panic!("fixture {name}: {e}"));
            (name, s)
        })
        .collect()
}

pub fn fixture(name: &str) -> Option<System> {
    match name {
        "swimming_pool" => Some(gen_swimming_pool(2, 1, 1)),
        "emblem" => Some(gen_emblem([0, 0, 0, 1, 1, 1, 0, 0, 0])),
        _ => fixtures().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s),
    }
}

/// Swimming pool with `a` customers outside, `b` bags and `c` cabins.
pub fn gen_swimming_pool(a: u64, b: u64, c: u64) -> System {
    let mut n = Net::builder();
    n.places(&[
        "Out", "Entered", "WaitBag", "Undress", "InBath", "Dress", "Dressed", "Cabins", "Bags",
    ]);
    n.transitions(&["Enter", "GetK", "GetB", "RelK", "GetK2", "RelB", "RelK2"]);
    n.arc("Out", "Enter", 1).arc("Enter", "Entered", 1);
    n.arc("Entered", "GetK", 1).arc("Cabins", "GetK", 1).arc("GetK", "WaitBag", 1);
    n.arc("WaitBag", "GetB", 1).arc("Bags", "GetB", 1).arc("GetB", "Undress", 1);
    n.arc("Undress", "RelK", 1).arc("RelK", "InBath", 1).arc("RelK", "Cabins", 1);
    n.arc("InBath", "GetK2", 1).arc("Cabins", "GetK2", 1).arc("GetK2", "Dress", 1);
    n.arc("Dress", "RelB", 1).arc("RelB", "Dressed", 1).arc("RelB", "Bags", 1);
    n.arc("Dressed", "RelK2", 1).arc("RelK2", "Out", 1).arc("RelK2", "Cabins", 1);
    let net = n.build().expect("static net");
    let m0 = Marking(vec![a, 0, 0, 0, 0, 0, 0, c, b]);
    System::new(net, m0).expect("marking matches")
}

const EMBLEM_ARCS: [(&str, &str); 20] = [
    ("t0", "p1"),
    ("p1", "t2"),
    ("t0", "p2"),
    ("p2", "t2"),
    ("t2", "p3"),
    ("p3", "t0"),
    ("t2", "p4"),
    ("p4", "t0"),
    ("t0", "p0"),
    ("p0", "t1"),
    ("t1", "p6"),
    ("p6", "t3"),
    ("t1", "p7"),
    ("p7", "t3"),
    ("t3", "p8"),
    ("p8", "t2"),
    ("t2", "p5"),
    ("p5", "t0"),
    ("t3", "p5"),
    ("p5", "t1"),
];

fn emblem_net(keep: &[usize]) -> Net {
    let mut n = Net::builder();
    for &i in keep {
        n.place(format!("p{i}"));
    }
    n.transitions(&["t0", "t1", "t2", "t3"]);
    let kept = |id: &str| !id.starts_with('p') || keep.iter().any(|i| id == format!("p{i}"));
    for (a, b) in EMBLEM_ARCS {
        if kept(a) && kept(b) {
            n.arc(a, b, 1);
        }
    }
    n.build().expect("static net")
}

/// Two interlocked cycles sharing `p5`; `m[i]` tokens on `p_i`.
pub fn gen_emblem(m: [u64; 9]) -> System {
    let keep: Vec<usize> = (0..9).collect();
    System::new(emblem_net(&keep), Marking(m.to_vec())).expect("marking matches")
}

/// The emblem without `p2`, `p4` and `p7`; tokens on p0, p1, p3, p5, p6, p8.
pub fn gen_emblem_reduced(m: [u64; 6]) -> System {
    System::new(emblem_net(&[0, 1, 3, 5, 6, 8]), Marking(m.to_vec())).expect("marking matches")
}
