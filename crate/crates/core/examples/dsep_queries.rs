//! d-separation queries on a DAG and on a pattern, with both engines.

use latentpc::dsep::{d_separated, d_separated_enum, d_separated_reach, SepQuery};
use latentpc::format::parse_pattern;
use latentpc::Dag;

fn main() {
    let g = Dag::build(
        ["A", "B", "C", "D", "E"],
        &[("A", "C"), ("B", "C"), ("C", "D"), ("D", "E")],
    )
    .unwrap();
    let queries: [(&str, &str, &[&str]); 5] = [
        ("A", "B", &[]),
        ("A", "B", &["C"]),
        ("A", "B", &["E"]),
        ("A", "E", &["D"]),
        ("A", "E", &[]),
    ];
    for (x, y, given) in queries {
        let q = SepQuery::by_name(&g, x, y, given).unwrap();
        let reach = d_separated_reach(&g, &q).unwrap();
        assert_eq!(reach, d_separated_enum(&g, &q).unwrap());
        let verdict = if reach { "separated" } else { "dependent" };
        println!("{x} _||_ {y} | {{{}}}: {verdict}", given.join(","));
    }

    let p = parse_pattern("X -- A\nA -> Y\nY <-> W\n").unwrap();
    for (x, y, given) in [("X", "W", &[][..]), ("X", "W", &["Y"][..]), ("X", "Y", &["A"][..])] {
        let q = SepQuery::by_name(&p, x, y, given).unwrap();
        println!("pattern: {x} _||_ {y} | {{{}}}: {}", given.join(","), d_separated(&p, &q).unwrap());
    }
}
