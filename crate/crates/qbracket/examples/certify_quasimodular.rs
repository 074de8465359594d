//! Decide whether brackets are quasimodular, and of which depth.

use qbracket::quasimodular::{certify, DEFAULT_MARGIN};
use qbracket::{qbracket, Family, PartitionFunction};

fn main() {
    let order = 24;
    let cases = [(vec![2], 1), (vec![3, 3], 3), (vec![4], 2), (vec![2, 2], 0)];
    for (ks, depth) in cases {
        let fs: Vec<_> = ks.iter().map(|&k| Family::q(k).function().unwrap()).collect();
        let series = qbracket(&PartitionFunction::product(&fs), order).unwrap();
        let weight = ks.iter().sum();
        let c = certify(&series, weight, 1, depth, DEFAULT_MARGIN).unwrap();
        println!("Q{ks:?} weight {weight} depth <= {depth}: {} {}", c.status.as_str(), c.to_json()["basis"]);
    }
}
