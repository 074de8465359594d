//! The q-bracket of a few partition functions, compared with Eisenstein series.

use qbracket::eisenstein::g_series;
use qbracket::{qbracket, Family, PartitionFunction};

fn main() {
    let order = 8;
    let q2 = qbracket(&Family::q(2).function().unwrap(), order).unwrap();
    println!("<Q2>_q = {q2}");

    let h2 = qbracket(&Family::h(2).function().unwrap(), order).unwrap();
    let g2 = g_series(2, order as i64 + 1);
    println!("<H2>_q = {h2}");
    println!("equals G2: {}", h2.eq_common(&g2));

    let q3q3 = PartitionFunction::product(&[Family::q(3).function().unwrap(), Family::q(3).function().unwrap()]);
    println!("<Q3 Q3>_q = {}", qbracket(&q3q3, order).unwrap());
}
