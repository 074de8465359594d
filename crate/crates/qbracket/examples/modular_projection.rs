//! Project shifted symmetric functions onto the part with modular brackets.

use qbracket::quasimodular::{certify, DEFAULT_MARGIN};
use qbracket::structure::FormalPoly;

fn main() {
    let q = FormalPoly::q0;
    for f in [q(4), q(6), q(3).mul(&q(3)), q(2).mul(&q(4))] {
        let p = f.pi().unwrap().to_lambda();
        let weight = f.weight().unwrap().to_integer().try_into().unwrap();
        let status = if p.is_zero() {
            "zero".to_string()
        } else {
            certify(&p.bracket(20).unwrap(), weight, 1, 0, DEFAULT_MARGIN).unwrap().status.as_str().to_string()
        };
        println!("pi({f}) = {p}  [{status}]");
    }
}
