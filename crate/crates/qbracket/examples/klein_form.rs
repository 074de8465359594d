//! The bracket of Q_1(., a) times Theta(tau, a) is a root of unity.

use qbracket::npoint::klein_product;
use qbracket::rat;

fn main() {
    for a in [rat(1, 2), rat(1, 3), rat(1, 4), rat(2, 5)] {
        let c = klein_product(&a, 6).unwrap();
        let c0 = c.coeff_int(0).unwrap();
        println!("a = {a}: {c}  (constant in Q(zeta_{}))", c0.minimal_modulus());
    }
}
