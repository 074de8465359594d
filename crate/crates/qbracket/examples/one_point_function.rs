//! Taylor coefficients of the bracket of W(z) against those of 1/Theta.

use qbracket::jet::{Jet, Shape};
use qbracket::npoint::{bloch_okounkov_brackets, bloch_okounkov_one_point, Truncs};
use qbracket::rat_int;

fn main() {
    let t = Truncs { q: 6, j: 3 };
    let a = [rat_int(0)];
    let brackets = bloch_okounkov_brackets(&a, t).unwrap();
    let theta = Jet::univariate(1, Shape::Box, 0, &bloch_okounkov_one_point(&a[0], t).unwrap());
    for k in -1..t.j {
        println!("w^{k:<2} bracket side {}", brackets.coeff(&[k]).unwrap());
        println!("     theta side   {}", theta.coeff(&[k]).unwrap());
    }
    println!("agree: {}", brackets.equal_on_box(&theta, &[-1], &[t.j], &t.q_order()).unwrap());
}
