//! Double moment functions: projections and the product with T_{1,1}.

use qbracket::bracket::odot_all;
use qbracket::eisenstein::g_series;
use qbracket::structure::{t_projection_law, TPoly};
use qbracket::{qbracket, Family};

fn main() {
    let order = 6;
    for (k, l) in [(1, 3), (2, 2), (3, 1), (2, 4)] {
        let p = TPoly::t(k, l).pi();
        let b = p.bracket(order).unwrap();
        let law = t_projection_law(k, l, order as i64).unwrap();
        println!("pi(T{k}{l}) = {p}");
        println!("  bracket {b}, matches the Serre law: {}", b.eq_common(&law));
    }

    let t11 = Family::t(1, 1).function().unwrap();
    let f = Family::q(3).function().unwrap();
    let lhs = qbracket(&odot_all(&[t11, f.clone()], order).unwrap(), order).unwrap();
    let rhs = g_series(2, order as i64 + 1).mul(&qbracket(&f, order).unwrap());
    println!("<T11 (.) Q3> = G2 <Q3>: {}", lhs.eq_common(&rhs));
}
