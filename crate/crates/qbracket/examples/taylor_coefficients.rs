//! Taylor coefficients of 1/Theta at rational translates.

use qbracket::fourier::Translate;
use qbracket::qj::{Generator, Orders};
use qbracket::taylor::{check_delta_identity, check_elliptic_transformation, AtOrigin};
use qbracket::{rat, rat_int};

fn main() {
    for x in [Translate::single(rat_int(0), rat_int(0)), Translate::single(rat_int(0), rat(1, 2))] {
        let res = check_elliptic_transformation(&x, &[-1, 0, 1], 3, &rat_int(5)).unwrap();
        let held = res.iter().filter(|(_, ok)| *ok).count();
        println!("elliptic transformation at ({}, {}): {held}/{} shifts", x.lambda[0], x.mu[0], res.len());
    }

    let f1 = Generator::ThetaInv(0).build(1, Orders { q: 24, w: 6 }).unwrap();
    let data = AtOrigin::new(&f1);
    for l in 0..=3 {
        for r in 0..=2 {
            let c = check_delta_identity(&data, l, r, true, 10).unwrap();
            println!("l = {l}, r = {r}: holds {} ({})", c.holds, c.status.as_str());
        }
    }
}
