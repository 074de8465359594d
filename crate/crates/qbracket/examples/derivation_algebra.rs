//! Commutators of the derivations on random quasi-Jacobi forms.

use qbracket::qj::{commutator_relations, random_element, Orders};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let f = random_element(&mut rng, Orders { q: 4, w: 7 }).unwrap();
        for (name, ok) in commutator_relations(&f) {
            println!("{name:<24} {}", if ok { "holds" } else { "FAILS" });
        }
        println!();
    }
}
