//! Partitions of 5 with their hook lengths and the values of Q_2, Q_3 and H_2.

use qbracket::partition::partitions_of;
use qbracket::Family;

fn main() {
    let families = [Family::q(2), Family::q(3), Family::h(2)];
    for p in partitions_of(5) {
        let values: Vec<String> = families.iter().map(|f| format!("{f} = {}", f.eval(&p).expect("valid family"))).collect();
        println!("{p:<12} hooks {:?}  {}", p.hooks(), values.join(", "));
    }
}
