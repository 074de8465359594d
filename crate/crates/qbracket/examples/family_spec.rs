//! Parse family specs and bracket them, as the command line does.

use qbracket::grammar::Expr;
use qbracket::qbracket;

fn main() {
    let order = 6;
    for spec in ["Q(2)", "Q(4) * 1/2 * Q(2) * Q(2)", "H(4; 2)", "Todot[T(1,1), Q(2)]", "Q(1; a=1/3)", "Q(2"] {
        match Expr::parse(spec) {
            Ok(e) => {
                let f = e.function(order).unwrap();
                println!("{e} (weight {}, level {}): {}", e.weight(), e.level(), qbracket(&f, order).unwrap());
            }
            Err(err) => println!("{spec}: {err}"),
        }
    }
}
