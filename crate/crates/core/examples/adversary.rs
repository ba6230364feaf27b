//! An adaptive adversary that ends the sequence right after the pick (or at
//! ⌊√n⌋+1) holds every rank-based rule to about 1/√n.

use random_horizon::sim::{adversary_game, StockPolicy};

fn main() -> random_horizon::Result<()> {
    println!(
        "{:>6}{:>10}{:>10}{:>10}{:>10}",
        "n", "1/√n", "classical", "minimax", "sqrt"
    );
    for n in [16, 64, 256, 1024] {
        let mut row = format!("{n:>6}{:>10.4}", 1.0 / (n as f64).sqrt());
        for name in ["classical", "minimax", "sqrt"] {
            let s = adversary_game(n, &StockPolicy::by_name(name, n)?, 50_000, 9)?;
            row.push_str(&format!("{:>10.4}", s.rate));
        }
        println!("{row}");
    }
    Ok(())
}
