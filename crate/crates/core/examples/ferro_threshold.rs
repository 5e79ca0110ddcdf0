//! Ferromagnetic ordering threshold of the d-ary tree, next to the closed
//! forms available for q = 2 and for d = 2.

use potts_tree::channel::PottsChannel;
use potts_tree::thresholds::{binary_tree_ferro_threshold, ferro_threshold, ising_ferro_threshold, psi};

fn main() -> potts_tree::Result<()> {
    println!("  d   q   beta_ferro   closed form");
    for d in 2..=5 {
        for q in 2..=6 {
            let beta = ferro_threshold(d, q)?;
            let closed = match (q, d) {
                (2, _) => format!("{:.8}", ising_ferro_threshold(d)),
                (_, 2) => format!("{:.8}", binary_tree_ferro_threshold(q)),
                _ => "-".into(),
            };
            println!("{d:>3} {q:>3}   {beta:.8}   {closed}");
        }
    }

    // the all-equal boundary drives X -> d·ψ(X); just above the threshold
    // the iteration settles at a positive fixed point
    let (d, q) = (2, 3);
    let ch = PottsChannel::new(q, ferro_threshold(d, q)? + 0.01)?;
    let mut x = f64::INFINITY;
    for _ in 0..200 {
        x = d as f64 * psi(x, &ch);
    }
    println!("fixed point at beta_ferro + 0.01 (d={d}, q={q}): X = {x:.6}");
    Ok(())
}
