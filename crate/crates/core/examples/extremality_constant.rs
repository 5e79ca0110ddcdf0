//! The extremality constant over the whole simplex and on its symmetric
//! slice, and its excess over the Kesten–Stigum value λ₂.

use potts_tree::channel::PottsChannel;
use potts_tree::thresholds::{cbar_detailed, chat_detailed, OptimizerSettings};

fn main() -> potts_tree::Result<()> {
    let s = OptimizerSettings::default();
    println!("  q  beta    lambda2     cbar        chat        cbar/lambda2-1  slice argmax x");
    for q in [2, 3, 4, 5] {
        for beta in [0.25, 0.5, 1.0, 1.5, 2.5] {
            let ch = PottsChannel::new(q, beta)?;
            let full = cbar_detailed(&ch, &s)?;
            let slice = chat_detailed(&ch, &s);
            println!(
                "{q:>3}  {beta:<5} {:.8}  {:.8}  {:.8}  {:>14.6}  {:+.5}",
                ch.lambda2(),
                full.value,
                slice.value,
                full.value / ch.lambda2() - 1.0,
                slice.x
            );
        }
    }

    let ch = PottsChannel::new(4, 1.0)?;
    let best = cbar_detailed(&ch, &s)?;
    println!("q=4, beta=1: maximizer {:?} after {} evaluations", best.argmax.entries(), best.evaluations);
    Ok(())
}
