//! Sample the broadcast chain on a tree, then recover the root's
//! conditional law from the boundary by belief propagation.

use potts_tree::broadcast::{bp_all_messages, bp_root_marginal, broadcast, RootSymbol};
use potts_tree::channel::PottsChannel;
use potts_tree::tree::regular_tree;

fn main() -> potts_tree::Result<()> {
    let tree = regular_tree(2, 6)?;
    for beta in [0.5, 1.0, 2.0] {
        let ch = PottsChannel::new(3, beta)?;
        println!("beta = {beta}");
        for seed in 0..3 {
            let spins = broadcast(&tree, &ch, RootSymbol::Fixed(0), seed)?;
            let p = bp_root_marginal(&tree, &ch, spins.boundary(&tree))?;
            let p: Vec<String> = p.entries().iter().map(|x| format!("{x:.4}")).collect();
            println!("  seed {seed}: P(root | boundary) = [{}]", p.join(", "));
        }
    }

    // an all-equal boundary: messages grow toward the root
    let ch = PottsChannel::new(3, 1.2)?;
    let boundary = vec![2; tree.boundary().len()];
    let msgs = bp_all_messages(&tree, &ch, &boundary)?;
    for k in (0..tree.depth()).rev() {
        let v = tree.generation(k).start;
        println!("generation {k}: X^2_0 = {:.6}", msgs[v].ratio(2, 0));
    }
    Ok(())
}
