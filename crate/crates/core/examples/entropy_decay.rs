//! Monte-Carlo boundary entropy and root-deviation probe on the binary
//! tree, on both sides of the extremality threshold (q = 3).

use potts_tree::broadcast::{entropy_mc, root_deviation_probe, TreeSpec};
use potts_tree::channel::PottsChannel;

fn main() -> potts_tree::Result<()> {
    let spec = TreeSpec::Regular(2);
    let trials = 20_000;
    for beta in [0.9, 1.3, 2.0] {
        let ch = PottsChannel::new(3, beta)?;
        println!("beta = {beta}");
        for depth in [1, 2, 4, 6, 8] {
            let e = entropy_mc(&spec, &ch, depth, trials, 1)?;
            println!("  N={depth:<2} m = {:.5} ± {:.5}", e.mean, e.std_error);
        }
        for p in root_deviation_probe(&spec, &ch, &[2, 4, 6, 8], trials, 1, 0.05)? {
            println!("  N={:<2} P(|P(root=0|boundary) - 1/3| >= 0.05) = {:.4} ± {:.4}", p.depth, p.fraction, p.std_error);
        }
    }
    Ok(())
}
