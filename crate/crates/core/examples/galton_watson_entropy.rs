//! Entropy estimates on Galton–Watson trees: a fresh tree per trial
//! (annealed) against one fixed tree (quenched), with a JSON dump.

use potts_tree::broadcast::{entropy_mc, with_threads, TreeSpec};
use potts_tree::channel::PottsChannel;
use potts_tree::tree::OffspringDistribution;

fn main() -> potts_tree::Result<()> {
    let law = OffspringDistribution::parse("1:0.5,3:0.5")?;
    let ch = PottsChannel::new(3, 0.9)?;
    for quenched in [false, true] {
        let spec = TreeSpec::GaltonWatson { offspring: law.clone(), quenched };
        let e = entropy_mc(&spec, &ch, 6, 20_000, 11)?;
        println!("{}", e.to_json());
    }

    // the worker count never changes the result
    let spec = TreeSpec::GaltonWatson { offspring: law, quenched: false };
    let one = with_threads(Some(1), || entropy_mc(&spec, &ch, 5, 5_000, 3))?;
    let four = with_threads(Some(4), || entropy_mc(&spec, &ch, 5, 5_000, 3))?;
    assert_eq!(one.to_json(), four.to_json());
    println!("1 and 4 workers agree: {}", one.to_json());
    Ok(())
}
