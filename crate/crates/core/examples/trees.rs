//! Regular, spherically symmetric and Galton–Watson trees, and the text
//! format they serialize to.

use potts_tree::tree::{
    galton_watson_tree, regular_tree, spherically_symmetric_tree, OffspringDistribution, TreeInstance,
};

fn main() -> potts_tree::Result<()> {
    let t = regular_tree(2, 3)?;
    println!("binary tree of depth 3: {} nodes, {} on the boundary", t.len(), t.boundary().len());

    let t = spherically_symmetric_tree(&[2, 3])?;
    println!("spherically symmetric [2,3]: {} nodes", t.len());
    print!("{}", t.to_text());

    let law = OffspringDistribution::parse("0:0.25,2:0.5,3:0.25")?;
    println!("offspring mean {}, variance {}", law.mean(), law.variance());
    for seed in 0..5 {
        let t = galton_watson_tree(&law, 6, seed)?;
        let sizes: Vec<usize> = (0..=6).map(|k| t.generation(k).len()).collect();
        println!("seed {seed}: generation sizes {sizes:?}{}", if t.is_extinct() { " (extinct)" } else { "" });
        assert_eq!(TreeInstance::from_text(&t.to_text())?, t);
    }
    Ok(())
}
