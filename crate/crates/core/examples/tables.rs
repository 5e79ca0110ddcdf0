//! The two q = 5 reference tables: conversions of simulated reconstruction
//! thresholds, and the extremality bounds computed from scratch.

use potts_tree::tables::{compute_table2, reproduce_table1};
use potts_tree::thresholds::OptimizerSettings;

fn main() -> potts_tree::Result<()> {
    println!("reconstruction thresholds (simulated eps_r, converted)");
    println!("  d   eps_r     beta_r    lambda_r");
    for r in reproduce_table1()? {
        println!("{:>3}   {:<8}  {:.4}    {:.4}", r.d, r.epsilon_r, r.beta_r, r.lambda_r);
    }
    println!();
    println!("extremality bounds");
    println!("  d   beta_c     lambda_c");
    for r in compute_table2(5, &OptimizerSettings::default())? {
        println!("{:>3}   {:.5}    {:.5}", r.d, r.beta_c, r.lambda_c);
    }
    Ok(())
}
