//! Extremality threshold β_c for regular and Galton–Watson trees, with the
//! ferromagnetic and Kesten–Stigum thresholds alongside.

use potts_tree::thresholds::{threshold_report, OptimizerSettings};
use potts_tree::tree::OffspringDistribution;

fn main() -> potts_tree::Result<()> {
    let s = OptimizerSettings::default();
    let trees = [
        ("binary", OffspringDistribution::deterministic(2)),
        ("ternary", OffspringDistribution::deterministic(3)),
        ("1 or 3 children", OffspringDistribution::parse("1:0.5,3:0.5")?),
        ("0, 2 or 4 children", OffspringDistribution::parse("0:0.2,2:0.5,4:0.3")?),
    ];
    for q in [3, 4] {
        for (name, law) in &trees {
            let r = threshold_report(q, law, &s)?;
            let ferro = r.beta_ferro.map_or("-".to_string(), |b| format!("{b:.5}"));
            println!(
                "q={q} {name:<20} E[d]={:.2}  beta_ferro={ferro:<8} beta_c={:.5} (lambda_c={:.5})  beta_ks={:.5}",
                r.offspring_mean, r.beta_c, r.lambda_c, r.beta_ks
            );
        }
    }
    Ok(())
}
