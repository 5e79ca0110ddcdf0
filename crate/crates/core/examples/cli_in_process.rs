//! Drive the command-line front end from code; the same strings are
//! printed by the `potts-tree` binary.

use potts_tree::cli::execute;

fn main() {
    let runs: [&[&str]; 5] = [
        &["potts-tree", "thresholds", "--q", "3", "--d", "2"],
        &["potts-tree", "ks", "--q", "4", "--d", "3"],
        &["potts-tree", "tables", "--table", "1"],
        &["potts-tree", "simulate", "--q", "3", "--d", "2", "--beta", "0.8", "--depth", "1", "--trials", "20000", "--seed", "7"],
        &["potts-tree", "tree-dump", "--generations", "2,1"],
    ];
    for args in runs {
        println!("$ {}", args.join(" "));
        match execute(args) {
            Ok(out) => print!("{out}"),
            Err(e) => println!("exit {}: {e}", e.exit_code()),
        }
    }
}
