//! Runs the structural checks on the bundled instance files.
//!
//! cargo run --example validate_instance [PATH...]

use std::path::PathBuf;

use peakrl::envs::load_instance;
use peakrl::experiment::validate_instance;

fn main() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        paths = ["running_example.json", "infeasible.json", "disconnected.json", "bad_kernel.json", "wireless.json"]
            .iter()
            .map(|f| data.join(f))
            .collect();
    }
    for path in paths {
        println!("== {}", path.display());
        let inst = match load_instance(&path) {
            Ok(inst) => inst,
            Err(e) => {
                println!("   rejected: {e}\n");
                continue;
            }
        };
        match validate_instance(&inst) {
            Ok(report) => {
                for c in &report.checks {
                    println!("   {:<22} {:?} {}", c.name, c.status, c.detail);
                }
                println!("   exit code {}\n", report.exit.code());
            }
            Err(e) => println!("   error: {e}\n"),
        }
    }
}
