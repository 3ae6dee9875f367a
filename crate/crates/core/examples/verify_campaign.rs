// Run a randomized verification campaign.
//
// `cargo run --release --example verify_campaign -- [cases] [seed] [size]`

use rdfview::fixtures;
use rdfview::verify::run_campaign;

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("numeric argument"));
    let cases = args.next().unwrap_or(200) as usize;
    let seed = args.next().unwrap_or(42);
    let size = args.next().unwrap_or(8) as usize;

    let report = run_campaign(&fixtures::rules(), cases, seed, size).expect("campaign runs");
    println!("{}/{} cases passed", report.passed, report.cases);
    for (rel, n) in &report.relations {
        println!("  updates on {rel}: {n}");
    }
    for f in &report.failures {
        println!(
            "FAILED seed {}: missing {:?} spurious {:?}",
            f.seed, f.missing, f.spurious
        );
    }
    std::process::exit(if report.all_passed() { 0 } else { 1 });
}
