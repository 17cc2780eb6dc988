//! Full-scale acceptance run: every numbered criterion prints one line.

use arclab::verify::{run_all, Effort};

#[test]
fn acceptance_suite() {
    let reports = run_all(Effort::Full).expect("suite ran to completion");
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    assert!(
        failed.is_empty(),
        "{} criteria failed:\n{}",
        failed.len(),
        failed.iter().map(|r| r.line()).collect::<Vec<_>>().join("\n")
    );
}
