use frac_rabi::checks::{run, CHECK_IDS};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for id in CHECK_IDS {
        let report = run(id);
        println!("{report}");
        if !report.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
