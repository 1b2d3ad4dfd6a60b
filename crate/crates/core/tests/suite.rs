use zero_lab::suite::*;

fn run(filter: &str, jobs: usize) -> Vec<CriterionResult> {
    let mut r = run_suite(&SuiteOptions { filter: Some(filter.into()), seed: 0, jobs }).unwrap();
    for c in &mut r {
        c.seconds = 0.0;
    }
    r
}

#[test]
fn filter_selects_by_tag_and_id() {
    let ids = |f: &str| CRITERIA.iter().filter(|c| c.matches(f)).map(|c| c.id).collect::<Vec<_>>();
    assert_eq!(ids("stefan"), ["A6", "A7", "A8"]);
    assert_eq!(ids("a10"), ["A10"]);
    assert_eq!(ids("").len(), 10);
    assert!(ids("no-such-thing").is_empty());
}

#[test]
fn thread_count_does_not_change_results() {
    let one = run("drop", 1);
    assert_eq!(one.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["A2", "A3"]);
    assert_eq!(one, run("drop", 4));
}

#[test]
fn robin_isolation_passes() {
    let r = run("A4", 2);
    assert_eq!(r.len(), 1);
    assert!(r[0].passed, "{}", r[0]);
    assert!(render_table(&r).ends_with("1/1 criteria passed\n"));
}
