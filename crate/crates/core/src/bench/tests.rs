use super::*;

fn quick_opts() -> BenchOptions {
    let mut opts = BenchOptions::reduced(BackendKind::Clear);
    opts.trials = 25;
    opts
}

#[test]
fn table1_rows_and_orderings() {
    let report = run_table1(quick_opts()).unwrap();
    let names: Vec<&str> = report.rows.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "nbit_add",
            "twos_complement",
            "abs_value",
            "nbit_sub",
            "nbit_mult",
            "manhattan_distance",
            "euclidean_distance"
        ]
    );
    let t = |name: &str| report.median(name).unwrap();
    assert!(t("nbit_add") < t("nbit_sub"), "add {} !< sub {}", t("nbit_add"), t("nbit_sub"));
    assert!(t("nbit_sub") < t("nbit_mult"), "sub {} !< mult {}", t("nbit_sub"), t("nbit_mult"));
    assert!(t("manhattan_distance") < t("euclidean_distance"));
}

#[test]
fn table2_rows_and_orderings() {
    let report = run_table2(quick_opts()).unwrap();
    let names: Vec<&str> = report.rows.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["function_f", "function_g", "protocol_p", "protocol_p_with_encdec"]);
    let t = |name: &str| report.median(name).unwrap();
    assert!(t("function_g") < t("function_f"));
}

#[test]
fn csv_has_the_pinned_columns() {
    let mut opts = quick_opts();
    opts.trials = 3;
    let report = run_table1(opts).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("name,backend,n,w,trials,median_ns"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("nbit_add,clear,8,8,3,"));
    let text = report.render_text();
    assert!(text.contains("nbit_add"));
}

#[test]
fn exhausted_budget_marks_timeout() {
    let mut opts = quick_opts();
    opts.row_timeout = Duration::from_secs(0);
    let report = run_table1(opts).unwrap();
    assert!(report.rows.iter().all(|r| r.median_ns.is_none()));
    assert!(report.to_csv().contains("TIMEOUT"));
    assert!(report.render_text().contains("TIMEOUT"));
}
