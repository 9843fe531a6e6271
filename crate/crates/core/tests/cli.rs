use std::process::Command;

use hartogs_lab::cli::{run, CommandResult, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION};
use hartogs_lab::hartogs::CSV_HEADER;

fn hartogs(args: &[&str]) -> CommandResult {
    run(std::iter::once("hartogs").chain(args.iter().copied()))
}

fn rows(out: &str) -> Vec<Vec<String>> {
    out.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn theta_eval_prints_one_row() {
    let r = hartogs(&["theta", "eval", "--at", "0.3+0.2i"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next(), Some("re,im,log_abs"));
    let row = &rows(&r.stdout)[0];
    let (re, im, la): (f64, f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap(), row[2].parse().unwrap());
    assert!((re.hypot(im).ln() - la).abs() < 1e-12);
}

#[test]
fn factoradic_digits_reconstruct_the_seed() {
    let r = hartogs(&["dioph", "factoradic", "--x", "sqrt(2)", "--terms", "15"]);
    assert_eq!(r.code, EXIT_OK);
    let mut sum = 0.0;
    let mut fact = 1.0;
    for (k, row) in rows(&r.stdout).iter().enumerate() {
        fact *= (k + 1) as f64;
        sum += row[1].parse::<f64>().unwrap() / fact;
    }
    assert!((sum - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn terminate_reports_the_factorial_index() {
    let r = hartogs(&["cex", "terminate", "--x", "1/3", "--y", "5/8"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.stdout, "x,y,n0\n1/3,5/8,4\n");
}

#[test]
fn scan_emits_the_csv_schema() {
    let r = hartogs(&["cex", "scan", "--grid", "0:1/2:0:1/3:2", "--terms", "16"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next(), Some(CSV_HEADER));
    let body = rows(&r.stdout);
    assert_eq!(body.len(), 4);
    assert!(body.iter().all(|row| row[2] == "infinite"));
}

#[test]
fn certify_lists_certified_witnesses() {
    let r = hartogs(&["cex", "certify", "--x", "sqrt(2)", "--y", "0", "--max-n", "8"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let body = rows(&r.stdout);
    assert!(body.len() >= 2);
    assert!(body.iter().all(|row| row.last().map(String::as_str) == Some("true")));
}

#[test]
fn rational_point_cannot_be_certified() {
    assert_eq!(hartogs(&["cex", "certify", "--x", "1/2", "--y", "0"]).code, EXIT_PRECONDITION);
}

#[test]
fn parse_errors_carry_offsets() {
    let r = hartogs(&["alg", "lift", "--phi", "X^", "--seed", "1"]);
    assert_eq!(r.code, EXIT_PARSE);
    assert!(r.stderr.contains('2'), "{}", r.stderr);
    assert_eq!(hartogs(&["theta", "eval", "--at", "1/0"]).code, EXIT_PARSE);
    assert_eq!(hartogs(&["theta", "eval", "--bogus"]).code, EXIT_PARSE);
}

#[test]
fn nonpositive_tau_is_a_precondition_violation() {
    assert_eq!(hartogs(&["theta", "eval", "--tau0", "1-1i", "--at", "0"]).code, EXIT_PRECONDITION);
}

#[test]
fn exact_lift_prints_binomial_coefficients() {
    let r = hartogs(&["alg", "lift", "--phi", "X^2 - (1 + z*w)", "--seed", "1", "--terms", "3"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(
        r.stdout,
        "order 3\n0 num 0:1 den 0:1\n1 num 1:1/2 den 0:1\n2 num 2:-1/8 den 0:1\n3 num 3:1/16 den 0:1\n"
    );
}

#[test]
fn radius_check_passes_at_moderate_order() {
    let r = hartogs(&["alg", "check-theorem1", "--phi", "X^2 - 1 - z*w", "--at", "2", "--terms", "256"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let row = &rows(&r.stdout)[0];
    assert_eq!(row[1], "finite");
    assert_eq!(row[5], "true");
}

#[test]
fn output_is_deterministic() {
    let args = ["cex", "scan", "--grid", "0:sqrt(2):0:1/2:3", "--terms", "20"];
    assert_eq!(hartogs(&args).stdout, hartogs(&args).stdout);
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("hartogs-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let r = hartogs(&["dioph", "witnesses", "--x", "sqrt(3)", "--max-n", "10", "--out", p]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text, hartogs(&["dioph", "witnesses", "--x", "sqrt(3)", "--max-n", "10"]).stdout);
}

#[test]
fn binary_exit_codes_match_the_library() {
    let bin = env!("CARGO_BIN_EXE_hartogs");
    let ok = Command::new(bin).args(["cex", "terminate", "--x", "1/6", "--y", "0"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), "x,y,n0\n1/6,0,3\n");
    let bad = Command::new(bin).args(["cex", "terminate", "--x", "sqrt(2)", "--y", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_PRECONDITION));
}
