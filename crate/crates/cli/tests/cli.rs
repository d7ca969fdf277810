use std::path::Path;

use tempfile::TempDir;
use tricorner::StructuredMatrix;
use tricorner_cli::{run, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn tricorner(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("tricorner").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
}

fn drop_elapsed(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split(',').collect();
            cols.remove(4);
            cols.join(",")
        })
        .collect()
}

#[test]
fn gen_then_det_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.txt");
    let m = m.to_str().unwrap();
    let args = [
        "gen",
        "--n",
        "8",
        "--margin",
        "0.5",
        "--corners",
        "both",
        "--seed",
        "42",
        "--out",
        m,
    ];
    assert_eq!(tricorner(&args).code, EXIT_OK);
    let first = tricorner(&["det", m]);
    assert_eq!(first.code, EXIT_OK);
    for key in ["sign ", "value ", "log_abs "] {
        field(&first.out, key);
    }
    assert_eq!(tricorner(&args).code, EXIT_OK);
    assert_eq!(tricorner(&["det", m]).out, first.out);
}

#[test]
fn solve_recovers_ones() {
    let dir = TempDir::new().unwrap();
    let m = StructuredMatrix::random_dominant(12, 0.3, tricorner::Corners::Both, 3).unwrap();
    let rhs = m.matvec(&[1.0; 12]).unwrap();
    let mp = write(&dir, "m.txt", &m.to_text());
    let rp = write(&dir, "rhs.txt", &tricorner::format_vector(&rhs));
    for extra in [None, Some("--extended")] {
        let mut args = vec!["solve", mp.as_str(), rp.as_str()];
        args.extend(extra);
        let o = tricorner(&args);
        assert_eq!(o.code, EXIT_OK, "{}", o.err);
        for v in field(&o.out, "x ").split_whitespace() {
            assert!((v.parse::<f64>().unwrap() - 1.0).abs() <= 1e-10);
        }
        assert!(field(&o.out, "residual_inf ").parse::<f64>().unwrap() <= 1e-12);
    }
}

#[test]
fn singular_det_exits_numerical() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "s.txt", "3\n1 2 1\n1 1\n1 1\n0 0\n");
    let o = tricorner(&["det", &p]);
    assert_eq!(o.code, EXIT_NUMERICAL);
    assert!(o.err.contains("singular (mu_n = 0)"), "{}", o.err);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(tricorner(&["nope"]).code, EXIT_USAGE);
    assert_eq!(tricorner(&["gen"]).code, EXIT_USAGE);
    assert_eq!(tricorner(&["--help"]).code, EXIT_OK);
    let bad = write(&dir, "bad.txt", "3\n1 2\n");
    assert_eq!(tricorner(&["det", &bad]).code, EXIT_USAGE);
    assert_eq!(tricorner(&["det", "/nonexistent/m.txt"]).code, EXIT_USAGE);
    let corners = write(&dir, "c.txt", "2\n1 1\n1\n1\n1 0\n");
    assert_eq!(tricorner(&["det", &corners]).code, EXIT_USAGE);
    let breakdown = write(&dir, "b.txt", "3\n1 1 5\n1 1\n1 1\n0 0\n");
    let o = tricorner(&["factor", &breakdown]);
    assert_eq!(o.code, EXIT_NUMERICAL);
    assert!(o.err.contains("breakdown"));
    let big = StructuredMatrix::random_dominant(1000, 0.1, tricorner::Corners::None, 1).unwrap();
    let big = write(&dir, "big.txt", &big.to_text());
    assert_eq!(tricorner(&["det", &big]).code, EXIT_NUMERICAL);
    assert_eq!(tricorner(&["det", "--extended", &big]).code, EXIT_OK);
}

#[test]
fn factor_inv_and_pinv_print() {
    let dir = TempDir::new().unwrap();
    let e1 = write(&dir, "e1.txt", "3\n4 4 4\n1 1\n1 1\n0 0\n");
    let o = tricorner(&["factor", &e1]);
    assert_eq!(field(&o.out, "lambda "), "1 -4 15");
    assert_eq!(field(&o.out, "mu "), "56");

    let inv_path = dir.path().join("inv.txt");
    let o = tricorner(&["inv", &e1, "--out", inv_path.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    let text = std::fs::read_to_string(&inv_path).unwrap();
    assert!(text.starts_with("3 3\n"));
    let first: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((first - 15.0 / 56.0).abs() <= 1e-15);

    let rhs = write(&dir, "r.txt", "5 6 5 0 0");
    let o = tricorner(&["pinv-solve", &e1, &rhs]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(field(&o.out, "x "), "1 1 1");
    let short = write(&dir, "short.txt", "5 6");
    assert_eq!(tricorner(&["pinv-solve", &e1, &short]).code, EXIT_USAGE);
}

#[test]
fn bench_error_csv() {
    let o = tricorner(&[
        "bench-error",
        "--orders",
        "4",
        "--trials",
        "1",
        "--seed",
        "7",
    ]);
    assert_eq!(o.code, EXIT_OK);
    let lines: Vec<&str> = o.out.lines().collect();
    assert_eq!(
        lines[0],
        "n,method,trial,seed,elapsed_ns,flops,eps_r,overflow"
    );
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!((cols[0], cols[1], cols[2]), ("4", "structured", "0"));
    assert!(cols[6].parse::<f64>().unwrap() <= 1e-10);
    assert_eq!(lines.len(), 3);

    let empty = tricorner(&["bench-error", "--orders", "4,8", "--trials", "0"]);
    assert_eq!(
        empty.out,
        "n,method,trial,seed,elapsed_ns,flops,eps_r,overflow\n"
    );

    let args = [
        "bench-error",
        "--orders",
        "4,16",
        "--trials",
        "3",
        "--seed",
        "11",
    ];
    assert_eq!(
        drop_elapsed(&tricorner(&args).out),
        drop_elapsed(&tricorner(&args).out)
    );
    assert_eq!(
        tricorner(&["bench-error", "--orders", "1"]).code,
        EXIT_USAGE
    );
}

#[test]
fn bench_error_records_overflow() {
    let o = tricorner(&[
        "bench-error",
        "--orders",
        "1200",
        "--trials",
        "1",
        "--margin",
        "0.1",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let row: Vec<&str> = o.out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[1], row[6], row[7]), ("structured", "", "true"));
}

#[test]
fn bench_time_and_flops() {
    let o = tricorner(&[
        "bench-time",
        "--orders",
        "16,32",
        "--trials",
        "1",
        "--methods",
        "structured,structured-solve,lu,gauss-jordan,pinv-normal-eq",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    for tag in [
        "structured",
        "structured_solve",
        "lu",
        "gauss_jordan",
        "pinv_normal_eq",
    ] {
        assert!(
            o.out.lines().any(|l| l.split(',').nth(1) == Some(tag)),
            "{tag}"
        );
        assert!(o.err.contains(&format!("slope {tag}:")));
    }

    let o = tricorner(&["flops", "--orders", "10,100", "--corners", "none"]);
    assert_eq!(o.code, EXIT_OK);
    let row: Vec<i64> = o
        .out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 10);
    assert!(row[1] <= 62);
}

#[test]
fn train_demo_e1_style() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "t.csv", "x1,x2,y\n0.1,0.2,1\n0.5,-0.3,2\n0.9,0.4,3\n");
    let model = dir.path().join("model.txt");
    let args = [
        "train-demo",
        csv.as_str(),
        "--seed",
        "5",
        "--out",
        model.to_str().unwrap(),
    ];
    let o = tricorner(&args);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    assert!(field(&o.out, "train_loss ").parse::<f64>().unwrap() <= 1e-10);
    assert!(field(&o.out, "dense_train_loss ").parse::<f64>().unwrap() <= 1e-10);
    assert!(
        field(&o.out, "weight_agreement_max_abs ")
            .parse::<f64>()
            .unwrap()
            <= 1e-10
    );
    assert!(o.out.contains("gradient_steps 0"));
    assert!(Path::new(&model).exists());

    let again = tricorner(&args);
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("elapsed"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&again.out), strip(&o.out));

    let empty = write(&dir, "e.csv", "");
    assert_eq!(tricorner(&["train-demo", &empty]).code, EXIT_USAGE);
}
