use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use wrongsmith::align::label_tokens;
use wrongsmith::corpus::{format_labeled, format_parallel_tsv, read_parallel_tsv};
use wrongsmith::eval::DetectionMetrics;
use wrongsmith::rng::seeded;
use wrongsmith::toy::ToyLanguage;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wrongsmith"));
    cmd.env_remove("WRONGSMITH_SEED").env("RUST_LOG", "warn");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Corpora {
    dir: tempfile::TempDir,
}

impl Corpora {
    /// Small toy corpora: parallel train/dev, clean text, labelled real/dev/test.
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let lang = ToyLanguage::default();
        let mut rng = seeded(3);
        let mut pairs = |n| (0..n).map(|_| lang.generate_pair(&mut rng)).collect::<Vec<_>>();
        let train = pairs(60);
        let dev = pairs(15);
        let test = pairs(30);
        let label = |ps: &[wrongsmith::corpus::ParallelPair]| {
            format_labeled(
                &ps.iter()
                    .map(|p| label_tokens(&p.source, &p.target).unwrap())
                    .collect::<Vec<_>>(),
            )
        };
        let write = |name: &str, text: String| std::fs::write(dir.path().join(name), text).unwrap();
        write("train.tsv", format_parallel_tsv(&train));
        write("dev.tsv", format_parallel_tsv(&dev));
        write("clean.txt", test.iter().map(|p| format!("{}\n", p.source)).collect());
        write("real.txt", test.iter().map(|p| format!("{}\n", p.target)).collect());
        write("real.lab", label(&train));
        write("dev.lab", label(&dev));
        write("test.lab", label(&test));
        Corpora { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn train_corruptor(c: &Corpora, out: &str) {
    ok(&[
        "corruptor",
        "train",
        "--parallel",
        p(&c.path("train.tsv")),
        "--dev",
        p(&c.path("dev.tsv")),
        "--out",
        p(&c.path(out)),
        "--cell-size",
        "16",
        "--emb-size",
        "16",
        "--max-epochs",
        "3",
        "--seed",
        "4",
    ]);
}

fn bytes(path: PathBuf) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn every_command_is_deterministic() {
    let c = Corpora::new();
    train_corruptor(&c, "m1.wsm");
    train_corruptor(&c, "m2.wsm");
    assert_eq!(bytes(c.path("m1.wsm")), bytes(c.path("m2.wsm")));

    for strategy in ["am", "ts", "bs"] {
        for run in ["a", "b"] {
            ok(&[
                "corruptor",
                "generate",
                "--model",
                p(&c.path("m1.wsm")),
                "--input",
                p(&c.path("clean.txt")),
                "--strategy",
                strategy,
                "--samples",
                "3",
                "--beam",
                "4",
                "--seed",
                "8",
                "--out",
                p(&c.path(&format!("{strategy}-{run}.tsv"))),
            ]);
        }
        assert_eq!(
            bytes(c.path(&format!("{strategy}-a.tsv"))),
            bytes(c.path(&format!("{strategy}-b.tsv")))
        );
        assert_eq!(
            bytes(c.path(&format!("{strategy}-a.scores.tsv"))),
            bytes(c.path(&format!("{strategy}-b.scores.tsv")))
        );
        assert!(!read_parallel_tsv(c.path(&format!("{strategy}-a.tsv")))
            .unwrap()
            .is_empty());
    }

    for run in ["a", "b"] {
        ok(&[
            "dataset",
            "build",
            "--pairs",
            p(&c.path("ts-a.tsv")),
            "--out",
            p(&c.path(&format!("syn-{run}.lab"))),
        ]);
    }
    assert_eq!(bytes(c.path("syn-a.lab")), bytes(c.path("syn-b.lab")));

    for run in ["a", "b"] {
        ok(&[
            "detector",
            "train",
            "--real",
            p(&c.path("real.lab")),
            "--synthetic",
            p(&c.path("syn-a.lab")),
            "--alternate",
            "--dev",
            p(&c.path("dev.lab")),
            "--out",
            p(&c.path(&format!("d-{run}.wsd"))),
            "--history",
            p(&c.path(&format!("h-{run}.jsonl"))),
            "--max-epochs",
            "4",
            "--seed",
            "2",
        ]);
    }
    assert_eq!(bytes(c.path("d-a.wsd")), bytes(c.path("d-b.wsd")));
    assert_eq!(bytes(c.path("h-a.jsonl")), bytes(c.path("h-b.jsonl")));

    let eval = |_: ()| {
        ok(&[
            "detector",
            "eval",
            "--model",
            p(&c.path("d-a.wsd")),
            "--test",
            p(&c.path("test.lab")),
            "--json",
        ])
    };
    let first = eval(());
    assert_eq!(first, eval(()));
    let m: DetectionMetrics = serde_json::from_str(first.trim()).unwrap();
    assert_eq!(m.beta, 0.5);
}

#[test]
fn seed_comes_from_the_environment() {
    let c = Corpora::new();
    train_corruptor(&c, "m.wsm");
    let generate = |out: &str, seed: Option<&str>, env: Option<&str>| {
        let mut cmd = bin();
        cmd.args([
            "corruptor",
            "generate",
            "--model",
            p(&c.path("m.wsm")),
            "--input",
            p(&c.path("clean.txt")),
        ]);
        cmd.args([
            "--strategy",
            "ts",
            "--tau",
            "1.0",
            "--samples",
            "2",
            "--out",
            p(&c.path(out)),
        ]);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        if let Some(e) = env {
            cmd.env("WRONGSMITH_SEED", e);
        }
        assert!(cmd.output().unwrap().status.success());
        bytes(c.path(out))
    };
    let flag = generate("flag.tsv", Some("12"), None);
    assert_eq!(generate("env.tsv", None, Some("12")), flag);
    assert_ne!(generate("other.tsv", Some("13"), None), flag);
}

#[test]
fn overfit_model_reproduces_its_targets() {
    let c = Corpora::new();
    let pairs = "the cat sleeps .\tthe cat sleep .\nshe listens to music .\tshe listens at music .\n";
    std::fs::write(c.path("two.tsv"), pairs).unwrap();
    std::fs::write(c.path("two.txt"), "the cat sleeps .\nshe listens to music .\n").unwrap();
    let out = ok(&[
        "corruptor",
        "train",
        "--parallel",
        p(&c.path("two.tsv")),
        "--dev",
        p(&c.path("two.tsv")),
        "--out",
        p(&c.path("two.wsm")),
        "--cell-size",
        "16",
        "--emb-size",
        "8",
        "--batch-size",
        "2",
        "--max-epochs",
        "300",
        "--patience",
        "300",
        "--seed",
        "9",
    ]);
    assert!(out.lines().next().unwrap().starts_with("epoch 1\t"));
    ok(&[
        "corruptor",
        "generate",
        "--model",
        p(&c.path("two.wsm")),
        "--input",
        p(&c.path("two.txt")),
        "--strategy",
        "am",
        "--out",
        p(&c.path("gen.tsv")),
    ]);
    assert_eq!(std::fs::read_to_string(c.path("gen.tsv")).unwrap(), pairs);
}

#[test]
fn failures_map_to_exit_codes() {
    let c = Corpora::new();
    let missing = run(&[
        "dataset",
        "build",
        "--pairs",
        "/nonexistent/x.tsv",
        "--out",
        p(&c.path("o.lab")),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error"));

    let (train, dev, model) = (c.path("train.tsv"), c.path("dev.tsv"), c.path("m.wsm"));
    let base = [
        "corruptor",
        "train",
        "--parallel",
        p(&train),
        "--dev",
        p(&dev),
        "--out",
        p(&model),
    ];
    let patience = run(&[&base[..], &["--patience", "0"]].concat());
    assert_eq!(patience.status.code(), Some(2));

    let unknown = run(&[
        "corruptor",
        "generate",
        "--model",
        "m",
        "--input",
        "i",
        "--strategy",
        "xx",
        "--out",
        "o",
    ]);
    assert_eq!(unknown.status.code(), Some(2));
    assert_eq!(run(&["detector"]).status.code(), Some(2));

    std::fs::write(c.path("bad.tsv"), "a\tb\tc\n").unwrap();
    let parse = run(&[
        "dataset",
        "build",
        "--pairs",
        p(&c.path("bad.tsv")),
        "--out",
        p(&c.path("o.lab")),
    ]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 1"));

    let diverged = run(&[
        &base[..],
        &[
            "--learning-rate",
            "1e300",
            "--cell-size",
            "8",
            "--emb-size",
            "8",
            "--max-epochs",
            "3",
        ],
    ]
    .concat());
    assert_eq!(
        diverged.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&diverged.stderr)
    );

    let few = run(&[
        "turing",
        "serve",
        "--real",
        p(&c.path("real.txt")),
        "--synthetic",
        p(&c.path("clean.txt")),
        "--n",
        "31",
    ]);
    assert_eq!(few.status.code(), Some(2));
}

#[test]
fn tau_is_ignored_with_argmax() {
    let c = Corpora::new();
    train_corruptor(&c, "m.wsm");
    let (model, clean) = (c.path("m.wsm"), c.path("clean.txt"));
    let gen = |tau: Option<&str>, out: &str| {
        let out = c.path(out);
        let mut args = vec!["corruptor", "generate", "--model", p(&model), "--input", p(&clean)];
        args.extend(["--strategy", "am", "--out", p(&out)]);
        if let Some(t) = tau {
            args.extend(["--tau", t]);
        }
        let o = run(&args);
        assert!(o.status.success());
        String::from_utf8(o.stderr).unwrap()
    };
    assert!(gen(Some("0.7"), "with.tsv").contains("--tau has no effect"));
    assert!(!gen(None, "without.tsv").contains("--tau"));
    assert_eq!(bytes(c.path("with.tsv")), bytes(c.path("without.tsv")));
    assert_eq!(std::fs::read_to_string(c.path("with.tsv")).unwrap().lines().count(), 30);
}

#[test]
fn dataset_build_filters() {
    let c = Corpora::new();
    let rows = "a b c\ta b c\na b c\ta b c\na b c\tx y z\n";
    std::fs::write(c.path("p.tsv"), rows).unwrap();
    let build = |extra: &[&str]| {
        ok(&[
            &[
                "dataset",
                "build",
                "--pairs",
                p(&c.path("p.tsv")),
                "--out",
                p(&c.path("o.lab")),
            ],
            extra,
        ]
        .concat());
        std::fs::read_to_string(c.path("o.lab")).unwrap()
    };
    assert_eq!(build(&[]), "a\tc\nb\tc\nc\tc\n\nx\ti\ny\ti\nz\ti\n\n");
    assert_eq!(build(&["--max-errors", "0"]), "a\tc\nb\tc\nc\tc\n\n");
    assert_eq!(
        build(&["--max-errors", "0", "--no-dedup"]),
        "a\tc\nb\tc\nc\tc\n\na\tc\nb\tc\nc\tc\n\n"
    );
}

fn http(addr: &str, method: &str, path: &str, body: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    let status = resp.split_whitespace().nth(1).unwrap().parse().unwrap();
    let body = resp
        .split_once("\r\n\r\n")
        .map(|(_, b)| b.to_string())
        .unwrap_or_default();
    (status, body)
}

#[test]
fn turing_serve_runs_a_session() {
    let c = Corpora::new();
    let results = c.path("results.json");
    let serve = |seed: &str| {
        let mut child = bin()
            .args([
                "turing",
                "serve",
                "--real",
                p(&c.path("real.txt")),
                "--synthetic",
                p(&c.path("clean.txt")),
            ])
            .args(["--n", "10", "--port", "0", "--seed", seed, "--results", p(&results)])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.as_mut().unwrap())
            .read_line(&mut line)
            .unwrap();
        let addr = line.trim().strip_prefix("listening on http://").unwrap().to_string();
        (child, addr)
    };
    let (mut first, addr) = serve("5");
    let (status, session) = http(&addr, "GET", "/api/session", "");
    assert_eq!(status, 200);
    let (mut second, addr2) = serve("5");
    assert_eq!(http(&addr2, "GET", "/api/session", "").1, session);
    second.kill().unwrap();
    second.wait().unwrap();

    let items: serde_json::Value = serde_json::from_str(&session).unwrap();
    let items = items["items"].as_array().unwrap();
    assert_eq!(items.len(), 20);
    assert_eq!(http(&addr, "GET", "/api/results", "").0, 409);
    let id = items[0]["id"].as_str().unwrap();
    assert_eq!(
        http(
            &addr,
            "POST",
            "/api/judgment",
            &format!(r#"{{"id":"{id}","synthetic":true}}"#)
        )
        .0,
        204
    );
    let (status, closed) = http(&addr, "POST", "/api/close", "");
    assert_eq!(status, 200);
    let m: DetectionMetrics = serde_json::from_str(&closed).unwrap();
    assert_eq!(m.tp + m.fp, 1);
    assert_eq!(
        serde_json::from_str::<DetectionMetrics>(&std::fs::read_to_string(&results).unwrap()).unwrap(),
        m
    );
    first.kill().unwrap();
    first.wait().unwrap();
}
