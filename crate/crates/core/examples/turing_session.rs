//! A real-vs-synthetic judgment session, scored the way the HTTP API does.
//!
//!     cargo run --example turing_session            # simulated annotator
//!     cargo run --example turing_session -- serve   # HTTP API on :8080

use std::collections::HashSet;

use wrongsmith::corpus::Sentence;
use wrongsmith::rng::seeded;
use wrongsmith::toy::ToyLanguage;
use wrongsmith::turing::{router, serve, ServerOptions, TuringSession};

fn pools() -> (Vec<Sentence>, Vec<Sentence>) {
    let lang = ToyLanguage::default();
    let mut rng = seeded(12);
    let real = (0..60).map(|_| lang.generate_pair(&mut rng).target).collect();
    let synthetic = (0..60).map(|_| lang.generate_pair(&mut rng).target).collect();
    (real, synthetic)
}

pub fn run() -> wrongsmith::Result<()> {
    let (real, synthetic) = pools();
    let mut session = TuringSession::new(&real, &synthetic, 50, 2018)?;
    for item in &session.items()[..3] {
        println!("{}: {}", item.id, item.text);
    }
    // This annotator flags 16 sentences and happens to be right about 13.
    let texts = |pool: &[Sentence]| pool.iter().map(|s| s.to_string()).collect::<HashSet<_>>();
    let (real_texts, synthetic_texts) = (texts(&real), texts(&synthetic));
    let (mut hits, mut misses) = (0, 0);
    for item in session.items().to_vec() {
        let only_synthetic = synthetic_texts.contains(&item.text) && !real_texts.contains(&item.text);
        let only_real = real_texts.contains(&item.text) && !synthetic_texts.contains(&item.text);
        if only_synthetic && hits < 13 {
            session.judge(&item.id, true)?;
            hits += 1;
        } else if only_real && misses < 3 {
            session.judge(&item.id, true)?;
            misses += 1;
        }
    }
    let m = session.close()?;
    println!("{m}");
    println!("{}", m.to_json());
    Ok(())
}

fn main() -> wrongsmith::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if std::env::args().nth(1).as_deref() != Some("serve") {
        return run();
    }
    let (real, synthetic) = pools();
    let session = TuringSession::new(&real, &synthetic, 50, 2018)?;
    let options = ServerOptions {
        results_path: Some("turing_results.json".into()),
        ui_dir: None,
    };
    tokio::runtime::Runtime::new()?.block_on(async {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:8080").await?;
        println!("listening on http://{}", listener.local_addr()?);
        serve(listener, router(session, options)).await
    })
}
