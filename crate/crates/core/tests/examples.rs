#[path = "../examples/corpus_formats.rs"]
#[allow(dead_code)]
mod corpus_formats;

#[path = "../examples/temperature_sampling.rs"]
#[allow(dead_code)]
mod temperature_sampling;

#[path = "../examples/decode_strategies.rs"]
#[allow(dead_code)]
mod decode_strategies;

#[path = "../examples/align_and_label.rs"]
#[allow(dead_code)]
mod align_and_label;

#[path = "../examples/build_dataset.rs"]
#[allow(dead_code)]
mod build_dataset;

#[path = "../examples/turing_session.rs"]
#[allow(dead_code)]
mod turing_session;

#[test]
fn corpus_formats_runs() {
    corpus_formats::run().expect("example runs");
}

#[test]
fn temperature_sampling_runs() {
    temperature_sampling::run().expect("example runs");
}

#[test]
fn decode_strategies_runs() {
    decode_strategies::run().expect("example runs");
}

#[test]
fn align_and_label_runs() {
    align_and_label::run().expect("example runs");
}

#[test]
fn build_dataset_runs() {
    build_dataset::run().expect("example runs");
}

#[test]
fn turing_session_runs() {
    turing_session::run().expect("example runs");
}
