use rand::Rng;
use wrongsmith::detector::DetectorParams;
use wrongsmith::optim::ParamSet;
use wrongsmith::rng::seeded;
use wrongsmith::seq2seq::{batch_gradient, batch_loss, Dims, IdPair, Seq2SeqParams};

const EPS: f64 = 1e-4;
const TOL: f64 = 1e-3;

/// Relative error, with an absolute floor for components that are
/// numerically zero on both sides.
fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-7 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}

/// Compares every analytic gradient component against central differences.
fn check<P: ParamSet + Clone>(params: &P, grad: &P, loss: impl Fn(&P) -> f64) -> f64 {
    let mut worst = 0.0f64;
    let sizes: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    for (ti, &size) in sizes.iter().enumerate() {
        for k in 0..size {
            let mut p = params.clone();
            let orig = p.tensors()[ti][k];
            p.tensors_mut()[ti][k] = orig + EPS;
            let up = loss(&p);
            p.tensors_mut()[ti][k] = orig - EPS;
            let down = loss(&p);
            let numeric = (up - down) / (2.0 * EPS);
            worst = worst.max(relative_error(grad.tensors()[ti][k], numeric));
        }
    }
    worst
}

fn random_ids(rng: &mut impl Rng, vocab: usize, max_len: usize) -> Vec<usize> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| rng.random_range(1..vocab)).collect()
}

#[test]
fn seq2seq_gradient_matches_finite_differences() {
    for seed in 0..20 {
        let mut params = Seq2SeqParams::init(
            seed,
            Dims {
                vocab: 6,
                emb: 4,
                cell: 4,
            },
        )
        .unwrap();
        params.scale(6.0);
        let mut rng = seeded(1000 + seed);
        let pairs: Vec<IdPair> = (0..3)
            .map(|_| IdPair {
                source: random_ids(&mut rng, 6, 4),
                target: random_ids(&mut rng, 6, 4),
            })
            .collect();
        let (loss, grad) = batch_gradient(&params, &pairs).unwrap();
        assert!((loss - batch_loss(&params, &pairs).unwrap()).abs() < 1e-12);
        let worst = check(&params, &grad, |p| batch_loss(p, &pairs).unwrap());
        assert!(worst < TOL, "seed {seed}: relative error {worst:e}");
    }
}

#[test]
fn detector_gradient_matches_finite_differences() {
    for seed in 0..20 {
        let mut params = DetectorParams::init(seed, 6, 4, 4).unwrap();
        params.scale(6.0);
        let mut rng = seeded(2000 + seed);
        let batch: Vec<(Vec<usize>, Vec<usize>)> = (0..3)
            .map(|_| {
                let ids = random_ids(&mut rng, 6, 5);
                let labels = ids.iter().map(|_| rng.random_range(0..2)).collect();
                (ids, labels)
            })
            .collect();
        let mean_loss =
            |p: &DetectorParams| batch.iter().map(|(ids, l)| p.loss(ids, l).unwrap()).sum::<f64>() / batch.len() as f64;
        let (loss, grad) = params.batch_gradient(&batch).unwrap();
        assert!((loss - mean_loss(&params)).abs() < 1e-12);
        let worst = check(&params, &grad, mean_loss);
        assert!(worst < TOL, "seed {seed}: relative error {worst:e}");
    }
}
