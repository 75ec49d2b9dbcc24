use hypodx::model::{EncoderKind, ModelConfig, ModelLossOp};
use hypodx::num::{grad_check, Matrix};
use hypodx::model::ParameterSet;
use hypodx::text::{embeddings::build_table, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check(kind: EncoderKind, seed: u64, ids: Vec<u32>) {
    let cfg = ModelConfig::tiny(kind, seed);
    let sent: Vec<String> = ["a","b","c","d","e"].iter().map(|s| s.to_string()).collect();
    let vocab = Vocabulary::build([sent.iter()]).unwrap();
    let table = build_table(&[], &vocab, cfg.embed_dim, seed ^ 77).unwrap();
    let params = ParameterSet::init(&cfg, &table).unwrap();
    // larger weights keep every surviving gradient well above the
    // central-difference noise floor
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(5));
    let data: Vec<f64> = (0..params.data().len()).map(|_| rng.gen_range(-0.9..0.9)).collect();
    let flat = Matrix::from_vec(1, data.len(), data).unwrap();
    let op = ModelLossOp { config: cfg, vocab_size: vocab.size(), ids, gold: (seed % 2) as usize };
    let t0 = std::time::Instant::now();
    let report = grad_check(&op, &[flat], 1e-5, 1e-5, seed).unwrap();
    println!("{kind:?} seed {seed}: worst {:.3e} pass={} ({:?})",
        report.worst_rel_err, report.passed, t0.elapsed());
    assert!(report.passed, "{kind:?} seed {seed}");
}

#[test]
fn all_encoders() {
    for (i, kind) in [EncoderKind::Lstm, EncoderKind::Bilstm, EncoderKind::Cnn, EncoderKind::Tcn].into_iter().enumerate() {
        for seed in 0..3u64 {
            let ids = match seed { 0 => vec![2,3,4], 1 => vec![2,2,5,6,3,4,2], _ => vec![6] };
            check(kind, seed + 10*i as u64, ids);
        }
    }
}
