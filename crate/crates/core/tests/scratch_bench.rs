use hypodx::runner::{fit, FitOptions, ModelKind};
use hypodx::synth::{generate_corpus, SynthSpec};
use hypodx::text::prepare_rows;
use hypodx::eval::tri_split;

#[test]
fn bench_encoders() {
    let spec = SynthSpec {
        n_notes: 25,
        sentences_per_note_mean: 100.0,
        sentences_per_note_sd: 20.0,
        sentences_per_note_min: 6,
        sentences_per_note_max: 200,
        seed: 999,
        ..SynthSpec::default()
    };
    let corpus = generate_corpus(&spec).unwrap();
    let records = prepare_rows(&corpus.rows, false).unwrap();
    let n = records.len();
    println!("bench corpus: {n} sentences");
    let (train, dev, _test) = tri_split(n, 0.10, 0.10, 7).unwrap();
    for kind in [ModelKind::Cnn, ModelKind::Lstm, ModelKind::Bilstm, ModelKind::Tcn] {
        let mut opts = FitOptions::new(kind, 7);
        opts.train.max_epochs = 2;
        opts.train.patience = 2;
        opts.train.threads = 1;
        let t0 = std::time::Instant::now();
        let _ = fit(&records, &train, &dev, &corpus.embedding_entries, &opts).unwrap();
        let dt = t0.elapsed();
        println!("{kind}: {:?} for 2 epochs on {} train sentences -> {:.1} ms/sentence-epoch",
            dt, train.len(), dt.as_secs_f64()*1000.0/(2.0*train.len() as f64));
    }
}
