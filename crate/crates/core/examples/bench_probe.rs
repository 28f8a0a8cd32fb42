// dump the hard MD-only subproblem for offline analysis
use fruitvision::classify::{fit_normalizer, project_dataset, split_drop_one_out, ClassLabel};
use fruitvision::config::PipelineConfig;
use fruitvision::pipeline::extract_corpus;
use fruitvision::synthgen::gen_corpus;

fn main() {
    let dir = std::env::temp_dir().join("fv_bench_probe");
    let manifest = fruitvision::synthgen::CorpusManifest::load(&dir)
        .or_else(|_| gen_corpus(30, 42, &dir))
        .unwrap();
    let cfg = PipelineConfig::default();
    let features = extract_corpus(&manifest, &cfg).unwrap();
    let (train_set, _) = split_drop_one_out(&features.dataset, 0.75, 42).unwrap();
    let md = project_dataset(&train_set, [true, false, false]).unwrap();
    let norm = fit_normalizer(&md).unwrap();
    let normalized = norm.apply_dataset(&md).unwrap();
    let mut out = String::new();
    for s in &normalized.samples {
        if s.label == ClassLabel::Calyx || s.label == ClassLabel::Defect {
            let y = if s.label == ClassLabel::Calyx { 1.0 } else { -1.0 };
            out.push_str(&format!("{y}"));
            for v in s.features.flat() {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
    }
    std::fs::write("/tmp/hard_subproblem.csv", out).unwrap();
    println!("dumped");
}
