// Temporary probe for strategy trends; removed before finalizing.

use fscil_core::protocol;
use fscil_core::ExperimentConfig;

#[test]
#[ignore]
fn probe_trends() {
    let k_base: usize = std::env::var("PROBE_K")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(2);
    let update_base: bool = std::env::var("PROBE_UB")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(true);
    let static_threshold: f64 = std::env::var("PROBE_TAU")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0.35);
    let mut sums = [0.0f64; 4];
    let seeds = [1u64, 2, 3, 4, 5];
    for &seed in &seeds {
        let cfg = ExperimentConfig {
            seed,
            k_base,
            update_base_weights: update_base,
            static_threshold,
            ..Default::default()
        };
        let reports = protocol::run_ablation(&cfg).unwrap();
        for (i, r) in reports.iter().enumerate() {
            sums[i] += r.avg_all;
            let accs: Vec<String> = r
                .sessions
                .iter()
                .map(|s| format!("{:.1}", s.acc_all))
                .collect();
            let taus: Vec<String> = r
                .sessions
                .iter()
                .map(|s| format!("{:.2}", s.tau_used))
                .collect();
            let prec: Vec<String> = r
                .sessions
                .iter()
                .map(|s| {
                    s.pseudo_precision
                        .map_or("-".into(), |p| format!("{:.2}", p))
                })
                .collect();
            let nconf: Vec<String> = r
                .sessions
                .iter()
                .map(|s| format!("{}", s.n_confident))
                .collect();
            let base: Vec<String> = r
                .sessions
                .iter()
                .map(|s| s.acc_base.map_or("-".into(), |a| format!("{:.1}", a)))
                .collect();
            let novel: Vec<String> = r
                .sessions
                .iter()
                .map(|s| s.acc_novel.map_or("-".into(), |a| format!("{:.1}", a)))
                .collect();
            println!(
                "seed {seed} {:>8}: avg {:.2} accs {:?} base {:?} novel {:?} taus {:?} prec {:?} nconf {:?}",
                r.label, r.avg_all, accs, base, novel, taus, prec, nconf
            );
        }
    }
    println!("--- 5-seed means ---");
    for (i, name) in ["baseline", "drop", "static", "dynamic"].iter().enumerate() {
        println!("{name:>8}: {:.2}", sums[i] / seeds.len() as f64);
    }
}
