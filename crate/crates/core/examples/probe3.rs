// Scratch: inspect extreme Gibbs weights at N=16.
use toruslab_core::field::*;
use toruslab_core::measure::*;

fn main() {
    let law = GaussianLaw::complex(16);
    let cutoff = toruslab_core::soliton::mass_threshold();
    let spec = GibbsSpec { law, cutoff };
    let mut top: Vec<(f64, u64, f64)> = Vec::new(); // (logw, index, mass)
    let mut sum_x = 0.0;
    let mut count_in = 0usize;
    let m = 100_000u64;
    for i in 0..m {
        let f = law.sample_indexed(7, i);
        let lw = gibbs_log_weight(&f, &spec);
        if lw.is_finite() {
            sum_x += 6.0 * lw;
            count_in += 1;
            top.push((lw, i, f.mass()));
            if top.len() > 8 {
                top.sort_by(|a, b| b.0.total_cmp(&a.0));
                top.truncate(8);
            }
        }
    }
    println!("accepted {count_in}, mean X among accepted {:.2}", sum_x / count_in as f64);
    top.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (lw, i, mass) in &top {
        let f = law.sample_indexed(7, *i);
        // brute-force high-resolution check of int |u|^6
        let g = 4096;
        let s = synthesize(&f, g).unwrap();
        let brute: f64 = s.values().iter().map(|v| v.norm_sqr().powi(3)).sum::<f64>() / g as f64;
        let via = f.lebesgue_pth_power(6.0).unwrap();
        println!(
            "idx {i}: logw {lw:.2} mass {mass:.3} int|u|6 via {via:.2} brute {brute:.2} sup|u| {:.2}",
            s.values().iter().map(|v| v.norm()).fold(0.0f64, f64::max)
        );
    }
}
