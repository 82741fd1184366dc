use toruslab_core::dynamics::*;
use toruslab_core::field::Equation;
use toruslab_core::measure::*;

fn main() {
    for modes in [1usize, 4, 16] {
        let spec = GibbsSpec::at_threshold(GaussianLaw::complex(modes));
        let m = 20_000;
        let ens = importance_ensemble(&spec, 123, m).unwrap();
        println!(
            "plain IS N={modes}: acc {:.3}, ESS {:.0} ({:.3} of m), maxw {:.5}",
            ens.acceptance_fraction(),
            ens.effective_sample_size(),
            ens.effective_sample_size() / m as f64,
            ens.max_weight_fraction(),
        );
    }
    // gKdV criterion-7 with Gibbs-typical real-symmetric data
    let spec = GibbsSpec::at_threshold(GaussianLaw::real_symmetric(32));
    let mut field = None;
    for i in 0..1000u64 {
        let f = spec.law.sample_indexed(11, i);
        if gibbs_log_weight(&f, &spec).is_finite() {
            field = Some(f);
            break;
        }
    }
    let f = field.unwrap();
    println!("gkdv gibbs-typical mass {:.4}", f.mass());
    let espec = EvolutionSpec::new(Equation::Gkdv, 32, 1e-4, 1.0, 200);
    let t0 = std::time::Instant::now();
    let traj = evolve(&f, &espec, &[]).unwrap();
    let rep = conservation_report(&traj).unwrap();
    println!(
        "gkdv N=32 dt=1e-4 T=1 gibbs-typical: mass drift {:.3e}, H drift {:.3e}, fail={:?}, wall {:?}",
        rep.mass_drift, rep.hamiltonian_drift, traj.failure_time, t0.elapsed()
    );
}
