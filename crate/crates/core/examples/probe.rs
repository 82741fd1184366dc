// Scratch measurement harness; not part of the deliverable.
use num_complex::Complex64;
use toruslab_core::dynamics::*;
use toruslab_core::field::*;
use toruslab_core::measure::*;

fn smooth_real(modes: usize, seed: u64, mass: f64, decay: f64) -> TorusField {
    let mut f = TorusField::zero(modes, Symmetry::RealSymmetric);
    let mut rng = toruslab_core::rng::stream(seed, 0);
    use rand::Rng;
    f.set(0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    for n in 1..=modes as i64 {
        let d = (-(n as f64) * decay).exp() / bracket(n);
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * d;
        f.set(n, c);
        f.set(-n, c.conj());
    }
    let s = (mass / f.mass()).sqrt();
    f.scale(s)
}

fn gibbs_typical(modes: usize, seed: u64) -> TorusField {
    let spec = GibbsSpec::at_threshold(GaussianLaw::complex(modes));
    // first prior draw inside the cutoff
    for i in 0..10_000u64 {
        let f = spec.law.sample_indexed(seed, i);
        if gibbs_log_weight(&f, &spec) > f64::NEG_INFINITY {
            return f;
        }
    }
    panic!("no sample inside cutoff");
}

fn main() {
    let t0 = std::time::Instant::now();

    // (a) gKdV drift at N=32, dt=1e-4, T=1 for several data scales
    for (mass, decay) in [
        (0.25, 1.0),
        (0.1, 1.0),
        (0.05, 1.0),
        (0.25, 1.5),
        (0.25, 2.0),
        (0.5, 2.0),
    ] {
        let f = smooth_real(32, 8, mass, decay);
        let spec = EvolutionSpec::new(Equation::Gkdv, 32, 1e-4, 1.0, 200);
        let traj = evolve(&f, &spec, &[]).unwrap();
        let rep = conservation_report(&traj).unwrap();
        println!(
            "gkdv mass={mass} decay={decay}: mass drift {:.3e}, H drift {:.3e}, fail={:?} [{:?}]",
            rep.mass_drift,
            rep.hamiltonian_drift,
            traj.failure_time,
            t0.elapsed()
        );
    }

    // (b) NLS Gibbs-typical N=64, dt=1e-3, T=10: criterion-7 parameters
    let f = gibbs_typical(64, 42);
    println!(
        "nls data: mass {:.4}, sup-ish |u| l1 {:.3}",
        f.mass(),
        f.coeffs().iter().map(|c| c.norm()).sum::<f64>()
    );
    for scheme in [NlsScheme::CrankNicolson, NlsScheme::StrangSplit] {
        let mut spec = EvolutionSpec::new(Equation::Nls, 64, 1e-3, 10.0, 100);
        spec.nls_scheme = scheme;
        let t1 = std::time::Instant::now();
        let traj = evolve(&f, &spec, &[]).unwrap();
        let rep = conservation_report(&traj).unwrap();
        println!(
            "nls N=64 dt=1e-3 T=10 ({scheme:?}): mass drift {:.3e}, H drift {:.3e}, H0 {:.4}, fail={:?}, wall {:?}",
            rep.mass_drift,
            rep.hamiltonian_drift,
            traj.points[0].hamiltonian,
            traj.failure_time,
            t1.elapsed()
        );
    }

    // (c) reversibility at criterion-8 parameters (N=32, dt=1e-3, T=1)
    let f32 = gibbs_typical(32, 7);
    let fwd = EvolutionSpec::new(Equation::Nls, 32, 1e-3, 1.0, 10_000);
    let end = evolve(&f32, &fwd, &[]).unwrap().final_field.unwrap();
    let mut bwd = EvolutionSpec::new(Equation::Nls, 32, 1e-3, 1.0, 10_000);
    bwd.direction = Direction::Backward;
    let back = evolve(&end, &bwd, &[]).unwrap().final_field.unwrap();
    let err: f64 = back
        .coeffs()
        .iter()
        .zip(f32.coeffs())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    println!("nls reversibility H0-distance: {err:.3e}");

    // (d) order checks
    // CN at N=4, smooth complex data, resolved dt regime
    let mut u0 = TorusField::zero(4, Symmetry::Complex);
    {
        let mut rng = toruslab_core::rng::stream(3, 0);
        use rand::Rng;
        for n in -4i64..=4 {
            let d = (-(n.abs() as f64) / 2.0).exp() / bracket(n);
            u0.set(
                n,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * d,
            );
        }
    }
    let t_end = 0.25;
    let reference = {
        let spec = EvolutionSpec::new(Equation::Nls, 4, 1e-4 / 64.0, t_end, usize::MAX);
        evolve(&u0, &spec, &[]).unwrap().final_field.unwrap()
    };
    let err_at = |dt: f64| -> f64 {
        let spec = EvolutionSpec::new(Equation::Nls, 4, dt, t_end, usize::MAX);
        let end = evolve(&u0, &spec, &[]).unwrap().final_field.unwrap();
        end.coeffs()
            .iter()
            .zip(reference.coeffs())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let (e1, e2) = (err_at(1e-4), err_at(5e-5));
    println!("cn errors: {e1:.3e} / {e2:.3e}, ratio {:.2}", e1 / e2);

    // IF-RK4 at N=8, resolved regime
    let g0 = smooth_real(8, 4, 0.25, 0.5);
    let reference = {
        let spec = EvolutionSpec::new(Equation::Gkdv, 8, 4e-5 / 64.0, 0.1, usize::MAX);
        evolve(&g0, &spec, &[]).unwrap().final_field.unwrap()
    };
    let err_at = |dt: f64| -> f64 {
        let spec = EvolutionSpec::new(Equation::Gkdv, 8, dt, 0.1, usize::MAX);
        let end = evolve(&g0, &spec, &[]).unwrap().final_field.unwrap();
        end.coeffs()
            .iter()
            .zip(reference.coeffs())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let (e1, e2) = (err_at(4e-5), err_at(2e-5));
    println!("ifrk4 errors: {e1:.3e} / {e2:.3e}, ratio {:.2}", e1 / e2);

    println!("total wall {:?}", t0.elapsed());
}
