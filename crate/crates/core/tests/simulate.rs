use hybrid_forecast::grey::fit_dgm;
use hybrid_forecast::simulate::{
    simulate_arfima, simulate_dgm, simulate_fractal, ArfimaParams, DgmParams, FractalParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[test]
fn same_seed_same_series() {
    let a = ArfimaParams {
        d: 0.2,
        phi: vec![0.4],
        mean: 3.0,
        sigma: 0.1,
    };
    assert_eq!(
        simulate_arfima(&a, 200, 5).unwrap(),
        simulate_arfima(&a, 200, 5).unwrap()
    );
    assert_ne!(
        simulate_arfima(&a, 200, 5).unwrap(),
        simulate_arfima(&a, 200, 6).unwrap()
    );
    let g = DgmParams {
        beta: [1.02, 0.3, 0.1, 0.5],
        xi: 4.0,
        noise: 0.01,
    };
    assert_eq!(
        simulate_dgm(&g, 50, 1).unwrap(),
        simulate_dgm(&g, 50, 1).unwrap()
    );
    let f = FractalParams {
        start_price: 1.5,
        degree: 0.02,
        q_sd: 1e-3,
        r_sd: 1e-3,
        transition: Default::default(),
    };
    assert_eq!(
        simulate_fractal(&f, 60, 2).unwrap(),
        simulate_fractal(&f, 60, 2).unwrap()
    );
}

#[test]
fn dgm_generator_is_recovered() {
    let beta = [1.04, 0.6, -0.3, 2.0];
    let x0 = simulate_dgm(
        &DgmParams {
            beta,
            xi: 7.0,
            noise: 0.0,
        },
        20,
        0,
    )
    .unwrap();
    let m = fit_dgm(&x0).unwrap();
    for (a, b) in m.beta.iter().zip(beta) {
        assert!((a - b).abs() < 1e-6);
    }
    assert!((m.xi - 7.0).abs() < 1e-6);
}

#[test]
fn zero_memory_is_plain_ar() {
    // the same innovations pushed through the AR recursion by hand
    let (phi, sigma, n, seed) = (0.6, 0.5, 100, 3);
    let x = simulate_arfima(
        &ArfimaParams {
            d: 0.0,
            phi: vec![phi],
            mean: 1.0,
            sigma,
        },
        n,
        seed,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    let burn = hybrid_forecast::simulate::ARFIMA_BURN_IN;
    let mut u = vec![0.0f64; 0];
    for t in 0..burn + n {
        let ar = if t == 0 { 0.0 } else { phi * u[t - 1] };
        u.push(ar + noise.sample(&mut rng));
    }
    for (a, b) in x.iter().zip(&u[burn..]) {
        assert!((a - (b + 1.0)).abs() < 1e-12);
    }
}
