//! Searches checked against closed-form maximizers.

use std::f64::consts::PI;

use fekete_core::*;

fn pair_log_product(xs: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for i in 0..xs.len() {
        for j in 0..i {
            s += (xs[i] - xs[j]).norm().ln();
        }
    }
    s
}

#[test]
fn vandermonde_matches_pair_product() {
    let xs = [-0.9, -0.2, 0.1, 0.45, 0.8];
    let b = enumerate_basis(1, 4).unwrap();
    let d = objective_d(
        &Configuration::from_reals(&xs),
        &b,
        &Weight::zero(),
        4,
        None,
    )
    .unwrap()
    .value;
    let zs: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    assert!((d - pair_log_product(&zs)).abs() < 1e-12);
}

#[test]
fn roots_of_unity_are_found_on_the_circle() {
    for k in [3usize, 5, 8] {
        let n = k + 1;
        let set = CompactSet::circle(1.0).unwrap();
        // density·k² angles is a multiple of n for these choices
        let density = n;
        let run = find_fekete(
            &set,
            &Weight::zero(),
            k,
            &SearchOptions {
                mesh_density: density,
                ..Default::default()
            },
        )
        .unwrap();
        let want = n as f64 / 2.0 * (n as f64).ln();
        assert!((run.report.objective.value - want).abs() < 1e-9, "k={k}");
        let est = diameter_from_run(1, k, run.report.objective.value);
        assert!((est - (n as f64).powf(1.0 / (n as f64 - 1.0))).abs() < 1e-9);
    }
}

fn diameter_from_run(n: usize, k: usize, sup: f64) -> f64 {
    fekete_core::diagnostics::diameter_from_logdet(n, k, sup, Certainty::Heuristic)
        .d_k_pairs
        .unwrap()
}

/// Zeros of `(1 - x²) P_k'(x)` by Newton iteration from Chebyshev guesses.
fn gauss_lobatto(k: usize) -> Vec<f64> {
    let mut xs = vec![-1.0, 1.0];
    for i in 1..k {
        let mut x = -(PI * i as f64 / k as f64).cos();
        for _ in 0..100 {
            // P_k and derivatives by recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = k as f64 * (p0 - x * p1) / (1.0 - x * x);
            let d2p = (2.0 * x * dp - (k * (k + 1)) as f64 * p1) / (1.0 - x * x);
            let step = dp / d2p;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        xs.push(x);
    }
    xs.sort_by(f64::total_cmp);
    xs
}

#[test]
fn interval_search_approaches_gauss_lobatto_points() {
    let k = 12;
    let run = find_fekete(
        &CompactSet::interval(-1.0, 1.0).unwrap(),
        &Weight::zero(),
        k,
        &SearchOptions {
            mesh_density: 8,
            ..Default::default()
        },
    )
    .unwrap();
    let gll = gauss_lobatto(k);
    let zs: Vec<Complex64> = gll.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let exact = pair_log_product(&zs);
    let found = run.report.objective.value;
    assert!(found <= exact + 1e-9);
    assert!(exact - found < 1e-3, "{exact} {found}");
    let mut xs: Vec<f64> = run.report.config.points.iter().map(|p| p.0[0].re).collect();
    xs.sort_by(f64::total_cmp);
    let mesh_step = PI / (run.mesh.len() - 1) as f64;
    assert!(xs
        .iter()
        .zip(&gll)
        .all(|(a, b)| (a - b).abs() < 2.0 * mesh_step));
}

/// Zeros of the Hermite polynomial H_n by Newton from an asymptotic guess.
fn hermite_zeros(n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let eval = |x: f64| {
        let (mut h0, mut h1) = (1.0, 2.0 * x);
        for j in 1..n {
            let h2 = 2.0 * x * h1 - 2.0 * j as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        (h1, 2.0 * n as f64 * h0)
    };
    // bracket sign changes on a fine grid, then polish
    let lim = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let steps = 20_000;
    let mut prev = (-lim, eval(-lim).0);
    for i in 1..=steps {
        let x = -lim + 2.0 * lim * i as f64 / steps as f64;
        let v = eval(x).0;
        if v.signum() != prev.1.signum() {
            let mut z = 0.5 * (x + prev.0);
            for _ in 0..50 {
                let (h, dh) = eval(z);
                z -= h / dh;
            }
            out.push(z);
        }
        prev = (x, v);
    }
    out
}

#[test]
fn quadratic_field_matches_scaled_hermite_zeros() {
    // maximizers of Σ log|x_i - x_j| - k Σ x_i² are zeros of H_{k+1} scaled by 1/√(2k)
    let k = 20;
    let n = k + 1;
    let xs: Vec<Complex64> = hermite_zeros(n)
        .iter()
        .map(|h| Complex64::new(h / (2.0 * k as f64).sqrt(), 0.0))
        .collect();
    assert_eq!(xs.len(), n);
    let exact = pair_log_product(&xs) - k as f64 * xs.iter().map(|x| x.re * x.re).sum::<f64>();
    let run = find_fekete(
        &CompactSet::interval(-2.0, 2.0).unwrap(),
        &Weight::real_power(1.0, 2),
        k,
        &SearchOptions {
            mesh_density: 4,
            ..Default::default()
        },
    )
    .unwrap();
    let found = run.report.objective.value;
    assert!(found <= exact + 1e-9, "{found} {exact}");
    assert!(exact - found < 0.01, "{found} {exact}");
    let recomputed = objective_d(
        &run.report.config,
        &run.basis,
        &Weight::real_power(1.0, 2),
        k,
        None,
    )
    .unwrap()
    .value;
    assert!((recomputed - found).abs() < 1e-8);
}

#[test]
fn arcsine_energy_gives_capacity_one_half() {
    // -∫∫ log|x - y| dμ dμ = log 2 for the arcsine law of [-1, 1]
    let mu = arcsine_measure(-1.0, 1.0, 2000).unwrap();
    let nu = arcsine_measure(-1.0, 1.0, 2001).unwrap();
    let mut energy = 0.0;
    for (p, a) in mu.nodes.iter().zip(&mu.masses) {
        for (q, b) in nu.nodes.iter().zip(&nu.masses) {
            energy -= a * b * (p.0[0] - q.0[0]).norm().ln();
        }
    }
    assert!(((-energy).exp() - 0.5).abs() < 2e-3);
}
