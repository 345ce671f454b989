use num_complex::Complex64;
use pdemscatter::model::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn fig1() -> ModelParams {
    ModelParams::new(3.0, 3.0, 4.0, 4.0).unwrap()
}

#[test]
fn closed_form_effective_potential_matches_general_recipe() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..1000 {
        let params = ModelParams::new(
            rng.gen_range(-3.0..5.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.3..5.0),
            rng.gen_range(0.5..8.0),
        )
        .unwrap();
        let z = rng.gen_range(-0.999..0.999) * params.a0;
        let rho_bar = rho_of_z(z, &params) / params.beta;
        let closed = effective_potential(rho_bar, &params);
        let general = effective_potential_from_mass(z, &params);
        let scale = closed.norm().max(1.0);
        assert!((closed - general).norm() <= 1e-10 * scale, "{params:?} z={z}: {closed} vs {general}");
    }
}

#[test]
fn effective_potential_at_centre() {
    let params = fig1();
    let d = derive(&params, 1.0).unwrap();
    let want = Complex64::new(1.0 / 64.0 - d.v1 / 16.0, 0.0);
    assert!((effective_potential(0.0, &params) - want).norm() < 1e-15);
}

#[test]
fn mass_and_real_potential_continuous_at_junctions() {
    let params = fig1();
    for edge in [-4.0, 4.0f64] {
        let inside = edge - edge.signum() * 1e-12;
        assert!((mass_at(inside, &params) - mass_at(edge + edge.signum() * 1e-12, &params)).abs() < 1e-11);
        assert!((potential_at(inside, &params).re - potential_at(edge * 1.001, &params).re).abs() < 1e-11);
        assert_eq!(potential_at(edge * 1.001, &params).im, 0.0);
    }
}

#[test]
fn sampled_grid_re_v_is_continuous_within_one_slice() {
    let params = fig1();
    let n = 1000;
    let g = sample_profile(&params, n, 2.0).unwrap();
    let h = 8.0 / n as f64;
    // largest variation of Re V over one interior slice
    let slope: f64 = (0..n)
        .map(|j| {
            let z = -4.0 + j as f64 * h;
            (potential_at(z + h, &params).re - potential_at(z, &params).re).abs()
        })
        .fold(0.0, f64::max);
    let jump_left = (g.v[1].re - g.v[0].re).abs();
    let jump_right = (g.v[n].re - g.v[n + 1].re).abs();
    assert!(jump_left <= slope && jump_right <= slope);
    assert!(g.v.iter().skip(1).take(n).any(|v| v.im != 0.0));
}

#[test]
fn grid_midpoint_count_and_exteriors() {
    let params = fig1();
    let g = sample_profile(&params, 250, 1.5).unwrap();
    let interior: Vec<_> = g.z.iter().filter(|z| z.abs() < params.a0).collect();
    assert_eq!(interior.len(), 250);
    assert_eq!(g.edges[0], -5.5);
    assert_eq!(*g.edges.last().unwrap(), 5.5);
    for j in [0, g.len() - 1] {
        assert_eq!(g.m[j], params.exterior_mass());
        assert_eq!(g.v[j], Complex64::new(params.exterior_potential(), 0.0));
    }
}

proptest! {
    #[test]
    fn sampled_profiles_are_pt_symmetric(
        mu1 in -5.0f64..5.0, mu2 in 0.0f64..5.0, beta in 0.2f64..6.0, a0 in 0.2f64..10.0, n in 100usize..3000,
    ) {
        let params = ModelParams::new(mu1, mu2, beta, a0).unwrap();
        let g = sample_profile(&params, n, 2.0).unwrap();
        for j in 0..g.len() {
            let k = g.len() - 1 - j;
            prop_assert_eq!(g.v[j], g.v[k].conj());
            prop_assert_eq!(g.m[j], g.m[k]);
            prop_assert!(g.m[j] > 0.0);
            prop_assert!(g.z[j] == -g.z[k] || (g.z[j] + g.z[k]).abs() < 1e-12 * (a0 + 2.0));
        }
        prop_assert!(g.edges.windows(2).all(|w| w[1] > w[0]));
        let ne = g.edges.len();
        prop_assert!((0..ne).all(|j| g.edges[j] == -g.edges[ne - 1 - j]));
    }

    #[test]
    fn profiles_are_pt_symmetric_pointwise(mu1 in -5.0f64..5.0, mu2 in 0.0f64..5.0, z in -20.0f64..20.0) {
        let params = ModelParams::new(mu1, mu2, 2.0, 4.0).unwrap();
        prop_assert_eq!(potential_at(-z, &params), potential_at(z, &params).conj());
        prop_assert_eq!(mass_at(-z, &params), mass_at(z, &params));
        prop_assert_eq!(rho_of_z(-z, &params), -rho_of_z(z, &params));
        let rho_bar = z.abs().min(2.0);
        prop_assert!((effective_potential(-rho_bar, &params) - effective_potential(rho_bar, &params).conj()).norm() < 1e-14);
    }

    #[test]
    fn rho_is_strictly_increasing(z in -20.0f64..20.0, dz in 1e-6f64..1.0) {
        let params = fig1();
        prop_assert!(rho_of_z(z + dz, &params) > rho_of_z(z, &params));
    }

    #[test]
    fn derived_invariants(mu1 in -5.0f64..5.0, mu2 in 0.0f64..5.0, beta in 0.2f64..6.0, de in 1e-3f64..20.0) {
        let params = ModelParams::new(mu1, mu2, beta, 4.0).unwrap();
        let d = derive(&params, params.exterior_potential() + de).unwrap();
        prop_assert!((d.v1 - (mu1 * beta * beta - 0.25)).abs() <= 1e-14 * (1.0 + d.v1.abs()));
        prop_assert!((d.v2 - mu2 * beta * beta).abs() <= 1e-14 * d.v2);
        prop_assert!((d.a + d.b - (d.p + d.q) * 2.0).norm() <= 1e-14 * (d.p + d.q).norm());
        prop_assert_eq!(d.c, d.p * 2.0 + 0.5);
        prop_assert!(d.k > 0.0);
        prop_assert!((d.kappa * d.kappa - (d.energy * beta * beta - 0.25)).norm() < 1e-12 * (1.0 + (d.energy * beta * beta).abs()));
    }
}
