use ncplane::oracles::direct_partition_sum;
use ncplane::quantum::{energy, levels};
use ncplane::thermo::{
    boltzmann_weight, entropy, entropy_dual, entropy_sweep, entropy_theta_slope, free_energy, heat_capacity,
    heat_capacity_dual, internal_energy, linspace, partition_single, ThermoParams,
};
use ncplane::NCParams;

fn tp(n: u64, theta: f64) -> ThermoParams {
    ThermoParams::new(n, NCParams::unit(theta)).unwrap()
}

#[test]
fn commutative_partition_function() {
    for t in [0.1f64, 0.7, 3.0, 20.0] {
        let x = (-1.0 / t).exp();
        let z = partition_single(t, &tp(1, 0.0)).unwrap();
        assert!((z - x / (1.0 - x).powi(2)).abs() <= 1e-13 * z);
    }
}

#[test]
fn closed_form_matches_direct_sum() {
    for theta in [1.0, 0.3] {
        for t in [0.1, 1.0, 10.0] {
            let p = tp(1, theta);
            let z = partition_single(t, &p).unwrap();
            let d = direct_partition_sum(t, &p, 1e-15).unwrap();
            assert!(d.tail_bound <= 1e-15 * d.value);
            assert!((z - d.value).abs() <= 1e-12 * z, "theta {theta} T {t}: {z} vs {}", d.value);
        }
    }
}

#[test]
fn thermodynamic_identities() {
    for theta in [0.0, 0.8, -1.5] {
        let p = tp(3, theta);
        for t in [0.05, 0.4, 2.0, 15.0] {
            let (a, s, u) = (free_energy(t, &p).unwrap(), entropy(t, &p).unwrap(), internal_energy(t, &p).unwrap());
            assert!((u - (a + t * s)).abs() <= 1e-10 * u.abs().max(1.0));
            // the dual form differentiates A ≈ N a, so it carries an absolute
            // rounding floor of order ε·N a
            let sd = entropy_dual(t, &p).unwrap();
            assert!((s - sd).abs() <= 1e-9 * s + 1e-12, "{s} {sd}");
            let c = heat_capacity(t, &p).unwrap();
            let cd = heat_capacity_dual(t, &p).unwrap();
            assert!((c - cd).abs() <= 1e-8 * c + 1e-12, "{c} {cd}");
            assert!(c >= 0.0 && s > 0.0);
        }
    }
}

#[test]
fn even_in_theta() {
    for t in [0.2, 1.0, 5.0] {
        for th in [0.1, 0.9, 2.5] {
            let (a, b) = (tp(2, th), tp(2, -th));
            assert_eq!(partition_single(t, &a).unwrap(), partition_single(t, &b).unwrap());
            assert_eq!(entropy(t, &a).unwrap(), entropy(t, &b).unwrap());
            let (sa, sb) = (entropy_theta_slope(t, &a).unwrap(), entropy_theta_slope(t, &b).unwrap());
            assert!((sa + sb).abs() < 1e-15 * sa.abs().max(1.0));
        }
    }
}

#[test]
fn limits() {
    for theta in [0.0, 0.5, 2.0] {
        let p = tp(10, theta);
        let e0 = energy(0, 0, &p.params).unwrap();
        let u = internal_energy(0.01, &p).unwrap();
        assert!((u - 10.0 * e0).abs() < 1e-10, "{u}");
        assert!(entropy(1e-3, &p).unwrap() < 1e-10);
        let t = 1e4;
        let hi = internal_energy(t, &p).unwrap();
        assert!((hi / (2.0 * 10.0 * t) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn extensive_in_n() {
    for t in [0.3, 4.0] {
        let a1 = free_energy(t, &tp(5, 0.7)).unwrap();
        let a2 = free_energy(t, &tp(10, 0.7)).unwrap();
        assert!((a2 - 2.0 * a1).abs() <= 1e-13 * a2.abs());
    }
}

#[test]
fn boltzmann_weights_sum_to_one() {
    let p = tp(1, 0.6);
    let t = 0.8;
    let total: f64 = levels(80, &p.params)
        .unwrap()
        .iter()
        .map(|e| boltzmann_weight(e.n, e.two_j, t, &p).unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12, "{total}");
    let w0 = boltzmann_weight(0, 0, t, &p).unwrap();
    let w1 = boltzmann_weight(1, 1, t, &p).unwrap();
    let de = energy(1, 1, &p.params).unwrap() - energy(0, 0, &p.params).unwrap();
    assert!((w1 / w0 - (-de / t).exp()).abs() < 1e-14);
}

#[test]
fn entropy_grows_with_theta_and_temperature() {
    let temps = linspace(0.05, 5.0, 60);
    let thetas = linspace(0.0, 2.0, 40);
    let sw = entropy_sweep(&temps, &thetas, &tp(1, 0.0)).unwrap();
    assert_eq!(sw.points.len(), 2400);
    for i in 0..thetas.len() {
        for k in 1..temps.len() {
            assert!(sw.at(i, k).s > sw.at(i, k - 1).s);
        }
    }
    for k in 0..temps.len() {
        for i in 1..thetas.len() {
            assert!(sw.at(i, k).s > sw.at(i - 1, k).s, "T {} theta {}", temps[k], thetas[i]);
        }
    }
    for th in linspace(0.01, 3.0, 50) {
        assert!(entropy_theta_slope(0.2, &tp(1, th)).unwrap() > 0.0);
    }
    assert_eq!(entropy_theta_slope(0.2, &tp(1, 0.0)).unwrap(), 0.0);
}

#[test]
fn sweep_csv_layout() {
    let sw = entropy_sweep(&[0.5, 1.0], &[0.0, 1.0, 2.0], &tp(2, 0.0)).unwrap();
    let mut buf = Vec::new();
    sw.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "T,theta,Z1,A,S,U,Cv,S_per_NkB");
    assert_eq!(lines.len(), 7);
    assert!(sw.curves_script("thermo.csv", 2).contains("every ::5::6"));
    assert!(sw.surface_script("thermo.csv").contains("dgrid3d 3,2"));
    assert!(entropy_sweep(&[], &[0.0], &tp(1, 0.0)).is_err());
}

#[test]
fn invalid_inputs() {
    assert!(ThermoParams::new(0, NCParams::unit(0.0)).is_err());
    assert!(ThermoParams::new(1, NCParams::unit(0.0).with_omega(0.0)).is_err());
    let p = tp(1, 0.2);
    for t in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(entropy(t, &p).is_err());
        assert!(partition_single(t, &p).is_err());
    }
}
