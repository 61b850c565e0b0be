use num_complex::Complex64;
use ncplane::quantum::eigen::ground_state_momentum;
use ncplane::quantum::operators::free_particle_grid;
use ncplane::quantum::{
    apply_angular_momentum, apply_hamiltonian, basis_kernel, effective_frequency, eigen_residual, eigenfunction, energy,
    free_particle_eigencheck, hermite, levels, oscillator_grid, transform, transform_conjugate, Axis, Basis, GaugeChoice,
    Grid2, GridFunction, Stencil,
};
use ncplane::{Error, NCParams};

const C0: Complex64 = Complex64::new(0.0, 0.0);

fn st() -> Stencil {
    Stencil::new(8).unwrap()
}

#[test]
fn effective_frequency_examples() {
    assert_eq!(effective_frequency(&NCParams::unit(0.0)).unwrap(), 1.0);
    let w = effective_frequency(&NCParams::unit(2.0)).unwrap();
    assert!((w - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(effective_frequency(&NCParams::unit(1.0).with_omega(0.0)).is_err());
}

#[test]
fn energy_examples() {
    let p = NCParams::unit(1.0);
    let e = 1.5 * 5f64.sqrt();
    assert!((energy(2, 0, &p).unwrap() - e).abs() < 1e-14);
    assert!((energy(2, 2, &p).unwrap() - (e - 1.0)).abs() < 1e-14);
    assert!((energy(2, -2, &p).unwrap() - (e + 1.0)).abs() < 1e-14);
    assert_eq!(energy(0, 0, &NCParams::unit(0.0)).unwrap(), 1.0);
    assert!(energy(2, 1, &p).is_err());
    assert!(energy(1, 3, &p).is_err());
}

#[test]
fn commutative_degeneracy_and_spacing() {
    let l = levels(5, &NCParams::unit(0.0)).unwrap();
    assert_eq!(l.len(), 21);
    for n in 0..=5u32 {
        let shell: Vec<_> = l.iter().filter(|e| e.n == n).collect();
        assert_eq!(shell.len(), n as usize + 1);
        assert!(shell.iter().all(|e| e.energy == n as f64 + 1.0));
    }
    let p = NCParams::unit(0.7).with_m(1.4);
    let gap = 2.0 * p.hbar * p.omega * (1.0 + p.kappa()).sqrt();
    for n in 0..6u32 {
        for two_j in (-(n as i32)..=n as i32).step_by(2) {
            let d = energy(n + 2, two_j, &p).unwrap() - energy(n, two_j, &p).unwrap();
            assert!((d - gap).abs() < 1e-12);
        }
    }
    // theta splits every shell
    let split = levels(3, &p).unwrap();
    let mut e: Vec<f64> = split.iter().filter(|e| e.n == 3).map(|e| e.energy).collect();
    e.dedup();
    assert_eq!(e.len(), 4);
}

#[test]
fn hermite_examples() {
    assert_eq!(hermite(0, 0.5), 1.0);
    assert_eq!(hermite(1, 0.5), 1.0);
    assert_eq!(hermite(2, 0.5), -1.0);
    assert_eq!(hermite(3, 0.5), -5.0);
    assert_eq!(hermite(4, 1.0), 16.0 - 48.0 + 12.0);
}

#[test]
fn ground_state_is_gaussian() {
    let p = NCParams::unit(0.4).with_m(1.2);
    let psi = eigenfunction(0, 0, &p, oscillator_grid(&p, 8.0, 96).unwrap()).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-12);
    let worst = psi
        .map(|a, b, v| v - ground_state_momentum(a, b, &p).unwrap())
        .values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10);
}

#[test]
fn narrow_grid_is_a_truncation_error() {
    let p = NCParams::unit(0.4);
    let r = eigenfunction(2, 0, &p, oscillator_grid(&p, 3.0, 64).unwrap());
    assert!(matches!(r, Err(Error::Truncation(_))));
}

#[test]
fn low_levels_are_eigenstates() {
    let p = NCParams::unit(0.6);
    let g = oscillator_grid(&p, 8.0, 128).unwrap();
    let mut states = Vec::new();
    for e in levels(2, &p).unwrap() {
        let psi = eigenfunction(e.n, e.two_j, &p, g).unwrap();
        let r = eigen_residual(&apply_hamiltonian(&psi, &p, st()).unwrap(), &psi, e.energy, st()).unwrap();
        assert!(r < 1e-6, "n {} j {}: {r}", e.n, e.two_j);
        let lj = p.hbar * e.two_j as f64;
        let rj = eigen_residual(&apply_angular_momentum(&psi, &p, st()).unwrap(), &psi, lj, st()).unwrap();
        assert!(rj < 1e-6);
        states.push(psi);
    }
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let g = a.inner(b).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).norm() < 2e-6, "{i} {j}: {g}");
        }
    }
}

fn lumpy(g: Grid2) -> GridFunction {
    GridFunction::from_fn(Basis::Momentum, g, |a, b| {
        let r = (-(a - 0.5).powi(2) / 2.0 - (b + 0.3).powi(2) / 3.0).exp();
        Complex64::new(r * (1.0 + 0.2 * a), 0.3 * r * b)
    })
}

#[test]
fn hamiltonian_is_linear() {
    let p = NCParams::unit(0.8);
    let g = Grid2::square(9.0, 96).unwrap();
    let u = lumpy(g);
    let v = eigenfunction(1, -1, &p, g).unwrap();
    let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
    let lhs = apply_hamiltonian(&u.combine(&v, |x, y| a * x + b * y).unwrap(), &p, st()).unwrap();
    let hu = apply_hamiltonian(&u, &p, st()).unwrap();
    let hv = apply_hamiltonian(&v, &p, st()).unwrap();
    let rhs = hu.combine(&hv, |x, y| a * x + b * y).unwrap();
    assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
}

#[test]
fn hamiltonian_commutes_with_angular_momentum() {
    let p = NCParams::unit(0.8);
    let u = lumpy(Grid2::square(10.0, 160).unwrap());
    let hj = apply_hamiltonian(&apply_angular_momentum(&u, &p, st()).unwrap(), &p, st()).unwrap();
    let jh = apply_angular_momentum(&apply_hamiltonian(&u, &p, st()).unwrap(), &p, st()).unwrap();
    let band = 2 * st().half_width();
    let c = hj.distance_interior(&jh, band).unwrap() / u.norm_sq_interior(band).sqrt();
    assert!(c < 1e-5, "{c}");
}

#[test]
fn free_particle_plane_waves() {
    let g = free_particle_grid(10.0, 401, 2.0, 41).unwrap();
    for th in [0.0, 0.5, 3.0] {
        let p = NCParams::unit(th);
        let c = free_particle_eigencheck(1.0, 0.0, &p, g, st()).unwrap();
        assert_eq!(c.expected, 0.5);
        assert!((c.measured - 0.5).abs() < 1e-8 && c.residual < 1e-6, "{c:?}");
        let z = free_particle_eigencheck(0.0, 0.0, &p, g, st()).unwrap();
        assert_eq!(z.expected, 0.0);
        assert!(z.measured.abs() < 1e-12);
    }
    assert!(free_particle_eigencheck(0.0, 5.0, &NCParams::unit(0.0), g, st()).is_err());
}

#[test]
fn kernel_moduli() {
    let two_pi = 2.0 * std::f64::consts::PI;
    for th in [0.0, 0.9] {
        let p = NCParams::unit(th);
        let k = basis_kernel(Basis::YPx, Basis::XPy, (0.3, -1.1), (2.0, 0.7), &p, &GaugeChoice::FLAT).unwrap();
        assert!((k.value.norm() - 1.0 / two_pi).abs() < 1e-15);
        assert_eq!(k.delta, None);
        let back = basis_kernel(Basis::XPy, Basis::YPx, (2.0, 0.7), (0.3, -1.1), &p, &GaugeChoice::FLAT).unwrap();
        assert!((back.value - k.value.conj()).norm() < 1e-15);
        let m = basis_kernel(Basis::Momentum, Basis::XPy, (0.4, 0.2), (1.5, 0.2), &p, &GaugeChoice::FLAT).unwrap();
        assert!((m.value.norm() - two_pi.sqrt().recip()).abs() < 1e-15);
        assert_eq!(m.delta, Some("py"));
    }
    // theta = 0: plain Fourier phase
    let k = basis_kernel(Basis::Momentum, Basis::XPy, (0.4, 0.2), (1.5, 0.2), &NCParams::unit(0.0), &GaugeChoice::FLAT).unwrap();
    assert!((k.value.arg() - 0.6).abs() < 1e-15);
}

#[test]
fn curved_gauge_is_unsupported() {
    let g = GaugeChoice {
        measures: [2.0, 1.0, 1.0],
        holonomies: [0.0, 0.1],
    };
    assert!(!g.is_flat());
    let r = basis_kernel(Basis::XPy, Basis::YPx, (0.0, 0.0), (0.0, 0.0), &NCParams::unit(0.1), &g);
    assert!(matches!(r, Err(Error::Unsupported(_))));
}

#[test]
fn commutative_transform_is_fourier() {
    let p = NCParams::unit(0.0);
    let psi = eigenfunction(0, 0, &p, oscillator_grid(&p, 8.0, 64).unwrap()).unwrap();
    let x = transform_conjugate(&psi, Basis::XPy, &p).unwrap();
    let pi = std::f64::consts::PI;
    let worst = x
        .map(|x, py, v| v - (-0.5 * x * x - 0.5 * py * py).exp() / pi.sqrt())
        .values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn roundtrips_and_parseval() {
    let p = NCParams::unit(0.5);
    let psi = eigenfunction(2, 0, &p, oscillator_grid(&p, 8.0, 96).unwrap()).unwrap();
    for via in [Basis::XPy, Basis::YPx] {
        let mid = transform_conjugate(&psi, via, &p).unwrap();
        assert!((mid.norm() - 1.0).abs() < 1e-9, "{via:?}");
        let back = transform(&mid, Basis::Momentum, psi.grid, &p).unwrap();
        assert!(back.max_abs_diff(&psi).unwrap() < 1e-9, "{via:?}");
    }
    let xp = transform_conjugate(&psi, Basis::XPy, &p).unwrap();
    let yp = transform_conjugate(&xp, Basis::YPx, &p).unwrap();
    assert!((yp.norm() - 1.0).abs() < 1e-9);
    let direct = transform_conjugate(&psi, Basis::YPx, &p).unwrap();
    assert!(yp.max_abs_diff(&direct).unwrap() < 1e-9);
}

#[test]
fn momentum_phase_translates_x() {
    let p = NCParams::unit(0.7);
    let g = oscillator_grid(&p, 8.0, 96).unwrap();
    let psi = eigenfunction(1, 1, &p, g).unwrap();
    let shift = 5.0 * g.a.step;
    let moved = psi.map(|px, _, v| v * Complex64::from_polar(1.0, -shift * px / p.hbar));
    let out = transform_conjugate(&moved, Basis::XPy, &p).unwrap();
    let ref_grid = Grid2::new(Axis::new(out.grid.a.start - shift, g.a.step, g.a.len).unwrap(), out.grid.b);
    let reference = transform(&psi, Basis::XPy, ref_grid, &p).unwrap();
    let worst = out.values.iter().zip(&reference.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn coarse_grids_alias() {
    let p = NCParams::unit(0.5);
    let psi = eigenfunction(0, 0, &p, oscillator_grid(&p, 12.0, 40).unwrap()).unwrap();
    assert!(matches!(transform_conjugate(&psi, Basis::YPx, &p), Err(Error::Aliasing(_))));
}

#[test]
fn grid_csv_roundtrip() {
    let p = NCParams::unit(0.2);
    let psi = eigenfunction(1, 1, &p, oscillator_grid(&p, 7.0, 24).unwrap()).unwrap();
    let mut buf = Vec::new();
    psi.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("px,py,re,im\n"));
    let back = GridFunction::read_csv(&text).unwrap();
    assert_eq!(back.basis, Basis::Momentum);
    assert!(back.max_abs_diff(&psi).unwrap() < 1e-15);
    assert_eq!(GridFunction::zeros(Basis::XPy, psi.grid).norm(), 0.0);
    assert!(GridFunction::zeros(Basis::XPy, psi.grid).values.iter().all(|v| *v == C0));
}
