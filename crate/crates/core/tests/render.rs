use beltrami::demo::DemoMu;
use beltrami::grid::GridSpec;
use beltrami::render::{orientation, render_checkerboard, write_csv};
use beltrami::solver::{SolveParams, SolverRegistry};

#[test]
fn solved_map_renders_without_folds() {
    let s = GridSpec::new(64, 2.0).unwrap();
    let mu = DemoMu::standard().coefficient(s).unwrap();
    let sol = SolverRegistry::with_defaults().solve("neumann", &mu, &SolveParams::default()).unwrap();
    let o = orientation(&sol.phi).unwrap();
    assert!(!o.is_reversing() && o.min_jacobian > 0.0);
    let img = render_checkerboard(&sol.phi, 8, 128).unwrap();
    let colors: std::collections::HashSet<[u8; 3]> = img.rgb.chunks(3).map(|p| [p[0], p[1], p[2]]).collect();
    assert!(colors.len() >= 2);
    let mut csv = Vec::new();
    write_csv(&sol.phi, &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 64 * 64);
}

#[test]
fn rejects_degenerate_requests() {
    let s = GridSpec::new(16, 1.0).unwrap();
    let id = beltrami::ComplexField::from_fn(s, |z| z);
    assert!(render_checkerboard(&id, 0, 64).is_err());
    assert!(render_checkerboard(&id, 4, 1).is_err());
}
