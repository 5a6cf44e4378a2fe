use sbh::auxball::{
    blowup_family, blowup_rescale, boggio_green, largest_convergent_lambda, clamped_unit_source, hardy_sobolev_check, load_or_build,
    picard_minimal, pohozaev_residual, read_kernel, ring_kernel, solve_with_amplitude, t_apply, write_kernel,
    BallKernel, FSpec, GridSpec,
};
use sbh::Error;
use std::io::BufReader;
use std::sync::OnceLock;

fn kernel(n: i64) -> &'static BallKernel {
    static K6: OnceLock<BallKernel> = OnceLock::new();
    static K8: OnceLock<BallKernel> = OnceLock::new();
    static K10: OnceLock<BallKernel> = OnceLock::new();
    let cell = match n {
        6 => &K6,
        8 => &K8,
        _ => &K10,
    };
    cell.get_or_init(|| BallKernel::build(GridSpec::new(n, -2.0, 12, 8)).unwrap())
}

/// `u = r² - 2r⁴ + r⁶` is clamped at `r = 1` and `Δ²u = -16N(N+2) + 24(N+2)(N+4) r²`.
fn poly_source(n: i64, r: f64) -> f64 {
    let nf = n as f64;
    -16.0 * nf * (nf + 2.0) + 24.0 * (nf + 2.0) * (nf + 4.0) * r * r
}

fn sup_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn green_operator_matches_closed_forms() {
    for n in [6i64, 8, 10] {
        let k = kernel(n);
        let nodes = &k.grid.nodes;
        let ones = vec![1.0; nodes.len()];
        let u = k.green_apply(&ones);
        let want: Vec<f64> = nodes.iter().map(|&r| clamped_unit_source(n, r)).collect();
        let scale = clamped_unit_source(n, 0.0);
        assert!(sup_err(&u, &want) <= 1e-8 * scale, "N={n}: {}", sup_err(&u, &want) / scale);
        assert!((k.value_at_origin(&ones, false) - scale).abs() <= 1e-8 * scale);
        let f: Vec<f64> = nodes.iter().map(|&r| poly_source(n, r)).collect();
        let u = k.green_apply(&f);
        let want: Vec<f64> = nodes.iter().map(|&r| r * r - 2.0 * r.powi(4) + r.powi(6)).collect();
        assert!(sup_err(&u, &want) <= 1e-8, "N={n}: {}", sup_err(&u, &want));
    }
}

#[test]
fn green_function_properties() {
    for (r, s, c) in [(0.3, 0.6, 0.2), (0.9, 0.1, -0.7), (0.5, 0.5, 0.99)] {
        let g = boggio_green(10, r, s, c);
        assert!(g > 0.0);
        assert!((g - boggio_green(10, s, r, c)).abs() <= 1e-14 * g);
    }
    assert!(boggio_green(10, 1.0, 0.3, 0.1).abs() < 1e-14);
    for (r, s) in [(0.2, 0.7), (0.45, 0.5), (0.05, 0.95)] {
        let a = ring_kernel(10, r, s).unwrap();
        let b = ring_kernel(10, s, r).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.abs(), "{r} {s}");
    }
}

#[test]
fn green_operator_is_self_adjoint_and_linear() {
    let k = kernel(8);
    let g = &k.grid;
    let nf = 8.0;
    let f1: Vec<f64> = g.nodes.iter().map(|r| 1.0 + r * r).collect();
    let f2: Vec<f64> = g.nodes.iter().map(|r| (3.0 * r).cos()).collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).zip(g.nodes.iter().zip(&g.weights)).map(|((x, y), (r, w))| x * y * w * r.powf(nf - 1.0)).sum()
    };
    let (g1, g2) = (k.green_apply(&f1), k.green_apply(&f2));
    let (a, b) = (dot(&f2, &g1), dot(&f1, &g2));
    assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()), "{a} {b}");
    let comb: Vec<f64> = f1.iter().zip(&f2).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
    let gc = k.green_apply(&comb);
    for i in 0..gc.len() {
        assert!((gc[i] - (2.0 * g1[i] - 3.0 * g2[i])).abs() <= 1e-12 * (1.0 + gc[i].abs()));
    }
    let zero = k.green_apply(&vec![0.0; g.nodes.len()]);
    assert!(zero.iter().all(|v| *v == 0.0));
}

#[test]
fn fixed_point_map_properties() {
    let k = kernel(10);
    let m = k.len();
    let u: Vec<f64> = k.grid.nodes.iter().map(|r| 1.0 - r * r).collect();
    let t1 = t_apply(k, &u, 1.0, 2.0);
    let t3 = t_apply(k, &u, 3.0, 2.0);
    assert!(t1.iter().all(|v| *v > 0.0));
    assert!(t1.windows(2).all(|w| w[1] <= w[0]));
    for i in 0..m {
        assert!((t3[i] - 3.0 * t1[i]).abs() <= 1e-13 * t3[i]);
    }
    let bigger: Vec<f64> = u.iter().map(|v| v + 0.5).collect();
    let tb = t_apply(k, &bigger, 1.0, 2.0);
    assert!(tb.iter().zip(&t1).all(|(a, b)| a >= b));
}

#[test]
fn picard_minimal_branch() {
    let k = kernel(10);
    let z = picard_minimal(k, 0.0, 2.0, 1e-12, 100).unwrap();
    assert!(z.converged && z.u.iter().all(|v| *v == 0.0) && z.u0 == 0.0);
    let s = picard_minimal(k, 10.0, 2.0, 1e-12, 500).unwrap();
    assert!(s.converged && s.monotone && s.residual <= 1e-10, "{s:?}");
    assert!(s.u.iter().all(|v| *v > 0.0));
    assert!(s.u0 >= s.u[0]);
    let s2 = picard_minimal(k, 10.0 * (1.0 + 1e-6), 2.0, 1e-12, 500).unwrap();
    assert!(s2.u0 > s.u0 && s2.u0 - s.u0 <= 1e-4 * s.u0);
    assert!(matches!(picard_minimal(k, 1e9, 2.0, 1e-12, 500), Err(Error::LambdaTooLarge(_))));
    assert!(picard_minimal(k, -1.0, 2.0, 1e-12, 10).is_err());
}

#[test]
fn pohozaev_identity_converges() {
    let p = 2.0;
    let mut res = Vec::new();
    for panels in [8usize, 16] {
        let k = BallKernel::build(GridSpec::new(10, -2.0, panels, 8)).unwrap();
        let s = picard_minimal(&k, 10.0, p, 1e-13, 500).unwrap();
        let r = pohozaev_residual(&k.grid, &s.u, &FSpec { lambda: 10.0, p, alpha_w: -2.0 });
        res.push(r.residual);
    }
    assert!(res[1] <= 1e-3, "{res:?}");
    assert!(res[1] < res[0], "{res:?}");
    let z = vec![0.0; kernel(10).len()];
    let r0 = pohozaev_residual(&kernel(10).grid, &z, &FSpec { lambda: 0.0, p, alpha_w: -2.0 });
    assert_eq!(r0.residual, 0.0);
}

#[test]
fn hardy_sobolev_quotient() {
    let k = kernel(10);
    let u: Vec<f64> = k.grid.nodes.iter().map(|&r| clamped_unit_source(10, r)).collect();
    for beta in [0.0, 1.0, 2.5] {
        let q = hardy_sobolev_check(&k.grid, &u, beta);
        assert!(q > 0.0 && q.is_finite());
        let big: Vec<f64> = u.iter().map(|v| 7.0 * v).collect();
        let qb = hardy_sobolev_check(&k.grid, &big, beta);
        assert!((q - qb).abs() <= 1e-10 * q, "beta={beta}");
    }
    assert_eq!(hardy_sobolev_check(&k.grid, &vec![0.0; k.len()], 1.0), 0.0);
}

#[test]
fn amplitude_family() {
    let k = kernel(10);
    let p = 2.0;
    let fam = blowup_family(k, p, &[1.0, 10.0, 100.0]).unwrap();
    assert_eq!(fam.len(), 3);
    for s in &fam {
        assert!(s.lambda > 0.0 && s.residual < 1e-10);
        let direct = t_apply(k, &s.u, s.lambda, p);
        assert!(sup_err(&direct, &s.u) <= 1e-9 * s.u0);
    }
    let rep = blowup_rescale(k, p, &fam, 2.0, 0.5).unwrap();
    assert_eq!(rep.expected_exponent, -2.0);
    assert!(rep.members.windows(2).all(|w| w[1].r_k < w[0].r_k));
    for m in &rep.members {
        assert!(m.v.iter().all(|v| *v <= 1.0 + 1e-9));
    }
    assert!(blowup_rescale(k, p, &fam[..1], 2.0, 0.5).is_err());
    assert!(solve_with_amplitude(k, p, -1.0, None).is_err());
}

#[test]
fn kernel_cache_round_trip() {
    let k = BallKernel::build(GridSpec::new(8, -1.0, 3, 4)).unwrap();
    let mut buf = Vec::new();
    write_kernel(&k, &mut buf).unwrap();
    let back = read_kernel(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back, k);
    assert!(read_kernel(BufReader::new(&b"# something else\n"[..])).is_err());
    let path = std::env::temp_dir().join(format!("sbh-kernel-{}.txt", std::process::id()));
    let _ = std::fs::remove_file(&path);
    let a = load_or_build(&path, k.spec()).unwrap();
    let b = load_or_build(&path, k.spec()).unwrap();
    assert_eq!(a, k);
    assert_eq!(b, k);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn grid_rejects_bad_specs() {
    assert!(BallKernel::build(GridSpec::new(4, -1.0, 8, 8)).is_err());
    assert!(BallKernel::build(GridSpec::new(8, -1.0, 1, 8)).is_err());
}

#[test]
fn picard_breakdown_bracket() {
    let k = kernel(10);
    let (lo, hi) = largest_convergent_lambda(k, 2.0, 1.0, 20).unwrap();
    assert!(lo < hi && (hi - lo) <= 1e-5 * hi);
    assert!(picard_minimal(k, lo, 2.0, 1e-10, 2000).unwrap().converged);
    let above = picard_minimal(k, hi * 1.01, 2.0, 1e-10, 2000);
    assert!(!matches!(above, Ok(ref r) if r.converged));
    assert!(largest_convergent_lambda(k, 2.0, 0.0, 5).is_err());
}
