//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers. Run with
//! `cargo test -p knotvol-core --test acceptance -- --nocapture`.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{direct_jones_b, direct_jones_e, lobachevsky_oracle, Lcg};
use knotvol_core::*;

#[test]
fn criterion_01_threshold_angle() {
    let start = Instant::now();
    let t = threshold_alpha0().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(t.bracket_width <= 1e-9, "bracket width {}", t.bracket_width);
    assert!(
        (t.value - 1.7647826175).abs() <= 1e-6,
        "alpha0 = {}",
        t.value
    );
    assert!(elapsed < 5.0, "took {elapsed:.2}s");
    println!(
        "criterion 01 PASS: alpha0 = {:.10} (published 1.7647826175), bracket {:.1e}, {elapsed:.2}s",
        t.value, t.bracket_width
    );
}

#[test]
fn criterion_02_equal_angle_bound() {
    let start = Instant::now();
    let t = equal_angle_bound_b().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(t.bracket_width <= 1e-9);
    assert!(
        (t.value - 2.8225471591).abs() <= 1e-6,
        "bound = {}",
        t.value
    );
    assert!(elapsed < 10.0, "took {elapsed:.2}s");
    println!(
        "criterion 02 PASS: equal-angle bound = {:.10} (published 2.8225471591), bracket {:.1e}, {elapsed:.2}s",
        t.value, t.bracket_width
    );
}

#[test]
fn criterion_03_volume_anchors() {
    let oracle_e = 4.0 * lobachevsky_oracle(PI / 6.0, 10_000_000);
    let oracle_b = 16.0 * lobachevsky_oracle(PI / 4.0, 10_000_000);
    let vol_e = vol_cone_e(0.0).unwrap().volume;
    let vol_b = vol_cone_b([0.0; 3]).unwrap().volume;
    assert!((vol_e - oracle_e).abs() <= 1e-9, "{vol_e} vs {oracle_e}");
    assert!((vol_b - oracle_b).abs() <= 1e-9, "{vol_b} vs {oracle_b}");
    assert!((vol_e - 2.0298832128).abs() <= 1e-9);
    assert!((vol_b - 7.3277247535).abs() <= 1e-9);
    println!(
        "criterion 03 PASS: vol_e(0) = {vol_e:.10} vs oracle {oracle_e:.10}; vol_b(0) = {vol_b:.10} vs oracle {oracle_b:.10}"
    );
}

#[test]
fn criterion_04_volume_potential_identity() {
    let mut rng = Lcg(0xC0FFEE);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let alpha = rng.next_f64() * (2.0 * PI / 3.0 - 1e-6);
        let spec = PotentialSpec::e(alpha).unwrap();
        let x0 = critical_points(&spec).unwrap().x0();
        let diff = (vol_cone_e(alpha).unwrap().volume - 2.0 * im_phi_real(&spec, x0)).abs();
        worst = worst.max(diff);
    }
    for _ in 0..1000 {
        let a = [
            rng.next_f64() * (PI - 1e-6),
            rng.next_f64() * (PI - 1e-6),
            rng.next_f64() * (PI - 1e-6),
        ];
        let spec = PotentialSpec::b(a).unwrap();
        let x0 = critical_points(&spec).unwrap().x0();
        let diff = (vol_cone_b(a).unwrap().volume - 2.0 * im_phi_real(&spec, x0)).abs();
        worst = worst.max(diff);
    }
    assert!(worst <= 1e-10, "worst deviation {worst:.3e}");
    println!("criterion 04 PASS: max |vol - 2 Im Phi(x0)| = {worst:.3e} over 2000 configurations");
}

#[test]
fn criterion_05_limit_convergence() {
    let start = Instant::now();
    // single component: positive error shrinking in r, small against the
    // volume at the largest level, extrapolation within 1e-2
    for &alpha in &[0.0, 0.5, 1.0] {
        let angles = ConeAngles::e(alpha).unwrap();
        let study = convergence_study(&[501, 1001, 2001], &angles, Branch::Minus).unwrap();
        let mut last = f64::INFINITY;
        for rec in &study.records {
            assert!(rec.error > 0.0, "alpha = {alpha}, r = {}", rec.r);
            assert!(rec.error < last, "alpha = {alpha}, r = {}", rec.r);
            last = rec.error;
        }
        let final_rec = study.records.last().unwrap();
        assert!(
            final_rec.error / final_rec.target <= 0.05,
            "alpha = {alpha}: relative error {} at r = 2001",
            final_rec.error / final_rec.target
        );
        assert!(
            study.limit_error.abs() <= 1e-2,
            "alpha = {alpha}: extrapolation error {}",
            study.limit_error
        );
        println!(
            "criterion 05 (E, alpha = {alpha}): error(2001) = {:+.4} ({:.3}% of vol), extrapolated limit off by {:+.2e}",
            final_rec.error,
            100.0 * final_rec.error / final_rec.target,
            study.limit_error
        );
    }
    // rings at the complete structure
    let angles = ConeAngles::b([0.0; 3]).unwrap();
    let study = convergence_study(&[251, 501, 1001], &angles, Branch::Minus).unwrap();
    let mut last = f64::INFINITY;
    for rec in &study.records {
        assert!(rec.error.abs() < last, "r = {}", rec.r);
        last = rec.error.abs();
    }
    let final_rec = study.records.last().unwrap();
    assert!(final_rec.error.abs() <= 0.25, "error {}", final_rec.error);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "took {elapsed:.1}s");
    println!(
        "criterion 05 PASS: B error(1001) = {:+.4} <= 0.25; total {elapsed:.1}s",
        final_rec.error
    );
}

#[test]
fn criterion_06_sign_partition_exhaustive() {
    let start = Instant::now();
    let mut checked_e = 0u64;
    let mut checked_b = 0u64;
    for r in (5..=201u32).step_by(2) {
        let ctx = RootContext::new(r).unwrap();
        for j2 in 0..=r - 2 {
            let w = Weights::from_doubled_single(r, j2).unwrap();
            verify_partition_signs(&ctx, &w);
            checked_e += 1;
        }
        for a in 0..=r - 2 {
            for b in a..=r - 2 {
                for c in b..=r - 2 {
                    let w = Weights::from_doubled_triple(r, [a, b, c]).unwrap();
                    verify_partition_signs(&ctx, &w);
                    checked_b += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 06 PASS: sign patterns match the partition for {checked_e} single weights and {checked_b} triples, {elapsed:.1}s"
    );
}

fn verify_partition_signs(ctx: &RootContext, w: &Weights) {
    let partition = index_partition(ctx, w);
    let k_max = w.k_max(ctx.r());
    let signs: Vec<i8> = (0..=k_max)
        .map(|k| {
            let t = term(ctx, w, k).unwrap();
            assert_ne!(t.sign(), 0, "summand must not vanish");
            t.sign()
        })
        .collect();
    for (label, range) in partition.sets() {
        let alternating = !label.constant_sign();
        let ks: Vec<u32> = range.clone().collect();
        for pair in ks.windows(2) {
            let same = signs[pair[0] as usize] == signs[pair[1] as usize];
            if alternating {
                assert!(
                    !same,
                    "r = {}, {:?}: {} must alternate at k = {}",
                    ctx.r(),
                    w,
                    label.name(),
                    pair[1]
                );
            } else {
                assert!(
                    same,
                    "r = {}, {:?}: {} must keep its sign at k = {}",
                    ctx.r(),
                    w,
                    label.name(),
                    pair[1]
                );
            }
        }
    }
}

#[test]
fn criterion_07_quantum_dilog_identity() {
    for &r in &[5u32, 31, 101] {
        let mut worst: f64 = 0.0;
        let mut direct = num_complex::Complex64::new(1.0, 0.0);
        let s2 = num_complex::Complex64::from_polar(1.0, 4.0 * PI / r as f64);
        for n in 0..r {
            if n > 0 {
                direct *= num_complex::Complex64::new(1.0, 0.0) - s2.powi(n as i32);
            }
            let predicted = qd_pochhammer(r, n).unwrap();
            let rel = (predicted - direct).norm() / direct.norm();
            worst = worst.max(rel);
        }
        assert!(worst <= 1e-8, "r = {r}: worst relative error {worst:.3e}");
        println!("criterion 07 (r = {r}): max relative error {worst:.3e}");
    }
    println!("criterion 07 PASS: product identity within 1e-8 at r = 5, 31, 101");
}

#[test]
fn criterion_08_derivative_checks() {
    let h = 1e-5;
    let specs = [
        PotentialSpec::e(0.9).unwrap(),
        PotentialSpec::b([0.8, 1.1, 1.6]).unwrap(),
    ];
    let mut rng = Lcg(0xDEC0DE);
    for spec in &specs {
        let mut done = 0;
        let mut worst: f64 = 0.0;
        while done < 100 {
            let z = num_complex::Complex64::new(0.02 + rng.next_f64(), -1.0 + 2.0 * rng.next_f64());
            if knotvol_core::potential::near_branch_cut(spec, z, 10.0 * h) || z.im.abs() < 10.0 * h
            {
                continue;
            }
            let m = -4 + (rng.next_f64() * 8.0) as i32;
            let Ok((du, dv)) = partials(spec, m, z) else {
                continue;
            };
            let im_at =
                |p: num_complex::Complex64| phi(spec, p).unwrap().im + 2.0 * PI * m as f64 * p.im;
            let fdu = (im_at(z + num_complex::Complex64::new(h, 0.0))
                - im_at(z - num_complex::Complex64::new(h, 0.0)))
                / (2.0 * h);
            let fdv = (im_at(z + num_complex::Complex64::new(0.0, h))
                - im_at(z - num_complex::Complex64::new(0.0, h)))
                / (2.0 * h);
            let eu = (du - fdu).abs() / du.abs().max(1.0);
            let ev = (dv - fdv).abs() / dv.abs().max(1.0);
            assert!(eu <= 1e-6, "du at {z}: {du} vs {fdu}");
            assert!(ev <= 1e-6, "dv at {z}: {dv} vs {fdv}");
            worst = worst.max(eu.max(ev));
            done += 1;
        }
        println!(
            "criterion 08 ({:?}): 100 finite-difference checks, worst relative {worst:.3e}",
            spec.knot()
        );
    }
    // exact on-axis vertical derivative for the single component
    let spec = PotentialSpec::e(0.7).unwrap();
    for m in [-3i32, -1, 0, 2] {
        for &u in &[0.05, 0.2, 0.3] {
            let (_, dv) = partials(&spec, m, num_complex::Complex64::new(u, 0.0)).unwrap();
            assert!(
                (dv - (2 * m + 1) as f64 * PI).abs() <= 1e-9,
                "m = {m}, u = {u}: dv = {dv}"
            );
        }
    }
    println!("criterion 08 PASS: partials match finite differences; on-axis dv = (2m+1) pi");
}

#[test]
fn criterion_09_contour_existence() {
    let start = Instant::now();
    let grid_for = |spec: &PotentialSpec| GridSpec {
        u_min: -0.05,
        u_max: spec.angles().min_angle() / 2.0 + 0.1,
        v_min: -0.8,
        v_max: 0.8,
        nu: 601,
        nv: 321,
    };

    let spec_e = PotentialSpec::e(7.0 * PI / 12.0).unwrap();
    let level_e = default_level(&spec_e).unwrap();
    let g_e = grid_for(&spec_e);
    for (m, quadrant) in [(-1, Quadrant::First), (0, Quadrant::Fourth)] {
        let p = level_path(&spec_e, m, level_e, quadrant, &g_e)
            .unwrap()
            .unwrap_or_else(|| panic!("path must exist for m = {m}"));
        confirm_quadrant(&p, quadrant);
        println!(
            "criterion 09 (E, m = {m}): {} vertices, endpoints {:?}, arc length {:.4}",
            p.points.len(),
            p.endpoints,
            p.arc_length()
        );
    }

    let spec_b = PotentialSpec::b([8.0 * PI / 12.0, 9.0 * PI / 12.0, 10.0 * PI / 12.0]).unwrap();
    let level_b = default_level(&spec_b).unwrap();
    let g_b = grid_for(&spec_b);
    for (m, quadrant) in [(-4, Quadrant::First), (-3, Quadrant::Fourth)] {
        let p = level_path(&spec_b, m, level_b, quadrant, &g_b)
            .unwrap()
            .unwrap_or_else(|| panic!("path must exist for m = {m}"));
        confirm_quadrant(&p, quadrant);
        println!(
            "criterion 09 (B, m = {m}): {} vertices, endpoints {:?}, arc length {:.4}",
            p.points.len(),
            p.endpoints,
            p.arc_length()
        );
    }
    println!(
        "criterion 09 PASS: all four deformed paths exist and stay quadrant-confined, {:.1}s",
        start.elapsed().as_secs_f64()
    );
}

fn confirm_quadrant(p: &LevelPath, quadrant: Quadrant) {
    match quadrant {
        Quadrant::First => assert!(p.points.iter().all(|&(_, v)| v >= -1e-12)),
        Quadrant::Fourth => assert!(p.points.iter().all(|&(_, v)| v <= 1e-12)),
    }
    // one endpoint anchored on the real axis, the other on the axis or
    // pressed against a branch-cut wall
    assert!(p.endpoints.contains(&EndpointKind::Axis));
}

#[test]
fn criterion_10_region_consistency() {
    let start = Instant::now();
    // diagonal flip within one grid step of the equal-angle bound
    let bound = equal_angle_bound_b().unwrap().value;
    let steps = 40u32;
    let lo = PI / 2.0;
    let hi = PI - 1e-6;
    let step = (hi - lo) / (steps - 1) as f64;
    let mut flips = Vec::new();
    let mut prev = None;
    for i in 0..steps {
        let t = lo + step * i as f64;
        let sample = knotvol_core::asymptotics::classify_one([t, t, t]);
        if let Some(p) = prev {
            if p != sample.in_omega0 {
                flips.push(t);
            }
        }
        prev = Some(sample.in_omega0);
    }
    assert_eq!(flips.len(), 1, "diagonal must flip exactly once");
    assert!(
        (flips[0] - bound).abs() <= step + 1e-12,
        "flip at {} vs bound {bound}",
        flips[0]
    );

    // full cube at 40^3
    let grid = GridSpec3 { lo, hi, steps };
    let samples = omega0_classify(&grid);
    assert_eq!(samples.len(), 40 * 40 * 40);

    // permutation invariance over sampled index triples
    let n = steps as usize;
    let idx = |i: usize, j: usize, k: usize| i * n * n + j * n + k;
    let mut rng = Lcg(0xFACADE);
    for _ in 0..500 {
        let i = (rng.next_f64() * n as f64) as usize % n;
        let j = (rng.next_f64() * n as f64) as usize % n;
        let k = (rng.next_f64() * n as f64) as usize % n;
        let base = &samples[idx(i, j, k)];
        for (a, b, c) in [(j, i, k), (k, j, i), (i, k, j), (j, k, i), (k, i, j)] {
            let other = &samples[idx(a, b, c)];
            assert_eq!(base.in_omega0, other.in_omega0);
            assert_eq!(base.condition, other.condition);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "took {elapsed:.1}s");
    let inside = samples.iter().filter(|s| s.in_omega0).count();
    println!(
        "criterion 10 PASS: diagonal flips once at {:.4} (bound {bound:.4}); 40^3 cube classified in {elapsed:.1}s, {inside}/{} inside",
        flips[0],
        samples.len()
    );
}

#[test]
fn criterion_11_small_level_oracle_equivalence() {
    let mut worst_e: f64 = 0.0;
    for r in (5..=51u32).step_by(2) {
        let ctx = RootContext::new(r).unwrap();
        for j2 in 0..=r - 2 {
            let direct = direct_jones_e(r, j2);
            assert!(direct.im.abs() <= 1e-9 * (1.0 + direct.re.abs()));
            let got = colored_jones(&ctx, &Weights::from_doubled_single(r, j2).unwrap())
                .unwrap()
                .total;
            let rel = (got.to_f64() - direct.re).abs() / direct.re.abs();
            assert!(rel <= 1e-10, "r = {r}, 2j = {j2}: rel = {rel:.3e}");
            worst_e = worst_e.max(rel);
        }
    }
    let mut worst_b: f64 = 0.0;
    for r in (5..=21u32).step_by(2) {
        let ctx = RootContext::new(r).unwrap();
        for a in 0..=r - 2 {
            for b in a..=r - 2 {
                for c in b..=r - 2 {
                    let direct = direct_jones_b(r, [a, b, c]);
                    assert!(direct.im.abs() <= 1e-9 * (1.0 + direct.re.abs()));
                    let got =
                        colored_jones(&ctx, &Weights::from_doubled_triple(r, [a, b, c]).unwrap())
                            .unwrap()
                            .total;
                    let rel = (got.to_f64() - direct.re).abs() / direct.re.abs();
                    assert!(rel <= 1e-10, "r = {r}, 2j = ({a},{b},{c}): rel = {rel:.3e}");
                    worst_b = worst_b.max(rel);
                }
            }
        }
    }
    println!(
        "criterion 11 PASS: direct-summation agreement, worst relative {worst_e:.3e} (single) / {worst_b:.3e} (triple)"
    );
}
