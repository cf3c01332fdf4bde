//! Invariants over randomized inputs.

use proptest::prelude::*;
use shrinkframe::io::{decode_pgm, encode_pgm, BankFile};
use shrinkframe::shrinkage::band_index;
use shrinkframe::training::{pair_terms, TrainingPair};
use shrinkframe::experiments::stats::SE_MULTIPLE;
use shrinkframe::experiments::{EnsembleSpec, Estimate};
use shrinkframe::pipeline::{add_gaussian_noise, NoiseSpec};
use shrinkframe::transform::verify_tight_frame;
use shrinkframe::{domain_errors, Image, KnotGrid, PiecewiseLinearSf, RedundantTransform, SfBank};

fn geometry() -> impl Strategy<Value = (usize, usize, usize, usize, usize)> {
    prop_oneof![Just(2usize), Just(4usize)].prop_flat_map(|w| {
        let divisors: Vec<usize> = (1..=w).filter(|d| w % d == 0).collect();
        (
            Just(w),
            proptest::sample::select(divisors.clone()),
            proptest::sample::select(divisors),
            1usize..4,
            1usize..4,
        )
            .prop_map(|(w, sx, sy, bx, by)| (w, sx, sy, bx * w, by * w))
    })
}

fn image(width: usize, height: usize) -> impl Strategy<Value = Image> {
    proptest::collection::vec(-100.0f64..100.0, width * height).prop_map(move |d| Image::new(width, height, d).unwrap())
}

fn frame_and_image() -> impl Strategy<Value = (RedundantTransform, Image)> {
    geometry().prop_flat_map(|(w, sx, sy, width, height)| {
        (Just(RedundantTransform::new(w, sx, sy, width, height).unwrap()), image(width, height))
    })
}

fn sf(m: usize) -> impl Strategy<Value = PiecewiseLinearSf> {
    (0.1f64..50.0, proptest::collection::vec(-50.0f64..50.0, m))
        .prop_map(move |(t, p)| PiecewiseLinearSf::new(KnotGrid::new(t, m).unwrap(), p).unwrap())
}

fn bank(window: usize) -> impl Strategy<Value = SfBank> {
    proptest::collection::vec(sf(5), window * window).prop_map(move |s| SfBank::new(window, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_and_reconstruction((t, x) in frame_and_image()) {
        let z = t.forward(&x).unwrap();
        let scale = x.norm().max(1.0);
        prop_assert!((z.norm() - x.norm()).abs() <= 1e-10 * scale);
        let back = t.adjoint(&z).unwrap();
        prop_assert!(back.sub(&x).unwrap().norm() <= 1e-10 * scale);
    }

    #[test]
    fn adjoint_identity((t, x) in frame_and_image(), seed in any::<u64>()) {
        let mut rng = shrinkframe::rng::CounterRng::new(seed);
        let mut z = t.empty_stack();
        z.as_mut_slice().iter_mut().for_each(|v| *v = rng.next_gaussian());
        let lhs: f64 = t.forward(&x).unwrap().as_slice().iter().zip(z.as_slice()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.samples().iter().zip(t.adjoint(&z).unwrap().samples()).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn adjoint_contracts((t, _x) in frame_and_image(), seed in any::<u64>()) {
        let mut rng = shrinkframe::rng::CounterRng::new(seed);
        let mut z = t.empty_stack();
        z.as_mut_slice().iter_mut().for_each(|v| *v = rng.next_gaussian());
        prop_assert!(t.adjoint(&z).unwrap().norm() <= z.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn offsets_are_shifted_unitary_transforms((t, x) in frame_and_image()) {
        let u = RedundantTransform::unitary(t.window(), t.width(), t.height()).unwrap();
        let z = t.forward(&x).unwrap();
        let k = (t.redundancy() as f64).sqrt();
        for s in 0..t.redundancy() {
            let (dx, dy) = t.shifts().offset(s);
            let zu = u.forward(&x.cyclic_shift(dx, dy)).unwrap();
            for b in 0..t.band_count() {
                for (a, c) in z.offset_slice(b, s).iter().zip(zu.band(b)) {
                    prop_assert!((a * k - c).abs() <= 1e-9 * (1.0 + c.abs()));
                }
            }
        }
    }

    #[test]
    fn unitary_band_round_trip_preserves_norm(w in prop_oneof![Just(2usize), Just(4usize)], x in image(8, 8)) {
        let u = RedundantTransform::unitary(w, 8, 8).unwrap();
        let z = u.forward(&x).unwrap();
        for b in 0..u.band_count() {
            let back = u.band_adjoint(b, z.band(b)).unwrap();
            let n: f64 = z.band(b).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((back.norm() - n).abs() <= 1e-10 * (1.0 + n));
        }
    }

    #[test]
    fn basis_weights_reconstruct_evaluation(f in sf(9), t in -200.0f64..200.0) {
        let w = f.grid().basis_weights(t);
        let via: f64 = w.iter().map(|(i, a)| a * f.params()[i]).sum();
        prop_assert!((via - f.evaluate(t)).abs() <= 1e-12 * (1.0 + via.abs()));
    }

    #[test]
    fn knots_are_mirrored(half in 0.01f64..1e4, m in 2usize..40) {
        let g = KnotGrid::new(half, m).unwrap();
        let k = g.knots();
        for j in 0..m {
            prop_assert_eq!(k[j], -k[m - 1 - j]);
        }
        if m % 2 == 1 {
            prop_assert_eq!(k[m / 2], 0.0);
        }
    }

    #[test]
    fn evaluation_is_lipschitz(f in sf(7), j in 0usize..7) {
        let eps = 1e-9;
        let l = f.max_slope();
        let t = f.grid().knot(j);
        for s in [t - eps, t, t + eps] {
            prop_assert!((f.evaluate(s + eps) - f.evaluate(s)).abs() <= l * eps * (1.0 + 1e-6) + 1e-12);
        }
    }

    #[test]
    fn shrinkage_is_elementwise((t, x) in frame_and_image(), rot in 1usize..5) {
        let g = KnotGrid::new(60.0, 5).unwrap();
        let params = vec![-40.0, -5.0, 0.0, 10.0, 70.0];
        let b = SfBank::new(t.window(), vec![PiecewiseLinearSf::new(g, params).unwrap(); t.band_count()]).unwrap();
        let z = t.forward(&x).unwrap();
        let mut zr = z.clone();
        for k in 0..t.band_count() {
            let n = zr.band(k).len();
            zr.band_mut(k).rotate_left(rot % n);
        }
        let mut out = b.apply(&z).unwrap();
        for k in 0..t.band_count() {
            let n = out.band(k).len();
            out.band_mut(k).rotate_left(rot % n);
        }
        prop_assert_eq!(b.apply(&zr).unwrap(), out);
    }

    #[test]
    fn denoise_is_linear_in_parameters(
        (t, y) in frame_and_image(),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let mut rng = shrinkframe::rng::CounterRng::new(seed);
        let grids: Vec<KnotGrid> = (0..t.band_count()).map(|_| KnotGrid::new(20.0 + 80.0 * rng.next_f64(), 5).unwrap()).collect();
        let id = SfBank::identity(t.window(), &grids).unwrap();
        let p1: Vec<f64> = (0..id.flat_params().len()).map(|_| 10.0 * rng.next_gaussian()).collect();
        let p2: Vec<f64> = (0..p1.len()).map(|_| 10.0 * rng.next_gaussian()).collect();
        let mix: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| alpha * a + beta * b).collect();
        let d = |p: &[f64]| shrinkframe::denoise(&y, &t, &id.with_flat_params(p).unwrap()).unwrap();
        let lhs = d(&mix);
        let rhs = d(&p1).scaled(alpha).add(&d(&p2).scaled(beta)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn noise_norm_is_preserved_by_the_frame((t, x) in frame_and_image()) {
        let y = Image::from_fn(x.width(), x.height(), |r, c| x.get(r, c) + ((r * 31 + c * 17) % 13) as f64 - 6.0);
        let id = SfBank::identity(t.window(), &vec![KnotGrid::new(10.0, 3).unwrap(); t.band_count()]).unwrap();
        let e = domain_errors(&x, &y, &t, &id).unwrap();
        prop_assert!((e.n_spatial - e.n_transform).abs() <= 1e-10 * (1.0 + e.n_spatial));
        prop_assert!((e.post_spatial - e.n_spatial).abs() <= 1e-10 * (1.0 + e.n_spatial));
        prop_assert!(e.post_transform + 1e-10 >= e.post_spatial);
    }

    #[test]
    fn objective_ordering_holds_per_sample((t, x) in frame_and_image(), seed in any::<u64>()) {
        let mut rng = shrinkframe::rng::CounterRng::new(seed);
        let y = Image::from_fn(x.width(), x.height(), |r, c| x.get(r, c) + 20.0 * rng.next_gaussian());
        let grids: Vec<KnotGrid> = (0..t.band_count()).map(|_| KnotGrid::new(50.0 + 100.0 * rng.next_f64(), 7).unwrap()).collect();
        let bank = shrinkframe::experiments::random_bank(t.window(), &grids, &mut rng).unwrap();
        let o = pair_terms(&t, &bank, &TrainingPair::new(x, y).unwrap()).unwrap().objectives();
        prop_assert!(o.delta1 >= o.delta2 - 1e-10);
        prop_assert!(o.delta2 >= o.delta3 - 1e-10);
    }

    #[test]
    fn pgm_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let mut rng = shrinkframe::rng::CounterRng::new(seed);
        let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
        bytes.extend((0..w * h).map(|_| rng.next_below(256) as u8));
        prop_assert_eq!(encode_pgm(&decode_pgm(&bytes).unwrap()), bytes);
    }

    #[test]
    fn bank_json_round_trip_is_bit_exact(b in bank(2)) {
        let file = BankFile::from_bank(&b, [1, 2]).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let back: BankFile = serde_json::from_str(&text).unwrap();
        let restored = back.to_bank().unwrap();
        for (a, c) in restored.flat_params().iter().zip(b.flat_params()) {
            prop_assert_eq!(a.to_bits(), c.to_bits());
        }
        for (ga, gc) in restored.grids().iter().zip(b.grids()) {
            prop_assert_eq!(ga.half_range().to_bits(), gc.half_range().to_bits());
        }
        prop_assert_eq!(back.band_index, band_index(2).unwrap());
    }

    #[test]
    fn noise_is_reproducible(x in image(8, 8), sigma in 0.0f64..50.0, seed in any::<u64>()) {
        let spec = NoiseSpec { sigma, seed };
        let a = add_gaussian_noise(&x, spec).unwrap();
        let b = add_gaussian_noise(&x, spec).unwrap();
        prop_assert!(a.samples().iter().zip(b.samples()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn scaled_frame_is_not_tight(scale in prop_oneof![0.1f64..0.45, 0.55f64..2.0]) {
        let t = RedundantTransform::new(4, 2, 2, 8, 8).unwrap().with_scale(scale);
        prop_assert!(!verify_tight_frame(&t, 5, 1e-10, 3).unwrap().passed);
    }
}

#[test]
fn stationary_ensemble_is_zero_mean_and_shift_invariant() {
    let mut spec = EnsembleSpec::stationary(16, 16, 400, 11);
    spec.amplitude = 10.0;
    let images = spec.generate().unwrap();
    let n = images.len() as f64;
    let at = |r: usize, c: usize| images.iter().map(|x| x.get(r, c)).sum::<f64>() / n;
    let prod = |x: &shrinkframe::Image, (r0, c0): (usize, usize), (dr, dc): (usize, usize)| {
        x.get(r0, c0) * x.get((r0 + dr) % 16, (c0 + dc) % 16)
    };
    for (r, c) in [(0, 0), (5, 9), (15, 3)] {
        assert!(at(r, c).abs() < 1.5, "mean at ({r},{c}) = {}", at(r, c));
    }
    for lag in [(0, 0), (0, 1), (2, 3)] {
        let diffs: Vec<f64> = images.iter().map(|x| prod(x, (0, 0), lag) - prod(x, (7, 11), lag)).collect();
        let d = Estimate::from_samples(&diffs);
        assert!(d.mean.abs() <= SE_MULTIPLE * d.se, "lag {lag:?}: {} +- {}", d.mean, d.se);
    }
}
