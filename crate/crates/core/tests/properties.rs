use proptest::prelude::*;
use swdft::bench::{predict_ops, random_array, Algorithm};
use swdft::oracle::{swdft_1d_naive, swdft_2d_naive, swdft_kd_naive, swfft_1d, swfft_2d, swfft_kd};
use swdft::tree1d::{tree_swdft_1d, StreamingTree1d};
use swdft::tree2d::{tree_swdft_2d, tree_swdft_2d_with, LoopOrder, StreamingTree2d, TreeOptions};
use swdft::treekd::tree_swdft_kd;
use swdft::{
    CoefficientArray, Complex64, MemoryBudget, NdArray, Normalization, OpCounter, WindowSpec,
};

fn bits(a: &CoefficientArray) -> Vec<(u64, u64)> {
    a.array()
        .data()
        .iter()
        .map(|z| (z.re.to_bits(), z.im.to_bits()))
        .collect()
}

fn diff(a: &CoefficientArray, b: &CoefficientArray) -> f64 {
    a.array().max_abs_diff(b.array()).unwrap()
}

/// Window exponents and extents at least as large as the window.
fn case_2d() -> impl Strategy<Value = ([u32; 2], [usize; 2], u64)> {
    (0u32..=3, 0u32..=3, 0usize..6, 0usize..6, any::<u64>())
        .prop_map(|(m0, m1, e0, e1, seed)| ([m0, m1], [(1 << m0) + e0, (1 << m1) + e1], seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_2d_matches_oracles((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let tree = tree_swdft_2d(&x, &spec).unwrap();
        prop_assert_eq!(bits(&tree), bits(&swfft_2d(&x, &spec).unwrap()));
        prop_assert!(diff(&tree, &swdft_2d_naive(&x, &spec).unwrap()) <= 1e-10);
    }

    #[test]
    fn tree_1d_matches_oracles(m in 0u32..=6, extra in 0usize..20, seed in any::<u64>()) {
        let x = random_array(&[(1 << m) + extra], seed);
        let spec = WindowSpec::from_exponents(&[m]).unwrap();
        let tree = tree_swdft_1d(&x, &spec).unwrap();
        prop_assert_eq!(bits(&tree), bits(&swfft_1d(&x, &spec).unwrap()));
        prop_assert!(diff(&tree, &swdft_1d_naive(&x, &spec).unwrap()) <= 1e-10);
    }

    #[test]
    fn tree_3d_matches_oracles(m in prop::array::uniform3(0u32..=2), extra in prop::array::uniform3(0usize..3), seed in any::<u64>()) {
        let dims: Vec<usize> = (0..3).map(|d| (1 << m[d]) + extra[d]).collect();
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let tree = tree_swdft_kd(&x, &spec).unwrap();
        prop_assert_eq!(bits(&tree), bits(&swfft_kd(&x, &spec).unwrap()));
        prop_assert!(diff(&tree, &swdft_kd_naive(&x, &spec).unwrap()) <= 1e-10);
    }

    #[test]
    fn counted_ops_equal_prediction((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let mut counter = OpCounter::new();
        tree_swdft_2d_with(&x, &spec, &TreeOptions::default(), &mut counter).unwrap();
        prop_assert_eq!(counter.total(), predict_ops(Algorithm::Tree, &dims, &spec).unwrap());
        prop_assert_eq!(counter.peak_elements(), 2 * (dims[0] * dims[1] * spec.window_len()) as u64);
    }

    #[test]
    fn loop_orders_agree((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let levels = tree_swdft_2d(&x, &spec).unwrap();
        for (loop_order, parallel) in [(LoopOrder::TreesOuter, false), (LoopOrder::LevelsOuter, true)] {
            let options = TreeOptions { loop_order, parallel, budget: MemoryBudget::default() };
            prop_assert_eq!(bits(&levels), bits(&tree_swdft_2d_with(&x, &spec, &options, &mut ()).unwrap()));
        }
    }

    #[test]
    fn parseval_per_window((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap().with_normalization(Normalization::Unitary);
        let out = tree_swdft_2d(&x, &spec).unwrap();
        let (n0, n1) = (spec.size(0), spec.size(1));
        for q0 in 0..out.positions()[0] {
            for q1 in 0..out.positions()[1] {
                let freq: f64 = out.window(&[q0, q1]).iter().map(|z| z.norm_sqr()).sum();
                let mut time = 0.0;
                for j0 in 0..n0 {
                    for j1 in 0..n1 {
                        time += x[&[q0 + j0, q1 + j1][..]].norm_sqr();
                    }
                }
                prop_assert!((freq - time).abs() <= 1e-9 * time);
            }
        }
    }

    #[test]
    fn linear((m, dims, seed) in case_2d(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let x = random_array(&dims, seed);
        let y = random_array(&dims, seed ^ 0xabcdef);
        let (a, b) = (Complex64::new(a, 0.5 * b), Complex64::new(b, -a));
        let mixed = NdArray::from_fn(&dims, |i| a * x[i] + b * y[i]);
        let (tx, ty, tm) = (
            tree_swdft_2d(&x, &spec).unwrap(),
            tree_swdft_2d(&y, &spec).unwrap(),
            tree_swdft_2d(&mixed, &spec).unwrap(),
        );
        for ((m, u), v) in tm.array().data().iter().zip(tx.array().data()).zip(ty.array().data()) {
            prop_assert!((m - (a * u + b * v)).norm() <= 1e-10);
        }
    }

    #[test]
    fn transpose_symmetry((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let flipped = WindowSpec::from_exponents(&[m[1], m[0]]).unwrap();
        let direct = tree_swdft_2d(&x, &spec).unwrap();
        let via_t = tree_swdft_2d(&x.permute_axes(&[1, 0]).unwrap(), &flipped).unwrap();
        let back = via_t.array().permute_axes(&[1, 0, 3, 2]).unwrap();
        prop_assert!(back.max_abs_diff(direct.array()).unwrap() <= 1e-10);
    }

    #[test]
    fn streams_match_batch((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let spec = WindowSpec::from_exponents(&m).unwrap();
        let batch = tree_swdft_2d(&x, &spec).unwrap();
        let mut stream = StreamingTree2d::new(dims[1], &spec).unwrap();
        let mut emitted = Vec::new();
        for row in x.data().chunks(dims[1]) {
            if let Some(slab) = stream.push_row(row).unwrap() {
                emitted.extend_from_slice(slab.data());
            }
        }
        prop_assert_eq!(emitted.as_slice(), batch.array().data());

        let line = random_array(&[dims[0] * dims[1]], seed);
        let spec1 = WindowSpec::from_exponents(&[m[0] + m[1]]).unwrap();
        let batch = tree_swdft_1d(&line, &spec1).unwrap();
        let mut stream = StreamingTree1d::new(&spec1).unwrap();
        let mut emitted = Vec::new();
        for &v in line.data() {
            if let Some(w) = stream.push(v).unwrap() {
                emitted.extend(w);
            }
        }
        prop_assert_eq!(emitted.as_slice(), batch.array().data());
    }

    #[test]
    fn normalizations_scale_the_raw_transform((m, dims, seed) in case_2d()) {
        let x = random_array(&dims, seed);
        let raw = tree_swdft_2d(&x, &WindowSpec::from_exponents(&m).unwrap()).unwrap();
        for mode in [Normalization::Paper2d, Normalization::Unitary] {
            let spec = WindowSpec::from_exponents(&m).unwrap().with_normalization(mode);
            let out = tree_swdft_2d(&x, &spec).unwrap();
            let f = mode.factor(&spec.sizes()).unwrap();
            prop_assert_eq!(out.normalization(), mode);
            for (o, r) in out.array().data().iter().zip(raw.array().data()) {
                prop_assert_eq!(*o, r * f);
            }
        }
    }
}
