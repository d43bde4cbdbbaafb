use fringe_core::couplings::{couple_binary, couple_rrt};
use fringe_core::devroye::{eval_cyclic_bst, eval_linear_bst, eval_linear_rrt, indicator_i, indicator_j, StampCircle};
use fringe_core::exact::{
    asymptotic_sigma2_f, cov_size_counts, degeneracy_fit_bst, mean_count, psi_bst, sigma_size, sigma_tree, var_count,
    var_count_property,
};
use fringe_core::rational::is_positive_definite;
use fringe_core::rng::SeedSpec;
use fringe_core::trees::{
    additive_functional, rotation_to_ordered, rrt_from_attachments, BinaryTree, OrderedTree, Toll, TreeKey, TreeMode,
    TreeRef,
};
use fringe_core::{rat, Model, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Bst), Just(Model::Rrt)]
}

/// Distinct stamps `1..=n` in random order.
fn stamps(max: usize) -> impl Strategy<Value = Vec<u32>> {
    (1..=max).prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
}

fn attachments(max: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max).prop_flat_map(|n| (0..n - 1).map(|i| 1..=i + 1).collect::<Vec<_>>())
}

fn mirror(t: &OrderedTree, v: usize) -> OrderedTree {
    let kids: Vec<OrderedTree> = t.children(v).iter().rev().map(|&c| mirror(t, c)).collect();
    OrderedTree::from_children(&kids.iter().collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn binary_keys_round_trip(s in stamps(30)) {
        let t = BinaryTree::from_stamps(&s);
        let key = TreeKey::of_binary_tree(&t);
        let back = TreeKey::parse(TreeMode::Binary, &key.to_text()).unwrap();
        prop_assert_eq!(&back, &key);
        prop_assert!(key.to_binary().unwrap().same_shape(&t));
        prop_assert_eq!(key.size(), s.len());
    }

    #[test]
    fn unordered_keys_ignore_child_order(p in attachments(30)) {
        let t = rrt_from_attachments(&p).unwrap();
        let m = mirror(&t, t.root());
        let a = TreeKey::of_ordered_tree(&t, TreeMode::Unordered).unwrap();
        let b = TreeKey::of_ordered_tree(&m, TreeMode::Unordered).unwrap();
        prop_assert_eq!(&a, &b);
        let text = a.to_text();
        prop_assert_eq!(TreeKey::parse(TreeMode::Unordered, &text).unwrap(), a);
        let o = TreeKey::of_ordered_tree(&t, TreeMode::Ordered).unwrap();
        prop_assert_eq!(TreeKey::parse(TreeMode::Ordered, &o.to_text()).unwrap(), o);
    }

    /// Every node roots exactly one fringe subtree.
    #[test]
    fn fringe_count_means_sum_to_n(m in model(), n in 1usize..80) {
        let total = (1..=n).fold(Rational::zero(), |acc, k| acc + mean_count(m, n, k));
        prop_assert_eq!(total, rat(n as i64, 1));
    }

    #[test]
    fn property_variance_reduces_to_plain(m in model(), n in 1usize..40, k in 1usize..40) {
        prop_assert_eq!(var_count_property(m, n, k, &Rational::one()), var_count(m, n, k));
        prop_assert!(var_count(m, n, k) >= Rational::zero());
    }

    #[test]
    fn size_covariances_are_symmetric(m in model(), n in 1usize..40, k in 1usize..12, j in 1usize..12) {
        prop_assert_eq!(cov_size_counts(m, n, k, j), cov_size_counts(m, n, j, k));
        prop_assert_eq!(sigma_size(m, k, j), sigma_size(m, j, k));
    }

    #[test]
    fn size_count_limit_matrix_is_positive_definite(m in model(), size in 1usize..7) {
        let g: Vec<Vec<Rational>> = (1..=size).map(|k| (1..=size).map(|j| sigma_size(m, k, j)).collect()).collect();
        prop_assert!(is_positive_definite(&g));
    }

    /// The single-count toll reproduces the diagonal slope.
    #[test]
    fn toll_double_sum_matches_diagonal_slope(m in model(), k in 1usize..7) {
        let s = asymptotic_sigma2_f(m, &Toll::SizeIndicator(k), k).unwrap();
        prop_assert_eq!(s.as_exact(), Some(&sigma_size(m, k, k)));
    }

    #[test]
    fn linear_form_is_the_tree_functional(s in stamps(40), k in 1usize..5) {
        let f = Toll::SizeIndicator(k);
        let t = BinaryTree::from_stamps(&s);
        let direct = additive_functional(TreeRef::from(&t), &f).unwrap();
        prop_assert_eq!(&eval_linear_bst(&s, &f).unwrap(), &direct);
        let c = StampCircle::from_linear(&s);
        prop_assert_eq!(&eval_cyclic_bst(&c, &f).unwrap(), &direct);
        let o = rotation_to_ordered(&t);
        prop_assert_eq!(
            eval_linear_rrt(&s, &f).unwrap(),
            additive_functional(TreeRef::from(&o), &f).unwrap()
        );
    }

    /// Differences of a sequence are degenerate: the fit exists and every
    /// psi vanishes.
    #[test]
    fn telescoping_tolls_are_degenerate(a in proptest::collection::vec(-50i64..50, 10)) {
        let mut a: Vec<Rational> = a.into_iter().map(|x| rat(x, 1)).collect();
        a[0] = Rational::zero();
        let f = |n: usize, j: usize, r: usize| &a[n] - &a[j] - &a[r];
        prop_assert!(degeneracy_fit_bst(f, 9).is_some());
        prop_assert!(psi_bst(f, 9).psi.iter().all(Zero::is_zero));
    }

    #[test]
    fn binary_coupling_forces_its_window(s in stamps(8), i in 1i64..10, k in 1usize..8, tie in any::<bool>()) {
        let c = StampCircle::from_linear(&s);
        let n = s.len();
        prop_assume!(k < n);
        let out = couple_binary(&c, i, k, tie).unwrap();
        prop_assert!(indicator_i(&out.circle, i, k));
        let mut a = c.ranks().to_vec();
        let mut b = out.circle.ranks().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        if indicator_i(&c, i, k) {
            prop_assert_eq!(out.circle.ranks(), c.ranks());
        }
    }

    #[test]
    fn recursive_coupling_forces_its_window(s in stamps(8), i in 1i64..10, k in 2usize..8, tie in any::<bool>()) {
        let mut ranks = vec![0];
        ranks.extend(&s);
        let c = StampCircle::new(ranks).unwrap();
        prop_assume!(k < c.period());
        let out = couple_rrt(&c, i, k, tie).unwrap();
        prop_assert!(indicator_j(&out.circle, i, k - 1));
    }

    #[test]
    fn streams_are_reproducible_and_distinct(seed in any::<u64>(), r in 0u64..1_000_000) {
        let spec = SeedSpec::new(seed);
        prop_assert_eq!(spec.stream(r).next_u64(), spec.stream(r).next_u64());
        prop_assert_ne!(spec.stream_key(r), spec.stream_key(r + 1));
    }
}

/// `Y = n − 2L + C`, so its slope is `4σ_LL − 4σ_LC + σ_CC`.
#[test]
fn protected_slope_from_tree_slopes() {
    let one = Rational::one();
    let third = rat(1, 3);
    let ll = sigma_tree(Model::Bst, 1, 1, &one, &one, 1);
    let cl = sigma_tree(Model::Bst, 3, 1, &third, &one, 2);
    let cc = sigma_tree(Model::Bst, 3, 3, &third, &third, 1);
    assert_eq!(ll, rat(2, 45));
    assert_eq!(cl, rat(2, 105));
    assert_eq!(cc, rat(43, 1575));
    assert_eq!(rat(4, 1) * ll - rat(4, 1) * cl + cc, rat(29, 225));
}
