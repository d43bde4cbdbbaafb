//! Closed-form moments in exact arithmetic.

pub mod counts;
pub mod functional;
pub mod gamma;
pub mod psi;

pub use counts::{
    adjacent_pair_expectation, cov_size_counts, cov_sized, cov_tree_counts, mean_count,
    mean_count_property, sigma_size, sigma_tree, stein_bound_rhs, var_count, var_count_property,
};
pub use functional::{
    asymptotic_mu_f, asymptotic_sigma2_f, mean_f, root_and_total, shape_mode, tny_bracket,
    toll_moments, var_f, PartialSum, TollMoments,
};
pub use gamma::{
    gamma_coeffs, gamma_limit, gamma_star, hat_gamma_coeffs, normalizer, pi_kn, pi_limit,
};
pub use psi::{
    degeneracy_fit_bst, degeneracy_fit_rrt, exact_var_via_psi, psi_bst, psi_rrt_exact, psi_rrt_mc,
    sigma2_via_psi, var_from_psi, PsiTable, RrtPsi,
};
