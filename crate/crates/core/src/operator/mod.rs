//! Elliptic R-matrices, their products along reduced words, the bar
//! representation, and closed forms of the operators Ŷ^λ.
//!
//! Functions live on `p ∈ h̊*_ℂ` in ᾱ-coordinates; a root `α = ᾱ + cδ`
//! evaluates to `z_α(p) = (ᾱ|p) + cκ`, and translations act by
//! `(t_λ f)(p) = f(p − κλ)`, so `t_{−ε_j}` moves `x_j = (ε_j|p)` by `+κ`.

mod algebra;
mod bar;
mod closed;
mod context;
mod rmatrix;

pub use algebra::{element_json, Coefficient, FactorLabel, Monomial, Operator, Term};
pub use bar::{bar_product, bar_product_rhs, bar_r_matrix, bar_r_matrix_with_eta, bar_y_operator, word_gauges};
pub use closed::{
    explicit_a1_operator, explicit_a2_2l_operator, minuscule_closed_form, quasi_minuscule_closed_form, A2lConstant, A2lParams, Orthonormal,
    QminConstant, PI_PERMUTATIONS,
};
pub use context::{Context, Couplings, Spectral};
pub use rmatrix::{
    h_alpha, h_alpha_at, leading_term, r_chain, r_matrix, unitarity_scalar, word_operator, y_operator, y_operator_with_word,
    UNITARITY_P, UNITARITY_S,
};
