//! Independent reference implementations and input generators.

pub mod dyadic;
pub mod eval;
pub mod gen;
pub mod reference;

pub use dyadic::Dyadic;
pub use eval::{eval_exact, is_power_circuit_exact, BigEval, Evaluator, DEFAULT_BIT_BUDGET};
pub use gen::{
    gen_random_circuit, gen_random_power_circuit, gen_trivial_baumslag, gen_trivial_higman,
    gen_trivial_word, Group,
};
pub use reference::{
    wp_baumslag_reference, wp_higman_reference, Pair, RefVerdict, DEFAULT_EXP_CAP,
};
