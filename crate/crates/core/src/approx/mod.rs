//! Counting rational and algebraic approximants to parametrized sets.

pub mod compact;
pub mod count;
pub mod dist;
pub mod enumerate;
pub mod examples;
pub mod loja;
pub mod setspec;

pub use compact::{compactify, decompactify};
pub use count::{
    count_approximants, fit_exponent, fit_log_log, geometric_grid, near_locus, ApproxQuery, CountRecord, ExponentFit, Nearness,
    Witness,
};
pub use dist::{classify, dist_star, dist_star_intervals, DistBound, DistOptions, Threshold, Verdict};
pub use enumerate::{count_unit_rationals, enumerate_algebraic, enumerate_rationals, farey_length, height_window, rationals_in, PointGrid};
pub use examples::{liouville_truncation, reproduce_example, EXAMPLES, Check, ExampleParams, ExampleReport};
pub use loja::{approx_dist_star, loja_estimate, LojaEstimate};
pub use setspec::{parse_box, parse_rational, Locus, SetSpec};
