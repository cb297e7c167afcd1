//! Discrete Fourier re-expansion of smooth Alpert coefficient sequences,
//! wavelet packets, Dirichlet and quadratic Dirichlet kernels, and
//! decoupling of functions with disjoint effective supports.

pub mod decouple;
pub mod dirichlet;
pub mod seqineq;
pub mod sequence;

pub use decouple::{decouple_check, decouple_measure, translated_dirichlet_family, DecouplingReport, TaggedFunction};
pub use dirichlet::{
    dirichlet, dirichlet_direct, dirichlet_l4, gamma_lambda, order_for, period_l1, period_l4, quadratic_dirichlet,
    quadruple_count, write_kernel_trace, DirichletSpec,
};
pub use seqineq::{amplitude_samples, averaged_amplitudes, seq_inequality, seq_l2, seq_linf, SeqBound, SeqL2};
pub use sequence::{coeff_sequence, packet, packet_from_sequence, reexpand, CoeffSequence, DftBasis, Reexpansion};
