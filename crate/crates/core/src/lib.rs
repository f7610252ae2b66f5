//! Graph-phased Szegedy quantum walks.
//!
//! A classical Markov chain with column-stochastic transition matrix `G` is
//! quantized on the span of the `N^2` edge states `|i>_1 |j>_2`. One step of
//! the walk is `U_s(theta, phi) = S_w R(theta, phi)`: a phase rotation about
//! the states `|psi_i(phi)>` built from the columns of `G`, followed by a
//! swap of the two registers. Each node carries an APR phase `theta_i` and
//! each edge state a link phase `phi_ij`; `theta_i = pi` with no link
//! phases is the standard walk.
//!
//! The crate is organized as:
//!
//! * [`graph`]: transition matrices, adjacency normalization, graph families
//!   and marking;
//! * [`phases`]: APR and link phases;
//! * [`state`] and [`walk`]: the walk state as an `N x N` matrix and the
//!   O(N^2) evolution kernel;
//! * [`coin`]: casting between coined walks and Szegedy walks;
//! * [`oracle`]: dense `N^2 x N^2` operators for checking the kernel.
//!
//! ```
//! use szegedy::{graph, Register, SzegedyWalk};
//!
//! let g = graph::complete_graph(8).unwrap();
//! let walk = SzegedyWalk::standard(&g);
//! let mut state = walk.uniform_superposition();
//! for _ in 0..10 {
//!     walk.step_in_place(&mut state).unwrap();
//! }
//! let p = state.measure(Register::First).unwrap();
//! assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod coin;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod phases;
pub mod state;
pub mod walk;

pub use coin::{cast_to_szegedy, check_double_castability, szegedy_to_coins, CastResult, CoinSet, LemmaClass};
pub use error::{Result, WalkError};
pub use graph::{AdjacencyMatrix, MarkedSet, TransitionMatrix};
pub use oracle::DenseOperator;
pub use phases::PhaseConfig;
pub use state::{Register, WalkState};
pub use walk::{step_double, SzegedyWalk};

pub use num_complex::Complex64;
