//! Pockets, purses, wallets, separators and the density diagnostic.

mod density;
mod pocket;
mod separator;
mod wallet;

use thiserror::Error;

use crate::graph::Vertex;

pub use density::{density, density_from_counts, relative_density, Density, SubgraphSpec};
pub use pocket::{classify_pocket, find_deletable_pocket, is_k_deep, is_purse, Pocket, PocketSearch, SearchStats};
pub use separator::{low_degree_filter, planar_separator, shatter, LowDegree, Separator, Shattering};
pub use wallet::{find_wallet, find_wallet_with, Wallet, WalletOptions, WalletViolation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex {vertex} is not in the graph")]
    VertexOutOfRange { vertex: Vertex },
    #[error("vertex set does not induce a connected subgraph")]
    NotConnected,
    #[error("vertex {vertex} has degree {degree} > C = {c}")]
    DegreeTooHigh { vertex: Vertex, degree: usize, c: usize },
    #[error("not a subgraph of the host graph")]
    NotASubgraph,
}
