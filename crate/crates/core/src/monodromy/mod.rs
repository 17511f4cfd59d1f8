//! Loops in configuration space, flat connections on them, and monodromy.

pub mod checks;
pub mod connection;
pub mod functor;
pub mod integrator;
pub mod path;

pub use checks::{ariki_koike_check, hn_relation_check, sahi_relation_check, ArikiKoikeReport};
pub use connection::{cherednik_connection, fuchsian_connection, fuchsian_connection_at, kz_connection, Connection, ConnectionKind};
pub use functor::{default_geometry, monodromy_functor, parallel_transport, MonodromyData, Transport};
pub use path::{braid_loop, star_loop, Generator, PathInConfig, Segment};
