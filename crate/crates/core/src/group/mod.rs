//! Tables, group elements and moves, plus the walk engine.
//!
//! A table walk `B_t` started at `x` is `x + C_t`, where `C_t` is a walk on the
//! group `G` of zero-margin tables. `G` is handled through coordinates in the
//! basis `B_{a,b}`, in which the move `A_{i,j,k,l}` becomes the all-ones box
//! `[i, j-1] x [k, l-1]`.

mod element;
mod moves;
mod table;
mod walk;

pub use element::{from_coordinates, group_order, to_coordinates, GroupElement};
pub use moves::{move_delta, sample_move, Move, MoveSet, Sign};
pub use table::{validate_table, PackedBinaryTable, TableState};
pub use walk::{run_walk, run_walk_observed, TrajectoryRecord, WalkConfig, Walker};
