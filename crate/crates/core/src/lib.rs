pub mod construction;
pub mod game;
pub mod gf2;
pub mod graph;
pub mod instance;
pub mod lift;
pub mod presets;
pub mod solver;
