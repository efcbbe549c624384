//! Path simulation for the translation-invariant jump process.
//!
//! With the small-jump cutoff ε > 0 the retained jumps form a compound Poisson
//! process of rate `σ_{d-1} L(ε)`; each event consumes, in order, an
//! exponential waiting time, a jump length and a direction. Exits and hits are
//! therefore detected exactly at jump times.

mod model;
pub mod region;

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Dim;

pub use model::{
    sample_direction, small_jump_std_at, ExitRecord, JumpProcessModel, PathEvent, SmallJumpMode, DEFAULT_MAX_EVENTS,
};
pub use region::{Annulus, Ball, Complement, EmptySet, HalfAnnulus, Region};

/// Independent random stream for one path: the ChaCha stream number is the
/// path index, so results do not depend on scheduling.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// CSV log of path events: `t,x1[,x2[,x3]],radius`.
pub struct EventLog<W: Write> {
    out: W,
    d: Dim,
    error: Option<io::Error>,
}

impl<W: Write> EventLog<W> {
    pub fn new(mut out: W, d: Dim) -> io::Result<Self> {
        let coords: Vec<String> = (1..=d.get()).map(|i| format!("x{i}")).collect();
        writeln!(out, "t,{},radius", coords.join(","))?;
        Ok(EventLog { out, d, error: None })
    }

    pub fn record(&mut self, e: &PathEvent) {
        if self.error.is_some() {
            return;
        }
        let coords: Vec<String> = e.position.0[..self.d.get()].iter().map(|x| x.to_string()).collect();
        if let Err(err) = writeln!(self.out, "{},{},{}", e.t, coords.join(","), e.radius) {
            self.error = Some(err);
        }
    }

    pub fn finish(mut self) -> io::Result<W> {
        if let Some(err) = self.error.take() {
            return Err(err);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}
