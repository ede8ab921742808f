//! Library surface of the `natsamp` command-line tool, kept callable so
//! the experiment drivers can be exercised directly in tests.

pub mod error;
pub mod io;
pub mod run;
pub mod spec;

pub use error::{CliError, Result};
pub use run::{run_bank, run_convert, run_render, run_sweep};
pub use spec::{
    Algorithm, BankSpec, ConvertSpec, InputSource, KernelChoice, RenderFormat, RenderSpec,
    SweepSpec,
};
