/// Where data-parallel loops run.
///
/// `Parallel` uses the rayon pool when the `parallel` feature is on and falls
/// back to a sequential loop otherwise. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}
