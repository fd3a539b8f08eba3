//! Density-ratio computations and the distributional error bounds they
//! certify, for classical approximation pairs: sampling with vs without
//! replacement, hypergeometric vs binomial, binomial vs Poisson, beta vs
//! gamma (with its sphere, Dirichlet and spacings reductions), and normal vs
//! Student t. A rejection sampler demonstrates the operational meaning of the
//! ratio supremum, and a normal-extremes example shows how the machinery
//! degenerates when no finite ratio exists.
//!
//! All mass and density evaluation happens in the log domain;
//! exponentiation is deferred to the API edges.

pub mod bounds;
pub mod distributions;
pub mod divergence;
mod error;
pub mod quadrature;
pub mod ratio;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
pub use ratio::{Argmax, Method, RatioOutcome, RatioReport};

pub(crate) mod kahan {
    /// Neumaier-compensated accumulator; the correction survives terms larger
    /// than the running sum.
    #[derive(Debug, Clone, Copy, Default)]
    pub struct CompensatedSum {
        sum: f64,
        comp: f64,
    }

    impl CompensatedSum {
        pub fn new() -> Self {
            Self::default()
        }

        pub fn add(&mut self, term: f64) {
            let t = self.sum + term;
            if self.sum.abs() >= term.abs() {
                self.comp += (self.sum - t) + term;
            } else {
                self.comp += (term - t) + self.sum;
            }
            self.sum = t;
        }

        pub fn value(&self) -> f64 {
            self.sum + self.comp
        }
    }

    #[cfg(test)]
    mod tests {
        use super::CompensatedSum;

        #[test]
        fn recovers_cancelled_digits() {
            let mut s = CompensatedSum::new();
            s.add(1.0);
            for _ in 0..10 {
                s.add(1e-17);
            }
            assert_eq!(s.value(), 1.0 + 1e-16);
        }
    }
}
