//! Exact-arithmetic construction of the closures.

pub mod algebra;
pub mod periodic;
pub mod spectral;
pub mod two_element;

pub use periodic::{construct_diffusion_symbol, decay_rate, decay_rate_through, SymbolSeries};
pub use spectral::{allowed_wavenumber_bands, two_element_eigenvalues, Band, Eigenpair};
pub use two_element::{two_element_series, two_element_series_with, Advection, TwoElementSeries};
