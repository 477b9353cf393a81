//! Reductions over sampled states: vertex statistics, structure factors,
//! monopole maps, entropic screening and mixing.

pub mod bessel;
pub mod export;
pub mod frequencies;
pub mod mixing;
pub mod monopoles;
pub mod screening;
pub mod structure;
pub mod symmetry;

pub use bessel::{bessel_k0, bessel_k1, fit_k0, BesselFit};
pub use export::{write_bins_csv, write_cross_section_csv, write_table_csv, GridDocument};
pub use frequencies::{vertex_frequencies, FrequencyCounts, VertexFrequencies};
pub use mixing::{bootstrap_mean, mixing_metrics, summarize_mixing, Interval, MixingMetrics, MixingSummary};
pub use monopoles::{monopole_map, MonopoleCounts, MonopoleMap};
pub use screening::{screening_profile, ScreeningBin, ScreeningProfile};
pub use structure::{
    fwhm, pinch_cross_section, structure_factor, CrossSection, CutAxis, QGrid, StructureFactorGrid, DEFAULT_Q_POINTS,
};
pub use symmetry::{d4_average, d4_images, symmetry_average, SubGrid};
