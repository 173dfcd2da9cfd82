"""qoctsim: two-photon Michelson interferometry for quantum OCT.

Simulates coincidence interferograms from the biphoton spectral density and
sample response (numerical kernel quadrature plus closed forms for the four
parameter regimes) and reproduces the experimental processing chain:
FFT term separation, five-zone detector-efficiency calibration, envelope
extraction and Gaussian fits, plus the SPDC source brightness estimators.
"""

from .analytic import (
    GuardThresholds,
    RegimeCase,
    RegimeGuards,
    SpectralPeak,
    is_separable,
    spectral_layout,
)
from .analytic import interferogram as analytic_interferogram
from .analytic import terms as analytic_terms
from .dsp import (
    AnalysisResult,
    Channel,
    ComplexSpectrum,
    EfficiencyCurve,
    GaussianPeakFit,
    Measure,
    Zone,
    ZoneConfig,
    analyze_interferograms,
    axial_resolution,
    bandwidth_convert,
    broadening_correction,
    correct_and_combine,
    envelope,
    extract_term,
    fft_spectrum,
    fit_gaussian,
    zones,
)
from .engine import (
    Interferogram,
    Kernel,
    TermSet,
    default_tau_grid,
    interferogram,
    kernel,
    term,
    terms_on_grid,
)
from .errors import (
    CaseMismatch,
    ConfigError,
    EfficiencyOutOfRange,
    FileFormatError,
    FitNonConvergence,
    ImaginaryResult,
    NyquistViolation,
    OscillatoryIntegralWarning,
    OutOfRegimeWarning,
    QoctError,
    QuadratureError,
)
from .samples import MaterialLayer, SampleResponse, from_material, response
from .source import (
    SourceParams,
    SpectralRate,
    bandwidth_b,
    bandwidth_from_waist,
    bbo_reference_design,
    estimate_generated_rate,
    pair_rate,
    spectral_coincidence_efficiency,
    spectral_rate_s0,
)
from .spectra import BiphotonSpectrum, density, normalization

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "BiphotonSpectrum",
    "CaseMismatch",
    "Channel",
    "ComplexSpectrum",
    "ConfigError",
    "EfficiencyCurve",
    "EfficiencyOutOfRange",
    "FileFormatError",
    "FitNonConvergence",
    "GaussianPeakFit",
    "GuardThresholds",
    "ImaginaryResult",
    "Interferogram",
    "Kernel",
    "MaterialLayer",
    "Measure",
    "NyquistViolation",
    "OscillatoryIntegralWarning",
    "OutOfRegimeWarning",
    "QoctError",
    "QuadratureError",
    "RegimeCase",
    "RegimeGuards",
    "SampleResponse",
    "SourceParams",
    "SpectralPeak",
    "SpectralRate",
    "TermSet",
    "Zone",
    "ZoneConfig",
    "analytic_interferogram",
    "analytic_terms",
    "analyze_interferograms",
    "axial_resolution",
    "bandwidth_b",
    "bandwidth_convert",
    "bandwidth_from_waist",
    "bbo_reference_design",
    "broadening_correction",
    "correct_and_combine",
    "default_tau_grid",
    "density",
    "envelope",
    "estimate_generated_rate",
    "extract_term",
    "fft_spectrum",
    "fit_gaussian",
    "from_material",
    "interferogram",
    "is_separable",
    "kernel",
    "normalization",
    "pair_rate",
    "response",
    "spectral_coincidence_efficiency",
    "spectral_layout",
    "spectral_rate_s0",
    "term",
    "terms_on_grid",
    "zones",
]
