"""Band-limited superoscillating waveforms.

Modules
-------
specfun      special functions and sign/log-magnitude arithmetic
envelope     band-limited envelope families and the bump transform
euler        truncated Euler products (direct, gamma form, asymptotic)
waveform     envelope times product, validity and diagnostics
zero_ops     adding, removing and shifting zeros
spectral     DFT spectra, out-of-band energy, decay orders
yield_bound  superoscillation yield bounds and measurements
cli          command-line entry point
"""
from .envelope import EnvelopeSpec, Family
from .euler import CosineZeroParams, ZeroSet
from .specfun import LogSigned
from .spectral import SampledSignal
from .waveform import WaveformSpec

__all__ = ["EnvelopeSpec", "Family", "CosineZeroParams", "ZeroSet", "LogSigned", "SampledSignal", "WaveformSpec"]
__version__ = "0.1.0"
