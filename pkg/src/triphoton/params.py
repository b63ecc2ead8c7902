"""Physical parameter records, Doppler kinematics and dressed-state analysis.

Everything internal is in SI with angular frequencies (rad/s).  Human-unit
conversion (MHz, degC, mW, ...) happens once, in the config layer; see
triphoton.config.  Keeping a single internal convention avoids silent 2*pi
mistakes when mixing linewidths quoted as "2pi x 6 MHz" with detunings quoted
as bare MHz.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from math import pi, sqrt, log

import numpy as np

from .constants import CONST, PhysicalConstants
from .errors import InvalidParameterError

TWO_PI = 2.0 * pi

# Nominal dipole moment used when no absolute value is configured [C m].
# Absolute susceptibility scales are arbitrary by design; only ratios matter.
NOMINAL_DIPOLE = 1.0e-29


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VaporCell:
    """Vapor cell geometry and thermodynamic state.

    temperature [K], length_L [m], density_N [atoms/m^3].  ``od`` is the
    derived optical depth; it is filled in by ExperimentParams so that it is
    always consistent with optical_depth().
    """

    temperature: float
    length_L: float
    density_N: float
    od: float | None = None

    def __post_init__(self):
        if self.temperature <= 0:
            raise InvalidParameterError(f"temperature must be > 0 K, got {self.temperature}")
        if self.length_L <= 0:
            raise InvalidParameterError(f"length_L must be > 0 m, got {self.length_L}")
        if self.density_N <= 0:
            raise InvalidParameterError(f"density_N must be > 0, got {self.density_N}")


@dataclass(frozen=True)
class DecayRates:
    """Coherence decay rates gamma_ij [rad/s].

    gamma31 and gamma41 are the optical coherence rates and must be positive;
    the ground-state rates (gamma11, gamma22) and the two-photon rate gamma21
    are pure configuration inputs with no further physical model behind them.
    """

    gamma31: float
    gamma41: float
    gamma21: float
    gamma11: float
    gamma22: float
    gamma42: float

    def __post_init__(self):
        for name in ("gamma31", "gamma41", "gamma21", "gamma11", "gamma22", "gamma42"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if self.gamma31 <= 0 or self.gamma41 <= 0:
            raise InvalidParameterError("gamma31 and gamma41 must be > 0")


@dataclass(frozen=True)
class DriveFields:
    """Detunings, Rabi frequencies and input powers of the three drive fields.

    When a power is supplied (not None), the corresponding Rabi frequency is
    derived as omega_j = power_to_rabi_j * sqrt(power_j); otherwise the given
    Rabi frequency is authoritative.  power_to_rabi coefficients default to
    values back-fitted from the (P, Omega) pairs quoted for the reference
    configuration, assuming Omega proportional to sqrt(P).
    """

    delta1: float
    delta2: float
    delta3: float
    omega1: float
    omega2: float
    omega3: float
    power1: float | None = None
    power2: float | None = None
    power3: float | None = None
    # rad/s per sqrt(W); defaults back-fitted from (4 mW, 300 MHz),
    # (40 mW, 870 MHz), (15 mW, 533 MHz)
    power_to_rabi: tuple[float, float, float] = (
        TWO_PI * 300e6 / sqrt(4e-3),
        TWO_PI * 870e6 / sqrt(40e-3),
        TWO_PI * 533e6 / sqrt(15e-3),
    )

    def __post_init__(self):
        for j in (1, 2, 3):
            p = getattr(self, f"power{j}")
            if p is not None:
                if p < 0:
                    raise InvalidParameterError(f"power{j} must be >= 0")
                object.__setattr__(self, f"omega{j}", self.power_to_rabi[j - 1] * sqrt(p))
            if getattr(self, f"omega{j}") < 0:
                raise InvalidParameterError(f"omega{j} must be >= 0")

    def with_power2(self, power2: float) -> "DriveFields":
        """Convenience for power sweeps: new record with field-2 power set."""
        return dataclasses.replace(self, power2=power2)


@dataclass(frozen=True)
class SpectralFrame:
    """Atomic transition frequencies and central wavenumbers of the six waves.

    omega31 sits on the 795 nm line, omega41 and omega42 on the 780 nm line.
    kbar maps field labels {1,2,3,S1,S2,S3} to central wavenumbers [rad/m];
    propagation signs are +1 forward / -1 backward along z.  The kbar values
    satisfy perfect phase matching at line center by construction, so the
    phase mismatch is evaluated purely from the spectral offsets.
    """

    lambda1: float = 795e-9
    lambda2: float = 780e-9
    lambda3: float = 780e-9
    omega31: float = field(default=TWO_PI * CONST.c / 795e-9)
    omega41: float = field(default=TWO_PI * CONST.c / 780e-9)
    omega42: float = field(default=TWO_PI * CONST.c / 780e-9)
    kbar: dict = field(default_factory=lambda: {
        "1": TWO_PI / 795e-9, "S1": TWO_PI / 795e-9,
        "2": TWO_PI / 780e-9, "3": TWO_PI / 780e-9,
        "S2": TWO_PI / 780e-9, "S3": TWO_PI / 780e-9,
    })
    propagation_sign: dict = field(default_factory=lambda: {
        "1": +1, "2": +1, "3": +1, "S1": +1, "S2": +1, "S3": +1,
    })

    def __post_init__(self):
        for lbl, k in self.kbar.items():
            if k <= 0:
                raise InvalidParameterError(f"kbar[{lbl}] must be > 0")
        for w in (self.omega31, self.omega41, self.omega42):
            if w <= 0:
                raise InvalidParameterError("transition frequencies must be > 0")


@dataclass(frozen=True)
class DipoleMoments:
    """Electric dipole matrix elements [C m] and the free overall amplitude.

    Absolute dipole values are not known for this model; all default to the
    same nominal value and overall_scale_A absorbs every unknown prefactor,
    so only shapes and ratios of susceptibilities are meaningful.
    """

    mu13: float = NOMINAL_DIPOLE
    mu24: float = NOMINAL_DIPOLE
    mu23: float = NOMINAL_DIPOLE
    mu14: float = NOMINAL_DIPOLE
    overall_scale_A: float = 1.0

    def __post_init__(self):
        for name in ("mu13", "mu24", "mu23", "mu14"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0")


@dataclass(frozen=True)
class DetuningOffsets:
    """Spectral offsets of the three emitted photons from their line centers.

    Energy conservation requires delta_s1 + delta_s2 + delta_s3 = 0, so
    delta_s1 is always derived from the other two.
    """

    delta_s2: float
    delta_s3: float
    delta_s1: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "delta_s1", -(self.delta_s2 + self.delta_s3))


@dataclass(frozen=True)
class ResonanceSet:
    """Dressed-state resonance centers and effective linewidths [rad/s].

    centers_d2 holds the four delta2 resonances sorted ascending; centers_d1
    and centers_d3 the two-member +/- pairs (minus first).
    """

    centers_d1: tuple[float, float]
    centers_d2: tuple[float, float, float, float]
    centers_d3: tuple[float, float]
    eff_rabi_E2: float
    eff_rabi_E3: float
    linewidth_d2: float
    linewidth_d3: float


@dataclass(frozen=True)
class ExperimentParams:
    """Complete physical configuration of one simulated experiment."""

    cell: VaporCell
    rates: DecayRates
    drive: DriveFields
    frame: SpectralFrame = field(default_factory=SpectralFrame)
    dip: DipoleMoments = field(default_factory=DipoleMoments)
    const: PhysicalConstants = CONST

    def __post_init__(self):
        od = optical_depth(self.cell, self.rates, self.frame, self.dip)
        object.__setattr__(self, "cell", dataclasses.replace(self.cell, od=od))

    @property
    def sigma_v(self) -> float:
        """1-sigma thermal velocity sqrt(kB T / m) [m/s]."""
        return sqrt(self.const.kB * self.cell.temperature / self.const.mRb)


def default_params(temperature_K: float = 353.15) -> ExperimentParams:
    """The reference parameter set (hot-cell triphoton configuration).

    Gamma31 = Gamma41 = 2pi x 6 MHz, Gamma11 = Gamma22 = 0.4 Gamma41,
    Gamma21 = 0.2 Gamma41, Gamma42 = Gamma41 (not independently specified);
    Delta1 = -2 GHz, Delta2 = -150 MHz, Delta3 = 50 MHz;
    Omega1 = 300 MHz, Omega2 = 870 MHz, Omega3 = 533 MHz.
    """
    g41 = TWO_PI * 6e6
    rates = DecayRates(gamma31=g41, gamma41=g41, gamma21=0.2 * g41,
                       gamma11=0.4 * g41, gamma22=0.4 * g41, gamma42=g41)
    drive = DriveFields(delta1=-TWO_PI * 2e9, delta2=-TWO_PI * 150e6,
                        delta3=TWO_PI * 50e6, omega1=TWO_PI * 300e6,
                        omega2=TWO_PI * 870e6, omega3=TWO_PI * 533e6)
    cell = VaporCell(temperature=temperature_K, length_L=0.07, density_N=1.2e17)
    return ExperimentParams(cell=cell, rates=rates, drive=drive)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def maxwell_boltzmann_pdf(v, T: float):
    """1-D Maxwell-Boltzmann velocity density f(v) [s/m] at temperature T [K].

    f(v) = sqrt(m / 2 pi kB T) exp(-m v^2 / 2 kB T); even in v, peaks at 0.
    Accepts scalar or array v.
    """
    if T <= 0:
        raise InvalidParameterError(f"temperature must be > 0 K, got {T}")
    a = CONST.mRb / (2.0 * CONST.kB * T)
    return np.sqrt(a / pi) * np.exp(-a * np.square(v))


def doppler_detunings(v, drive: DriveFields, frame: SpectralFrame):
    """Velocity-shifted detunings (DeltaD1, DeltaD2, DeltaD3) [rad/s].

    DeltaD1 = Delta1 + v omega31/c  (counter-propagating shift on the 795 line)
    DeltaD2 = Delta2 - v omega42/c
    DeltaD3 = Delta3 + v omega42/c
    Accepts scalar or array v.
    """
    v = np.asarray(v, dtype=float)
    dd1 = drive.delta1 + v * frame.omega31 / CONST.c
    dd2 = drive.delta2 - v * frame.omega42 / CONST.c
    dd3 = drive.delta3 + v * frame.omega42 / CONST.c
    if dd1.ndim == 0:
        return float(dd1), float(dd2), float(dd3)
    return dd1, dd2, dd3


def effective_rabi(deltaD, omega, gammaA, gammaB):
    """Dressed-state effective Rabi frequency [rad/s].

    OmegaE = sqrt(DeltaD^2 + 4 |Omega|^2 + 4 gammaA gammaB).  Reduces to
    |DeltaD| when Omega and the gammas vanish, and to 2|Omega| on resonance
    with no decay.
    """
    if np.any(np.asarray(gammaA) < 0) or np.any(np.asarray(gammaB) < 0):
        raise InvalidParameterError("decay rates must be >= 0")
    return np.sqrt(np.square(deltaD) + 4.0 * np.square(np.abs(omega))
                   + 4.0 * gammaA * gammaB)


def resonance_set(params: ExperimentParams, v: float = 0.0) -> ResonanceSet:
    """Resonance centers and effective linewidths of chi5 at velocity v.

    delta1_pm = (DeltaD2 +/- OmegaE2) / (2 (1 - v/c))
    delta2_pmpm = (DeltaD3 - DeltaD2 +/- OmegaE2 +/- OmegaE3) / (2 (1 + v/c))
    delta3_pm = (-DeltaD3 +/- OmegaE3) / (2 (1 - v/c))
    with OmegaE2 = sqrt(DeltaD2^2 + 4|Omega2|^2 + 4 gamma21 gamma41),
    OmegaE3 = sqrt(DeltaD3^2 + 4|Omega3|^2 + 4 gamma11 gamma41), and the
    asymmetric-split effective linewidths
    Gamma_d2 = (gamma21+gamma41)/2 + gamma21 DeltaD2 / (DeltaD2 + OmegaE2),
    Gamma_d3 = (gamma11+gamma41)/2 + gamma11 DeltaD3 / (DeltaD3 + OmegaE3).
    """
    if abs(v) >= CONST.c:
        raise InvalidParameterError(f"|v| must be < c, got {v}")
    r, d = params.rates, params.drive
    _, dd2, dd3 = doppler_detunings(v, d, params.frame)
    oe2 = float(effective_rabi(dd2, d.omega2, r.gamma21, r.gamma41))
    oe3 = float(effective_rabi(dd3, d.omega3, r.gamma11, r.gamma41))
    wm = 1.0 - v / CONST.c
    wp = 1.0 + v / CONST.c
    c1 = tuple(sorted(((dd2 - oe2) / (2 * wm), (dd2 + oe2) / (2 * wm))))
    c2 = tuple(sorted((dd3 - dd2 + s2 * oe2 + s3 * oe3) / (2 * wp)
                      for s2 in (-1, 1) for s3 in (-1, 1)))
    c3 = tuple(sorted(((-dd3 - oe3) / (2 * wm), (-dd3 + oe3) / (2 * wm))))
    lw2 = 0.5 * (r.gamma21 + r.gamma41) + r.gamma21 * dd2 / (dd2 + oe2)
    lw3 = 0.5 * (r.gamma11 + r.gamma41) + r.gamma11 * dd3 / (dd3 + oe3)
    return ResonanceSet(centers_d1=c1, centers_d2=c2, centers_d3=c3,
                        eff_rabi_E2=oe2, eff_rabi_E3=oe3,
                        linewidth_d2=lw2, linewidth_d3=lw3)


def resonance_channels(params: ExperimentParams, v: float = 0.0):
    """The four (delta2, delta3) points where the 2-D resonances intersect.

    The delta2 and delta3 denominators peak jointly when the dressed poles of
    both factors are hit at once.  Writing the delta3 factor's poles as
    delta3 = (-DeltaD3 + s3 OmegaE3)/2 and substituting into the delta2+delta3
    combination gives delta2 = (DeltaD3 - DeltaD2 + s2 OmegaE2 - s3 OmegaE3)/2,
    i.e. each s3 branch pairs with the opposite-sign OmegaE3 term in delta2.
    Returns a list of four (delta2, delta3) tuples keyed by (s2, s3).
    """
    r, d = params.rates, params.drive
    _, dd2, dd3 = doppler_detunings(v, d, params.frame)
    oe2 = float(effective_rabi(dd2, d.omega2, r.gamma21, r.gamma41))
    oe3 = float(effective_rabi(dd3, d.omega3, r.gamma11, r.gamma41))
    out = {}
    for s2 in (-1, 1):
        for s3 in (-1, 1):
            d3 = (-dd3 + s3 * oe3) / 2.0
            d2 = (dd3 - dd2 + s2 * oe2 - s3 * oe3) / 2.0
            out[(s2, s3)] = (d2, d3)
    return out


def doppler_width(T: float, frame: SpectralFrame) -> float:
    """FWHM Doppler width of the 780 nm line at temperature T [rad/s].

    DeltaD = (omega42/c) sqrt(8 ln2 kB T / m); scales as sqrt(T).
    """
    if T <= 0:
        raise InvalidParameterError(f"temperature must be > 0 K, got {T}")
    return frame.omega42 / CONST.c * sqrt(8.0 * log(2.0) * CONST.kB * T / CONST.mRb)


def _sigma41_raw(T: float, frame: SpectralFrame, dip: DipoleMoments) -> float:
    """Uncalibrated on-resonance absorption cross-section of the S1/780 line.

    omega41 |mu14|^2 / (2 eps0 hbar c) divided by the Doppler FWHM: the
    homogeneous cross-section diluted by the ratio of natural to Doppler
    width.  An overall dimensionless constant is left free and fixed once by
    calibration (see SIGMA41_CALIBRATION).
    """
    return (frame.omega41 * dip.mu14 ** 2
            / (2.0 * CONST.eps0 * CONST.hbar * CONST.c)
            / doppler_width(T, frame))


# One-time calibration: the reference cell (N = 1.2e17 m^-3, T = 353.15 K,
# L = 0.07 m, nominal dipole) must come out at OD = 4.6.  Frozen here; all
# other optical depths follow from the same constant.
_REF_N, _REF_T, _REF_L, _REF_OD = 1.2e17, 353.15, 0.07, 4.6
SIGMA41_CALIBRATION = _REF_OD / (
    _REF_N * _REF_L * _sigma41_raw(_REF_T, SpectralFrame(), DipoleMoments()))


def optical_depth(cell: VaporCell, rates: DecayRates, frame: SpectralFrame,
                  dip: DipoleMoments) -> float:
    """Optical depth OD = N sigma41 L of the S1/780 line for the given cell.

    Linear in density and length; the cross-section carries the calibrated
    prefactor and the 1/sqrt(T) Doppler dilution.
    """
    sigma41 = SIGMA41_CALIBRATION * _sigma41_raw(cell.temperature, frame, dip)
    return cell.density_N * sigma41 * cell.length_L


def density_for_od(od_target: float, temperature_K: float,
                   length_L: float = _REF_L) -> float:
    """Back-solve the atomic density that yields a given OD at temperature T."""
    sigma41 = SIGMA41_CALIBRATION * _sigma41_raw(temperature_K, SpectralFrame(),
                                                 DipoleMoments())
    return od_target / (sigma41 * length_L)
