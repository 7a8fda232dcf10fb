"""Synthetic indoor channel measurement generation.

Models a 1D receiver grid with a tone transmitter, produces slot-averaged
RSS readings, and converts them to pathloss observations in dB. Two
fidelities are supported: drawing pathloss values directly from the
log-distance model plus noise, or synthesizing tone-in-AWGN slot waveforms
and running them through the RSS -> pathloss conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s

LOS = "LOS"
NLOS = "NLOS"
SCENARIOS = (LOS, NLOS)

PATHLOSS_DOMAIN = "pathloss-domain"
WAVEFORM_DOMAIN = "waveform-domain"

# nominal mapping from normalized transmit amplitude to an SNR tag
_AMPLITUDE_TAGS = {0.4: "low", 0.5: "medium", 0.6: "high"}


class DegenerateMeasurementError(ValueError):
    """An RSS sample that cannot be converted to pathloss (zero power)."""


def wavelength(carrier_freq: float) -> float:
    """Wavelength in meters for a carrier frequency in Hz."""
    if not carrier_freq > 0:
        raise ValueError(f"carrier_freq must be > 0, got {carrier_freq}")
    return SPEED_OF_LIGHT / carrier_freq


def regressor_db(distance: float, wav: float):
    """Log-distance regressor 10*log10(4*pi*d/lambda) in dB.

    Accepts scalars or arrays for `distance`; strictly increasing in d.
    """
    distance = np.asarray(distance, dtype=float)
    if not np.all(distance > 0):
        raise ValueError("distance must be > 0")
    if not wav > 0:
        raise ValueError(f"wavelength must be > 0, got {wav}")
    out = 10.0 * np.log10(4.0 * np.pi * distance / wav)
    return float(out) if out.ndim == 0 else out


def model_pathloss_db(params, distance, wav: float):
    """Model pathloss A + alpha * regressor at the given distance(s)."""
    return params.intercept_A + params.exponent_alpha * regressor_db(distance, wav)


@dataclass(frozen=True)
class GridGeometry:
    """1D receiver grid: equally spaced positions along a line."""

    num_positions: int = 15
    min_distance: float = 1.25   # m
    spacing: float = 0.60        # m

    def __post_init__(self):
        if self.num_positions < 2:
            raise ValueError(f"geometry.num_positions must be >= 2, got {self.num_positions}")
        if not self.min_distance > 0:
            raise ValueError(f"geometry.min_distance must be > 0, got {self.min_distance}")
        if not self.spacing > 0:
            raise ValueError(f"geometry.spacing must be > 0, got {self.spacing}")

    def distance(self, index: int) -> float:
        if not 0 <= index < self.num_positions:
            raise ValueError(f"position index {index} outside grid of {self.num_positions}")
        return self.min_distance + index * self.spacing

    def distances(self) -> np.ndarray:
        return self.min_distance + self.spacing * np.arange(self.num_positions)


@dataclass(frozen=True)
class RadioConfig:
    """Tone transmitter / receiver parameters for slot synthesis."""

    carrier_freq: float = 2.4e9    # Hz
    tone_freq: float = 1.0e4       # Hz
    sample_rate: float = 2.0e5     # samples/s
    slot_length: float = 0.01      # s
    tx_amplitude: float = 0.5      # normalized
    tx_gain_db: float = 20.0
    rx_gain_db: float = 20.0

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise ValueError(f"radio.carrier_freq must be > 0, got {self.carrier_freq}")
        if not self.tone_freq > 0:
            raise ValueError(f"radio.tone_freq must be > 0, got {self.tone_freq}")
        if not self.sample_rate > 2.0 * self.tone_freq:
            raise ValueError(
                f"radio.sample_rate must exceed twice the tone frequency "
                f"({self.sample_rate} <= 2*{self.tone_freq})")
        if not self.tx_amplitude > 0:
            raise ValueError(f"radio.tx_amplitude must be > 0, got {self.tx_amplitude}")
        n = self.slot_length * self.sample_rate
        if not (n > 0 and math.isclose(n, round(n), rel_tol=0, abs_tol=1e-6)):
            raise ValueError(
                f"radio.slot_length * radio.sample_rate must be a positive integer, got {n}")

    @property
    def samples_per_slot(self) -> int:
        return int(round(self.slot_length * self.sample_rate))

    @property
    def tx_power(self) -> float:
        """Transmit power under a unit load: the squared normalized amplitude."""
        return self.tx_amplitude ** 2

    def snr_tag(self) -> str:
        for amp, tag in _AMPLITUDE_TAGS.items():
            if abs(self.tx_amplitude - amp) < 1e-9:
                return tag
        return f"a{self.tx_amplitude:g}"

    def rectified_mean_factor(self) -> float:
        """Slot average of |sin| for the sampled unit tone (noiseless).

        Converges to 2/pi as the sampling ratio grows; at finite sampling
        the discrete average differs (e.g. 0.63138 at 20 samples/cycle).
        """
        k = np.arange(self.samples_per_slot)
        return float(np.mean(np.abs(np.sin(2.0 * np.pi * self.tone_freq * k / self.sample_rate))))


@dataclass(frozen=True)
class NoiseModel:
    """Pathloss-domain measurement noise: Gaussian or a heavy-tail mixture.

    In heavy-tail mode a fraction of the draws is replaced by uniform
    outliers on [-outlier_spread_db, +outlier_spread_db], which makes the
    marginal visibly non-Gaussian.
    """

    mode: str = "gaussian"
    outlier_fraction: float = 0.0
    outlier_spread_db: float = 12.0

    def __post_init__(self):
        if self.mode not in ("gaussian", "heavy-tail"):
            raise ValueError(f"noise.mode must be 'gaussian' or 'heavy-tail', got {self.mode!r}")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise ValueError(f"noise.outlier_fraction must be in [0, 1), got {self.outlier_fraction}")
        if not self.outlier_spread_db > 0:
            raise ValueError(f"noise.outlier_spread_db must be > 0, got {self.outlier_spread_db}")

    def draw(self, rng: np.random.Generator, sigma_db: float, n: int) -> np.ndarray:
        base = rng.normal(0.0, sigma_db, size=n) if sigma_db > 0 else np.zeros(n)
        if self.mode == "gaussian" or self.outlier_fraction == 0.0:
            return base
        mask = rng.random(n) < self.outlier_fraction
        outliers = rng.uniform(-self.outlier_spread_db, self.outlier_spread_db, size=n)
        return np.where(mask, outliers, base)


@dataclass(frozen=True)
class ScenarioTruth:
    """Ground-truth generation model for one link scenario."""

    label: str
    params: "PathlossParams"  # noqa: F821 - plfit.PathlossParams, duck-typed
    noise_sigma_db: float

    def __post_init__(self):
        if self.label not in SCENARIOS:
            raise ValueError(f"scenario label must be one of {SCENARIOS}, got {self.label!r}")
        if self.noise_sigma_db < 0:
            raise ValueError(f"noise_sigma_db must be >= 0, got {self.noise_sigma_db}")
        if self.params.exponent_alpha < 0:
            raise ValueError(f"exponent_alpha must be >= 0, got {self.params.exponent_alpha}")


@dataclass(frozen=True)
class Measurement:
    """One slot-averaged pathloss observation."""

    position_index: int
    distance: float
    pathloss_db: float
    scenario: str
    snr_level: str

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"distance must be > 0, got {self.distance}")
        if not math.isfinite(self.pathloss_db):
            raise ValueError(f"pathloss_db must be finite, got {self.pathloss_db}")


@dataclass
class Dataset:
    """Ordered collection of measurements plus generation metadata.

    `geometry`/`radio` are None for datasets imported from CSV, where only
    the measurement rows are known.
    """

    measurements: list
    geometry: GridGeometry | None = None
    radio: RadioConfig | None = None
    provenance: str = "synthetic-pathloss"
    _columns: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return len(self.measurements)

    def column(self, name: str) -> np.ndarray:
        """Per-measurement field as an array (cached; treat dataset as immutable)."""
        if name not in self._columns:
            vals = [getattr(m, name) for m in self.measurements]
            if name in ("scenario", "snr_level"):
                self._columns[name] = np.asarray(vals, dtype=object)
            elif name == "position_index":
                self._columns[name] = np.asarray(vals, dtype=int)
            else:
                self._columns[name] = np.asarray(vals, dtype=float)
        return self._columns[name]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices)
        return Dataset([self.measurements[i] for i in idx],
                       geometry=self.geometry, radio=self.radio,
                       provenance=self.provenance)


def synth_slot_rss(radio: RadioConfig, channel_gain: float,
                   noise_sigma_waveform: float, rng_seed: int) -> float:
    """Synthesize one tone-in-AWGN slot and return its slot-averaged RSS.

    The instant RSS is the rectified signal magnitude |s[k]|; the slot value
    is its mean over the slot. Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(rng_seed)
    return float(_slot_rss_batch(radio, np.asarray([channel_gain]),
                                 noise_sigma_waveform, rng)[0])


def _slot_rss_batch(radio: RadioConfig, channel_gains: np.ndarray,
                    noise_sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Slot-averaged rectified RSS for a batch of slots, one gain per slot."""
    n = radio.samples_per_slot
    if n < 2:
        raise ValueError(f"samples per slot must be >= 2, got {n}")
    k = np.arange(n)
    tone = radio.tx_amplitude * np.sin(2.0 * np.pi * radio.tone_freq * k / radio.sample_rate)
    s = channel_gains[:, None] * tone[None, :]
    if noise_sigma > 0:
        s = s + rng.normal(0.0, noise_sigma, size=s.shape)
    return np.abs(s).mean(axis=1)


def rss_to_pathloss_db(rss: float, tx_power: float) -> float:
    """Pathloss in dB from a linear RSS value: 10*log10(P_t / RSS^2)."""
    if not tx_power > 0:
        raise ValueError(f"tx_power must be > 0, got {tx_power}")
    if rss < 0:
        raise ValueError(f"rss must be >= 0, got {rss}")
    if rss == 0:
        raise DegenerateMeasurementError("zero RSS cannot be converted to pathloss")
    return 10.0 * math.log10(tx_power / rss ** 2)


def waveform_channel_gain(truth_pathloss_db: float, radio: RadioConfig) -> float:
    """Channel amplitude ratio that makes the slot pipeline reproduce the
    target pathloss: the rectified-mean slot factor is divided out so the
    round trip RSS -> pathloss lands on the model value at high SNR.
    """
    pl_linear = 10.0 ** (truth_pathloss_db / 10.0)
    return 1.0 / (radio.rectified_mean_factor() * math.sqrt(pl_linear))


def generate_dataset(geometry: GridGeometry, radio: RadioConfig,
                     truths: list, n_per_position: int,
                     fidelity: str = PATHLOSS_DOMAIN, rng_seed: int = 0,
                     noise: NoiseModel | None = None,
                     snr_level: str | None = None,
                     waveform_noise_sigma: float = 0.0) -> Dataset:
    """Generate a balanced dataset: n_per_position measurements per
    (position, scenario) pair.

    Each (position, scenario) pair draws from an independent substream of
    the master seed (substream id = position_index * 2 + scenario_code), so
    positions can be generated in any order or in parallel without changing
    the output.
    """
    if n_per_position < 1:
        raise ValueError(f"n_per_position must be >= 1, got {n_per_position}")
    if not truths:
        raise ValueError("truths must be nonempty")
    labels = [t.label for t in truths]
    if len(set(labels)) != len(labels):
        raise ValueError(f"scenario labels must be distinct, got {labels}")
    if fidelity not in (PATHLOSS_DOMAIN, WAVEFORM_DOMAIN):
        raise ValueError(f"fidelity must be {PATHLOSS_DOMAIN!r} or {WAVEFORM_DOMAIN!r}, got {fidelity!r}")
    noise = noise or NoiseModel()
    tag = snr_level if snr_level is not None else radio.snr_tag()
    wav = wavelength(radio.carrier_freq)

    seed_root = np.random.SeedSequence(rng_seed)
    children = seed_root.spawn(geometry.num_positions * 2)

    measurements = []
    for truth in truths:
        code = SCENARIOS.index(truth.label)
        for pos in range(geometry.num_positions):
            d = geometry.distance(pos)
            rng = np.random.default_rng(children[pos * 2 + code])
            model_db = model_pathloss_db(truth.params, d, wav)
            shadow_db = noise.draw(rng, truth.noise_sigma_db, n_per_position)
            if fidelity == PATHLOSS_DOMAIN:
                z = model_db + shadow_db
            else:
                base_gain = waveform_channel_gain(model_db, radio)
                gains = base_gain * 10.0 ** (-shadow_db / 20.0)
                rss = _slot_rss_batch(radio, gains, waveform_noise_sigma, rng)
                keep = rss > 0
                z = 10.0 * np.log10(radio.tx_power / rss[keep] ** 2)
            for zi in z:
                measurements.append(Measurement(pos, d, float(zi), truth.label, tag))

    provenance = "synthetic-pathloss" if fidelity == PATHLOSS_DOMAIN else "synthetic-waveform"
    return Dataset(measurements, geometry=geometry, radio=radio, provenance=provenance)


# ---------------------------------------------------------------------------
# Dataset CSV interface

DATASET_HEADER = "position_index,distance_m,pathloss_db,scenario,snr_level"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_dataset_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(DATASET_HEADER + "\n")
        for m in dataset.measurements:
            fh.write(f"{m.position_index},{_fmt(m.distance)},{_fmt(m.pathloss_db)},"
                     f"{m.scenario},{m.snr_level}\n")


def read_dataset_csv(path) -> Dataset:
    measurements = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != DATASET_HEADER:
            raise ValueError(f"{path}: unexpected dataset header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            pos, dist, pl, scenario, snr = parts
            if scenario not in SCENARIOS:
                raise ValueError(f"{path}:{lineno}: unknown scenario {scenario!r}")
            measurements.append(Measurement(int(pos), float(dist), float(pl), scenario, snr))
    if not measurements:
        raise ValueError(f"{path}: empty dataset")
    return Dataset(measurements, geometry=None, radio=None, provenance="imported")
