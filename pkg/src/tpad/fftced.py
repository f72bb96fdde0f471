"""Half-precision FFT with a Plancherel-identity concurrent checker.

The transform is radix-2 decimation-in-time with every intermediate sum and
product rounded to IEEE half precision (numpy float16, round-to-nearest-even),
emulating a 16-bit datapath bit for bit. The checker holds a programmed
reference pair (y, Y) with Y the transform of y, and compares

    sum_i x_i * conj(y_i)   against   (1/N) * sum_k X_k * conj(Y_k)

accumulating both sides in single precision. A healthy engine keeps the
residual within calibrated roundoff; sum-of-squares-preserving tampering
(e.g. output permutations) still moves the residual for a generic reference.
An attacker can zero the stored reference to silence the checker, which a
post-manufacture self-test with a deliberate non-transform pair exposes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

Rng = Union[int, random.Random, None]

HALF = np.float16
_CHECK = np.complex64  # checker accumulates one precision wider


class FftError(ValueError):
    pass


class FftOverflowError(FftError):
    pass


class NonPairRequiredError(FftError):
    pass


def _require_power_of_two(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise FftError(f"length {n} is not a power of two")
    return n.bit_length() - 1


def _bit_reverse_permutation(n: int) -> np.ndarray:
    bits = _require_power_of_two(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _twiddles(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-stage twiddle factors, pre-rounded to half precision."""
    out = []
    size = 2
    while size <= n:
        ang = -2.0 * np.pi * np.arange(size // 2) / size
        out.append((np.cos(ang).astype(HALF), np.sin(ang).astype(HALF)))
        size *= 2
    return out


StageHook = Optional[Callable[[int, np.ndarray, np.ndarray], None]]


def _fft_stages(re: np.ndarray, im: np.ndarray, hook: StageHook = None) -> tuple[np.ndarray, np.ndarray]:
    """In-place style staged FFT on (..., N) float16 arrays.

    The hook runs after each stage (stage index counted from 0) and may
    mutate the arrays; fault-injection campaigns use it.
    """
    n = re.shape[-1]
    perm = _bit_reverse_permutation(n)
    re = np.ascontiguousarray(re[..., perm])
    im = np.ascontiguousarray(im[..., perm])
    # injected faults can push lanes to inf/nan; that is data, not an error
    with np.errstate(invalid="ignore", over="ignore"):
        for stage, (wre, wim) in enumerate(_twiddles(n)):
            size = 2 << stage
            half = size // 2
            shape = re.shape[:-1] + (n // size, size)
            re = re.reshape(shape)
            im = im.reshape(shape)
            a_re, b_re = re[..., :half], re[..., half:]
            a_im, b_im = im[..., :half], im[..., half:]
            # complex multiply and butterfly, each operation rounded to half
            t_re = (wre * b_re) - (wim * b_im)
            t_im = (wre * b_im) + (wim * b_re)
            new_re = np.concatenate([a_re + t_re, a_re - t_re], axis=-1)
            new_im = np.concatenate([a_im + t_im, a_im - t_im], axis=-1)
            re = new_re.reshape(re.shape[:-2] + (n,))
            im = new_im.reshape(im.shape[:-2] + (n,))
            if hook is not None:
                hook(stage, re, im)
    return re, im


def fft(x: np.ndarray) -> np.ndarray:
    """Half-precision FFT of a complex vector; raises on overflow to infinity.

    Accepts any complex-like array of shape (N,); returns an (N, 2) float16
    array of (re, im) pairs, the exact datapath words.
    """
    x = np.asarray(x)
    if x.ndim == 2 and x.shape[-1] == 2:
        re = x[..., 0].astype(HALF)
        im = x[..., 1].astype(HALF)
    else:
        re = x.real.astype(HALF)
        im = np.imag(x).astype(HALF)
    _require_power_of_two(re.shape[-1])
    re, im = _fft_stages(re, im)
    out = np.stack([re, im], axis=-1)
    if not np.isfinite(out.astype(np.float32)).all():
        raise FftOverflowError("half-precision overflow during transform")
    return out


def to_complex(hc: np.ndarray) -> np.ndarray:
    hc = np.asarray(hc)
    if hc.ndim >= 1 and hc.shape[-1] == 2:
        with np.errstate(invalid="ignore"):
            return hc[..., 0].astype(np.float64) + 1j * hc[..., 1].astype(np.float64)
    return hc.astype(np.complex128)


def from_complex(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    return np.stack([z.real.astype(HALF), z.imag.astype(HALF)], axis=-1)


# -- reference pairs -----------------------------------------------------------------


@dataclass
class PlancherelReference:
    """Programmed (y, Y) pair; Y is the rounded exact transform of y."""

    y: np.ndarray  # (N, 2) float16
    Y: np.ndarray  # (N, 2) float16

    def __post_init__(self):
        n = self.y.shape[0]
        if self.Y.shape[0] != n:
            raise FftError("reference lengths differ")
        if (to_complex(self.y) == 0).any() or (to_complex(self.Y) == 0).any():
            raise FftError("reference entries must all be nonzero")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @classmethod
    def unchecked(cls, y: np.ndarray, Y: np.ndarray) -> "PlancherelReference":
        """Skip the nonzero-entry validation (degenerate test fixtures)."""
        obj = object.__new__(cls)
        obj.y = y
        obj.Y = Y
        return obj


def make_reference(n: int, rng_seed: Rng = None, scale: float = 0.25,
                   periodic: bool = False) -> PlancherelReference:
    """Seeded white-noise reference with small norm and no zero entries.

    periodic=True instead builds a unit-norm quadratic-phase chirp, whose
    transform has flat magnitude, a lower-roundoff alternative to white
    noise (a pure tone would not do: its transform is a delta, and zero
    reference entries are forbidden).
    """
    _require_power_of_two(n)
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    npr = np.random.default_rng(rng.getrandbits(64))
    while True:
        if periodic:
            phase = npr.uniform(0, 2 * np.pi)
            i = np.arange(n)
            y = np.exp(1j * (np.pi * i * i / n + phase)) / np.sqrt(n)
        else:
            y = (npr.standard_normal(n) + 1j * npr.standard_normal(n)) * scale
        y16 = from_complex(y)
        bigY = np.fft.fft(to_complex(y16))
        Y16 = from_complex(bigY)
        if (to_complex(y16) != 0).all() and (to_complex(Y16) != 0).all():
            return PlancherelReference(y16, Y16)


def format_reference(ref: PlancherelReference) -> str:
    """Bit-exact hex dump: N, then per line y_re y_im Y_re Y_im."""
    words = np.stack(
        [ref.y[:, 0], ref.y[:, 1], ref.Y[:, 0], ref.Y[:, 1]], axis=-1
    ).view(np.uint16)
    lines = [str(ref.n)]
    for row in words:
        lines.append(" ".join(f"{w:04x}" for w in row))
    return "\n".join(lines) + "\n"


def parse_reference(text: str) -> PlancherelReference:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    n = int(lines[0])
    if len(lines) != n + 1:
        raise FftError(f"expected {n} reference rows, found {len(lines) - 1}")
    rows = np.array(
        [[int(w, 16) for w in ln.split()] for ln in lines[1:]], dtype=np.uint16
    ).view(HALF)
    y = np.stack([rows[:, 0], rows[:, 1]], axis=-1)
    bigY = np.stack([rows[:, 2], rows[:, 3]], axis=-1)
    return PlancherelReference(y, bigY)


# -- the checker ---------------------------------------------------------------------


@dataclass(frozen=True)
class CheckVerdict:
    residual: float
    threshold: float
    attack: bool


def plancherel_residual(x: np.ndarray, x_observed: np.ndarray,
                        ref: PlancherelReference) -> float:
    """|<x, y*> - (1/N) <X_observed, Y*>| accumulated in single precision."""
    xc = to_complex(x).astype(_CHECK)
    oc = to_complex(x_observed).astype(_CHECK)
    yc = to_complex(ref.y).astype(_CHECK)
    bigyc = to_complex(ref.Y).astype(_CHECK)
    if not (len(xc) == len(oc) == ref.n):
        raise FftError("length mismatch")
    with np.errstate(invalid="ignore", over="ignore"):
        lhs = np.sum(xc * np.conj(yc), dtype=_CHECK)
        rhs = np.sum(oc * np.conj(bigyc), dtype=_CHECK) / _CHECK(ref.n)
        resid = abs(complex(lhs) - complex(rhs))
    if not np.isfinite(resid):
        return float("inf")
    return float(resid)


def plancherel_check(x: np.ndarray, x_observed: np.ndarray, ref: PlancherelReference,
                     threshold: float) -> CheckVerdict:
    if threshold < 0:
        raise FftError("threshold must be nonnegative")
    resid = plancherel_residual(x, x_observed, ref)
    return CheckVerdict(resid, threshold, resid > threshold)


def white_noise_input(n: int, npr: np.random.Generator) -> np.ndarray:
    """Unit-scale complex white noise, the calibration input distribution."""
    z = (npr.standard_normal(n) + 1j * npr.standard_normal(n)) / np.sqrt(2)
    return from_complex(z)


def calibrate_threshold(
    n: int,
    trials: int,
    margin: float,
    rng_seed: Rng = None,
    ref: Optional[PlancherelReference] = None,
    input_distribution: Optional[Callable[[int, np.random.Generator], np.ndarray]] = None,
) -> tuple[float, PlancherelReference]:
    """Threshold = margin times the worst attack-free residual observed.

    Runs `trials` clean transforms on the calibration distribution (unit
    complex white noise unless overridden) against the reference pair and
    returns (threshold, reference). Raises on overflow: the distribution
    must be representable in the datapath.
    """
    if trials < 100:
        raise FftError("calibration needs at least 100 trials")
    if margin < 1:
        raise FftError("margin must be >= 1")
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    ref_bits = rng.getrandbits(64)  # consumed either way, keeping the input
    if ref is None:                 # stream identical for a supplied reference
        ref = make_reference(n, ref_bits)
    npr = np.random.default_rng(rng.getrandbits(64))
    dist = input_distribution or white_noise_input
    worst = 0.0
    for _ in range(trials):
        x = dist(n, npr)
        bigx = fft(x)
        worst = max(worst, plancherel_residual(x, bigx, ref))
    return margin * worst, ref


# -- the engine and its self test ------------------------------------------------------


class FftCedEngine:
    """FFT datapath plus checker with a programmable reference slot.

    zeroed=True models the reference-zeroing decoupling attack: the stored
    y* and Y* words are pulled to ground, silencing the checker.
    """

    def __init__(self, n: int, ref: PlancherelReference, threshold: float):
        _require_power_of_two(n)
        if ref.n != n:
            raise FftError("reference length mismatch")
        self.n = n
        self.ref = ref
        self.threshold = threshold
        self.zeroed = False

    def _active_ref(self) -> PlancherelReference:
        if not self.zeroed:
            return self.ref
        zero = np.zeros((self.n, 2), dtype=HALF)
        return PlancherelReference.unchecked(zero, zero)

    def run(self, x: np.ndarray) -> tuple[np.ndarray, CheckVerdict]:
        bigx = fft(x)
        ref = self._active_ref()
        resid = plancherel_residual(x, bigx, ref)
        return bigx, CheckVerdict(resid, self.threshold, resid > self.threshold)

    def program_reference(self, ref: PlancherelReference) -> None:
        if ref.n != self.n:
            raise FftError("reference length mismatch")
        self.ref = ref


CHECKER_ALIVE = "checker alive"
CHECKER_COMPROMISED = "checker compromised"


def reference_selftest(engine: FftCedEngine, non_pair: tuple[np.ndarray, np.ndarray],
                       rng_seed: Rng = None) -> str:
    """Program a deliberate non-transform pair and demand an attack report.

    A healthy checker must flag the run (the identity cannot hold for a
    non-pair); a zeroed or bypassed checker stays silent and is reported
    as compromised. Supplying an actual transform pair is an error, since
    it cannot distinguish the two.
    """
    y, bigy = (np.asarray(non_pair[0]), np.asarray(non_pair[1]))
    y16 = y if y.ndim == 2 else from_complex(y)
    bigy16 = bigy if bigy.ndim == 2 else from_complex(bigy)
    true_ft = np.fft.fft(to_complex(y16))
    scale = float(np.max(np.abs(true_ft))) or 1.0
    if np.max(np.abs(true_ft - to_complex(bigy16))) <= 0.01 * scale:
        raise NonPairRequiredError("selftest needs a pair that is not a transform pair")
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    npr = np.random.default_rng(rng.getrandbits(64))
    saved = engine.ref
    try:
        engine.program_reference(PlancherelReference(y16, bigy16))
        x = white_noise_input(engine.n, npr)
        _, verdict = engine.run(x)
    finally:
        engine.ref = saved
    return CHECKER_ALIVE if verdict.attack else CHECKER_COMPROMISED


# -- attack campaign -------------------------------------------------------------------


@dataclass
class FftCampaignReport:
    trials: int
    detected: int
    false_positives: int
    undetected_examples: list[tuple] = field(default_factory=list)

    @property
    def detection_rate(self) -> float:
        return self.detected / self.trials if self.trials else 0.0


def single_butterfly_flip(npr: np.random.Generator, n: int) -> tuple[int, int, int, int]:
    """Sample (stage, element, re/im word, bit) for one datapath fault.

    The bit is drawn from the high byte of the half word (sign, exponent,
    top mantissa bits): a logic fault there moves the value by at least a
    sizeable fraction of itself. Low-mantissa faults stay below any usable
    numerical-error threshold by construction and are out of scope.
    """
    stages = _require_power_of_two(n)
    return (
        int(npr.integers(stages)),
        int(npr.integers(n)),
        int(npr.integers(2)),
        int(npr.integers(8, 16)),
    )


def fft_attack_campaign(
    n: int,
    trials: int,
    threshold: float,
    ref: PlancherelReference,
    rng_seed: Rng = None,
    attack: str = "butterfly_flip",
    probes_per_trial: int = 24,
) -> FftCampaignReport:
    """Detection rate for persistent datapath faults under concurrent checking.

    Per trial one fault is planted (a flipped storage bit at one butterfly
    output, or an output permutation), the engine runs `probes_per_trial`
    Plancherel-checked transforms on calibration-distribution inputs, and
    detection means any probe exceeded the threshold. A paired fault-free
    run of the same probes must stay silent; violations count as false
    positives.
    """
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    npr = np.random.default_rng(rng.getrandbits(64))
    detected = 0
    false_positives = 0
    misses = []
    for _ in range(trials):
        if attack == "butterfly_flip":
            fault = single_butterfly_flip(npr, n)
            stage_f, elem, word, bit = fault
        elif attack == "permutation":
            fault = tuple(npr.permutation(n))
            while all(fault[i] == i for i in range(n)):
                fault = tuple(npr.permutation(n))
        else:
            raise FftError(f"unknown attack {attack!r}")
        hit = False
        clean_hit = False
        for _ in range(probes_per_trial):
            x = white_noise_input(n, npr)
            if attack == "butterfly_flip":
                def hook(stage, re, im, _f=fault):
                    s, e, w, b = _f
                    if stage == s:
                        arr = re if w == 0 else im
                        view = arr.view(np.uint16)
                        view[..., e] ^= 1 << b
                re, im = _fft_stages(x[:, 0].copy(), x[:, 1].copy(), hook=hook)
                observed = np.stack([re, im], axis=-1)
            else:
                observed = fft(x)[list(fault), :]
            resid = plancherel_residual(x, observed, ref)
            if resid > threshold:
                hit = True
            clean = fft(x)
            if plancherel_residual(x, clean, ref) > threshold:
                clean_hit = True
            if hit and not clean_hit:
                break
        detected += hit
        false_positives += clean_hit
        if not hit and len(misses) < 32:
            misses.append(fault)
    return FftCampaignReport(trials, detected, false_positives, misses)
