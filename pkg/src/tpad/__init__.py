"""Gate-netlist laboratory for Trojan-resistant chip checking.

Core pieces: a netlist IR with equivalence checking, randomized parity
codes over GF(2) and their predictor synthesis, randomized switchbox
obfuscation, LFSR-keyed error encoding, a protected-chip simulator with an
attack-injection harness, and a half-precision FFT with a Plancherel
identity checker.
"""

from .netlist import (
    Netlist,
    NetlistBuilder,
    check_equivalence,
    evaluate,
    output_cone,
    parse_netlist,
    random_netlist,
    serialize_netlist,
    simplify_netlist,
)
from .parity import (
    Codeword,
    ParityCheckMatrix,
    build_ocp,
    compute_check_bits,
    estimate_detection_probability,
    sample_parity_code,
    verify_codeword,
)
from .switchbox import (
    ObfuscatedNetlist,
    Switchbox,
    apply_config,
    count_cone_switchboxes,
    degeneracy_scan,
    insert_switchboxes,
)
from .lfsr import (
    ErrorMonitor,
    ErrorSignal,
    LfsrSpec,
    checker_output,
    combine_error_signals,
    is_primitive,
    lfsr_taps,
    monitor_check,
    step_lfsr,
)
from .ram import ProtectedRam, ram_cycle
from .chip import (
    ChipOptions,
    InputDecoderState,
    OutputEncoderState,
    ProtectedChip,
    build_protected_chip,
    chip_cycle,
    decode_inputs,
    encode_outputs,
    load_chip_bundle,
    save_chip_bundle,
)
from .attacks import (
    AttackDescriptor,
    DetectionReport,
    cp_attack_probability,
    decoupling_cost,
    destructive_detection_probability,
    inject,
    per_sb_attack_probability,
    run_campaign,
    simulate_destructive_sampling,
    subcircuit_match_attack,
)
from .fftced import (
    FftCedEngine,
    PlancherelReference,
    calibrate_threshold,
    fft,
    fft_attack_campaign,
    plancherel_check,
    reference_selftest,
)
from .system import Channel, RunReport, SystemTopology, build_pipeline_system, run_system

__version__ = "0.1.0"
