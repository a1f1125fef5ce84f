"""Photon-mediated heat transport through a flux qubit coupled to two
resonators and two resistive reservoirs."""

__version__ = "0.1.0"

from .params import DeviceParams, DEFAULT_DEVICE, SPECTROSCOPY_DEVICE  # noqa: E402
from .spectrum import (  # noqa: E402
    EigenSystem,
    build_hamiltonian,
    eigensystem,
    eigensystem_closed_form,
    eigensystem_numeric,
    qubit_frequency,
)
from .noise import (  # noqa: E402
    NoiseChannel,
    ResonatorFilter,
    InductiveFilter,
    bare_current_noise,
    flux_noise,
    resonator_transmission,
)
from .dynamics import (  # noqa: E402
    RateSet,
    SteadyState,
    bare_resistor_power,
    evaluate_point,
    matrix_elements,
    steady_state,
    transition_rates,
    transported_power,
)
from .thermal import (  # noqa: E402
    CalibrationCurve,
    ep_power,
    fit_calibration,
    heater_power,
    invert_ep_power,
    switching_ratio,
    voltage_to_temperature,
)
from .sweep import SweepConfig, SweepResult, find_peaks, run_sweep, switching_curve  # noqa: E402
