"""Co-simulator for Tsetlin automata mapped onto Y-Flash memristor cells."""

from .automata import (
    Action,
    Clause,
    Feedback,
    TransitionEvent,
    TsetlinAutomaton,
    TsetlinMachine,
    xor_dataset,
)
from .bridge import (
    ActionThreshold,
    DivergenceCounter,
    MappedAutomaton,
    build_mapped_automata,
    run_mapped_training,
)
from .config import ExperimentConfig, default_config, load_config
from .crossbar import CrossbarArray, EnergyLedger
from .device import (
    DeviceParams,
    PopulationParams,
    PulseMode,
    PulseResult,
    YFlashCell,
    cycle_endurance,
    energy_of_pulse,
    sample_device,
)

__version__ = "0.1.0"
