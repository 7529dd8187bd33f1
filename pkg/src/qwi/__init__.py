"""One-dimensional scattering and bound states with the quantum wave impedance method."""
from .impedance import (ImpedanceState, RegionWave, ResonantDeltaPrimeError, characteristic, jump_delta,
                        jump_delta_prime, propagate_left, propagate_right)
from .oracle import TransferMatrix, oracle_bound_states, oracle_scatter, point_matrix, region_matrix
from .potential import (PhysicalConstants, PointInteraction, PotentialError, PotentialSpec, Region,
                        canonicalize, parse_potential_file)
from .scattering import (NoPropagatingChannel, ScatteringResult, closed_form_delta_delta_prime,
                         closed_form_single_delta, input_impedance, reflection_from_impedance, solve, sweep)
from .spectrum import (BoundState, DispersionSample, closed_form_double_well, delta_delta_prime_energy,
                       dispersion, find_bound_states, single_delta_energy)
from .wavefunction import (WavefunctionSamples, bound_state_wavefunction, normalize, reconstruct,
                           scattering_wavefunction)

__version__ = "0.1.0"
