"""Measured values the simulations are compared against.

Before/after refer to the device before and after it was embedded in
absorptive epoxy. Times in seconds, frequencies in Hz, temperatures in K.
"""

from dataclasses import dataclass, field
from typing import Tuple

from csfqlab.constants import GHz, ns, us


@dataclass(frozen=True)
class Measured:
    qubit_freq_sweet: float = 5.01 * GHz
    ladder_flux: float = 0.51
    # omega01, omega12, omega23 at ladder_flux
    ladder: Tuple[float, float, float] = (5.30 * GHz, 5.58 * GHz, 5.83 * GHz)
    t1_before: float = 513 * ns
    t1_after: float = 5.7 * us
    t1_after_low: float = 3.5 * us
    t2_star_after: float = 5.6 * us
    t2_echo_after: float = 9.4 * us
    t1_hot: float = 700 * ns
    temp_hot: float = 0.175
    base_temp: float = 0.015
    still_temp: float = 0.8
    photon_freq: float = 5.0 * GHz
    improvement: float = 10.0

    @property
    def ladder_levels(self) -> Tuple[float, ...]:
        """Cumulative level energies (Hz) built from the ladder transitions."""
        out = [0.0]
        for w in self.ladder:
            out.append(out[-1] + w)
        return tuple(out)


MEASURED = Measured()
