"""Before/after comparison: every number is produced by a library call."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from csfqlab import losses, spectroscopy, timedomain
from csfqlab.config import DeviceConfig
from csfqlab.losses import DEFAULT_GAP, STIMULATED, TWO_NBAR
from csfqlab.model import ladder_spectrum, spectrum, transitions
from csfqlab.reference import MEASURED
from csfqlab.spectroscopy import TraceConfig


@dataclass(frozen=True)
class ReportRow:
    quantity: str
    value: float
    unit: str
    source: str


def report_rows(cfg: DeviceConfig) -> List[ReportRow]:
    m = MEASURED
    params = cfg.to_params()
    rows = []

    def add(name, value, unit, source):
        rows.append(ReportRow(name, float(value), unit, source))

    add("t1_before", m.t1_before / 1e-6, "us", "measured")
    add("t1_after", m.t1_after / 1e-6, "us", "measured")
    add("t1_improvement", m.t1_after / m.t1_before, "", "ratio of measured T1")
    q_before = losses.quality_factor(m.qubit_freq_sweet, m.t1_before)
    q_after = losses.quality_factor(m.qubit_freq_sweet, m.t1_after)
    add("q_before", q_before, "", "losses.quality_factor(5.01 GHz, t1_before)")
    add("q_after", q_after, "", "losses.quality_factor(5.01 GHz, t1_after)")

    add(
        "nbar_5GHz_800mK",
        losses.nbar(m.photon_freq, m.still_temp),
        "",
        "losses.nbar(5 GHz, 0.8 K)",
    )
    for label, freq, conv in (
        ("t_bath_stimulated_5p30GHz", m.ladder[0], STIMULATED),
        ("t_bath_stimulated_5p01GHz", m.qubit_freq_sweet, STIMULATED),
        ("t_bath_two_nbar_5p01GHz", m.qubit_freq_sweet, TWO_NBAR),
    ):
        add(
            label,
            losses.effective_bath_temperature(m.improvement, freq, conv),
            "K",
            f"losses.effective_bath_temperature(10, {freq / 1e9:.2f} GHz, {conv})",
        )

    if params.cavity is not None:
        cav = params.cavity
        detuning = cav.omega_cav - 2 * np.pi * m.qubit_freq_sweet
        gamma_p = losses.purcell_rate(cav.g, detuning, cav.kappa)
        t1_purcell = 1.0 / gamma_p
        add("resonator_q", cav.quality_factor, "", "omega_cav / kappa")
        add("purcell_t1", t1_purcell / 1e-6, "us", "1 / losses.purcell_rate(g, omega_cav - 2pi 5.01 GHz, kappa)")
        add("purcell_t1_over_t1_after", t1_purcell / m.t1_after, "", "purcell_t1 / t1_after")
        q_purcell = losses.quality_factor(m.qubit_freq_sweet, t1_purcell)
        add("q_purcell_over_q_after", q_purcell / q_after, "", "Purcell-limited Q / q_after")

    qp = losses.calibrate_qp(DEFAULT_GAP, m.t1_after, m.t1_hot, m.temp_hot)
    gamma_int = 1.0 / m.t1_after
    add("qp_scale", qp.scale, "1/s", "losses.calibrate_qp(200 ueV, 5.7 us, 700 ns, 175 mK)")
    add("qp_rolloff_temperature", losses.rolloff_temperature(qp, gamma_int), "K", "losses.rolloff_temperature")
    add("t1_model_175mK", losses.t1_curve(qp, gamma_int, [m.temp_hot])[0] / 1e-6, "us", "losses.t1_vs_temperature")
    add("t1_model_15mK", losses.t1_curve(qp, gamma_int, [m.base_temp])[0] / 1e-6, "us", "losses.t1_vs_temperature")

    coh = timedomain.coherence_relations(m.t1_after, m.t2_star_after, m.t2_echo_after)
    add("tphi_star_after", coh.tphi_star / 1e-6, "us", "timedomain.coherence_relations")
    add("tphi_echo_after", coh.tphi_echo / 1e-6, "us", "timedomain.coherence_relations")

    sweet = spectrum(params, 0.5, 4, cfg.charge_cutoff)
    ladder = spectrum(params, m.ladder_flux, 4, cfg.charge_cutoff)
    add("model_omega01_sweet", sweet.levels[1] / 1e9, "GHz", "model.spectrum(f=0.5)")
    add("model_omega01_0p51", ladder.levels[1] / 1e9, "GHz", "model.spectrum(f=0.51)")
    add("model_omega12_0p51", (ladder.levels[2] - ladder.levels[1]) / 1e9, "GHz", "model.spectrum(f=0.51)")
    add("model_omega23_0p51", (ladder.levels[3] - ladder.levels[2]) / 1e9, "GHz", "model.spectrum(f=0.51)")

    for label, temp in (("before", m.temp_hot), ("after", m.base_temp)):
        trace = before_after_trace(temp)
        singles = sum(1 for p in trace.peaks if p.label[2] == 1)
        multis = sum(1 for p in trace.peaks if p.label[2] > 1)
        add(f"visible_single_photon_{label}", singles, "", f"spectroscopy.synthesize_trace(T_eff={temp} K)")
        add(f"visible_multi_photon_{label}", multis, "", f"spectroscopy.synthesize_trace(T_eff={temp} K)")
    return rows


def before_after_trace(temp: float, max_order: int = 2, config: TraceConfig = None):
    """Synthetic trace on the measured 0.51 flux-quantum ladder at `temp`."""
    spec = ladder_spectrum(MEASURED.ladder_levels, MEASURED.ladder_flux)
    state = spectroscopy.gibbs_populations(spec, temp)
    return spectroscopy.synthesize_trace(transitions(spec, max_order), state, config or TraceConfig())


def format_rows(rows: List[ReportRow]) -> str:
    lines = ["quantity,value,unit,source"]
    for r in rows:
        lines.append(f'{r.quantity},{r.value:.6g},{r.unit},"{r.source}"')
    return "\n".join(lines) + "\n"
