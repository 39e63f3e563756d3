"""Fluctuation-induced drag (electromagnetic viscosity) on an atom above a planar surface."""
from .asymptotics import (ViscosityBreakdown, classify_regime, critical_scales,
                          mu_bb_lowT, mu_bb_resonant, mu_general_thermal, mu_qf_general,
                          mu_qf_planar, mu_t_planar)
from .force import (ForceResult, Scenario, compute_force, force_blackbody, force_normal_ordering,
                    force_shifted, force_symmetric, viscosity)
from .materials import ConstantEpsilon, Drude, Tabulated, gold_drude, resistivity_rho
from .polarizability import AtomParams, rb_like

__all__ = [
    "AtomParams", "ConstantEpsilon", "Drude", "ForceResult", "Scenario", "Tabulated",
    "ViscosityBreakdown", "classify_regime", "compute_force", "critical_scales",
    "force_blackbody", "force_normal_ordering", "force_shifted", "force_symmetric",
    "gold_drude", "mu_bb_lowT", "mu_bb_resonant", "mu_general_thermal", "mu_qf_general",
    "mu_qf_planar", "mu_t_planar", "rb_like", "resistivity_rho", "viscosity",
]
