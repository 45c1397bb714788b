#pragma once

#include "eotk/modes.hpp"

// Circuit-level resonator models: coplanar-waveguide line parameters and
// kinetic-inductance fraction, capacitively loaded quarter-wave resonance,
// square spiral inductors with an area-law self-capacitance, and the
// resistive strip-loaded slot network.
namespace eotk::resonator {

struct CpwGeometry {
  double center_width = 0.0;      // m
  double gap = 0.0;               // m
  double length = 0.0;            // m
  double l_per_m = 0.0;           // geometric inductance per length, H/m
  double c_per_m = 0.0;           // capacitance per length, F/m
  double load_capacitance = 0.0;  // F, termination at the open end
  quantities::SuperconductorParams film;
};

struct CpwLineParams {
  double l_per_m = 0.0;  // H/m
  double c_per_m = 0.0;  // F/m
  double z0 = 0.0;       // ohm
};

struct KineticFraction {
  double g_center = 0.0;  // 1/m, center-conductor weight multiplying Ls
  double g_ground = 0.0;  // 1/m, ground-plane weight
  double lk_per_m = 0.0;  // H/m
  double alpha_k = 0.0;   // Lk / (Lgeom + Lk)
};

struct SpiralGeometry {
  int n_turns = 0;
  double outer_diameter = 0.0;        // m, outer edge of the outermost turn
  double wire_pitch = 0.0;            // m, center-to-center
  double fill_factor = 0.0;           // wire width / pitch, in (0,1)
  double cladding_permittivity = 1.0; // relative permittivity above the substrate plane

  double wire_width() const { return fill_factor * wire_pitch; }
  double wire_spacing() const { return (1.0 - fill_factor) * wire_pitch; }
  // Inner opening: n wire widths and n-1 spacings per side.
  double inner_diameter() const {
    return outer_diameter - 2.0 * n_turns * wire_pitch + 2.0 * wire_spacing();
  }
};

struct SpiralResonance {
  double inductance = 0.0;  // H
  double c_self = 0.0;      // F
  double srf_hz = 0.0;      // Hz
  double impedance = 0.0;   // ohm, sqrt(L/C)
};

struct SlotCircuit {
  double slot_capacitance = 0.0;       // F, the EO slot
  double electrode_capacitance = 0.0;  // F, bypass across the resistive slab
  double slab_length_per_area = 0.0;   // 1/m, so R = resistivity * this
  double analysis_frequency_hz = 0.0;  // Hz
};

struct SlotAnalysis {
  double q_mw = 0.0;              // |Im Z| / Re Z at the analysis frequency
  double f_3db_hz = 0.0;          // 1/(2 pi R C_slot)
  double voltage_fraction = 0.0;  // |V_slot / V_total|
  double re_z = 0.0;              // ohm
  double im_z = 0.0;              // ohm
};

// Complete elliptic integral of the first kind K(k), modulus convention,
// evaluated by the arithmetic-geometric mean.
double elliptic_k(double k);

// Conformal-mapping line parameters for a CPW of given center width and gap
// on a substrate with the given effective relative permittivity.
CpwLineParams cpw_line_params(double center_width, double gap, double substrate_eps_eff);

// Thin-film kinetic-inductance weights for center conductor and ground plane
// and the resulting kinetic fraction. ls_per_sq is the film sheet inductance;
// l_geom_per_m the geometric inductance per length.
KineticFraction cpw_kinetic_fraction(double center_width, double gap, double film_thickness,
                                     double ls_per_sq, double l_geom_per_m);
// Convenience overload pulling thickness/Ls from the geometry's film record.
KineticFraction cpw_kinetic_fraction(const CpwGeometry& g);

// Lowest resonance of a quarter-wave line with a capacitive termination:
// solves Z0 tan(2 pi f l / v) = 1/(2 pi f C_load). The kinetic fraction
// scales the line inductance as L_tot = L_geom / (1 - alpha_k). C_load = 0
// reduces exactly to v / (4 l).
double loaded_quarterwave_frequency(const CpwGeometry& g, double alpha_k);

// Square planar spiral: current-sheet approximation.
double spiral_inductance(const SpiralGeometry& g);

// Area-law self-capacitance, self-resonance frequency and impedance.
SpiralResonance spiral_resonance(const SpiralGeometry& g);

// Series resistive-slab / slot-capacitor network with the electrode bypass
// capacitance across the slab; resistivity in ohm*m.
SlotAnalysis slot_circuit_analysis(const SlotCircuit& c, double resistivity_ohm_m);

}  // namespace eotk::resonator
