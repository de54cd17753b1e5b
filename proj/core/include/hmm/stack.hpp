#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmm/materials.hpp"

namespace hmm {

enum class Polarization { s, p };
enum class Side { up, down };

struct Layer {
  Material material;
  double thickness_nm = 0.0;
  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Planar multilayer along z. Media are indexed bottom to top: 0 is the lower
/// cladding, 1..N the finite layers, N+1 the upper cladding.
class LayerStack {
 public:
  LayerStack(Material lower_cladding, std::vector<Layer> layers, Material upper_cladding);

  const Material& lower_cladding() const { return lower_; }
  const Material& upper_cladding() const { return upper_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t medium_count() const { return layers_.size() + 2; }
  std::size_t upper_index() const { return layers_.size() + 1; }
  const Material& medium(std::size_t index) const;
  bool is_cladding(std::size_t index) const { return index == 0 || index == upper_index(); }
  /// Infinite for the claddings.
  double thickness_nm(std::size_t index) const;

  /// Same structure flipped upside down (medium i becomes N+1-i).
  LayerStack inverted() const;

  friend bool operator==(const LayerStack&, const LayerStack&) = default;

 private:
  Material lower_;
  std::vector<Layer> layers_;
  Material upper_;
};

/// Built-in stacks: "au-pva", "au-pva-zns", "au-zns" (glass | d 30 | Au 30 |
/// middle 50 | Au 30 | d 30 | air) and "coverslip" (glass | air).
std::vector<std::string> preset_names();
LayerStack preset_stack(std::string_view name);
/// Medium index of the 50 nm middle layer in the HMM presets.
inline constexpr std::size_t kPresetHostLayer = 3;

/// Lossless metals get this much absorption so that the real-axis integrand
/// never meets a pole.
inline constexpr double kMinimumMetalLoss = 1e-6;

struct ResolvedMedium {
  complex eps{1.0, 0.0};
  double thickness_nm = 0.0;  // unused for claddings
  bool perfect_conductor = false;
};

/// A stack with every permittivity evaluated at one wavelength.
struct ResolvedStack {
  double wavelength_nm = 0.0;
  double k0 = 0.0;  // 2 pi / wavelength, 1/nm
  std::vector<ResolvedMedium> media;
};

ResolvedStack resolve(const LayerStack& stack, double wavelength_nm);

/// In-plane wavevector expressed against a reference medium: q_j (the
/// longitudinal wavenumber in units of k0) is sqrt(eps_j - eps_ref (1 - cz^2))
/// where cz = sqrt(1 - s^2) is given directly, so media matching the reference
/// get their q without cancellation near s = 1.
struct TransverseState {
  complex eps_ref{1.0, 0.0};
  complex cz{1.0, 0.0};

  static TransverseState from_s(complex eps_ref, double s);
  complex q(complex eps) const;
};

/// Two-port scattering matrix for one polarization. "Forward" runs away from
/// the first medium of the chain.
struct SMatrix {
  complex r_front{0.0, 0.0};
  complex t_forward{1.0, 0.0};
  complex r_back{0.0, 0.0};
  complex t_backward{1.0, 0.0};
};

/// Redheffer star product: `near` followed by `far`.
SMatrix star(const SMatrix& near, const SMatrix& far);
SMatrix interface_smatrix(const ResolvedMedium& a, complex qa, const ResolvedMedium& b, complex qb,
                          Polarization pol);
SMatrix propagation_smatrix(complex q, double k0, double thickness_nm);
/// Chain from media.front() to media.back(). Interior media propagate over
/// their thickness; the two ends are treated as semi-infinite.
SMatrix chain_smatrix(std::span<const ResolvedMedium> media, double k0, const TransverseState& state,
                      Polarization pol);

/// Single-interface reflection for a wave in medium 1; s = k_par / k_1.
/// s-polarization uses E amplitudes, p-polarization H amplitudes, so at
/// normal incidence r_s = (n1 - n2)/(n1 + n2) and r_p = -r_s.
complex fresnel(const ComplexPermittivity& eps1, const ComplexPermittivity& eps2, double s,
                Polarization pol);

/// Generalized reflection/transmission of everything on one side of a source
/// medium, referenced at the near boundary of that medium (reflection) and at
/// the far cladding's boundary (transmission).
struct HalfSpaceResponse {
  complex r_s, r_p;
  complex t_s, t_p;
  double wavelength_nm = 0.0;
  double s = 0.0;
  complex q_near, q_far;
  complex eps_near, eps_far;
  bool far_is_perfect_conductor = false;

  complex r(Polarization pol) const { return pol == Polarization::s ? r_s : r_p; }
  complex t(Polarization pol) const { return pol == Polarization::s ? t_s : t_p; }
  /// |t|^2 scaled by the ratio of z-directed power fluxes; zero when the far
  /// cladding carries no propagating flux.
  double transmittance(Polarization pol) const;
};

/// Normal-flux factor of a plane wave of unit amplitude: Re q (s) or Re(q/eps) (p).
double flux_factor(complex q, complex eps, Polarization pol);

/// Media from `source_medium` outward to the cladding on `side`.
std::vector<ResolvedMedium> outward_chain(const ResolvedStack& stack, std::size_t source_medium,
                                          Side side);
/// Response of a chain ordered from the source medium outward.
HalfSpaceResponse chain_response(std::span<const ResolvedMedium> chain, double k0,
                                 double wavelength_nm, const TransverseState& state);

/// s is normalized to the source medium's wavenumber, which must be a real,
/// positive-permittivity dielectric.
HalfSpaceResponse half_space_response(const ResolvedStack& stack, std::size_t source_medium,
                                      Side side, const TransverseState& state);
HalfSpaceResponse half_space_response(const ResolvedStack& stack, std::size_t source_medium,
                                      Side side, double s);
HalfSpaceResponse half_space_response(const LayerStack& stack, std::size_t source_medium, Side side,
                                      double wavelength_nm, double s);

}  // namespace hmm
