#include "hmm/stack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hmm/errors.hpp"

namespace hmm {

namespace {

constexpr double kGrazingFloor = 1e-9;

complex decaying_branch(complex q) {
  if (q.imag() < 0.0 || (q.imag() == 0.0 && q.real() < 0.0)) return -q;
  return q;
}

void require_dielectric_source(const ResolvedMedium& m, std::size_t index) {
  if (m.perfect_conductor || !(m.eps.real() > 0.0) || m.eps.imag() != 0.0) {
    std::ostringstream os;
    os << "medium " << index << " (eps = " << m.eps.real() << (m.eps.imag() < 0 ? "" : "+")
       << m.eps.imag() << "i) cannot host a source: a real, positive permittivity is required";
    throw DomainError(os.str());
  }
}

}  // namespace

LayerStack::LayerStack(Material lower_cladding, std::vector<Layer> layers, Material upper_cladding)
    : lower_(std::move(lower_cladding)), layers_(std::move(layers)), upper_(std::move(upper_cladding)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    if (!std::isfinite(layer.thickness_nm) || !(layer.thickness_nm > 0.0)) {
      std::ostringstream os;
      os << "layer " << i << " (" << layer.material.name()
         << ") needs a finite positive thickness, got " << layer.thickness_nm;
      throw DomainError(os.str());
    }
    if (layer.material.is_perfect_conductor())
      throw DomainError("a perfect conductor may only be used as a cladding (layer " +
                        std::to_string(i) + ")");
  }
}

const Material& LayerStack::medium(std::size_t index) const {
  if (index == 0) return lower_;
  if (index == upper_index()) return upper_;
  if (index > upper_index())
    throw DomainError("medium index " + std::to_string(index) + " is outside the stack");
  return layers_[index - 1].material;
}

double LayerStack::thickness_nm(std::size_t index) const {
  if (is_cladding(index)) return std::numeric_limits<double>::infinity();
  if (index > upper_index())
    throw DomainError("medium index " + std::to_string(index) + " is outside the stack");
  return layers_[index - 1].thickness_nm;
}

LayerStack LayerStack::inverted() const {
  return LayerStack(upper_, std::vector<Layer>(layers_.rbegin(), layers_.rend()), lower_);
}

std::vector<std::string> preset_names() { return {"au-pva", "au-pva-zns", "au-zns", "coverslip"}; }

LayerStack preset_stack(std::string_view name) {
  const auto& glass = builtin_material("glass");
  const auto& air = builtin_material("air");
  if (name == "coverslip") return LayerStack(glass, {}, air);

  auto hmm_stack = [&](const Material& outer, const Material& middle) {
    const auto& au = builtin_material("au");
    return LayerStack(glass,
                      {{outer, 30.0}, {au, 30.0}, {middle, 50.0}, {au, 30.0}, {outer, 30.0}}, air);
  };
  const auto& pva = builtin_material("pva");
  const auto& zns = builtin_material("zns");
  if (name == "au-pva") return hmm_stack(pva, pva);
  if (name == "au-pva-zns") return hmm_stack(pva, zns);
  if (name == "au-zns") return hmm_stack(zns, zns);

  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown stack preset '" + std::string(name) + "'; known presets: " + known);
}

ResolvedStack resolve(const LayerStack& stack, double wavelength_nm) {
  if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm))
    throw DomainError("wavelength must be positive and finite");
  ResolvedStack out;
  out.wavelength_nm = wavelength_nm;
  out.k0 = 2.0 * std::numbers::pi / wavelength_nm;
  out.media.reserve(stack.medium_count());
  for (std::size_t i = 0; i < stack.medium_count(); ++i) {
    const Material& m = stack.medium(i);
    ResolvedMedium r;
    r.thickness_nm = stack.is_cladding(i) ? 0.0 : stack.thickness_nm(i);
    if (m.is_perfect_conductor()) {
      r.perfect_conductor = true;
      r.eps = complex(-std::numeric_limits<double>::infinity(), 0.0);
    } else {
      r.eps = m.permittivity(wavelength_nm).eps;
      if (r.eps.real() < 0.0 && r.eps.imag() < kMinimumMetalLoss)
        r.eps = complex(r.eps.real(), kMinimumMetalLoss);
    }
    out.media.push_back(r);
  }
  return out;
}

TransverseState TransverseState::from_s(complex eps_ref, double s) {
  return {eps_ref, decaying_branch(std::sqrt(complex(1.0 - s * s, 0.0)))};
}

complex TransverseState::q(complex eps) const {
  if (eps == eps_ref) return decaying_branch(std::sqrt(eps_ref) * cz);
  return decaying_branch(std::sqrt((eps - eps_ref) + eps_ref * cz * cz));
}

SMatrix star(const SMatrix& near, const SMatrix& far) {
  const complex d = 1.0 - near.r_back * far.r_front;
  SMatrix out;
  out.r_front = near.r_front + near.t_backward * far.r_front * near.t_forward / d;
  out.t_forward = far.t_forward * near.t_forward / d;
  out.r_back = far.r_back + far.t_forward * near.r_back * far.t_backward / d;
  out.t_backward = near.t_backward * far.t_backward / d;
  return out;
}

SMatrix interface_smatrix(const ResolvedMedium& a, complex qa, const ResolvedMedium& b, complex qb,
                          Polarization pol) {
  if (a.perfect_conductor) throw DomainError("cannot propagate out of a perfect conductor");
  SMatrix out;
  if (a.eps == b.eps && !b.perfect_conductor) return out;
  if (b.perfect_conductor) {
    out.r_front = pol == Polarization::s ? -1.0 : 1.0;
    out.t_forward = 0.0;
    out.r_back = 0.0;
    out.t_backward = 0.0;
    return out;
  }
  if (pol == Polarization::s) {
    const complex sum = qa + qb;
    out.r_front = (qa - qb) / sum;
    out.t_forward = 2.0 * qa / sum;
    out.r_back = -out.r_front;
    out.t_backward = 2.0 * qb / sum;
  } else {
    const complex bqa = b.eps * qa;
    const complex aqb = a.eps * qb;
    const complex sum = bqa + aqb;
    out.r_front = (bqa - aqb) / sum;
    out.t_forward = 2.0 * bqa / sum;
    out.r_back = -out.r_front;
    out.t_backward = 2.0 * aqb / sum;
  }
  return out;
}

SMatrix propagation_smatrix(complex q, double k0, double thickness_nm) {
  const complex phase = std::exp(complex(0.0, 1.0) * q * (k0 * thickness_nm));
  return {0.0, phase, 0.0, phase};
}

SMatrix chain_smatrix(std::span<const ResolvedMedium> media, double k0, const TransverseState& state,
                      Polarization pol) {
  SMatrix acc;
  if (media.size() < 2) return acc;
  complex q_prev = state.q(media[0].eps);
  for (std::size_t i = 1; i < media.size(); ++i) {
    const auto& next = media[i];
    complex q_next = next.perfect_conductor ? complex(0.0, 0.0) : state.q(next.eps);
    // A grazing interior layer makes both of its interfaces total reflectors.
    if (i + 1 < media.size() && std::abs(q_next) < kGrazingFloor) q_next = complex(0.0, kGrazingFloor);
    acc = star(acc, interface_smatrix(media[i - 1], q_prev, next, q_next, pol));
    if (next.perfect_conductor) break;
    if (i + 1 < media.size()) acc = star(acc, propagation_smatrix(q_next, k0, next.thickness_nm));
    q_prev = q_next;
  }
  return acc;
}

complex fresnel(const ComplexPermittivity& eps1, const ComplexPermittivity& eps2, double s,
                Polarization pol) {
  const auto state = TransverseState::from_s(eps1.eps, s);
  const ResolvedMedium a{eps1.eps, 0.0, false};
  const ResolvedMedium b{eps2.eps, 0.0, false};
  return interface_smatrix(a, state.q(a.eps), b, state.q(b.eps), pol).r_front;
}

double flux_factor(complex q, complex eps, Polarization pol) {
  return pol == Polarization::s ? q.real() : (q / eps).real();
}

double HalfSpaceResponse::transmittance(Polarization pol) const {
  if (far_is_perfect_conductor) return 0.0;
  const double near = flux_factor(q_near, eps_near, pol);
  const double far = flux_factor(q_far, eps_far, pol);
  if (!(near > 0.0) || !(far > 0.0)) return 0.0;
  return std::norm(t(pol)) * far / near;
}

HalfSpaceResponse chain_response(std::span<const ResolvedMedium> chain, double k0,
                                 double wavelength_nm, const TransverseState& state) {
  HalfSpaceResponse out;
  out.wavelength_nm = wavelength_nm;
  out.eps_near = chain.front().eps;
  out.eps_far = chain.back().eps;
  out.q_near = state.q(out.eps_near);
  out.far_is_perfect_conductor = chain.back().perfect_conductor;
  out.q_far = out.far_is_perfect_conductor ? complex(0.0, 0.0) : state.q(out.eps_far);
  out.s = std::sqrt(std::max(0.0, (1.0 - state.cz * state.cz).real()));

  const SMatrix ss = chain_smatrix(chain, k0, state, Polarization::s);
  const SMatrix sp = chain_smatrix(chain, k0, state, Polarization::p);
  out.r_s = ss.r_front;
  out.t_s = ss.t_forward;
  out.r_p = sp.r_front;
  out.t_p = sp.t_forward;
  return out;
}

std::vector<ResolvedMedium> outward_chain(const ResolvedStack& stack, std::size_t source_medium,
                                          Side side) {
  const std::size_t n = stack.media.size();
  if (source_medium >= n)
    throw DomainError("source medium " + std::to_string(source_medium) + " is outside the stack");
  if (side == Side::up)
    return {stack.media.begin() + static_cast<std::ptrdiff_t>(source_medium), stack.media.end()};
  return {stack.media.rbegin() + static_cast<std::ptrdiff_t>(n - 1 - source_medium),
          stack.media.rend()};
}

HalfSpaceResponse half_space_response(const ResolvedStack& stack, std::size_t source_medium,
                                      Side side, const TransverseState& state) {
  const auto chain = outward_chain(stack, source_medium, side);
  return chain_response(chain, stack.k0, stack.wavelength_nm, state);
}

HalfSpaceResponse half_space_response(const ResolvedStack& stack, std::size_t source_medium,
                                      Side side, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("in-plane wavevector s must be >= 0");
  if (source_medium >= stack.media.size())
    throw DomainError("source medium " + std::to_string(source_medium) + " is outside the stack");
  require_dielectric_source(stack.media[source_medium], source_medium);
  auto out = half_space_response(stack, source_medium, side,
                                 TransverseState::from_s(stack.media[source_medium].eps, s));
  out.s = s;
  return out;
}

HalfSpaceResponse half_space_response(const LayerStack& stack, std::size_t source_medium, Side side,
                                      double wavelength_nm, double s) {
  return half_space_response(resolve(stack, wavelength_nm), source_medium, side, s);
}

}  // namespace hmm
