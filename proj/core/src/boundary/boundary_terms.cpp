#include "ddfem/boundary/boundary_terms.hpp"

#include <array>
#include <atomic>
#include <set>
#include <sstream>

#include "ddfem/error.hpp"

namespace ddfem::boundary {

namespace {

bool contains_node(const geometry::SdfNode& root, const geometry::SdfNode* target,
                   std::set<const geometry::SdfNode*>& seen) {
  if (&root == target) return true;
  if (!seen.insert(&root).second) return false;
  for (const auto& c : root.children()) {
    if (contains_node(*c, target, seen)) return true;
  }
  return false;
}

std::string describe(const BoundaryCondition& bc) {
  switch (bc.index()) {
    case 0: return "dirichlet";
    case 1: return "flux_c";
    case 2: return "flux_v";
    default: return "flux_pair";
  }
}

void check_flux_wrapper(const BoundaryCondition& bc, FluxPresence fluxes,
                        const std::string& label) {
  if (is_dirichlet(bc)) return;
  std::string expected;
  if (fluxes.convective && fluxes.viscous) {
    expected = "flux_pair";
  } else if (fluxes.convective) {
    expected = "flux_c";
  } else if (fluxes.viscous) {
    expected = "flux_v";
  } else {
    throw Error(ErrorCode::kInvalidModel, "flux boundary condition on segment '" + label +
                                              "' but the model defines neither F_c nor F_v");
  }
  if (describe(bc) != expected) {
    throw Error(ErrorCode::kInvalidModel, "segment '" + label + "' uses a " + describe(bc) +
                                              " boundary condition; the model's fluxes require " +
                                              expected);
  }
}

const FluxCFn* convective_data(const BoundaryCondition& bc) {
  if (const auto* c = std::get_if<FluxC>(&bc)) return &c->g_c;
  if (const auto* p = std::get_if<FluxPair>(&bc)) return &p->convective.g_c;
  return nullptr;
}

const FluxVFn* viscous_data(const BoundaryCondition& bc) {
  if (const auto* v = std::get_if<FluxV>(&bc)) return &v->g_v;
  if (const auto* p = std::get_if<FluxPair>(&bc)) return &p->viscous.g_v;
  return nullptr;
}

std::uint64_t next_instance_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

struct PointCacheSlot {
  std::uint64_t owner = 0;
  BoundaryPoint point;
};

}  // namespace

BoundaryTerms::BoundaryTerms(std::shared_ptr<const geometry::DomainGeometry> domain,
                             const BoundaryMap& map, FluxPresence fluxes)
    : domain_(std::move(domain)), id_(next_instance_id()) {
  if (!domain_) throw Error(ErrorCode::kInvalidArgument, "boundary terms need a domain");
  const auto& root = domain_->root();
  for (const auto& entry : map.entries()) {
    if (!is_diffuse(entry.key)) {
      physical_.add(entry.key, entry.condition);
      continue;
    }
    Segment seg;
    if (const auto* name = std::get_if<std::string>(&entry.key)) {
      seg.node = domain_->segment(*name);
      seg.label = *name;
    } else {
      seg.node = std::get<geometry::Sdf>(entry.key);
      if (!seg.node) throw Error(ErrorCode::kInvalidArgument, "boundary key SDF is null");
      std::set<const geometry::SdfNode*> seen;
      if (!contains_node(*root, seg.node.get(), seen)) {
        throw Error(ErrorCode::kNotFound,
                    "boundary key SDF is not part of the domain tree" +
                        (seg.node->name() ? " ('" + *seg.node->name() + "')" : std::string()));
      }
      seg.label = seg.node->name().value_or(std::string(seg.node->kind()) + "#" +
                                            std::to_string(segments_.size()));
    }
    check_flux_wrapper(entry.condition, fluxes, seg.label);
    seg.condition = entry.condition;
    (is_dirichlet(seg.condition) ? dirichlet_ : flux_).push_back(segments_.size());
    segment_epsilons_.push_back(domain_->segment_epsilon(*seg.node));
    segments_.push_back(std::move(seg));
  }
}

std::vector<double> BoundaryTerms::normalize(std::vector<double> w) const {
  double total = 0.0;
  for (double v : w) total += v;
  if (total < 1e-14) {
    // Far from every segment: the weighted terms are negligible anyway.
    const double uniform = w.empty() ? 0.0 : 1.0 / static_cast<double>(w.size());
    for (double& v : w) v = uniform;
    return w;
  }
  for (double& v : w) v /= total;
  return w;
}

BoundaryPoint BoundaryTerms::at(const Point& x) const {
  const auto& root = *domain_->root();
  BoundaryPoint p;
  p.x = x;
  p.r = root.value(x);
  const Point grad = root.gradient(x);
  p.projected = x - p.r * grad;
  const double eps = domain_->epsilon();
  p.external = p.r <= 0.0 ? x : p.projected;
  p.phi = geometry::phase_field(p.r, eps);
  p.phi_complement = geometry::phase_field_complement(p.r, eps);
  const double grad_norm = grad.norm();
  p.surface_delta = geometry::phase_field_slope(p.r, eps) * grad_norm;
  p.normal = grad_norm > 0.0 ? Point(grad / grad_norm) : grad;
  std::vector<double> w(segments_.size());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    w[i] = geometry::interface_weight(segments_[i].node->value(p.projected), segment_epsilons_[i]);
  }
  p.weights = normalize(std::move(w));
  return p;
}

const BoundaryPoint& BoundaryTerms::cached_at(const Point& x) const {
  thread_local std::array<PointCacheSlot, 4> slots;
  thread_local std::size_t next = 0;
  for (auto& slot : slots) {
    if (slot.owner == id_ && slot.point.x.size() == x.size() && slot.point.x == x) {
      return slot.point;
    }
  }
  auto& slot = slots[next];
  next = (next + 1) % slots.size();
  slot.owner = id_;
  slot.point = at(x);
  return slot.point;
}

double BoundaryTerms::segment_weight(std::size_t i, const Point& x) const {
  if (i >= segments_.size()) {
    throw Error(ErrorCode::kNotFound, "segment index " + std::to_string(i) + " out of range");
  }
  return geometry::interface_weight(segments_[i].node->value(domain_->boundary_projection(x)),
                                    segment_epsilons_[i]);
}

std::vector<double> BoundaryTerms::normalized_weights(const Point& x) const {
  return at(x).weights;
}

State BoundaryTerms::extend_value(const ValueFn& g, double t, const Point& x) const {
  return g(t, domain_->boundary_projection(x));
}

std::optional<State> BoundaryTerms::bnd_value_ext(double t, const BoundaryPoint& p) const {
  if (dirichlet_.empty()) return std::nullopt;
  std::optional<State> sum;
  for (std::size_t i : dirichlet_) {
    const auto& g = std::get<DirichletValue>(segments_[i].condition).g;
    State term = p.weights[i] * g(t, p.projected);
    sum = sum ? State(*sum + term) : term;
  }
  return sum;
}

std::optional<State> BoundaryTerms::jump_v(double t, const BoundaryPoint& p,
                                           const State& U) const {
  if (dirichlet_.empty()) return std::nullopt;
  State sum = State::Zero(U.size());
  for (std::size_t i : dirichlet_) {
    const auto& g = std::get<DirichletValue>(segments_[i].condition).g;
    sum += p.weights[i] * (U - g(t, p.projected));
  }
  return sum;
}

std::optional<State> BoundaryTerms::bnd_flux_c_ext(double t, const BoundaryPoint& p,
                                                   const State& U) const {
  if (flux_.empty()) return std::nullopt;
  State sum = State::Zero(U.size());
  for (std::size_t i : flux_) {
    if (const auto* g = convective_data(segments_[i].condition)) {
      sum += p.weights[i] * (*g)(t, p.projected, U, p.normal);
    }
  }
  return State(sum * p.surface_delta);
}

std::optional<State> BoundaryTerms::bnd_flux_v_ext(double t, const BoundaryPoint& p,
                                                   const State& U, const Flux& DU) const {
  if (flux_.empty()) return std::nullopt;
  State sum = State::Zero(U.size());
  for (std::size_t i : flux_) {
    if (const auto* g = viscous_data(segments_[i].condition)) {
      sum += p.weights[i] * (*g)(t, p.projected, U, DU, p.normal);
    }
  }
  return State(sum * p.surface_delta);
}

std::optional<State> BoundaryTerms::jump_fv(double t, const BoundaryPoint& p, const State& U,
                                            const Flux& DU, const Flux& viscous_flux) const {
  if (flux_.empty()) return std::nullopt;
  const State normal_flux = viscous_flux * p.normal;
  State sum = State::Zero(U.size());
  for (std::size_t i : flux_) {
    State g = State::Zero(U.size());
    if (const auto* gv = viscous_data(segments_[i].condition)) {
      g = (*gv)(t, p.projected, U, DU, p.normal);
    }
    sum += p.weights[i] * (normal_flux - g);
  }
  return State(sum * p.surface_delta);
}

}  // namespace ddfem::boundary
