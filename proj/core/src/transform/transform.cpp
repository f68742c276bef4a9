#include "ddfem/transform/transform.hpp"

#include <cmath>

#include "ddfem/error.hpp"

namespace ddfem::transform {

namespace {

using boundary::BoundaryPoint;
using model::ConvectiveFluxFn;
using model::SourceFn;
using model::ViscousFluxFn;

boundary::MeshPredicate outside_domain(DomainPtr domain) {
  return [domain](const Point& x) { return domain->chi(x) < 0.5; };
}

State zeros_like(const State& U) { return State::Zero(U.size()); }

}  // namespace

ModelPieces ModelPieces::of(const model::PdeModel& model) {
  return {model.has_convective_flux(), model.has_viscous_flux(), model.has_implicit_source(),
          model.has_explicit_source(), model.out_factor_implicit, model.out_factor_explicit};
}

Pretransformed pretransform(const model::PdeModel& model, DomainPtr domain) {
  model::validate(model);
  if (!domain) throw Error(ErrorCode::kInvalidArgument, "pretransform needs a domain");
  if (domain->dim() != model.dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "domain is " + std::to_string(domain->dim()) + "D but the model is " +
                    std::to_string(model.dim) + "D");
  }
  if (model.boundary.has_diffuse_dirichlet() && !model.out_factor_implicit &&
      !model.out_factor_explicit) {
    throw Error(ErrorCode::kInvalidModel,
                "Dirichlet conditions on the diffuse boundary need outFactor_i or outFactor_e "
                "as scaling factors for the outside penalty; at least one is required");
  }

  auto terms = std::make_shared<const boundary::BoundaryTerms>(
      domain, model.boundary,
      boundary::FluxPresence{model.has_convective_flux(), model.has_viscous_flux()});

  Pretransformed out;
  out.terms = terms;
  out.model.components = model.components;
  out.model.dim = model.dim;
  out.model.out_factor_implicit = model.out_factor_implicit;
  out.model.out_factor_explicit = model.out_factor_explicit;

  if (model.convective_flux) {
    out.model.convective_flux = [terms, f = model.convective_flux](double t, const Point& x,
                                                                   const State& U) {
      const Point ext = terms->cached_at(x).external;
      return f(t, ext, U);
    };
  }
  if (model.viscous_flux) {
    out.model.viscous_flux = [terms, f = model.viscous_flux](double t, const Point& x,
                                                             const State& U, const Flux& DU) {
      const Point ext = terms->cached_at(x).external;
      return f(t, ext, U, DU);
    };
  }
  const auto extend_source = [&terms](const SourceFn& f) -> SourceFn {
    if (!f) return {};
    return [terms, f](double t, const Point& x, const State& U, const Flux& DU) {
      const Point ext = terms->cached_at(x).external;
      return f(t, ext, U, DU);
    };
  };
  out.model.implicit_source = extend_source(model.implicit_source);
  out.model.explicit_source = extend_source(model.explicit_source);

  out.model.boundary = model.boundary.mesh_only();
  if (terms->has_dirichlet()) {
    out.model.boundary.add(outside_domain(domain),
                           boundary::DirichletValue{[terms](double t, const Point& x) {
                             return *terms->bnd_value_ext(t, terms->at(x));
                           }});
  } else if (terms->has_flux()) {
    boundary::FluxC convective{[terms](double t, const Point& x, const State& U, const Point&) {
      return State(-*terms->bnd_flux_c_ext(t, terms->at(x), U));
    }};
    boundary::FluxV viscous{[terms](double t, const Point& x, const State& U, const Flux& DU,
                                    const Point&) {
      return *terms->bnd_flux_v_ext(t, terms->at(x), U, DU);
    }};
    const auto region = outside_domain(domain);
    if (model.has_convective_flux() && model.has_viscous_flux()) {
      out.model.boundary.add(region, boundary::FluxPair{convective, viscous});
    } else if (model.has_convective_flux()) {
      out.model.boundary.add(region, convective);
    } else {
      out.model.boundary.add(region, viscous);
    }
  }
  return out;
}

SourceComposition compose(const DdmComponents& raw) {
  SourceComposition c;
  const auto& in = raw.input;
  if (in.explicit_source && raw.explicit_source_term) c.explicit_source.push_back("S_e_source");
  if (in.convective_flux && raw.explicit_convection) {
    c.explicit_source.push_back("S_e_convection");
  }
  if (in.out_factor_explicit && raw.outside) c.explicit_source.push_back("S_outside");
  if (in.implicit_source && raw.implicit_source_term) c.implicit_source.push_back("S_i_source");
  if (in.viscous_flux && raw.implicit_diffusion) c.implicit_source.push_back("S_i_diffusion");
  if (in.out_factor_implicit && raw.outside) c.implicit_source.push_back("S_outside");
  c.convective_flux = in.convective_flux && static_cast<bool>(raw.convective_flux);
  c.viscous_flux = in.viscous_flux && static_cast<bool>(raw.viscous_flux);
  return c;
}

namespace {

SourceFn sum_of(const DdmComponents& raw, const std::vector<std::string>& methods,
                const SourceFn& source_term, const SourceFn& boundary_term,
                std::optional<double> out_factor) {
  std::vector<SourceFn> parts;
  for (const auto& m : methods) {
    if (m == "S_outside") {
      parts.push_back([f = raw.outside, k = *out_factor](double t, const Point& x, const State& U,
                                                         const Flux& DU) {
        return State(k * f(t, x, U, DU));
      });
    } else if (m == "S_e_source" || m == "S_i_source") {
      parts.push_back(source_term);
    } else {
      parts.push_back(boundary_term);
    }
  }
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts.front();
  return [parts](double t, const Point& x, const State& U, const Flux& DU) {
    State acc = parts.front()(t, x, U, DU);
    for (std::size_t i = 1; i < parts.size(); ++i) acc += parts[i](t, x, U, DU);
    return acc;
  };
}

}  // namespace

TransformedModel posttransform(const DdmComponents& raw, std::string transformer) {
  TransformedModel out;
  out.composition = compose(raw);
  out.transformer = std::move(transformer);
  out.domain = raw.domain;
  out.terms = raw.terms;
  out.components = raw;

  auto& m = out.model;
  m.components = raw.components;
  m.dim = raw.dim;
  m.boundary = raw.boundary;
  m.mass_weight = raw.mass_weight;
  m.out_factor_implicit = raw.input.out_factor_implicit;
  m.out_factor_explicit = raw.input.out_factor_explicit;
  if (out.composition.convective_flux) m.convective_flux = raw.convective_flux;
  if (out.composition.viscous_flux) m.viscous_flux = raw.viscous_flux;
  m.explicit_source = sum_of(raw, out.composition.explicit_source, raw.explicit_source_term,
                             raw.explicit_convection, raw.input.out_factor_explicit);
  m.implicit_source = sum_of(raw, out.composition.implicit_source, raw.implicit_source_term,
                             raw.implicit_diffusion, raw.input.out_factor_implicit);
  model::validate(m);
  return out;
}

TransformedModel ddm1_transform(const model::PdeModel& model, DomainPtr domain,
                                const TransformOptions& options) {
  Pretransformed pre = pretransform(model, domain);
  const auto terms = pre.terms;
  const auto& ext = pre.model;
  const double penalty_scale = 1.0 / std::pow(domain->epsilon(), options.penalty_exponent);

  DdmComponents raw;
  raw.components = model.components;
  raw.dim = model.dim;
  raw.input = ModelPieces::of(model);
  raw.boundary = ext.boundary;
  raw.domain = domain;
  raw.terms = terms;

  if (ext.explicit_source) {
    raw.explicit_source_term = [terms, f = ext.explicit_source](double t, const Point& x,
                                                                const State& U, const Flux& DU) {
      const double phi = terms->cached_at(x).phi;
      return State(phi * f(t, x, U, DU));
    };
  }
  raw.explicit_convection = [terms](double t, const Point& x, const State& U, const Flux&) {
    const auto g = terms->bnd_flux_c_ext(t, terms->cached_at(x), U);
    return g ? State(-*g) : zeros_like(U);
  };
  raw.outside = [terms, penalty_scale](double t, const Point& x, const State& U, const Flux&) {
    const BoundaryPoint& p = terms->cached_at(x);
    const double factor = p.phi_complement * penalty_scale;
    const auto jump = terms->jump_v(t, p, U);
    return jump ? State(-factor * *jump) : zeros_like(U);
  };
  if (ext.implicit_source) {
    raw.implicit_source_term = [terms, f = ext.implicit_source](double t, const Point& x,
                                                                const State& U, const Flux& DU) {
      const double phi = terms->cached_at(x).phi;
      return State(phi * f(t, x, U, DU));
    };
  }
  raw.implicit_diffusion = [terms](double t, const Point& x, const State& U, const Flux& DU) {
    const auto g = terms->bnd_flux_v_ext(t, terms->cached_at(x), U, DU);
    return g ? *g : zeros_like(U);
  };
  if (ext.convective_flux) {
    raw.convective_flux = [terms, f = ext.convective_flux](double t, const Point& x,
                                                           const State& U) {
      const double phi = terms->cached_at(x).phi;
      return Flux(phi * f(t, x, U));
    };
  }
  if (ext.viscous_flux) {
    raw.viscous_flux = [terms, f = ext.viscous_flux](double t, const Point& x, const State& U,
                                                     const Flux& DU) {
      const double phi = terms->cached_at(x).phi;
      return Flux(phi * f(t, x, U, DU));
    };
  }
  raw.mass_weight = [terms](double, const Point& x) { return terms->cached_at(x).phi; };
  return posttransform(raw, "ddm1");
}

}  // namespace ddfem::transform
