#include "ddfem/transform/registry.hpp"

#include "ddfem/error.hpp"

namespace ddfem::transform {

TransformerRegistry::TransformerRegistry() {
  entries_.emplace("ddm1", [](const model::PdeModel& m, DomainPtr d, const TransformOptions& o) {
    return ddm1_transform(m, std::move(d), o);
  });
}

void TransformerRegistry::register_transformer(const std::string& name, TransformerFn fn) {
  if (name.empty() || !fn) {
    throw Error(ErrorCode::kInvalidArgument, "transformer needs a name and a function");
  }
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(name, std::move(fn)).second) {
    throw Error(ErrorCode::kDuplicate, "transformer '" + name + "' is already registered");
  }
}

const TransformerFn& TransformerRegistry::lookup(const std::string& name) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(name);
  if (it == entries_.end()) {
    std::string known;
    for (const auto& [key, fn] : entries_) known += (known.empty() ? "" : ", ") + key;
    throw Error(ErrorCode::kNotFound,
                "unknown transformer '" + name + "'; available: " + known);
  }
  return it->second;
}

bool TransformerRegistry::contains(const std::string& name) const {
  std::lock_guard lock(mutex_);
  return entries_.count(name) != 0;
}

std::vector<std::string> TransformerRegistry::names() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [key, fn] : entries_) out.push_back(key);
  return out;
}

TransformerRegistry& transformers() {
  static TransformerRegistry registry;
  return registry;
}

}  // namespace ddfem::transform
