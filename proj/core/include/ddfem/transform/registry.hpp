#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "ddfem/transform/transform.hpp"

namespace ddfem::transform {

using TransformerFn = std::function<TransformedModel(const model::PdeModel&, DomainPtr,
                                                     const TransformOptions&)>;

/// Named diffuse-domain transformers. "ddm1" is always present.
class TransformerRegistry {
 public:
  TransformerRegistry();

  /// Throws Error(kDuplicate) if the name is taken.
  void register_transformer(const std::string& name, TransformerFn fn);
  /// Throws Error(kNotFound) naming the registered transformers.
  const TransformerFn& lookup(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, TransformerFn> entries_;
};

/// Process-wide registry used by the command line tool.
TransformerRegistry& transformers();

inline void register_transformer(const std::string& name, TransformerFn fn) {
  transformers().register_transformer(name, std::move(fn));
}

}  // namespace ddfem::transform
