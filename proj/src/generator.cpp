#include "gham/generator.hpp"

namespace gham {

GeneratorId Universe::add(std::string name, Parity parity, GeneratorRole role) {
  if (by_name_.contains(name)) throw std::invalid_argument("generator '" + name + "' already exists");
  auto id = static_cast<GeneratorId>(gens_.size());
  by_name_.emplace(name, id);
  gens_.push_back(Generator{id, std::move(name), parity, role});
  return id;
}

GeneratorId Universe::add_fresh(const std::string& base, Parity parity, GeneratorRole role) {
  std::string name = base;
  while (by_name_.contains(name)) name += '\'';
  return add(std::move(name), parity, role);
}

const Generator& Universe::operator[](GeneratorId id) const {
  if (id >= gens_.size()) throw UnknownGenerator("unknown generator id " + std::to_string(id));
  return gens_[id];
}

std::optional<GeneratorId> Universe::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

}  // namespace gham
