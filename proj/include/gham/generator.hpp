#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gham {

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}
inline const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

// Coordinates live in a phase space; velocities only appear in Lagrangians;
// central generators (parameters, multipliers, tau) are constants for every bracket.
enum class GeneratorRole : std::uint8_t { Coordinate, Velocity, Central };

using GeneratorId = std::uint32_t;

struct Generator {
  GeneratorId id;
  std::string name;
  Parity parity;
  GeneratorRole role;
};

class UnknownGenerator : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Append-only registry of generators. Ids are dense and ordered by registration.
// Registration is not synchronized; polynomials only ever read from it.
class Universe {
 public:
  GeneratorId add(std::string name, Parity parity, GeneratorRole role = GeneratorRole::Coordinate);
  // Registers `base`, or `base'`, `base''`, ... when the name is taken.
  GeneratorId add_fresh(const std::string& base, Parity parity,
                        GeneratorRole role = GeneratorRole::Central);

  const Generator& operator[](GeneratorId id) const;
  std::optional<GeneratorId> find(std::string_view name) const;
  std::size_t size() const { return gens_.size(); }
  const std::vector<Generator>& generators() const { return gens_; }

 private:
  std::vector<Generator> gens_;
  std::unordered_map<std::string, GeneratorId> by_name_;
};

using UniversePtr = std::shared_ptr<Universe>;

inline UniversePtr make_universe() { return std::make_shared<Universe>(); }

}  // namespace gham
